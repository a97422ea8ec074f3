#pragma once

#include "afem/quadrature.hpp"
#include "afem/recovery.hpp"

#include <optional>
#include <string>

namespace afem {

struct IndicatorSet {
  std::string label;
  std::vector<double> element;  // η_K
  std::vector<double> edge;     // η_F (analysis only; overlapping patches)
  double global = 0.0;          // η = (Σ_K η_K²)^{1/2}
  double c1 = 1.0, c2 = 0.0;    // weights of the flux and gradient parts
};

namespace detail {

inline double sum_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

/// Squared element and edge norms ‖M^{1/2} Δ‖² of a recovery correction.
inline void correction_norms(const Mesh& mesh, const CoefficientField& A, const RecoveredField& r, std::vector<double>& el2,
                             std::vector<double>& ed2) {
  const Family fam = r.family;
  el2.assign(static_cast<std::size_t>(mesh.num_triangles()), 0.0);
  ed2.assign(static_cast<std::size_t>(mesh.num_edges()), 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& D = r.correction[static_cast<std::size_t>(t)];
    el2[static_cast<std::size_t>(t)] = std::max(0.0, affine_mass(mesh.area(t), weight_matrix(A, t, fam), D, D));
  }
  for (int f = 0; f < mesh.num_edges(); ++f) {
    const Edge& e = mesh.edge(f);
    double s = 0.0;
    for (int t : {e.minus, e.plus}) {
      if (t < 0) continue;
      const auto D = edge_correction_values(mesh, r, f, t);
      s += affine_mass(mesh.area(t), weight_matrix(A, t, fam), D, D);
    }
    ed2[static_cast<std::size_t>(f)] = std::max(0.0, s);
  }
}

inline IndicatorSet finish(std::string label, const std::vector<double>& el2, const std::vector<double>& ed2, double c1, double c2) {
  IndicatorSet s;
  s.label = std::move(label);
  s.c1 = c1;
  s.c2 = c2;
  double tot = 0.0;
  for (double x : el2) {
    s.element.push_back(std::sqrt(x));
    tot += x;
  }
  for (double x : ed2) s.edge.push_back(std::sqrt(x));
  s.global = std::sqrt(tot);
  return s;
}

}  // namespace detail

/// η_K = ‖A^{-1/2} σ^Δ‖_K for flux recoveries and ‖A^{1/2} ρ^Δ‖_K for
/// gradient recoveries; η_F is the same norm of the single-edge correction over ω_F.
inline IndicatorSet indicators(const Mesh& mesh, const CoefficientField& A, const RecoveredField& r) {
  std::vector<double> el2, ed2;
  detail::correction_norms(mesh, A, r, el2, ed2);
  return detail::finish(to_string(r.family), el2, ed2, r.kind == FieldKind::flux ? 1.0 : 0.0,
                        r.kind == FieldKind::flux ? 0.0 : 1.0);
}

/// Nonconforming estimator combining a flux recovery (RT or BDM) and a
/// gradient recovery (NE or ND): η_K² = c1 ‖A^{-1/2}σ^Δ‖_K² + c2 ‖A^{1/2}ρ^Δ‖_K².
inline IndicatorSet indicators_nonconforming(const Mesh& mesh, const CoefficientField& A, const RecoveredField& flux,
                                             const RecoveredField& grad, double c1 = 0.5, double c2 = 0.5) {
  require(flux.kind == FieldKind::flux && grad.kind == FieldKind::gradient,
          "indicators_nonconforming: expected a flux and a gradient recovery");
  require(c1 > 0.0 && c1 < 1.0 && c2 > 0.0 && c2 < 1.0 && std::abs(c1 + c2 - 1.0) <= 1e-12,
          "indicators_nonconforming: need c1, c2 in (0,1) with c1 + c2 = 1");
  std::vector<double> fe, fd, ge, gd;
  detail::correction_norms(mesh, A, flux, fe, fd);
  detail::correction_norms(mesh, A, grad, ge, gd);
  for (std::size_t i = 0; i < fe.size(); ++i) fe[i] = c1 * fe[i] + c2 * ge[i];
  for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = c1 * fd[i] + c2 * gd[i];
  return detail::finish(std::string(to_string(flux.family)) + "-" + to_string(grad.family), fe, fd, c1, c2);
}

/// Residual-type edge estimators used as efficiency references (scalar A only).
/// Conforming: η_F = h_F j_f/√(α⁻+α⁺) on interior edges, h_F j_f/√α⁻ on Neumann edges.
/// Mixed: η_F² = ((α⁻+α⁺)/2) h_F ∫_F |j_g|², with α⁻ alone on Dirichlet edges.
/// Nonconforming: 2h²j_f²/(α⁺+α⁻) + h²α⁺α⁻ j_g²/(α⁺+α⁻) inside, h²j_f²/α⁻ on
/// Neumann and h²α⁻j_g² on Dirichlet edges.
/// Element values split each η_F² equally between the adjacent elements.
inline IndicatorSet residual_edge_estimator(const Mesh& mesh, const CoefficientField& A, const EdgeTraces& tr,
                                           const ProblemData& data) {
  require(A.all_scalar(), "residual_edge_estimator: requires A = α I on every element");
  const Method m = tr.method;
  std::vector<EdgeJump> jf, jg;
  if (m != Method::mixed) jf = compute_jumps(mesh, tr, data, FieldKind::flux);
  if (m != Method::conforming) jg = compute_jumps(mesh, tr, data, FieldKind::gradient);
  std::vector<double> ed2(static_cast<std::size_t>(mesh.num_edges()), 0.0);
  std::vector<double> el2(static_cast<std::size_t>(mesh.num_triangles()), 0.0);
  for (int f = 0; f < mesh.num_edges(); ++f) {
    const Edge& e = mesh.edge(f);
    const double h = e.length;
    const double am = A.alpha(e.minus);
    const double ap = e.interior() ? A.alpha(e.plus) : 0.0;
    double v = 0.0;
    if (m == Method::conforming) {
      const EdgeJump& j = jf[static_cast<std::size_t>(f)];
      if (j.present) v = h * h * j.s * j.s / (e.interior() ? am + ap : am);
    } else if (m == Method::mixed) {
      const EdgeJump& j = jg[static_cast<std::size_t>(f)];
      if (j.present) {
        const double w = e.interior() ? 0.5 * (am + ap) : am;
        v = w * h * (h / 3.0) * (j.s * j.s + j.s * j.e + j.e * j.e);
      }
    } else {
      const EdgeJump& a = jf[static_cast<std::size_t>(f)];
      const EdgeJump& b = jg[static_cast<std::size_t>(f)];
      if (e.interior())
        v = 2.0 * h * h / (am + ap) * a.s * a.s + h * h * am * ap / (am + ap) * b.s * b.s;
      else if (e.label == EdgeLabel::neumann)
        v = h * h / am * a.s * a.s;
      else
        v = h * h * am * b.s * b.s;
    }
    ed2[static_cast<std::size_t>(f)] = v;
    if (e.interior()) {
      el2[static_cast<std::size_t>(e.minus)] += 0.5 * v;
      el2[static_cast<std::size_t>(e.plus)] += 0.5 * v;
    } else {
      el2[static_cast<std::size_t>(e.minus)] += v;
    }
  }
  return detail::finish(std::string("residual-") + to_string(m), el2, ed2, 1.0, 0.0);
}

struct Oscillation {
  double global = 0.0;
  std::vector<double> element;
};

/// H_{f,K} = h_K/√α_K ‖f - f̄_K‖_K with f̄_K the element mean; seven-point rule.
inline Oscillation oscillation(const Mesh& mesh, const CoefficientField& A, const ScalarFn& f) {
  Oscillation o;
  const auto& rule = quad::triangle7();
  double tot = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto x = mesh.coords(t);
    std::array<double, 7> v{};
    double mean = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      v[q] = f(quad::map_point(x, rule[q].bary));
      mean += rule[q].w * v[q];
    }
    double n2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) n2 += rule[q].w * (v[q] - mean) * (v[q] - mean);
    n2 *= mesh.area(t);
    const double H = mesh.diameter(t) / std::sqrt(A.alpha(t)) * std::sqrt(std::max(0.0, n2));
    o.element.push_back(H);
    tot += H * H;
  }
  o.global = std::sqrt(tot);
  return o;
}

// ---------------------------------------------------------------------------
// True energy error

namespace detail {

inline double tri_area(const std::array<Vec2, 3>& x) { return 0.5 * std::abs(cross(x[1] - x[0], x[2] - x[0])); }

/// ∫ over a triangle with collapsed Gauss points; refines towards nearby
/// singular points (which must not be vertices of the triangle).
template <class F>
double integrate_near(const std::array<Vec2, 3>& x, const F& fn, const std::vector<SingularPoint>& sing, int depth) {
  const double diam = std::max({(x[1] - x[0]).norm(), (x[2] - x[1]).norm(), (x[0] - x[2]).norm()});
  bool near = false;
  for (const auto& sp : sing) {
    const Vec2 c = (x[0] + x[1] + x[2]) / 3.0;
    if ((c - sp.z).norm() < 1.5 * diam) near = true;
  }
  if (near && depth < 14) {
    const Vec2 m01 = 0.5 * (x[0] + x[1]), m12 = 0.5 * (x[1] + x[2]), m20 = 0.5 * (x[2] + x[0]);
    return integrate_near<F>({x[0], m01, m20}, fn, sing, depth + 1) + integrate_near<F>({m01, x[1], m12}, fn, sing, depth + 1) +
           integrate_near<F>({m20, m12, x[2]}, fn, sing, depth + 1) + integrate_near<F>({m01, m12, m20}, fn, sing, depth + 1);
  }
  static const auto rule = quad::triangle_collapsed(7);
  const double a = tri_area(x);
  double s = 0.0;
  for (const auto& p : rule) s += p.w * fn(quad::map_point(x, p.bary));
  return s * a;
}

}  // namespace detail

/// ‖A^{1/2}(∇u - g_h)‖ over the mesh, where g_h is the per-element affine
/// field given by vertex values (∇_h u_h, or ρ̂_m = -A⁻¹σ_m for the mixed
/// method, which makes this ‖A^{-1/2}(σ - σ_m)‖). Elements with a vertex at a
/// singular point z use the homogeneity of u about z: the integral over K is
/// a geometric series of the integral over K minus its half-size copy at z.
inline double energy_error(const Mesh& mesh, const CoefficientField& A, const std::vector<VertexValues>& gh,
                           const ExactSolution& exact, const std::vector<SingularPoint>& singular,
                           std::vector<double>* per_element = nullptr) {
  double total = 0.0;
  if (per_element) per_element->assign(static_cast<std::size_t>(mesh.num_triangles()), 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto x = mesh.coords(t);
    const Mat2& M = A.A(t);
    const auto& V = gh[static_cast<std::size_t>(t)];
    const LocalTriangleFrame fr(x);
    int vz = -1;
    const SingularPoint* sp = nullptr;
    for (const auto& s : singular)
      for (int l = 0; l < 3; ++l)
        if ((x[static_cast<std::size_t>(l)] - s.z).norm() <= 1e-12 * mesh.diameter(t)) {
          vz = l;
          sp = &s;
        }
    double e2;
    if (vz < 0) {
      auto fn = [&](const Vec2& p) {
        const auto lam = fr.barycentric(p);
        const Vec2 d = exact.grad(p) - eval_affine(V, lam);
        return d.dot(M * d);
      };
      e2 = detail::integrate_near(x, fn, singular, 0);
    } else {
      const Vec2 z = sp->z;
      const double g = sp->exponent;
      const Vec2 p1 = x[static_cast<std::size_t>((vz + 1) % 3)], p2 = x[static_cast<std::size_t>((vz + 2) % 3)];
      const Vec2 m1 = 0.5 * (z + p1), m2 = 0.5 * (z + p2);
      // g_h(x) = g_h(z) + G (x - z)
      const Vec2 gz = V[static_cast<std::size_t>(vz)];
      Mat2 G;
      {
        const Vec2 d1 = p1 - z, d2 = p2 - z;
        Mat2 D;
        D << d1.x(), d2.x(), d1.y(), d2.y();
        Mat2 W;
        const Vec2 w1 = V[static_cast<std::size_t>((vz + 1) % 3)] - gz, w2 = V[static_cast<std::size_t>((vz + 2) % 3)] - gz;
        W << w1.x(), w2.x(), w1.y(), w2.y();
        G = W * D.inverse();
      }
      double uu = 0.0;
      Vec2 u1 = Vec2::Zero();
      Mat2 uP = Mat2::Zero();
      for (const auto& tri : {std::array<Vec2, 3>{m1, p1, p2}, std::array<Vec2, 3>{m1, p2, m2}}) {
        uu += detail::integrate_near(tri, [&](const Vec2& p) { const Vec2 q = exact.grad(p); return q.dot(M * q); }, {}, 0);
        for (int i = 0; i < 2; ++i) {
          u1[i] += detail::integrate_near(tri, [&](const Vec2& p) { return exact.grad(p)[i]; }, {}, 0);
          for (int j = 0; j < 2; ++j)
            uP(i, j) += detail::integrate_near(tri, [&](const Vec2& p) { return exact.grad(p)[i] * (p - z)[j]; }, {}, 0);
        }
      }
      uu /= 1.0 - std::pow(2.0, -2.0 * g);
      u1 /= 1.0 - std::pow(2.0, -(1.0 + g));
      uP /= 1.0 - std::pow(2.0, -(2.0 + g));
      const double cross_term = gz.dot(M * u1) + (G.array() * (M * uP).array()).sum();
      e2 = uu - 2.0 * cross_term + affine_mass(fr.area, M, V, V);
      e2 = std::max(0.0, e2);
    }
    if (per_element) (*per_element)[static_cast<std::size_t>(t)] = e2;
    total += e2;
  }
  return std::sqrt(total);
}

/// Numerical gradient field matching the method's energy norm.
inline std::vector<VertexValues> discrete_gradient(const Mesh& mesh, const CoefficientField& A, const DiscreteSolution& sol) {
  std::vector<VertexValues> g;
  g.reserve(static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (const auto* m = std::get_if<MixedSolution>(&sol)) {
      auto S = mixed_flux(mesh, *m, t);
      for (auto& v : S) v = -(A.A_inv(t) * v);
      g.push_back(S);
    } else {
      const Vec2 d = element_gradient(mesh, sol, t);
      g.push_back({d, d, d});
    }
  }
  return g;
}

/// ‖A^{1/2}∇_h(u - u_h)‖ (conforming, nonconforming) or ‖A^{-1/2}(σ - σ_m)‖ (mixed).
inline double true_energy_error(const Mesh& mesh, const CoefficientField& A, const DiscreteSolution& sol, const ProblemData& data) {
  require(data.exact.has_value(), "true_energy_error: problem has no exact solution");
  return energy_error(mesh, A, discrete_gradient(mesh, A, sol), *data.exact, data.singular);
}

}  // namespace afem
