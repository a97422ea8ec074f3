#pragma once

#include "afem/basis.hpp"
#include "afem/coefficient.hpp"
#include "afem/mesh.hpp"
#include "afem/problems.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <limits>
#include <variant>
#include <vector>

namespace afem {

enum class Method { conforming, mixed, nonconforming };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::conforming: return "conforming";
    case Method::mixed: return "mixed";
    case Method::nonconforming: return "nonconforming";
  }
  return "?";
}

/// P1 nodal values.
struct ConformingSolution {
  Eigen::VectorXd u;
};
/// RT0 coefficients per edge (σ·n_F on F) and P0 values per element.
struct MixedSolution {
  Eigen::VectorXd sigma;
  Eigen::VectorXd u;
};
/// Crouzeix-Raviart values at edge midpoints.
struct NonconformingSolution {
  Eigen::VectorXd u;
};

using DiscreteSolution = std::variant<ConformingSolution, MixedSolution, NonconformingSolution>;

inline Method method_of(const DiscreteSolution& s) {
  return static_cast<Method>(s.index());
}

inline LocalTriangleFrame frame_of(const Mesh& mesh, int t) { return LocalTriangleFrame(mesh.coords(t)); }

/// Three-point edge-midpoint rule for ∫_K f φ; exact for quadratic integrands.
inline std::array<double, 3> midpoint_values(const Mesh& mesh, int t, const ScalarFn& f) {
  std::array<double, 3> v{};
  const auto& te = mesh.triangle_edges(t);
  for (std::size_t k = 0; k < 3; ++k) v[k] = f(mesh.edge(te[k]).midpoint);
  return v;
}

inline double element_integral(const Mesh& mesh, int t, const ScalarFn& f) {
  const auto v = midpoint_values(mesh, t, f);
  return mesh.area(t) * (v[0] + v[1] + v[2]) / 3.0;
}

namespace detail {

inline void check_residual(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b,
                           const char* what) {
  const double res = (K * x - b).norm();
  const double scale = std::max(b.norm(), 1e-300);
  if (!std::isfinite(res) || (b.norm() > 0 ? res > 1e-10 * scale : res > 1e-12))
    throw NumericalError(std::string(what) + ": linear solve residual too large (" + std::to_string(res) + ")");
}

inline Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b, const char* what) {
  if (K.rows() == 0) return Eigen::VectorXd(0);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw NumericalError(std::string(what) + ": factorization failed");
  Eigen::VectorXd x = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success) throw NumericalError(std::string(what) + ": solve failed");
  check_residual(K, x, b, what);
  return x;
}

}  // namespace detail

/// Galerkin P1 solution; Dirichlet values are nodal interpolants of g_D.
inline DiscreteSolution solve_conforming(const Mesh& mesh, const CoefficientField& A, const ProblemData& data) {
  const int nv = mesh.num_vertices();
  std::vector<int> dof(static_cast<std::size_t>(nv), -1);
  int nfree = 0;
  Eigen::VectorXd u(nv);
  for (int v = 0; v < nv; ++v) {
    if (mesh.vertex_label(v) == VertexLabel::dirichlet)
      u[v] = data.g_D(mesh.vertex(v));
    else
      dof[static_cast<std::size_t>(v)] = nfree++;
  }
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nfree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto fr = frame_of(mesh, t);
    const auto& tr = mesh.triangle(t);
    const auto fm = midpoint_values(mesh, t, data.f);
    for (std::size_t l = 0; l < 3; ++l) {
      const int row = dof[static_cast<std::size_t>(tr[l])];
      if (row < 0) continue;
      // λ_l is 1/2 at the midpoints of the two edges through vertex l.
      b[row] += fr.area / 3.0 * 0.5 * (fm[(l + 1) % 3] + fm[(l + 2) % 3]);
      for (std::size_t m = 0; m < 3; ++m) {
        const double k = fr.area * fr.grad[l].dot(A.A(t) * fr.grad[m]);
        const int col = dof[static_cast<std::size_t>(tr[m])];
        if (col >= 0)
          trip.emplace_back(row, col, k);
        else
          b[row] -= k * u[tr[m]];
      }
    }
  }
  for (const auto& e : mesh.edges()) {
    if (e.label != EdgeLabel::neumann) continue;
    const double g = data.g_N(e.midpoint, e.normal);
    for (int v : {e.s, e.e})
      if (dof[static_cast<std::size_t>(v)] >= 0) b[dof[static_cast<std::size_t>(v)]] -= 0.5 * g * e.length;
  }
  Eigen::SparseMatrix<double> K(nfree, nfree);
  K.setFromTriplets(trip.begin(), trip.end());
  const Eigen::VectorXd x = detail::solve_spd(K, b, "solve_conforming");
  for (int v = 0; v < nv; ++v)
    if (dof[static_cast<std::size_t>(v)] >= 0) u[v] = x[dof[static_cast<std::size_t>(v)]];
  return ConformingSolution{u};
}

/// Crouzeix-Raviart solution; Dirichlet midpoint values are (g_D(s) + g_D(e))/2.
inline DiscreteSolution solve_nonconforming(const Mesh& mesh, const CoefficientField& A, const ProblemData& data) {
  const int ne = mesh.num_edges();
  std::vector<int> dof(static_cast<std::size_t>(ne), -1);
  int nfree = 0;
  Eigen::VectorXd u(ne);
  for (int f = 0; f < ne; ++f) {
    const Edge& e = mesh.edge(f);
    if (e.label == EdgeLabel::dirichlet)
      u[f] = 0.5 * (data.g_D(mesh.vertex(e.s)) + data.g_D(mesh.vertex(e.e)));
    else
      dof[static_cast<std::size_t>(f)] = nfree++;
  }
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nfree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto fr = frame_of(mesh, t);
    const auto& te = mesh.triangle_edges(t);
    const auto fm = midpoint_values(mesh, t, data.f);
    for (std::size_t k = 0; k < 3; ++k) {
      const int row = dof[static_cast<std::size_t>(te[k])];
      if (row < 0) continue;
      b[row] += fr.area / 3.0 * fm[k];
      for (std::size_t l = 0; l < 3; ++l) {
        const double s = 4.0 * fr.area * fr.grad[k].dot(A.A(t) * fr.grad[l]);
        const int col = dof[static_cast<std::size_t>(te[l])];
        if (col >= 0)
          trip.emplace_back(row, col, s);
        else
          b[row] -= s * u[te[l]];
      }
    }
  }
  for (int f = 0; f < ne; ++f) {
    const Edge& e = mesh.edge(f);
    if (e.label == EdgeLabel::neumann) b[dof[static_cast<std::size_t>(f)]] -= data.g_N(e.midpoint, e.normal) * e.length;
  }
  Eigen::SparseMatrix<double> K(nfree, nfree);
  K.setFromTriplets(trip.begin(), trip.end());
  const Eigen::VectorXd x = detail::solve_spd(K, b, "solve_nonconforming");
  for (int f = 0; f < ne; ++f)
    if (dof[static_cast<std::size_t>(f)] >= 0) u[f] = x[dof[static_cast<std::size_t>(f)]];
  return NonconformingSolution{u};
}

/// Vertex values of the global RT basis ψ_F restricted to t (minus sign on K⁺).
inline VertexValues rt_psi(const Mesh& mesh, const LocalTriangleFrame& fr, int t, int f) {
  const int k = mesh.local_edge(t, f);
  auto V = local_basis_values(fr, {BasisFamily::RT, k});
  const double s = mesh.side_sign(t, f);
  for (auto& v : V) v *= s;
  return V;
}

/// Lowest-order Raviart-Thomas mixed solution. Neumann edges carry σ_F = g_N;
/// the divergence equation uses the same midpoint rule as the other solvers,
/// so div σ|_K equals the element mean of f under that rule.
inline DiscreteSolution solve_mixed(const Mesh& mesh, const CoefficientField& A, const ProblemData& data) {
  const int ne = mesh.num_edges(), nt = mesh.num_triangles();
  std::vector<int> dof(static_cast<std::size_t>(ne), -1);
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(ne);
  int nfree = 0;
  for (int f = 0; f < ne; ++f) {
    const Edge& e = mesh.edge(f);
    if (e.label == EdgeLabel::neumann)
      sigma[f] = data.g_N(e.midpoint, e.normal);
    else
      dof[static_cast<std::size_t>(f)] = nfree++;
  }
  const int n = nfree + nt;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int t = 0; t < nt; ++t) {
    const auto fr = frame_of(mesh, t);
    const auto& te = mesh.triangle_edges(t);
    std::array<VertexValues, 3> psi;
    for (std::size_t k = 0; k < 3; ++k) psi[k] = rt_psi(mesh, fr, t, te[k]);
    const int urow = nfree + t;
    b[urow] -= element_integral(mesh, t, data.f);
    for (std::size_t k = 0; k < 3; ++k) {
      const int f = te[k];
      const double B = mesh.side_sign(t, f) * mesh.edge(f).length;  // ∫_K div ψ_F
      const int row = dof[static_cast<std::size_t>(f)];
      if (row < 0) {
        b[urow] += B * sigma[f];
      } else {
        trip.emplace_back(row, urow, -B);
        trip.emplace_back(urow, row, -B);
      }
      if (row < 0) continue;
      for (std::size_t l = 0; l < 3; ++l) {
        const double m = affine_mass(fr.area, A.A_inv(t), psi[k], psi[l]);
        const int col = dof[static_cast<std::size_t>(te[l])];
        if (col >= 0)
          trip.emplace_back(row, col, m);
        else
          b[row] -= m * sigma[te[l]];
      }
    }
  }
  for (int f = 0; f < ne; ++f) {
    const Edge& e = mesh.edge(f);
    if (e.label == EdgeLabel::dirichlet)
      b[dof[static_cast<std::size_t>(f)]] -= 0.5 * e.length * (data.g_D(mesh.vertex(e.s)) + data.g_D(mesh.vertex(e.e)));
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success) throw NumericalError("solve_mixed: factorization failed");
  const Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success) throw NumericalError("solve_mixed: solve failed");
  detail::check_residual(K, x, b, "solve_mixed");
  for (int f = 0; f < ne; ++f)
    if (dof[static_cast<std::size_t>(f)] >= 0) sigma[f] = x[dof[static_cast<std::size_t>(f)]];
  return MixedSolution{sigma, x.tail(nt)};
}

inline DiscreteSolution solve(Method m, const Mesh& mesh, const CoefficientField& A, const ProblemData& data) {
  switch (m) {
    case Method::conforming: return solve_conforming(mesh, A, data);
    case Method::mixed: return solve_mixed(mesh, A, data);
    case Method::nonconforming: return solve_nonconforming(mesh, A, data);
  }
  throw Error("unknown method");
}

/// Number of unknowns: vertices (P1), edges (CR), edges + elements (RT0 x P0).
inline int dof_count(Method m, const Mesh& mesh) {
  switch (m) {
    case Method::conforming: return mesh.num_vertices();
    case Method::mixed: return mesh.num_edges() + mesh.num_triangles();
    case Method::nonconforming: return mesh.num_edges();
  }
  return 0;
}

/// Piecewise gradient ∇_h u on triangle t (P1 or CR).
inline Vec2 element_gradient(const Mesh& mesh, const DiscreteSolution& sol, int t) {
  const auto fr = frame_of(mesh, t);
  Vec2 g = Vec2::Zero();
  if (const auto* c = std::get_if<ConformingSolution>(&sol)) {
    const auto& tr = mesh.triangle(t);
    for (std::size_t l = 0; l < 3; ++l) g += c->u[tr[l]] * fr.grad[l];
  } else if (const auto* nc = std::get_if<NonconformingSolution>(&sol)) {
    const auto& te = mesh.triangle_edges(t);
    for (std::size_t k = 0; k < 3; ++k) g -= 2.0 * nc->u[te[k]] * fr.grad[k];
  } else {
    throw Error("element_gradient: mixed solutions have no primal gradient");
  }
  return g;
}

/// Vertex values of σ_m on triangle t.
inline VertexValues mixed_flux(const Mesh& mesh, const MixedSolution& sol, int t) {
  const auto fr = frame_of(mesh, t);
  VertexValues V{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  for (int f : mesh.triangle_edges(t)) {
    const auto psi = rt_psi(mesh, fr, t, f);
    for (std::size_t l = 0; l < 3; ++l) V[l] += sol.sigma[f] * psi[l];
  }
  return V;
}

/// Side traces on one edge: normal flux σ̂·n_F (constant per side) and
/// tangential gradient ρ̂·t_F at the endpoints s_F, e_F.
struct EdgeTrace {
  double flux_minus = 0.0, flux_plus = std::numeric_limits<double>::quiet_NaN();
  double grad_minus_s = 0.0, grad_minus_e = 0.0;
  double grad_plus_s = std::numeric_limits<double>::quiet_NaN(), grad_plus_e = std::numeric_limits<double>::quiet_NaN();
};

/// The numerical flux σ̂ and gradient ρ̂ as per-element affine fields, plus
/// their traces on every edge. Conforming: σ̂ = -A∇u_c. Mixed: ρ̂ = -A⁻¹σ_m.
/// Nonconforming: σ̂ = -A∇_h u_nc and ρ̂ = ∇_h u_nc.
struct EdgeTraces {
  Method method = Method::conforming;
  std::vector<VertexValues> flux;      // empty for mixed (σ_m itself is conforming)
  std::vector<VertexValues> gradient;  // empty for conforming
  std::vector<EdgeTrace> edges;
};

inline Vec2 value_at_vertex(const Mesh& mesh, const VertexValues& V, int t, int v) {
  return V[static_cast<std::size_t>(mesh.local_vertex(t, v))];
}

inline EdgeTraces edge_traces(const Mesh& mesh, const CoefficientField& A, const DiscreteSolution& sol) {
  EdgeTraces tr;
  tr.method = method_of(sol);
  const int nt = mesh.num_triangles();
  for (int t = 0; t < nt; ++t) {
    if (tr.method == Method::mixed) {
      const auto S = mixed_flux(mesh, std::get<MixedSolution>(sol), t);
      VertexValues R;
      for (std::size_t l = 0; l < 3; ++l) R[l] = -(A.A_inv(t) * S[l]);
      tr.gradient.push_back(R);
    } else {
      const Vec2 g = element_gradient(mesh, sol, t);
      const Vec2 s = -(A.A(t) * g);
      tr.flux.push_back({s, s, s});
      if (tr.method == Method::nonconforming) tr.gradient.push_back({g, g, g});
    }
  }
  tr.edges.resize(static_cast<std::size_t>(mesh.num_edges()));
  for (int f = 0; f < mesh.num_edges(); ++f) {
    const Edge& e = mesh.edge(f);
    auto& et = tr.edges[static_cast<std::size_t>(f)];
    auto side = [&](int t, double& flux, double& gs, double& ge) {
      if (!tr.flux.empty()) flux = value_at_vertex(mesh, tr.flux[static_cast<std::size_t>(t)], t, e.s).dot(e.normal);
      if (!tr.gradient.empty()) {
        gs = value_at_vertex(mesh, tr.gradient[static_cast<std::size_t>(t)], t, e.s).dot(e.tangent);
        ge = value_at_vertex(mesh, tr.gradient[static_cast<std::size_t>(t)], t, e.e).dot(e.tangent);
      }
    };
    side(e.minus, et.flux_minus, et.grad_minus_s, et.grad_minus_e);
    if (e.plus >= 0) side(e.plus, et.flux_plus, et.grad_plus_s, et.grad_plus_e);
  }
  return tr;
}

}  // namespace afem
