#pragma once

#include "afem/solvers.hpp"

#include <Eigen/SVD>

namespace afem {

enum class Family { RT, BDM, NE, ND };
enum class FieldKind { flux, gradient };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::RT: return "RT";
    case Family::BDM: return "BDM";
    case Family::NE: return "NE";
    case Family::ND: return "ND";
  }
  return "?";
}

inline FieldKind kind_of(Family f) { return (f == Family::RT || f == Family::BDM) ? FieldKind::flux : FieldKind::gradient; }
inline int dofs_per_edge(Family f) { return (f == Family::BDM || f == Family::ND) ? 2 : 1; }

inline bool supported(Method m, Family f) {
  switch (m) {
    case Method::conforming: return f == Family::RT || f == Family::BDM;
    case Method::mixed: return f == Family::ND;
    case Method::nonconforming: return true;
  }
  return false;
}

/// Vertex values on triangle t of the global basis function of edge f:
/// ψ^rt_F, ψ^bdm_{s/e,F}, ψ^ne_F, ψ^nd_{s/e,F} (endpoint 0 = s_F, 1 = e_F).
/// RT, BDM and NE carry a minus sign on K⁺; ψ^nd_{s,F} = h_F λ_s ∇λ_e and
/// ψ^nd_{e,F} = h_F λ_e ∇λ_s on both sides, which is already tangentially
/// continuous. Tangential traces on F: ψ^ne·t = 1, ψ^nd_s·t = λ_s, ψ^nd_e·t = -λ_e.
inline VertexValues global_psi(const Mesh& mesh, const LocalTriangleFrame& fr, int t, int f, Family fam, int endpoint = 0) {
  const Edge& e = mesh.edge(f);
  const int k = mesh.local_edge(t, f);
  const auto ls = static_cast<std::size_t>(mesh.local_vertex(t, e.s));
  const auto le = static_cast<std::size_t>(mesh.local_vertex(t, e.e));
  const double h = e.length;
  VertexValues V{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  switch (fam) {
    case Family::RT:
      V = local_basis_values(fr, {BasisFamily::RT, k});
      break;
    case Family::BDM: {
      const std::size_t v = endpoint == 0 ? ls : le;
      const Endpoint ep = static_cast<int>(v) == LocalTriangleFrame::i_of(k) ? Endpoint::i : Endpoint::j;
      V = local_basis_values(fr, {BasisFamily::BDM, k, ep});
      break;
    }
    case Family::NE:
      V[ls] = h * fr.grad[le];
      V[le] = -h * fr.grad[ls];
      return V;
    case Family::ND:
      if (endpoint == 0)
        V[ls] = h * fr.grad[le];
      else
        V[le] = h * fr.grad[ls];
      return V;
  }
  const double sgn = mesh.side_sign(t, f);
  for (auto& v : V) v *= sgn;
  return V;
}

// ---------------------------------------------------------------------------
// Jumps

/// Jump of the numerical field across/at an edge, as values at s_F and e_F
/// (equal for constant jumps). Absent where the defining formula excludes the
/// edge: flux jumps on Dirichlet edges, gradient jumps on Neumann edges.
struct EdgeJump {
  bool present = false;
  double s = 0.0;
  double e = 0.0;
};

/// ∇g_D·t_F of the nodal interpolant of g_D.
inline double dirichlet_tangential(const Mesh& mesh, const ProblemData& data, int f) {
  const Edge& e = mesh.edge(f);
  return (data.g_D(mesh.vertex(e.e)) - data.g_D(mesh.vertex(e.s))) / e.length;
}

inline std::vector<EdgeJump> compute_jumps(const Mesh& mesh, const EdgeTraces& tr, const ProblemData& data, FieldKind kind) {
  if (kind == FieldKind::flux) require(tr.method != Method::mixed, "compute_jumps: mixed method has no flux jump");
  if (kind == FieldKind::gradient) require(tr.method != Method::conforming, "compute_jumps: conforming method has no gradient jump");
  std::vector<EdgeJump> out(static_cast<std::size_t>(mesh.num_edges()));
  for (int f = 0; f < mesh.num_edges(); ++f) {
    const Edge& e = mesh.edge(f);
    const EdgeTrace& et = tr.edges[static_cast<std::size_t>(f)];
    EdgeJump& j = out[static_cast<std::size_t>(f)];
    if (kind == FieldKind::flux) {
      if (e.label == EdgeLabel::dirichlet) continue;
      const double other = e.interior() ? et.flux_plus : data.g_N(e.midpoint, e.normal);
      j = {true, et.flux_minus - other, et.flux_minus - other};
    } else {
      if (e.label == EdgeLabel::neumann) continue;
      if (e.interior()) {
        j = {true, et.grad_minus_s - et.grad_plus_s, et.grad_minus_e - et.grad_plus_e};
      } else {
        const double gt = dirichlet_tangential(mesh, data, f);
        j = {true, et.grad_minus_s - gt, et.grad_minus_e - gt};
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patch weights

/// Gram blocks β^± = (Mψ_x, ψ_y)_{K^±} with M = A⁻¹ for flux families and
/// M = A for gradient families, x, y ∈ {s, e} (single-dof families use (0,0)),
/// and the explicit weights derived from them. For BDM, (a, b) = (a_bdm, b_bdm);
/// for RT and NE, a is a_rt / a_ne; for ND, (a, b) = (a^nc, b^nc) and ℓ_s, ℓ_e
/// are the mixed-method averaging factors.
struct EdgeWeights {
  Mat2 minus = Mat2::Zero();
  Mat2 plus = Mat2::Zero();
  double a = 0.0, b = 0.0;
  double ell_s = 0.0, ell_e = 0.0;
};

struct PatchWeights {
  Family family = Family::RT;
  std::vector<EdgeWeights> edges;
};

inline const Mat2& weight_matrix(const CoefficientField& A, int t, Family fam) {
  return kind_of(fam) == FieldKind::flux ? A.A_inv(t) : A.A(t);
}

inline Mat2 gram_block(const Mesh& mesh, const CoefficientField& A, int t, int f, Family fam) {
  const auto fr = frame_of(mesh, t);
  const Mat2& M = weight_matrix(A, t, fam);
  Mat2 G = Mat2::Zero();
  const int n = dofs_per_edge(fam);
  std::array<VertexValues, 2> psi;
  for (int x = 0; x < n; ++x) psi[static_cast<std::size_t>(x)] = global_psi(mesh, fr, t, f, fam, x);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) G(x, y) = affine_mass(fr.area, M, psi[static_cast<std::size_t>(x)], psi[static_cast<std::size_t>(y)]);
  return G;
}

inline EdgeWeights edge_weights(const Mesh& mesh, const CoefficientField& A, int f, Family fam) {
  const Edge& e = mesh.edge(f);
  EdgeWeights w;
  w.minus = gram_block(mesh, A, e.minus, f, fam);
  if (!e.interior()) return w;
  w.plus = gram_block(mesh, A, e.plus, f, fam);
  const Mat2& m = w.minus;
  const Mat2 g = w.minus + w.plus;
  if (dofs_per_edge(fam) == 1) {
    w.a = m(0, 0) / g(0, 0);
    return w;
  }
  const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
  if (!(det > 0.0)) throw NumericalError("singular 2x2 patch Gram matrix on edge " + std::to_string(f));
  const double ss = m(0, 0), se = m(0, 1), ee = m(1, 1);
  if (fam == Family::BDM) {
    w.a = ((ss + se) * g(1, 1) - (se + ee) * g(0, 1)) / det;
    w.b = ((se + ee) * g(0, 0) - (ss + se) * g(0, 1)) / det;
  } else {
    w.a = ((ss - se) * g(1, 1) - (se - ee) * g(0, 1)) / det;
    w.b = ((se - ee) * g(0, 0) - (ss - se) * g(0, 1)) / det;
    w.ell_s = (ss * g(1, 1) - se * g(0, 1)) / det;
    w.ell_e = (ee * g(0, 0) - se * g(0, 1)) / det;
  }
  return w;
}

inline PatchWeights patch_weights(const Mesh& mesh, const CoefficientField& A, Family fam) {
  PatchWeights pw;
  pw.family = fam;
  pw.edges.reserve(static_cast<std::size_t>(mesh.num_edges()));
  for (int f = 0; f < mesh.num_edges(); ++f) pw.edges.push_back(edge_weights(mesh, A, f, fam));
  return pw;
}

// ---------------------------------------------------------------------------
// Local minimization oracle

/// A field supported on the patch T_F, given per element by vertex values.
struct PatchField {
  std::vector<int> elements;
  std::vector<VertexValues> values;
};

/// Solves the local problem on T_F directly: minimize Σ_K (M τ, τ)_K over the
/// broken local space (RT or NE: 3 dofs per element; BDM or ND: 6) subject to
/// [τ·d_F] = -j on F (d = n_F for fluxes, t_F for gradients; on a boundary
/// edge the single trace equals -j, and an absent jump leaves F free) and
/// τ·d_G = 0 on every G ∈ E_{b,F}. Constraints are imposed at edge endpoints,
/// which is exact for these affine traces. The minimizer is found from the
/// SVD null space of the constraints.
inline PatchField local_oracle(const Mesh& mesh, const CoefficientField& A, int f, Family fam, const EdgeJump& jump) {
  const EdgePatch patch = edge_patch(mesh, f);
  const Edge& F = mesh.edge(f);
  const int ne = static_cast<int>(patch.elements.size());
  const bool two = fam == Family::BDM || fam == Family::ND;
  const int nb = two ? 6 : 3;
  const int n = nb * ne;
  const bool normal = kind_of(fam) == FieldKind::flux;
  const BasisFamily bf = fam == Family::RT ? BasisFamily::RT
                         : fam == Family::BDM ? BasisFamily::BDM
                         : fam == Family::NE ? BasisFamily::NE
                                             : BasisFamily::ND;

  std::vector<LocalTriangleFrame> frames;
  std::vector<std::vector<VertexValues>> basis(static_cast<std::size_t>(ne));
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < ne; ++p) {
    const int t = patch.elements[static_cast<std::size_t>(p)];
    frames.emplace_back(mesh.coords(t));
    auto& B = basis[static_cast<std::size_t>(p)];
    for (int k = 0; k < 3; ++k) {
      if (two) {
        B.push_back(local_basis_values(frames.back(), {bf, k, Endpoint::i}));
        B.push_back(local_basis_values(frames.back(), {bf, k, Endpoint::j}));
      } else {
        B.push_back(local_basis_values(frames.back(), {bf, k}));
      }
    }
    const Mat2& M = weight_matrix(A, t, fam);
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b)
        Q(p * nb + a, p * nb + b) = affine_mass(frames.back().area, M, B[static_cast<std::size_t>(a)], B[static_cast<std::size_t>(b)]);
  }

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  // Row evaluating the trace τ·d of element p at global vertex v.
  auto trace_row = [&](int p, int v, const Vec2& d, double w, Eigen::VectorXd& row) {
    const int t = patch.elements[static_cast<std::size_t>(p)];
    const auto lv = static_cast<std::size_t>(mesh.local_vertex(t, v));
    for (int a = 0; a < nb; ++a) row[p * nb + a] += w * basis[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)][lv].dot(d);
  };
  const Vec2 dF = normal ? F.normal : F.tangent;
  if (jump.present) {
    for (int end = 0; end < 2; ++end) {
      const int v = end == 0 ? F.s : F.e;
      Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
      trace_row(0, v, dF, 1.0, row);
      if (ne == 2) trace_row(1, v, dF, -1.0, row);
      rows.push_back(row);
      rhs.push_back(-(end == 0 ? jump.s : jump.e));
    }
  }
  for (int p = 0; p < ne; ++p) {
    const int t = patch.elements[static_cast<std::size_t>(p)];
    for (int g : mesh.triangle_edges(t)) {
      if (g == f) continue;
      const Edge& G = mesh.edge(g);
      const Vec2 dG = normal ? G.normal : G.tangent;
      for (int v : {G.s, G.e}) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
        trace_row(p, v, dG, 1.0, row);
        rows.push_back(row);
        rhs.push_back(0.0);
      }
    }
  }

  Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), n);
  Eigen::VectorXd d(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    C.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    d[static_cast<Eigen::Index>(r)] = rhs[r];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& S = svd.singularValues();
  const double tol = 1e-12 * (S.size() > 0 ? S[0] : 1.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < S.size(); ++i)
    if (S[i] > tol) ++rank;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < rank; ++i) x0 += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(d) / S[i]);
  if ((C * x0 - d).norm() > 1e-10 * std::max(1.0, d.norm()))
    throw NumericalError("local_oracle: inconsistent constraints on edge " + std::to_string(f));
  const Eigen::MatrixXd N = svd.matrixV().rightCols(n - rank);
  Eigen::VectorXd x = x0;
  if (N.cols() > 0) {
    const Eigen::MatrixXd H = N.transpose() * Q * N;
    const Eigen::VectorXd y = H.ldlt().solve(-(N.transpose() * Q * x0));
    x += N * y;
  }

  PatchField out;
  out.elements = patch.elements;
  for (int p = 0; p < ne; ++p) {
    VertexValues V{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    for (int a = 0; a < nb; ++a)
      for (std::size_t l = 0; l < 3; ++l) V[l] += x[p * nb + a] * basis[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)][l];
    out.values.push_back(V);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Explicit recovery

/// Coefficients of the single-edge correction Δ_F on ψ_s, ψ_e (or ψ in slot 0)
/// restricted to K⁻ and K⁺.
struct EdgeCorrection {
  std::array<double, 2> minus{0.0, 0.0};
  std::array<double, 2> plus{0.0, 0.0};
};

struct RecoveredField {
  Family family = Family::RT;
  FieldKind kind = FieldKind::flux;
  std::vector<double> coef;                // dofs_per_edge per edge: (F, s), (F, e)
  std::vector<EdgeCorrection> corrections; // Δ_F
  std::vector<VertexValues> total;         // recovered field per element
  std::vector<VertexValues> correction;    // Δ = Σ_F Δ_F per element
  PatchWeights weights;
  std::vector<EdgeJump> jumps;

  double coefficient(int f, int endpoint = 0) const {
    return coef[static_cast<std::size_t>(dofs_per_edge(family) * f + endpoint)];
  }
};

/// Vertex values of Δ_F on element t of T_F.
inline VertexValues edge_correction_values(const Mesh& mesh, const RecoveredField& r, int f, int t) {
  const auto fr = frame_of(mesh, t);
  const auto& c = mesh.edge(f).minus == t ? r.corrections[static_cast<std::size_t>(f)].minus : r.corrections[static_cast<std::size_t>(f)].plus;
  VertexValues V{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  for (int x = 0; x < dofs_per_edge(r.family); ++x) {
    if (c[static_cast<std::size_t>(x)] == 0.0) continue;
    const auto psi = global_psi(mesh, fr, t, f, r.family, x);
    for (std::size_t l = 0; l < 3; ++l) V[l] += c[static_cast<std::size_t>(x)] * psi[l];
  }
  return V;
}

/// Relative max-norm difference between the explicit Δ_F and local_oracle on T_F.
inline double oracle_mismatch(const Mesh& mesh, const CoefficientField& A, const RecoveredField& r, int f) {
  const EdgeJump& J = r.jumps[static_cast<std::size_t>(f)];
  const PatchField o = local_oracle(mesh, A, f, r.family, J);
  double scale = std::abs(J.s) + std::abs(J.e);
  double diff = 0.0;
  for (std::size_t p = 0; p < o.elements.size(); ++p) {
    const auto V = edge_correction_values(mesh, r, f, o.elements[p]);
    for (std::size_t l = 0; l < 3; ++l) {
      scale = std::max(scale, o.values[p][l].norm());
      diff = std::max(diff, (V[l] - o.values[p][l]).norm());
    }
  }
  return diff == 0.0 ? 0.0 : diff / (scale + 1e-300);
}

struct RecoverOptions {
  bool verify_with_oracle = false;  // compare every Δ_F with local_oracle
  double tolerance = 1e-9;          // relative tolerance of the self-checks
};

namespace detail {

inline double max_norm(const VertexValues& V) {
  return std::max({V[0].norm(), V[1].norm(), V[2].norm()});
}

}  // namespace detail

/// Explicit edge-patch recovery. Every coefficient is a weighted average of
/// the side traces; the corrections Δ_F are the closed-form minimizers. The
/// result is checked for total = numerical + Σ_F Δ_F on every element, and
/// optionally every Δ_F against local_oracle; a mismatch throws NumericalError.
inline RecoveredField recover(const Mesh& mesh, const CoefficientField& A, const EdgeTraces& tr, const ProblemData& data,
                              Family fam, const RecoverOptions& opt = {}) {
  if (!supported(tr.method, fam))
    throw Error(std::string("recovery family ") + to_string(fam) + " is not available for the " + to_string(tr.method) + " method");
  const FieldKind kind = kind_of(fam);
  const auto& numerical = kind == FieldKind::flux ? tr.flux : tr.gradient;
  const int dpe = dofs_per_edge(fam);
  const int ne = mesh.num_edges();

  RecoveredField r;
  r.family = fam;
  r.kind = kind;
  r.jumps = compute_jumps(mesh, tr, data, kind);
  r.weights = patch_weights(mesh, A, fam);
  r.coef.assign(static_cast<std::size_t>(dpe * ne), 0.0);
  r.corrections.assign(static_cast<std::size_t>(ne), {});

  for (int f = 0; f < ne; ++f) {
    const Edge& e = mesh.edge(f);
    const EdgeTrace& et = tr.edges[static_cast<std::size_t>(f)];
    const EdgeJump& J = r.jumps[static_cast<std::size_t>(f)];
    const EdgeWeights& w = r.weights.edges[static_cast<std::size_t>(f)];
    auto& c = r.corrections[static_cast<std::size_t>(f)];
    double* coef = &r.coef[static_cast<std::size_t>(dpe * f)];

    if (kind == FieldKind::flux) {
      const double sm = et.flux_minus;
      if (e.label == EdgeLabel::dirichlet) {
        for (int x = 0; x < dpe; ++x) coef[x] = sm;
      } else if (e.label == EdgeLabel::neumann) {
        const double g = data.g_N(e.midpoint, e.normal);
        for (int x = 0; x < dpe; ++x) {
          coef[x] = g;
          c.minus[static_cast<std::size_t>(x)] = -J.s;
        }
      } else {
        const double sp = et.flux_plus, j = J.s;
        if (fam == Family::RT) {
          coef[0] = w.a * sm + (1.0 - w.a) * sp;
          c.minus[0] = -(1.0 - w.a) * j;
          c.plus[0] = w.a * j;
        } else {
          coef[0] = w.a * sm + (1.0 - w.a) * sp;
          coef[1] = w.b * sm + (1.0 - w.b) * sp;
          c.minus = {(w.a - 1.0) * j, (w.b - 1.0) * j};
          c.plus = {w.a * j, w.b * j};
        }
      }
      continue;
    }

    // Gradient families.
    const bool mixed = tr.method == Method::mixed;
    if (fam == Family::NE) {
      const double rm = et.grad_minus_s;
      if (e.label == EdgeLabel::dirichlet) {
        coef[0] = dirichlet_tangential(mesh, data, f);
        c.minus[0] = -J.s;
      } else if (e.label == EdgeLabel::neumann) {
        coef[0] = rm;
      } else {
        const double rp = et.grad_plus_s, j = J.s;
        coef[0] = w.a * rm + (1.0 - w.a) * rp;
        c.minus[0] = -(1.0 - w.a) * j;
        c.plus[0] = w.a * j;
      }
      continue;
    }

    // ND: coefficients on ψ_s, ψ_e are (τ(s)·t_F, -τ(e)·t_F).
    if (e.label == EdgeLabel::dirichlet) {
      const double gt = dirichlet_tangential(mesh, data, f);
      coef[0] = gt;
      coef[1] = -gt;
      c.minus = {-J.s, J.e};
    } else if (e.label == EdgeLabel::neumann) {
      coef[0] = et.grad_minus_s;
      coef[1] = -et.grad_minus_e;
    } else if (mixed) {
      const Mat2& m = w.minus;
      const Mat2 g = w.minus + w.plus;
      const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
      const double cs = J.s, ce = J.e;
      const double r1 = cs * m(0, 0) - ce * m(0, 1);
      const double r2 = cs * m(0, 1) - ce * m(1, 1);
      const double rho_s = (r1 * g(1, 1) - r2 * g(0, 1)) / det;
      const double rho_e = (r2 * g(0, 0) - r1 * g(0, 1)) / det;
      coef[0] = rho_s + et.grad_plus_s;
      coef[1] = rho_e - et.grad_plus_e;
      c.plus = {rho_s, rho_e};
      c.minus = {rho_s - cs, rho_e + ce};
    } else {
      const double rm = et.grad_minus_s, rp = et.grad_plus_s, j = J.s;
      coef[0] = w.a * rm + (1.0 - w.a) * rp;
      coef[1] = w.b * rm - (1.0 + w.b) * rp;
      c.minus = {(w.a - 1.0) * j, (1.0 + w.b) * j};
      c.plus = {w.a * j, w.b * j};
    }
  }

  const int nt = mesh.num_triangles();
  r.total.resize(static_cast<std::size_t>(nt));
  r.correction.resize(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto fr = frame_of(mesh, t);
    VertexValues T{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    VertexValues D{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    for (int f : mesh.triangle_edges(t)) {
      const auto& c = mesh.edge(f).minus == t ? r.corrections[static_cast<std::size_t>(f)].minus
                                              : r.corrections[static_cast<std::size_t>(f)].plus;
      for (int x = 0; x < dpe; ++x) {
        const auto psi = global_psi(mesh, fr, t, f, fam, x);
        const double a = r.coefficient(f, x), d = c[static_cast<std::size_t>(x)];
        for (std::size_t l = 0; l < 3; ++l) {
          T[l] += a * psi[l];
          D[l] += d * psi[l];
        }
      }
    }
    r.total[static_cast<std::size_t>(t)] = T;
    r.correction[static_cast<std::size_t>(t)] = D;
    const auto& N = numerical[static_cast<std::size_t>(t)];
    const double scale = detail::max_norm(N) + detail::max_norm(D) + 1e-300;
    for (std::size_t l = 0; l < 3; ++l) {
      if ((T[l] - N[l] - D[l]).norm() > opt.tolerance * scale)
        throw NumericalError(std::string("recover(") + to_string(fam) + "): recovered coefficients and corrections disagree on element " +
                             std::to_string(t));
    }
  }

  if (opt.verify_with_oracle) {
    for (int f = 0; f < ne; ++f) {
      if (oracle_mismatch(mesh, A, r, f) > opt.tolerance)
        throw NumericalError(std::string("recover(") + to_string(fam) + "): explicit correction differs from the local minimizer on edge " +
                             std::to_string(f));
    }
  }
  return r;
}

/// Largest jump of τ·n_F (H(div) families) or τ·t_F (H(curl) families) of the
/// recovered field over the interior edges, evaluated at both endpoints.
inline double max_interior_jump(const Mesh& mesh, const RecoveredField& r) {
  double m = 0.0;
  for (int f = 0; f < mesh.num_edges(); ++f) {
    const Edge& e = mesh.edge(f);
    if (!e.interior()) continue;
    const Vec2 d = r.kind == FieldKind::flux ? e.normal : e.tangent;
    for (int v : {e.s, e.e}) {
      const Vec2 a = value_at_vertex(mesh, r.total[static_cast<std::size_t>(e.minus)], e.minus, v);
      const Vec2 b = value_at_vertex(mesh, r.total[static_cast<std::size_t>(e.plus)], e.plus, v);
      m = std::max(m, std::abs((a - b).dot(d)));
    }
  }
  return m;
}

inline double field_scale(const std::vector<VertexValues>& field) {
  double m = 0.0;
  for (const auto& V : field) m = std::max(m, detail::max_norm(V));
  return m;
}

}  // namespace afem
