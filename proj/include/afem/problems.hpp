#pragma once

#include "afem/coefficient.hpp"
#include "afem/mesh.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace afem {

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

struct ExactSolution {
  ScalarFn u;
  VectorFn grad;
};

/// A point z near which the exact solution behaves like |x - z|^exponent and
/// is positively homogeneous: u(z + s y) = s^exponent u(z + y) on each
/// straight ray through z within one element.
struct SingularPoint {
  Vec2 z;
  double exponent;
};

/// Data of -div(A grad u) = f with u = g_D on Γ_D and -A grad u · n = g_N on Γ_N.
/// g_D is used through its nodal interpolant; g_N is evaluated at edge midpoints.
struct ProblemData {
  ScalarFn f;
  ScalarFn g_D;
  std::function<double(const Vec2& x, const Vec2& n)> g_N;
  std::optional<ExactSolution> exact;
  std::vector<SingularPoint> singular;
};

struct Segment {
  Vec2 a, b;
};

struct BenchmarkProblem {
  std::string name;
  ProblemData data;
  std::function<Mat2(const Vec2&)> coefficient;
  Vec2 lo, hi;                                 // rectangular domain
  std::function<int(const Vec2&)> region_of;  // coefficient regions
  BoundaryLabeler labeler;
  std::vector<Segment> interfaces;             // coefficient discontinuities
  bool even_grid = false;                      // initial grid must resolve the axes

  Mesh initial_mesh(int n) const {
    if (even_grid) require(n % 2 == 0, name + ": initial grid size must be even");
    return rectangle_mesh(lo.x(), lo.y(), hi.x(), hi.y(), n, region_of, labeler);
  }
  CoefficientField coefficient_on(const Mesh& mesh) const { return make_coefficient(mesh, coefficient); }
};

// ---------------------------------------------------------------------------
// Kellogg checkerboard problem

struct KelloggParameters {
  double gamma = 0.1;
  double R = 161.4476387975881;
  double rho = M_PI / 4.0;
  double sigma = 0.0;
};

/// σ from the interface conditions at θ = π/2 for given γ, R (with ρ = π/4
/// this also satisfies the condition at θ = π).
inline double kellogg_sigma(double gamma, double R, double rho = M_PI / 4.0) {
  return -std::atan(R * std::tan(rho * gamma)) / gamma;
}

/// The remaining interface condition (at θ = 3π/2), scaled to be free of poles.
inline double kellogg_residual(double gamma, double R) {
  const double s = kellogg_sigma(gamma, R);
  const double X = (M_PI / 2.0 - s) * gamma;
  const double Y = M_PI * gamma / 4.0;
  return R * std::cos(X) * std::sin(Y) + std::sin(X) * std::cos(Y);
}

/// Smallest exponent γ in (0, 2) compatible with the contrast R.
inline double kellogg_gamma_for_ratio(double R) {
  require(R > 1.0, "Kellogg contrast must exceed 1");
  const int n = 20000;
  double a = 1e-6, fa = kellogg_residual(a, R);
  for (int i = 1; i <= n; ++i) {
    double b = 1e-6 + (1.99 - 1e-6) * i / n;
    const double fb = kellogg_residual(b, R);
    if ((fa < 0) != (fb < 0)) {
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = kellogg_residual(m, R);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    a = b;
    fa = fb;
  }
  throw NumericalError("no Kellogg exponent found for R = " + std::to_string(R));
}

struct KelloggProfile {
  KelloggParameters p;

  /// μ(θ) and μ'(θ) for θ in [0, 2π).
  std::pair<double, double> mu(double theta) const {
    const double g = p.gamma, s = p.sigma, r = p.rho;
    double C, off;
    if (theta < M_PI / 2) {
      C = std::cos((M_PI / 2 - s) * g);
      off = M_PI / 2 - r;
    } else if (theta < M_PI) {
      C = std::cos(r * g);
      off = M_PI - s;
    } else if (theta < 3 * M_PI / 2) {
      C = std::cos(s * g);
      off = M_PI + r;
    } else {
      C = std::cos((M_PI / 2 - r) * g);
      off = 3 * M_PI / 2 + s;
    }
    return {C * std::cos((theta - off) * g), -C * g * std::sin((theta - off) * g)};
  }

  static double angle(const Vec2& x) {
    double th = std::atan2(x.y(), x.x());
    if (th < 0) th += 2 * M_PI;
    if (th >= 2 * M_PI) th = 0.0;
    return th;
  }

  double u(const Vec2& x) const {
    const double r = x.norm();
    if (r == 0.0) return 0.0;
    return std::pow(r, p.gamma) * mu(angle(x)).first;
  }

  Vec2 grad(const Vec2& x) const {
    const double r = x.norm();
    if (r == 0.0) return {std::nan(""), std::nan("")};
    const double th = angle(x);
    const auto [m, dm] = mu(th);
    const Vec2 er(std::cos(th), std::sin(th)), et(-std::sin(th), std::cos(th));
    return std::pow(r, p.gamma - 1.0) * (p.gamma * m * er + dm * et);
  }
};

struct ExactCheckReport {
  bool passed = true;
  double pde_residual = 0.0;  // max scaled residual of -div(A grad u) - f
  double u_jump = 0.0;        // max scaled jump of u across interfaces
  double flux_jump = 0.0;     // max scaled jump of A grad u · n across interfaces
  std::string failure;
};

/// Checks the attached exact solution: the PDE at interior sample points by a
/// finite-difference Hessian (h = 1e-5, smaller near singular points; tolerance 1e-4 relative), continuity of
/// u and of the normal flux across the interfaces (tolerance 1e-8 relative).
/// A disc of radius 1e-3 around each singular point is excluded.
inline ExactCheckReport verify_exact(const BenchmarkProblem& pb, int n_samples = 200) {
  ExactCheckReport rep;
  require(pb.data.exact.has_value(), "verify_exact: problem has no exact solution");
  const auto& ex = *pb.data.exact;
  const double h0 = 1e-5;
  auto dist_to_segment = [](const Vec2& p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double t = std::clamp((p - s.a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (p - (s.a + t * d)).norm();
  };
  auto near_singular = [&](const Vec2& p) {
    for (const auto& sp : pb.data.singular)
      if ((p - sp.z).norm() < 1e-3) return true;
    return false;
  };

  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int taken = 0;
  for (int attempt = 0; taken < n_samples && attempt < 100 * n_samples; ++attempt) {
    const Vec2 p(pb.lo.x() + (0.02 + 0.96 * U(rng)) * (pb.hi.x() - pb.lo.x()),
                 pb.lo.y() + (0.02 + 0.96 * U(rng)) * (pb.hi.y() - pb.lo.y()));
    if (near_singular(p)) continue;
    bool near_iface = false;
    for (const auto& s : pb.interfaces)
      if (dist_to_segment(p, s) < 100 * h0) near_iface = true;
    if (near_iface) continue;
    ++taken;
    // Shrink the stencil near singular points so truncation stays below the
    // tolerance (the Hessian grows like r^(γ-2)).
    double h = h0;
    for (const auto& sp : pb.data.singular) h = std::min(h, h0 * 10.0 * (p - sp.z).norm());
    const Vec2 ex_(h, 0.0), ey_(0.0, h);
    const double u0 = ex.u(p);
    const double uxx = (ex.u(p + ex_) - 2 * u0 + ex.u(p - ex_)) / (h * h);
    const double uyy = (ex.u(p + ey_) - 2 * u0 + ex.u(p - ey_)) / (h * h);
    const double uxy = (ex.u(p + ex_ + ey_) - ex.u(p + ex_ - ey_) - ex.u(p - ex_ + ey_) + ex.u(p - ex_ - ey_)) / (4 * h * h);
    const Mat2 A = pb.coefficient(p);
    const double f = pb.data.f(p);
    const double res = -(A(0, 0) * uxx + 2 * A(0, 1) * uxy + A(1, 1) * uyy) - f;
    const double scale = std::max(A.norm() * std::max(1.0, std::abs(u0)),
                                  std::abs(A(0, 0) * uxx) + 2 * std::abs(A(0, 1) * uxy) + std::abs(A(1, 1) * uyy) + std::abs(f));
    rep.pde_residual = std::max(rep.pde_residual, std::abs(res) / scale);
  }

  for (const auto& s : pb.interfaces) {
    const Vec2 d = s.b - s.a;
    const Vec2 n = Vec2(d.y(), -d.x()).normalized();
    for (int k = 0; k < n_samples; ++k) {
      const double t = (k + 0.5) / n_samples;
      const Vec2 p = s.a + t * d;
      if (near_singular(p)) continue;
      double r = 1.0;
      for (const auto& sp : pb.data.singular) r = std::min(r, (p - sp.z).norm());
      const double delta = 1e-12 * r;
      const Vec2 pl = p - delta * n, pr = p + delta * n;
      const double ul = ex.u(pl), ur = ex.u(pr);
      rep.u_jump = std::max(rep.u_jump, std::abs(ul - ur) / std::max(1.0, std::abs(ul)));
      const double ql = (pb.coefficient(pl) * ex.grad(pl)).dot(n);
      const double qr = (pb.coefficient(pr) * ex.grad(pr)).dot(n);
      rep.flux_jump = std::max(rep.flux_jump, std::abs(ql - qr) / std::max(1.0, std::abs(ql)));
    }
  }

  if (!(rep.pde_residual <= 1e-4)) {
    rep.passed = false;
    rep.failure = "PDE residual " + std::to_string(rep.pde_residual);
  } else if (!(rep.u_jump <= 1e-8)) {
    rep.passed = false;
    rep.failure = "jump of u across an interface " + std::to_string(rep.u_jump);
  } else if (!(rep.flux_jump <= 1e-8)) {
    rep.passed = false;
    rep.failure = "jump of the normal flux across an interface " + std::to_string(rep.flux_jump);
  }
  return rep;
}

/// Builds the Kellogg problem from explicit parameters without self-checking.
inline BenchmarkProblem kellogg_from_parameters(const KelloggParameters& kp) {
  BenchmarkProblem pb;
  pb.name = "kellogg";
  const KelloggProfile prof{kp};
  const double R = kp.R;
  pb.coefficient = [R](const Vec2& x) {
    const int q = quadrant_of(x);
    return Mat2(((q == 0 || q == 2) ? R : 1.0) * Mat2::Identity());
  };
  pb.data.f = [](const Vec2&) { return 0.0; };
  pb.data.g_D = [prof](const Vec2& x) { return prof.u(x); };
  pb.data.g_N = [prof, c = pb.coefficient](const Vec2& x, const Vec2& n) { return -(c(x) * prof.grad(x)).dot(n); };
  pb.data.exact = ExactSolution{[prof](const Vec2& x) { return prof.u(x); },
                                [prof](const Vec2& x) { return prof.grad(x); }};
  pb.data.singular = {{Vec2::Zero(), kp.gamma}};
  pb.lo = {-1.0, -1.0};
  pb.hi = {1.0, 1.0};
  pb.region_of = quadrant_of;
  pb.labeler = all_dirichlet();
  pb.interfaces = {{{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{0, 0}, {-1, 0}}, {{0, 0}, {0, -1}}};
  pb.even_grid = true;
  return pb;
}

inline BenchmarkProblem checked(BenchmarkProblem pb) {
  const auto rep = verify_exact(pb);
  if (!rep.passed) throw NumericalError(pb.name + ": exact solution check failed: " + rep.failure);
  return pb;
}

/// Kellogg benchmark on (-1,1)^2: α = R in the first and third quadrants, 1
/// elsewhere, f = 0, u = r^γ μ(θ) with γ = 0.1.
inline BenchmarkProblem kellogg_problem() {
  KelloggParameters kp;
  kp.sigma = kellogg_sigma(kp.gamma, kp.R);
  return checked(kellogg_from_parameters(kp));
}

/// Kellogg problem for a prescribed contrast R, with γ and σ re-solved.
inline BenchmarkProblem kellogg_problem_with_ratio(double R) {
  KelloggParameters kp;
  kp.R = R;
  kp.gamma = kellogg_gamma_for_ratio(R);
  kp.sigma = kellogg_sigma(kp.gamma, R);
  return checked(kellogg_from_parameters(kp));
}

// ---------------------------------------------------------------------------
// Manufactured problems on the unit square

inline BenchmarkProblem unit_square_problem(std::string name, const Mat2& A, ScalarFn u, VectorFn grad, ScalarFn f) {
  BenchmarkProblem pb;
  pb.name = std::move(name);
  pb.coefficient = [A](const Vec2&) { return A; };
  pb.data.f = std::move(f);
  pb.data.g_D = u;
  pb.data.g_N = [A, grad](const Vec2& x, const Vec2& n) { return -(A * grad(x)).dot(n); };
  pb.data.exact = ExactSolution{u, grad};
  pb.lo = {0.0, 0.0};
  pb.hi = {1.0, 1.0};
  pb.region_of = [](const Vec2&) { return 0; };
  pb.labeler = all_dirichlet();
  return pb;
}

inline Mat2 default_affine_tensor() {
  Mat2 A;
  A << 2.0, 0.5, 0.5, 1.0;
  return A;
}

/// u = 1 + 2x - y, f = 0, constant SPD A.
inline BenchmarkProblem manufactured_affine(const Mat2& A = default_affine_tensor()) {
  return checked(unit_square_problem(
      "affine", A, [](const Vec2& x) { return 1.0 + 2.0 * x.x() - x.y(); },
      [](const Vec2&) { return Vec2(2.0, -1.0); }, [](const Vec2&) { return 0.0; }));
}

/// u = sin(πx) sin(πy), A = I, f = 2π² u.
inline BenchmarkProblem manufactured_smooth() {
  auto u = [](const Vec2& x) { return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()); };
  return checked(unit_square_problem(
      "smooth", Mat2::Identity(), u,
      [](const Vec2& x) {
        return Vec2(M_PI * std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()),
                    M_PI * std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()));
      },
      [u](const Vec2& x) { return 2.0 * M_PI * M_PI * u(x); }));
}

/// Relabels the boundary edges whose midpoint satisfies `pred` as Neumann.
inline BenchmarkProblem with_neumann(BenchmarkProblem pb, std::function<bool(const Vec2&)> pred) {
  auto base = pb.labeler;
  pb.labeler = [base, pred](int a, int b, const Vec2& pa, const Vec2& pb_) -> std::optional<EdgeLabel> {
    if (pred(0.5 * (pa + pb_))) return EdgeLabel::neumann;
    return base(a, b, pa, pb_);
  };
  return pb;
}

inline BenchmarkProblem problem_by_name(const std::string& id) {
  if (id == "kellogg") return kellogg_problem();
  if (id == "affine") return manufactured_affine();
  if (id == "smooth") return manufactured_smooth();
  throw Error("unknown problem '" + id + "' (expected kellogg, affine or smooth)");
}

} // namespace afem
