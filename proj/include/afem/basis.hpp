#pragma once

#include "afem/types.hpp"

#include <array>
#include <cmath>

namespace afem {

/// Geometry of one triangle with local vertices 0, 1, 2 in CCW order. For
/// local edge k (opposite vertex k) the endpoints are i = k+1, j = k+2 (mod 3).
struct LocalTriangleFrame {
  std::array<Vec2, 3> x;
  std::array<Vec2, 3> grad;  // ∇λ_l
  std::array<double, 3> h;   // edge lengths
  std::array<double, 3> H;   // heights, H_l h_l = 2|K|
  std::array<Vec2, 3> n;     // outward unit normals
  std::array<Vec2, 3> t;     // unit tangents, t_k = (x_j - x_i)/h_k = rot90(n_k)
  double area = 0.0;

  LocalTriangleFrame() = default;
  explicit LocalTriangleFrame(const std::array<Vec2, 3>& pts) : x(pts) {
    const double det = cross(x[1] - x[0], x[2] - x[0]);
    require(det > 0.0, "triangle is degenerate or clockwise");
    area = 0.5 * det;
    for (int k = 0; k < 3; ++k) {
      const Vec2& xi = x[static_cast<std::size_t>((k + 1) % 3)];
      const Vec2& xj = x[static_cast<std::size_t>((k + 2) % 3)];
      const auto K = static_cast<std::size_t>(k);
      grad[K] = rot90(xj - xi) / det;
      h[K] = (xj - xi).norm();
      H[K] = det / h[K];
      t[K] = (xj - xi) / h[K];
      n[K] = -grad[K] / grad[K].norm();
    }
  }

  static int i_of(int k) { return (k + 1) % 3; }
  static int j_of(int k) { return (k + 2) % 3; }

  std::array<double, 3> barycentric(const Vec2& p) const {
    std::array<double, 3> l{};
    for (int k = 0; k < 3; ++k) l[static_cast<std::size_t>(k)] = 1.0 / 3.0 + grad[static_cast<std::size_t>(k)].dot(p - (x[0] + x[1] + x[2]) / 3.0);
    return l;
  }
};

/// An affine vector field on a triangle, stored by its values at the three
/// vertices: v(x) = Σ_l λ_l(x) V_l.
using VertexValues = std::array<Vec2, 3>;

inline Vec2 eval_affine(const VertexValues& V, const std::array<double, 3>& lam) {
  return lam[0] * V[0] + lam[1] * V[1] + lam[2] * V[2];
}

enum class BasisFamily { RT, BDM, NE, ND, P1, CR };
enum class Endpoint { none, i, j };

struct LocalBasisId {
  BasisFamily family;
  int index;  // local edge k, or local vertex for P1
  Endpoint endpoint = Endpoint::none;
};

inline bool is_vector_family(BasisFamily f) { return f != BasisFamily::P1 && f != BasisFamily::CR; }

/// Vertex values of the (affine) vector basis function `id` on `fr`.
inline VertexValues local_basis_values(const LocalTriangleFrame& fr, const LocalBasisId& id) {
  require(is_vector_family(id.family), "local_basis_values: scalar family");
  require(id.index >= 0 && id.index < 3, "local basis edge index out of range");
  const bool needs_end = id.family == BasisFamily::BDM || id.family == BasisFamily::ND;
  require(needs_end == (id.endpoint != Endpoint::none), "endpoint given for the wrong family");
  const int k = id.index, i = LocalTriangleFrame::i_of(k), j = LocalTriangleFrame::j_of(k);
  const auto K = static_cast<std::size_t>(k), I = static_cast<std::size_t>(i), J = static_cast<std::size_t>(j);
  VertexValues V{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  switch (id.family) {
    case BasisFamily::RT:  // (x - x_k)/H_k
      for (std::size_t l = 0; l < 3; ++l) V[l] = (fr.x[l] - fr.x[K]) / fr.H[K];
      break;
    case BasisFamily::BDM: {  // (x_v - x_k) λ_v / H_k
      const std::size_t v = id.endpoint == Endpoint::i ? I : J;
      V[v] = (fr.x[v] - fr.x[K]) / fr.H[K];
      break;
    }
    case BasisFamily::NE:  // h_k (λ_i ∇λ_j - λ_j ∇λ_i)
      V[I] = fr.h[K] * fr.grad[J];
      V[J] = -fr.h[K] * fr.grad[I];
      break;
    case BasisFamily::ND:  // h_k λ_i ∇λ_j  or  h_k λ_j ∇λ_i
      if (id.endpoint == Endpoint::i)
        V[I] = fr.h[K] * fr.grad[J];
      else
        V[J] = fr.h[K] * fr.grad[I];
      break;
    default:
      break;
  }
  return V;
}

inline std::array<double, 3> checked_barycentric(const LocalTriangleFrame& fr, const Vec2& p) {
  const auto lam = fr.barycentric(p);
  for (double l : lam)
    if (l < -1e-12) throw Error("point lies outside the triangle");
  return lam;
}

inline Vec2 eval_local_basis(const LocalTriangleFrame& fr, const LocalBasisId& id, const Vec2& p) {
  return eval_affine(local_basis_values(fr, id), checked_barycentric(fr, p));
}

/// Scalar bases: P1 hat λ_l and Crouzeix-Raviart 1 - 2λ_k (k opposite the edge).
inline double eval_local_scalar(const LocalTriangleFrame& fr, const LocalBasisId& id, const Vec2& p) {
  require(!is_vector_family(id.family), "eval_local_scalar: vector family");
  require(id.index >= 0 && id.index < 3, "local basis index out of range");
  const auto lam = checked_barycentric(fr, p);
  const double l = lam[static_cast<std::size_t>(id.index)];
  return id.family == BasisFamily::P1 ? l : 1.0 - 2.0 * l;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// ∫_K λ_0^a λ_1^b λ_2^c = 2|K| a! b! c! / (a+b+c+2)!.
inline double barycentric_integral(const LocalTriangleFrame& fr, int a, int b, int c) {
  require(a >= 0 && b >= 0 && c >= 0, "barycentric_integral: negative exponent");
  require(a + b + c <= 4, "barycentric_integral: total degree above 4");
  return 2.0 * fr.area * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

inline void require_spd(const Mat2& M) {
  const double scale = M.cwiseAbs().maxCoeff();
  require(scale > 0.0 && std::isfinite(scale), "coefficient matrix is zero or not finite");
  require(std::abs(M(0, 1) - M(1, 0)) <= 1e-14 * scale, "coefficient matrix is not symmetric");
  require(M(0, 0) > 0.0 && M.determinant() > 0.0, "coefficient matrix is not positive definite");
}

/// ∫_K (M v)·w for affine fields given by vertex values; exact, using
/// ∫ λ_l λ_m = |K|(1 + δ_lm)/12.
inline double affine_mass(double area, const Mat2& M, const VertexValues& v, const VertexValues& w) {
  double s = 0.0;
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t m = 0; m < 3; ++m) s += (l == m ? 2.0 : 1.0) * (M * v[l]).dot(w[m]);
  return s * area / 12.0;
}

inline double weighted_mass_entry(const LocalTriangleFrame& fr, const Mat2& M, const LocalBasisId& a,
                                  const LocalBasisId& b) {
  require_spd(M);
  return affine_mass(fr.area, M, local_basis_values(fr, a), local_basis_values(fr, b));
}

} // namespace afem
