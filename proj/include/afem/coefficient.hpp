#pragma once

#include "afem/basis.hpp"
#include "afem/mesh.hpp"

#include <functional>
#include <vector>

namespace afem {

/// Piecewise-constant SPD diffusion tensor, one A_K per triangle.
class CoefficientField {
public:
  CoefficientField() = default;
  explicit CoefficientField(std::vector<Mat2> values) : A_(std::move(values)) {
    inv_.reserve(A_.size());
    for (auto& M : A_) {
      require_spd(M);
      M(1, 0) = M(0, 1);
      inv_.push_back(M.inverse());
    }
  }

  int size() const { return static_cast<int>(A_.size()); }
  const Mat2& A(int t) const { return A_[static_cast<std::size_t>(t)]; }
  const Mat2& A_inv(int t) const { return inv_[static_cast<std::size_t>(t)]; }

  bool scalar(int t) const {
    const Mat2& M = A(t);
    const double s = std::abs(M(0, 0));
    return std::abs(M(0, 1)) <= 1e-14 * s && std::abs(M(0, 0) - M(1, 1)) <= 1e-14 * s;
  }
  bool all_scalar() const {
    for (int t = 0; t < size(); ++t)
      if (!scalar(t)) return false;
    return true;
  }
  /// α_K for A_K = α_K I.
  double alpha(int t) const {
    if (!scalar(t)) throw Error("coefficient on triangle " + std::to_string(t) + " is not a multiple of the identity");
    return A(t)(0, 0);
  }

private:
  std::vector<Mat2> A_;
  std::vector<Mat2> inv_;
};

/// Samples a coefficient function at triangle centroids.
inline CoefficientField make_coefficient(const Mesh& mesh, const std::function<Mat2(const Vec2&)>& A) {
  std::vector<Mat2> v;
  v.reserve(static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) v.push_back(A(mesh.centroid(t)));
  return CoefficientField(std::move(v));
}

inline CoefficientField constant_coefficient(const Mesh& mesh, const Mat2& A) {
  return CoefficientField(std::vector<Mat2>(static_cast<std::size_t>(mesh.num_triangles()), A));
}

} // namespace afem
