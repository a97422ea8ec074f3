#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace afem {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Thrown for violated preconditions and malformed inputs.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a linear solve or a self-check of a numerical result fails.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Counterclockwise rotation by 90 degrees: (x, y) -> (-y, x).
inline Vec2 rot90(const Vec2& v) { return {-v.y(), v.x()}; }

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

} // namespace afem
