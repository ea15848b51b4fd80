#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace pcbench {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Names = std::vector<std::string>;

/// Axis-aligned box; used for action and observation spaces.
struct Box {
  Vector low;
  Vector high;

  Eigen::Index size() const { return low.size(); }
  bool contains(const Vector& z) const;
  Vector clip(const Vector& z) const;
  Vector midpoint() const { return 0.5 * (low + high); }
  Box segment(Eigen::Index start, Eigen::Index n) const {
    return Box{low.segment(start, n), high.segment(start, n)};
  }
};

/// Affine map onto [0, 1] per component. Throws ErrorCode::argument on degenerate bounds.
Vector normalize(const Vector& z, const Vector& low, const Vector& high);
Vector denormalize(const Vector& zbar, const Vector& low, const Vector& high);

inline Vector normalize(const Vector& z, const Box& b) { return normalize(z, b.low, b.high); }
inline Vector denormalize(const Vector& z, const Box& b) { return denormalize(z, b.low, b.high); }

bool all_finite(const Vector& v);

/// Formats a vector as "[a, b, c]" with round-trip precision.
std::string to_string(const Vector& v);

/// Round-trip decimal representation (17 significant digits, shortest form is not required).
std::string format_double(double value);

}  // namespace pcbench
