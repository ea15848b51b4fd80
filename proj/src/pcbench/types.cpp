#include "pcbench/types.hpp"

#include <cmath>
#include <cstdio>

#include "pcbench/error.hpp"

namespace pcbench {

bool Box::contains(const Vector& z) const {
  if (z.size() != low.size()) return false;
  return ((z.array() >= low.array()) && (z.array() <= high.array())).all();
}

Vector Box::clip(const Vector& z) const { return z.cwiseMax(low).cwiseMin(high); }

Vector normalize(const Vector& z, const Vector& low, const Vector& high) {
  if (z.size() != low.size() || z.size() != high.size()) {
    fail(ErrorCode::argument, "normalize: dimension mismatch");
  }
  if (!((high.array() - low.array()) > 0.0).all()) {
    fail(ErrorCode::argument, "normalize: degenerate bounds " + to_string(low) + " .. " + to_string(high));
  }
  return ((z - low).array() / (high - low).array()).matrix();
}

Vector denormalize(const Vector& zbar, const Vector& low, const Vector& high) {
  if (zbar.size() != low.size() || zbar.size() != high.size()) {
    fail(ErrorCode::argument, "denormalize: dimension mismatch");
  }
  if (!((high.array() - low.array()) > 0.0).all()) {
    fail(ErrorCode::argument, "denormalize: degenerate bounds " + to_string(low) + " .. " + to_string(high));
  }
  return (low.array() + zbar.array() * (high - low).array()).matrix();
}

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string to_string(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

}  // namespace pcbench
