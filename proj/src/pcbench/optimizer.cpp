#include "pcbench/optimizer.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "pcbench/error.hpp"

namespace pcbench {

Vector forward_difference_gradient(const ObjectiveFn& f, const Vector& z, double fz, double h, const Vector& lo,
                                   const Vector& hi) {
  Vector g(z.size());
  Vector zp = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double step = z[i] + h > hi[i] ? -h : h;
    zp[i] = z[i] + step;
    g[i] = (f(zp) - fz) / step;
    zp[i] = z[i];
  }
  return g;
}

double projected_gradient_norm(const Vector& z, const Vector& g, const Vector& lo, const Vector& hi) {
  return (z - (z - g).cwiseMax(lo).cwiseMin(hi)).lpNorm<Eigen::Infinity>();
}

OptimizeResult minimize_box(const ObjectiveFn& f, const GradientFn& grad, const Vector& z0, const Vector& lo,
                            const Vector& hi, const QuasiNewtonSettings& s) {
  const Eigen::Index n = z0.size();
  if (lo.size() != n || hi.size() != n) fail(ErrorCode::argument, "minimize_box: bound dimension mismatch");
  if (!((hi - lo).array() >= 0.0).all()) fail(ErrorCode::argument, "minimize_box: lo > hi");

  OptimizeResult r;
  auto eval = [&](const Vector& z) {
    ++r.evaluations;
    const double v = f(z);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  auto gradient = [&](const Vector& z, double fz, Vector& g) {
    if (grad) {
      grad(z, fz, g);
    } else {
      g = forward_difference_gradient(eval, z, fz, s.fd_step, lo, hi);
    }
  };

  Vector z = z0.cwiseMax(lo).cwiseMin(hi);
  double fz = eval(z);
  if (!std::isfinite(fz)) fail(ErrorCode::solver, "minimize_box: objective not finite at the starting point");
  Vector g(n);
  gradient(z, fz, g);

  Matrix H = Matrix::Identity(n, n);
  bool h_is_identity = true;
  constexpr double bound_eps = 1e-12;
  std::vector<bool> active(static_cast<std::size_t>(n));

  for (r.iterations = 0; r.iterations < s.max_iterations; ++r.iterations) {
    r.projected_gradient_norm = projected_gradient_norm(z, g, lo, hi);
    if (r.projected_gradient_norm <= s.tolerance) {
      r.converged = true;
      break;
    }

    for (Eigen::Index i = 0; i < n; ++i) {
      active[static_cast<std::size_t>(i)] =
          (z[i] <= lo[i] + bound_eps && g[i] > 0.0) || (z[i] >= hi[i] - bound_eps && g[i] < 0.0);
    }
    auto direction = [&](const Matrix& metric) {
      Vector gf = g;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (active[static_cast<std::size_t>(i)]) gf[i] = 0.0;
      }
      Vector d = -(metric * gf);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (active[static_cast<std::size_t>(i)]) d[i] = 0.0;
      }
      return d;
    };

    Vector d = direction(H);
    if (g.dot(d) >= 0.0) {
      H.setIdentity();
      h_is_identity = true;
      d = direction(H);
    }

    bool accepted = false;
    Vector zn(n);
    double fn = fz;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double alpha = 1.0;
      for (int k = 0; k < s.max_backtracks; ++k, alpha *= 0.5) {
        zn = (z + alpha * d).cwiseMax(lo).cwiseMin(hi);
        if ((zn - z).lpNorm<Eigen::Infinity>() == 0.0) break;
        fn = eval(zn);
        if (fn <= fz + s.armijo * g.dot(zn - z)) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (h_is_identity) break;
        H.setIdentity();
        h_is_identity = true;
        d = direction(H);
      }
    }
    if (!accepted) break;  // stalled: no descent along the steepest projected direction

    Vector gn(n);
    gradient(zn, fn, gn);
    const Vector sv = zn - z;
    const Vector yv = gn - g;
    const double sy = sv.dot(yv);
    if (sy > 1e-12 * sv.norm() * yv.norm()) {
      if (h_is_identity) H *= sy / yv.squaredNorm();
      const double rho = 1.0 / sy;
      const Vector hy = H * yv;
      H += (rho * rho * yv.dot(hy) + rho) * sv * sv.transpose() - rho * (hy * sv.transpose() + sv * hy.transpose());
      h_is_identity = false;
    }
    z = zn;
    fz = fn;
    g = gn;
  }
  if (r.iterations >= s.max_iterations) r.projected_gradient_norm = projected_gradient_norm(z, g, lo, hi);
  r.z = z;
  r.value = fz;
  return r;
}

}  // namespace pcbench
