#include "motionsphere/sphere.hpp"

#include <algorithm>
#include <cmath>

namespace motionsphere {

double l2_inner(const RowMat& a, const RowMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("l2_inner: shape mismatch (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  if (a.rows() < 2) throw DimensionError("l2_inner: need at least 2 time samples");
  const Eigen::Index T = a.rows();
  const double dt = 1.0 / static_cast<double>(T - 1);
  // Trapezoidal rule: dt * (f_0/2 + f_1 + ... + f_{T-2} + f_{T-1}/2) with
  // f_t the pointwise row dot product.
  double acc = 0.5 * (a.row(0).dot(b.row(0)) + a.row(T - 1).dot(b.row(T - 1)));
  for (Eigen::Index t = 1; t < T - 1; ++t) acc += a.row(t).dot(b.row(t));
  return acc * dt;
}

double l2_norm(const RowMat& a) { return std::sqrt(std::max(0.0, l2_inner(a, a))); }

SrvfPoint::SrvfPoint(RowMat samples) : samples_(std::move(samples)) {
  if (samples_.rows() < 2 || samples_.cols() < 3)
    throw DimensionError("SrvfPoint: need T >= 2 samples and n >= 3 coordinates");
  if (!all_finite(samples_)) throw DomainError("SrvfPoint: non-finite samples");
  const double n = l2_norm(samples_);
  if (std::abs(n - 1.0) > kUnitNormTol)
    throw DomainError("SrvfPoint: quadrature norm " + format_double(n) + " is not 1");
}

SrvfPoint SrvfPoint::normalized(const RowMat& samples) {
  const double n = l2_norm(samples);
  if (n < detail::kZeroNormGuard)
    throw DegenerateInputError("SrvfPoint::normalized: zero-norm samples");
  return SrvfPoint(samples / n);
}

TangentVector::TangentVector(RowMat samples, SrvfPoint base)
    : samples_(std::move(samples)), base_(std::move(base)) {
  if (samples_.rows() != base_.time_samples() || samples_.cols() != base_.dim())
    throw DimensionError("TangentVector: shape differs from base point");
  if (!all_finite(samples_)) throw DomainError("TangentVector: non-finite samples");
  if (std::abs(l2_inner(samples_, base_.samples())) > kTangencyTol)
    throw DomainError("TangentVector: not orthogonal to base point");
}

double geodesic_distance(const SrvfPoint& q1, const SrvfPoint& q2) {
  // Identical samples are at distance zero; without the short circuit the
  // rounded self inner product can land below 1 and acos reports ~1e-8.
  if (q1.samples() == q2.samples()) return 0.0;
  const double ip = l2_inner(q1.samples(), q2.samples());
  // Floating-point inner products of unit vectors can land just outside
  // [-1, 1]; clamp before arccos.
  return std::acos(std::clamp(ip, -1.0, 1.0));
}

SrvfPoint exp_map(const SrvfPoint& mu, const TangentVector& s) {
  if (s.samples().rows() != mu.time_samples() || s.samples().cols() != mu.dim())
    throw DimensionError("exp_map: tangent shape differs from mu");
  const double n = s.norm();
  if (n < detail::kZeroNormGuard) return mu;
  RowMat out = std::cos(n) * mu.samples() + (std::sin(n) / n) * s.samples();
  return SrvfPoint(std::move(out));
}

namespace detail {
RowMat log_map_samples(const RowMat& mu, const RowMat& q, double distance) {
  return (distance / std::sin(distance)) * (q - std::cos(distance) * mu);
}
}  // namespace detail

TangentVector log_map(const SrvfPoint& mu, const SrvfPoint& q) {
  const double d = geodesic_distance(mu, q);
  if (d >= M_PI - detail::kAntipodeGuard)
    throw DomainError("log_map: points are antipodal (d = " + format_double(d) + ")");
  if (d < detail::kZeroNormGuard)
    return TangentVector(RowMat::Zero(mu.time_samples(), mu.dim()), mu);
  return TangentVector(detail::log_map_samples(mu.samples(), q.samples(), d), mu);
}

SrvfPoint geodesic_interpolate(const SrvfPoint& q1, const SrvfPoint& q2, double a) {
  if (a < 0.0 || a > 1.0) throw DomainError("geodesic_interpolate: a outside [0, 1]");
  const double d = geodesic_distance(q1, q2);
  if (d >= M_PI - detail::kAntipodeGuard)
    throw DomainError("geodesic_interpolate: antipodal endpoints");
  if (d < detail::kZeroNormGuard) return q1;
  const double s = std::sin(d);
  RowMat out = (std::sin((1.0 - a) * d) / s) * q1.samples() + (std::sin(a * d) / s) * q2.samples();
  return SrvfPoint(std::move(out));
}

KarcherResult karcher_mean(const std::vector<SrvfPoint>& points, const KarcherConfig& cfg,
                           const std::optional<SrvfPoint>& initial) {
  if (points.empty()) throw DimensionError("karcher_mean: empty point list");
  if (cfg.epsilon <= 0.0 || cfg.epsilon > 1.0)
    throw DomainError("karcher_mean: epsilon must be in (0, 1]");
  if (cfg.threshold <= 0.0) throw DomainError("karcher_mean: threshold must be positive");

  SrvfPoint mu = initial.value_or(points.front());
  const Eigen::Index T = mu.time_samples(), n = mu.dim();
  const double inv_count = 1.0 / static_cast<double>(points.size());

  double vbar_norm = 0.0;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    // Average tangent direction at the current estimate, in list order so
    // the reduction is deterministic.
    RowMat vbar = RowMat::Zero(T, n);
    for (const SrvfPoint& q : points) {
      const double d = geodesic_distance(mu, q);
      if (d >= M_PI - detail::kAntipodeGuard)
        throw DomainError("karcher_mean: input antipodal to the running estimate");
      if (d >= detail::kZeroNormGuard)
        vbar += detail::log_map_samples(mu.samples(), q.samples(), d);
    }
    vbar *= inv_count;
    vbar_norm = l2_norm(vbar);
    if (vbar_norm < cfg.threshold) return KarcherResult{mu, iter, vbar_norm};

    const double step = cfg.epsilon * vbar_norm;
    RowMat moved = std::cos(step) * mu.samples() + (std::sin(step) / vbar_norm) * vbar;
    mu = SrvfPoint(std::move(moved));
  }
  throw ConvergenceError("karcher_mean: no convergence within " + std::to_string(cfg.max_iters) +
                             " iterations (|v_bar| = " + format_double(vbar_norm) + ")",
                         vbar_norm, cfg.max_iters);
}

}  // namespace motionsphere
