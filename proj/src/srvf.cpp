#include "motionsphere/srvf.hpp"

#include <cmath>

namespace motionsphere {

void PoseSequence::validate() const {
  if (joints < 1) throw DimensionError("PoseSequence: joint count must be positive");
  if (flat.cols() != 3 * joints)
    throw DimensionError("PoseSequence: flat width " + std::to_string(flat.cols()) +
                         " does not match 3 * " + std::to_string(joints) + " joints");
  if (flat.rows() < 2) throw DimensionError("PoseSequence: need at least 2 frames");
  if (fps <= 0.0) throw DomainError("PoseSequence: fps must be positive");
  if (!all_finite(flat)) throw DomainError("PoseSequence: non-finite coordinates");
}

ScaledSrvf::ScaledSrvf(SrvfPoint p, double scale, Eigen::RowVectorXd anchor)
    : point(std::move(p)), scale(scale), anchor(std::move(anchor)) {
  if (!(scale >= kMinScale) || !std::isfinite(scale))
    throw DegenerateInputError("ScaledSrvf: scale " + format_double(scale) +
                               " below validity floor");
  if (this->anchor.size() != point.dim())
    throw DimensionError("ScaledSrvf: anchor length differs from coordinate dimension");
  if (!this->anchor.allFinite()) throw DomainError("ScaledSrvf: non-finite anchor");
}

Curve sequence_to_curve(const PoseSequence& seq) {
  seq.validate();
  return Curve{seq.flat};
}

PoseSequence curve_to_sequence(const Curve& curve, int joints, double fps) {
  PoseSequence seq{curve.samples, joints, fps};
  seq.validate();
  return seq;
}

RowMat curve_derivative(const Curve& curve) {
  const Eigen::Index T = curve.samples.rows();
  if (T < 3) throw DimensionError("curve_derivative: need T >= 3 samples");
  const RowMat& c = curve.samples;
  const double inv_2dt = 0.5 * static_cast<double>(T - 1);
  RowMat d(T, c.cols());
  d.row(0) = (-3.0 * c.row(0) + 4.0 * c.row(1) - c.row(2)) * inv_2dt;
  for (Eigen::Index t = 1; t < T - 1; ++t) d.row(t) = (c.row(t + 1) - c.row(t - 1)) * inv_2dt;
  d.row(T - 1) = (3.0 * c.row(T - 1) - 4.0 * c.row(T - 2) + c.row(T - 3)) * inv_2dt;
  return d;
}

Curve resample_curve(const Curve& curve, Eigen::Index t_out) {
  const Eigen::Index T = curve.samples.rows();
  if (T < 2) throw DimensionError("resample_curve: need T >= 2 samples");
  if (t_out < 2) throw DimensionError("resample_curve: t_out must be >= 2");
  if (t_out == T) return curve;

  RowMat out(t_out, curve.samples.cols());
  out.row(0) = curve.samples.row(0);
  out.row(t_out - 1) = curve.samples.row(T - 1);
  for (Eigen::Index i = 1; i < t_out - 1; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(t_out - 1) *
                     static_cast<double>(T - 1);
    const auto lo = static_cast<Eigen::Index>(std::floor(u));
    const double w = u - static_cast<double>(lo);
    out.row(i) = (1.0 - w) * curve.samples.row(lo) + w * curve.samples.row(lo + 1);
  }
  return Curve{std::move(out)};
}

static ScaledSrvf encode_impl(const Curve& curve, Eigen::RowVectorXd anchor) {
  const RowMat deriv = curve_derivative(curve);
  RowMat q(deriv.rows(), deriv.cols());
  for (Eigen::Index t = 0; t < deriv.rows(); ++t) {
    const double speed = deriv.row(t).norm();
    if (speed < 1e-12)
      q.row(t).setZero();
    else
      q.row(t) = deriv.row(t) / std::sqrt(speed);
  }
  const double scale = l2_norm(q);
  if (scale < 1e-12)
    throw DegenerateInputError("srvf_encode: constant curve has no SRVF (scale would be 0)");
  return ScaledSrvf(SrvfPoint(RowMat(q / scale)), scale, std::move(anchor));
}

ScaledSrvf srvf_encode(const Curve& curve, AnchorRule rule) {
  Eigen::RowVectorXd anchor = rule == AnchorRule::kFirstSample
                                  ? curve.samples.row(0)
                                  : curve.samples.row(curve.samples.rows() - 1);
  return encode_impl(curve, std::move(anchor));
}

ScaledSrvf srvf_encode(const Curve& curve, Eigen::RowVectorXd anchor) {
  if (anchor.size() != curve.samples.cols())
    throw DimensionError("srvf_encode: anchor length differs from curve dimension");
  return encode_impl(curve, std::move(anchor));
}

namespace detail {

RowMat cumtrapz(const RowMat& rows, double dt) {
  RowMat out(rows.rows(), rows.cols());
  out.row(0).setZero();
  for (Eigen::Index t = 1; t < rows.rows(); ++t)
    out.row(t) = out.row(t - 1) + (0.5 * dt) * (rows.row(t - 1) + rows.row(t));
  return out;
}

Curve decode_q_samples(const RowMat& q, const Eigen::RowVectorXd& anchor, Eigen::Index t_out) {
  if (t_out < 2) throw DimensionError("srvf_decode: t_out must be >= 2");
  const double dt = 1.0 / static_cast<double>(q.rows() - 1);
  RowMat integrand(q.rows(), q.cols());
  for (Eigen::Index t = 0; t < q.rows(); ++t) integrand.row(t) = q.row(t).norm() * q.row(t);
  RowMat alpha = cumtrapz(integrand, dt);
  alpha.rowwise() += anchor;
  alpha.row(0) = anchor;  // bitwise, independent of rounding in the += above
  return resample_curve(Curve{std::move(alpha)}, t_out);
}

}  // namespace detail

Curve srvf_decode(const ScaledSrvf& s, Eigen::Index t_out) {
  return detail::decode_q_samples(s.scale * s.point.samples(), s.anchor, t_out);
}

}  // namespace motionsphere
