#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "motionsphere/sphere.hpp"

#include <cmath>

using namespace motionsphere;
using mstest::axis_point;
using mstest::random_point;
using mstest::random_tangent;

TEST_CASE("l2_inner basics") {
  Rng rng(7);
  const SrvfPoint q = random_point(rng);
  CHECK(l2_inner(q.samples(), q.samples()) == doctest::Approx(1.0).epsilon(1e-12));

  const RowMat zero = RowMat::Zero(q.time_samples(), q.dim());
  CHECK(l2_inner(q.samples(), zero) == 0.0);

  const SrvfPoint a = axis_point(6, 3, 0);
  const SrvfPoint b = axis_point(6, 3, 1);
  CHECK(l2_inner(a.samples(), b.samples()) == 0.0);

  CHECK_THROWS_AS(l2_inner(RowMat::Zero(4, 3), RowMat::Zero(5, 3)), DimensionError);
}

TEST_CASE("SrvfPoint validation") {
  CHECK_THROWS_AS(SrvfPoint(RowMat(RowMat::Ones(4, 3) * 2.0)), DomainError);  // not unit norm
  CHECK_THROWS_AS(SrvfPoint(RowMat(RowMat::Ones(1, 3))), DimensionError);     // T too small
  CHECK_THROWS_AS(SrvfPoint(RowMat(RowMat::Ones(4, 2))), DimensionError);     // n too small
  CHECK_THROWS_AS(SrvfPoint::normalized(RowMat::Zero(4, 3)), DegenerateInputError);
}

TEST_CASE("geodesic distance special values") {
  Rng rng(11);
  const SrvfPoint q = random_point(rng);
  CHECK(geodesic_distance(q, q) == 0.0);

  const SrvfPoint anti(RowMat(-q.samples()));
  CHECK(geodesic_distance(q, anti) == doctest::Approx(M_PI));

  const SrvfPoint a = axis_point(6, 3, 0);
  const SrvfPoint b = axis_point(6, 3, 1);
  CHECK(geodesic_distance(a, b) == doctest::Approx(M_PI / 2.0));
}

TEST_CASE("exp map limits") {
  Rng rng(13);
  const SrvfPoint mu = random_point(rng);
  const TangentVector zero(RowMat::Zero(mu.time_samples(), mu.dim()), mu);
  const SrvfPoint back = exp_map(mu, zero);
  CHECK(mstest::max_abs_diff(back.samples(), mu.samples()) == 0.0);

  // s orthogonal to mu with |s| = pi/2 maps to s/|s|.
  const SrvfPoint mu2 = axis_point(6, 3, 0);
  RowMat sm = RowMat::Zero(6, 3);
  sm.col(1).setConstant(M_PI / 2.0);
  const TangentVector s(sm, mu2);
  const SrvfPoint out = exp_map(mu2, s);
  CHECK(mstest::max_abs_diff(out.samples(), RowMat(sm / (M_PI / 2.0))) < 1e-15);
}

TEST_CASE("log map limits and errors") {
  Rng rng(17);
  const SrvfPoint mu = random_point(rng);
  const TangentVector at_self = log_map(mu, mu);
  CHECK(at_self.samples().cwiseAbs().maxCoeff() == 0.0);

  const SrvfPoint anti(RowMat(-mu.samples()));
  CHECK_THROWS_AS(log_map(mu, anti), DomainError);
}

TEST_CASE("log norm equals distance on seeded pairs") {
  Rng rng(19);
  for (int i = 0; i < 200; ++i) {
    const SrvfPoint mu = random_point(rng);
    const SrvfPoint q = random_point(rng);
    const double d = geodesic_distance(mu, q);
    if (d >= M_PI - 0.1) continue;
    const TangentVector v = log_map(mu, q);
    if (d > 1e-12) CHECK(v.norm() == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("exp/log inverse pair both directions") {
  Rng rng(23);
  double worst_q = 0.0, worst_s = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SrvfPoint mu = random_point(rng);
    const SrvfPoint q = random_point(rng);
    if (geodesic_distance(mu, q) >= M_PI - 0.1) continue;
    const SrvfPoint q2 = exp_map(mu, log_map(mu, q));
    worst_q = std::max(worst_q, mstest::max_abs_diff(q2.samples(), q.samples()));

    const TangentVector s = random_tangent(rng, mu, rng.uniform(1e-4, M_PI - 0.1));
    const TangentVector s2 = log_map(mu, exp_map(mu, s));
    worst_s = std::max(worst_s, mstest::max_abs_diff(s2.samples(), s.samples()));
  }
  CHECK(worst_q < 1e-9);
  CHECK(worst_s < 1e-8);
}

TEST_CASE("metric axioms") {
  Rng rng(29);
  for (int i = 0; i < 1000; ++i) {
    const SrvfPoint a = random_point(rng, 5, 3);
    const SrvfPoint b = random_point(rng, 5, 3);
    const SrvfPoint c = random_point(rng, 5, 3);
    CHECK(geodesic_distance(a, b) == geodesic_distance(b, a));
    CHECK(geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12);
  }
}

TEST_CASE("geodesic interpolation") {
  Rng rng(31);
  const SrvfPoint q1 = random_point(rng);
  SrvfPoint q2 = random_point(rng);
  while (geodesic_distance(q1, q2) > 2.5) q2 = random_point(rng);

  // Endpoints are reproduced exactly.
  CHECK(geodesic_interpolate(q1, q2, 0.0).samples() == q1.samples());
  CHECK(geodesic_interpolate(q1, q2, 1.0).samples() == q2.samples());

  const double d = geodesic_distance(q1, q2);
  const SrvfPoint mid = geodesic_interpolate(q1, q2, 0.5);
  CHECK(geodesic_distance(q1, mid) == doctest::Approx(d / 2).epsilon(1e-9));
  CHECK(geodesic_distance(q2, mid) == doctest::Approx(d / 2).epsilon(1e-9));

  for (double a : {0.25, 0.75}) {
    const SrvfPoint p = geodesic_interpolate(q1, q2, a);
    CHECK(geodesic_distance(q1, p) == doctest::Approx(a * d).epsilon(1e-9));
  }

  const SrvfPoint anti(RowMat(-q1.samples()));
  CHECK_THROWS_AS(geodesic_interpolate(q1, anti, 0.5), DomainError);
}

TEST_CASE("unit norm closure") {
  Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    const SrvfPoint mu = random_point(rng);
    const TangentVector s = random_tangent(rng, mu, rng.uniform(1e-6, 3.0));
    CHECK(std::abs(l2_norm(exp_map(mu, s).samples()) - 1.0) < 1e-9);
  }
}

TEST_CASE("karcher mean of a single point") {
  Rng rng(41);
  const SrvfPoint q = random_point(rng);
  const KarcherResult r = karcher_mean({q}, KarcherConfig{});
  CHECK(r.iterations == 1);
  CHECK(r.final_step_norm < 1e-12);
  CHECK(mstest::max_abs_diff(r.mean.samples(), q.samples()) == 0.0);
}

TEST_CASE("karcher mean of two points is the geodesic midpoint") {
  Rng rng(43);
  const SrvfPoint q1 = random_point(rng);
  SrvfPoint q2 = random_point(rng);
  while (geodesic_distance(q1, q2) > 2.0) q2 = random_point(rng);
  const SrvfPoint mid = geodesic_interpolate(q1, q2, 0.5);
  KarcherConfig cfg;
  cfg.threshold = 1e-10;
  const KarcherResult r = karcher_mean({q1, q2}, cfg);
  CHECK(mstest::max_abs_diff(r.mean.samples(), mid.samples()) < 1e-6);
  CHECK(r.final_step_norm < cfg.threshold);
}

TEST_CASE("karcher mean of a symmetric three-point configuration") {
  // Three points obtained by rotating one tangent direction by 120 degrees
  // around an axis point; the mean is the axis by symmetry.
  const SrvfPoint axis = axis_point(6, 4, 0);
  const SrvfPoint u = axis_point(6, 4, 1);
  const SrvfPoint v = axis_point(6, 4, 2);
  const double r = 0.5;
  std::vector<SrvfPoint> pts;
  for (int i = 0; i < 3; ++i) {
    const double phi = 2.0 * M_PI * i / 3.0;
    RowMat tan = r * (std::cos(phi) * u.samples() + std::sin(phi) * v.samples());
    pts.push_back(exp_map(axis, TangentVector(std::move(tan), axis)));
  }
  KarcherConfig cfg;
  cfg.threshold = 1e-10;
  const KarcherResult res = karcher_mean(pts, cfg);
  const double d0 = geodesic_distance(res.mean, pts[0]);
  const double d1 = geodesic_distance(res.mean, pts[1]);
  const double d2 = geodesic_distance(res.mean, pts[2]);
  CHECK(std::abs(d0 - d1) < 1e-6);
  CHECK(std::abs(d1 - d2) < 1e-6);
  CHECK(mstest::max_abs_diff(res.mean.samples(), axis.samples()) < 1e-6);
}

TEST_CASE("karcher stationarity at the returned mean") {
  Rng rng(47);
  std::vector<SrvfPoint> pts;
  const SrvfPoint center = random_point(rng);
  for (int i = 0; i < 10; ++i)
    pts.push_back(exp_map(center, random_tangent(rng, center, rng.uniform(0.1, 0.8))));
  KarcherConfig cfg;
  cfg.threshold = 1e-9;
  const KarcherResult r = karcher_mean(pts, cfg);
  RowMat vbar = RowMat::Zero(center.time_samples(), center.dim());
  for (const SrvfPoint& q : pts) vbar += log_map(r.mean, q).samples();
  vbar /= static_cast<double>(pts.size());
  CHECK(l2_norm(vbar) < cfg.threshold);
}

TEST_CASE("karcher permutation invariance with a fixed initial estimate") {
  Rng rng(53);
  std::vector<SrvfPoint> pts;
  const SrvfPoint center = random_point(rng);
  for (int i = 0; i < 8; ++i)
    pts.push_back(exp_map(center, random_tangent(rng, center, rng.uniform(0.1, 0.6))));
  KarcherConfig cfg;
  cfg.threshold = 1e-11;
  const KarcherResult base = karcher_mean(pts, cfg, pts[0]);

  std::vector<SrvfPoint> shuffled{pts[5], pts[2], pts[7], pts[0], pts[3], pts[6], pts[1], pts[4]};
  const KarcherResult perm = karcher_mean(shuffled, cfg, pts[0]);
  CHECK(mstest::max_abs_diff(base.mean.samples(), perm.mean.samples()) < 1e-9);
}

TEST_CASE("karcher error paths") {
  Rng rng(59);
  const SrvfPoint q = random_point(rng);
  const SrvfPoint far = random_point(rng);

  KarcherConfig tight;
  tight.threshold = 1e-18;
  tight.max_iters = 1;
  CHECK_THROWS_AS(karcher_mean({q, far}, tight), ConvergenceError);
  try {
    karcher_mean({q, far}, tight);
  } catch (const ConvergenceError& e) {
    CHECK(e.residual > 0.0);
    CHECK(e.iterations == 1);
  }

  const SrvfPoint anti(RowMat(-q.samples()));
  CHECK_THROWS_AS(karcher_mean({q, anti}, KarcherConfig{}), DomainError);

  KarcherConfig bad;
  bad.epsilon = 1.5;
  CHECK_THROWS_AS(karcher_mean({q}, bad), DomainError);
  CHECK_THROWS_AS(karcher_mean({}, KarcherConfig{}), DimensionError);
}
