#include <cmath>

#include <gtest/gtest.h>

#include "rigid/laminate.hpp"
#include "rigid/maps.hpp"
#include "rigid/pde.hpp"

using namespace rigid;

namespace {

double max_abs(const Mat2& m) {
  double s = 0.0;
  for (double v : m.data()) s = std::max(s, std::abs(v));
  return s;
}

VecField sample_fn(const GridSpec& g, std::function<Vec2(const Vec2&)> f) { return sample<Vec2>(g, f); }

}  // namespace

TEST(GradientField, AffineIsExact) {
  const Mat2 A{2.0, -1.0, 0.5, 3.0};
  const MatField du = gradient_field(sample_map(maps::affine(A), GridSpec::square(17)));
  for (const Mat2& m : du.values) EXPECT_LE(max_abs(m - A), 1e-12);
}

TEST(GradientField, CentredIsExactOnQuadratics) {
  const GridSpec g{101, 101, 0.01, {-0.5, -0.5}};
  const MatField du = gradient_field(sample_fn(g, [](const Vec2& x) { return Vec2{x[0] * x[0], x[1]}; }));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) EXPECT_NEAR(du.at(i, j)(0, 0), 2 * g.node(i, j)[0], 1e-10);
}

TEST(GradientField, SecondOrder) {
  std::vector<double> err;
  for (int n : {33, 65}) {
    const GridSpec g = GridSpec::square(n);
    const MatField du = gradient_field(sample_fn(g, [](const Vec2& x) { return Vec2{std::sin(x[0]), x[1]}; }));
    double e = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) e = std::max(e, std::abs(du.at(i, j)(0, 0) - std::cos(g.node(i, j)[0])));
    err.push_back(e);
  }
  EXPECT_GT(err[0] / err[1], 3.5);
  EXPECT_LT(err[0] / err[1], 4.5);
}

TEST(WeakCurl, ConstantFieldsVanish) {
  const GridSpec g = GridSpec::square(33);
  const CurlResidual r = weak_curl_residual(MatField(g, Mat2{1, 2, 3, 4}));
  EXPECT_LE(r.linf, 1e-12);
  EXPECT_LE(r.weak_max, 1e-12);
  EXPECT_EQ(r.weak.size(), 18u);

  const VecField u = sample_map(maps::affine(Mat2{2, 0, 0, 0.5}), g);
  MatField bdu = gradient_field(u);
  for (auto& m : bdu.values) m = 3.7 * m;
  EXPECT_LE(weak_curl_residual(bdu).linf, 1e-12);
}

TEST(WeakCurl, ExactGradientsConvergeAtSecondOrder) {
  const TestMap m = maps::shear();
  std::vector<double> l2;
  for (int n : {33, 65, 129}) l2.push_back(weak_curl_residual(sample_gradient_exact(m, GridSpec::square(n))).l2);
  for (std::size_t k = 1; k < l2.size(); ++k) EXPECT_GE(std::log2(l2[k - 1] / l2[k]), 1.9);
}

TEST(WeakCurl, NullLagrangianCofactorRows) {
  // polynomial maps are differentiated exactly, so use transcendental ones
  const TestMap m{"exp",
                  [](const Vec2& x) { return std::exp(x[0]) * Vec2{std::cos(x[1]), std::sin(x[1])}; },
                  [](const Vec2& x) {
                    const double e = std::exp(x[0]), c = std::cos(x[1]), s = std::sin(x[1]);
                    return Mat2{e * c, -e * s, e * s, e * c};
                  }};
  const TestMap s = maps::shear(0.4, 0.2, 2.0);
  for (const TestMap* t : {&m, &s}) {
    std::vector<double> l2;
    for (int n : {33, 65, 129}) {
      MatField f = sample_gradient_exact(*t, GridSpec::square(n));
      for (auto& v : f.values) v = cof_t(v) * rotation_j();
      l2.push_back(weak_curl_residual(f).l2);
    }
    for (std::size_t k = 1; k < l2.size(); ++k) EXPECT_GE(std::log2(l2[k - 1] / l2[k]), 1.9) << t->name;
  }
}

TEST(WeakCurl, DetectsNonGradient) {
  // rows (0, x1) and (x2, 0) have curl 1 and -1
  const GridSpec g = GridSpec::square(33);
  const MatField f = sample<Mat2>(g, [](const Vec2& x) { return Mat2{0, x[0], x[1], 0}; });
  const CurlResidual r = weak_curl_residual(f);
  EXPECT_NEAR(r.strong[0].at(10, 10), 1.0, 1e-12);
  EXPECT_NEAR(r.strong[1].at(10, 10), -1.0, 1e-12);
  EXPECT_GT(r.weak_max, 1e-3);
}

TEST(WeakCurl, MaskedBumpsAreSkipped) {
  const GridSpec g = GridSpec::square(33);
  MatField f(g, Mat2::identity());
  f.mask.assign(g.count(), 1);
  f.mask[g.index(16, 16)] = 0;  // kills the centre bump only
  EXPECT_EQ(weak_curl_residual(f).weak.size(), 16u);
}

TEST(ElResidual, AffineUnitDeterminantVanishes) {
  const ConvexIntegrand q = integrands::quad();
  const CurlResidual r = el_residual(q, sample_map(maps::affine(Mat2{2, 1, 1, 1}), GridSpec::square(33)));
  EXPECT_LE(r.linf, 1e-12);
  EXPECT_LE(r.weak_max, 1e-12);
}

TEST(ElResidual, ShearConvergesNonconstDetDoesNot) {
  const ConvexIntegrand q = integrands::quad();
  std::vector<double> shear, nonconst;
  for (int n : {33, 65, 129}) {
    const GridSpec g = GridSpec::square(n);
    shear.push_back(el_residual(q, sample_map(maps::shear(), g)).weak_max);
    nonconst.push_back(el_residual(q, sample_map(maps::nonconst_det(), g)).weak_max);
  }
  EXPECT_LT(shear[2], shear[0] / 8);
  EXPECT_GT(nonconst[2], 0.5 * nonconst[0]);
  EXPECT_GT(nonconst[2], 1e-2);
}

TEST(BetaRecover, AffineIsExactKernel) {
  for (int n : {16, 32, 64}) {
    const VecField u = sample_map(maps::by_name("affine"), GridSpec::square(n));
    const BetaRecovery r = beta_recover(u);
    EXPECT_LE(beta_deviation(r.beta), 1e-8);
    const BetaRecovery p = beta_recover(u, Normalization::pin_node);
    EXPECT_LE(beta_deviation(p.beta), 1e-8);
    for (std::size_t k = 0; k < r.beta.values.size(); ++k)
      EXPECT_NEAR(r.beta.values[k] - r.beta.values[0], p.beta.values[k] - p.beta.values[0], 1e-10);
  }
}

TEST(BetaRecover, SmoothAreaPreservingConverges) {
  const TestMap m = maps::shear();
  std::vector<double> dev;
  for (int n : {32, 64, 128}) {
    const BetaRecovery r = beta_recover(sample_map(m, GridSpec::square(n)));
    dev.push_back(beta_deviation(r.beta));
    EXPECT_EQ(r.flat.components >= 1, true);
  }
  for (std::size_t k = 1; k < dev.size(); ++k) EXPECT_GE(std::log2(dev[k - 1] / dev[k]), 1.0);
}

TEST(BetaRecover, PinNormalizationFixesCentre) {
  const GridSpec g = GridSpec::square(32);
  const BetaRecovery r = beta_recover(sample_map(maps::shear(), g), Normalization::pin_node);
  EXPECT_EQ(r.beta.at(g.nx / 2, g.ny / 2), 1.0);
}

TEST(BetaRecover, NonconstantDeterminantStillGivesConstantBeta) {
  // det Du = 1 + x1^2 is bounded away from 0, so only constants survive
  std::vector<double> dev;
  for (int n : {32, 64}) {
    const BetaRecovery r = beta_recover(sample_map(maps::nonconst_det(), GridSpec::square(n)));
    dev.push_back(beta_deviation(r.beta));
    EXPECT_LT(r.residual_norm, 1e-3);
  }
  EXPECT_LT(dev[1], 1e-2);
}

TEST(BetaRecover, DegenerateDeterminant) {
  try {
    beta_recover(sample_map(maps::sign_change(), GridSpec::square(33)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "degenerate determinant");
  }
  // even grid misses x1 = 0 but det still changes sign
  EXPECT_THROW(beta_recover(sample_map(maps::sign_change(), GridSpec::square(32))), Error);
}

TEST(BetaRecover, Deterministic) {
  const VecField u = sample_map(maps::shear(), GridSpec::square(24));
  EXPECT_EQ(beta_recover(u).beta.values, beta_recover(u).beta.values);
}

TEST(Stationarity, AffineDeterminantLiesInFiber) {
  const ConvexIntegrand c = integrands::cosh();
  for (double d : {0.5, 2.0, -1.5}) {
    const Mat2 A{d, 0.3, 0.0, 1.0};
    const Stationarity s = stationarity_check(c, sample_map(maps::affine(A), GridSpec::square(17)));
    EXPECT_LE(s.grad_norm, 1e-12);
    for (double v : s.h_field.values) EXPECT_NEAR(v, h_eval(c, d), 1e-12);
    bool found = false;
    for (double r : s.fiber.roots) found = found || std::abs(r - d) <= 1e-10;
    EXPECT_TRUE(found) << d;
  }
}

TEST(Stationarity, NonconstantDeterminantIsNotStationary) {
  const ConvexIntegrand q = integrands::quad();
  std::vector<double> gn;
  for (int n : {32, 64, 128}) gn.push_back(stationarity_check(q, sample_map(maps::nonconst_det(), GridSpec::square(n))).grad_norm);
  for (double v : gn) EXPECT_GE(v, 0.01);
  EXPECT_NEAR(gn[2] / gn[1], 1.0, 0.1);
}

TEST(Stationarity, LaminateIsStationaryOffTheCollar) {
  const ConvexIntegrand q = integrands::quad();
  const LaminatePair p = default_pair();
  const GridSpec g = GridSpec::square(321);
  std::vector<double> bad_fraction;
  for (int n : {5, 10, 20}) {
    const LaminateMap lam = build_laminate(p, n);
    const Stationarity s = stationarity_check(q, sample<Vec2>(g, [&](const Vec2& x) { return lam.value(x); }));
    std::size_t bad = 0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double r = norm(g.node(i, j));
        const bool off_collar = r < lam.phase_radius() - 2 * g.h || r > 1.0 + 2 * g.h;
        const double dev = std::abs(s.h_field.at(i, j) - 1.0);
        if (off_collar) EXPECT_LE(dev, 1e-12);
        if (dev > 1e-12) ++bad;
      }
    bad_fraction.push_back(static_cast<double>(bad) / g.count());
  }
  EXPECT_GT(bad_fraction[0], bad_fraction[1]);
  EXPECT_GT(bad_fraction[1], bad_fraction[2]);
}

TEST(LevelCurve, AffineHasZeroSpread) {
  const VecField u = sample_map(maps::affine(Mat2{2, 1, 0.5, 1}), GridSpec::square(33));
  const LevelCurve c = trace_level_curve(u, 1, 0.0, {0.0, 0.0}, 10);
  EXPECT_EQ(c.polyline.size(), 11u);
  EXPECT_LE(c.det_spread, 1e-12);
  for (const Vec2& x : c.polyline) EXPECT_NEAR(2 * x[0] + x[1], 0.0, 1e-10);
}

TEST(LevelCurve, AreaPreservingSpreadShrinks) {
  std::vector<double> spread;
  for (int n : {33, 65, 129}) {
    const GridSpec g = GridSpec::square(n);
    const VecField u = sample_map(maps::shear(), g);
    const Vec2 seed{0.0, 0.0};
    const double level = maps::shear().u(seed)[0];
    spread.push_back(trace_level_curve(u, 1, level, seed, static_cast<int>(0.5 / g.h)).det_spread);
  }
  EXPECT_LT(spread[2], spread[0] / 2);
  EXPECT_LT(spread[2], 0.01);
}

TEST(LevelCurve, NonconstantDeterminantAlongCurve) {
  // u2 = (1 + x1^2) x2: the level set through (0.9, 0.5) runs towards x1 = 0
  const GridSpec g = GridSpec::square(129);
  const VecField u = sample_map(maps::nonconst_det(), g);
  const Vec2 seed{0.9, 0.5};
  const double level = (1 + 0.81) * 0.5;
  const LevelCurve c = trace_level_curve(u, 2, level, seed, static_cast<int>(1.0 / g.h));
  EXPECT_GE(c.det_spread, 0.1);
}

TEST(LevelCurve, Errors) {
  const GridSpec g = GridSpec::square(33);
  const VecField u = sample_map(maps::affine(Mat2::identity()), g);
  EXPECT_THROW(trace_level_curve(u, 1, 0.9, {0.9, 0.0}, 100), Error);  // walks off the top edge
  EXPECT_THROW(trace_level_curve(u, 3, 0.0, {0.0, 0.0}, 1), std::invalid_argument);
  EXPECT_THROW(trace_level_curve(u, 1, 0.5, {0.0, 0.0}, 1), std::invalid_argument);
  const VecField flat = sample_fn(g, [](const Vec2& x) { return Vec2{0.0, x[1]}; });
  try {
    trace_level_curve(flat, 1, 0.0, {0.0, 0.0}, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "degenerate gradient on curve");
  }
}
