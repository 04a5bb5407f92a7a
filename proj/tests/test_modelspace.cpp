#include <gtest/gtest.h>

#include <cmath>

#include "kahler/chart_config.hpp"
#include "kahler/modelspace.hpp"

using namespace kahler;
using namespace kahler::model;

namespace {

Point pt(std::initializer_list<cplx> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (auto x : v) p(i++) = x;
  return p;
}

ChartPtr cp1xcp1() { return make_product({make_fubini_study(1, 1.0), make_fubini_study(1, 1.0)}); }

}  // namespace

TEST(Modelspace, FlatMetricIsIdentity) {
  const auto g = metric_at(*make_flat(2), pt({cplx(0.3, -1.2), 2.0}));
  EXPECT_LT(max_abs(g.matrix() - CMatrix::Identity(2, 2)), 1e-15);
}

TEST(Modelspace, FubiniStudyMetricValues) {
  const auto c = make_fubini_study(1, 1.0);
  EXPECT_NEAR(metric_at(*c, pt({0.0})).matrix()(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(metric_at(*c, pt({cplx(0.6, 0.8)})).matrix()(0, 0).real(), 0.25, 1e-15);
}

TEST(Modelspace, ChristoffelOnRealAxis) {
  const auto c = make_fubini_study(1, 1.0);
  const double t = 0.7;
  EXPECT_NEAR(christoffel_at(*c, pt({t}))(0, 0, 0).real(), -2.0 * t / (1.0 + t * t), 1e-13);
  EXPECT_LT(christoffel_at(*make_flat(2), pt({1.0, 2.0})).max_abs(), 1e-15);
}

TEST(Modelspace, ProductChristoffelHasNoCrossTerms) {
  const auto G = christoffel_at(*cp1xcp1(), pt({0.4, cplx(0.1, 0.5)}));
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (!(a == b && b == c)) EXPECT_EQ(std::abs(G(c, a, b)), 0.0);
}

TEST(Modelspace, SpaceFormCurvatureIdentity) {
  for (double K : {1.0, -0.5, 2.0}) {
    const auto c = make_space_form(3, K);
    const Point z = pt({cplx(0.2, 0.1), cplx(-0.3, 0.25), cplx(0.05, -0.4)});
    const auto R = curvature_tensor(*c, z);
    const CMatrix g = c->metric_raw(z);
    double err = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            err = std::max(err, std::abs(R(a, b, i, j) - K * (g(a, b) * g(i, j) + g(a, j) * g(i, b))));
    EXPECT_LT(err, 1e-12) << "K = " << K;
  }
}

TEST(Modelspace, HolomorphicSectionalCurvatureIsTwoK) {
  const auto c = make_fubini_study(1, 1.0);
  const Point z = pt({cplx(0.5, -0.2)});
  const CVector X = CVector::Ones(1) / std::sqrt(norm2(c->metric_raw(z), CVector::Ones(1)));
  EXPECT_NEAR(curvature_at(*c, z, X, X).real(), 2.0, 1e-12);
}

TEST(Modelspace, ProductMixedPairCurvatureVanishes) {
  const auto c = cp1xcp1();
  const Point z = pt({0.3, cplx(0.0, 0.7)});
  EXPECT_NEAR(std::abs(curvature_at(*c, z, CVector::Unit(2, 0), CVector::Unit(2, 1))), 0.0, 1e-14);
  EXPECT_NEAR(curvature_at(*make_flat(2), z, CVector::Ones(2), CVector::Unit(2, 1)).real(), 0.0, 1e-15);
}

TEST(Modelspace, BisectionalQuotientEqualsKOnSpaceForms) {
  const auto c = make_fubini_study(3, 0.7);
  const Point z = pt({0.1, cplx(0.2, 0.3), -0.4});
  CVector X(3), Y(3);
  X << cplx(1, 2), 0.5, cplx(0, -1);
  Y << 0.3, cplx(-1, 1), 2.0;
  EXPECT_NEAR(bisectional_quotient(*c, z, X, Y), 0.7, 1e-12);
}

TEST(Modelspace, FiniteDifferenceChartMatchesClosedForm) {
  const auto base = make_fubini_study(2, 1.0);
  const auto fd = make_fd_chart(base, 1e-3);
  const Point z = pt({cplx(0.2, 0.1), cplx(-0.1, 0.3)});
  EXPECT_LT(max_abs(fd->metric_raw(z) - base->metric_raw(z)), 1e-6);
  const auto R1 = curvature_tensor(*base, z), R2 = curvature_tensor(*fd, z);
  double err = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(R1(a, b, i, j) - R2(a, b, i, j)));
  EXPECT_LT(err, 1e-3);
}

TEST(Modelspace, CurvatureSlicesInAdaptedFrames) {
  const auto fs = make_fubini_study(2, 1.0);
  const auto flat = make_flat(2);
  const Point z = Point::Zero(2);
  const CMatrix E = CMatrix::Identity(2, 2);
  const auto s = curvature_slice_in_frame(*fs, z, E);
  CMatrix m = CMatrix::Zero(2, 2), h = CMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  h(0, 0) = 2.0;
  EXPECT_LT(max_abs(s.mixed.matrix() - m), 1e-13);
  EXPECT_LT(max_abs(s.holo.matrix() - h), 1e-13);
  const auto f = curvature_slice_in_frame(*flat, z, E);
  EXPECT_EQ(max_abs(f.mixed.matrix()), 0.0);
  const auto p = curvature_slice_in_frame(*cp1xcp1(), z, E);
  m(1, 1) = 0.0;
  EXPECT_LT(max_abs(p.mixed.matrix() - m), 1e-13);
  EXPECT_LT(max_abs(p.holo.matrix() - h), 1e-13);
}

TEST(Modelspace, SliceRejectsNonUnitaryFrame) {
  EXPECT_THROW(curvature_slice_in_frame(*make_flat(2), Point::Zero(2), 2.0 * CMatrix::Identity(2, 2)),
               std::invalid_argument);
}

TEST(Modelspace, BisectionalEstimatorSerialEqualsParallel) {
  const auto c = make_fubini_study(2, 1.0);
  const auto pts = sample_points(*c, 64, 0.8, 5);
  const auto a = bisectional_lower_bound_estimate(*c, pts, 8, 5, Exec::serial);
  const auto b = bisectional_lower_bound_estimate(*c, pts, 8, 5, Exec::parallel);
  EXPECT_EQ(a.min_ratio, b.min_ratio);
  EXPECT_EQ(a.evaluated, b.evaluated);
  EXPECT_NEAR(a.min_ratio, 1.0, 1e-6);
}

TEST(Modelspace, BisectionalEstimatorProductAndFlat) {
  const auto p = cp1xcp1();
  EXPECT_NEAR(bisectional_lower_bound_estimate(*p, sample_points(*p, 32, 0.8, 2), 8, 2).min_ratio,
              0.0, 1e-6);
  const auto f = make_flat(3);
  EXPECT_NEAR(bisectional_lower_bound_estimate(*f, sample_points(*f, 32, 0.8, 2), 8, 2).min_ratio,
              0.0, 1e-8);
}

TEST(Modelspace, HyperbolicDomain) {
  const auto c = make_complex_hyperbolic(2, -1.0);
  EXPECT_TRUE(c->in_domain(pt({0.5, 0.5})));
  EXPECT_FALSE(c->in_domain(pt({0.8, 0.8})));
}

TEST(ChartConfig, RoundTrip) {
  const nlohmann::json j = {{"label", "product"},
                            {"factors", {{{"label", "fubini_study"}, {"n", 1}, {"K", 1.0}},
                                         {{"label", "flat"}, {"n", 2}}}}};
  const auto spec = chart_spec_from_json(j);
  EXPECT_EQ(spec.n, 3);
  const auto back = chart_spec_from_json(to_json(spec));
  EXPECT_EQ(to_json(back), to_json(spec));
  EXPECT_EQ(build_chart(spec)->complex_dim(), 3);
}

TEST(ChartConfig, RejectsBadSpecs) {
  EXPECT_THROW(chart_spec_from_json({{"label", "sphere"}, {"n", 1}}), std::invalid_argument);
  EXPECT_THROW(chart_spec_from_json({{"label", "fubini_study"}, {"n", 1}, {"K", -1.0}}),
               std::invalid_argument);
  EXPECT_THROW(chart_spec_from_json({{"label", "flat"}, {"n", 0}}), std::invalid_argument);
  EXPECT_THROW(chart_spec_from_json({{"label", "product"}, {"factors", nlohmann::json::array()}}),
               std::invalid_argument);
}
