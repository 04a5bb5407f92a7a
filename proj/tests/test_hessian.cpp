#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kahler/hessian.hpp"

using namespace kahler;
using namespace kahler::hessian;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

const model::ChartSpec kC2{"flat", 2, 0.0, {}};
const model::ChartSpec kCP1{"fubini_study", 1, 1.0, {}};
const model::ChartSpec kCP2{"fubini_study", 2, 1.0, {}};

SweepConfig config(model::ChartSpec space, double Kb, SubmanifoldSpec spec, std::vector<double> t) {
  SweepConfig c;
  c.space = std::move(space);
  c.K_bound = Kb;
  c.spec = std::move(spec);
  c.t_grid = std::move(t);
  return c;
}

RadialSetup cp2_setup(const SubmanifoldSpec& spec, double t_max) {
  return radial_setup(model::build_chart(kCP2), spec, Point::Zero(2), CVector::Unit(2, 0), t_max, 1e-3);
}

}  // namespace

TEST(BoundFunctions, FlatValues) {
  const auto b = bound_functions(0.0, 2.0);
  EXPECT_DOUBLE_EQ(b.F, 0.5);
  EXPECT_DOUBLE_EQ(b.G, -0.5);
  EXPECT_DOUBLE_EQ(b.H, 0.0);
}

TEST(BoundFunctions, PositiveCurvature) { EXPECT_NEAR(bound_functions(2.0, kPi / 4).F, 1.0, 1e-14); }

TEST(BoundFunctions, ContinuousAtZeroCurvature) {
  for (double K : {1e-12, -1e-12}) {
    const auto b = bound_functions(K, 1.0);
    EXPECT_NEAR(b.F, 1.0, 1e-9);
    EXPECT_NEAR(b.G, -1.0, 1e-9);
    EXPECT_NEAR(b.H, 0.0, 1e-9);
  }
}

TEST(BoundFunctions, RejectsBeyondDiameter) {
  EXPECT_THROW(bound_functions(1.0, 3.0), std::invalid_argument);
  EXPECT_THROW(bound_functions(1.0, 0.0), std::invalid_argument);
}

TEST(Seed, PointAndSubvariety) {
  const auto s = riccati_seed(2, SubmanifoldSpec::point(), 1e-3);
  EXPECT_NEAR(s.mixed(0, 0).real(), 500.0, 1e-9);
  EXPECT_NEAR(s.mixed(1, 1).real(), 1000.0, 1e-9);
  EXPECT_NEAR(s.holo(0, 0).real(), -500.0, 1e-9);
  EXPECT_EQ(std::abs(s.holo(1, 1)), 0.0);
  const auto v = riccati_seed(3, SubmanifoldSpec::subvariety({2}), 1e-3);
  EXPECT_NEAR(v.mixed(1, 1).real(), 1000.0, 1e-9);
  EXPECT_EQ(std::abs(v.mixed(2, 2)), 0.0);
  EXPECT_NEAR(first_column_residual(s), 0.0, 1e-12);
}

TEST(Bound, Values) {
  const auto f = bound_at(0.0, 1.0, 2, SubmanifoldSpec::point());
  EXPECT_NEAR(f.bound_mixed(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(f.bound_mixed(1, 1).real(), 1.0, 1e-15);
  const auto s = bound_at(1.0, kPi / (2 * kSqrt2), 2, SubmanifoldSpec::subvariety({1}));
  EXPECT_NEAR(s.bound_mixed(0, 0).real(), 0.0, 1e-14);
  EXPECT_NEAR(s.bound_mixed(1, 1).real(), -1.0 / kSqrt2, 1e-14);
  const double t = 1e-6;
  const auto z = bound_at(1.0, t, 3, SubmanifoldSpec::point());
  EXPECT_NEAR(t * z.bound_mixed(0, 0).real(), 0.5, 1e-9);
  EXPECT_NEAR(t * z.bound_mixed(2, 2).real(), 1.0, 1e-9);
}

TEST(Verdict, ConstructedViolation) {
  const auto b = bound_at(0.0, 1.0, 2, SubmanifoldSpec::point());
  CMatrix m = b.bound_mixed.matrix();
  m(0, 0) += 0.01;
  HessianPair p{1.0, HermitianMatrix(m), SymmetricComplexMatrix::zero(2)};
  TolerancePolicy tol;
  tol.psd_slack = 1e-6;
  const auto v = verdict(p, b, tol);
  EXPECT_FALSE(v.holds);
  EXPECT_NEAR(v.gap_min_eigenvalue, -0.01, 1e-12);
}

TEST(Evolve, FlatClosedForm) {
  const auto setup = radial_setup(model::build_chart(kC2), SubmanifoldSpec::point(), Point::Zero(2),
                                  CVector::Unit(2, 0), 3.1, 1e-3);
  const auto ev = evolve_hessian(setup, {0.5, 1.0, 3.0});
  ASSERT_EQ(ev.pairs.size(), 3u);
  for (const auto& p : ev.pairs) {
    EXPECT_NEAR(p.mixed(0, 0).real(), 0.5 / p.t, 1e-6);
    EXPECT_NEAR(p.mixed(1, 1).real(), 1.0 / p.t, 1e-6);
    EXPECT_NEAR(p.holo(0, 0).real(), -0.5 / p.t, 1e-6);
  }
  EXPECT_LT(ev.max_constraint_residual, 1e-6);
}

TEST(Evolve, SeedInsensitivity) {
  const auto setup = cp2_setup(SubmanifoldSpec::point(), 1.6);
  EvolveOptions a, b;
  b.eps = 5e-4;
  const auto ea = evolve_hessian(setup, {1.5}, a), eb = evolve_hessian(setup, {1.5}, b);
  EXPECT_LT(max_abs(ea.pairs[0].mixed.matrix() - eb.pairs[0].mixed.matrix()), 1e-6);
}

TEST(Evolve, ObservedOrderNearFour) {
  EvolveOptions o;
  o.check_order = true;
  const auto ev = evolve_hessian(cp2_setup(SubmanifoldSpec::point(), 1.6), {1.5}, o);
  ASSERT_TRUE(ev.observed_order.has_value());
  EXPECT_GT(*ev.observed_order, 3.0);
}

TEST(Evolve, SetupStopsAtChartBoundary) {
  // the antipodal cut locus of the origin sits at infinity in this chart
  EXPECT_THROW(cp2_setup(SubmanifoldSpec::point(), 2.3), std::runtime_error);
}

TEST(FiniteDifferenceOracle, FlatClosedForm) {
  const auto chart = model::build_chart(kC2);
  Point z = Point::Zero(2);
  z(0) = 1.0;
  const auto r = distance_field(chart, SubmanifoldSpec::point(), Point::Zero(2));
  const CVector v = geodesy::unit_tangent(*chart, z, CVector::Unit(2, 0));
  const CMatrix E = geodesy::adapted_frame(*chart, z, v);
  const auto p = fd_hessian_oracle(*chart, r, z, E, 1e-4);
  EXPECT_NEAR(p.mixed(0, 0).real(), 1.0 / (2 * kSqrt2), 1e-6);
  EXPECT_NEAR(p.mixed(1, 1).real(), 1.0 / kSqrt2, 1e-6);
  EXPECT_NEAR(p.holo(0, 0).real(), -1.0 / (2 * kSqrt2), 1e-6);
  EXPECT_NEAR(std::abs(p.holo(1, 1)), 0.0, 1e-6);
}

TEST(JacobiOracle, AgreesWithRiccatiOnCP2) {
  const auto setup = cp2_setup(SubmanifoldSpec::subvariety({1}), 1.9);
  const std::vector<double> t{0.3, 1.0, 1.8};
  const auto ev = evolve_hessian(setup, t);
  const auto jr = jacobi_oracle(setup, t);
  ASSERT_EQ(jr.pairs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_LT(relative_deviation(ev.pairs[i].mixed.matrix(), jr.pairs[i].mixed.matrix()), 1e-5);
}

TEST(Sweep, SerialEqualsParallel) {
  auto c = config(kCP2, 1.0, SubmanifoldSpec::point(), {0.2, 0.7, 1.2, 1.7});
  c.with_jacobi = false;
  c.exec = Exec::serial;
  const auto a = run_sweep(c);
  c.exec = Exec::parallel;
  const auto b = run_sweep(c);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Sweep, ProductIsStrictInRadialDirection) {
  const model::ChartSpec prod{"product", 2, 0.0, {kCP1, kCP1}};
  const auto r = run_sweep(config(prod, 0.0, SubmanifoldSpec::point(), {1.0}));
  ASSERT_TRUE(r.all_hold);
  const auto& row = r.rows.front();
  // factor-2 direction matches the flat bound; the radial entry is strictly below it
  EXPECT_NEAR(row.riccati.mixed(1, 1).real(), 1.0, 1e-6);
  const double radial = 0.5 - (1.0 / kSqrt2) / std::tan(kSqrt2);
  EXPECT_NEAR(row.bound.bound_mixed(0, 0).real() - row.riccati.mixed(0, 0).real(), radial, 5e-3);
  EXPECT_GT(row.verdicts.front().gap_max_eigenvalue, 0.05);
  EXPECT_FALSE(equality_probe(config(prod, 0.0, SubmanifoldSpec::point(), {1.0})).equality);
}

TEST(Sweep, EqualityProbeOnModel) {
  const auto e = equality_probe(config(kCP2, 1.0, SubmanifoldSpec::subvariety({1}), {0.5, 1.0, 1.5}));
  EXPECT_TRUE(e.equality);
  EXPECT_LT(e.max_abs_gap, 1e-5);
  EXPECT_LT(e.max_slice_mixed_deviation, 1e-8);
}

TEST(Sweep, HyperbolicSatisfiesItsBound) {
  const model::ChartSpec ch{"complex_hyperbolic", 2, -1.0, {}};
  const auto r = run_sweep(config(ch, -1.0, SubmanifoldSpec::point(), {0.5, 1.0, 2.0}));
  EXPECT_TRUE(r.all_hold);
  EXPECT_LT(r.oracle_spread, 1e-4);
}

TEST(Sweep, CsvColumns) {
  const auto r = run_sweep(config(kC2, 0.0, SubmanifoldSpec::point(), {1.0}));
  std::ostringstream os;
  write_sweep_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,F,G,H,riccati_b0,riccati_b1,gap_min,gap_max");
}

TEST(RadialSetup, RejectsDirectionTangentToS) {
  EXPECT_THROW(radial_setup(model::build_chart(kCP2), SubmanifoldSpec::subvariety({0}), Point::Zero(2),
                            CVector::Unit(2, 0), 1.0, 1e-3),
               std::invalid_argument);
  EXPECT_THROW(riccati_seed(2, SubmanifoldSpec::subvariety({0, 1}), 1e-3), std::invalid_argument);
}
