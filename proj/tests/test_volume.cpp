#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kahler/volume.hpp"

using namespace kahler;
using namespace kahler::volume;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(Volume, ScalarCurvatureOfSpaceForms) {
  model::Point z(2);
  z << cplx(0.3, 0.2), cplx(-0.1, 0.5);
  EXPECT_NEAR(scalar_curvature_at(*model::make_fubini_study(2, 1.0), z), 6.0, 1e-11);
  EXPECT_NEAR(scalar_curvature_at(*model::make_complex_hyperbolic(2, -1.0), z), -6.0, 1e-11);
  EXPECT_NEAR(scalar_curvature_at(*model::make_flat(2), z), 0.0, 1e-15);
}

TEST(Volume, ChernFactors) {
  const auto a = chern_factor(*model::make_fubini_study(1, 1.0));
  EXPECT_NEAR(a.lambda, 2.0, 1e-10);
  EXPECT_EQ(a.sign, 1);
  EXPECT_TRUE(a.constant);
  EXPECT_NEAR(chern_factor(*model::make_fubini_study(2, 1.0)).lambda, 3.0, 1e-10);
  const auto h = chern_factor(*model::make_complex_hyperbolic(2, -1.0));
  EXPECT_EQ(h.sign, -1);
  EXPECT_NEAR(h.lambda, 3.0, 1e-10);
  EXPECT_THROW(chern_factor_from_scalar(0.0, 2), std::invalid_argument);
}

TEST(Volume, ChernFactorScalesInversely) {
  // c·ω has Ric unchanged, so λ becomes λ/c
  const double c = 2.5;
  const auto s = chern_factor(*model::make_fubini_study(2, 1.0 / c));
  EXPECT_NEAR(s.lambda, 3.0 / c, 1e-10);
}

TEST(Volume, ChernFactorIsInvariantUnderUnitaryChange) {
  const double th = 0.4;
  const auto rotated = std::make_shared<model::PotentialChart>(
      2,
      [th](const model::Point& z) {
        const cplx w0 = std::cos(th) * z(0) - std::sin(th) * z(1);
        const cplx w1 = std::sin(th) * z(0) + std::cos(th) * z(1);
        return std::log(1.0 + std::norm(w0) + std::norm(w1));
      },
      [](const model::Point&) { return true; }, 1e-2, "rotated_fs");
  const auto f = chern_factor(*rotated, 4, 3);
  EXPECT_NEAR(f.lambda, 3.0, 1e-3);
  EXPECT_EQ(f.sign, 1);
}

TEST(Volume, FormulaAndBaseVolumes) {
  EXPECT_NEAR(base_volume(1), 4 * kPi, 1e-13);
  EXPECT_NEAR(base_volume(2), 18 * kPi * kPi, 1e-12);
  EXPECT_NEAR(base_volume(3), 512 * kPi * kPi * kPi / 6, 1e-10);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(formula_volume(n, 1.0) / base_volume(n), 1.0, 1e-15);
  EXPECT_NEAR(formula_volume(1, 2.0), 2 * kPi, 1e-14);
  EXPECT_NEAR(model_volume_for_scalar(2, 6.0), formula_volume(2, 3.0), 1e-10);
}

TEST(Volume, QuadratureMatchesClosedForms) {
  EXPECT_NEAR(volume_quadrature(*model::make_fubini_study(1, 0.5)), 4 * kPi, 1e-9);
  EXPECT_NEAR(volume_quadrature(*model::make_fubini_study(1, 1.0)), 2 * kPi, 1e-9);
  EXPECT_NEAR(volume_quadrature(*model::make_flat(1)), 2 * kPi, 1e-9);  // 2·area of the unit disk
  const auto prod =
      model::make_product({model::make_fubini_study(1, 1.0), model::make_fubini_study(1, 1.0)});
  EXPECT_NEAR(volume_quadrature(*prod), 4 * kPi * kPi, 1e-8);
  EXPECT_NEAR(volume_quadrature(*model::make_fubini_study(2, 1.0)) / formula_volume(2, 3.0), 1.0,
              1e-5);
}

TEST(Volume, QuadratureRejectsUnsupportedCharts) {
  EXPECT_THROW(volume_quadrature(*model::make_complex_hyperbolic(1, -1.0)), std::invalid_argument);
}

TEST(Volume, QuadratureSerialEqualsParallel) {
  const auto c = model::make_fubini_study(2, 1.0);
  QuadratureOptions s, p;
  s.exec = Exec::serial;
  p.exec = Exec::parallel;
  EXPECT_EQ(volume_quadrature(*c, s), volume_quadrature(*c, p));
}

TEST(Volume, ScalingLaw) {
  const auto r = scaling_law_check(2, {0.5, 1.0, 3.0, 7.0}, true);
  EXPECT_LT(r.formula_spread, 1e-12);
  EXPECT_LT(r.quadrature_spread, 1e-5);
  EXPECT_LT(r.mixed_deviation, 1e-5);
  EXPECT_TRUE(scaling_law_check(3, {1.0, 2.0}, false).quadrature.empty());
}

TEST(Volume, BandVerdicts) {
  const double V = formula_volume(2, 3.0);
  const auto eq = comparison_verdict(2, 6.0, 6.0, V);
  EXPECT_TRUE(eq.holds);
  EXPECT_TRUE(eq.lower_equal && eq.upper_equal);
  EXPECT_NE(eq.message.find("rigidity"), std::string::npos);
  const auto strict = comparison_verdict(2, 3.0, 9.0, V);
  EXPECT_TRUE(strict.holds);
  EXPECT_FALSE(strict.lower_equal || strict.upper_equal);
  EXPECT_EQ(strict.message, "strict inequalities");
  const auto out = comparison_verdict(2, 7.0, 9.0, V);
  EXPECT_FALSE(out.holds);
  EXPECT_FALSE(out.upper_holds);
  EXPECT_THROW(comparison_verdict(2, 9.0, 3.0, V), std::invalid_argument);
  EXPECT_THROW(comparison_verdict(4, 1.0, 2.0, V), std::invalid_argument);
}

TEST(Volume, ReportOnCP1) {
  const auto r = volume_report(*model::make_fubini_study(1, 0.5), 1.0, 1.0);
  EXPECT_NEAR(r.V_formula, 4 * kPi, 1e-13);
  EXPECT_LT(r.relative_error, 1e-9);
  EXPECT_TRUE(r.band.holds);
  EXPECT_THROW(volume_report(*model::make_flat(1), 1.0, 2.0), std::invalid_argument);
}

TEST(Volume, BandCsv) {
  std::ostringstream os;
  write_band_csv(os, 1, 1.0, 3.0, 3, 4 * kPi);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,V_k,V");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
