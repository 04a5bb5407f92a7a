#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "kahler/geodesy.hpp"

using namespace kahler;
using namespace kahler::geodesy;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

CVector hom(std::initializer_list<cplx> v) {
  CVector p(static_cast<int>(v.size()));
  int i = 0;
  for (auto x : v) p(i++) = x;
  return p;
}

}  // namespace

TEST(Geodesy, FlatStraightLine) {
  const auto c = model::make_flat(2);
  const CVector v = unit_tangent(*c, Point::Zero(2), CVector::Unit(2, 0));
  EXPECT_NEAR(std::abs(v(0)), 1.0 / kSqrt2, 1e-15);
  const auto path = integrate_geodesic(c, Point::Zero(2), v, 2.0, 0.01);
  for (const auto& s : path.samples) EXPECT_LT((s.z - s.t * v).norm(), 1e-12);
}

TEST(Geodesy, FubiniStudyRealAxis) {
  const auto c = model::make_fubini_study(1, 1.0);
  const CVector v = unit_tangent(*c, Point::Zero(1), CVector::Ones(1));
  const auto path = integrate_geodesic(c, Point::Zero(1), v, 2.0, 1e-3);
  double err = 0.0;
  for (const auto& s : path.samples) err = std::max(err, std::abs(s.z(0) - std::tan(s.t / kSqrt2)));
  EXPECT_LT(err, 1e-9);
  EXPECT_LT(speed_defect(path), 1e-12);
}

TEST(Geodesy, RejectsNonUnitVelocity) {
  const auto c = model::make_flat(1);
  EXPECT_THROW(integrate_geodesic(c, Point::Zero(1), CVector::Ones(1), 1.0, 0.01),
               std::invalid_argument);
}

TEST(Geodesy, TransportOnGenericCP2Geodesic) {
  const auto c = model::make_fubini_study(2, 1.0);
  Point z0(2);
  z0 << cplx(0.3, -0.1), cplx(0.2, 0.4);
  CVector d(2);
  d << cplx(0.7, 0.2), cplx(-0.4, 0.9);
  const CVector v = unit_tangent(*c, z0, d);
  const auto path = integrate_geodesic(c, z0, v, 2.0, 1e-3);
  const auto frame = parallel_transport_frame(path, adapted_frame(*c, z0, v));
  double worst = 0.0;
  for (std::size_t k = 0; k < path.samples.size(); ++k)
    worst = std::max(worst, model::unitarity_defect(c->metric_raw(path.samples[k].z), frame.at(k)));
  EXPECT_LT(worst, 1e-8);
  // e_1 stays √2 v
  for (std::size_t k = 0; k < path.samples.size(); k += 100)
    EXPECT_LT((frame.at(k).col(0) - kSqrt2 * path.samples[k].velocity).norm(), 1e-9);
  EXPECT_LT(parallelism_residual(path, frame), 1e-6 * 1e-3 * 10.0);
}

TEST(Geodesy, FlatFrameIsConstant) {
  const auto c = model::make_flat(2);
  const CVector v = unit_tangent(*c, Point::Zero(2), CVector::Ones(2));
  const auto path = integrate_geodesic(c, Point::Zero(2), v, 1.0, 0.01);
  const auto frame = parallel_transport_frame(path, adapted_frame(*c, Point::Zero(2), v));
  EXPECT_LT(max_abs(frame.frames.back() - frame.frames.front()), 1e-14);
}

TEST(Geodesy, StateAtMatchesSamples) {
  const auto c = model::make_fubini_study(2, 1.0);
  const CVector v = unit_tangent(*c, Point::Zero(2), CVector::Unit(2, 0));
  const auto path = integrate_geodesic(c, Point::Zero(2), v, 1.0, 1e-3);
  const auto frame = parallel_transport_frame(path, adapted_frame(*c, Point::Zero(2), v));
  const auto st = state_at(path, frame, 0.5005);
  EXPECT_NEAR(st.z(0).real(), std::tan(0.5005 / kSqrt2), 1e-10);
  EXPECT_THROW(state_at(path, frame, 2.0), std::out_of_range);
}

TEST(Geodesy, PathCsvHeader) {
  const auto c = model::make_flat(1);
  const auto path = integrate_geodesic(c, Point::Zero(1), unit_tangent(*c, Point::Zero(1), CVector::Ones(1)), 0.1, 0.05);
  std::ostringstream os;
  write_path_csv(os, path);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,re_z0,im_z0");
}

TEST(Geodesy, DistanceFsClosedForms) {
  EXPECT_NEAR(distance_fs(1, 1.0, hom({1, 2}), hom({1, 2})), 0.0, 1e-15);
  EXPECT_NEAR(distance_fs(1, 1.0, hom({1, 0}), hom({0, 1})), kPi / kSqrt2, 1e-15);
  EXPECT_NEAR(distance_fs(2, 1.0, hom({1, 0, 0}), hom({1, 1, 0})), kSqrt2 * kPi / 4.0, 1e-15);
  EXPECT_THROW(distance_fs(2, 1.0, hom({1, 0}), hom({1, 1})), std::invalid_argument);
}

TEST(Geodesy, SubspaceDistances) {
  const auto a = distance_to_subspace(1, 1.0, 0, hom({1, 0}));
  EXPECT_NEAR(a.r_P, 0.0, 1e-15);
  EXPECT_NEAR(a.r_Q, kPi / kSqrt2, 1e-15);
  const auto b = distance_to_subspace(1, 1.0, 0, hom({1, 1}));
  EXPECT_NEAR(b.r_P, kPi / (2 * kSqrt2), 1e-15);
  EXPECT_NEAR(b.r_Q, kPi / (2 * kSqrt2), 1e-15);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 50; ++i) {
    CVector xi(5);
    for (int k = 0; k < 5; ++k) xi(k) = cplx(nd(rng), nd(rng));
    const auto d = distance_to_subspace(4, 1.0, 2, xi);
    EXPECT_NEAR(d.r_P + d.r_Q, kPi / kSqrt2, 1e-12);
  }
}

TEST(Geodesy, ShootingMatchesClosedForm) {
  const auto flat = model::make_flat(2);
  Point a(2), b(2);
  a << cplx(0.1, 0.2), 0.3;
  b << cplx(-0.5, 0.1), cplx(0.2, 0.6);
  EXPECT_NEAR(distance_oracle(*flat, a, b).distance, kSqrt2 * (b - a).norm(), 1e-9);
  const auto cp1 = model::make_fubini_study(1, 1.0);
  Point o = Point::Zero(1), w(1);
  w << 0.8;
  EXPECT_NEAR(distance_oracle(*cp1, o, w).distance, kSqrt2 * std::atan(0.8), 1e-9);
  const auto s = fs_distance_by_shooting(2, 1.0, hom({1, 0, 0}), hom({1, 1, 0}));
  EXPECT_NEAR(s.distance, kSqrt2 * kPi / 4.0, 1e-9);
}

TEST(Geodesy, ShootingRandomPairsCP2) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 5; ++i) {
    CVector x(3), y(3);
    for (int k = 0; k < 3; ++k) {
      x(k) = cplx(nd(rng), nd(rng));
      y(k) = cplx(nd(rng), nd(rng));
    }
    EXPECT_NEAR(fs_distance_by_shooting(2, 1.0, x, y).distance, distance_fs(2, 1.0, x, y), 1e-9);
  }
}

TEST(Geodesy, HomogeneousRoundTrip) {
  Point z(2);
  z << cplx(0.3, 0.1), cplx(-2.0, 0.5);
  EXPECT_LT((homogeneous_to_chart(0.5, chart_to_homogeneous(0.5, z)) - z).norm(), 1e-14);
}
