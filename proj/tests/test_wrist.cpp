#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biflex/characterization.hpp"
#include "biflex/wrist.hpp"
#include "test_util.hpp"

using namespace biflex;
using testutil::nominal_geometry;
using testutil::tpu;

TEST(Assemble, TwelveModuleClosedForms) {
  const auto g = testutil::robotiq_geometry();
  const auto mat = tpu();
  const auto resp = module_response(g, mat);
  const auto w = assemble(g, mat);
  const double r = g.ring_radius;
  EXPECT_NEAR(w.rotational_stiffness, 6.0 * resp.k_eq * r * r, 1e-12 * w.rotational_stiffness);
  EXPECT_NEAR(w.buckling.torque, 6.0 * r * resp.f_cr, 1e-12 * w.buckling.torque);
  EXPECT_NEAR(w.buckling.angle, resp.f_cr / (resp.k_eq * r), 1e-12 * w.buckling.angle);
  EXPECT_DOUBLE_EQ(w.plateau_torque, w.buckling.torque);
  EXPECT_NEAR(w.buckling.torque, w.rotational_stiffness * w.buckling.angle,
              1e-12 * w.buckling.torque);
}

TEST(Assemble, RadiusScaling) {
  const auto mat = tpu();
  auto g = testutil::robotiq_geometry();
  const auto w1 = assemble(g, mat);
  g.ring_radius *= 2.0;
  const auto w2 = assemble(g, mat);
  EXPECT_NEAR(w2.buckling.torque, 2.0 * w1.buckling.torque, 1e-12 * w2.buckling.torque);
  EXPECT_NEAR(w2.buckling.angle, 0.5 * w1.buckling.angle, 1e-12 * w2.buckling.angle);
}

// sum_i sin^2(phi_i - axis) = n/2 for evenly spaced modules, any axis, n >= 3.
TEST(Assemble, AxisIndependenceOfRotationalStiffness) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> axis_dist(0.0, 2.0 * units::pi);
  for (int n : {3, 4, 5, 7, 12, 16}) {
    for (int k = 0; k < 64; ++k) {
      const double axis = axis_dist(rng);
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double s = std::sin(2.0 * units::pi * i / n - axis);
        sum += s * s;
      }
      EXPECT_NEAR(sum, n / 2.0, 1e-9 * (n / 2.0)) << "n=" << n;
    }
  }
}

// The closed-form buckling torque (n/2) R f_cr must equal a brute-force
// search over bending-axis orientations for the smallest torque at which any
// module reaches f_cr.
TEST(Assemble, WorstCaseAxisBruteForce) {
  const auto g = testutil::robotiq_geometry();
  const auto mat = tpu();
  const auto resp = module_response(g, mat);
  const auto w = assemble(g, mat);
  const int n = g.n_modules;
  const double r = g.ring_radius;

  std::vector<double> axes;
  for (int k = 0; k < 2048; ++k) axes.push_back(2.0 * units::pi * k / 2048.0);
  for (int i = 0; i < n; ++i) {
    axes.push_back(2.0 * units::pi * i / n + units::pi / 2.0);
    axes.push_back(2.0 * units::pi * i / n - units::pi / 2.0);
  }

  double min_torque = std::numeric_limits<double>::infinity();
  for (const double axis : axes) {
    double s_max = 0.0;
    for (int i = 0; i < n; ++i)
      s_max = std::max(s_max, std::abs(std::sin(2.0 * units::pi * i / n - axis)));
    // First module reaches f_cr at theta = f_cr / (k_eq r s_max); torque there
    // follows from the linear law.
    const double theta = resp.f_cr / (resp.k_eq * r * s_max);
    min_torque = std::min(min_torque, w.rotational_stiffness * theta);
  }
  EXPECT_NEAR(min_torque, w.buckling.torque, 1e-9 * w.buckling.torque);
}

TEST(TorqueLaw, PiecewiseAndContinuous) {
  const auto w = assemble(testutil::robotiq_geometry(), tpu());
  EXPECT_DOUBLE_EQ(torque_at(w, 0.0), 0.0);
  const double tb = w.buckling.angle;
  EXPECT_NEAR(torque_at(w, tb), w.buckling.torque, 1e-12 * w.buckling.torque);
  EXPECT_DOUBLE_EQ(torque_at(w, 2.0 * tb), w.plateau_torque);
  // continuity across the transition
  EXPECT_NEAR(torque_at(w, tb * (1.0 + 1e-12)), torque_at(w, tb * (1.0 - 1e-12)),
              1e-9 * w.buckling.torque);
  // monotone non-decreasing
  double prev = -1.0;
  for (int i = 0; i <= 400; ++i) {
    const double tau = torque_at(w, 3.0 * tb * i / 400.0);
    EXPECT_GE(tau, prev);
    prev = tau;
  }
  EXPECT_THROW(torque_at(w, -0.1), std::invalid_argument);
}

TEST(PredictedCurve, SamplingAndSelfConsistency) {
  const auto w = assemble(testutil::robotiq_geometry(), tpu());
  const auto curve = predicted_curve(w, 2.5 * w.buckling.angle, 200);
  ASSERT_EQ(curve.samples.size(), 200u);
  for (std::size_t i = 1; i < curve.samples.size(); ++i)
    EXPECT_GT(curve.samples[i].angle, curve.samples[i - 1].angle);

  // Feeding the prediction back through the extraction recovers the planted
  // buckling point well inside 2% angle / 1% torque.
  const auto rep = extract_buckling_point(curve);
  EXPECT_NEAR(rep.extracted.angle, w.buckling.angle, 0.02 * w.buckling.angle);
  EXPECT_NEAR(rep.extracted.torque, w.buckling.torque, 0.01 * w.buckling.torque);

  EXPECT_THROW(predicted_curve(w, 0.0, 100), std::invalid_argument);
  EXPECT_THROW(predicted_curve(w, 0.1, 3), std::invalid_argument);
}

TEST(PredictedCurve, RigidBaselineIsNearVertical) {
  const auto rigid = WristModel::rigid_baseline(2.0e4);
  const auto curve = predicted_curve(rigid, units::deg_to_rad(1.0), 16);
  EXPECT_GT(curve.samples.back().torque, 100.0);
  EXPECT_DOUBLE_EQ(torque_at(rigid, 1.0), 2.0e4);
}

TEST(TipDeflection, TableAngleLimits) {
  // asin(10 mm / length): 135 -> 4.25 deg, 155 -> 3.70 deg, 205 -> 2.80 deg.
  EXPECT_NEAR(units::rad_to_deg(angle_limit_for(testutil::franka_gripper(), 0.010)), 4.20, 0.1);
  EXPECT_NEAR(units::rad_to_deg(angle_limit_for(testutil::robotiq_gripper(), 0.010)), 3.70, 0.1);
  EXPECT_NEAR(units::rad_to_deg(angle_limit_for(testutil::bariflex_gripper(), 0.010)), 2.80, 0.1);
  EXPECT_THROW(angle_limit_for(testutil::franka_gripper(), 0.0), std::invalid_argument);
  EXPECT_THROW(angle_limit_for(testutil::franka_gripper(), 0.2), std::invalid_argument);
}

// Fitting (E, R) to the designed targets puts the assembled buckling point
// inside the 10% tolerance box by construction.
TEST(Assemble, CalibratedModelLandsInsideToleranceBox) {
  DesignTargets targets;
  targets.buckling_torque = 1.325;
  targets.buckling_angle_limit = units::deg_to_rad(3.70);
  const BucklingPoint designed{targets.buckling_angle_limit, targets.buckling_torque};
  const auto cal = calibrate({{testutil::robotiq_geometry(), designed, "robotiq"}}, tpu(),
                             {CalibParam::young_modulus, CalibParam::ring_radius});
  auto g = testutil::robotiq_geometry();
  g.ring_radius = cal.ring_radius;
  g.boundary_factor = cal.boundary_factor;
  const auto w = assemble(g, cal.material);
  EXPECT_TRUE(check_tolerance(w.buckling, targets).in_tolerance);
  EXPECT_NEAR(w.buckling.torque, 1.325, 1e-9);
  EXPECT_NEAR(units::rad_to_deg(w.buckling.angle), 3.70, 1e-9);
}

TEST(TipDeflection, LinearRegimeAndPostBucklingFlag) {
  const auto w = assemble(testutil::robotiq_geometry(), tpu());
  const auto grip = testutil::robotiq_gripper();
  const auto zero = tip_deflection(w, grip, 0.0);
  EXPECT_DOUBLE_EQ(zero.deflection, 0.0);
  EXPECT_FALSE(zero.post_buckling);

  const auto half = tip_deflection(w, grip, 0.5 * w.buckling.torque);
  EXPECT_NEAR(half.wrist_angle, 0.5 * w.buckling.angle, 1e-12);
  EXPECT_NEAR(half.deflection, grip.length * std::sin(half.wrist_angle), 1e-15);

  const auto beyond = tip_deflection(w, grip, 2.0 * w.buckling.torque);
  EXPECT_TRUE(beyond.post_buckling);
  EXPECT_NEAR(beyond.wrist_angle, w.buckling.angle, 1e-15);
}
