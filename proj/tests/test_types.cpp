#include <gtest/gtest.h>

#include <cstring>

#include "biflex/config.hpp"
#include "biflex/csv.hpp"
#include "biflex/types.hpp"
#include "test_util.hpp"

using namespace biflex;

namespace {

json minimal_config() {
  return json::parse(R"({
    "material": {"name": "TPU-95A", "young_modulus_mpa": 26.0},
    "geometry": {"b_mm": 1.0, "b_c_mm": 1.0, "L_mm": 20.0, "h_c_mm": 3.0,
                 "H_mm": 8.0, "gamma_deg": 20.0}
  })");
}

}  // namespace

TEST(Config, ParsesUnitsIntoSi) {
  const Config cfg = parse_config(minimal_config());
  EXPECT_DOUBLE_EQ(cfg.geometry.b, 0.001);
  EXPECT_NEAR(cfg.geometry.gamma, 0.3490658503988659, 1e-15);
  EXPECT_DOUBLE_EQ(cfg.material.young_modulus, 26.0e6);
  EXPECT_EQ(cfg.geometry.n_modules, 12);
  EXPECT_DOUBLE_EQ(cfg.geometry.ring_radius, 0.030);
  EXPECT_DOUBLE_EQ(cfg.geometry.boundary_factor, 1.0);
  EXPECT_FALSE(cfg.gripper.has_value());
  EXPECT_FALSE(cfg.targets.has_value());
}

TEST(Config, TargetsDefaultsApplied) {
  json j = minimal_config();
  j["targets"] = {{"buckling_torque_nm", 1.325}, {"buckling_angle_limit_deg", 3.70}};
  const Config cfg = parse_config(j);
  ASSERT_TRUE(cfg.targets.has_value());
  EXPECT_DOUBLE_EQ(cfg.targets->torque_tolerance, 0.10);
  EXPECT_DOUBLE_EQ(cfg.targets->tip_deflection_limit, 0.010);
  EXPECT_DOUBLE_EQ(cfg.targets->payload, 0.500);
}

TEST(Config, SingularGammaRejected) {
  json j = minimal_config();
  j["geometry"]["gamma_deg"] = 90.0;
  try {
    parse_config(j);
    FAIL() << "expected parse_error";
  } catch (const parse_error& e) {
    EXPECT_NE(std::strstr(e.what(), "gamma_deg"), nullptr);
    EXPECT_NE(std::strstr(e.what(), "90"), nullptr);
  }
}

TEST(Config, NonPositiveFieldRejectedWithNameAndValue) {
  json j = minimal_config();
  j["geometry"]["b_mm"] = 0.0;
  try {
    parse_config(j);
    FAIL() << "expected parse_error";
  } catch (const parse_error& e) {
    EXPECT_NE(std::strstr(e.what(), "geometry.b_mm"), nullptr);
    EXPECT_NE(std::strstr(e.what(), "0"), nullptr);
  }
}

TEST(Config, UnknownKeyRejectedNotesAllowed) {
  json j = minimal_config();
  j["geometry"]["notes"] = "fine";
  EXPECT_NO_THROW(parse_config(j));
  j["geometry"]["b_m"] = 1.0;
  EXPECT_THROW(parse_config(j), parse_error);
}

TEST(Config, MissingFileIsParseError) {
  EXPECT_THROW(load_config("/nonexistent/biflex.json"), parse_error);
}

TEST(Config, RoundTripIsBitExact) {
  json j = minimal_config();
  j["gripper"] = {{"name", "Robotiq 2F-85"}, {"mass_kg", 1.10}, {"length_mm", 155.0}};
  j["targets"] = {{"buckling_torque_nm", 1.325}, {"buckling_angle_limit_deg", 3.70}};
  j["solver"] = {{"b_min_mm", 0.5}};
  j["sim"] = {{"safety_force_n", 15.0}};
  const Config a = parse_config(j);
  const Config b = parse_config(serialize(a));
  EXPECT_EQ(serialize(a), serialize(b));
  EXPECT_TRUE(testutil::geometry_identical(a.geometry, b.geometry));
  EXPECT_EQ(a.material.young_modulus, b.material.young_modulus);
  ASSERT_TRUE(b.targets && b.gripper);
  EXPECT_EQ(a.targets->buckling_angle_limit, b.targets->buckling_angle_limit);
  EXPECT_EQ(a.gripper->length, b.gripper->length);
  EXPECT_EQ(a.solver.b_min, b.solver.b_min);
  EXPECT_EQ(a.sim.safety_force, b.sim.safety_force);
}

TEST(Validate, NominalGeometryPasses) {
  const auto rep = validate(testutil::robotiq_geometry());
  EXPECT_TRUE(rep.ok());
  for (const auto& c : rep.checks) EXPECT_NE(c.status, CheckStatus::warn) << c.name;
}

TEST(Validate, DegenerateWidthFails) {
  auto g = testutil::robotiq_geometry();
  g.b = 0.0;
  const auto rep = validate(g);
  EXPECT_FALSE(rep.ok());
  bool found = false;
  for (const auto& f : rep.failures())
    if (f.find("b must be positive") != std::string::npos) found = true;
  EXPECT_TRUE(found);
}

TEST(Validate, TallModuleWarnsAboutBudget) {
  auto g = testutil::robotiq_geometry();
  g.H = 0.030;
  const auto rep = validate(g);
  EXPECT_TRUE(rep.ok());  // warning, not error
  bool warned = false;
  for (const auto& c : rep.checks)
    if (c.status == CheckStatus::warn && c.message.find("21 mm") != std::string::npos)
      warned = true;
  EXPECT_TRUE(warned);
}

TEST(CurveCsv, ParseAndRoundTrip) {
  const std::string text = "angle_deg,torque_Nm\n0.5,0.1\n1,0.2\n2.5,0.45\n4,0.5\n";
  const auto curve = parse_curve_csv(text, "inline");
  ASSERT_EQ(curve.samples.size(), 4u);
  EXPECT_NEAR(curve.samples[0].angle, units::deg_to_rad(0.5), 1e-15);
  EXPECT_DOUBLE_EQ(curve.samples[2].torque, 0.45);

  const auto again = parse_curve_csv(curve_to_csv(curve), "roundtrip");
  ASSERT_EQ(again.samples.size(), curve.samples.size());
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    EXPECT_NEAR(again.samples[i].angle, curve.samples[i].angle, 1e-15);
    EXPECT_EQ(again.samples[i].torque, curve.samples[i].torque);
  }
}

TEST(CurveCsv, AcceptsCrlfAndExtraColumns) {
  const std::string text = "angle_deg,torque_Nm,fit_Nm\r\n1,0.1,0.0\r\n2,0.2,0.1\r\n";
  const auto curve = parse_curve_csv(text, "inline");
  EXPECT_EQ(curve.samples.size(), 2u);
}

TEST(CurveCsv, RejectsBadHeaderAndNonIncreasingAngles) {
  EXPECT_THROW(parse_curve_csv("angle,torque\n1,2\n", "x"), parse_error);
  EXPECT_THROW(parse_curve_csv("angle_deg,torque_Nm\n2,0.1\n2,0.2\n", "x"), parse_error);
  EXPECT_THROW(parse_curve_csv("angle_deg,torque_Nm\n1,abc\n", "x"), parse_error);
  EXPECT_THROW(parse_curve_csv("angle_deg,torque_Nm\n", "x"), parse_error);
}

TEST(Tolerance, BoxVerdict) {
  DesignTargets t;
  t.buckling_torque = 1.0;
  t.buckling_angle_limit = units::deg_to_rad(4.0);
  EXPECT_TRUE(check_tolerance({units::deg_to_rad(3.5), 1.05}, t).in_tolerance);
  EXPECT_FALSE(check_tolerance({units::deg_to_rad(3.5), 1.2}, t).in_tolerance);   // torque out
  EXPECT_FALSE(check_tolerance({units::deg_to_rad(4.5), 1.0}, t).in_tolerance);   // angle out
}
