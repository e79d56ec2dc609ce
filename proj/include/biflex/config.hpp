#pragma once

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>

#include <json.hpp>

#include "biflex/csv.hpp"
#include "biflex/types.hpp"
#include "biflex/units.hpp"

namespace biflex {

using json = nlohmann::ordered_json;

struct SolverSettings {
  double b_min = 0.4e-3;  // m
  double b_max = 2.0e-3;  // m
  double gamma_min = 0.0;
  double gamma_max = units::deg_to_rad(60.0);
  int grid_resolution = 200;
  double torque_refine_tol = 1e-3;  // relative torque error target for refinement
};

struct SimSettings {
  double safety_force = 15.0;                 // N
  double sponge_stiffness = 3000.0;           // N/m
  double sponge_travel = 5.0e-3;              // m
  double residual_stiffness = 1400.0;         // N/m
  double approach_depth = 1.0e-3;             // m
  double rigid_rotational_stiffness = 2.0e4;  // N*m/rad, rigid-wrist stand-in
  double rigid_contact_stiffness = 2900.0;    // N/m, rigid-wrist grasp baseline
};

// Parsed configuration. `document` is the normalized user-unit JSON (defaults
// materialized); serialize() returns it verbatim, which keeps
// serialize -> parse round trips bit-exact.
struct Config {
  Material material;
  HoneycombGeometry geometry;
  std::optional<GripperSpec> gripper;
  std::optional<DesignTargets> targets;
  SolverSettings solver;
  SimSettings sim;
  json document;
};

namespace detail {

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw parse_error(path + ": must be a JSON object");
}

inline const json& get_field(const json& sec, const std::string& path, const char* key) {
  auto it = sec.find(key);
  if (it == sec.end()) throw parse_error(path + "." + key + ": missing required field");
  return *it;
}

inline double num_field(const json& sec, const std::string& path, const char* key) {
  const json& v = get_field(sec, path, key);
  if (!v.is_number()) throw parse_error(path + "." + key + ": must be a number");
  return v.get<double>();
}

inline double num_field(const json& sec, const std::string& path, const char* key,
                        double fallback) {
  auto it = sec.find(key);
  if (it == sec.end()) return fallback;
  if (!it->is_number()) throw parse_error(path + "." + key + ": must be a number");
  return it->get<double>();
}

inline int int_field(const json& sec, const std::string& path, const char* key, int fallback) {
  auto it = sec.find(key);
  if (it == sec.end()) return fallback;
  if (!it->is_number_integer()) throw parse_error(path + "." + key + ": must be an integer");
  return it->get<int>();
}

inline std::string text_field(const json& sec, const std::string& path, const char* key) {
  const json& v = get_field(sec, path, key);
  if (!v.is_string()) throw parse_error(path + "." + key + ": must be a string");
  return v.get<std::string>();
}

// Unknown keys are schema errors; a "notes" string is allowed anywhere.
inline void reject_unknown_keys(const json& sec, const std::string& path,
                                std::initializer_list<const char*> known) {
  for (auto it = sec.begin(); it != sec.end(); ++it) {
    if (it.key() == "notes") continue;
    bool found = false;
    for (const char* k : known)
      if (it.key() == k) {
        found = true;
        break;
      }
    if (!found) throw parse_error(path + "." + it.key() + ": unknown key");
  }
}

inline void check_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw parse_error(field + ": must be > 0 (got " + format_number(v) + ")");
}

inline void check_fraction(double v, const std::string& field) {
  if (!(v > 0.0 && v < 1.0))
    throw parse_error(field + ": must be in (0, 1) (got " + format_number(v) + ")");
}

}  // namespace detail

inline Config parse_config(const json& root) {
  using namespace detail;
  require_object(root, "config");
  reject_unknown_keys(root, "config", {"material", "geometry", "gripper", "targets", "solver", "sim"});

  Config cfg;
  json doc = json::object();
  if (root.contains("notes")) doc["notes"] = root.at("notes");

  // material
  {
    const json& sec = get_field(root, "config", "material");
    require_object(sec, "material");
    reject_unknown_keys(sec, "material", {"name", "young_modulus_mpa"});
    const std::string name = text_field(sec, "material", "name");
    const double e_mpa = num_field(sec, "material", "young_modulus_mpa");
    check_positive(e_mpa, "material.young_modulus_mpa");
    cfg.material.name = name;
    cfg.material.young_modulus = units::mpa_to_pa(e_mpa);
    doc["material"] = {{"name", name}, {"young_modulus_mpa", e_mpa}};
    if (sec.contains("notes")) doc["material"]["notes"] = sec.at("notes");
  }

  // geometry
  {
    const json& sec = get_field(root, "config", "geometry");
    require_object(sec, "geometry");
    reject_unknown_keys(sec, "geometry",
                        {"b_mm", "b_c_mm", "L_mm", "h_c_mm", "H_mm", "gamma_deg", "n_modules",
                         "ring_radius_mm", "boundary_factor"});
    const double b_mm = num_field(sec, "geometry", "b_mm");
    const double b_c_mm = num_field(sec, "geometry", "b_c_mm");
    const double l_mm = num_field(sec, "geometry", "L_mm");
    const double h_c_mm = num_field(sec, "geometry", "h_c_mm");
    const double h_mm = num_field(sec, "geometry", "H_mm");
    const double gamma_deg = num_field(sec, "geometry", "gamma_deg");
    const int n_modules = int_field(sec, "geometry", "n_modules", 12);
    const double ring_radius_mm = num_field(sec, "geometry", "ring_radius_mm", 30.0);
    const double boundary_factor = num_field(sec, "geometry", "boundary_factor", 1.0);

    check_positive(b_mm, "geometry.b_mm");
    check_positive(b_c_mm, "geometry.b_c_mm");
    check_positive(l_mm, "geometry.L_mm");
    check_positive(h_c_mm, "geometry.h_c_mm");
    check_positive(h_mm, "geometry.H_mm");
    if (!(gamma_deg >= 0.0 && gamma_deg < 90.0))
      throw parse_error("geometry.gamma_deg: must satisfy 0 <= gamma_deg < 90, "
                        "90 is a singular geometry (got " +
                        format_number(gamma_deg) + ")");
    if (n_modules < 3)
      throw parse_error("geometry.n_modules: ring aggregation requires at least 3 modules (got " +
                        std::to_string(n_modules) + ")");
    check_positive(ring_radius_mm, "geometry.ring_radius_mm");
    check_positive(boundary_factor, "geometry.boundary_factor");

    cfg.geometry.b = units::mm_to_m(b_mm);
    cfg.geometry.b_c = units::mm_to_m(b_c_mm);
    cfg.geometry.L = units::mm_to_m(l_mm);
    cfg.geometry.h_c = units::mm_to_m(h_c_mm);
    cfg.geometry.H = units::mm_to_m(h_mm);
    cfg.geometry.gamma = units::deg_to_rad(gamma_deg);
    cfg.geometry.n_modules = n_modules;
    cfg.geometry.ring_radius = units::mm_to_m(ring_radius_mm);
    cfg.geometry.boundary_factor = boundary_factor;

    doc["geometry"] = {{"b_mm", b_mm},
                       {"b_c_mm", b_c_mm},
                       {"L_mm", l_mm},
                       {"h_c_mm", h_c_mm},
                       {"H_mm", h_mm},
                       {"gamma_deg", gamma_deg},
                       {"n_modules", n_modules},
                       {"ring_radius_mm", ring_radius_mm},
                       {"boundary_factor", boundary_factor}};
    if (sec.contains("notes")) doc["geometry"]["notes"] = sec.at("notes");
  }

  // gripper (optional section)
  if (root.contains("gripper")) {
    const json& sec = root.at("gripper");
    require_object(sec, "gripper");
    reject_unknown_keys(sec, "gripper", {"name", "mass_kg", "length_mm"});
    GripperSpec grip;
    grip.name = text_field(sec, "gripper", "name");
    const double mass_kg = num_field(sec, "gripper", "mass_kg");
    const double length_mm = num_field(sec, "gripper", "length_mm");
    check_positive(mass_kg, "gripper.mass_kg");
    check_positive(length_mm, "gripper.length_mm");
    grip.mass = mass_kg;
    grip.length = units::mm_to_m(length_mm);
    cfg.gripper = grip;
    doc["gripper"] = {{"name", grip.name}, {"mass_kg", mass_kg}, {"length_mm", length_mm}};
    if (sec.contains("notes")) doc["gripper"]["notes"] = sec.at("notes");
  }

  // targets (optional section)
  if (root.contains("targets")) {
    const json& sec = root.at("targets");
    require_object(sec, "targets");
    reject_unknown_keys(sec, "targets",
                        {"buckling_torque_nm", "buckling_angle_limit_deg", "torque_tolerance",
                         "tip_deflection_limit_mm", "payload_kg"});
    const double torque_nm = num_field(sec, "targets", "buckling_torque_nm");
    const double angle_deg = num_field(sec, "targets", "buckling_angle_limit_deg");
    const double tol = num_field(sec, "targets", "torque_tolerance", 0.10);
    const double tip_mm = num_field(sec, "targets", "tip_deflection_limit_mm", 10.0);
    const double payload_kg = num_field(sec, "targets", "payload_kg", 0.5);
    check_positive(torque_nm, "targets.buckling_torque_nm");
    if (!(angle_deg > 0.0 && angle_deg < 90.0))
      throw parse_error("targets.buckling_angle_limit_deg: must be in (0, 90) (got " +
                        format_number(angle_deg) + ")");
    check_fraction(tol, "targets.torque_tolerance");
    check_positive(tip_mm, "targets.tip_deflection_limit_mm");
    check_positive(payload_kg, "targets.payload_kg");
    DesignTargets t;
    t.buckling_torque = torque_nm;
    t.buckling_angle_limit = units::deg_to_rad(angle_deg);
    t.torque_tolerance = tol;
    t.tip_deflection_limit = units::mm_to_m(tip_mm);
    t.payload = payload_kg;
    cfg.targets = t;
    doc["targets"] = {{"buckling_torque_nm", torque_nm},
                      {"buckling_angle_limit_deg", angle_deg},
                      {"torque_tolerance", tol},
                      {"tip_deflection_limit_mm", tip_mm},
                      {"payload_kg", payload_kg}};
    if (sec.contains("notes")) doc["targets"]["notes"] = sec.at("notes");
  }

  // solver (optional section)
  if (root.contains("solver")) {
    const json& sec = root.at("solver");
    require_object(sec, "solver");
    reject_unknown_keys(sec, "solver",
                        {"b_min_mm", "b_max_mm", "gamma_min_deg", "gamma_max_deg",
                         "grid_resolution", "torque_refine_tol"});
    const double b_min_mm = num_field(sec, "solver", "b_min_mm", 0.4);
    const double b_max_mm = num_field(sec, "solver", "b_max_mm", 2.0);
    const double g_min_deg = num_field(sec, "solver", "gamma_min_deg", 0.0);
    const double g_max_deg = num_field(sec, "solver", "gamma_max_deg", 60.0);
    const int res = int_field(sec, "solver", "grid_resolution", 200);
    const double refine = num_field(sec, "solver", "torque_refine_tol", 1e-3);
    check_positive(b_min_mm, "solver.b_min_mm");
    if (!(b_max_mm > b_min_mm))
      throw parse_error("solver.b_max_mm: must exceed b_min_mm");
    if (!(g_min_deg >= 0.0 && g_max_deg >= g_min_deg && g_max_deg < 90.0))
      throw parse_error("solver.gamma bounds: need 0 <= gamma_min_deg <= gamma_max_deg < 90");
    if (res < 2) throw parse_error("solver.grid_resolution: must be >= 2");
    check_fraction(refine, "solver.torque_refine_tol");
    cfg.solver.b_min = units::mm_to_m(b_min_mm);
    cfg.solver.b_max = units::mm_to_m(b_max_mm);
    cfg.solver.gamma_min = units::deg_to_rad(g_min_deg);
    cfg.solver.gamma_max = units::deg_to_rad(g_max_deg);
    cfg.solver.grid_resolution = res;
    cfg.solver.torque_refine_tol = refine;
    doc["solver"] = {{"b_min_mm", b_min_mm},
                     {"b_max_mm", b_max_mm},
                     {"gamma_min_deg", g_min_deg},
                     {"gamma_max_deg", g_max_deg},
                     {"grid_resolution", res},
                     {"torque_refine_tol", refine}};
    if (sec.contains("notes")) doc["solver"]["notes"] = sec.at("notes");
  }

  // sim (optional section)
  if (root.contains("sim")) {
    const json& sec = root.at("sim");
    require_object(sec, "sim");
    reject_unknown_keys(sec, "sim",
                        {"safety_force_n", "sponge_stiffness_n_per_m", "sponge_travel_mm",
                         "residual_stiffness_n_per_m", "approach_depth_mm",
                         "rigid_rotational_stiffness_nm_per_rad", "rigid_contact_stiffness_n_per_m"});
    const double safety = num_field(sec, "sim", "safety_force_n", 15.0);
    const double sponge = num_field(sec, "sim", "sponge_stiffness_n_per_m", 3000.0);
    const double travel_mm = num_field(sec, "sim", "sponge_travel_mm", 5.0);
    const double residual = num_field(sec, "sim", "residual_stiffness_n_per_m", 1400.0);
    const double approach_mm = num_field(sec, "sim", "approach_depth_mm", 1.0);
    const double rigid_rot = num_field(sec, "sim", "rigid_rotational_stiffness_nm_per_rad", 2.0e4);
    const double rigid_contact = num_field(sec, "sim", "rigid_contact_stiffness_n_per_m", 2900.0);
    check_positive(safety, "sim.safety_force_n");
    check_positive(sponge, "sim.sponge_stiffness_n_per_m");
    check_positive(travel_mm, "sim.sponge_travel_mm");
    check_positive(residual, "sim.residual_stiffness_n_per_m");
    check_positive(approach_mm, "sim.approach_depth_mm");
    check_positive(rigid_rot, "sim.rigid_rotational_stiffness_nm_per_rad");
    check_positive(rigid_contact, "sim.rigid_contact_stiffness_n_per_m");
    cfg.sim.safety_force = safety;
    cfg.sim.sponge_stiffness = sponge;
    cfg.sim.sponge_travel = units::mm_to_m(travel_mm);
    cfg.sim.residual_stiffness = residual;
    cfg.sim.approach_depth = units::mm_to_m(approach_mm);
    cfg.sim.rigid_rotational_stiffness = rigid_rot;
    cfg.sim.rigid_contact_stiffness = rigid_contact;
    doc["sim"] = {{"safety_force_n", safety},
                  {"sponge_stiffness_n_per_m", sponge},
                  {"sponge_travel_mm", travel_mm},
                  {"residual_stiffness_n_per_m", residual},
                  {"approach_depth_mm", approach_mm},
                  {"rigid_rotational_stiffness_nm_per_rad", rigid_rot},
                  {"rigid_contact_stiffness_n_per_m", rigid_contact}};
    if (sec.contains("notes")) doc["sim"]["notes"] = sec.at("notes");
  }

  cfg.document = std::move(doc);
  return cfg;
}

inline Config load_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(path.string() + ": invalid JSON: " + e.what());
  }
  try {
    return parse_config(root);
  } catch (const parse_error& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

inline json serialize(const Config& cfg) { return cfg.document; }

}  // namespace biflex
