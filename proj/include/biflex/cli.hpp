#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biflex/characterization.hpp"
#include "biflex/config.hpp"
#include "biflex/csv.hpp"
#include "biflex/inverse_design.hpp"
#include "biflex/manifest.hpp"
#include "biflex/report.hpp"
#include "biflex/svg.hpp"
#include "biflex/task_sim.hpp"
#include "biflex/wrist.hpp"

namespace biflex::cli {

namespace detail {

inline int log_level() {
  const char* v = std::getenv("BIFLEX_LOG");
  if (!v) return 0;
  const std::string s(v);
  if (s == "debug") return 2;
  if (s == "info") return 1;
  return 0;
}

inline void log_info(std::ostream& err, const std::string& msg) {
  if (log_level() >= 1) err << "[biflex] " << msg << "\n";
}

inline json point_json(const BucklingPoint& p) {
  return {{"angle_deg", units::rad_to_deg(p.angle)}, {"torque_nm", p.torque}};
}

inline json targets_json(const DesignTargets& t) {
  return {{"buckling_torque_nm", t.buckling_torque},
          {"buckling_angle_limit_deg", units::rad_to_deg(t.buckling_angle_limit)},
          {"torque_tolerance", t.torque_tolerance},
          {"tip_deflection_limit_mm", units::m_to_mm(t.tip_deflection_limit)},
          {"payload_kg", t.payload}};
}

inline json verdict_json(const ToleranceVerdict& v) {
  return {{"in_tolerance", v.in_tolerance},
          {"torque_ok", v.torque_ok},
          {"angle_ok", v.angle_ok},
          {"torque_error", v.torque_error},
          {"angle_margin_deg", units::rad_to_deg(v.angle_margin)}};
}

inline json validation_json(const ValidationReport& rep) {
  json arr = json::array();
  for (const auto& c : rep.checks) {
    const char* status = c.status == CheckStatus::pass ? "pass"
                         : c.status == CheckStatus::warn ? "warn"
                                                         : "fail";
    arr.push_back({{"name", c.name}, {"status", status}, {"message", c.message}});
  }
  return arr;
}

inline std::string trace_to_csv(const SimTrace& tr) {
  std::string out = "command_mm,contact_force_N,wrist_torque_Nm,wrist_angle_deg,tip_deflection_mm\n";
  for (const auto& s : tr.samples) {
    out += biflex::detail::format_number(units::m_to_mm(s.command)) + ",";
    out += biflex::detail::format_number(s.contact_force) + ",";
    out += biflex::detail::format_number(s.wrist_torque) + ",";
    out += biflex::detail::format_number(units::rad_to_deg(s.wrist_angle)) + ",";
    out += biflex::detail::format_number(units::m_to_mm(s.tip_deflection)) + "\n";
  }
  return out;
}

inline const GripperSpec& require_gripper(const Config& cfg, const std::string& subcommand) {
  if (!cfg.gripper)
    throw parse_error("config missing 'gripper' section (required for " + subcommand + ")");
  return *cfg.gripper;
}

inline const DesignTargets& require_targets(const Config& cfg, const std::string& subcommand) {
  if (!cfg.targets)
    throw parse_error("config missing 'targets' section (required for " + subcommand + ")");
  return *cfg.targets;
}

inline std::filesystem::path numbered_path(const std::filesystem::path& base, std::size_t index) {
  if (index == 0) return base;
  std::filesystem::path p = base;
  const std::string stem = p.stem().string();
  const std::string ext = p.extension().string();
  p.replace_filename(stem + "_" + std::to_string(index + 1) + ext);
  return p;
}

inline std::vector<double> parse_pair(const std::string& s, const std::string& flag) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw parse_error(flag + ": expected two comma-separated numbers, got '" + s + "'");
  return {biflex::detail::parse_number(s.substr(0, comma), flag),
          biflex::detail::parse_number(s.substr(comma + 1), flag)};
}

struct ManifestSink {
  RunManifest manifest;
  std::optional<std::filesystem::path> path;

  void output(const std::filesystem::path& p) { manifest.outputs.push_back(p.string()); }
  void finish() {
    if (!path) return;
    manifest.timestamp_utc = utc_timestamp_now();
    manifest.outputs.push_back(path->string());
    write_manifest(*path, manifest);
  }
};

}  // namespace detail

// --- analyze ---

struct AnalyzeOptions {
  std::string config_path;
  std::string curve_path;
  std::string json_path;
  std::string manifest_path;
  double max_angle_deg = 10.0;
  int samples = 200;
};

inline int do_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  const Config cfg = load_config(opt.config_path);
  const WristModel model = assemble(cfg.geometry, cfg.material);
  const ModuleResponse resp = module_response(cfg.geometry, cfg.material);
  const ValidationReport checks = validate(cfg.geometry);
  for (const auto& c : checks.checks)
    if (c.status == CheckStatus::warn) err << "warning: " << c.name << ": " << c.message << "\n";

  json doc;
  doc["config"] = cfg.document;
  doc["module"] = {{"k1_n_per_m", resp.k1},
                   {"k2_n_per_m", resp.k2},
                   {"k_eq_n_per_m", resp.k_eq},
                   {"f_cr_n", resp.f_cr},
                   {"delta_y_at_buckling_mm", units::m_to_mm(resp.delta_y_at_buckling)}};
  doc["wrist"] = {{"rotational_stiffness_nm_per_rad", model.rotational_stiffness},
                  {"buckling_angle_deg", units::rad_to_deg(model.buckling.angle)},
                  {"buckling_torque_nm", model.buckling.torque},
                  {"plateau_torque_nm", model.plateau_torque}};
  doc["validation"] = detail::validation_json(checks);
  if (cfg.targets) doc["targets_check"] = detail::verdict_json(check_tolerance(model.buckling, *cfg.targets));
  if (cfg.gripper) {
    json tip;
    if (cfg.targets) {
      tip["angle_limit_deg"] =
          units::rad_to_deg(angle_limit_for(*cfg.gripper, cfg.targets->tip_deflection_limit));
      const double payload_torque =
          cfg.targets->payload * units::standard_gravity * cfg.gripper->length;
      const TipDeflection td = tip_deflection(model, *cfg.gripper, payload_torque);
      tip["payload_torque_nm"] = payload_torque;
      tip["deflection_at_payload_mm"] = units::m_to_mm(td.deflection);
      tip["payload_post_buckling"] = td.post_buckling;
    }
    tip["gripper"] = cfg.gripper->name;
    doc["tip"] = tip;
  }

  detail::ManifestSink sink;
  sink.manifest.subcommand = "analyze";
  sink.manifest.inputs = {opt.config_path};
  if (!opt.manifest_path.empty()) sink.path = opt.manifest_path;
  json result = {{"kind", "analyze"}, {"buckling_point", detail::point_json(model.buckling)}};
  if (cfg.gripper) result["gripper"] = cfg.gripper->name;
  if (cfg.targets) result["targets"] = detail::targets_json(*cfg.targets);
  sink.manifest.result = result;
  sink.manifest.overrides = {{"max_angle_deg", opt.max_angle_deg}, {"samples", opt.samples}};

  if (!opt.curve_path.empty()) {
    const double max_angle = units::deg_to_rad(opt.max_angle_deg);
    if (max_angle > range_of_motion_limit)
      err << "warning: requested curve extends past the 40 deg range of motion\n";
    write_curve_csv(opt.curve_path, predicted_curve(model, max_angle, opt.samples));
    sink.output(opt.curve_path);
    detail::log_info(err, "wrote " + opt.curve_path);
  }
  if (!opt.json_path.empty()) {
    write_text_file(opt.json_path, doc.dump(2) + "\n");
    sink.output(opt.json_path);
  }
  sink.finish();
  out << doc.dump(2) << "\n";
  return 0;
}

// --- design ---

struct DesignOptions {
  std::string config_path;
  std::string out_path;
  std::string map_path;
  std::string manifest_path;
  int resolution = 0;  // 0: use config
  double b_min_mm = 0.0, b_max_mm = 0.0;
  double gamma_min_deg = -1.0, gamma_max_deg = -1.0;
};

inline int do_design(const DesignOptions& opt, std::ostream& out, std::ostream& err) {
  const Config cfg = load_config(opt.config_path);
  const DesignTargets& targets = detail::require_targets(cfg, "design");

  DesignBounds bounds{cfg.solver.b_min, cfg.solver.b_max, cfg.solver.gamma_min,
                      cfg.solver.gamma_max};
  if (opt.b_min_mm > 0.0) bounds.b_min = units::mm_to_m(opt.b_min_mm);
  if (opt.b_max_mm > 0.0) bounds.b_max = units::mm_to_m(opt.b_max_mm);
  if (opt.gamma_min_deg >= 0.0) bounds.gamma_min = units::deg_to_rad(opt.gamma_min_deg);
  if (opt.gamma_max_deg >= 0.0) bounds.gamma_max = units::deg_to_rad(opt.gamma_max_deg);
  const int resolution = opt.resolution > 0 ? opt.resolution : cfg.solver.grid_resolution;

  std::vector<FeasibilityCell> map;
  DesignSolution sol;
  try {
    sol = solve(targets, cfg.geometry, cfg.material, bounds, resolution,
                cfg.solver.torque_refine_tol, opt.map_path.empty() ? nullptr : &map);
  } catch (const std::invalid_argument& e) {
    throw parse_error(std::string("design: ") + e.what());
  }
  if (!sol.in_tolerance)
    err << "note: no in-tolerance design in bounds; reporting best effort\n";

  json doc;
  doc["targets"] = detail::targets_json(targets);
  doc["solution"] = {{"b_mm", units::m_to_mm(sol.geometry.b)},
                     {"gamma_deg", units::rad_to_deg(sol.geometry.gamma)},
                     {"buckling_angle_deg", units::rad_to_deg(sol.achieved.angle)},
                     {"buckling_torque_nm", sol.achieved.torque},
                     {"in_tolerance", sol.in_tolerance},
                     {"torque_error", sol.torque_error},
                     {"angle_margin_deg", units::rad_to_deg(sol.angle_margin)}};
  if (cfg.gripper) doc["gripper"] = cfg.gripper->name;

  detail::ManifestSink sink;
  sink.manifest.subcommand = "design";
  sink.manifest.inputs = {opt.config_path};
  if (!opt.manifest_path.empty()) sink.path = opt.manifest_path;
  json result = {{"kind", "design"},
                 {"buckling_point", detail::point_json(sol.achieved)},
                 {"targets", detail::targets_json(targets)},
                 {"in_tolerance", sol.in_tolerance}};
  if (cfg.gripper) result["gripper"] = cfg.gripper->name;
  sink.manifest.result = result;
  sink.manifest.overrides = {{"resolution", resolution}};

  if (!opt.map_path.empty()) {
    std::string csv = "b_mm,gamma_deg,torque_Nm,angle_deg,feasible\n";
    for (const auto& c : map) {
      csv += biflex::detail::format_number(units::m_to_mm(c.b)) + ",";
      csv += biflex::detail::format_number(units::rad_to_deg(c.gamma)) + ",";
      csv += biflex::detail::format_number(c.torque) + ",";
      csv += biflex::detail::format_number(units::rad_to_deg(c.angle)) + ",";
      csv += c.feasible ? "1\n" : "0\n";
    }
    write_text_file(opt.map_path, csv);
    sink.output(opt.map_path);
  }
  if (!opt.out_path.empty()) {
    write_text_file(opt.out_path, doc.dump(2) + "\n");
    sink.output(opt.out_path);
  }
  sink.finish();
  out << doc.dump(2) << "\n";
  return 0;
}

// --- characterize ---

struct CharacterizeOptions {
  std::vector<std::string> curve_paths;
  std::string fit_window;  // "lo,hi"
  double plateau_tol = 0.02;
  double interp_level = 0.80;
  std::string targets_path;  // config supplying targets/gripper/geometry
  std::string calibrate_params;  // comma list of E,R,kappa
  std::string out_path;
  std::string annotated_path;
  std::string manifest_path;
};

inline int do_characterize(const CharacterizeOptions& opt, std::ostream& out, std::ostream& err) {
  ExtractionParams params;
  params.plateau_tolerance = opt.plateau_tol;
  params.interp_level = opt.interp_level;
  if (!opt.fit_window.empty()) {
    const auto w = detail::parse_pair(opt.fit_window, "--fit-window");
    params.window_low = w[0];
    params.window_high = w[1];
  }
  if (params.window_high > params.interp_level) params.interp_level = params.window_high;
  try {
    biflex::detail::require_params(params);
  } catch (const std::invalid_argument& e) {
    throw parse_error(e.what());
  }

  std::vector<TorqueDeflectionCurve> curves;
  for (const auto& p : opt.curve_paths) curves.push_back(read_curve_csv(p));

  std::optional<Config> cfg;
  if (!opt.targets_path.empty()) cfg = load_config(opt.targets_path);

  const CharacterizationReport rep =
      curves.size() == 1 ? extract_buckling_point(curves[0], params)
                         : average_replicates(curves, params);
  detail::log_info(err, "extracted " + std::to_string(rep.extracted.torque) + " Nm at " +
                            std::to_string(units::rad_to_deg(rep.extracted.angle)) + " deg");

  json doc;
  doc["buckling_point"] = detail::point_json(rep.extracted);
  doc["peak_torque_nm"] = rep.peak_torque;
  doc["pre_buckling_stiffness_nm_per_rad"] = rep.pre_buckling_stiffness;
  json reps = json::array();
  for (std::size_t i = 0; i < rep.replicates.size(); ++i) {
    json r = detail::point_json(rep.replicates[i]);
    r["file"] = opt.curve_paths[i];
    reps.push_back(r);
  }
  doc["replicates"] = reps;
  doc["spread"] = {{"angle_deg", units::rad_to_deg(rep.angle_spread)},
                   {"torque_nm", rep.torque_spread}};
  if (cfg && cfg->targets)
    doc["vs_targets"] = detail::verdict_json(check_tolerance(rep.extracted, *cfg->targets));

  if (!opt.calibrate_params.empty()) {
    if (!cfg)
      throw parse_error("--calibrate needs --targets CONFIG to supply the model geometry");
    std::vector<CalibParam> free;
    std::string s = opt.calibrate_params;
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t comma = s.find(',', start);
      const std::string name = s.substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
      if (name == "E") free.push_back(CalibParam::young_modulus);
      else if (name == "R") free.push_back(CalibParam::ring_radius);
      else if (name == "kappa") free.push_back(CalibParam::boundary_factor);
      else throw parse_error("--calibrate: unknown parameter '" + name + "' (use E, R, kappa)");
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    const std::string label = cfg->gripper ? cfg->gripper->name : "measured";
    const CalibrationResult cal =
        calibrate({{cfg->geometry, rep.extracted, label}}, cfg->material, free);
    json residuals = json::array();
    for (const auto& r : cal.residuals)
      residuals.push_back(
          {{"label", r.label}, {"torque_rel", r.torque_rel}, {"angle_rel", r.angle_rel}});
    doc["calibration"] = {{"young_modulus_mpa", units::pa_to_mpa(cal.material.young_modulus)},
                          {"ring_radius_mm", units::m_to_mm(cal.ring_radius)},
                          {"boundary_factor", cal.boundary_factor},
                          {"residuals", residuals}};
  }

  detail::ManifestSink sink;
  sink.manifest.subcommand = "characterize";
  sink.manifest.inputs = opt.curve_paths;
  if (!opt.targets_path.empty()) sink.manifest.inputs.push_back(opt.targets_path);
  if (!opt.manifest_path.empty()) sink.path = opt.manifest_path;
  json result = {{"kind", "characterize"},
                 {"buckling_point", detail::point_json(rep.extracted)}};
  if (cfg && cfg->gripper) result["gripper"] = cfg->gripper->name;
  if (cfg && cfg->targets) result["targets"] = detail::targets_json(*cfg->targets);
  sink.manifest.result = result;

  if (!opt.annotated_path.empty()) {
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const CharacterizationReport one = extract_buckling_point(curves[i], params);
      std::string csv = "angle_deg,torque_Nm,fit_Nm,plateau_Nm\n";
      for (const auto& smp : curves[i].samples) {
        csv += biflex::detail::format_number(units::rad_to_deg(smp.angle)) + ",";
        csv += biflex::detail::format_number(smp.torque) + ",";
        csv += biflex::detail::format_number(one.pre_buckling_stiffness * smp.angle +
                                             one.fit_intercept) + ",";
        csv += biflex::detail::format_number(one.plateau_level) + "\n";
      }
      const auto path = detail::numbered_path(opt.annotated_path, i);
      write_text_file(path, csv);
      sink.output(path);
    }
  }
  if (!opt.out_path.empty()) {
    write_text_file(opt.out_path, doc.dump(2) + "\n");
    sink.output(opt.out_path);
  }
  sink.finish();
  out << doc.dump(2) << "\n";
  return 0;
}

// --- simulate ---

struct SimulateOptions {
  std::string mode;
  std::string config_path;
  bool rigid = false;
  std::string trace_path;
  std::string summary_path;
  std::string svg_path;
  std::string manifest_path;
  // press
  double max_angle_deg = 10.0;
  double step_deg = 0.05;
  // wipe
  double hill_mm = 50.0;
  double slope_deg = 30.0;
  double step_mm = 1.0;
  double flat_length_mm = 80.0;
  // grasp
  double max_depth_mm = 50.0;
  double depth_step_mm = 5.0;
  // pick
  double mass_max_g = 1200.0;
  double mass_step_g = 50.0;
  double lever_mm = 0.0;  // 0: gripper length
};

inline int do_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  const Config cfg = load_config(opt.config_path);
  const GripperSpec gripper = detail::require_gripper(cfg, "simulate " + opt.mode);

  ContactScenario scenario;
  scenario.wrist = opt.rigid ? WristModel::rigid_baseline(cfg.sim.rigid_rotational_stiffness)
                             : assemble(cfg.geometry, cfg.material);
  scenario.gripper = gripper;
  scenario.sponge_stiffness = cfg.sim.sponge_stiffness;
  scenario.sponge_travel = cfg.sim.sponge_travel;
  scenario.residual_stiffness =
      opt.mode == "grasp" ? cfg.sim.rigid_contact_stiffness : cfg.sim.residual_stiffness;
  scenario.safety_force = cfg.sim.safety_force;

  detail::ManifestSink sink;
  sink.manifest.subcommand = "simulate";
  sink.manifest.inputs = {opt.config_path};
  if (!opt.manifest_path.empty()) sink.path = opt.manifest_path;
  sink.manifest.overrides = {{"mode", opt.mode}, {"rigid", opt.rigid}};

  json doc;
  doc["mode"] = opt.mode;
  doc["rigid_wrist"] = opt.rigid;
  std::vector<PlotSeries> plot;
  std::string plot_x = "command [mm]", plot_y = "contact force [N]";
  std::optional<double> plot_limit = scenario.safety_force;

  auto emit_trace = [&](const SimTrace& tr) {
    doc["outcome"] = tr.success ? "success" : "failure";
    doc["peak_force_n"] = tr.peak_force;
    doc["buckled"] = tr.buckled;
    doc["terminated_early"] = tr.terminated_early;
    if (tr.terminated_early) doc["reason"] = tr.reason;
    doc["samples"] = tr.samples.size();
    if (!tr.samples.empty() &&
        tr.samples.back().wrist_angle > range_of_motion_limit)
      err << "warning: wrist angle exceeded the 40 deg range of motion\n";
    if (!opt.trace_path.empty()) {
      write_text_file(opt.trace_path, detail::trace_to_csv(tr));
      sink.output(opt.trace_path);
    }
    PlotSeries s;
    s.label = opt.rigid ? "rigid wrist" : "compliant wrist";
    for (const auto& smp : tr.samples)
      s.points.push_back({units::m_to_mm(smp.command), smp.contact_force});
    plot.push_back(s);
  };

  if (opt.mode == "press") {
    emit_trace(simulate_press(scenario, units::deg_to_rad(opt.max_angle_deg),
                              units::deg_to_rad(opt.step_deg)));
    plot_x = "commanded descent [mm]";
  } else if (opt.mode == "wipe") {
    const SurfaceProfile profile =
        opt.hill_mm > 0.0
            ? SurfaceProfile::triangle(units::mm_to_m(opt.hill_mm), units::deg_to_rad(opt.slope_deg))
            : SurfaceProfile::flat(units::mm_to_m(opt.flat_length_mm));
    emit_trace(simulate_wipe(scenario, profile, cfg.sim.approach_depth,
                             units::mm_to_m(opt.step_mm)));
    doc["hill_mm"] = opt.hill_mm;
    plot_x = "horizontal position [mm]";
  } else if (opt.mode == "grasp") {
    std::vector<double> depths;
    for (double d = 0.0; d <= opt.max_depth_mm + 1e-9; d += opt.depth_step_mm)
      depths.push_back(units::mm_to_m(d));
    const auto results = simulate_constrained_grasp(scenario, depths);
    json arr = json::array();
    bool all_success = true;
    double peak = 0.0;
    std::string csv = "command_mm,contact_force_N,wrist_torque_Nm,wrist_angle_deg,tip_deflection_mm\n";
    PlotSeries s;
    s.label = opt.rigid ? "rigid wrist" : "compliant wrist";
    for (const auto& g : results) {
      arr.push_back({{"depth_mm", units::m_to_mm(g.depth)},
                     {"contact_force_n", g.contact_force},
                     {"wrist_angle_deg", units::rad_to_deg(g.wrist_angle)},
                     {"buckled", g.buckled},
                     {"success", g.success}});
      all_success = all_success && g.success;
      peak = std::max(peak, g.contact_force);
      csv += biflex::detail::format_number(units::m_to_mm(g.depth)) + ",";
      csv += biflex::detail::format_number(g.contact_force) + ",";
      csv += biflex::detail::format_number(g.wrist_torque) + ",";
      csv += biflex::detail::format_number(units::rad_to_deg(g.wrist_angle)) + ",";
      csv += biflex::detail::format_number(
                 units::m_to_mm(scenario.gripper.length * std::sin(g.wrist_angle))) + "\n";
      s.points.push_back({units::m_to_mm(g.depth), g.contact_force});
    }
    doc["results"] = arr;
    doc["outcome"] = all_success ? "success" : "failure";
    doc["peak_force_n"] = peak;
    if (!opt.trace_path.empty()) {
      write_text_file(opt.trace_path, csv);
      sink.output(opt.trace_path);
    }
    plot.push_back(s);
    plot_x = "commanded depth below surface [mm]";
  } else if (opt.mode == "pick") {
    const double lever = opt.lever_mm > 0.0 ? units::mm_to_m(opt.lever_mm) : gripper.length;
    const double deflection_limit = cfg.targets ? cfg.targets->tip_deflection_limit : 0.010;
    json arr = json::array();
    std::string csv = "mass_g,wrist_torque_Nm,tip_deflection_mm,buckled,pass\n";
    PlotSeries s;
    s.label = "tip deflection";
    for (double m_g = 0.0; m_g <= opt.mass_max_g + 1e-9; m_g += opt.mass_step_g) {
      const PickReport rep = check_pick_place(scenario.wrist, gripper, units::g_to_kg(m_g), lever,
                                              deflection_limit);
      arr.push_back({{"mass_g", m_g},
                     {"wrist_torque_nm", rep.wrist_torque},
                     {"tip_deflection_mm", units::m_to_mm(rep.tip_deflection)},
                     {"buckled", rep.buckled},
                     {"deflection_unbounded", rep.deflection_unbounded},
                     {"pass", rep.pass}});
      csv += biflex::detail::format_number(m_g) + ",";
      csv += biflex::detail::format_number(rep.wrist_torque) + ",";
      csv += biflex::detail::format_number(units::m_to_mm(rep.tip_deflection)) + ",";
      csv += rep.buckled ? "1," : "0,";
      csv += rep.pass ? "1\n" : "0\n";
      s.points.push_back({m_g, units::m_to_mm(rep.tip_deflection)});
    }
    doc["results"] = arr;
    doc["lever_mm"] = units::m_to_mm(lever);
    const double payload = cfg.targets ? cfg.targets->payload : 0.500;
    const PickReport at_payload =
        check_pick_place(scenario.wrist, gripper, payload, lever, deflection_limit);
    doc["outcome"] = at_payload.pass ? "success" : "failure";
    doc["payload_g"] = units::kg_to_g(payload);
    if (!scenario.wrist.rigid) {
      doc["buckling_threshold_mass_g"] = units::kg_to_g(
          scenario.wrist.buckling.torque / (units::standard_gravity * lever));
    }
    if (!opt.trace_path.empty()) {
      write_text_file(opt.trace_path, csv);
      sink.output(opt.trace_path);
    }
    plot.push_back(s);
    plot_x = "object mass [g]";
    plot_y = "tip deflection [mm]";
    plot_limit = units::m_to_mm(deflection_limit);
  }

  if (!opt.svg_path.empty()) {
    write_text_file(opt.svg_path,
                    line_plot_svg("simulate " + opt.mode, plot_x, plot_y, plot, plot_limit));
    sink.output(opt.svg_path);
  }
  sink.manifest.result = {{"kind", "simulate"}, {"mode", opt.mode}, {"summary", doc}};
  if (!opt.summary_path.empty()) {
    write_text_file(opt.summary_path, doc.dump(2) + "\n");
    sink.output(opt.summary_path);
  }
  sink.finish();
  out << doc.dump(2) << "\n";
  return 0;
}

// --- report ---

struct ReportOptions {
  std::vector<std::string> manifest_paths;
  std::string csv_path;
};

inline int do_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<RunManifest> manifests;
  for (const auto& p : opt.manifest_paths) manifests.push_back(read_manifest(p));
  const auto rows = build_report(manifests);
  err << report_table(rows);
  if (!opt.csv_path.empty()) write_text_file(opt.csv_path, report_csv(rows));
  out << report_json(rows).dump(2) << "\n";
  return 0;
}

// --- entry point ---

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"design, analysis and virtual testing of passive bimodal-stiffness "
               "buckling-honeycomb robot wrists"};
  app.name("biflex");

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "predict the wrist torque-angle law");
  analyze->add_option("--config", an.config_path, "config JSON")->required();
  analyze->add_option("--curve", an.curve_path, "write the predicted curve CSV here");
  analyze->add_option("--json", an.json_path, "also write the summary JSON here");
  analyze->add_option("--max-angle-deg", an.max_angle_deg, "curve sweep end");
  analyze->add_option("--samples", an.samples, "curve sample count");
  analyze->add_option("--manifest", an.manifest_path, "write a run manifest here");

  DesignOptions de;
  auto* design = app.add_subcommand("design", "solve (b, gamma) for a target buckling point");
  design->add_option("--config", de.config_path, "config JSON with a targets section")->required();
  design->add_option("--out", de.out_path, "write the solution JSON here");
  design->add_option("--map", de.map_path, "write the feasibility-map CSV here");
  design->add_option("--resolution", de.resolution, "grid resolution override");
  design->add_option("--b-min-mm", de.b_min_mm, "beam width lower bound override");
  design->add_option("--b-max-mm", de.b_max_mm, "beam width upper bound override");
  design->add_option("--gamma-min-deg", de.gamma_min_deg, "tilt lower bound override");
  design->add_option("--gamma-max-deg", de.gamma_max_deg, "tilt upper bound override");
  design->add_option("--manifest", de.manifest_path, "write a run manifest here");

  CharacterizeOptions ch;
  auto* characterize =
      app.add_subcommand("characterize", "extract buckling points from measured curves");
  characterize->add_option("curves", ch.curve_paths, "curve CSV files")->required()->expected(-1);
  characterize->add_option("--fit-window", ch.fit_window, "rising-line fit window, e.g. 0.2,0.8");
  characterize->add_option("--plateau-tol", ch.plateau_tol, "plateau band, fraction of peak");
  characterize->add_option("--interp-level", ch.interp_level, "interpolation line level");
  characterize->add_option("--targets", ch.targets_path, "config JSON for targets comparison");
  characterize->add_option("--calibrate", ch.calibrate_params,
                           "fit model constants to the extracted point (comma list of E,R,kappa)");
  characterize->add_option("--out", ch.out_path, "write the report JSON here");
  characterize->add_option("--annotated", ch.annotated_path,
                           "write annotated curve CSV (fit + plateau columns)");
  characterize->add_option("--manifest", ch.manifest_path, "write a run manifest here");

  SimulateOptions si;
  auto* simulate = app.add_subcommand("simulate", "quasi-static task simulations");
  simulate->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", si.config_path, "config JSON")->required();
    sub->add_flag("--rigid", si.rigid, "use the rigid-wrist baseline");
    sub->add_option("--trace", si.trace_path, "write the trace CSV here");
    sub->add_option("--summary", si.summary_path, "write the summary JSON here");
    sub->add_option("--svg", si.svg_path, "write a line plot here");
    sub->add_option("--manifest", si.manifest_path, "write a run manifest here");
  };
  auto* press = simulate->add_subcommand("press", "press the fingertips onto a rigid frame");
  add_common(press);
  press->add_option("--max-angle-deg", si.max_angle_deg, "sweep end");
  press->add_option("--step-deg", si.step_deg, "sweep step");
  auto* wipe = simulate->add_subcommand("wipe", "wipe a triangular surface");
  add_common(wipe);
  wipe->add_option("--hill-mm", si.hill_mm, "triangle height (0 for a flat surface)");
  wipe->add_option("--slope-deg", si.slope_deg, "triangle slope");
  wipe->add_option("--step-mm", si.step_mm, "horizontal step");
  wipe->add_option("--length-mm", si.flat_length_mm, "flat surface length when hill is 0");
  auto* grasp = simulate->add_subcommand("grasp", "grasp against a table constraint");
  add_common(grasp);
  grasp->add_option("--max-depth-mm", si.max_depth_mm, "deepest commanded overshoot");
  grasp->add_option("--depth-step-mm", si.depth_step_mm, "depth increment");
  auto* pick = simulate->add_subcommand("pick", "pick-and-place mass sweep");
  add_common(pick);
  pick->add_option("--mass-max-g", si.mass_max_g, "sweep end");
  pick->add_option("--mass-step-g", si.mass_step_g, "sweep step");
  pick->add_option("--lever-mm", si.lever_mm, "load lever arm (default: gripper length)");

  ReportOptions re;
  auto* report = app.add_subcommand("report", "tabulate designed vs measured buckling points");
  report->add_option("manifests", re.manifest_paths, "run manifest JSON files")
      ->required()
      ->expected(-1);
  report->add_option("--csv", re.csv_path, "write the comparison CSV here");

  std::vector<const char*> argv;
  argv.push_back("biflex");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) return do_analyze(an, out, err);
    if (design->parsed()) return do_design(de, out, err);
    if (characterize->parsed()) return do_characterize(ch, out, err);
    if (simulate->parsed()) {
      for (const char* mode : {"press", "wipe", "grasp", "pick"})
        if (simulate->get_subcommand(mode)->parsed()) si.mode = mode;
      return do_simulate(si, out, err);
    }
    if (report->parsed()) return do_report(re, out, err);
  } catch (const parse_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const analysis_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace biflex::cli
