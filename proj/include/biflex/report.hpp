#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "biflex/manifest.hpp"
#include "biflex/types.hpp"

namespace biflex {

// One gripper's designed / predicted / measured buckling points with
// tolerance-box verdicts.
struct ReportRow {
  std::string gripper;
  std::optional<DesignTargets> targets;
  std::optional<BucklingPoint> designed;   // from `design` (achieved solution)
  std::optional<BucklingPoint> predicted;  // from `analyze`
  std::optional<BucklingPoint> measured;   // from `characterize`
};

namespace detail {

inline std::optional<BucklingPoint> point_from(const json& result, const char* key) {
  if (!result.contains(key)) return std::nullopt;
  const json& p = result.at(key);
  BucklingPoint pt;
  pt.angle = units::deg_to_rad(p.at("angle_deg").get<double>());
  pt.torque = p.at("torque_nm").get<double>();
  return pt;
}

inline std::optional<DesignTargets> targets_from(const json& result) {
  if (!result.contains("targets")) return std::nullopt;
  const json& t = result.at("targets");
  DesignTargets out;
  out.buckling_torque = t.at("buckling_torque_nm").get<double>();
  out.buckling_angle_limit = units::deg_to_rad(t.at("buckling_angle_limit_deg").get<double>());
  out.torque_tolerance = t.value("torque_tolerance", 0.10);
  return out;
}

inline std::string cell(const std::optional<BucklingPoint>& p) {
  if (!p) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f Nm @ %.2f deg", p->torque, units::rad_to_deg(p->angle));
  return buf;
}

inline std::string verdict_cell(const std::optional<BucklingPoint>& p,
                                const std::optional<DesignTargets>& t) {
  if (!p || !t) return "-";
  return check_tolerance(*p, *t).in_tolerance ? "inside" : "OUTSIDE";
}

}  // namespace detail

inline std::vector<ReportRow> build_report(const std::vector<RunManifest>& manifests) {
  if (manifests.empty()) throw std::invalid_argument("report: need at least one manifest");
  std::vector<ReportRow> rows;
  auto row_for = [&rows](const std::string& gripper) -> ReportRow& {
    for (auto& r : rows)
      if (r.gripper == gripper) return r;
    rows.push_back(ReportRow{gripper, {}, {}, {}, {}});
    return rows.back();
  };

  for (const auto& m : manifests) {
    const json& res = m.result;
    const std::string kind = res.value("kind", m.subcommand);
    if (kind != "analyze" && kind != "characterize" && kind != "design")
      throw analysis_error("report: manifest kind '" + kind +
                           "' has no buckling point to compare (expected analyze, "
                           "characterize or design)");
    try {
      ReportRow& row = row_for(res.value("gripper", std::string("(unnamed)")));
      const auto pt = detail::point_from(res, "buckling_point");
      if (!pt)
        throw parse_error("report: manifest result lacks a buckling_point block");
      if (kind == "analyze") row.predicted = pt;
      if (kind == "characterize") row.measured = pt;
      if (kind == "design") row.designed = pt;
      if (!row.targets) row.targets = detail::targets_from(res);
    } catch (const nlohmann::json::exception& e) {
      throw parse_error(std::string("report: malformed manifest result: ") + e.what());
    }
  }
  return rows;
}

inline json report_json(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j;
    j["gripper"] = r.gripper;
    if (r.targets) {
      j["targets"] = {{"buckling_torque_nm", r.targets->buckling_torque},
                      {"buckling_angle_limit_deg", units::rad_to_deg(r.targets->buckling_angle_limit)},
                      {"torque_tolerance", r.targets->torque_tolerance}};
    }
    auto emit = [&](const char* name, const std::optional<BucklingPoint>& p) {
      if (!p) return;
      j[name] = {{"angle_deg", units::rad_to_deg(p->angle)}, {"torque_nm", p->torque}};
      if (r.targets) {
        const auto v = check_tolerance(*p, *r.targets);
        j[name]["in_tolerance"] = v.in_tolerance;
        j[name]["torque_error"] = v.torque_error;
        j[name]["angle_margin_deg"] = units::rad_to_deg(v.angle_margin);
      }
    };
    emit("designed", r.designed);
    emit("predicted", r.predicted);
    emit("measured", r.measured);
    arr.push_back(j);
  }
  return arr;
}

inline std::string report_table(const std::vector<ReportRow>& rows) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-16s %-22s %-22s %-22s %-10s %-10s\n", "gripper", "designed",
                "predicted", "measured", "pred.box", "meas.box");
  out += buf;
  out += std::string(106, '-') + "\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-16s %-22s %-22s %-22s %-10s %-10s\n", r.gripper.c_str(),
                  detail::cell(r.designed).c_str(), detail::cell(r.predicted).c_str(),
                  detail::cell(r.measured).c_str(),
                  detail::verdict_cell(r.predicted, r.targets).c_str(),
                  detail::verdict_cell(r.measured, r.targets).c_str());
    out += buf;
  }
  return out;
}

inline std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out =
      "gripper,target_torque_Nm,angle_limit_deg,designed_torque_Nm,designed_angle_deg,"
      "predicted_torque_Nm,predicted_angle_deg,predicted_verdict,measured_torque_Nm,"
      "measured_angle_deg,measured_verdict\n";
  auto num = [](std::optional<double> v) { return v ? detail::format_number(*v) : std::string(); };
  for (const auto& r : rows) {
    out += r.gripper + ",";
    out += num(r.targets ? std::optional<double>(r.targets->buckling_torque) : std::nullopt) + ",";
    out += num(r.targets ? std::optional<double>(units::rad_to_deg(r.targets->buckling_angle_limit))
                         : std::nullopt) + ",";
    out += num(r.designed ? std::optional<double>(r.designed->torque) : std::nullopt) + ",";
    out += num(r.designed ? std::optional<double>(units::rad_to_deg(r.designed->angle))
                          : std::nullopt) + ",";
    out += num(r.predicted ? std::optional<double>(r.predicted->torque) : std::nullopt) + ",";
    out += num(r.predicted ? std::optional<double>(units::rad_to_deg(r.predicted->angle))
                           : std::nullopt) + ",";
    const std::string pv = detail::verdict_cell(r.predicted, r.targets);
    out += (pv == "-" ? "" : pv) + ",";
    out += num(r.measured ? std::optional<double>(r.measured->torque) : std::nullopt) + ",";
    out += num(r.measured ? std::optional<double>(units::rad_to_deg(r.measured->angle))
                          : std::nullopt) + ",";
    const std::string mv = detail::verdict_cell(r.measured, r.targets);
    out += (mv == "-" ? "" : mv) + "\n";
  }
  return out;
}

}  // namespace biflex
