#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "biflex/types.hpp"
#include "biflex/units.hpp"

namespace biflex {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw parse_error(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Atomic replace: write a sibling temp file, flush, rename over the target.
inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw parse_error(tmp.string() + ": cannot open file for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw parse_error(tmp.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw parse_error(path.string() + ": rename failed: " + ec.message());
}

namespace detail {

inline double parse_number(std::string_view s, const std::string& context) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    throw parse_error(context + ": not a number: '" + std::string(s) + "'");
  return v;
}

inline std::string format_number(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace detail

// Curve CSV format: header `angle_deg,torque_Nm`, one sample per row, UTF-8,
// LF line endings (a trailing CR is tolerated on input). Extra columns are
// ignored so annotated exports stay parseable.
inline TorqueDeflectionCurve parse_curve_csv(std::string_view text, const std::string& label) {
  TorqueDeflectionCurve curve;
  std::size_t pos = 0;
  int line_no = 0;
  bool header_seen = false;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    const std::string ctx = label + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "angle_deg" || fields[1] != "torque_Nm")
        throw parse_error(ctx + ": expected header starting with 'angle_deg,torque_Nm'");
      header_seen = true;
      continue;
    }
    if (fields.size() < 2) throw parse_error(ctx + ": expected at least 2 fields");
    CurveSample s;
    s.angle = units::deg_to_rad(detail::parse_number(fields[0], ctx + " angle_deg"));
    s.torque = detail::parse_number(fields[1], ctx + " torque_Nm");
    if (!curve.samples.empty() && !(s.angle > curve.samples.back().angle))
      throw parse_error(ctx + ": angles must be strictly increasing");
    curve.samples.push_back(s);
  }
  if (!header_seen) throw parse_error(label + ": empty file");
  if (curve.samples.empty()) throw parse_error(label + ": no samples");
  return curve;
}

inline TorqueDeflectionCurve read_curve_csv(const std::filesystem::path& path) {
  return parse_curve_csv(read_text_file(path), path.string());
}

inline std::string curve_to_csv(const TorqueDeflectionCurve& curve) {
  std::string out = "angle_deg,torque_Nm\n";
  for (const auto& s : curve.samples) {
    out += detail::format_number(units::rad_to_deg(s.angle));
    out += ',';
    out += detail::format_number(s.torque);
    out += '\n';
  }
  return out;
}

inline void write_curve_csv(const std::filesystem::path& path, const TorqueDeflectionCurve& curve) {
  write_text_file(path, curve_to_csv(curve));
}

}  // namespace biflex
