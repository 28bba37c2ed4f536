#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsym/check_record.hpp"

namespace finsym {

enum class ReportFormat { json_lines, table };

/// One JSON object per record, keys in the order
/// check, point, residual, tolerance, pass, elapsed_us, error.
/// `error` is null unless the evaluation raised.
inline nlohmann::ordered_json record_json(const CheckRecord& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["point"] = r.point;
  j["residual"] = r.residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["elapsed_us"] = r.elapsed.count();
  j["error"] = r.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.error);
  return j;
}

namespace report_detail {

inline std::string sci(double v) {
  if (v == kNoBound) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::string point_text(const std::vector<double>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.4g", i ? ", " : "", p[i]);
    s += buf;
  }
  return s + ")";
}

}  // namespace report_detail

inline void emit_table(const std::vector<CheckRecord>& records, std::ostream& out) {
  using namespace report_detail;
  std::size_t wc = 5, wp = 5;
  for (const auto& r : records) {
    wc = std::max(wc, r.check.size());
    wp = std::max(wp, point_text(r.point).size());
  }
  auto row = [&](const std::string& c, const std::string& p, const std::string& res, const std::string& tol,
                 const std::string& pass) {
    char buf[64];
    out << c << std::string(wc - c.size() + 2, ' ') << p << std::string(wp - p.size() + 2, ' ');
    std::snprintf(buf, sizeof buf, "%-11s  %-11s  ", res.c_str(), tol.c_str());
    out << buf << pass << '\n';
  };
  row("check", "point", "residual", "tolerance", "pass");
  for (const auto& r : records)
    row(r.check, point_text(r.point), r.error.empty() ? sci(r.residual) : "error", sci(r.tolerance),
        r.pass ? "yes" : (r.error.empty() ? "NO" : "NO  " + r.error));

  struct Summary {
    std::size_t count = 0, failed = 0;
    double max_residual = 0.0;
  };
  std::map<std::string, Summary> by_check;
  for (const auto& r : records) {
    Summary& s = by_check[r.check];
    ++s.count;
    s.failed += r.pass ? 0 : 1;
    if (r.error.empty()) s.max_residual = std::max(s.max_residual, r.residual);
  }
  out << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-9s  %-6s  %s\n", "records", "failed", "max residual");
  out << "summary" << std::string(wc - 5, ' ') << buf;
  for (const auto& [id, s] : by_check) {
    std::snprintf(buf, sizeof buf, "%-9zu  %-6zu  %s\n", s.count, s.failed, sci(s.max_residual).c_str());
    out << id << std::string(wc - id.size() + 2, ' ') << buf;
  }
}

inline void emit_report(const std::vector<CheckRecord>& records, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::table) {
    emit_table(records, out);
    return;
  }
  for (const auto& r : records) out << record_json(r).dump() << '\n';
}

}  // namespace finsym
