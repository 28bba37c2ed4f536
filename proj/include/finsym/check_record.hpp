#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finsym/errors.hpp"

namespace finsym {

/// One residual evaluation. `point` holds the base coordinates x, followed by
/// the fiber coordinates y for checks evaluated on the tangent bundle.
struct CheckRecord {
  std::string check;
  std::vector<double> point;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::chrono::microseconds elapsed{0};
  std::string error;  // nonempty when evaluation raised instead of producing a residual

  static CheckRecord evaluate(std::string check, std::vector<double> point, double residual, double tolerance) {
    CheckRecord r{std::move(check), std::move(point), residual, tolerance, false, {}, {}};
    r.pass = residual <= tolerance;  // NaN fails
    return r;
  }

  static CheckRecord failure(std::string check, std::vector<double> point, std::string message) {
    return CheckRecord{std::move(check), std::move(point), 0.0, 0.0, false, {}, std::move(message)};
  }
};

/// Records for checks whose hypothesis does not hold carry this tolerance:
/// the residual is reported but no bound is asserted.
inline constexpr double kNoBound = std::numeric_limits<double>::max();

/// Evaluation sites: one base point with the fiber directions sampled there.
struct SamplePoint {
  std::vector<double> x;
  std::vector<std::vector<double>> ys;
};

inline std::vector<double> join(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> p = x;
  p.insert(p.end(), y.begin(), y.end());
  return p;
}

/// Thresholds for every check. Structural identities are exact up to
/// rounding, differentiation-backed residuals carry 1e-7..1e-9, and
/// finite-difference comparisons 1e-5..1e-6.
struct Tolerances {
  double tol_pd = 1e-10;         // leading principal minors of g
  double tol_nd = 1e-8;          // |det omega|
  double homogeneity = 1e-9;     // relative, F(x, ly) vs l F(x, y)
  double euler = 1e-9;           // relative, y^k F_{y^k} vs F
  double cartan_trace = 1e-9;    // relative, A_ijk y^k
  double randers_margin = 1e-6;  // alpha-norm of b must stay below 1 - margin
  double torsion = 0.0;
  double compatibility = 1e-7;  // relative to the largest term
  double closedness = 1e-9;
  double preservation = 1e-9;
  double equivalence = 1e-9;  // relative, Randers condition vs preservation residual
  double exactness = 1e-12;
  double darboux = 1e-8;
  double chart = 1e-8;
  double minkowski = 1e-8;
  double berwald = 1e-10;
  double curvature_fd = 1e-5;  // relative
  double bianchi = 1e-7;       // relative
  double two_path = 1e-9;
  double pair_symmetry = 1e-6;  // relative

  /// Name -> member table used for command-line and config overrides.
  static const std::map<std::string, double Tolerances::*>& fields() {
    static const std::map<std::string, double Tolerances::*> table{
        {"tol_pd", &Tolerances::tol_pd},
        {"tol_nd", &Tolerances::tol_nd},
        {"homogeneity", &Tolerances::homogeneity},
        {"euler", &Tolerances::euler},
        {"cartan_trace", &Tolerances::cartan_trace},
        {"randers_margin", &Tolerances::randers_margin},
        {"torsion", &Tolerances::torsion},
        {"compatibility", &Tolerances::compatibility},
        {"closedness", &Tolerances::closedness},
        {"preservation", &Tolerances::preservation},
        {"equivalence", &Tolerances::equivalence},
        {"exactness", &Tolerances::exactness},
        {"darboux", &Tolerances::darboux},
        {"chart", &Tolerances::chart},
        {"minkowski", &Tolerances::minkowski},
        {"berwald", &Tolerances::berwald},
        {"curvature_fd", &Tolerances::curvature_fd},
        {"bianchi", &Tolerances::bianchi},
        {"two_path", &Tolerances::two_path},
        {"pair_symmetry", &Tolerances::pair_symmetry},
    };
    return table;
  }

  /// Returns false for an unknown name.
  bool set(const std::string& name, double value) {
    const auto& t = fields();
    auto it = t.find(name);
    if (it == t.end()) return false;
    this->*(it->second) = value;
    return true;
  }
};

}  // namespace finsym
