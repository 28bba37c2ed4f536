#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsym/errors.hpp"

namespace finsym {

/// Axis-aligned box minus a list of excluded open balls (singular loci).
class DomainBox {
 public:
  struct Interval {
    double lower;
    double upper;
  };
  struct Ball {
    std::vector<double> center;
    double radius;
  };

  DomainBox() = default;

  DomainBox(std::vector<Interval> intervals, std::vector<Ball> excluded = {})
      : intervals_(std::move(intervals)), excluded_(std::move(excluded)) {
    for (const auto& iv : intervals_)
      if (!(iv.lower < iv.upper)) throw std::invalid_argument("domain interval has empty interior");
    for (const auto& b : excluded_)
      if (b.center.size() != intervals_.size() || !(b.radius >= 0.0))
        throw std::invalid_argument("excluded ball does not match domain dimension");
  }

  /// The box [lower, upper]^dim.
  static DomainBox cube(std::size_t dim, double lower, double upper) {
    return DomainBox(std::vector<Interval>(dim, Interval{lower, upper}));
  }

  /// Unbounded in every coordinate.
  static DomainBox whole(std::size_t dim) {
    return cube(dim, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  }

  std::size_t dimension() const noexcept { return intervals_.size(); }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  const std::vector<Ball>& excluded() const noexcept { return excluded_; }

  bool contains(std::span<const double> x) const {
    if (x.size() != intervals_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] >= intervals_[i].lower && x[i] <= intervals_[i].upper)) return false;
    for (const auto& b : excluded_) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - b.center[i]) * (x[i] - b.center[i]);
      if (d2 < b.radius * b.radius) return false;
    }
    return true;
  }

  /// Whether the whole box [lo, hi] stays inside the intervals and clear of
  /// every excluded ball.
  bool contains_box(std::span<const double> lo, std::span<const double> hi) const {
    if (lo.size() != intervals_.size() || hi.size() != intervals_.size()) return false;
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] < intervals_[i].lower || hi[i] > intervals_[i].upper) return false;
    for (const auto& b : excluded_) {
      double d2 = 0.0;  // distance from ball center to nearest box point
      for (std::size_t i = 0; i < lo.size(); ++i) {
        const double c = std::clamp(b.center[i], lo[i], hi[i]);
        d2 += (c - b.center[i]) * (c - b.center[i]);
      }
      if (d2 < b.radius * b.radius) return false;
    }
    return true;
  }

  void require(std::span<const double> x, const std::string& what) const {
    if (!contains(x)) throw DomainError(what + " outside its declared domain");
  }

 private:
  std::vector<Interval> intervals_;
  std::vector<Ball> excluded_;
};

}  // namespace finsym
