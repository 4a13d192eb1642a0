#pragma once

#include <vector>

namespace pllranges {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double w) const {
    return (w > lo || (lo_closed && w == lo)) && (w < hi || (hi_closed && w == hi));
  }
};

// Sorted, disjoint, nonempty intervals.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  // Sorts and merges overlapping or touching pieces; drops empty ones.
  explicit IntervalUnion(std::vector<Interval> pieces);

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  bool empty() const noexcept { return intervals_.empty(); }
  std::size_t size() const noexcept { return intervals_.size(); }
  bool contains(double w) const;
  // Interval containing w, or nullptr.
  const Interval* find(double w) const;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace pllranges
