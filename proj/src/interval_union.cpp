#include "pllranges/interval_union.hpp"

#include <algorithm>

namespace pllranges {

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& iv) {
    return !(iv.hi > iv.lo) && !(iv.hi == iv.lo && iv.lo_closed && iv.hi_closed);
  });
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.lo_closed && !b.lo_closed);
  });
  for (const Interval& iv : pieces) {
    if (!intervals_.empty()) {
      Interval& last = intervals_.back();
      const bool joins = iv.lo < last.hi || (iv.lo == last.hi && (last.hi_closed || iv.lo_closed));
      if (joins) {
        if (iv.hi > last.hi) {
          last.hi = iv.hi;
          last.hi_closed = iv.hi_closed;
        } else if (iv.hi == last.hi) {
          last.hi_closed = last.hi_closed || iv.hi_closed;
        }
        continue;
      }
    }
    intervals_.push_back(iv);
  }
}

bool IntervalUnion::contains(double w) const { return find(w) != nullptr; }

const Interval* IntervalUnion::find(double w) const {
  for (const Interval& iv : intervals_)
    if (iv.contains(w)) return &iv;
  return nullptr;
}

}  // namespace pllranges
