#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace pllranges::detail {

template <class F>
std::vector<double> periodic_roots(F&& f, double period, int grid, double ftol) {
  const double start = -period / 2.0;
  const double step = period / grid;
  auto sample = [&](double t) -> std::optional<double> {
    try {
      return f(t);
    } catch (...) {
      return std::nullopt;
    }
  };
  std::vector<std::optional<double>> vals(static_cast<std::size_t>(grid) + 1);
  for (int k = 0; k <= grid; ++k) vals[static_cast<std::size_t>(k)] = sample(start + k * step);

  std::vector<double> out;
  for (int k = 0; k < grid; ++k) {
    const auto fa = vals[static_cast<std::size_t>(k)];
    const auto fb = vals[static_cast<std::size_t>(k) + 1];
    if (!fa || !fb) continue;
    if (std::abs(*fa) <= ftol) {
      out.push_back(start + k * step);
      continue;
    }
    if (std::abs(*fb) <= ftol || (*fa < 0.0) == (*fb < 0.0)) continue;
    double lo = start + k * step, hi = lo + step;
    double flo = *fa;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      const auto fm = sample(mid);
      if (!fm) break;
      if (std::abs(*fm) <= ftol || mid == lo || mid == hi) break;
      if ((*fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = *fm;
      } else {
        hi = mid;
      }
    }
    out.push_back(mid);
  }
  return out;
}

}  // namespace pllranges::detail
