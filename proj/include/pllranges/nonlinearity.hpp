#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace pllranges {

enum class PdKind {
  sinusoidal_half,          // 0.5 sin(theta)
  sinusoidal_double_eighth, // 0.125 sin(2 theta)
  sinusoidal_double_half,   // 0.5 sin(2 theta)
  sinusoidal_unit,          // sin(theta)
  tabulated,                // periodic piecewise-cubic table
};

std::string_view pd_kind_name(PdKind kind);
std::optional<PdKind> pd_kind_from_name(std::string_view name);

// Periodic phase detector characteristic. Immutable; copies share the table.
class PdCharacteristic {
 public:
  // `period` is the declared period and must agree with the kind.
  static PdCharacteristic sinusoidal(PdKind kind, double period);

  // One period of samples: nodes strictly increasing within [nodes[0], nodes[0] + period).
  // Nodes listed in `nonsmooth` get one-sided slopes and reject derivative queries.
  static PdCharacteristic tabulated(std::vector<double> nodes, std::vector<double> values,
                                    double period, std::vector<double> nonsmooth = {});

  double eval(double theta) const;
  double derivative(double theta) const;
  // Integral of the characteristic from 0 to theta.
  double integral(double theta) const;
  bool smooth_at(double theta) const;

  PdKind kind() const noexcept { return kind_; }
  double period() const noexcept { return period_; }
  double amplitude_max() const noexcept { return amplitude_max_; }
  bool odd() const noexcept { return odd_; }

  // Representative of theta in [-period/2, period/2).
  double wrap(double theta) const;

 private:
  struct Table;

  PdCharacteristic() = default;

  PdKind kind_ = PdKind::sinusoidal_half;
  double period_ = 0.0;
  double gain_ = 0.0;
  double freq_ = 0.0;
  double amplitude_max_ = 0.0;
  bool odd_ = false;
  std::shared_ptr<const Table> table_;
};

}  // namespace pllranges
