#include "pllranges/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pllranges/error.hpp"

namespace pllranges {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SineShape {
  double gain;
  double freq;
};

SineShape sine_shape(PdKind kind) {
  switch (kind) {
    case PdKind::sinusoidal_half: return {0.5, 1.0};
    case PdKind::sinusoidal_double_eighth: return {0.125, 2.0};
    case PdKind::sinusoidal_double_half: return {0.5, 2.0};
    case PdKind::sinusoidal_unit: return {1.0, 1.0};
    case PdKind::tabulated: break;
  }
  throw Error(Errc::invalid_argument, "not a sinusoidal kind");
}

}  // namespace

std::string_view pd_kind_name(PdKind kind) {
  switch (kind) {
    case PdKind::sinusoidal_half: return "sinusoidal-half";
    case PdKind::sinusoidal_double_eighth: return "sinusoidal-double-eighth";
    case PdKind::sinusoidal_double_half: return "sinusoidal-double-half";
    case PdKind::sinusoidal_unit: return "sinusoidal-unit";
    case PdKind::tabulated: return "tabulated";
  }
  return "unknown";
}

std::optional<PdKind> pd_kind_from_name(std::string_view name) {
  for (PdKind k : {PdKind::sinusoidal_half, PdKind::sinusoidal_double_eighth,
                   PdKind::sinusoidal_double_half, PdKind::sinusoidal_unit, PdKind::tabulated}) {
    if (pd_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

// Cubic Hermite segments over one period, indexed from nodes[0].
struct PdCharacteristic::Table {
  std::vector<double> t;        // n+1 nodes, last = t[0] + period
  std::vector<double> v;        // n+1 values, last = v[0]
  std::vector<double> m_right;  // slope used leaving node i
  std::vector<double> m_left;   // slope used arriving at node i
  std::vector<bool> kink;
  std::vector<double> cumulative;  // integral from t[0] to t[i]

  // Power-basis coefficients of segment i in s = (theta - t[i]) / h.
  void coeffs(std::size_t i, double c[4]) const {
    const double h = t[i + 1] - t[i];
    const double v0 = v[i], v1 = v[i + 1];
    const double m0 = m_right[i] * h, m1 = m_left[i + 1] * h;
    c[0] = v0;
    c[1] = m0;
    c[2] = 3.0 * (v1 - v0) - 2.0 * m0 - m1;
    c[3] = 2.0 * (v0 - v1) + m0 + m1;
  }

  std::size_t segment(double u) const {
    auto it = std::upper_bound(t.begin(), t.end() - 1, u);
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    return i == 0 ? 0 : std::min(i - 1, t.size() - 2);
  }

  double segment_integral(std::size_t i, double s) const {
    double c[4];
    coeffs(i, c);
    const double h = t[i + 1] - t[i];
    return h * s * (c[0] + s * (c[1] / 2.0 + s * (c[2] / 3.0 + s * c[3] / 4.0)));
  }
};

PdCharacteristic PdCharacteristic::sinusoidal(PdKind kind, double period) {
  const SineShape shape = sine_shape(kind);
  const double natural = kTwoPi / shape.freq;
  if (!(std::abs(period - natural) <= 1e-9 * natural)) {
    std::ostringstream os;
    os << "declared period " << period << " does not match " << pd_kind_name(kind)
       << " (period " << natural << ")";
    throw Error(Errc::invalid_argument, os.str());
  }
  PdCharacteristic pd;
  pd.kind_ = kind;
  pd.period_ = natural;
  pd.gain_ = shape.gain;
  pd.freq_ = shape.freq;
  pd.amplitude_max_ = shape.gain;
  pd.odd_ = true;
  return pd;
}

PdCharacteristic PdCharacteristic::tabulated(std::vector<double> nodes, std::vector<double> values,
                                             double period, std::vector<double> nonsmooth) {
  const std::size_t n = nodes.size();
  if (n < 3 || values.size() != n)
    throw Error(Errc::invalid_argument, "table needs at least 3 nodes and one value per node");
  if (!(period > 0.0) || !std::isfinite(period))
    throw Error(Errc::invalid_argument, "period must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(nodes[i]) || !std::isfinite(values[i]))
      throw Error(Errc::invalid_argument, "table entries must be finite");
    if (i > 0 && !(nodes[i] > nodes[i - 1]))
      throw Error(Errc::invalid_argument, "table nodes must be strictly increasing");
  }
  if (!(nodes.back() < nodes.front() + period))
    throw Error(Errc::invalid_argument, "table nodes must lie within one period");

  auto table = std::make_shared<Table>();
  table->t = nodes;
  table->t.push_back(nodes.front() + period);
  table->v = values;
  table->v.push_back(values.front());
  table->kink.assign(n + 1, false);

  for (double k : nonsmooth) {
    double u = k - nodes.front();
    u -= period * std::floor(u / period);
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(u - (nodes[i] - nodes.front())) <= 1e-12 * period) {
        table->kink[i] = true;
        found = true;
      }
    }
    if (!found) throw Error(Errc::invalid_argument, "nonsmooth point is not a table node");
  }
  table->kink[n] = table->kink[0];

  // Periodic neighbours of node i.
  auto node = [&](std::ptrdiff_t i) {
    const auto ni = static_cast<std::ptrdiff_t>(n);
    std::ptrdiff_t k = ((i % ni) + ni) % ni;
    double shift = period * static_cast<double>((i - k) / ni);
    return std::pair<double, double>{nodes[k] + shift, values[k]};
  };
  table->m_left.resize(n + 1);
  table->m_right.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    auto [tp, vp] = node(ii - 1);
    auto [tc, vc] = node(ii);
    auto [tn, vn] = node(ii + 1);
    const double back = (vc - vp) / (tc - tp);
    const double fwd = (vn - vc) / (tn - tc);
    if (table->kink[i]) {
      table->m_left[i] = back;
      table->m_right[i] = fwd;
    } else {
      const double central = (vn - vp) / (tn - tp);
      table->m_left[i] = central;
      table->m_right[i] = central;
    }
  }

  table->cumulative.assign(n + 1, 0.0);
  double amp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    table->cumulative[i + 1] = table->cumulative[i] + table->segment_integral(i, 1.0);
    double c[4];
    table->coeffs(i, c);
    amp = std::max({amp, std::abs(table->v[i]), std::abs(table->v[i + 1])});
    // Interior extrema: roots of c1 + 2 c2 s + 3 c3 s^2 in (0, 1).
    const double qa = 3.0 * c[3], qb = 2.0 * c[2], qc = c[1];
    std::vector<double> roots;
    if (std::abs(qa) < 1e-300) {
      if (std::abs(qb) > 1e-300) roots.push_back(-qc / qb);
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        roots.push_back((-qb + sq) / (2.0 * qa));
        roots.push_back((-qb - sq) / (2.0 * qa));
      }
    }
    for (double s : roots) {
      if (s > 0.0 && s < 1.0) amp = std::max(amp, std::abs(c[0] + s * (c[1] + s * (c[2] + s * c[3]))));
    }
  }

  PdCharacteristic pd;
  pd.kind_ = PdKind::tabulated;
  pd.period_ = period;
  pd.amplitude_max_ = amp;
  pd.table_ = std::move(table);

  bool odd = true;
  const double tol = 1e-12 * std::max(1.0, amp);
  for (int i = 0; i < 1000 && odd; ++i) {
    const double th = period * (static_cast<double>(i) + 0.5) / 1000.0 - period / 2.0;
    odd = std::abs(pd.eval(th) + pd.eval(-th)) <= tol;
  }
  pd.odd_ = odd;
  return pd;
}

double PdCharacteristic::wrap(double theta) const {
  double r = theta - period_ * std::floor(theta / period_ + 0.5);
  if (r >= period_ / 2.0) r -= period_;
  if (r < -period_ / 2.0) r += period_;
  return r;
}

double PdCharacteristic::eval(double theta) const {
  if (!table_) return gain_ * std::sin(freq_ * std::remainder(theta, period_));
  const Table& tb = *table_;
  double u = theta - tb.t[0];
  u = tb.t[0] + (u - period_ * std::floor(u / period_));
  const std::size_t i = tb.segment(u);
  const double s = (u - tb.t[i]) / (tb.t[i + 1] - tb.t[i]);
  double c[4];
  tb.coeffs(i, c);
  return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
}

double PdCharacteristic::derivative(double theta) const {
  if (!table_) return gain_ * freq_ * std::cos(freq_ * std::remainder(theta, period_));
  if (!smooth_at(theta)) throw Error(Errc::nonsmooth_point, "nonsmooth point");
  const Table& tb = *table_;
  double u = theta - tb.t[0];
  u = tb.t[0] + (u - period_ * std::floor(u / period_));
  const std::size_t i = tb.segment(u);
  const double h = tb.t[i + 1] - tb.t[i];
  const double s = (u - tb.t[i]) / h;
  double c[4];
  tb.coeffs(i, c);
  return (c[1] + s * (2.0 * c[2] + s * 3.0 * c[3])) / h;
}

double PdCharacteristic::integral(double theta) const {
  if (!table_) {
    return gain_ * (1.0 - std::cos(freq_ * std::remainder(theta, period_))) / freq_;
  }
  const Table& tb = *table_;
  const double per_period = tb.cumulative.back();
  auto primitive = [&](double th) {
    const double u = th - tb.t[0];
    const double k = std::floor(u / period_);
    const double w = tb.t[0] + (u - period_ * k);
    const std::size_t i = tb.segment(w);
    const double s = (w - tb.t[i]) / (tb.t[i + 1] - tb.t[i]);
    return k * per_period + tb.cumulative[i] + tb.segment_integral(i, s);
  };
  return primitive(theta) - primitive(0.0);
}

bool PdCharacteristic::smooth_at(double theta) const {
  if (!table_) return true;
  const Table& tb = *table_;
  double u = theta - tb.t[0];
  u -= period_ * std::floor(u / period_);
  const double tol = 1e-12 * period_;
  for (std::size_t i = 0; i + 1 < tb.t.size(); ++i) {
    if (!tb.kink[i]) continue;
    const double d = std::abs(u - (tb.t[i] - tb.t[0]));
    if (d <= tol || std::abs(d - period_) <= tol) return false;
  }
  return true;
}

}  // namespace pllranges
