#include "pllranges/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <json.hpp>

#include "pllranges/error.hpp"

namespace pllranges {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
  if (!parent.contains(key)) throw ConfigError(path, "missing " + path);
  const json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError(path, "expected an object");
  return v;
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "malformed number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "malformed number");
  return d;
}

std::vector<double> numbers_at(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number_at(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

double period_at(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "2pi") return 2.0 * std::numbers::pi;
    if (s == "pi") return std::numbers::pi;
    throw ConfigError(path, "malformed number '" + s + "' (use a number, \"pi\" or \"2pi\")");
  }
  const double p = number_at(v, path);
  if (!(p > 0.0)) throw ConfigError(path, "period must be positive");
  return p;
}

PdCharacteristic parse_pd(const json& pd) {
  reject_unknown(pd, "pd", {"kind", "period", "table"});
  if (!pd.contains("kind")) throw ConfigError("pd.kind", "missing pd.kind");
  if (!pd.at("kind").is_string()) throw ConfigError("pd.kind", "invalid pd kind");
  const auto name = pd.at("kind").get<std::string>();
  const auto kind = pd_kind_from_name(name);
  if (!kind) throw ConfigError("pd.kind", "invalid pd kind '" + name + "'");
  if (!pd.contains("period")) throw ConfigError("pd.period", "missing pd.period");
  const double period = period_at(pd.at("period"), "pd.period");

  if (*kind != PdKind::tabulated) {
    if (pd.contains("table")) throw ConfigError("pd.table", "table given for a sinusoidal kind");
    try {
      return PdCharacteristic::sinusoidal(*kind, period);
    } catch (const Error& e) {
      throw ConfigError("pd.period", e.what());
    }
  }
  const json& table = object_at(pd, "table", "pd.table");
  reject_unknown(table, "pd.table", {"nodes", "values", "nonsmooth"});
  if (!table.contains("nodes")) throw ConfigError("pd.table.nodes", "missing pd.table.nodes");
  if (!table.contains("values")) throw ConfigError("pd.table.values", "missing pd.table.values");
  auto nodes = numbers_at(table.at("nodes"), "pd.table.nodes");
  auto values = numbers_at(table.at("values"), "pd.table.values");
  std::vector<double> kinks;
  if (table.contains("nonsmooth")) kinks = numbers_at(table.at("nonsmooth"), "pd.table.nonsmooth");
  try {
    return PdCharacteristic::tabulated(std::move(nodes), std::move(values), period, std::move(kinks));
  } catch (const Error& e) {
    throw ConfigError("pd.table", e.what());
  }
}

std::string filter_key(Errc code) {
  switch (code) {
    case Errc::improper_transfer_function: return "filter.num";
    case Errc::degenerate_polynomial: return "filter.den";
    default: return "filter";
  }
}

}  // namespace

LoopSpec parse_config(std::string_view text) {
  json root;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
  if (blank) {
    root = json::object();
  } else {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("<root>", std::string("malformed document: ") + e.what());
    }
  }
  if (!root.is_object()) throw ConfigError("<root>", "expected an object");
  reject_unknown(root, "", {"pd", "filter", "loop", "description"});

  if (!root.contains("loop")) throw ConfigError("loop.L", "missing loop.L");
  const json& loop = object_at(root, "loop", "loop");
  reject_unknown(loop, "loop", {"L", "omega_delta_free"});
  if (!loop.contains("L")) throw ConfigError("loop.L", "missing loop.L");
  const double L = number_at(loop.at("L"), "loop.L");
  if (!(L > 0.0)) throw ConfigError("loop.L", "L must be positive");
  double omega = 0.0;
  if (loop.contains("omega_delta_free"))
    omega = number_at(loop.at("omega_delta_free"), "loop.omega_delta_free");

  if (root.contains("description") && !root.at("description").is_string())
    throw ConfigError("description", "expected a string");

  const PdCharacteristic pd = parse_pd(object_at(root, "pd", "pd"));

  const json& filter = object_at(root, "filter", "filter");
  reject_unknown(filter, "filter", {"num", "den", "realization"});
  if (!filter.contains("num")) throw ConfigError("filter.num", "missing filter.num");
  if (!filter.contains("den")) throw ConfigError("filter.den", "missing filter.den");
  auto num = numbers_at(filter.at("num"), "filter.num");
  auto den = numbers_at(filter.at("den"), "filter.den");
  std::optional<TransferFunction> tf;
  try {
    tf.emplace(std::move(num), std::move(den));
  } catch (const Error& e) {
    throw ConfigError(filter_key(e.code()), std::string(errc_name(e.code())) + ": " + e.what());
  }

  std::optional<FilterRealization> realization;
  if (filter.contains("realization")) {
    const json& r = object_at(filter, "realization", "filter.realization");
    reject_unknown(r, "filter.realization", {"A", "b", "c", "h"});
    for (const char* k : {"A", "b", "c", "h"})
      if (!r.contains(k))
        throw ConfigError(std::string("filter.realization.") + k,
                          std::string("missing filter.realization.") + k);
    const json& jA = r.at("A");
    if (!jA.is_array()) throw ConfigError("filter.realization.A", "expected an array of rows");
    const auto n = static_cast<Eigen::Index>(jA.size());
    Eigen::MatrixXd A(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string row_path = "filter.realization.A[" + std::to_string(i) + "]";
      const auto row = numbers_at(jA[static_cast<std::size_t>(i)], row_path);
      if (static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(row_path, "A must be square");
      for (Eigen::Index j = 0; j < n; ++j) A(i, j) = row[static_cast<std::size_t>(j)];
    }
    const auto b = numbers_at(r.at("b"), "filter.realization.b");
    const auto c = numbers_at(r.at("c"), "filter.realization.c");
    const double h = number_at(r.at("h"), "filter.realization.h");
    try {
      realization = custom_realization(*tf, A, Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())),
                                       Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())), h);
    } catch (const Error& e) {
      throw ConfigError("filter.realization", e.what());
    }
  }

  return LoopSpec{pd, *tf, L, omega, realization};
}

LoopSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pllranges
