#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pllranges {

enum class Errc {
  invalid_argument,
  improper_transfer_function,
  non_coprime,
  degenerate_polynomial,
  state_dimension,
  nonsmooth_point,
  symmetry_unavailable,
  not_an_equilibrium,
  unsupported_pole_multiplicity,
  nonsmooth_linearization_point,
  integration_failure,
  odd_characteristic_required,
  scalar_filter_required,
  no_stable_equilibria,
  degenerate_locus,
  config,
};

// Stable machine-readable token for an error code, e.g. "non-coprime".
std::string_view errc_name(Errc code);

// All library failures are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Configuration problems carry the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& message);
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace pllranges
