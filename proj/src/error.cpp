#include "pllranges/error.hpp"

namespace pllranges {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::improper_transfer_function: return "improper-transfer-function";
    case Errc::non_coprime: return "non-coprime";
    case Errc::degenerate_polynomial: return "degenerate-polynomial";
    case Errc::state_dimension: return "state-dimension";
    case Errc::nonsmooth_point: return "nonsmooth-point";
    case Errc::symmetry_unavailable: return "symmetry-unavailable";
    case Errc::not_an_equilibrium: return "not-an-equilibrium";
    case Errc::unsupported_pole_multiplicity: return "unsupported-pole-multiplicity";
    case Errc::nonsmooth_linearization_point: return "nonsmooth-linearization-point";
    case Errc::integration_failure: return "integration-failure";
    case Errc::odd_characteristic_required: return "odd-characteristic-required";
    case Errc::scalar_filter_required: return "scalar-filter-required";
    case Errc::no_stable_equilibria: return "no-stable-equilibria";
    case Errc::degenerate_locus: return "degenerate-locus";
    case Errc::config: return "config";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

ConfigError::ConfigError(std::string key_path, const std::string& message)
    : Error(Errc::config, key_path + ": " + message), key_path_(std::move(key_path)) {}

}  // namespace pllranges
