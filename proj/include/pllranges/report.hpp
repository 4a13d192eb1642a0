#pragma once

#include <json.hpp>

#include "pllranges/equilibria.hpp"
#include "pllranges/interval_union.hpp"
#include "pllranges/model.hpp"
#include "pllranges/ranges.hpp"
#include "pllranges/sim.hpp"
#include "pllranges/stability.hpp"

// Structured reports. Key order is fixed so output is byte-stable.
namespace pllranges::report {

using Json = nlohmann::ordered_json;

// Finite numbers as numbers, infinities as the strings "inf" / "-inf".
Json number(double v);
Json vector(const Eigen::VectorXd& v);

Json loop(const PllModel& model);
Json realization(const FilterRealization& fr);
Json equilibrium(const Equilibrium& eq);
Json intervals(const IntervalUnion& set);
Json hold_in(const HoldInResult& res, const HoldInFrequency& freq);
Json slips(const SlipReport& rep);
Json lock(const LockVerdict& v);
Json integrator(const IntegratorConfig& cfg);
Json pull_in(const PullInResult& res, const StateBox& box);
Json lock_in(const LockInResult& res);
Json band(const BandResult& res);

}  // namespace pllranges::report
