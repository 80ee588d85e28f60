#pragma once

#include <string_view>

#include <json.hpp>

#include "loadbal/core.hpp"
#include "loadbal/mechanism.hpp"
#include "loadbal/opt.hpp"

namespace loadbal {

inline constexpr int kSchemaVersion = 1;

// Rationals go out as "p/q" strings, with a separate decimal field for
// plotting where the caller wants one.
nlohmann::json rational_json(const Rational& value);
nlohmann::json price_json(const ExtendedRational& value);  // "inf" for infinity
nlohmann::json decimal_json(const Rational& value);
nlohmann::json decimal_json(const ExtendedRational& value);  // null for infinity

// Accepts "p/q" / decimal strings and JSON integers; floating-point JSON
// numbers are read through their shortest decimal form.
Rational rational_from_json(const nlohmann::json& value, std::string_view where);

// {"machines":[{"speed":..}], "jobs":[{"size":..}], "seed":<int>}. Machines
// may carry an optional "claimed" speed and jobs an optional "reported" size.
// Throws ParseError naming the offending field.
Instance instance_from_json(const nlohmann::json& doc);
Instance parse_instance(std::string_view text);
nlohmann::json instance_to_json(const Instance& instance);

nlohmann::json mechanism_json(const MechanismSpec& spec);
MechanismSpec mechanism_from_json(const nlohmann::json& doc);

nlohmann::json outcome_to_json(const MechanismOutcome& outcome, const MechanismSpec& spec,
                               const TieBreakOrder& order);
nlohmann::json opt_result_to_json(const OptResult& result);

}  // namespace loadbal
