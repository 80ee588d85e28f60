#include "loadbal/instance_json.hpp"

#include "loadbal/error.hpp"

namespace loadbal {

using nlohmann::json;

json rational_json(const Rational& value) { return to_string(value); }

json price_json(const ExtendedRational& value) { return to_string(value); }

json decimal_json(const Rational& value) { return to_double(value); }

json decimal_json(const ExtendedRational& value) {
  if (!value.is_finite()) return nullptr;
  return to_double(value.value());
}

Rational rational_from_json(const json& value, std::string_view where) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return parse_rational(value.dump());
    if (value.is_number_float()) return parse_rational(value.dump());
  } catch (const ParseError& e) {
    throw ParseError(std::string(where) + ": " + e.what());
  }
  throw ParseError(std::string(where) + ": expected a rational (\"p/q\" string or number)");
}

namespace {

Rational positive_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing \"" + key + "\"");
  }
  Rational v = rational_from_json(obj.at(key), where + "." + key);
  if (!is_positive(v)) throw ParseError(where + "." + key + ": must be positive");
  return v;
}

}  // namespace

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("instance: expected a JSON object");
  if (!doc.contains("machines") || !doc.at("machines").is_array()) {
    throw ParseError("instance: missing \"machines\" array");
  }
  if (!doc.contains("jobs") || !doc.at("jobs").is_array()) {
    throw ParseError("instance: missing \"jobs\" array");
  }
  Instance instance;
  const auto& machines = doc.at("machines");
  if (machines.empty()) throw ParseError("machines: at least one machine is required");
  for (std::size_t i = 0; i < machines.size(); ++i) {
    std::string where = "machines[" + std::to_string(i) + "]";
    Machine m = Machine::truthful(positive_field(machines[i], "speed", where));
    if (machines[i].contains("claimed")) m.claimed_speed = positive_field(machines[i], "claimed", where);
    instance.machines.push_back(std::move(m));
  }
  const auto& jobs = doc.at("jobs");
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    std::string where = "jobs[" + std::to_string(j) + "]";
    Job job = Job::truthful(positive_field(jobs[j], "size", where));
    if (jobs[j].contains("reported")) job.reported_size = positive_field(jobs[j], "reported", where);
    instance.jobs.push_back(std::move(job));
  }
  if (doc.contains("seed")) {
    const auto& seed = doc.at("seed");
    if (!seed.is_number_integer() || seed.get<long long>() < 0) {
      throw ParseError("seed: expected a nonnegative integer");
    }
    instance.seed = seed.get<std::uint64_t>();
  }
  return instance;
}

Instance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return instance_from_json(doc);
}

json instance_to_json(const Instance& instance) {
  json machines = json::array();
  for (const auto& m : instance.machines) {
    json entry{{"speed", rational_json(m.true_speed)}};
    if (m.claimed_speed != m.true_speed) entry["claimed"] = rational_json(m.claimed_speed);
    machines.push_back(std::move(entry));
  }
  json jobs = json::array();
  for (const auto& job : instance.jobs) {
    json entry{{"size", rational_json(job.true_size)}};
    if (job.reported_size != job.true_size) entry["reported"] = rational_json(job.reported_size);
    jobs.push_back(std::move(entry));
  }
  return json{{"machines", std::move(machines)}, {"jobs", std::move(jobs)}, {"seed", instance.seed}};
}

json mechanism_json(const MechanismSpec& spec) {
  json out{{"name", spec.name()}};
  if (spec.kind == MechanismKind::Ppr) {
    out["rounding_base"] = rational_json(spec.ppr.rounding_base);
    out["cost_tie_rule"] = to_string(spec.ppr.cost_tie_rule);
    if (!spec.ppr.gate_speed_classes) out["gate_speed_classes"] = false;
  }
  return out;
}

MechanismSpec mechanism_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("name")) throw ParseError("mechanism: missing \"name\"");
  MechanismSpec spec = MechanismSpec::parse(doc.at("name").get<std::string>());
  if (doc.contains("rounding_base")) {
    spec.ppr.rounding_base = rational_from_json(doc.at("rounding_base"), "mechanism.rounding_base");
  }
  if (doc.contains("cost_tie_rule")) {
    spec.ppr.cost_tie_rule = parse_cost_tie_rule(doc.at("cost_tie_rule").get<std::string>());
  }
  if (doc.contains("gate_speed_classes")) {
    spec.ppr.gate_speed_classes = doc.at("gate_speed_classes").get<bool>();
  }
  return spec;
}

json outcome_to_json(const MechanismOutcome& outcome, const MechanismSpec& spec,
                     const TieBreakOrder& order) {
  json steps = json::array();
  for (const auto& step : outcome.steps) {
    json prices = json::array(), prices_decimal = json::array();
    for (const auto& p : step.prices) {
      prices.push_back(price_json(p));
      prices_decimal.push_back(decimal_json(p));
    }
    json makespans = json::array(), makespans_decimal = json::array();
    for (const auto& c : step.makespans) {
      makespans.push_back(rational_json(c));
      makespans_decimal.push_back(decimal_json(c));
    }
    steps.push_back(json{{"job", step.job},
                         {"prices", std::move(prices)},
                         {"prices_decimal", std::move(prices_decimal)},
                         {"chosen", step.chosen.index},
                         {"charge", rational_json(step.charge)},
                         {"charge_decimal", decimal_json(step.charge)},
                         {"makespans", std::move(makespans)},
                         {"makespans_decimal", std::move(makespans_decimal)}});
  }
  json machines = json::array();
  for (const auto& m : outcome.state.machines()) {
    machines.push_back(json{{"announced_speed", rational_json(m.announced_speed)},
                            {"true_speed", rational_json(m.true_speed)},
                            {"workload", rational_json(m.workload)},
                            {"makespan", rational_json(m.makespan)},
                            {"makespan_decimal", decimal_json(m.makespan)}});
  }
  json assignments = json::array();
  for (auto id : outcome.assignments()) assignments.push_back(id.index);
  json costs = json::array();
  for (const auto& c : outcome.job_costs) costs.push_back(rational_json(c));
  json payments = json::array();
  for (const auto& p : outcome.payments) {
    payments.push_back(p ? rational_json(*p) : json(nullptr));
  }
  json tie_break = json::array();
  for (auto id : order.permutation()) tie_break.push_back(id.index);
  return json{{"schema_version", kSchemaVersion},
              {"mechanism", mechanism_json(spec)},
              {"tie_break", std::move(tie_break)},
              {"steps", std::move(steps)},
              {"assignments", std::move(assignments)},
              {"machines", std::move(machines)},
              {"job_costs", std::move(costs)},
              {"alg_announced", rational_json(outcome.alg_announced)},
              {"alg_announced_decimal", decimal_json(outcome.alg_announced)},
              {"alg_true", rational_json(outcome.alg_true)},
              {"alg_true_decimal", decimal_json(outcome.alg_true)},
              {"payments", std::move(payments)}};
}

json opt_result_to_json(const OptResult& result) {
  json witness = json::array();
  for (auto id : result.witness) witness.push_back(id.index);
  json out{{"schema_version", kSchemaVersion},
           {"value", rational_json(result.value)},
           {"value_decimal", decimal_json(result.value)},
           {"exact", result.exact},
           {"lower_bound", rational_json(result.lower_bound)},
           {"upper_bound", rational_json(result.upper_bound)},
           {"nodes", result.nodes}};
  if (result.exact) out["witness"] = std::move(witness);
  return out;
}

}  // namespace loadbal
