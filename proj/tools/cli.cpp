#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "loadbal/error.hpp"
#include "loadbal/experiment.hpp"
#include "loadbal/instance_json.hpp"
#include "loadbal/payments.hpp"

namespace loadbal::cli {

namespace {

using nlohmann::json;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string rounding_base = "2";
  std::string out_path;
  std::string format;  // empty: command default
};

std::string read_text(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  buf << in.rdbuf();
  return buf.str();
}

Instance load_instance(const std::string& path, const Globals& g) {
  Instance instance;
  try {
    instance = parse_instance(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (g.seed) instance.seed = *g.seed;
  return instance;
}

MechanismSpec make_mechanism(const std::string& name, const Globals& g,
                             const std::string& tie_rule, const std::string& mutate) {
  MechanismSpec spec = MechanismSpec::parse(name);
  spec.ppr.rounding_base = parse_rational(g.rounding_base);
  if (spec.ppr.rounding_base < 1) throw InvalidInput("--rounding-base must be at least 1");
  if (!tie_rule.empty()) spec.ppr.cost_tie_rule = parse_cost_tie_rule(tie_rule);
  if (mutate == "drop-infinite-prices") {
    spec.ppr.gate_speed_classes = false;
  } else if (!mutate.empty()) {
    throw InvalidInput("unknown mutation \"" + mutate + "\"");
  }
  return spec;
}

std::string format_or(const Globals& g, const char* fallback,
                      std::initializer_list<const char*> allowed) {
  std::string f = g.format.empty() ? fallback : g.format;
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw InvalidInput("format \"" + f + "\" is not supported by this command");
}

// Emits to --out when given, otherwise to `out`.
void emit(const Globals& g, std::ostream& out, const std::string& text) {
  if (g.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(g.out_path);
  if (!file) throw InvalidInput("cannot write " + g.out_path);
  file << text;
}

std::string json_text(const json& doc) { return doc.dump(2) + "\n"; }

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size()) throw InvalidInput("bad list entry \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

struct FamilyArgs {
  std::string family = "random";
  std::size_t m = 4;
  std::size_t n = 16;
  std::string epsilon = "1/4";
  std::string p_min = "1";
  std::string p_max = "16";
  std::string speed_max = "1024";
  bool raw_speeds = false;

  void attach(CLI::App* app, bool with_m) {
    app->add_option("--family", family, "hardness|greedy_counter|random|bounded|unit")
        ->capture_default_str();
    if (with_m) app->add_option("--m", m, "machine count")->capture_default_str();
    app->add_option("--n", n, "job count")->capture_default_str();
    app->add_option("--epsilon", epsilon, "greedy_counter epsilon")->capture_default_str();
    app->add_option("--p-min", p_min, "bounded family minimum size")->capture_default_str();
    app->add_option("--p-max", p_max, "maximum size")->capture_default_str();
    app->add_option("--speed-max", speed_max, "maximum speed")->capture_default_str();
    app->add_flag("--raw-speeds", raw_speeds, "draw speeds off the power-of-2 grid");
  }

  FamilySpec spec(std::uint64_t seed) const {
    FamilySpec s;
    s.family = parse_family(family);
    s.m = m;
    s.n = n;
    s.seed = seed;
    s.epsilon = parse_rational(epsilon);
    s.p_min = parse_rational(p_min);
    s.p_max = parse_rational(p_max);
    s.speed_max = parse_rational(speed_max);
    s.raw_speeds = raw_speeds;
    s.validate();
    return s;
  }
};

struct OptArgs {
  std::size_t max_jobs = OptOptions{}.max_jobs;
  std::uint64_t node_budget = OptOptions{}.node_budget;

  void attach(CLI::App* app) {
    app->add_option("--max-jobs", max_jobs, "exact search limit on job count")
        ->capture_default_str();
    app->add_option("--node-budget", node_budget, "exact search node budget")
        ->capture_default_str();
  }

  OptOptions options(Execution execution) const {
    OptOptions o;
    o.max_jobs = max_jobs;
    o.node_budget = node_budget;
    o.execution = execution;
    return o;
  }
};

int cmd_run(const Globals& g, std::ostream& out, const std::string& path,
            const std::string& mechanism, const std::string& tie_rule) {
  const Instance instance = load_instance(path, g);
  const MechanismSpec spec = make_mechanism(mechanism, g, tie_rule, "");
  const TieBreakOrder order = fixed_ordering(instance.seed, instance.machine_count());
  const MechanismOutcome outcome = run_mechanism(instance, spec, order);
  if (format_or(g, "json", {"json", "csv"}) == "json") {
    emit(g, out, json_text(outcome_to_json(outcome, spec, order)));
    return kOk;
  }
  std::ostringstream csv;
  csv << "job,machine,reported_size,true_size,charge,cost\n";
  for (const auto& rec : outcome.state.log()) {
    csv << rec.job << ',' << rec.machine.index << ',' << to_string(rec.reported_size) << ','
        << to_string(rec.true_size) << ',' << to_string(rec.charge) << ','
        << to_string(outcome.job_costs[rec.job]) << '\n';
  }
  emit(g, out, csv.str());
  return kOk;
}

int cmd_opt(const Globals& g, std::ostream& out, const std::string& path, const OptArgs& args) {
  const Instance instance = load_instance(path, g);
  const Rational base = parse_rational(g.rounding_base);
  const OptSandwich s = opt2_sandwich(instance, base, args.options(Execution::Parallel));
  json doc = opt_result_to_json(s.opt);
  doc["rounding_base"] = rational_json(base);
  json rounded = opt_result_to_json(s.opt_rounded);
  rounded.erase("schema_version");
  doc["rounded"] = std::move(rounded);
  format_or(g, "json", {"json"});
  emit(g, out, json_text(doc));
  return kOk;
}

struct VerifyArgs {
  std::string path;
  std::string property;
  std::string mechanism = "ppr";
  std::string mutate;
  std::string basis;
  std::optional<std::size_t> machine;
  std::optional<std::size_t> job;
  std::string replay;
  bool suite = false;
  std::size_t suite_seeds = 20;
  std::size_t suite_m_max = 6;
  std::size_t suite_n = 12;
  std::string cx_dir;
};

int cmd_verify(const Globals& g, std::ostream& out, std::ostream& err, const VerifyArgs& a) {
  format_or(g, "json", {"json"});
  const MechanismSpec spec = make_mechanism(a.mechanism, g, "", a.mutate);

  if (a.suite) {
    SuiteConfig config;
    const std::uint64_t first = g.seed.value_or(0);
    for (std::size_t k = 0; k < a.suite_seeds; ++k) config.seeds.push_back(first + k);
    config.m_max = a.suite_m_max;
    config.n = a.suite_n;
    config.mechanism = spec;
    const SuiteResult result = run_verify_suite(config);
    json doc = suite_to_json(result);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    if (!a.cx_dir.empty()) {
      json paths = json::array();
      for (std::size_t k = 0; k < result.failures.size(); ++k) {
        const std::string file = a.cx_dir + "/counterexample_" + std::to_string(k) + ".json";
        std::ofstream cx(file);
        if (!cx) throw InvalidInput("cannot write " + file);
        cx << json_text(*result.failures[k].counterexample);
        paths.push_back(file);
        err << "counterexample written to " << file << "\n";
      }
      doc["counterexample_paths"] = std::move(paths);
    }
    emit(g, out, json_text(doc));
    return result.ok() ? kOk : kCheckFailed;
  }

  VerificationReport report;
  if (!a.replay.empty()) {
    json doc;
    try {
      doc = json::parse(read_text(a.replay));
    } catch (const json::parse_error& e) {
      throw ParseError(a.replay + ": malformed JSON: " + e.what());
    }
    report = replay_counterexample(doc);
  } else {
    if (a.path.empty()) throw InvalidInput("verify needs an instance, --suite or --replay");
    if (a.property.empty()) throw InvalidInput("verify needs --property");
    const Instance instance = load_instance(a.path, g);
    VerifyOptions options;
    options.execution = Execution::Parallel;
    if (!a.basis.empty()) options.basis = parse_speed_basis(a.basis);
    if (a.machine) options.machine = MachineId{*a.machine};
    if (a.job) options.job = *a.job;
    report = verify_property(instance, spec, parse_property(a.property), options);
  }
  json doc = report_to_json(report);
  doc["schema_version"] = kSchemaVersion;
  emit(g, out, json_text(doc));
  return report.failed() ? kCheckFailed : kOk;
}

int cmd_payments(const Globals& g, std::ostream& out, const std::string& path,
                 const std::string& mechanism, std::size_t machine, std::size_t grid_points) {
  const Instance instance = load_instance(path, g);
  const MechanismSpec spec = make_mechanism(mechanism, g, "", "");
  CurveOptions options;
  options.grid_points = grid_points;
  options.execution = Execution::Parallel;
  const WorkloadCurve curve = workload_curve(instance, spec, MachineId{machine}, options);
  const auto rows = payment_table(curve);
  if (format_or(g, "csv", {"csv", "json"}) == "json") {
    json table = json::array();
    for (const auto& r : rows) {
      table.push_back(json{{"b", rational_json(r.b)},
                           {"L", rational_json(r.load)},
                           {"P", rational_json(r.payment.value)},
                           {"utility_truth", rational_json(r.utility_truth)},
                           {"utility_best_lie", rational_json(r.utility_best_lie)},
                           {"truncated", r.payment.truncated}});
    }
    emit(g, out,
         json_text(json{{"schema_version", kSchemaVersion},
                        {"machine", machine},
                        {"non_increasing", curve.is_non_increasing()},
                        {"rows", std::move(table)}}));
    return kOk;
  }
  std::ostringstream csv;
  csv << "b,L,P,utility_truth,utility_best_lie,truncated,b_decimal,L_decimal,P_decimal,"
         "utility_truth_decimal,utility_best_lie_decimal\n";
  for (const auto& r : rows) {
    csv << to_string(r.b) << ',' << to_string(r.load) << ',' << to_string(r.payment.value) << ','
        << to_string(r.utility_truth) << ',' << to_string(r.utility_best_lie) << ','
        << (r.payment.truncated ? "true" : "false") << ',' << decimal_string(r.b) << ','
        << decimal_string(r.load) << ',' << decimal_string(r.payment.value) << ','
        << decimal_string(r.utility_truth) << ',' << decimal_string(r.utility_best_lie) << '\n';
  }
  emit(g, out, csv.str());
  return kOk;
}

json row_json(const ExperimentRow& r) {
  auto verdict = [](const std::optional<Verdict>& v) {
    return v ? json(to_string(*v)) : json(nullptr);
  };
  return json{{"mechanism", r.mechanism},
              {"family", to_string(r.family)},
              {"m", r.m},
              {"n", r.n},
              {"seed", r.seed},
              {"alg", rational_json(r.alg)},
              {"opt", opt_result_to_json(r.opt)},
              {"opt2", opt_result_to_json(r.opt2)},
              {"ratio", r.ratio ? rational_json(*r.ratio) : json(nullptr)},
              {"ratio_low", rational_json(r.ratio_low)},
              {"ratio_high", rational_json(r.ratio_high)},
              {"wb_strong", verdict(r.wb_strong)},
              {"wb_weak", verdict(r.wb_weak)},
              {"fair", verdict(r.fair)},
              {"anonymous", verdict(r.anonymous)},
              {"runtime_ms", r.runtime_ms}};
}

int cmd_sweep(const Globals& g, std::ostream& out, const FamilyArgs& family,
              const std::string& m_list, std::size_t seeds, const std::string& mechanism,
              const OptArgs& opt, bool timing, bool no_checks) {
  SweepConfig config;
  config.family = family.spec(0);
  config.m_list = parse_size_list(m_list);
  if (config.m_list.empty()) throw InvalidInput("--m-list is empty");
  const std::uint64_t first = g.seed.value_or(0);
  for (std::size_t k = 0; k < seeds; ++k) config.seeds.push_back(first + k);
  config.mechanism = make_mechanism(mechanism, g, "", "");
  config.cell.opt = opt.options(Execution::Serial);
  config.cell.timing = timing;
  config.cell.check_properties = !no_checks;
  const auto rows = sweep(config, Execution::Parallel);
  if (format_or(g, "csv", {"csv", "json"}) == "csv") {
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    emit(g, out, csv.str());
    return kOk;
  }
  json cells = json::array();
  for (const auto& r : rows) cells.push_back(row_json(r));
  json summary = json::array();
  for (const auto& s : summarize(rows)) {
    summary.push_back(json{{"m", s.m},
                           {"cells", s.cells},
                           {"inexact_cells", s.inexact_cells},
                           {"max_ratio", s.max_ratio ? rational_json(*s.max_ratio) : json(nullptr)},
                           {"mean_ratio",
                            s.mean_ratio ? rational_json(*s.mean_ratio) : json(nullptr)}});
  }
  emit(g, out,
       json_text(json{{"schema_version", kSchemaVersion}, {"rows", cells}, {"summary", summary}}));
  return kOk;
}

int cmd_gen(const Globals& g, std::ostream& out, const FamilyArgs& family) {
  format_or(g, "json", {"json"});
  const Instance instance = generate(family.spec(g.seed.value_or(0)));
  emit(g, out, json_text(instance_to_json(instance)));
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online load balancing mechanisms on related machines"};
  app.name("loadbal");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for tie-break orders and generators");
  app.add_option("--rounding-base", g.rounding_base, "speed rounding base for ppr")
      ->capture_default_str();
  app.add_option("--out", g.out_path, "write output to this file");
  app.add_option("--format", g.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string instance_path, mechanism = "ppr", tie_rule;

  auto* run = app.add_subcommand("run", "run a mechanism and print its trace");
  run->add_option("instance", instance_path, "instance JSON file, - for stdin")->required();
  run->add_option("--mechanism", mechanism, "ppr|vcg|greedy-identical|greedy-true")
      ->capture_default_str();
  run->add_option("--tie-rule", tie_rule, "prefer-faster|prefer-slower|prefer-order");

  OptArgs opt_args;
  auto* opt = app.add_subcommand("opt", "offline optimum and its rounded counterpart");
  opt->add_option("instance", instance_path, "instance JSON file, - for stdin")->required();
  opt_args.attach(opt);

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "check a property of a mechanism");
  verify->add_option("instance", verify_args.path, "instance JSON file, - for stdin");
  verify->add_option("--property", verify_args.property,
                     "wb-strong|wb-weak|fair|anon|mono-machine|truth-job");
  verify->add_option("--mechanism", verify_args.mechanism)->capture_default_str();
  verify->add_option("--mutate", verify_args.mutate, "drop-infinite-prices");
  verify->add_option("--basis", verify_args.basis, "announced|true");
  verify->add_option("--machine", verify_args.machine, "mono-machine: only this machine");
  verify->add_option("--job", verify_args.job, "truth-job: only this job");
  verify->add_option("--replay", verify_args.replay, "re-run a counterexample JSON file");
  verify->add_flag("--suite", verify_args.suite, "run the full property battery");
  verify->add_option("--suite-seeds", verify_args.suite_seeds)->capture_default_str();
  verify->add_option("--suite-m-max", verify_args.suite_m_max)->capture_default_str();
  verify->add_option("--suite-n", verify_args.suite_n)->capture_default_str();
  verify->add_option("--counterexample-dir", verify_args.cx_dir,
                     "write suite counterexamples here");

  std::size_t machine = 0, grid_points = CurveOptions{}.grid_points;
  auto* payments = app.add_subcommand("payments", "workload curve and payments of one machine");
  payments->add_option("instance", instance_path, "instance JSON file, - for stdin")->required();
  payments->add_option("--machine", machine, "machine id (0-based)")->required();
  payments->add_option("--mechanism", mechanism)->capture_default_str();
  payments->add_option("--grid-points", grid_points, "samples for unrounded mechanisms")
      ->capture_default_str();

  FamilyArgs sweep_family;
  std::string m_list = "2,4,8";
  std::size_t seeds = 10;
  bool timing = false, no_checks = false;
  OptArgs sweep_opt;
  auto* sweep_cmd = app.add_subcommand("sweep", "ratio experiment over m and seeds");
  sweep_family.attach(sweep_cmd, false);
  sweep_cmd->add_option("--m-list", m_list, "comma-separated machine counts")
      ->capture_default_str();
  sweep_cmd->add_option("--seeds", seeds, "seeds per m, starting at --seed")
      ->capture_default_str();
  sweep_cmd->add_option("--mechanism", mechanism)->capture_default_str();
  sweep_cmd->add_flag("--timing", timing, "report wall-clock runtime_ms");
  sweep_cmd->add_flag("--no-checks", no_checks, "skip the per-cell property checks");
  sweep_opt.attach(sweep_cmd);

  FamilyArgs gen_family;
  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen_family.attach(gen, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  if (app.count("--seed") > 0) g.seed = seed;

  try {
    if (*run) return cmd_run(g, out, instance_path, mechanism, tie_rule);
    if (*opt) return cmd_opt(g, out, instance_path, opt_args);
    if (*verify) return cmd_verify(g, out, err, verify_args);
    if (*payments) return cmd_payments(g, out, instance_path, mechanism, machine, grid_points);
    if (*sweep_cmd) {
      return cmd_sweep(g, out, sweep_family, m_list, seeds, mechanism, sweep_opt, timing,
                       no_checks);
    }
    if (*gen) return cmd_gen(g, out, gen_family);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kBadInput;
}

}  // namespace loadbal::cli
