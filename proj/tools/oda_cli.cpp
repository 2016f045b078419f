// Copyright 2026 The ODA Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oda/experiments.hpp"
#include "oda/io.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitCriterionFailed = 4;

std::optional<std::uint64_t> env_seed() {
  const char* value = std::getenv("ODA_SEED");
  if (!value) return std::nullopt;
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw oda::ValidationError("ODA_SEED is not an unsigned integer");
  }
}

std::map<std::string, std::string> parse_params(
    const std::vector<std::string>& raw) {
  std::map<std::string, std::string> params;
  for (const std::string& entry : raw) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw oda::ValidationError("--param expects key=value, got '" + entry +
                                 "'");
    }
    params[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return params;
}

std::int64_t param_int(const std::map<std::string, std::string>& params,
                       const std::string& key, std::int64_t fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw oda::ValidationError("--param " + key + " is not an integer");
  }
}

int cmd_run(const std::string& scenario_path, const std::string& out_path,
            std::optional<std::uint64_t> seed_flag) {
  const oda::Scenario scenario =
      oda::parse_scenario(oda::read_file(scenario_path));
  std::optional<std::uint64_t> seed = seed_flag;
  if (!seed) seed = env_seed();
  const oda::RunResult result = oda::execute_scenario(scenario, seed);
  oda::write_file(out_path, oda::serialize_result(result));
  oda::write_file(out_path + ".tsv",
                  oda::tabular_result(scenario.instance, result.outcome));
  std::cout << "welfare " << result.welfare.units() << ", deficit "
            << result.deficit_total << ", " << result.outcome.matching.pairs.size()
            << " trades -> " << out_path << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path) {
  oda::json config;
  try {
    config = oda::json::parse(oda::read_file(config_path));
  } catch (const oda::json::parse_error& e) {
    throw oda::ValidationError(std::string("experiment config parse error: ") +
                               e.what());
  }
  if (!config.is_object() || !config.contains("kind")) {
    throw oda::ValidationError("experiment config needs a 'kind' field");
  }
  const std::string kind = config.at("kind").get<std::string>();
  auto seed = config.value("seed", oda::experiments::kDefaultSeed);

  using namespace oda::experiments;
  std::vector<oda::CriterionResult> results;
  if (kind == "fig1-golden") {
    results.push_back(fig1_golden());
  } else if (kind == "lemma1") {
    results.push_back(lemma1_inclusion(config.value("trials", 1000), seed));
  } else if (kind == "greedy-ratio") {
    results.push_back(greedy_two_competitive(config.value("trials", 1000), seed));
  } else if (kind == "greedy-truthfulness") {
    results.push_back(greedy_truthfulness(config.value("instances", 200), seed));
  } else if (kind == "secretary-calibration") {
    results.push_back(secretary_calibration(config.value("n", 100),
                                            config.value("trials", 100000),
                                            seed));
  } else if (kind == "reduction-floor") {
    results.push_back(reduction_welfare_floor(config.value("trials", 10000), seed));
  } else if (kind == "corollary1-trend") {
    results.push_back(corollary1_trend(
        config.value("ks", std::vector<std::size_t>{1, 4, 16, 64}),
        config.value("trials", 2000), seed));
  } else if (kind == "reduction-truthfulness") {
    results.push_back(reduction_truthfulness(config.value("instances", 50),
                                             config.value("replications", 64),
                                             seed));
  } else if (kind == "theorem1-sweep") {
    results.push_back(theorem1_sweep(
        config.value("big_bids", std::vector<std::int64_t>{10, 100, 1000, 10000})));
  } else if (kind == "decomposition-structure") {
    results.push_back(decomposition_structure(config.value("trials", 500), seed));
  } else if (kind == "all") {
    results.push_back(fig1_golden());
    results.push_back(lemma1_inclusion(config.value("trials", 1000), seed));
    results.push_back(greedy_two_competitive(config.value("trials", 1000), seed));
    results.push_back(greedy_truthfulness(config.value("instances", 200), seed));
    results.push_back(secretary_calibration(100, config.value("calibration_trials", 100000), seed));
    results.push_back(reduction_welfare_floor(config.value("floor_trials", 10000), seed));
    results.push_back(corollary1_trend({1, 4, 16, 64}, config.value("trend_trials", 2000), seed));
    results.push_back(reduction_truthfulness(config.value("instances_crn", 50),
                                             config.value("replications", 64), seed));
    results.push_back(theorem1_sweep());
    results.push_back(decomposition_structure(config.value("structure_trials", 500), seed));
  } else {
    throw oda::ValidationError("unknown experiment kind '" + kind + "'");
  }

  bool all_pass = true;
  oda::json criteria = oda::json::array();
  for (const oda::CriterionResult& r : results) {
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  ("
              << r.detail << ")\n";
    criteria.push_back({{"detail", r.detail},
                        {"name", r.name},
                        {"pass", r.pass},
                        {"report", r.report}});
  }
  const oda::json report{{"criteria", criteria},
                         {"kind", kind},
                         {"schema_version", 1},
                         {"seed", seed}};
  oda::write_file(out_path, report.dump(2) + "\n");
  return all_pass ? 0 : kExitCriterionFailed;
}

int cmd_generate(const std::string& kind,
                 const std::map<std::string, std::string>& params,
                 const std::string& out_path) {
  const std::uint64_t default_seed =
      env_seed().value_or(oda::experiments::kDefaultSeed);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(param_int(params, "seed",
                                           static_cast<std::int64_t>(default_seed)));
  oda::Scenario scenario;
  if (kind == "fig1") {
    scenario.instance = oda::fig1_instance();
    scenario.mechanism.kind = oda::MechanismKind::greedy;
    scenario.mechanism.tie_seed = 0;
    scenario.master_seed = seed;
  } else if (kind == "theorem1") {
    scenario.instance = oda::theorem1_family(
        oda::Money(param_int(params, "v", 100)));
    scenario.mechanism.kind = oda::MechanismKind::match_at_arrival;
    scenario.master_seed = seed;
  } else if (kind == "random-patient") {
    scenario.instance = oda::random_patient_instance(
        seed, static_cast<std::size_t>(param_int(params, "na", 4)),
        static_cast<std::size_t>(param_int(params, "nb", 4)),
        param_int(params, "lo", 1), param_int(params, "hi", 9));
    scenario.mechanism.kind = oda::MechanismKind::greedy;
    scenario.mechanism.tie_seed = seed;
    scenario.master_seed = seed;
  } else if (kind == "rising-market") {
    oda::RisingMarketParams rp;
    rp.populated_sub_markets =
        static_cast<int>(param_int(params, "subs", rp.populated_sub_markets));
    rp.t = param_int(params, "t", rp.t);
    rp.sellers_per_sub_market =
        static_cast<int>(param_int(params, "sellers", rp.sellers_per_sub_market));
    rp.buyers_per_sub_market =
        static_cast<int>(param_int(params, "buyers", rp.buyers_per_sub_market));
    rp.value_lo = param_int(params, "lo", rp.value_lo);
    rp.value_hi = param_int(params, "hi", rp.value_hi);
    rp.drift = param_int(params, "drift", rp.drift);
    scenario.instance = oda::rising_market_scenario(seed, rp);
    scenario.mechanism.kind = oda::MechanismKind::decomposition;
    scenario.mechanism.sub_market_length = rp.t;
    scenario.mechanism.tie_seed = seed;
    scenario.master_seed = seed;
  } else {
    throw oda::ValidationError("unknown scenario kind '" + kind + "'");
  }
  oda::write_file(out_path, oda::serialize_scenario(scenario));
  std::cout << kind << " scenario (" << scenario.instance.seller_count()
            << " asks, " << scenario.instance.buyer_count() << " bids) -> "
            << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online double auction laboratory"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute one scenario");
  std::string run_scenario;
  std::string run_out;
  std::optional<std::uint64_t> run_seed;
  run->add_option("--scenario", run_scenario, "scenario file")->required();
  run->add_option("--out", run_out, "result file")->required();
  run->add_option("--seed", run_seed, "override the master seed");

  auto* experiment = app.add_subcommand("experiment", "run an analysis sweep");
  std::string experiment_config;
  std::string experiment_out;
  experiment->add_option("--config", experiment_config, "experiment config file")
      ->required();
  experiment->add_option("--out", experiment_out, "report file")->required();

  auto* generate = app.add_subcommand("generate", "emit a scenario file");
  std::string generate_kind;
  std::string generate_out;
  std::vector<std::string> generate_params;
  generate
      ->add_option("--kind", generate_kind,
                   "random-patient | rising-market | theorem1 | fig1")
      ->required();
  generate->add_option("--out", generate_out, "scenario file")->required();
  generate->add_option("--param,--params", generate_params,
                       "key=value (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_scenario, run_out, run_seed);
    if (experiment->parsed()) return cmd_experiment(experiment_config, experiment_out);
    if (generate->parsed()) {
      return cmd_generate(generate_kind, parse_params(generate_params),
                          generate_out);
    }
  } catch (const oda::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const oda::PreconditionError& e) {
    std::cerr << "mechanism error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const oda::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
