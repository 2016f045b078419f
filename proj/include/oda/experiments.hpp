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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oda/decomposition.hpp"
#include "oda/greedy.hpp"
#include "oda/harness.hpp"
#include "oda/io.hpp"
#include "oda/market.hpp"
#include "oda/onesided.hpp"
#include "oda/oracle.hpp"
#include "oda/reduction.hpp"

namespace oda {

/// One verifiable claim evaluated at fixed parameters and seed.
struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  json report = json::object();
  long invariant_checked_runs = 0;  // runs that passed the global invariants
};

namespace experiments {

constexpr std::uint64_t kDefaultSeed = 2026;

inline AuctionFactory secretary_single_factory() {
  return [](AuctionConfig config, Rng) { return make_secretary_single(config); };
}

inline AuctionFactory secretary_k_factory() {
  return [](AuctionConfig config, Rng rng) {
    return make_secretary_k(config, rng);
  };
}

// -- 1. Fig. 1 golden regression --------------------------------------------

inline CriterionResult fig1_golden() {
  CriterionResult result;
  result.name = "fig1 golden regression";
  const Instance inst = fig1_instance();
  const Outcome outcome = run_greedy(inst, 0);
  check_run_invariants(inst, outcome);
  ++result.invariant_checked_runs;

  const std::vector<MatchedPair> expected_pairs{
      {TraderId{1}, TraderId{5}},
      {TraderId{2}, TraderId{6}},
      {TraderId{3}, TraderId{7}}};
  const std::map<TraderId, Money> expected_payments{
      {TraderId{1}, Money(5)}, {TraderId{2}, Money(5)}, {TraderId{3}, Money(6)},
      {TraderId{5}, Money(2)}, {TraderId{6}, Money(3)}, {TraderId{7}, Money(5)}};
  bool ok = outcome.matching.pairs == expected_pairs;
  for (const auto& [id, amount] : expected_payments) {
    ok = ok && outcome.payments.at(id) == amount;
  }
  ok = ok && outcome.payments.at(TraderId{4}) == Money(0) &&
       outcome.payments.at(TraderId{8}) == Money(0);
  ok = ok && deficit(outcome) == 6 &&
       social_welfare(inst, outcome) == Money(25);
  result.pass = ok;
  result.detail = ok ? "matching ((2,7),(3,4),(5,6)), payments and deficit 6 exact"
                     : "mismatch against the hand-derived outcome";
  result.report = {{"welfare", social_welfare(inst, outcome).units()},
                   {"deficit", deficit(outcome)}};
  return result;
}

// -- shared generator for the greedy sweeps ---------------------------------

inline Instance greedy_sweep_instance(const Rng& master, int trial,
                                      std::size_t max_asks) {
  Rng trial_rng = master.fork(static_cast<std::uint64_t>(trial));
  const std::size_t n_asks = 1 + trial_rng.below(max_asks);
  const std::size_t n_bids = 1 + trial_rng.below(n_asks);  // demand <= supply
  return random_patient_instance(trial_rng.fork(9).root_seed(), n_asks, n_bids,
                                 1, 9);
}

// -- 2. Lemma 1: optimally matched asks are greedily matched ------------------

inline CriterionResult lemma1_inclusion(int trials = 1000,
                                        std::uint64_t seed = kDefaultSeed) {
  CriterionResult result;
  result.name = "lemma 1 ask-multiset inclusion";
  const Rng master(seed);
  int failures = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const Instance inst = greedy_sweep_instance(master, trial, 12);
    const Outcome outcome = run_greedy(inst, master.fork(trial).fork(1).root_seed());
    check_run_invariants(inst, outcome);
    ++result.invariant_checked_runs;
    const OracleResult opt = optimal_patient(inst);
    std::vector<std::int64_t> opt_asks;
    for (const MatchedPair& p : opt.matching.pairs) {
      opt_asks.push_back(inst.trader(p.ask).valuation.units());
    }
    std::vector<std::int64_t> greedy_asks;
    for (const MatchedPair& p : outcome.matching.pairs) {
      greedy_asks.push_back(inst.trader(p.ask).valuation.units());
    }
    std::sort(opt_asks.begin(), opt_asks.end());
    std::sort(greedy_asks.begin(), greedy_asks.end());
    if (!std::includes(greedy_asks.begin(), greedy_asks.end(),
                       opt_asks.begin(), opt_asks.end())) {
      ++failures;
    }
  }
  result.pass = failures == 0;
  std::ostringstream detail;
  detail << trials - failures << "/" << trials
         << " trials with optimal ask values contained in the greedy set";
  result.detail = detail.str();
  result.report = {{"trials", trials}, {"failures", failures}};
  return result;
}

// -- 3. Exact 2-competitiveness of the greedy mechanism ----------------------

inline CriterionResult greedy_two_competitive(int trials = 1000,
                                              std::uint64_t seed = kDefaultSeed) {
  CriterionResult result;
  result.name = "greedy 2-competitiveness";
  const Rng master(seed);
  int counter = 0;  // replays the lemma-1 instance stream in order
  const ExperimentReport report = competitive_experiment(
      [&](const Instance& inst, std::uint64_t replay_seed) {
        const Outcome outcome = run_greedy(inst, replay_seed);
        check_run_invariants(inst, outcome);
        ++result.invariant_checked_runs;
        return outcome;
      },
      [&](std::uint64_t) { return greedy_sweep_instance(master, counter++, 12); },
      [](const Instance& inst) { return optimal_patient(inst); }, trials, seed);
  result.pass = report.all_ratios_at_least(1, 2);
  std::ostringstream detail;
  detail << "min ratio " << report.min_ratio_ppm() << " ppm over " << trials
         << " trials (exact bound 500000)";
  result.detail = detail.str();
  result.report = {{"trials", trials},
                   {"min_ratio_ppm", report.min_ratio_ppm()},
                   {"mean_ratio_ppm", report.mean_ratio_ppm()}};
  return result;
}

// -- 4. Exact truthfulness of the greedy mechanism ---------------------------

inline CriterionResult greedy_truthfulness(int instances = 200,
                                           std::uint64_t seed = kDefaultSeed) {
  CriterionResult result;
  result.name = "greedy truthfulness (exact)";
  const Rng master(seed);
  const DeviationGrid grid;
  int failures = 0;
  long deviations = 0;
  for (int i = 0; i < instances; ++i) {
    Rng inst_rng = master.fork(static_cast<std::uint64_t>(i));
    const std::size_t n_asks = 1 + inst_rng.below(8);
    const std::size_t n_bids = 1 + inst_rng.below(n_asks);
    const Instance inst = random_patient_instance(inst_rng.fork(9).root_seed(),
                                                  n_asks, n_bids, 1, 9);
    for (std::uint64_t tie_seed : {inst_rng.next_u64(), inst_rng.next_u64()}) {
      const TruthfulnessReport report = test_truthfulness(
          [&, tie_seed](const Instance& in, std::uint64_t) {
            return run_greedy(in, tie_seed);
          },
          inst, grid, /*replications=*/1, seed);
      if (!report.all_pass) ++failures;
      result.invariant_checked_runs += report.runs;
      for (const TraderVerdict& v : report.verdicts) deviations += v.evaluated;
    }
  }
  result.pass = failures == 0;
  std::ostringstream detail;
  detail << deviations << " deviations across " << instances
         << " instances x 2 tie seeds, " << failures << " profitable";
  result.detail = detail.str();
  result.report = {{"instances", instances},
                   {"deviations", deviations},
                   {"failures", failures}};
  return result;
}

// -- 5. Secretary calibration ------------------------------------------------

inline CriterionResult secretary_calibration(std::size_t n = 100,
                                             int trials = 100000,
                                             std::uint64_t seed = kDefaultSeed) {
  CriterionResult result;
  result.name = "secretary single-choice calibration";
  Rng rng(seed);
  std::vector<Money> values;
  for (std::size_t v = 1; v <= n; ++v) values.push_back(Money(static_cast<std::int64_t>(v)));
  int best_selected = 0;
  for (int trial = 0; trial < trials; ++trial) {
    rng.shuffle(values);
    SecretarySingle auction(AuctionConfig{n, 1});
    const auto decisions = run_onesided(auction, values);
    for (std::size_t i = 0; i < n; ++i) {
      if (decisions[i].selected && values[i].units() == static_cast<std::int64_t>(n)) {
        ++best_selected;
      }
    }
  }
  const double p = static_cast<double>(best_selected) / trials;
  const double inv_e = 1.0 / std::exp(1.0);
  result.pass = p >= inv_e - 0.02 && p <= inv_e + 0.05;
  std::ostringstream detail;
  detail << "P(select max) = " << p << " over " << trials
         << " permutations, band [" << inv_e - 0.02 << ", " << inv_e + 0.05
         << "]";
  result.detail = detail.str();
  result.report = {{"trials", trials},
                   {"p_select_max_ppm",
                    static_cast<std::int64_t>(best_selected) * 1'000'000 / trials}};
  return result;
}

// -- 6. Welfare floor of the reduction ---------------------------------------

inline CriterionResult reduction_welfare_floor(int trials = 10000,
                                               std::uint64_t seed = kDefaultSeed) {
  CriterionResult result;
  result.name = "reduction welfare floor";
  const Rng master(seed);
  int failures = 0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng trial_rng = master.fork(static_cast<std::uint64_t>(trial));
    const bool single = trial % 2 == 0;
    const std::size_t n_asks = single ? 1 : 2 + trial_rng.below(5);
    const std::size_t n_bids = 1 + trial_rng.below(single ? 8 : 10);
    const Instance inst = random_patient_instance(trial_rng.fork(9).root_seed(),
                                                  n_asks, n_bids, 1, 99);
    const AuctionFactory factory =
        single ? secretary_single_factory() : secretary_k_factory();
    const ReductionResult run = run_reduction(
        inst, factory, ReductionConfig{}, Rng(trial_rng.fork(1).root_seed()));
    check_run_invariants(inst, run.outcome);
    ++result.invariant_checked_runs;
    if (!welfare_floor_check(inst, run.trace, run.outcome)) ++failures;
  }
  result.pass = failures == 0;
  std::ostringstream detail;
  detail << trials - failures << "/" << trials
         << " trials with W(M_A) >= W(selected set), both plugged auctions";
  result.detail = detail.str();
  result.report = {{"trials", trials}, {"failures", failures}};
  return result;
}

// -- 7. Corollary-1 trend -----------------------------------------------------

inline CriterionResult corollary1_trend(std::vector<std::size_t> ks = {1, 4, 16, 64},
                                        int trials = 2000,
                                        std::uint64_t seed = kDefaultSeed) {
  CriterionResult result;
  result.name = "corollary 1 ratio trend";
  const Rng master(seed);
  std::vector<std::int64_t> mean_ppm;
  for (std::size_t k : ks) {
    std::int64_t sum_ppm = 0;
    for (int trial = 0; trial < trials; ++trial) {
      Rng trial_rng = master.fork(k * 1000003 + static_cast<std::uint64_t>(trial));
      const Instance inst = random_patient_instance(
          trial_rng.fork(9).root_seed(), k, 3 * k, 1, 99);
      const ReductionResult run =
          run_reduction(inst, secretary_k_factory(), ReductionConfig{},
                        Rng(trial_rng.fork(1).root_seed()));
      check_run_invariants(inst, run.outcome);
      ++result.invariant_checked_runs;
      const Money mech = social_welfare(inst, run.outcome);
      const Money opt = optimal_patient(inst).welfare;
      sum_ppm += opt == Money(0) ? 1'000'000
                                 : mech.units() * 1'000'000 / opt.units();
    }
    mean_ppm.push_back(sum_ppm / trials);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < mean_ppm.size(); ++i) {
    monotone = monotone && mean_ppm[i] >= mean_ppm[i - 1];
  }
  const std::int64_t k1_bound_ppm =
      static_cast<std::int64_t>((1.0 / std::exp(1.0) - 0.03) * 1'000'000);
  const bool k1_ok = mean_ppm.empty() || ks.front() != 1 ||
                     mean_ppm.front() >= k1_bound_ppm;
  result.pass = monotone && k1_ok;
  std::ostringstream detail;
  detail << "mean ratios (ppm):";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    detail << " k=" << ks[i] << ":" << mean_ppm[i];
  }
  detail << (monotone ? ", non-decreasing" : ", NOT monotone");
  result.detail = detail.str();
  json per_k = json::array();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    per_k.push_back({{"k", ks[i]}, {"mean_ratio_ppm", mean_ppm[i]}});
  }
  result.report = {{"trials_per_k", trials}, {"means", per_k}};
  return result;
}

// -- 8. CRN truthfulness of the reduction -------------------------------------

inline CriterionResult reduction_truthfulness(int instances = 50,
                                              int replications = 64,
                                              std::uint64_t seed = kDefaultSeed) {
  CriterionResult result;
  result.name = "reduction truthfulness (CRN)";
  const Rng master(seed);
  const DeviationGrid grid;
  int failures = 0;
  long deviations = 0;
  for (int i = 0; i < instances; ++i) {
    Rng inst_rng = master.fork(static_cast<std::uint64_t>(i));
    const bool single = i % 2 == 0;
    const std::size_t n_asks = single ? 1 : 2 + inst_rng.below(3);
    const std::size_t n_bids = 1 + inst_rng.below(6);
    const Instance inst = random_patient_instance(inst_rng.fork(9).root_seed(),
                                                  n_asks, n_bids, 1, 9);
    const AuctionFactory factory =
        single ? secretary_single_factory() : secretary_k_factory();
    const TruthfulnessReport report = test_truthfulness(
        [&](const Instance& in, std::uint64_t replay_seed) {
          return run_reduction(in, factory, ReductionConfig{}, Rng(replay_seed))
              .outcome;
        },
        inst, grid, replications, inst_rng.next_u64());
    if (!report.all_pass) ++failures;
    result.invariant_checked_runs += report.runs;
    for (const TraderVerdict& v : report.verdicts) deviations += v.evaluated;
  }
  result.pass = failures == 0;
  std::ostringstream detail;
  detail << deviations << " deviations x " << replications << " replays over "
         << instances << " instances, " << failures << " dominating";
  result.detail = detail.str();
  result.report = {{"instances", instances},
                   {"replications", replications},
                   {"deviations", deviations},
                   {"failures", failures}};
  return result;
}

// -- 9. Theorem-1 demonstration -----------------------------------------------

inline CriterionResult theorem1_sweep(
    std::vector<std::int64_t> big_bids = {10, 100, 1000, 10000}) {
  CriterionResult result;
  result.name = "theorem 1 family sweep";
  bool ok = true;
  json rows = json::array();
  std::int64_t prev_num = -1;
  std::int64_t prev_den = -1;
  for (std::int64_t v : big_bids) {
    const Instance inst = theorem1_family(Money(v));
    const Matching matching = match_at_arrival(inst);
    const Money mech = welfare_of_matching(inst, matching);
    const Money opt = optimal_general(inst).welfare;
    ok = ok && mech == Money(2) && opt == Money(v);
    if (prev_num >= 0) {
      // strictly decreasing: mech/opt < prev ratio
      ok = ok && mech.units() * prev_den < prev_num * opt.units();
    }
    prev_num = mech.units();
    prev_den = opt.units();
    rows.push_back({{"V", v},
                    {"mech_welfare", mech.units()},
                    {"oracle_welfare", opt.units()}});
  }
  result.pass = ok;
  result.detail = ok ? "ratio exactly 2/V for every V, strictly decreasing"
                     : "family ratios deviate from 2/V";
  result.report = {{"rows", rows}};
  return result;
}

// -- 10. Decomposition structure ----------------------------------------------

inline CriterionResult decomposition_structure(int trials = 500,
                                               std::uint64_t seed = kDefaultSeed) {
  CriterionResult result;
  result.name = "decomposition structure";
  const Rng master(seed);
  int failures = 0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng trial_rng = master.fork(static_cast<std::uint64_t>(trial));
    RisingMarketParams params;
    params.populated_sub_markets = 2 + static_cast<int>(trial_rng.below(3));
    params.t = trial_rng.coin() ? 4 : 8;
    params.sellers_per_sub_market = 1 + static_cast<int>(trial_rng.below(3));
    params.buyers_per_sub_market =
        1 + static_cast<int>(trial_rng.below(
                static_cast<std::uint64_t>(params.sellers_per_sub_market)));
    params.drift = static_cast<std::int64_t>(trial_rng.below(4));
    const Instance inst =
        rising_market_scenario(trial_rng.fork(9).root_seed(), params);
    const std::uint64_t tie_seed = trial_rng.next_u64();
    const DecompositionResult run = decompose(
        inst, params.t,
        [&](const Instance& local, EventLog* log) {
          return run_greedy(local, tie_seed, log);
        });
    bool ok = true;
    // Windows tile [0, T].
    const auto& subs = run.sub_markets;
    ok = ok && !subs.empty() && subs.front().lo == TimePoint(0) &&
         subs.back().hi == inst.horizon();
    for (std::size_t i = 1; i < subs.size(); ++i) {
      ok = ok && subs[i].lo == subs[i - 1].hi;
    }
    // Routed sellers contain their window; buyer copies overlap theirs.
    std::map<TraderId, int> matches_per_trader;
    for (const SubMarket& sub : subs) {
      for (TraderId id : sub.sellers) {
        const Trader& s = inst.trader(id);
        ok = ok && s.arrival <= sub.lo && sub.hi <= s.departure;
      }
      for (TraderId id : sub.buyers) {
        const Trader& b = inst.trader(id);
        ok = ok && intervals_overlap(b.arrival, b.departure, sub.lo, sub.hi);
      }
    }
    for (const MatchedPair& p : run.outcome.matching.pairs) {
      ++matches_per_trader[p.ask];
      ++matches_per_trader[p.bid];
    }
    for (const auto& [id, count] : matches_per_trader) ok = ok && count == 1;
    try {
      check_run_invariants(inst, run.outcome);
      ++result.invariant_checked_runs;
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) ++failures;
  }

  // Degenerate split: one sub-market reproduces the direct greedy run.
  int degenerate_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Rng trial_rng = master.fork(777000 + static_cast<std::uint64_t>(trial));
    const std::size_t n_asks = 1 + trial_rng.below(6);
    const std::size_t n_bids = 1 + trial_rng.below(6);
    Instance inst = random_patient_instance(trial_rng.fork(9).root_seed(),
                                            n_asks, n_bids, 1, 9);
    const std::uint64_t tie_seed = trial_rng.next_u64();
    const std::int64_t t = 2 * inst.horizon().ticks();
    const DecompositionResult split = decompose(
        inst, t,
        [&](const Instance& local, EventLog* log) {
          return run_greedy(local, tie_seed, log);
        });
    const Outcome direct = run_greedy(inst, tie_seed);
    const bool same = split.outcome.matching == direct.matching &&
                      split.outcome.allocation == direct.allocation &&
                      split.outcome.payments == direct.payments;
    if (!same || split.sub_markets.size() != 1) ++degenerate_failures;
    ++result.invariant_checked_runs;
  }

  result.pass = failures == 0 && degenerate_failures == 0;
  std::ostringstream detail;
  detail << trials - failures << "/" << trials << " structural trials, "
         << 50 - degenerate_failures << "/50 degenerate splits identical";
  result.detail = detail.str();
  result.report = {{"trials", trials},
                   {"failures", failures},
                   {"degenerate_failures", degenerate_failures}};
  return result;
}

}  // namespace experiments
}  // namespace oda
