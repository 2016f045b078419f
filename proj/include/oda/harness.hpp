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
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oda/market.hpp"
#include "oda/money.hpp"
#include "oda/oracle.hpp"
#include "oda/rng.hpp"

namespace oda {

/// i.i.d. integer valuations in [value_lo, value_hi]; sellers span the whole
/// horizon, buyers arrive at random ticks with short random windows. Seller
/// ids are 1..n_asks, buyer ids follow.
inline Instance random_patient_instance(std::uint64_t seed,
                                        std::size_t n_asks,
                                        std::size_t n_bids,
                                        std::int64_t value_lo,
                                        std::int64_t value_hi) {
  if (value_lo > value_hi) {
    throw ValidationError("random_patient_instance: empty value range");
  }
  constexpr std::int64_t kHorizon = 50;
  Rng rng(seed);
  std::vector<Trader> sellers;
  std::vector<Trader> buyers;
  std::uint32_t id = 1;
  for (std::size_t i = 0; i < n_asks; ++i) {
    sellers.push_back(Trader{TraderId{id++}, Role::seller,
                             Money(rng.range(value_lo, value_hi)),
                             TimePoint(0), TimePoint(kHorizon)});
  }
  for (std::size_t i = 0; i < n_bids; ++i) {
    const std::int64_t arrive = rng.range(1, kHorizon - 1);
    const std::int64_t depart = std::min(arrive + rng.range(0, 3), kHorizon - 1);
    buyers.push_back(Trader{TraderId{id++}, Role::buyer,
                            Money(rng.range(value_lo, value_hi)),
                            TimePoint(arrive), TimePoint(depart)});
  }
  return Instance::create(std::move(sellers), std::move(buyers),
                          /*patient_sellers=*/true, TimePoint(kHorizon));
}

/// The canonical worked example, shipped as scenario kind "fig1": asks
/// {2,3,5,8} (ids 1..4) against bids 7,4,6,3 (ids 5..8) arriving in that
/// order at ticks 1..4.
inline Instance fig1_instance() {
  std::vector<Trader> sellers;
  std::vector<Trader> buyers;
  const std::int64_t ask_values[] = {2, 3, 5, 8};
  const std::int64_t bid_values[] = {7, 4, 6, 3};
  for (std::uint32_t i = 0; i < 4; ++i) {
    sellers.push_back(Trader{TraderId{i + 1}, Role::seller,
                             Money(ask_values[i]), TimePoint(0), TimePoint(10)});
    buyers.push_back(Trader{TraderId{i + 5}, Role::buyer, Money(bid_values[i]),
                            TimePoint(i + 1), TimePoint(i + 1)});
  }
  return Instance::create(std::move(sellers), std::move(buyers),
                          /*patient_sellers=*/true, TimePoint(10));
}

/// The adversarial family behind the impossibility demonstration: one cheap
/// long-lived ask, a small early bid, and a large bid arriving only after
/// the early one departs. A mechanism that matches at arrival commits to the
/// small bid and strands the large one, with welfare ratio exactly 2/V.
inline Instance theorem1_family(Money big_bid) {
  if (big_bid < Money(10)) {
    throw PreconditionError("theorem1_family requires V >= 10");
  }
  std::vector<Trader> sellers{
      Trader{TraderId{1}, Role::seller, Money(1), TimePoint(0), TimePoint(10)}};
  std::vector<Trader> buyers{
      Trader{TraderId{2}, Role::buyer, Money(2), TimePoint(1), TimePoint(2)},
      Trader{TraderId{3}, Role::buyer, big_bid, TimePoint(3), TimePoint(4)}};
  return Instance::create(std::move(sellers), std::move(buyers),
                          /*patient_sellers=*/false, TimePoint(10));
}

/// Deterministic match-at-arrival policy for general windowed instances:
/// each arriving bid takes the cheapest matchable unmatched ask, decided
/// irrevocably on arrival. Demonstration policy; no payments.
inline Matching match_at_arrival(const Instance& instance) {
  std::vector<const Trader*> asks;
  for (const Trader& s : instance.sellers()) asks.push_back(&s);
  std::sort(asks.begin(), asks.end(), [](const Trader* a, const Trader* b) {
    return std::tie(a->valuation, a->id) < std::tie(b->valuation, b->id);
  });
  std::vector<bool> used(asks.size(), false);
  std::vector<MatchedPair> pairs;
  for (const Trader& b : instance.buyers()) {
    for (std::size_t i = 0; i < asks.size(); ++i) {
      if (used[i]) continue;
      if (matchable(*asks[i], b)) {
        used[i] = true;
        pairs.push_back({asks[i]->id, b.id});
        break;
      }
    }
  }
  return matching_from_pairs(instance, std::move(pairs));
}

// ---------------------------------------------------------------------------
// Global run invariants
// ---------------------------------------------------------------------------

/// Asserts the invariants every mechanism run must satisfy: feasibility,
/// zero payments for unmatched traders, non-negative utilities for traders
/// who reported truthfully, and the welfare identity. `deviator` marks the
/// one trader whose report may differ from the supplied true types.
inline void check_run_invariants(const Instance& instance,
                                 const Outcome& outcome,
                                 std::optional<TraderId> deviator = {}) {
  if (!check_feasibility(outcome)) {
    throw Error("invariant violation: infeasible outcome");
  }
  auto check_trader = [&](const Trader& t) {
    const bool matched = outcome.allocation.at(t.id);
    if (!matched && outcome.payments.at(t.id) != Money(0)) {
      throw Error("invariant violation: unmatched trader #" +
                  std::to_string(t.id.value) + " has a payment");
    }
    if ((!deviator || *deviator != t.id) && utility(t, outcome) < 0) {
      throw Error("invariant violation: truthful trader #" +
                  std::to_string(t.id.value) + " has negative utility");
    }
  };
  for (const Trader& s : instance.sellers()) check_trader(s);
  for (const Trader& b : instance.buyers()) check_trader(b);

  std::int64_t sellers_total = 0;
  for (const Trader& s : instance.sellers()) sellers_total += s.valuation.units();
  std::int64_t gain = 0;
  for (const MatchedPair& p : outcome.matching.pairs) {
    gain += instance.trader(p.bid).valuation.units() -
            instance.trader(p.ask).valuation.units();
  }
  if (social_welfare(instance, outcome).units() != sellers_total + gain) {
    throw Error("invariant violation: welfare identity mismatch");
  }
}

// ---------------------------------------------------------------------------
// Deviation testing
// ---------------------------------------------------------------------------

/// Misreport candidates per trader: multiplicative and additive valuation
/// offsets, window shrink steps, and the structurally critical points (every
/// other trader's valuation and its +-1 neighbours), so each branch of the
/// seller-payment case analysis gets exercised.
struct DeviationGrid {
  std::vector<std::pair<std::int64_t, std::int64_t>> multipliers{
      {1, 2}, {3, 4}, {5, 4}, {3, 2}, {2, 1}};
  std::vector<std::int64_t> additive_steps{1, 2, 5};
  bool structural_values = true;
  bool window_shrinks = true;
};

struct DeviationCandidates {
  std::vector<Trader> reports;
  int skipped = 0;  // candidates that violated the misreport rules
};

inline DeviationCandidates deviation_reports(const Instance& instance,
                                             TraderId trader,
                                             const DeviationGrid& grid) {
  const Trader& truth = instance.trader(trader);
  const std::int64_t v = truth.valuation.units();
  const std::int64_t a = truth.arrival.ticks();
  const std::int64_t d = truth.departure.ticks();

  std::set<std::int64_t> values;
  for (const auto& [num, den] : grid.multipliers) values.insert(v * num / den);
  for (std::int64_t step : grid.additive_steps) {
    values.insert(v + step);
    values.insert(v - step);
  }
  if (grid.structural_values) {
    for (const Trader& s : instance.sellers()) {
      if (s.id == trader) continue;
      const std::int64_t w = s.valuation.units();
      values.insert({w - 1, w, w + 1});
    }
    for (const Trader& b : instance.buyers()) {
      if (b.id == trader) continue;
      const std::int64_t w = b.valuation.units();
      values.insert({w - 1, w, w + 1});
    }
  }

  std::set<std::pair<std::int64_t, std::int64_t>> windows{{a, d}};
  if (grid.window_shrinks) {
    const std::int64_t mid = (a + d) / 2;
    for (auto [na, nd] : {std::pair{a + 1, d}, {a, d - 1}, {a + 1, d - 1},
                          {mid, d}, {a, mid}, {mid, mid}, {d, d}, {a, a}}) {
      windows.insert({na, nd});
    }
  }

  DeviationCandidates out;
  auto consider = [&](std::int64_t rv, std::int64_t ra, std::int64_t rd) {
    if (rv < 0 || ra > rd || ra < a || rd > d) {
      ++out.skipped;
      return;
    }
    Trader report = truth;
    report.valuation = Money(rv);
    report.arrival = TimePoint(ra);
    report.departure = TimePoint(rd);
    if (report == truth) return;  // the identity report is tested separately
    out.reports.push_back(report);
  };
  for (std::int64_t rv : values) consider(rv, a, d);
  for (const auto& [ra, rd] : windows) {
    consider(v, ra, rd);
    consider(v + 1, ra, rd);
    if (v > 0) consider(v - 1, ra, rd);
  }
  // De-duplicate (value and window grids can collide).
  std::sort(out.reports.begin(), out.reports.end(),
            [](const Trader& x, const Trader& y) {
              return std::tie(x.valuation, x.arrival, x.departure) <
                     std::tie(y.valuation, y.arrival, y.departure);
            });
  out.reports.erase(std::unique(out.reports.begin(), out.reports.end()),
                    out.reports.end());
  return out;
}

/// A mechanism under test: outcome of one run, given the instance and the
/// replay seed that pins every random choice of the run.
using SeededMechanism =
    std::function<Outcome(const Instance&, std::uint64_t replay_seed)>;

struct DeviationFinding {
  Trader report;
  SignedMoney delta_total = 0;  // sum over replays of (deviation - truth)
  int positive_replays = 0;
  int negative_replays = 0;
};

struct TraderVerdict {
  TraderId trader;
  bool pass = true;
  int evaluated = 0;
  int skipped = 0;
  std::optional<DeviationFinding> best;  // the largest total delta seen
};

struct TruthfulnessReport {
  int replications = 1;
  bool all_pass = true;
  long runs = 0;  // mechanism executions, all invariant-checked
  std::vector<TraderVerdict> verdicts;
};

/// Runs the deviation grid for every trader under common random numbers: the
/// same replay seeds drive the truthful and every deviated run.
///
/// Deterministic mechanisms (replications == 1) fail a trader iff any
/// misreport yields a strictly positive utility delta. Randomized mechanisms
/// fail iff some misreport's delta is strictly positive in every pinned
/// replay: under CRN such a deviation dominates truth-telling, which an
/// in-expectation-truthful mechanism never admits. Per-replay sign counts
/// and the exact summed delta are reported either way.
inline TruthfulnessReport test_truthfulness(const SeededMechanism& mechanism,
                                            const Instance& instance,
                                            const DeviationGrid& grid,
                                            int replications,
                                            std::uint64_t master_seed) {
  if (replications < 1) {
    throw PreconditionError("test_truthfulness needs replications >= 1");
  }
  TruthfulnessReport report;
  report.replications = replications;

  const Rng master(master_seed);
  std::vector<std::uint64_t> replay_seeds;
  for (int r = 0; r < replications; ++r) {
    replay_seeds.push_back(master.fork(static_cast<std::uint64_t>(r)).root_seed());
  }

  // Truthful utilities, shared across all traders and deviations.
  std::vector<std::map<TraderId, SignedMoney>> truth_utility;
  truth_utility.reserve(replications);
  for (std::uint64_t seed : replay_seeds) {
    const Outcome outcome = mechanism(instance, seed);
    check_run_invariants(instance, outcome);
    ++report.runs;
    std::map<TraderId, SignedMoney> utilities;
    for (const Trader& s : instance.sellers()) {
      utilities[s.id] = utility(s, outcome);
    }
    for (const Trader& b : instance.buyers()) {
      utilities[b.id] = utility(b, outcome);
    }
    truth_utility.push_back(std::move(utilities));
  }

  auto run_trader = [&](const Trader& truth) {
    TraderVerdict verdict;
    verdict.trader = truth.id;
    const DeviationCandidates candidates =
        deviation_reports(instance, truth.id, grid);
    verdict.skipped = candidates.skipped;
    for (const Trader& misreport : candidates.reports) {
      const Instance deviated = instance.apply_report(misreport);
      DeviationFinding finding;
      finding.report = misreport;
      bool dominates = true;
      for (int r = 0; r < replications; ++r) {
        const Outcome outcome = mechanism(deviated, replay_seeds[r]);
        check_run_invariants(deviated, outcome, truth.id);
        ++report.runs;
        const SignedMoney delta =
            utility(truth, outcome) - truth_utility[r].at(truth.id);
        finding.delta_total += delta;
        if (delta > 0) ++finding.positive_replays;
        if (delta < 0) ++finding.negative_replays;
        if (delta <= 0) dominates = false;
      }
      ++verdict.evaluated;
      const bool profitable =
          replications == 1 ? finding.delta_total > 0 : dominates;
      if (profitable) verdict.pass = false;
      if (!verdict.best || finding.delta_total > verdict.best->delta_total) {
        verdict.best = finding;
      }
    }
    report.all_pass = report.all_pass && verdict.pass;
    report.verdicts.push_back(std::move(verdict));
  };
  for (const Trader& s : instance.sellers()) run_trader(s);
  for (const Trader& b : instance.buyers()) run_trader(b);
  return report;
}

// ---------------------------------------------------------------------------
// Competitive-ratio experiments
// ---------------------------------------------------------------------------

struct TrialRecord {
  Money mech_welfare{};
  Money oracle_welfare{};
  bool in_guarantee = true;  // patient and demand <= supply
  std::optional<std::string> oracle_error;
  SignedMoney deficit_amount = 0;
};

struct ExperimentReport {
  std::uint64_t master_seed = 0;
  std::vector<TrialRecord> trials;

  /// Exact check: every scored trial satisfies mech/oracle >= num/den.
  /// A zero-welfare oracle counts as ratio 1.
  bool all_ratios_at_least(std::int64_t num, std::int64_t den) const {
    for (const TrialRecord& t : trials) {
      if (t.oracle_error) continue;
      if (t.oracle_welfare == Money(0)) continue;  // ratio 1 by convention
      if (t.mech_welfare.units() * den < t.oracle_welfare.units() * num) {
        return false;
      }
    }
    return true;
  }

  static std::int64_t ratio_ppm(const TrialRecord& t) {
    if (t.oracle_welfare == Money(0)) return 1'000'000;
    return t.mech_welfare.units() * 1'000'000 / t.oracle_welfare.units();
  }

  std::int64_t min_ratio_ppm() const {
    std::int64_t best = 1'000'000;
    for (const TrialRecord& t : trials) {
      if (!t.oracle_error) best = std::min(best, ratio_ppm(t));
    }
    return best;
  }

  std::int64_t mean_ratio_ppm() const {
    std::int64_t sum = 0;
    std::int64_t count = 0;
    for (const TrialRecord& t : trials) {
      if (t.oracle_error) continue;
      sum += ratio_ppm(t);
      ++count;
    }
    return count == 0 ? 1'000'000 : sum / count;
  }
};

using InstanceGenerator = std::function<Instance(std::uint64_t trial_seed)>;
using OracleFn = std::function<OracleResult(const Instance&)>;

/// Per-trial welfare ratio of a mechanism against an offline oracle. Oracle
/// size errors are recorded on the trial rather than aborting the sweep.
inline ExperimentReport competitive_experiment(const SeededMechanism& mechanism,
                                               const InstanceGenerator& generator,
                                               const OracleFn& oracle,
                                               int trials,
                                               std::uint64_t master_seed) {
  ExperimentReport report;
  report.master_seed = master_seed;
  const Rng master(master_seed);
  for (int i = 0; i < trials; ++i) {
    const Rng trial_rng = master.fork(static_cast<std::uint64_t>(i));
    const Instance instance = generator(trial_rng.fork(0).root_seed());
    const Outcome outcome = mechanism(instance, trial_rng.fork(1).root_seed());
    TrialRecord record;
    record.mech_welfare = social_welfare(instance, outcome);
    record.deficit_amount = deficit(outcome);
    record.in_guarantee = instance.patient_sellers() &&
                          instance.buyer_count() <= instance.seller_count();
    try {
      record.oracle_welfare = oracle(instance).welfare;
    } catch (const PreconditionError& e) {
      record.oracle_error = e.what();
    }
    report.trials.push_back(std::move(record));
  }
  return report;
}

}  // namespace oda
