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
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "oda/event_log.hpp"
#include "oda/greedy.hpp"
#include "oda/market.hpp"
#include "oda/onesided.hpp"
#include "oda/rng.hpp"

namespace oda {

enum class SamplerKind { uniform_random, fixed_positions, front_loaded };

/// Chooses a stream position for each ask. UniformRandom yields every
/// interleaving of asks among the (order-preserving) bids with equal
/// probability; FixedPositions pins 1-based target slots per ask, with
/// same-slot collisions ordered uniformly at random; FrontLoaded pushes all
/// asks to the front.
struct PositionSampler {
  SamplerKind kind = SamplerKind::uniform_random;
  std::vector<std::size_t> fixed;  // parallel to the sellers list, 1-based

  static PositionSampler uniform() { return {SamplerKind::uniform_random, {}}; }
  static PositionSampler front_loaded() {
    return {SamplerKind::front_loaded, {}};
  }
  static PositionSampler at(std::vector<std::size_t> positions) {
    return {SamplerKind::fixed_positions, std::move(positions)};
  }
};

struct StreamEntry {
  Role kind = Role::buyer;
  TraderId id;
  friend bool operator==(StreamEntry, StreamEntry) = default;
};

/// Asks merged among bids; the restriction to bids equals the instance's
/// bid arrival order.
using MergedStream = std::vector<StreamEntry>;

namespace detail {

inline MergedStream merge_positions(const std::vector<Trader>& asks,
                                    const std::vector<Trader>& bids,
                                    const PositionSampler& sampler, Rng& rng) {
  const std::size_t n = asks.size() + bids.size();
  MergedStream stream;
  stream.reserve(n);
  switch (sampler.kind) {
    case SamplerKind::uniform_random: {
      std::vector<Role> slots(n, Role::buyer);
      for (std::size_t i = 0; i < asks.size(); ++i) slots[i] = Role::seller;
      rng.shuffle(slots);
      std::vector<std::size_t> ask_order(asks.size());
      for (std::size_t i = 0; i < asks.size(); ++i) ask_order[i] = i;
      rng.shuffle(ask_order);
      std::size_t ask_it = 0;
      std::size_t bid_it = 0;
      for (Role slot : slots) {
        if (slot == Role::seller) {
          stream.push_back({Role::seller, asks[ask_order[ask_it++]].id});
        } else {
          stream.push_back({Role::buyer, bids[bid_it++].id});
        }
      }
      return stream;
    }
    case SamplerKind::front_loaded:
    case SamplerKind::fixed_positions: {
      std::vector<std::size_t> positions;
      if (sampler.kind == SamplerKind::front_loaded) {
        positions.assign(asks.size(), 1);
      } else {
        positions = sampler.fixed;
        if (positions.size() != asks.size()) {
          throw ValidationError(
              "fixed sampler needs one position per seller");
        }
        for (std::size_t l : positions) {
          if (l < 1 || l > n) {
            throw ValidationError("fixed sampler position out of [1, n]");
          }
        }
      }
      // Same-position asks are ordered uniformly at random among themselves.
      std::vector<std::pair<std::size_t, std::uint64_t>> order(asks.size());
      for (std::size_t i = 0; i < asks.size(); ++i) {
        order[i] = {i, rng.next_u64()};
      }
      std::sort(order.begin(), order.end(),
                [&](const auto& a, const auto& b) {
                  return std::tie(positions[a.first], a.second, a.first) <
                         std::tie(positions[b.first], b.second, b.first);
                });
      std::size_t ask_it = 0;
      std::size_t bid_it = 0;
      for (std::size_t pos = 1; pos <= n; ++pos) {
        if (ask_it < order.size() &&
            positions[order[ask_it].first] <= pos) {
          stream.push_back({Role::seller, asks[order[ask_it++].first].id});
        } else if (bid_it < bids.size()) {
          stream.push_back({Role::buyer, bids[bid_it++].id});
        } else {
          stream.push_back({Role::seller, asks[order[ask_it++].first].id});
        }
      }
      return stream;
    }
  }
  throw PreconditionError("unknown sampler kind");
}

}  // namespace detail

/// Public sampling entry point over a whole instance.
inline MergedStream sample_positions(const Instance& instance,
                                     const PositionSampler& sampler, Rng& rng) {
  return detail::merge_positions(instance.sellers(), instance.buyers(),
                                 sampler, rng);
}

/// What the plugged auction did during a run: winners in selection order and
/// their auction payments, plus the merged stream fed to it.
struct ReductionTrace {
  MergedStream stream;
  std::vector<TraderId> selected;
  std::map<TraderId, Money> auction_payment;

  bool was_selected(TraderId id) const {
    return auction_payment.count(id) != 0;
  }
};

struct ReductionResult {
  Outcome outcome;
  ReductionTrace trace;
};

struct ReductionConfig {
  PositionSampler sampler = PositionSampler::uniform();
  std::optional<std::size_t> k_override;  // defaults to the number of asks
};

/// The reduced double auction M_A.
///
/// Runs the plugged one-sided auction on the merged ask/bid stream with
/// capacity k (by default the number of asks). A selected bid is matched to
/// the lowest-valued currently unmatched ask (ties by id) iff its value
/// reaches that ask's, paying max(auction payment, ask value); otherwise it
/// stays unmatched and the capacity is not refunded. Selected asks stay in
/// the matchable pool; selection only consumes capacity. After the stream,
/// matched sellers are paid the greedy critical-value formula evaluated over
/// this run's matching, where the unmatched-bid sentinel ranges over
/// auction-selected bids only.
inline ReductionResult run_reduction(const Instance& instance,
                                     const AuctionFactory& auction_factory,
                                     const ReductionConfig& config, Rng rng,
                                     EventLog* log = nullptr) {
  if (!instance.patient_sellers()) {
    throw PreconditionError(
        "reduction requires patient sellers; decompose the market instead");
  }
  const auto considered = detail::patient_seller_indices(instance);
  std::vector<Trader> asks;
  for (std::size_t i : considered) asks.push_back(instance.sellers()[i]);

  if (config.k_override && *config.k_override == 0) {
    throw PreconditionError("auction capacity k must be at least 1");
  }
  ReductionResult result;
  if (asks.empty()) {  // nothing to trade; the auction never runs
    result.outcome =
        make_outcome(instance, matching_from_pairs(instance, {}), {});
    return result;
  }
  const std::size_t n = asks.size() + instance.buyer_count();
  const std::size_t k = config.k_override.value_or(asks.size());
  if (k > n) {
    throw PreconditionError("auction capacity k exceeds the stream length");
  }

  Rng sampler_rng = rng.fork(1);
  result.trace.stream =
      detail::merge_positions(asks, instance.buyers(), config.sampler,
                              sampler_rng);
  auto auction = auction_factory(AuctionConfig{n, k}, rng.fork(2));

  auto emit = [&](Event e) {
    if (log) log->push_back(std::move(e));
  };

  // Patient asks are live for the whole run; the pool orders them by
  // (valuation, id) so the lowest unmatched ask is the first element.
  std::set<std::pair<Money, TraderId>> pool;
  for (const Trader& a : asks) pool.insert({a.valuation, a.id});

  std::vector<MatchedPair> pairs;
  std::map<TraderId, Money> payments;
  std::vector<TraderId> selected_unmatched_bids;
  std::int64_t position = 0;
  for (const StreamEntry& entry : result.trace.stream) {
    ++position;
    const Trader& trader = instance.trader(entry.id);
    emit({position,
          entry.kind == Role::seller ? EventKind::ask_arrive
                                     : EventKind::bid_arrive,
          {entry.id},
          {},
          {}});
    const OneSidedDecision decision = auction->offer(trader.valuation);
    if (!decision.selected) continue;
    result.trace.selected.push_back(entry.id);
    result.trace.auction_payment[entry.id] = decision.payment;
    emit({position, EventKind::select, {entry.id}, decision.payment.units(), {}});
    if (entry.kind == Role::seller) continue;  // occupies capacity only
    if (pool.empty() || trader.valuation < pool.begin()->first) {
      selected_unmatched_bids.push_back(entry.id);
      emit({position, EventKind::reject, {entry.id}, {}, {}});
      continue;
    }
    const auto [ask_value, ask_id] = *pool.begin();
    pool.erase(pool.begin());
    pairs.push_back({ask_id, entry.id});
    const Money buyer_pays = std::max(decision.payment, ask_value);
    payments[entry.id] = buyer_pays;
    emit({position, EventKind::match, {ask_id, entry.id}, buyer_pays.units(), {}});
  }
  auction->expect_complete();

  // Payment view: sentinel universes are the considered unmatched asks and
  // the auction-selected unmatched bids only.
  Matching payment_view;
  payment_view.pairs = pairs;
  for (const auto& [value, id] : pool) payment_view.unmatched_asks.push_back(id);
  payment_view.unmatched_bids = selected_unmatched_bids;
  const std::int64_t end_time = static_cast<std::int64_t>(n);
  for (const MatchedPair& p : pairs) {
    payments[p.ask] = seller_payment(payment_view, instance, p.ask);
    emit({end_time, EventKind::payment, {p.ask}, payments[p.ask].units(), {}});
    emit({end_time, EventKind::payment, {p.bid}, payments[p.bid].units(), {}});
  }
  result.outcome = make_outcome(
      instance, matching_from_pairs(instance, std::move(pairs)), payments);
  return result;
}

/// Welfare never drops below the value of the auction's selected set:
/// W(M_A) >= sum of v over A-selected asks and bids.
inline bool welfare_floor_check(const Instance& instance,
                                const ReductionTrace& trace,
                                const Outcome& outcome) {
  std::int64_t selected_value = 0;
  for (TraderId id : trace.selected) {
    selected_value += instance.trader(id).valuation.units();
  }
  return social_welfare(instance, outcome).units() >= selected_value;
}

}  // namespace oda
