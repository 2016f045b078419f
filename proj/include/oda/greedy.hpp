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
#include <tuple>
#include <vector>

#include "oda/event_log.hpp"
#include "oda/market.hpp"
#include "oda/money.hpp"
#include "oda/rng.hpp"

namespace oda {

/// Two matched pairs i <= j (in bid-match order) are reachable from each
/// other iff for every i <= m < j the bid of pair m is matchable with the
/// ask of pair m+1. A pair is trivially reachable from itself. Selects the
/// branch of the seller payment.
inline bool reachable(const Matching& matching, std::size_t i, std::size_t j,
                      const Instance& instance) {
  if (i > j || j >= matching.pairs.size()) {
    throw PreconditionError("reachable: pair index out of range");
  }
  for (std::size_t m = i; m < j; ++m) {
    const Trader& bid_m = instance.trader(matching.pairs[m].bid);
    const Trader& ask_next = instance.trader(matching.pairs[m + 1].ask);
    if (!matchable(ask_next, bid_m)) return false;
  }
  return true;
}

/// Critical-value payment for a matched seller. The matching's unmatched
/// sets define the sentinel universes: the lowest unmatched ask stands in
/// for the cheapest competing supply (+infinity when none), the highest
/// unmatched bid for the best remaining demand (0 when none).
inline Money seller_payment(const Matching& matching, const Instance& instance,
                            TraderId seller) {
  std::optional<std::size_t> own_pair;
  for (std::size_t p = 0; p < matching.pairs.size(); ++p) {
    if (matching.pairs[p].ask == seller) own_pair = p;
  }
  if (!own_pair) {
    throw PreconditionError("seller_payment: seller #" +
                            std::to_string(seller.value) + " is not matched");
  }
  ExtendedMoney lowest_unmatched_ask = ExtendedMoney::infinity();
  for (TraderId id : matching.unmatched_asks) {
    const Money v = instance.trader(id).valuation;
    if (lowest_unmatched_ask.is_infinite() || v < lowest_unmatched_ask.finite()) {
      lowest_unmatched_ask = ExtendedMoney(v);
    }
  }
  Money highest_unmatched_bid(0);
  for (TraderId id : matching.unmatched_bids) {
    highest_unmatched_bid =
        std::max(highest_unmatched_bid, instance.trader(id).valuation);
  }
  const std::size_t last = matching.pairs.size() - 1;
  const Money last_bid = instance.trader(matching.pairs[last].bid).valuation;
  const Money last_ask = instance.trader(matching.pairs[last].ask).valuation;
  if (reachable(matching, *own_pair, last, instance)) {
    return min_finite(lowest_unmatched_ask,
                      std::max(last_bid, highest_unmatched_bid));
  }
  return std::max(last_ask, highest_unmatched_bid);
}

/// A matched buyer pays the valuation of the ask he is matched to: the
/// infimum report with which he would still have been matched.
inline Money buyer_payment(const Matching& matching, const Instance& instance,
                           TraderId buyer) {
  for (const MatchedPair& p : matching.pairs) {
    if (p.bid == buyer) return instance.trader(p.ask).valuation;
  }
  throw PreconditionError("buyer_payment: buyer #" +
                          std::to_string(buyer.value) + " is not matched");
}

namespace detail {

/// Sellers that the mechanism considers: active from before the first bid's
/// arrival until the last bid's arrival. Others keep their item untouched.
inline std::vector<std::size_t> patient_seller_indices(
    const Instance& instance) {
  std::vector<std::size_t> out;
  const auto first = instance.first_bid_arrival();
  const auto last = instance.last_bid_arrival();
  for (std::size_t i = 0; i < instance.sellers().size(); ++i) {
    const Trader& s = instance.sellers()[i];
    if (first && (s.arrival > *first || s.departure < *last)) continue;
    out.push_back(i);
  }
  return out;
}

/// Ascending valuation order over the given seller indices; equal values are
/// ordered by a per-index key drawn from the tie seed, so a fixed seed makes
/// the ranking fully deterministic and replayable.
inline std::vector<std::size_t> rank_asks(const Instance& instance,
                                          const std::vector<std::size_t>& considered,
                                          std::uint64_t tie_seed) {
  Rng rng(tie_seed);
  std::vector<std::uint64_t> key(instance.sellers().size());
  for (auto& k : key) k = rng.next_u64();
  std::vector<std::size_t> ranking = considered;
  std::sort(ranking.begin(), ranking.end(),
            [&](std::size_t a, std::size_t b) {
              const Trader& sa = instance.sellers()[a];
              const Trader& sb = instance.sellers()[b];
              return std::tie(sa.valuation, key[a], sa.id) <
                     std::tie(sb.valuation, key[b], sb.id);
            });
  return ranking;
}

}  // namespace detail

/// Best-first allocation with critical-value payments.
///
/// Bids are processed in arrival order; an arriving bid is matched to the
/// lowest-valued unmatched ask iff the two are matchable, and is otherwise
/// permanently unmatched. Payments are computed after the final bid.
inline Outcome run_greedy(const Instance& instance, std::uint64_t tie_seed,
                          EventLog* log = nullptr) {
  if (!instance.patient_sellers()) {
    throw PreconditionError(
        "greedy mechanism requires patient sellers; decompose the market "
        "instead");
  }
  const auto considered = detail::patient_seller_indices(instance);
  const auto ranking = detail::rank_asks(instance, considered, tie_seed);

  std::vector<MatchedPair> pairs;
  std::size_t next_rank = 0;
  auto emit = [&](Event e) {
    if (log) log->push_back(std::move(e));
  };
  for (const Trader& b : instance.buyers()) {
    emit({b.arrival.ticks(), EventKind::bid_arrive, {b.id}, {}, {}});
    if (next_rank < ranking.size()) {
      const Trader& candidate = instance.sellers()[ranking[next_rank]];
      if (matchable(candidate, b)) {
        pairs.push_back({candidate.id, b.id});
        ++next_rank;
        emit({b.arrival.ticks(),
              EventKind::match,
              {candidate.id, b.id},
              candidate.valuation.units(),
              {}});
        // The buyer's payment is fixed at match time.
        emit({b.arrival.ticks(),
              EventKind::payment,
              {b.id},
              candidate.valuation.units(),
              {}});
        continue;
      }
    }
    emit({b.arrival.ticks(), EventKind::reject, {b.id}, {}, {}});
  }

  // Payment view: sentinels range over the asks the mechanism considered.
  Matching payment_view;
  payment_view.pairs = pairs;
  for (std::size_t rank = next_rank; rank < ranking.size(); ++rank) {
    payment_view.unmatched_asks.push_back(
        instance.sellers()[ranking[rank]].id);
  }
  for (const Trader& b : instance.buyers()) {
    bool matched = false;
    for (const MatchedPair& p : pairs) matched |= p.bid == b.id;
    if (!matched) payment_view.unmatched_bids.push_back(b.id);
  }

  std::map<TraderId, Money> payments;
  const std::int64_t end_time =
      instance.last_bid_arrival().value_or(TimePoint(0)).ticks();
  for (const MatchedPair& p : pairs) {
    payments[p.bid] = buyer_payment(payment_view, instance, p.bid);
    payments[p.ask] = seller_payment(payment_view, instance, p.ask);
    emit({end_time, EventKind::payment, {p.ask}, payments[p.ask].units(), {}});
  }
  return make_outcome(instance, matching_from_pairs(instance, std::move(pairs)),
                      payments);
}

}  // namespace oda
