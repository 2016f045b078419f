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
#include <vector>

#include "oda/event_log.hpp"
#include "oda/market.hpp"
#include "oda/rng.hpp"

namespace oda {

/// One time slice of the horizon. Windows tile [0, T]: sub-market k covers
/// [(k-1) * t/2, min(k * t/2, T)].
struct SubMarket {
  int index = 0;  // 1-based
  TimePoint lo;
  TimePoint hi;
  std::vector<TraderId> sellers;
  std::vector<TraderId> buyers;  // arrival order; shrinks as buyers match
};

/// The plugged per-sub-market mechanism (seeds pre-bound by the caller).
using SubMechanism = std::function<Outcome(const Instance&, EventLog*)>;

struct DecompositionResult {
  Outcome outcome;
  std::vector<SubMarket> sub_markets;
};

namespace detail {

inline std::vector<std::pair<TimePoint, TimePoint>> sub_market_windows(
    TimePoint horizon, std::int64_t t) {
  if (t <= 0 || t % 2 != 0) {
    throw ValidationError("sub-market length t must be a positive even tick count");
  }
  const std::int64_t T = horizon.ticks();
  const std::int64_t half = t / 2;
  const std::int64_t count = std::max<std::int64_t>(1, (2 * T + t - 1) / t);
  std::vector<std::pair<TimePoint, TimePoint>> windows;
  for (std::int64_t k = 1; k <= count; ++k) {
    windows.emplace_back(TimePoint((k - 1) * half),
                         TimePoint(std::min(k * half, T)));
  }
  return windows;
}

}  // namespace detail

/// Routes each seller to the latest sub-market whose whole window her active
/// interval contains, and each buyer to every sub-market overlapping his
/// window. Buyer queues shrink later, as sub-markets execute.
inline std::vector<SubMarket> build_sub_markets(const Instance& instance,
                                                std::int64_t t) {
  const auto windows = detail::sub_market_windows(instance.horizon(), t);
  std::vector<SubMarket> subs(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    subs[i].index = static_cast<int>(i) + 1;
    subs[i].lo = windows[i].first;
    subs[i].hi = windows[i].second;
  }
  for (const Trader& s : instance.sellers()) {
    std::optional<std::size_t> latest;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (s.arrival <= subs[i].lo && subs[i].hi <= s.departure) latest = i;
    }
    if (!latest) {
      throw PreconditionError(
          "seller #" + std::to_string(s.id.value) +
          " is active in no whole sub-market; sellers must stay for at "
          "least t");
    }
    subs[*latest].sellers.push_back(s.id);
  }
  for (const Trader& b : instance.buyers()) {
    for (SubMarket& sub : subs) {
      if (intervals_overlap(b.arrival, b.departure, sub.lo, sub.hi)) {
        sub.buyers.push_back(b.id);
      }
    }
  }
  return subs;
}

/// E_M: split the horizon into ceil(2T/t) sub-markets of length t/2, run the
/// plugged mechanism independently per sub-market in index order, and remove
/// buyers from later queues once matched. Within a sub-market a buyer
/// participates from his arrival; sellers fully span the window, so the
/// sub-instances are patient by construction.
inline DecompositionResult decompose(const Instance& instance, std::int64_t t,
                                     const SubMechanism& mechanism,
                                     EventLog* log = nullptr) {
  DecompositionResult result;
  result.sub_markets = build_sub_markets(instance, t);

  std::set<TraderId> matched;
  std::vector<MatchedPair> pairs;
  std::map<TraderId, Money> payments;
  for (SubMarket& sub : result.sub_markets) {
    std::vector<TraderId> remaining;
    for (TraderId id : sub.buyers) {
      if (!matched.count(id)) remaining.push_back(id);
    }
    sub.buyers = remaining;
    if (sub.sellers.empty() && sub.buyers.empty()) continue;

    std::vector<Trader> sellers;
    for (TraderId id : sub.sellers) sellers.push_back(instance.trader(id));
    std::vector<Trader> buyers;
    for (TraderId id : sub.buyers) {
      Trader b = instance.trader(id);
      // Active inside this slice only.
      b.arrival = std::max(b.arrival, sub.lo);
      b.departure = std::min(b.departure, sub.hi);
      buyers.push_back(b);
    }
    const Instance local = Instance::create(std::move(sellers),
                                            std::move(buyers),
                                            /*patient_sellers=*/true,
                                            instance.horizon());
    EventLog local_log;
    const Outcome local_outcome =
        mechanism(local, log ? &local_log : nullptr);
    if (log) {
      for (Event e : local_log) {
        e.sub_market = sub.index;
        log->push_back(std::move(e));
      }
    }
    for (const MatchedPair& p : local_outcome.matching.pairs) {
      pairs.push_back(p);
      matched.insert(p.ask);
      matched.insert(p.bid);
      payments[p.ask] = local_outcome.payments.at(p.ask);
      payments[p.bid] = local_outcome.payments.at(p.bid);
    }
  }
  result.outcome = make_outcome(
      instance, matching_from_pairs(instance, std::move(pairs)), payments);
  return result;
}

/// Parameters of the rising-market generator. Sub-market slot k (starting at
/// the second window, so sellers of length >= t can be routed to it) draws
/// valuations from [value_lo, value_hi] shifted upward by drift per slot.
struct RisingMarketParams {
  int populated_sub_markets = 3;
  std::int64_t t = 8;             // even, >= 4
  int sellers_per_sub_market = 2;
  int buyers_per_sub_market = 2;
  std::int64_t value_lo = 1;
  std::int64_t value_hi = 9;
  std::int64_t drift = 2;         // per-slot upward shift of the value range
};

/// Instance whose per-sub-market valuation distributions shift upward over
/// time: long-lived sellers (active exactly t), short-lived buyers placed
/// strictly inside one window each.
inline Instance rising_market_scenario(std::uint64_t seed,
                                       const RisingMarketParams& params) {
  if (params.t < 4 || params.t % 2 != 0) {
    throw ValidationError("rising market generator needs even t >= 4");
  }
  if (params.populated_sub_markets < 1 || params.sellers_per_sub_market < 0 ||
      params.buyers_per_sub_market < 0 || params.value_lo > params.value_hi ||
      params.drift < 0) {
    throw ValidationError("bad rising market parameters");
  }
  Rng rng(seed);
  const std::int64_t half = params.t / 2;
  // Slots occupy windows 2 .. populated+1; window 1 stays empty so that each
  // slot-k seller can span [(k-2) * t/2, k * t/2], length exactly t.
  const std::int64_t total_windows = params.populated_sub_markets + 1;
  const TimePoint horizon(total_windows * half);
  std::vector<Trader> sellers;
  std::vector<Trader> buyers;
  std::uint32_t next_id = 1;
  for (int slot = 0; slot < params.populated_sub_markets; ++slot) {
    const std::int64_t k = slot + 2;  // window index
    const std::int64_t lo = (k - 1) * half;
    const std::int64_t hi = k * half;
    const std::int64_t value_shift = params.drift * slot;
    for (int s = 0; s < params.sellers_per_sub_market; ++s) {
      sellers.push_back(Trader{
          TraderId{next_id++}, Role::seller,
          Money(rng.range(params.value_lo, params.value_hi) + value_shift),
          TimePoint(lo - half), TimePoint(hi)});
    }
    for (int b = 0; b < params.buyers_per_sub_market; ++b) {
      const std::int64_t arrive = rng.range(lo + 1, hi - 1);
      const std::int64_t depart = rng.range(arrive, hi - 1);
      buyers.push_back(Trader{
          TraderId{next_id++}, Role::buyer,
          Money(rng.range(params.value_lo, params.value_hi) + value_shift),
          TimePoint(arrive), TimePoint(depart)});
    }
  }
  return Instance::create(std::move(sellers), std::move(buyers),
                          /*patient_sellers=*/false, horizon);
}

}  // namespace oda
