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
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oda/errors.hpp"
#include "oda/money.hpp"

namespace oda {

struct TraderId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(TraderId, TraderId) = default;
};

inline std::ostream& operator<<(std::ostream& os, TraderId id) {
  return os << '#' << id.value;
}

enum class Role { seller, buyer };

inline const char* to_string(Role role) {
  return role == Role::seller ? "seller" : "buyer";
}

/// One trader's reported triple (valuation, arrival, departure) plus role
/// and identity. A seller's report is an ask, a buyer's report is a bid.
struct Trader {
  TraderId id;
  Role role = Role::seller;
  Money valuation;
  TimePoint arrival;
  TimePoint departure;

  friend bool operator==(const Trader&, const Trader&) = default;
};

/// Asks and bids are matchable iff the ask's valuation does not exceed the
/// bid's and their active intervals intersect (closed intervals, touching
/// endpoints overlap).
inline bool matchable(const Trader& ask, const Trader& bid) {
  if (ask.role != Role::seller || bid.role != Role::buyer) {
    throw PreconditionError("matchable: expected an ask and a bid");
  }
  return ask.valuation <= bid.valuation &&
         intervals_overlap(ask.arrival, ask.departure, bid.arrival,
                           bid.departure);
}

/// No-early-arrival / no-late-departure rule: a report is a permitted
/// misreport of a true type iff its window is a well-formed sub-interval of
/// the true window. The valuation is unconstrained.
inline bool validate_misreport(const Trader& true_type, const Trader& report) {
  if (true_type.id != report.id || true_type.role != report.role) {
    throw PreconditionError("validate_misreport: id/role mismatch");
  }
  return report.arrival <= report.departure &&
         true_type.arrival <= report.arrival &&
         report.departure <= true_type.departure;
}

/// A full market scenario: asks, bids in arrival order, the patient-sellers
/// flag, and the horizon. Immutable after construction.
class Instance {
 public:
  /// Validates and normalises:
  ///   - roles per list, arrival <= departure, ids unique across both lists,
  ///     horizon >= every departure;
  ///   - buyers stable-sorted by arrival (simultaneous arrivals keep their
  ///     listed order, so replays are bit-exact);
  ///   - if patient_sellers, every seller's window must contain
  ///     [min buyer arrival, max buyer arrival].
  static Instance create(std::vector<Trader> sellers,
                         std::vector<Trader> buyers, bool patient_sellers,
                         TimePoint horizon) {
    return build(std::move(sellers), std::move(buyers), patient_sellers,
                 horizon, /*check_patient_span=*/true);
  }

  /// Replaces one trader's report (used for deviation tests). The report must
  /// be a permitted misreport of the stored type. The patient-span invariant
  /// is not re-checked: a shrunken seller window may legitimately make her
  /// non-patient, which mechanisms handle by not considering her.
  Instance apply_report(const Trader& report) const {
    const Trader& truth = trader(report.id);
    if (!validate_misreport(truth, report)) {
      throw ValidationError("apply_report: not a permitted misreport");
    }
    std::vector<Trader> sellers = sellers_;
    std::vector<Trader> buyers = buyers_original_;
    auto& list = report.role == Role::seller ? sellers : buyers;
    for (auto& t : list) {
      if (t.id == report.id) t = report;
    }
    return build(std::move(sellers), std::move(buyers), patient_sellers_,
                 horizon_, /*check_patient_span=*/false);
  }

  const std::vector<Trader>& sellers() const { return sellers_; }
  const std::vector<Trader>& buyers() const { return buyers_; }
  bool patient_sellers() const { return patient_sellers_; }
  TimePoint horizon() const { return horizon_; }

  std::size_t seller_count() const { return sellers_.size(); }
  std::size_t buyer_count() const { return buyers_.size(); }

  bool has(TraderId id) const { return index_.count(id) != 0; }

  const Trader& trader(TraderId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw PreconditionError("unknown trader id #" +
                              std::to_string(id.value));
    }
    const auto& [role, pos] = it->second;
    return role == Role::seller ? sellers_[pos] : buyers_[pos];
  }

  std::optional<TimePoint> first_bid_arrival() const {
    if (buyers_.empty()) return std::nullopt;
    return buyers_.front().arrival;
  }
  std::optional<TimePoint> last_bid_arrival() const {
    if (buyers_.empty()) return std::nullopt;
    return buyers_.back().arrival;
  }

 private:
  static Instance build(std::vector<Trader> sellers,
                        std::vector<Trader> buyers, bool patient_sellers,
                        TimePoint horizon, bool check_patient_span) {
    Instance inst;
    inst.sellers_ = std::move(sellers);
    inst.buyers_original_ = std::move(buyers);
    inst.patient_sellers_ = patient_sellers;
    inst.horizon_ = horizon;

    for (const Trader& s : inst.sellers_) {
      if (s.role != Role::seller) {
        throw ValidationError("sellers list contains a non-seller");
      }
    }
    for (const Trader& b : inst.buyers_original_) {
      if (b.role != Role::buyer) {
        throw ValidationError("buyers list contains a non-buyer");
      }
    }

    inst.buyers_ = inst.buyers_original_;
    std::stable_sort(inst.buyers_.begin(), inst.buyers_.end(),
                     [](const Trader& a, const Trader& b) {
                       return a.arrival < b.arrival;
                     });

    std::size_t pos = 0;
    for (const Trader& s : inst.sellers_) {
      validate_window(s, horizon);
      if (!inst.index_.emplace(s.id, std::make_pair(Role::seller, pos++)).second) {
        throw ValidationError("duplicate trader id #" +
                              std::to_string(s.id.value));
      }
    }
    pos = 0;
    for (const Trader& b : inst.buyers_) {
      validate_window(b, horizon);
      if (!inst.index_.emplace(b.id, std::make_pair(Role::buyer, pos++)).second) {
        throw ValidationError("duplicate trader id #" +
                              std::to_string(b.id.value));
      }
    }

    if (check_patient_span && patient_sellers && !inst.buyers_.empty()) {
      const TimePoint lo = inst.buyers_.front().arrival;
      const TimePoint hi = inst.buyers_.back().arrival;
      for (const Trader& s : inst.sellers_) {
        if (s.arrival > lo || s.departure < hi) {
          throw ValidationError(
              "patient_sellers set but seller #" + std::to_string(s.id.value) +
              " does not span the buyer arrival window");
        }
      }
    }
    return inst;
  }

  static void validate_window(const Trader& t, TimePoint horizon) {
    if (t.arrival > t.departure) {
      throw ValidationError("trader #" + std::to_string(t.id.value) +
                            " has arrival after departure");
    }
    if (t.departure > horizon) {
      throw ValidationError("trader #" + std::to_string(t.id.value) +
                            " departs after the horizon");
    }
  }

  std::vector<Trader> sellers_;
  std::vector<Trader> buyers_;           // sorted by arrival, stable
  std::vector<Trader> buyers_original_;  // as listed, for stable re-sorts
  bool patient_sellers_ = false;
  TimePoint horizon_;
  std::map<TraderId, std::pair<Role, std::size_t>> index_;
};

struct MatchedPair {
  TraderId ask;
  TraderId bid;
  friend bool operator==(MatchedPair, MatchedPair) = default;
};

/// An ordered list of matched ask-bid pairs (in bid-match order) plus the
/// unmatched ids on each side. Reachability and payments are defined over
/// the pair sequence.
struct Matching {
  std::vector<MatchedPair> pairs;
  std::vector<TraderId> unmatched_asks;  // ascending id
  std::vector<TraderId> unmatched_bids;  // ascending id

  bool is_matched(TraderId id) const {
    for (const MatchedPair& p : pairs) {
      if (p.ask == id || p.bid == id) return true;
    }
    return false;
  }

  friend bool operator==(const Matching&, const Matching&) = default;
};

/// Completes a pair list into a Matching over the whole instance.
inline Matching matching_from_pairs(const Instance& instance,
                                    std::vector<MatchedPair> pairs) {
  Matching m;
  m.pairs = std::move(pairs);
  std::set<TraderId> matched;
  for (const MatchedPair& p : m.pairs) {
    matched.insert(p.ask);
    matched.insert(p.bid);
  }
  for (const Trader& s : instance.sellers()) {
    if (!matched.count(s.id)) m.unmatched_asks.push_back(s.id);
  }
  for (const Trader& b : instance.buyers()) {
    if (!matched.count(b.id)) m.unmatched_bids.push_back(b.id);
  }
  std::sort(m.unmatched_asks.begin(), m.unmatched_asks.end());
  std::sort(m.unmatched_bids.begin(), m.unmatched_bids.end());
  return m;
}

/// Throws unless the matching is internally consistent with the instance:
/// ids known, roles on the right side, no id used twice, every pair
/// matchable under the reported types.
inline void validate_matching(const Instance& instance, const Matching& m) {
  std::set<TraderId> seen;
  auto take = [&](TraderId id, Role expected) {
    const Trader& t = instance.trader(id);
    if (t.role != expected) {
      throw ValidationError("matching places trader #" +
                            std::to_string(id.value) + " on the wrong side");
    }
    if (!seen.insert(id).second) {
      throw ValidationError("matching uses trader #" +
                            std::to_string(id.value) + " twice");
    }
  };
  for (const MatchedPair& p : m.pairs) {
    take(p.ask, Role::seller);
    take(p.bid, Role::buyer);
    if (!matchable(instance.trader(p.ask), instance.trader(p.bid))) {
      throw ValidationError("matching contains a non-matchable pair");
    }
  }
  for (TraderId id : m.unmatched_asks) take(id, Role::seller);
  for (TraderId id : m.unmatched_bids) take(id, Role::buyer);
}

/// Allocation indicators and payments for every trader of an instance.
struct Outcome {
  std::map<TraderId, bool> allocation;  // pi_i
  std::map<TraderId, Money> payments;   // x_i
  Matching matching;
};

/// Builds an Outcome from a matching and payments for the matched traders.
/// Unmatched traders get pi = 0 and payment 0.
inline Outcome make_outcome(const Instance& instance, Matching matching,
                            const std::map<TraderId, Money>& matched_payments) {
  validate_matching(instance, matching);
  Outcome out;
  out.matching = std::move(matching);
  for (const Trader& s : instance.sellers()) {
    out.allocation[s.id] = false;
    out.payments[s.id] = Money(0);
  }
  for (const Trader& b : instance.buyers()) {
    out.allocation[b.id] = false;
    out.payments[b.id] = Money(0);
  }
  for (const MatchedPair& p : out.matching.pairs) {
    out.allocation[p.ask] = true;
    out.allocation[p.bid] = true;
  }
  for (const auto& [id, amount] : matched_payments) {
    auto it = out.allocation.find(id);
    if (it == out.allocation.end()) {
      throw PreconditionError("payment for unknown trader id #" +
                              std::to_string(id.value));
    }
    if (!it->second) {
      throw PreconditionError("payment assigned to unmatched trader #" +
                              std::to_string(id.value));
    }
    out.payments[id] = amount;
  }
  return out;
}

/// Social welfare of an outcome:
///   sum over buyers of v_i * pi_i  +  sum over sellers of v_i * (1 - pi_i).
/// Matched sellers hand their unit over, unmatched sellers keep it.
inline Money social_welfare(const Instance& instance, const Outcome& outcome) {
  if (outcome.allocation.size() !=
      instance.seller_count() + instance.buyer_count()) {
    throw PreconditionError("outcome does not cover the instance");
  }
  std::int64_t total = 0;
  auto pi = [&](TraderId id) {
    auto it = outcome.allocation.find(id);
    if (it == outcome.allocation.end()) {
      throw PreconditionError("outcome missing trader id #" +
                              std::to_string(id.value));
    }
    return it->second;
  };
  for (const Trader& s : instance.sellers()) {
    if (!pi(s.id)) total += s.valuation.units();
  }
  for (const Trader& b : instance.buyers()) {
    if (pi(b.id)) total += b.valuation.units();
  }
  return Money(total);
}

/// Welfare of the allocation implied by a matching (payments irrelevant).
inline Money welfare_of_matching(const Instance& instance, const Matching& m) {
  std::set<TraderId> matched;
  for (const MatchedPair& p : m.pairs) {
    matched.insert(p.ask);
    matched.insert(p.bid);
  }
  std::int64_t total = 0;
  for (const Trader& s : instance.sellers()) {
    if (!matched.count(s.id)) total += s.valuation.units();
  }
  for (const Trader& b : instance.buyers()) {
    if (matched.count(b.id)) total += b.valuation.units();
  }
  return Money(total);
}

/// Utility of a trader, evaluated with the TRUE type supplied by the caller
/// (the outcome may come from a misreport run):
///   buyers:  v * pi - x;   sellers:  x - v * pi.
inline SignedMoney utility(const Trader& true_type, const Outcome& outcome) {
  auto ait = outcome.allocation.find(true_type.id);
  auto pit = outcome.payments.find(true_type.id);
  if (ait == outcome.allocation.end() || pit == outcome.payments.end()) {
    throw PreconditionError("utility: trader id #" +
                            std::to_string(true_type.id.value) +
                            " not present in outcome");
  }
  const std::int64_t v_pi = ait->second ? true_type.valuation.units() : 0;
  const std::int64_t x = pit->second.units();
  return true_type.role == Role::buyer ? v_pi - x : x - v_pi;
}

/// Feasibility: equally many matched buyers and sellers, and the matching is
/// internally consistent with the allocation map. Never throws.
inline bool check_feasibility(const Outcome& outcome) {
  std::set<TraderId> seen;
  std::size_t matched_asks = 0;
  std::size_t matched_bids = 0;
  for (const MatchedPair& p : outcome.matching.pairs) {
    if (!seen.insert(p.ask).second || !seen.insert(p.bid).second) return false;
    ++matched_asks;
    ++matched_bids;
  }
  for (TraderId id : outcome.matching.unmatched_asks) {
    if (!seen.insert(id).second) return false;
  }
  for (TraderId id : outcome.matching.unmatched_bids) {
    if (!seen.insert(id).second) return false;
  }
  if (matched_asks != matched_bids) return false;  // by construction, but kept
  if (outcome.allocation.size() != seen.size()) return false;
  std::size_t allocated = 0;
  for (const auto& [id, pi] : outcome.allocation) {
    if (!seen.count(id)) return false;
    if (pi) ++allocated;
  }
  if (allocated != matched_asks + matched_bids) return false;
  for (const MatchedPair& p : outcome.matching.pairs) {
    auto a = outcome.allocation.find(p.ask);
    auto b = outcome.allocation.find(p.bid);
    if (a == outcome.allocation.end() || !a->second) return false;
    if (b == outcome.allocation.end() || !b->second) return false;
  }
  for (TraderId id : outcome.matching.unmatched_asks) {
    auto it = outcome.allocation.find(id);
    if (it == outcome.allocation.end() || it->second) return false;
  }
  for (TraderId id : outcome.matching.unmatched_bids) {
    auto it = outcome.allocation.find(id);
    if (it == outcome.allocation.end() || it->second) return false;
  }
  return true;
}

/// Total seller payments minus total buyer payments. Positive means the
/// auctioneer runs at a loss.
inline SignedMoney deficit(const Outcome& outcome) {
  auto paid = [&](TraderId id) {
    auto it = outcome.payments.find(id);
    return it == outcome.payments.end() ? std::int64_t{0}
                                        : it->second.units();
  };
  std::int64_t total = 0;
  for (const MatchedPair& p : outcome.matching.pairs) {
    total += paid(p.ask) - paid(p.bid);
  }
  for (TraderId id : outcome.matching.unmatched_asks) total += paid(id);
  for (TraderId id : outcome.matching.unmatched_bids) total -= paid(id);
  return total;
}

}  // namespace oda
