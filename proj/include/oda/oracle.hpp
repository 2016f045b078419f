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
#include <vector>

#include "oda/market.hpp"

namespace oda {

/// A ground-truth optimal allocation and its welfare.
struct OracleResult {
  Matching matching;
  Money welfare;
};

/// Offline optimum for patient-sellers instances: match the highest bid with
/// the lowest ask, second highest with second lowest, and so on, stopping at
/// the first pair where the ask's valuation exceeds the bid's. Valuation ties
/// break by id order. Ignores bid arrival order entirely.
inline OracleResult optimal_patient(const Instance& instance) {
  if (!instance.patient_sellers()) {
    throw PreconditionError("optimal_patient requires patient sellers");
  }
  std::vector<const Trader*> asks;
  std::vector<const Trader*> bids;
  for (const Trader& s : instance.sellers()) asks.push_back(&s);
  for (const Trader& b : instance.buyers()) bids.push_back(&b);
  std::sort(asks.begin(), asks.end(), [](const Trader* a, const Trader* b) {
    return std::tie(a->valuation, a->id) < std::tie(b->valuation, b->id);
  });
  std::sort(bids.begin(), bids.end(), [](const Trader* a, const Trader* b) {
    return a->valuation != b->valuation ? a->valuation > b->valuation
                                        : a->id < b->id;
  });
  std::vector<MatchedPair> pairs;
  for (std::size_t i = 0; i < asks.size() && i < bids.size(); ++i) {
    if (asks[i]->valuation > bids[i]->valuation) break;
    pairs.push_back({asks[i]->id, bids[i]->id});
  }
  OracleResult result;
  result.matching = matching_from_pairs(instance, std::move(pairs));
  result.welfare = welfare_of_matching(instance, result.matching);
  return result;
}

namespace detail {

/// Branch-and-bound search for a maximum-gain set of pairwise-disjoint
/// matchable pairs. Gain of a pair is v(bid) - v(ask) >= 0; total welfare is
/// the sum of all seller values plus the total gain.
class ExactMatchingSearch {
 public:
  explicit ExactMatchingSearch(const Instance& instance)
      : instance_(instance) {
    for (const Trader& s : instance.sellers()) asks_.push_back(&s);
    for (const Trader& b : instance.buyers()) bids_.push_back(&b);
    // High bids first: large gains early make the bound prune harder.
    std::sort(bids_.begin(), bids_.end(), [](const Trader* a, const Trader* b) {
      return a->valuation != b->valuation ? a->valuation > b->valuation
                                          : a->id < b->id;
    });
    std::sort(asks_.begin(), asks_.end(), [](const Trader* a, const Trader* b) {
      return std::tie(a->valuation, a->id) < std::tie(b->valuation, b->id);
    });
    compatible_.resize(bids_.size());
    for (std::size_t j = 0; j < bids_.size(); ++j) {
      compatible_[j].resize(asks_.size());
      for (std::size_t i = 0; i < asks_.size(); ++i) {
        compatible_[j][i] = matchable(*asks_[i], *bids_[j]);
      }
    }
  }

  OracleResult run() {
    seed_with_greedy();
    std::vector<std::size_t> chosen(bids_.size(), kUnmatched);
    recurse(0, 0u, 0, chosen);
    std::vector<MatchedPair> pairs;
    for (std::size_t j = 0; j < bids_.size(); ++j) {
      if (best_choice_[j] != kUnmatched) {
        pairs.push_back({asks_[best_choice_[j]]->id, bids_[j]->id});
      }
    }
    OracleResult result;
    result.matching = matching_from_pairs(instance_, std::move(pairs));
    result.welfare = welfare_of_matching(instance_, result.matching);
    return result;
  }

 private:
  static constexpr std::size_t kUnmatched = static_cast<std::size_t>(-1);

  std::int64_t gain(std::size_t ask_idx, std::size_t bid_idx) const {
    return bids_[bid_idx]->valuation.units() -
           asks_[ask_idx]->valuation.units();
  }

  void seed_with_greedy() {
    best_choice_.assign(bids_.size(), kUnmatched);
    best_gain_ = 0;
    std::uint32_t used = 0;
    for (std::size_t j = 0; j < bids_.size(); ++j) {
      for (std::size_t i = 0; i < asks_.size(); ++i) {
        if ((used >> i) & 1u) continue;
        if (compatible_[j][i]) {
          used |= 1u << i;
          best_choice_[j] = i;
          best_gain_ += gain(i, j);
          break;
        }
      }
    }
  }

  /// Optimistic completion: pair the remaining bids (already value-sorted
  /// descending) with the cheapest unused asks, ignoring windows.
  std::int64_t bound(std::size_t from_bid, std::uint32_t used_asks) const {
    std::int64_t total = 0;
    std::size_t ask_it = 0;
    for (std::size_t j = from_bid; j < bids_.size(); ++j) {
      while (ask_it < asks_.size() && ((used_asks >> ask_it) & 1u)) ++ask_it;
      if (ask_it >= asks_.size()) break;
      const std::int64_t g = gain(ask_it, j);
      if (g <= 0) break;  // later bids are no more valuable
      total += g;
      ++ask_it;
    }
    return total;
  }

  void recurse(std::size_t bid_idx, std::uint32_t used_asks,
               std::int64_t gain_so_far, std::vector<std::size_t>& chosen) {
    if (bid_idx == bids_.size()) {
      if (gain_so_far > best_gain_) {
        best_gain_ = gain_so_far;
        best_choice_ = chosen;
      }
      return;
    }
    // The greedy seed already realised best_gain_, so branches that cannot
    // strictly improve on it are safe to drop.
    if (gain_so_far + bound(bid_idx, used_asks) <= best_gain_) return;
    for (std::size_t i = 0; i < asks_.size(); ++i) {
      if ((used_asks >> i) & 1u) continue;
      if (!compatible_[bid_idx][i]) continue;
      chosen[bid_idx] = i;
      recurse(bid_idx + 1, used_asks | (1u << i), gain_so_far + gain(i, bid_idx),
              chosen);
      chosen[bid_idx] = kUnmatched;
    }
    recurse(bid_idx + 1, used_asks, gain_so_far, chosen);
  }

  const Instance& instance_;
  std::vector<const Trader*> asks_;
  std::vector<const Trader*> bids_;
  std::vector<std::vector<char>> compatible_;
  std::vector<std::size_t> best_choice_;
  std::int64_t best_gain_ = 0;
};

}  // namespace detail

/// Exact offline optimum for general time-windowed instances, by exhaustive
/// search with branch-and-bound over disjoint matchable pairs. The welfare is
/// the unique optimum; the matching is one maximiser.
inline OracleResult optimal_general(const Instance& instance) {
  if (instance.seller_count() > 12 || instance.buyer_count() > 12) {
    throw PreconditionError("instance too large for exact oracle");
  }
  return detail::ExactMatchingSearch(instance).run();
}

}  // namespace oda
