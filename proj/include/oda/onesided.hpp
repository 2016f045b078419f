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
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "oda/errors.hpp"
#include "oda/money.hpp"
#include "oda/rng.hpp"

namespace oda {

/// Per-input decision of an online one-sided auction. A selected input's
/// payment never exceeds its reported valuation (ex-post IR).
struct OneSidedDecision {
  bool selected = false;
  Money payment{};
};

struct AuctionConfig {
  std::size_t n = 0;  // total number of inputs, known in advance
  std::size_t k = 1;  // number of items to allocate, 1 <= k <= n
};

/// Interface contract consumed by the reduction: a truthful online selection
/// rule with critical-value payments. Exactly n inputs must be offered, one
/// at a time; the decision for each input is final on arrival.
class OnesidedAuction {
 public:
  virtual ~OnesidedAuction() = default;

  const AuctionConfig& config() const { return config_; }
  std::size_t offered() const { return offered_; }
  std::size_t selected_count() const { return selected_; }

  OneSidedDecision offer(Money valuation) {
    if (offered_ >= config_.n) {
      throw ProtocolError("auction stream longer than configured n");
    }
    OneSidedDecision d = decide(valuation, offered_);
    ++offered_;
    if (d.selected) {
      ++selected_;
      if (selected_ > config_.k) {
        throw ProtocolError("auction exceeded its capacity k");
      }
      if (d.payment > valuation) {
        throw ProtocolError("auction payment above the accepted report");
      }
    }
    return d;
  }

  void expect_complete() const {
    if (offered_ != config_.n) {
      throw ProtocolError("auction stream shorter than configured n");
    }
  }

 protected:
  explicit OnesidedAuction(AuctionConfig config) : config_(config) {
    if (config.n > 0 && (config.k < 1 || config.k > config.n)) {
      throw PreconditionError("auction capacity must satisfy 1 <= k <= n");
    }
  }

  virtual OneSidedDecision decide(Money valuation, std::size_t index) = 0;

 private:
  AuctionConfig config_;
  std::size_t offered_ = 0;
  std::size_t selected_ = 0;
};

namespace detail {

/// Sample-phase length of the classical secretary rule. Floor(n/e), except
/// that any stream of at least two inputs observes at least one.
inline std::size_t secretary_sample_size(std::size_t n) {
  if (n <= 1) return 0;
  const auto raw = static_cast<std::size_t>(
      std::floor(static_cast<long double>(n) / std::exp(1.0L)));
  return std::max<std::size_t>(1, raw);
}

}  // namespace detail

/// Classical single-item secretary rule. Observes the sample phase without
/// selecting, then selects the first input strictly above the sample maximum
/// at a payment equal to that maximum. If nothing strictly exceeds it, the
/// final input is selected iff it weakly reaches the sample maximum.
class SecretarySingle final : public OnesidedAuction {
 public:
  explicit SecretarySingle(AuctionConfig config) : OnesidedAuction(config) {
    if (config.n > 0 && config.k != 1) {
      throw PreconditionError("secretary_single requires k = 1");
    }
    sample_size_ = detail::secretary_sample_size(config.n);
  }

 private:
  OneSidedDecision decide(Money v, std::size_t index) override {
    if (index < sample_size_) {
      sample_max_ = std::max(sample_max_, v);
      return {};
    }
    if (done_) return {};
    const bool last = index + 1 == config().n;
    if (v > sample_max_ || (last && v >= sample_max_)) {
      done_ = true;
      return {true, sample_max_};
    }
    return {};
  }

  std::size_t sample_size_ = 0;
  Money sample_max_{};
  bool done_ = false;
};

/// Recursive k-choice secretary rule. Splits the stream by m ~ Binomial(n,
/// 1/2), recurses with half the capacity on the prefix, then accepts inputs
/// strictly above the k/2-th largest prefix valuation until capacity runs
/// out. k = n degenerates to selecting everything at zero payment.
class SecretaryK final : public OnesidedAuction {
 public:
  SecretaryK(AuctionConfig config, Rng rng,
             std::vector<std::size_t> pinned_splits = {})
      : OnesidedAuction(config) {
    const std::size_t n = config.n;
    const std::size_t k = config.k;
    if (n == 0) return;
    if (k == n) {
      select_all_ = true;
      return;
    }
    if (k == 1) {
      inner_ = std::make_unique<SecretarySingle>(AuctionConfig{n, 1});
      prefix_ = n;  // the whole stream is delegated
      return;
    }
    // Split draws come from a dedicated sub-stream so replays are exact; a
    // pinned split list overrides them for deterministic examples.
    Rng split_rng = rng.fork(0x5eC);
    if (!pinned_splits.empty()) {
      prefix_ = pinned_splits.front();
      pinned_splits.erase(pinned_splits.begin());
      if (prefix_ > n) throw PreconditionError("pinned split exceeds n");
    } else {
      prefix_ = split_rng.binomial_half(n);
    }
    threshold_rank_ = k / 2;
    if (prefix_ > 0) {
      const std::size_t inner_k = std::min(threshold_rank_, prefix_);
      inner_ = std::make_unique<SecretaryK>(AuctionConfig{prefix_, inner_k},
                                            rng.fork(0x5eD),
                                            std::move(pinned_splits));
    }
  }

 private:
  OneSidedDecision decide(Money v, std::size_t index) override {
    if (select_all_) return {true, Money(0)};
    if (index < prefix_) {
      if (threshold_rank_ > 0) {
        prefix_top_.push_back(v);
        std::push_heap(prefix_top_.begin(), prefix_top_.end(), std::greater<>{});
        if (prefix_top_.size() > threshold_rank_) {
          std::pop_heap(prefix_top_.begin(), prefix_top_.end(), std::greater<>{});
          prefix_top_.pop_back();
        }
      }
      return inner_ ? inner_->offer(v) : OneSidedDecision{};
    }
    // threshold = k/2-th largest prefix valuation, 0 if fewer were seen
    const Money threshold = (threshold_rank_ > 0 &&
                             prefix_top_.size() >= threshold_rank_)
                                ? prefix_top_.front()
                                : Money(0);
    if (selected_count() < config().k && v > threshold) {
      return {true, threshold};
    }
    return {};
  }

  bool select_all_ = false;
  std::size_t prefix_ = 0;          // m: inputs routed to the recursive stage
  std::size_t threshold_rank_ = 0;  // k' = floor(k/2)
  std::unique_ptr<OnesidedAuction> inner_;
  std::vector<Money> prefix_top_;   // min-heap of the top k' prefix values
};

inline std::unique_ptr<OnesidedAuction> make_secretary_single(
    AuctionConfig config) {
  return std::make_unique<SecretarySingle>(config);
}

inline std::unique_ptr<OnesidedAuction> make_secretary_k(
    AuctionConfig config, Rng rng, std::vector<std::size_t> pinned_splits = {}) {
  return std::make_unique<SecretaryK>(config, rng, std::move(pinned_splits));
}

/// Fresh auction per run; the Rng argument carries the run's randomness.
using AuctionFactory =
    std::function<std::unique_ptr<OnesidedAuction>(AuctionConfig, Rng)>;

/// Offers every value in order and returns the per-input decisions. The
/// stream length must equal the auction's configured n.
inline std::vector<OneSidedDecision> run_onesided(
    OnesidedAuction& auction, const std::vector<Money>& values) {
  if (values.size() != auction.config().n) {
    throw ProtocolError("stream length differs from configured n");
  }
  std::vector<OneSidedDecision> decisions;
  decisions.reserve(values.size());
  for (Money v : values) decisions.push_back(auction.offer(v));
  auction.expect_complete();
  return decisions;
}

/// Replays a pinned auction and verifies the critical-value contract for the
/// winner at `index`: it keeps winning for any report above its payment and
/// loses for any report below it. Losers pass vacuously. The minimal winning
/// report is located by binary search, relying on report monotonicity.
inline bool critical_payment_check(
    const std::function<std::unique_ptr<OnesidedAuction>()>& make_auction,
    const std::vector<Money>& values, std::size_t index) {
  if (index >= values.size()) {
    throw PreconditionError("critical_payment_check: index out of range");
  }
  auto replay = [&](Money probe) {
    std::vector<Money> stream = values;
    stream[index] = probe;
    auto auction = make_auction();
    return run_onesided(*auction, stream)[index];
  };
  const OneSidedDecision base = replay(values[index]);
  if (!base.selected) return true;

  Money hi = base.payment;
  for (Money v : values) hi = std::max(hi, v);
  hi = hi + Money(2);
  if (!replay(hi).selected) return false;

  // Smallest winning report in [0, hi].
  std::int64_t lo_units = 0;
  std::int64_t hi_units = hi.units();
  if (replay(Money(0)).selected) {
    hi_units = 0;
  } else {
    while (lo_units + 1 < hi_units) {
      const std::int64_t mid = lo_units + (hi_units - lo_units) / 2;
      if (replay(Money(mid)).selected) {
        hi_units = mid;
      } else {
        lo_units = mid;
      }
    }
  }
  // Strictly-greater acceptance puts the threshold at payment + 1; the
  // weak final-input rule admits a win at exactly the payment.
  return hi_units == base.payment.units() ||
         hi_units == base.payment.units() + 1;
}

}  // namespace oda
