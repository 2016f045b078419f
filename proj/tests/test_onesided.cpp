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

#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "oda/onesided.hpp"
#include "oda/rng.hpp"

using namespace oda;

namespace {

std::vector<Money> money_stream(const std::vector<std::int64_t>& values) {
  std::vector<Money> out;
  for (std::int64_t v : values) out.push_back(Money(v));
  return out;
}

}  // namespace

TEST_CASE("secretary_single hand-simulated cases") {
  SECTION("n=1 selects the only input at zero payment") {
    SecretarySingle auction({1, 1});
    auto d = run_onesided(auction, money_stream({5}));
    CHECK(d[0].selected);
    CHECK(d[0].payment == Money(0));
  }
  SECTION("n=3 (5,9,7): sample {5}, select 9, pay 5") {
    SecretarySingle auction({3, 1});
    auto d = run_onesided(auction, money_stream({5, 9, 7}));
    CHECK_FALSE(d[0].selected);
    CHECK(d[1].selected);
    CHECK(d[1].payment == Money(5));
    CHECK_FALSE(d[2].selected);
  }
  SECTION("max in the sample: final input selected only on a weak tie") {
    SecretarySingle a({3, 1});
    auto d = run_onesided(a, money_stream({9, 4, 7}));
    CHECK_FALSE(d[2].selected);  // 7 < 9, nobody selected
    SecretarySingle b({3, 1});
    auto e = run_onesided(b, money_stream({9, 4, 9}));
    CHECK(e[2].selected);  // equal to the sample max at the final input
    CHECK(e[2].payment == Money(9));
  }
  SECTION("stream length is enforced") {
    SecretarySingle auction({3, 1});
    CHECK_THROWS_AS(run_onesided(auction, money_stream({1, 2})), ProtocolError);
    SecretarySingle again({2, 1});
    again.offer(Money(1));
    again.offer(Money(2));
    CHECK_THROWS_AS(again.offer(Money(3)), ProtocolError);
  }
  SECTION("k must be 1") {
    CHECK_THROWS_AS(SecretarySingle({3, 2}), PreconditionError);
  }
}

TEST_CASE("secretary_single calibration near 1/e") {
  // Monte Carlo oracle: probability of selecting the maximum of a uniformly
  // random permutation. 20k trials here; the acceptance suite runs 100k.
  Rng rng(65537);
  const std::size_t n = 100;
  const int trials = 20000;
  std::vector<Money> values;
  for (std::size_t v = 1; v <= n; ++v) {
    values.push_back(Money(static_cast<std::int64_t>(v)));
  }
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    rng.shuffle(values);
    SecretarySingle auction({n, 1});
    auto d = run_onesided(auction, values);
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i].selected && values[i] == Money(static_cast<std::int64_t>(n))) {
        ++hits;
      }
    }
  }
  const double p = static_cast<double>(hits) / trials;
  const double inv_e = 1.0 / std::exp(1.0);
  CHECK(p >= inv_e - 0.02);
  CHECK(p <= inv_e + 0.05);
}

TEST_CASE("secretary_k hand-simulated cases") {
  SECTION("k=n selects everything at zero payment") {
    SecretaryK auction({4, 4}, Rng(1));
    auto d = run_onesided(auction, money_stream({3, 1, 4, 1}));
    for (const auto& dec : d) {
      CHECK(dec.selected);
      CHECK(dec.payment == Money(0));
    }
  }
  SECTION("k=2, n=4, values (3,8,6,9), pinned m=2") {
    SecretaryK auction({4, 2}, Rng(1), {2});
    auto d = run_onesided(auction, money_stream({3, 8, 6, 9}));
    CHECK_FALSE(d[0].selected);
    CHECK(d[1].selected);       // recursive single: sample {3}, select 8
    CHECK(d[1].payment == Money(3));
    CHECK_FALSE(d[2].selected);  // 6 <= threshold 8
    CHECK(d[3].selected);        // 9 > 8
    CHECK(d[3].payment == Money(8));
  }
  SECTION("k=1 delegates to the single-choice rule") {
    SecretaryK a({3, 1}, Rng(9));
    SecretarySingle b({3, 1});
    auto da = run_onesided(a, money_stream({5, 9, 7}));
    auto db = run_onesided(b, money_stream({5, 9, 7}));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(da[i].selected == db[i].selected);
      CHECK(da[i].payment == db[i].payment);
    }
  }
  SECTION("capacity is never exceeded") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + rng.below(40);
      const std::size_t k = 1 + rng.below(n);
      std::vector<Money> values;
      for (std::size_t i = 0; i < n; ++i) values.push_back(Money(rng.range(0, 50)));
      SecretaryK auction({n, k}, Rng(rng.next_u64()));
      auto d = run_onesided(auction, values);
      std::size_t selected = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d[i].selected) {
          ++selected;
          CHECK(d[i].payment <= values[i]);  // ex-post IR
        }
      }
      CHECK(selected <= k);
    }
  }
}

TEST_CASE("selected-set quality improves with k") {
  // Monte Carlo oracle: mean (selected welfare / top-k welfare) should be
  // non-decreasing over k in {1,4,16,64} on random permutations.
  Rng rng(777);
  const std::size_t n = 200;
  const int trials = 2000;
  std::vector<double> means;
  for (std::size_t k : {1u, 4u, 16u, 64u}) {
    double sum = 0;
    for (int t = 0; t < trials; ++t) {
      std::vector<Money> values;
      for (std::size_t v = 1; v <= n; ++v) {
        values.push_back(Money(static_cast<std::int64_t>(v)));
      }
      rng.shuffle(values);
      SecretaryK auction({n, k}, Rng(rng.next_u64()));
      auto d = run_onesided(auction, values);
      std::int64_t selected = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d[i].selected) selected += values[i].units();
      }
      std::int64_t top = 0;
      for (std::size_t v = n - k + 1; v <= n; ++v) {
        top += static_cast<std::int64_t>(v);
      }
      sum += static_cast<double>(selected) / static_cast<double>(top);
    }
    means.push_back(sum / trials);
  }
  for (std::size_t i = 1; i < means.size(); ++i) {
    CHECK(means[i] >= means[i - 1]);
  }
}

TEST_CASE("report monotonicity under pinned randomness") {
  Rng rng(1312);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng.below(12);
    const std::size_t k = 1 + rng.below(n);
    const std::uint64_t seed = rng.next_u64();
    std::vector<Money> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(Money(rng.range(0, 30)));
    auto run = [&](const std::vector<Money>& stream) {
      SecretaryK auction({n, k}, Rng(seed));
      return run_onesided(auction, stream);
    };
    const auto base = run(values);
    const std::size_t probe = rng.below(n);
    std::vector<Money> raised = values;
    raised[probe] = raised[probe] + Money(1 + rng.below(10));
    std::vector<Money> lowered = values;
    lowered[probe] = Money(lowered[probe].units() / 2);
    if (base[probe].selected) {
      CHECK(run(raised)[probe].selected);  // raising a winner keeps it winning
    } else {
      CHECK_FALSE(run(lowered)[probe].selected);  // lowering a loser keeps it losing
    }
  }
}

TEST_CASE("critical payments verified by replay") {
  SECTION("single-choice winner at (5,9,7)") {
    auto make = [] { return make_secretary_single({3, 1}); };
    CHECK(critical_payment_check(make, money_stream({5, 9, 7}), 1));
    CHECK(critical_payment_check(make, money_stream({5, 9, 7}), 0));  // loser
    CHECK(critical_payment_check(make, money_stream({5, 9, 7}), 2));  // loser
  }
  SECTION("degenerate k=n winners always pass") {
    auto make = [] { return make_secretary_k({3, 3}, Rng(4)); };
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(critical_payment_check(make, money_stream({2, 5, 4}), i));
    }
  }
  SECTION("every winner across 1000 random pinned runs per implementation") {
    Rng rng(8888);
    for (const bool single : {true, false}) {
      int winners = 0;
      for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(10);
        const std::size_t k = single ? 1 : 1 + rng.below(n);
        const std::uint64_t seed = rng.next_u64();
        std::vector<Money> values;
        for (std::size_t i = 0; i < n; ++i) {
          values.push_back(Money(rng.range(0, 40)));
        }
        auto make = [&]() -> std::unique_ptr<OnesidedAuction> {
          if (single) return make_secretary_single({n, 1});
          return make_secretary_k({n, k}, Rng(seed));
        };
        auto auction = make();
        const auto decisions = run_onesided(*auction, values);
        for (std::size_t i = 0; i < n; ++i) {
          if (!decisions[i].selected) continue;
          ++winners;
          CHECK(critical_payment_check(make, values, i));
        }
      }
      CHECK(winners > 500);
    }
  }
}
