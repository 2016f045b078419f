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

#include <cstdint>
#include <vector>

#include "oda/harness.hpp"
#include "oda/market.hpp"

namespace oda::test {

inline Trader ask(std::uint32_t id, std::int64_t v, std::int64_t a,
                  std::int64_t d) {
  return Trader{TraderId{id}, Role::seller, Money(v), TimePoint(a),
                TimePoint(d)};
}

inline Trader bid(std::uint32_t id, std::int64_t v, std::int64_t a,
                  std::int64_t d) {
  return Trader{TraderId{id}, Role::buyer, Money(v), TimePoint(a),
                TimePoint(d)};
}

/// Patient instance; sellers span [0, horizon], buyers arrive at ticks
/// 1, 2, ... with instantaneous windows.
inline Instance patient_instance(const std::vector<std::int64_t>& ask_values,
                                 const std::vector<std::int64_t>& bid_values,
                                 std::int64_t horizon = 100) {
  std::vector<Trader> sellers;
  std::vector<Trader> buyers;
  std::uint32_t id = 1;
  for (std::int64_t v : ask_values) sellers.push_back(ask(id++, v, 0, horizon));
  std::int64_t t = 1;
  for (std::int64_t v : bid_values) {
    buyers.push_back(bid(id++, v, t, t));
    ++t;
  }
  return Instance::create(std::move(sellers), std::move(buyers),
                          /*patient_sellers=*/true, TimePoint(horizon));
}

/// The running example: asks {2,3,5,8}, bids arriving 7,4,6,3.
/// Seller ids 1..4, buyer ids 5..8.
inline Instance fig1_instance() { return oda::fig1_instance(); }

}  // namespace oda::test
