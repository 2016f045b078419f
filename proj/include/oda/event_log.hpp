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
#include <optional>
#include <string>
#include <vector>

#include "oda/errors.hpp"
#include "oda/market.hpp"

namespace oda {

enum class EventKind {
  bid_arrive,
  ask_arrive,  // reduction: an ask entering the merged stream
  select,      // reduction: the plugged one-sided auction picked a winner
  match,
  reject,
  payment,
};

inline const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::bid_arrive: return "bid-arrive";
    case EventKind::ask_arrive: return "ask-arrive";
    case EventKind::select: return "select";
    case EventKind::match: return "match";
    case EventKind::reject: return "reject";
    case EventKind::payment: return "payment";
  }
  return "?";
}

inline EventKind event_kind_from_string(const std::string& s) {
  if (s == "bid-arrive") return EventKind::bid_arrive;
  if (s == "ask-arrive") return EventKind::ask_arrive;
  if (s == "select") return EventKind::select;
  if (s == "match") return EventKind::match;
  if (s == "reject") return EventKind::reject;
  if (s == "payment") return EventKind::payment;
  throw ValidationError("unknown event kind: " + s);
}

/// One row of a mechanism's run trace. `time` is the market tick for the
/// greedy mechanism and the 1-based stream position for the reduction.
/// `sub_market` is set only by the decomposition wrapper.
struct Event {
  std::int64_t time = 0;
  EventKind kind = EventKind::bid_arrive;
  std::vector<TraderId> ids;
  std::optional<std::int64_t> amount;
  std::optional<int> sub_market;

  friend bool operator==(const Event&, const Event&) = default;
};

using EventLog = std::vector<Event>;

}  // namespace oda
