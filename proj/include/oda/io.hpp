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
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oda/decomposition.hpp"
#include "oda/event_log.hpp"
#include "oda/greedy.hpp"
#include "oda/harness.hpp"
#include "oda/market.hpp"
#include "oda/reduction.hpp"

namespace oda {

using json = nlohmann::json;

// All files are canonical JSON: keys serialized in sorted order, two-space
// indentation, integers only (money in minor units, times in ticks, ratios
// in fixed-point ppm). Identical inputs serialize byte-identically.

namespace io_detail {

inline std::string line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void expect_keys(const json& j, const std::string& where,
                        const std::vector<std::string>& required,
                        const std::vector<std::string>& optional = {}) {
  if (!j.is_object()) {
    throw ValidationError(where + ": expected an object");
  }
  for (const std::string& key : required) {
    if (!j.contains(key)) {
      throw ValidationError(where + ": missing field '" + key + "'");
    }
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const bool known =
        std::find(required.begin(), required.end(), key) != required.end() ||
        std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) {
      throw ValidationError(where + ": unknown field '" + key + "'");
    }
  }
}

inline std::int64_t get_int(const json& j, const std::string& where,
                            const std::string& key) {
  if (!j.at(key).is_number_integer() && !j.at(key).is_number_unsigned()) {
    throw ValidationError(where + "." + key + ": expected an integer");
  }
  return j.at(key).get<std::int64_t>();
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

enum class MechanismKind { greedy, reduction, decomposition, match_at_arrival };
enum class AuctionKind { secretary_single, secretary_k };

struct MechanismSpec {
  MechanismKind kind = MechanismKind::greedy;
  std::uint64_t tie_seed = 0;                        // greedy / decomposition
  AuctionKind auction = AuctionKind::secretary_k;    // reduction
  PositionSampler sampler = PositionSampler::uniform();
  std::optional<std::size_t> k_override;             // reduction
  std::int64_t sub_market_length = 0;                // decomposition
};

struct Scenario {
  static constexpr int kSchemaVersion = 1;
  Instance instance = Instance::create({}, {}, false, TimePoint(0));
  MechanismSpec mechanism;
  std::uint64_t master_seed = 0;
};

inline json trader_to_json(const Trader& t) {
  return json{{"a", t.arrival.ticks()},
              {"d", t.departure.ticks()},
              {"id", t.id.value},
              {"v", t.valuation.units()}};
}

inline Trader trader_from_json(const json& j, const std::string& where,
                               Role role) {
  io_detail::expect_keys(j, where, {"a", "d", "id", "v"});
  const std::int64_t id = io_detail::get_int(j, where, "id");
  if (id < 0 || id > UINT32_MAX) {
    throw ValidationError(where + ".id: out of range");
  }
  return Trader{TraderId{static_cast<std::uint32_t>(id)}, role,
                Money(io_detail::get_int(j, where, "v")),
                TimePoint(io_detail::get_int(j, where, "a")),
                TimePoint(io_detail::get_int(j, where, "d"))};
}

inline json instance_to_json(const Instance& instance) {
  json sellers = json::array();
  for (const Trader& s : instance.sellers()) sellers.push_back(trader_to_json(s));
  json buyers = json::array();
  for (const Trader& b : instance.buyers()) buyers.push_back(trader_to_json(b));
  return json{{"buyers", buyers},
              {"horizon", instance.horizon().ticks()},
              {"patient_sellers", instance.patient_sellers()},
              {"sellers", sellers}};
}

inline Instance instance_from_json(const json& j) {
  io_detail::expect_keys(j, "instance",
                         {"buyers", "horizon", "patient_sellers", "sellers"});
  if (!j.at("patient_sellers").is_boolean()) {
    throw ValidationError("instance.patient_sellers: expected a boolean");
  }
  std::vector<Trader> sellers;
  for (const json& s : j.at("sellers")) {
    sellers.push_back(trader_from_json(s, "instance.sellers[]", Role::seller));
  }
  std::vector<Trader> buyers;
  for (const json& b : j.at("buyers")) {
    buyers.push_back(trader_from_json(b, "instance.buyers[]", Role::buyer));
  }
  return Instance::create(std::move(sellers), std::move(buyers),
                          j.at("patient_sellers").get<bool>(),
                          TimePoint(io_detail::get_int(j, "instance", "horizon")));
}

inline json mechanism_to_json(const MechanismSpec& m) {
  switch (m.kind) {
    case MechanismKind::greedy:
      return json{{"kind", "greedy"}, {"tie_seed", m.tie_seed}};
    case MechanismKind::match_at_arrival:
      return json{{"kind", "match-at-arrival"}};
    case MechanismKind::reduction: {
      json out{{"auction", m.auction == AuctionKind::secretary_single
                               ? "secretary-single"
                               : "secretary-k"},
               {"kind", "reduction"}};
      switch (m.sampler.kind) {
        case SamplerKind::uniform_random:
          out["sampler"] = "uniform";
          break;
        case SamplerKind::front_loaded:
          out["sampler"] = "front-loaded";
          break;
        case SamplerKind::fixed_positions:
          out["sampler"] = "fixed";
          out["sampler_positions"] = m.sampler.fixed;
          break;
      }
      if (m.k_override) out["k_override"] = *m.k_override;
      return out;
    }
    case MechanismKind::decomposition:
      return json{{"inner", "greedy"},
                  {"kind", "decomposition"},
                  {"sub_market_length", m.sub_market_length},
                  {"tie_seed", m.tie_seed}};
  }
  throw PreconditionError("unknown mechanism kind");
}

inline MechanismSpec mechanism_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ValidationError("mechanism: missing 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  MechanismSpec m;
  if (kind == "greedy") {
    io_detail::expect_keys(j, "mechanism", {"kind", "tie_seed"});
    m.kind = MechanismKind::greedy;
    m.tie_seed = j.at("tie_seed").get<std::uint64_t>();
  } else if (kind == "match-at-arrival") {
    io_detail::expect_keys(j, "mechanism", {"kind"});
    m.kind = MechanismKind::match_at_arrival;
  } else if (kind == "reduction") {
    io_detail::expect_keys(j, "mechanism", {"auction", "kind", "sampler"},
                           {"sampler_positions", "k_override"});
    m.kind = MechanismKind::reduction;
    const std::string auction = j.at("auction").get<std::string>();
    if (auction == "secretary-single") {
      m.auction = AuctionKind::secretary_single;
    } else if (auction == "secretary-k") {
      m.auction = AuctionKind::secretary_k;
    } else {
      throw ValidationError("mechanism.auction: unknown auction '" + auction +
                            "'");
    }
    const std::string sampler = j.at("sampler").get<std::string>();
    if (sampler == "uniform") {
      m.sampler = PositionSampler::uniform();
    } else if (sampler == "front-loaded") {
      m.sampler = PositionSampler::front_loaded();
    } else if (sampler == "fixed") {
      if (!j.contains("sampler_positions")) {
        throw ValidationError(
            "mechanism.sampler_positions: required for the fixed sampler");
      }
      m.sampler = PositionSampler::at(
          j.at("sampler_positions").get<std::vector<std::size_t>>());
    } else {
      throw ValidationError("mechanism.sampler: unknown sampler '" + sampler +
                            "'");
    }
    if (j.contains("k_override")) {
      m.k_override = j.at("k_override").get<std::size_t>();
    }
  } else if (kind == "decomposition") {
    io_detail::expect_keys(j, "mechanism",
                           {"inner", "kind", "sub_market_length", "tie_seed"});
    if (j.at("inner").get<std::string>() != "greedy") {
      throw ValidationError("mechanism.inner: only 'greedy' is supported");
    }
    m.kind = MechanismKind::decomposition;
    m.sub_market_length = io_detail::get_int(j, "mechanism", "sub_market_length");
    m.tie_seed = j.at("tie_seed").get<std::uint64_t>();
  } else {
    throw ValidationError("mechanism.kind: unknown mechanism '" + kind + "'");
  }
  return m;
}

inline std::string serialize_scenario(const Scenario& scenario) {
  json j{{"instance", instance_to_json(scenario.instance)},
         {"master_seed", scenario.master_seed},
         {"mechanism", mechanism_to_json(scenario.mechanism)},
         {"schema_version", Scenario::kSchemaVersion}};
  return j.dump(2) + "\n";
}

inline Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario parse error at " +
                          io_detail::line_of(text, e.byte) + ": " + e.what());
  }
  io_detail::expect_keys(j, "scenario",
                         {"instance", "master_seed", "mechanism",
                          "schema_version"});
  if (io_detail::get_int(j, "scenario", "schema_version") !=
      Scenario::kSchemaVersion) {
    throw ValidationError("scenario.schema_version: unsupported version");
  }
  Scenario s;
  s.instance = instance_from_json(j.at("instance"));
  s.mechanism = mechanism_from_json(j.at("mechanism"));
  s.master_seed = j.at("master_seed").get<std::uint64_t>();
  return s;
}

// ---------------------------------------------------------------------------
// Result files
// ---------------------------------------------------------------------------

struct RunResult {
  static constexpr int kSchemaVersion = 1;
  Outcome outcome;
  Money welfare{};
  SignedMoney deficit_total = 0;
  EventLog events;
};

inline json event_to_json(const Event& e) {
  json j{{"kind", to_string(e.kind)}, {"time", e.time}};
  json ids = json::array();
  for (TraderId id : e.ids) ids.push_back(id.value);
  j["ids"] = ids;
  if (e.amount) j["amount"] = *e.amount;
  if (e.sub_market) j["sub_market"] = *e.sub_market;
  return j;
}

inline Event event_from_json(const json& j) {
  io_detail::expect_keys(j, "event", {"ids", "kind", "time"},
                         {"amount", "sub_market"});
  Event e;
  e.time = io_detail::get_int(j, "event", "time");
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  for (const json& id : j.at("ids")) {
    e.ids.push_back(TraderId{id.get<std::uint32_t>()});
  }
  if (j.contains("amount")) e.amount = io_detail::get_int(j, "event", "amount");
  if (j.contains("sub_market")) {
    e.sub_market = static_cast<int>(io_detail::get_int(j, "event", "sub_market"));
  }
  return e;
}

inline std::string serialize_result(const RunResult& result) {
  json pairs = json::array();
  for (const MatchedPair& p : result.outcome.matching.pairs) {
    pairs.push_back(json{{"ask", p.ask.value}, {"bid", p.bid.value}});
  }
  json unmatched_asks = json::array();
  for (TraderId id : result.outcome.matching.unmatched_asks) {
    unmatched_asks.push_back(id.value);
  }
  json unmatched_bids = json::array();
  for (TraderId id : result.outcome.matching.unmatched_bids) {
    unmatched_bids.push_back(id.value);
  }
  json payments = json::array();
  for (const auto& [id, amount] : result.outcome.payments) {
    payments.push_back(json{{"amount", amount.units()}, {"id", id.value}});
  }
  json events = json::array();
  for (const Event& e : result.events) events.push_back(event_to_json(e));
  json j{{"deficit", result.deficit_total},
         {"event_log", events},
         {"matching",
          json{{"pairs", pairs},
               {"unmatched_asks", unmatched_asks},
               {"unmatched_bids", unmatched_bids}}},
         {"payments", payments},
         {"schema_version", RunResult::kSchemaVersion},
         {"welfare", result.welfare.units()}};
  return j.dump(2) + "\n";
}

/// Flat tabular mirror: one row per trader.
inline std::string tabular_result(const Instance& instance,
                                  const Outcome& outcome) {
  std::ostringstream out;
  out << "id\trole\tv\ta\td\tmatched\tcounterparty\tpayment\tutility\n";
  auto counterparty = [&](TraderId id) -> std::string {
    for (const MatchedPair& p : outcome.matching.pairs) {
      if (p.ask == id) return std::to_string(p.bid.value);
      if (p.bid == id) return std::to_string(p.ask.value);
    }
    return "-";
  };
  auto row = [&](const Trader& t) {
    out << t.id.value << '\t' << to_string(t.role) << '\t'
        << t.valuation.units() << '\t' << t.arrival.ticks() << '\t'
        << t.departure.ticks() << '\t' << (outcome.allocation.at(t.id) ? 1 : 0)
        << '\t' << counterparty(t.id) << '\t'
        << outcome.payments.at(t.id).units() << '\t' << utility(t, outcome)
        << '\n';
  };
  for (const Trader& s : instance.sellers()) row(s);
  for (const Trader& b : instance.buyers()) row(b);
  return out.str();
}

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

inline RunResult execute_scenario(const Scenario& scenario,
                                  std::optional<std::uint64_t> seed_override = {}) {
  const std::uint64_t seed = seed_override.value_or(scenario.master_seed);
  const Instance& instance = scenario.instance;
  const MechanismSpec& m = scenario.mechanism;
  RunResult result;
  switch (m.kind) {
    case MechanismKind::greedy:
      result.outcome = run_greedy(instance, m.tie_seed, &result.events);
      break;
    case MechanismKind::match_at_arrival: {
      const Matching matching = match_at_arrival(instance);
      result.outcome = make_outcome(instance, matching, {});
      break;
    }
    case MechanismKind::reduction: {
      AuctionFactory factory;
      if (m.auction == AuctionKind::secretary_single) {
        factory = [](AuctionConfig config, Rng) {
          return make_secretary_single(config);
        };
      } else {
        factory = [](AuctionConfig config, Rng rng) {
          return make_secretary_k(config, rng);
        };
      }
      ReductionConfig config{m.sampler, m.k_override};
      result.outcome =
          run_reduction(instance, factory, config, Rng(seed), &result.events)
              .outcome;
      break;
    }
    case MechanismKind::decomposition: {
      const auto inner = [&](const Instance& local, EventLog* log) {
        return run_greedy(local, m.tie_seed, log);
      };
      result.outcome =
          decompose(instance, m.sub_market_length, inner, &result.events)
              .outcome;
      break;
    }
  }
  result.welfare = social_welfare(instance, result.outcome);
  result.deficit_total = deficit(result.outcome);
  return result;
}

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

}  // namespace oda
