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
#include <string>

#include "oda/errors.hpp"

namespace oda {

/// Signed money difference in minor units (utilities, deficits).
using SignedMoney = std::int64_t;

/// Non-negative amount in integer minor units (e.g. cents).
///
/// All mechanism arithmetic is exact integer arithmetic; there is no
/// rounding anywhere in allocation or payment logic.
class Money {
 public:
  constexpr Money() = default;
  constexpr explicit Money(std::int64_t units) : units_(units) {
    if (units < 0) throw ValidationError("Money cannot be negative");
  }

  constexpr std::int64_t units() const { return units_; }

  friend constexpr auto operator<=>(Money, Money) = default;

  friend constexpr Money operator+(Money a, Money b) {
    return Money(a.units_ + b.units_);
  }
  constexpr Money& operator+=(Money other) {
    units_ += other.units_;
    return *this;
  }

 private:
  std::int64_t units_ = 0;
};

/// Money extended with a +infinity element.
///
/// Houses the missing-unmatched-ask sentinel in seller payments; infinity is
/// represented explicitly, never as a large magic number.
class ExtendedMoney {
 public:
  constexpr ExtendedMoney(Money value) : value_(value) {}  // NOLINT(runtime/explicit)

  static constexpr ExtendedMoney infinity() { return ExtendedMoney(Tag{}); }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr Money finite() const {
    if (infinite_) throw PreconditionError("ExtendedMoney: value is infinite");
    return value_;
  }

  friend constexpr bool operator==(ExtendedMoney a, ExtendedMoney b) {
    if (a.infinite_ != b.infinite_) return false;
    return a.infinite_ || a.value_ == b.value_;
  }

 private:
  struct Tag {};
  constexpr explicit ExtendedMoney(Tag) : infinite_(true) {}

  bool infinite_ = false;
  Money value_{};
};

/// min(bound, value); finite by construction since min(+inf, m) = m.
constexpr Money min_finite(ExtendedMoney bound, Money value) {
  if (bound.is_infinite()) return value;
  return std::min(bound.finite(), value);
}

inline std::string to_string(Money m) { return std::to_string(m.units()); }

/// Non-negative integer tick on the market clock.
class TimePoint {
 public:
  constexpr TimePoint() = default;
  constexpr explicit TimePoint(std::int64_t ticks) : ticks_(ticks) {
    if (ticks < 0) throw ValidationError("TimePoint cannot be negative");
  }

  constexpr std::int64_t ticks() const { return ticks_; }

  friend constexpr auto operator<=>(TimePoint, TimePoint) = default;

 private:
  std::int64_t ticks_ = 0;
};

/// Closed-interval intersection test; touching endpoints count as overlap.
constexpr bool intervals_overlap(TimePoint a1, TimePoint d1, TimePoint a2,
                                 TimePoint d2) {
  return a1 <= d2 && a2 <= d1;
}

}  // namespace oda
