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

#include <stdexcept>
#include <string>

namespace oda {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed data: bad scenario files, out-of-range fields, broken invariants
/// in user-supplied input. CLI exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

/// An operation was invoked outside its contract (wrong mechanism for the
/// instance, oracle size bound exceeded, unmatched trader payment lookup).
/// CLI exit code 3.
struct PreconditionError : Error {
  using Error::Error;
};

/// Online-stream protocol misuse: an auction fed more or fewer inputs than
/// its configured n.
struct ProtocolError : Error {
  using Error::Error;
};

}  // namespace oda
