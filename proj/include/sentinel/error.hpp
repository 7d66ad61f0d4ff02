// Copyright 2026 The Sentinel Authors.
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

namespace sentinel {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (datasets, fixtures, configs, reports).
class DataError : public Error {
 public:
  using Error::Error;
};

// Network failure, non-retryable HTTP status, or retries exhausted.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Upstream answered, but not in the expected wire format.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A mock script had no rule for a request and no default reply.
class ScriptError : public Error {
 public:
  using Error::Error;
};

// A metric is undefined for the given records (e.g. ASR with no cleanly-correct example).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

}  // namespace sentinel
