// Copyright 2026 The xstab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef XSTAB_ERRORS_H_
#define XSTAB_ERRORS_H_

#include <stdexcept>
#include <string>

namespace xstab {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Endpoint unreachable, non-2xx status, or retries exhausted.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Endpoint answered, but the payload violates the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration, template, threshold or lexicon entry.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A metric was requested over an empty admissible set.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Dataset file could not be ingested.
class DatasetError : public Error {
 public:
  using Error::Error;
};

// An operator precondition does not hold for this input; the grid records
// the case as skipped instead of failing the run.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace xstab

#endif  // XSTAB_ERRORS_H_
