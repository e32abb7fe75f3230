/*
 * Copyright 2026 The tagmesh Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "tagmesh/controller.hpp"
#include "tagmesh/memory.hpp"
#include "tagmesh/observation.hpp"

namespace tagmesh {

class PreconditionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// True iff the two memories have identical tags everywhere and identical
/// data at every public word.
bool blinded_equivalent(const TaggedMemory& m1, const TaggedMemory& m2);

/// Name of the first observable that differs, checked in the order
/// fault, total_cycles, access_trace, tag_map, public_words. Faults are
/// compared by kind and cycle; their diagnostic text is ignored.
std::optional<std::string> first_difference(const SimObservation& x, const SimObservation& y);

struct NonInterference {
  std::optional<std::string> counterexample;  // empty on pass
  RunResult first;
  RunResult second;

  bool pass() const { return !counterexample.has_value(); }
};

/// Runs the same commands on two blinded-equivalent memories and compares
/// what an observer of public state can see.
/// Throws PreconditionViolation when the inputs differ in public data.
NonInterference check_noninterference(const AcceleratorConfig& cfg,
                                      std::span<const Command> commands, const TaggedMemory& m1,
                                      const TaggedMemory& m2);

}  // namespace tagmesh
