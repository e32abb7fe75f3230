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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tagmesh/memory.hpp"
#include "tagmesh/tag.hpp"

namespace tagmesh {

enum class FaultKind : std::uint8_t { kCommand, kMixing, kOutOfRange, kInvalidCommand };

std::string_view to_string(FaultKind k);

/// Terminates a run. Nothing is written to memory at or after `cycle`.
struct Fault {
  FaultKind kind = FaultKind::kCommand;
  std::uint64_t cycle = 0;
  std::string detail;
  std::optional<MixingFault> tags;  // kMixing only

  bool is_security_fault() const { return kind == FaultKind::kCommand || kind == FaultKind::kMixing; }
  friend bool operator==(const Fault&, const Fault&) = default;
};

struct SimStats {
  std::uint64_t total_cycles = 0;
  std::uint64_t mvin_count = 0;
  std::uint64_t mvout_count = 0;
  std::uint64_t compute_rows = 0;
  std::uint64_t tag_registers_used = 0;
  std::uint64_t per_pe_equivalent_registers = 0;

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

/// What an observer without access to blinded values can see after a run.
struct SimObservation {
  std::map<std::uint64_t, std::uint64_t> public_words;  // tag-0 words only
  std::vector<Tag> tag_map;                             // every word
  AccessTrace access_trace;
  std::uint64_t total_cycles = 0;
  std::optional<Fault> fault;

  static SimObservation project(const TaggedMemory& mem, std::uint64_t cycles,
                                std::optional<Fault> fault);

  friend bool operator==(const SimObservation&, const SimObservation&) = default;
};

}  // namespace tagmesh
