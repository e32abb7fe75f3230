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

#include "tagmesh/observation.hpp"

namespace tagmesh {

std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::kCommand: return "CommandFault";
    case FaultKind::kMixing: return "MixingFault";
    case FaultKind::kOutOfRange: return "OutOfRange";
    case FaultKind::kInvalidCommand: return "InvalidCommand";
  }
  return "?";
}

SimObservation SimObservation::project(const TaggedMemory& mem, std::uint64_t cycles,
                                       std::optional<Fault> fault) {
  SimObservation obs;
  obs.tag_map.reserve(mem.size());
  for (std::uint64_t a = 0; a < mem.size(); ++a) {
    const TaggedWord& w = mem.words()[a];
    obs.tag_map.push_back(w.tag);
    if (w.tag.is_public()) obs.public_words.emplace_hint(obs.public_words.end(), a, w.data);
  }
  obs.access_trace = mem.trace();
  obs.total_cycles = cycles;
  obs.fault = std::move(fault);
  return obs;
}

}  // namespace tagmesh
