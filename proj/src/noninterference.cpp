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

#include "tagmesh/noninterference.hpp"

namespace tagmesh {

bool blinded_equivalent(const TaggedMemory& m1, const TaggedMemory& m2) {
  if (m1.size() != m2.size()) throw PreconditionViolation("memories differ in size");
  for (std::size_t a = 0; a < m1.size(); ++a) {
    const TaggedWord& x = m1.words()[a];
    const TaggedWord& y = m2.words()[a];
    if (x.tag != y.tag) return false;
    if (x.tag.is_public() && x.data != y.data) return false;
  }
  return true;
}

std::optional<std::string> first_difference(const SimObservation& x, const SimObservation& y) {
  if (x.fault.has_value() != y.fault.has_value()) return "fault";
  if (x.fault && (x.fault->kind != y.fault->kind || x.fault->cycle != y.fault->cycle)) {
    return "fault";
  }
  if (x.total_cycles != y.total_cycles) return "total_cycles";
  if (x.access_trace != y.access_trace) return "access_trace";
  if (x.tag_map != y.tag_map) return "tag_map";
  if (x.public_words != y.public_words) return "public_words";
  return std::nullopt;
}

NonInterference check_noninterference(const AcceleratorConfig& cfg,
                                      std::span<const Command> commands, const TaggedMemory& m1,
                                      const TaggedMemory& m2) {
  if (!blinded_equivalent(m1, m2)) {
    throw PreconditionViolation("inputs differ in public data or tags");
  }
  NonInterference out{std::nullopt, run(cfg, commands, m1), run(cfg, commands, m2)};
  out.counterexample = first_difference(out.first.observation, out.second.observation);
  return out;
}

}  // namespace tagmesh
