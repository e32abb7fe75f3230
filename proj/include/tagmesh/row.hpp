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
#include <utility>
#include <vector>

#include "tagmesh/tag.hpp"

namespace tagmesh {

/// Element widths the datapath knows about: 8-bit inputs, 32-bit
/// accumulators.
enum class ElemWidth : std::uint8_t { k8 = 8, k32 = 32 };

constexpr unsigned bits(ElemWidth w) { return static_cast<unsigned>(w); }

/// Wraps a value to the given element width (two's complement).
constexpr std::int32_t wrap_to(ElemWidth w, std::int64_t v) {
  if (w == ElemWidth::k8) return static_cast<std::int8_t>(static_cast<std::uint8_t>(v & 0xff));
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(v & 0xffffffffLL));
}

/// One matrix row. Every element shares the row's tag.
struct TaggedRow {
  std::vector<std::int32_t> elems;
  Tag tag;

  TaggedRow() = default;
  TaggedRow(std::vector<std::int32_t> e, Tag t) : elems(std::move(e)), tag(t) {}
  static TaggedRow zeros(std::size_t width) { return {std::vector<std::int32_t>(width, 0), kPublic}; }

  std::size_t width() const { return elems.size(); }
  friend bool operator==(const TaggedRow&, const TaggedRow&) = default;
};

}  // namespace tagmesh
