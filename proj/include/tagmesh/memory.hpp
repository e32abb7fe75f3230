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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagmesh/row.hpp"
#include "tagmesh/tag.hpp"

namespace tagmesh {

struct TaggedWord {
  std::uint64_t data = 0;
  Tag tag;

  friend bool operator==(const TaggedWord&, const TaggedWord&) = default;
};

class OutOfRange : public std::out_of_range {
 public:
  OutOfRange(std::uint64_t addr, std::uint64_t count, std::uint64_t size);
  std::uint64_t address() const { return addr_; }

 private:
  std::uint64_t addr_;
};

enum class AccessKind : std::uint8_t { kRead, kWrite };

struct AccessEntry {
  std::uint64_t cycle = 0;
  AccessKind kind = AccessKind::kRead;
  std::uint64_t address = 0;
  std::uint64_t length = 0;

  friend bool operator==(const AccessEntry&, const AccessEntry&) = default;
};

/// Ordered record of every main-memory burst. Cycles never decrease.
class AccessTrace {
 public:
  void append(const AccessEntry& e);
  const std::vector<AccessEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const AccessTrace&, const AccessTrace&) = default;

 private:
  std::vector<AccessEntry> entries_;
};

/// Word-addressed main memory with one 8-bit tag per 64-bit word.
class TaggedMemory {
 public:
  TaggedMemory() = default;
  explicit TaggedMemory(std::size_t words) : words_(words) {}

  std::size_t size() const { return words_.size(); }

  std::vector<TaggedWord> read(std::uint64_t addr, std::uint64_t n, std::uint64_t cycle);
  void write(std::uint64_t addr, std::span<const TaggedWord> words, std::uint64_t cycle);

  // Untraced access, used to set up images and inspect results.
  const TaggedWord& at(std::uint64_t addr) const;
  void poke(std::uint64_t addr, TaggedWord w);

  const std::vector<TaggedWord>& words() const { return words_; }
  const AccessTrace& trace() const { return trace_; }

  friend bool operator==(const TaggedMemory&, const TaggedMemory&) = default;

 private:
  void check(std::uint64_t addr, std::uint64_t n) const;

  std::vector<TaggedWord> words_;
  AccessTrace trace_;
};

/// Number of 64-bit words covered by `elems` elements of width `w`.
/// Throws std::invalid_argument when the span is not word-integral.
std::uint64_t row_span_words(std::size_t elems, ElemWidth w);

struct RowLoad {
  TaggedRow row;
  std::optional<MixingFault> fault;
};

/// Reads a row-span burst and packs it into one row. The row tag is the
/// fold of the covered word tags.
RowLoad dma_load_row(TaggedMemory& mem, std::uint64_t addr, std::size_t width, ElemWidth w,
                     std::uint64_t cycle, const TagRules& rules = {});

/// Serializes a row little-endian and replicates the row tag onto every
/// covered word.
void dma_store_row(TaggedMemory& mem, std::uint64_t addr, const TaggedRow& row, ElemWidth w,
                   std::uint64_t cycle);

// Little-endian packing helpers shared with workload builders.
std::vector<std::uint64_t> pack_elems(std::span<const std::int32_t> elems, ElemWidth w);
std::vector<std::int32_t> unpack_elems(std::span<const std::uint64_t> words, std::size_t count,
                                       ElemWidth w);

}  // namespace tagmesh
