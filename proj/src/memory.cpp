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

#include "tagmesh/memory.hpp"

#include <algorithm>
#include <sstream>

namespace tagmesh {

namespace {

std::string range_message(std::uint64_t addr, std::uint64_t count, std::uint64_t size) {
  std::ostringstream os;
  os << "memory access [" << addr << ", " << addr + count << ") outside [0, " << size << ")";
  return os.str();
}

}  // namespace

OutOfRange::OutOfRange(std::uint64_t addr, std::uint64_t count, std::uint64_t size)
    : std::out_of_range(range_message(addr, count, size)), addr_(addr) {}

void AccessTrace::append(const AccessEntry& e) {
  if (!entries_.empty() && e.cycle < entries_.back().cycle) {
    throw std::logic_error("access trace entries must be appended in cycle order");
  }
  entries_.push_back(e);
}

void TaggedMemory::check(std::uint64_t addr, std::uint64_t n) const {
  // addr + n may overflow for hostile operands; compare without adding.
  if (addr >= words_.size() || n > words_.size() - addr) {
    throw OutOfRange(addr, n, words_.size());
  }
}

std::vector<TaggedWord> TaggedMemory::read(std::uint64_t addr, std::uint64_t n,
                                           std::uint64_t cycle) {
  check(addr, n);
  trace_.append({cycle, AccessKind::kRead, addr, n});
  return {words_.begin() + static_cast<std::ptrdiff_t>(addr),
          words_.begin() + static_cast<std::ptrdiff_t>(addr + n)};
}

void TaggedMemory::write(std::uint64_t addr, std::span<const TaggedWord> words,
                         std::uint64_t cycle) {
  check(addr, words.size());
  trace_.append({cycle, AccessKind::kWrite, addr, words.size()});
  std::copy(words.begin(), words.end(), words_.begin() + static_cast<std::ptrdiff_t>(addr));
}

const TaggedWord& TaggedMemory::at(std::uint64_t addr) const {
  check(addr, 1);
  return words_[addr];
}

void TaggedMemory::poke(std::uint64_t addr, TaggedWord w) {
  check(addr, 1);
  words_[addr] = w;
}

std::uint64_t row_span_words(std::size_t elems, ElemWidth w) {
  const std::uint64_t total = static_cast<std::uint64_t>(elems) * bits(w);
  if (elems == 0 || total % 64 != 0) {
    throw std::invalid_argument("row of " + std::to_string(elems) + " x " +
                                std::to_string(bits(w)) + "-bit elements is not word-aligned");
  }
  return total / 64;
}

std::vector<std::uint64_t> pack_elems(std::span<const std::int32_t> elems, ElemWidth w) {
  const unsigned b = bits(w);
  const std::uint64_t mask = (std::uint64_t{1} << b) - 1;
  std::vector<std::uint64_t> words(row_span_words(elems.size(), w), 0);
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const std::uint64_t bit = static_cast<std::uint64_t>(i) * b;
    words[bit / 64] |= (static_cast<std::uint64_t>(static_cast<std::int64_t>(elems[i])) & mask)
                       << (bit % 64);
  }
  return words;
}

std::vector<std::int32_t> unpack_elems(std::span<const std::uint64_t> words, std::size_t count,
                                       ElemWidth w) {
  const unsigned b = bits(w);
  const std::uint64_t mask = (std::uint64_t{1} << b) - 1;
  std::vector<std::int32_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t bit = static_cast<std::uint64_t>(i) * b;
    out[i] = wrap_to(w, static_cast<std::int64_t>((words[bit / 64] >> (bit % 64)) & mask));
  }
  return out;
}

RowLoad dma_load_row(TaggedMemory& mem, std::uint64_t addr, std::size_t width, ElemWidth w,
                     std::uint64_t cycle, const TagRules& rules) {
  const std::uint64_t span = row_span_words(width, w);
  const auto words = mem.read(addr, span, cycle);

  std::vector<Tag> tags;
  std::vector<std::uint64_t> raw;
  tags.reserve(words.size());
  raw.reserve(words.size());
  for (const auto& word : words) {
    tags.push_back(word.tag);
    raw.push_back(word.data);
  }
  const TagResult folded = rules.fold(tags);
  if (!folded.ok()) return {TaggedRow{}, folded.fault};
  return {TaggedRow{unpack_elems(raw, width, w), folded.tag}, std::nullopt};
}

void dma_store_row(TaggedMemory& mem, std::uint64_t addr, const TaggedRow& row, ElemWidth w,
                   std::uint64_t cycle) {
  const auto raw = pack_elems(row.elems, w);
  std::vector<TaggedWord> words;
  words.reserve(raw.size());
  for (std::uint64_t d : raw) words.push_back({d, row.tag});
  mem.write(addr, words, cycle);
}

}  // namespace tagmesh
