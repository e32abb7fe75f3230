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

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace tagmesh {

/// Security-domain label. 0 is public; every nonzero value is a distinct
/// client domain.
struct Tag {
  std::uint8_t value = 0;

  constexpr Tag() = default;
  constexpr explicit Tag(std::uint8_t v) : value(v) {}

  constexpr bool is_public() const { return value == 0; }
  constexpr bool is_blinded() const { return value != 0; }

  friend constexpr auto operator<=>(Tag, Tag) = default;
};

inline constexpr Tag kPublic{};

/// Two distinct nonzero domains met in one operation.
struct MixingFault {
  Tag first;
  Tag second;

  std::string describe() const;
  friend constexpr bool operator==(const MixingFault&, const MixingFault&) = default;
};

/// Outcome of a join or fold: a tag, or the pair that could not be combined.
struct TagResult {
  Tag tag;
  std::optional<MixingFault> fault;

  constexpr bool ok() const { return !fault.has_value(); }
};

constexpr TagResult tag_join(Tag a, Tag b) {
  if (a.is_public()) return {b, std::nullopt};
  if (b.is_public() || a == b) return {a, std::nullopt};
  return {kPublic, MixingFault{a, b}};
}

/// Left fold of tag_join. The empty fold is public.
constexpr TagResult tag_fold(std::span<const Tag> tags) {
  TagResult acc{kPublic, std::nullopt};
  for (Tag t : tags) {
    acc = tag_join(acc.tag, t);
    if (!acc.ok()) return acc;
  }
  return acc;
}

/// Join rules carried by every stateful component. The stubbed mode
/// exists only to show that the non-interference checker catches a broken
/// policy; it must never be used for real runs.
enum class JoinMode : std::uint8_t { kEnforce, kStubAlwaysPublic };

class TagRules {
 public:
  constexpr TagRules() = default;
  constexpr explicit TagRules(JoinMode mode) : mode_(mode) {}

  constexpr JoinMode mode() const { return mode_; }

  constexpr TagResult join(Tag a, Tag b) const {
    if (mode_ == JoinMode::kStubAlwaysPublic) return {kPublic, std::nullopt};
    return tag_join(a, b);
  }

  constexpr TagResult fold(std::span<const Tag> tags) const {
    TagResult acc{kPublic, std::nullopt};
    for (Tag t : tags) {
      acc = join(acc.tag, t);
      if (!acc.ok()) return acc;
    }
    return acc;
  }

  friend constexpr bool operator==(TagRules, TagRules) = default;

 private:
  JoinMode mode_ = JoinMode::kEnforce;
};

}  // namespace tagmesh
