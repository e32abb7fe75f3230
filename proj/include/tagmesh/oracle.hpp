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
#include <vector>

#include "tagmesh/tag.hpp"

namespace tagmesh {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Plain row-major int32 matrix; the oracles' currency.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> values;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0) {}
  IntMatrix(std::size_t r, std::size_t c, std::vector<std::int32_t> v);

  std::int32_t& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  std::int32_t at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  bool empty() const { return rows == 0 || cols == 0; }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

/// C = A * B + D by the textbook triple loop, wrapping at 32 bits. An empty
/// D means zero.
IntMatrix oracle_matmul(const IntMatrix& a, const IntMatrix& b, const IntMatrix& d);

struct TagOracle {
  std::vector<Tag> row_tags;
  bool fault = false;

  friend bool operator==(const TagOracle&, const TagOracle&) = default;
};

/// Output-row tags by direct enumeration: row i collects the tags of a_i,
/// d_i and every row of B, and faults when two of them are distinct and
/// nonzero. Empty d_tags means D is absent.
TagOracle oracle_output_tags(std::span<const Tag> a_tags, std::span<const Tag> d_tags,
                             std::span<const Tag> b_tags);

}  // namespace tagmesh
