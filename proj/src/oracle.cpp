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

#include "tagmesh/oracle.hpp"

namespace tagmesh {

IntMatrix::IntMatrix(std::size_t r, std::size_t c, std::vector<std::int32_t> v)
    : rows(r), cols(c), values(std::move(v)) {
  if (values.size() != r * c) throw DimensionMismatch("matrix value count does not match shape");
}

IntMatrix oracle_matmul(const IntMatrix& a, const IntMatrix& b, const IntMatrix& d) {
  if (a.cols != b.rows) throw DimensionMismatch("inner dimensions differ");
  if (!d.empty() && (d.rows != a.rows || d.cols != b.cols)) {
    throw DimensionMismatch("D does not match the product shape");
  }
  IntMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      std::uint32_t acc = d.empty() ? 0u : static_cast<std::uint32_t>(d.at(i, j));
      for (std::size_t k = 0; k < a.cols; ++k) {
        acc += static_cast<std::uint32_t>(a.at(i, k)) * static_cast<std::uint32_t>(b.at(k, j));
      }
      c.at(i, j) = static_cast<std::int32_t>(acc);
    }
  }
  return c;
}

TagOracle oracle_output_tags(std::span<const Tag> a_tags, std::span<const Tag> d_tags,
                             std::span<const Tag> b_tags) {
  if (!d_tags.empty() && d_tags.size() != a_tags.size()) {
    throw DimensionMismatch("A and D row counts differ");
  }
  TagOracle out;
  for (std::size_t i = 0; i < a_tags.size(); ++i) {
    std::vector<Tag> inputs{a_tags[i]};
    if (!d_tags.empty()) inputs.push_back(d_tags[i]);
    inputs.insert(inputs.end(), b_tags.begin(), b_tags.end());

    Tag seen;
    for (std::size_t x = 0; x < inputs.size(); ++x) {
      for (std::size_t y = 0; y < inputs.size(); ++y) {
        if (inputs[x].is_blinded() && inputs[y].is_blinded() && inputs[x] != inputs[y]) {
          out.fault = true;
        }
      }
      if (inputs[x].is_blinded()) seen = inputs[x];
    }
    out.row_tags.push_back(seen);
  }
  if (out.fault) out.row_tags.clear();
  return out;
}

}  // namespace tagmesh
