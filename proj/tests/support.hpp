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
#include <random>
#include <vector>

#include "tagmesh/mesh.hpp"
#include "tagmesh/oracle.hpp"

namespace tagmesh::testing {

inline IntMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                               std::int32_t lo = -128, std::int32_t hi = 127) {
  std::uniform_int_distribution<std::int32_t> dist(lo, hi);
  IntMatrix m(rows, cols);
  for (auto& v : m.values) v = dist(rng);
  return m;
}

inline TaggedRow row_of(const IntMatrix& m, std::size_t r, Tag tag = kPublic) {
  return {std::vector<std::int32_t>(m.values.begin() + static_cast<std::ptrdiff_t>(r * m.cols),
                                    m.values.begin() + static_cast<std::ptrdiff_t>((r + 1) * m.cols)),
          tag};
}

inline Matrix tagged(const IntMatrix& m, const std::vector<Tag>& tags) {
  Matrix out;
  out.cols = m.cols;
  for (std::size_t r = 0; r < m.rows; ++r) out.rows.push_back(row_of(m, r, tags.empty() ? kPublic : tags[r]));
  return out;
}

struct Emission {
  std::uint64_t cycle;
  TaggedRow row;
};

struct MeshRun {
  std::vector<Emission> out;
  std::vector<std::uint64_t> fed_at;
  std::optional<MixingFault> fault;
  std::size_t fault_feed = 0;  // index of the feed that faulted
};

/// Streams C = A*B + D through a weight-stationary mesh, one row per cycle,
/// then drains. A is K x rows, B rows x cols, D K x cols (empty: zero).
inline MeshRun drive_ws(Mesh& mesh, const IntMatrix& a, const std::vector<Tag>& a_tags,
                        const IntMatrix& b, const std::vector<Tag>& b_tags, const IntMatrix& d,
                        const std::vector<Tag>& d_tags) {
  MeshRun run;
  run.fault = mesh.preload(tagged(b, b_tags));
  if (run.fault) return run;
  const std::size_t cols = mesh.config().cols;
  for (std::size_t k = 0; k < a.rows; ++k) {
    const TaggedRow ar = row_of(a, k, a_tags.empty() ? kPublic : a_tags[k]);
    TaggedRow dr = d.empty() ? TaggedRow::zeros(cols) : row_of(d, k);
    if (!d_tags.empty()) dr.tag = d_tags[k];
    if (!run.fault) {
      run.fault = mesh.feed_row(ar, dr);
      if (run.fault) run.fault_feed = k;
    }
    run.fed_at.push_back(mesh.cycle());
    if (auto r = mesh.step()) run.out.push_back({mesh.cycle() - 1, std::move(*r)});
  }
  for (std::size_t i = 0; i < 4 * mesh.config().output_latency(); ++i) {
    if (auto r = mesh.step()) run.out.push_back({mesh.cycle() - 1, std::move(*r)});
  }
  return run;
}

/// One output-stationary pass: preload D (rows x cols), feed rows of A
/// (rows x rows) and B (rows x cols) on consecutive cycles, drain.
inline MeshRun drive_os(Mesh& mesh, const IntMatrix& a, const std::vector<Tag>& a_tags,
                        const IntMatrix& b, const std::vector<Tag>& b_tags, const IntMatrix& d,
                        const std::vector<Tag>& d_tags) {
  MeshRun run;
  const std::size_t rows = mesh.config().rows;
  const std::size_t cols = mesh.config().cols;
  IntMatrix dz = d.empty() ? IntMatrix(rows, cols) : d;
  run.fault = mesh.preload(tagged(dz, d_tags));
  if (run.fault) return run;
  for (std::size_t k = 0; k < rows; ++k) {
    if (!run.fault) {
      run.fault = mesh.feed_row(row_of(a, k, a_tags.empty() ? kPublic : a_tags[k]),
                                row_of(b, k, b_tags.empty() ? kPublic : b_tags[k]));
      if (run.fault) run.fault_feed = k;
    }
    run.fed_at.push_back(mesh.cycle());
    if (auto r = mesh.step()) run.out.push_back({mesh.cycle() - 1, std::move(*r)});
  }
  for (std::size_t i = 0; i < 4 * mesh.config().output_latency(); ++i) {
    if (auto r = mesh.step()) run.out.push_back({mesh.cycle() - 1, std::move(*r)});
  }
  return run;
}

inline IntMatrix collect(const MeshRun& run, std::size_t cols) {
  IntMatrix c(run.out.size(), cols);
  for (std::size_t i = 0; i < run.out.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) c.at(i, j) = run.out[i].row.elems[j];
  }
  return c;
}

}  // namespace tagmesh::testing
