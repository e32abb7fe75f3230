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
#include <vector>

#include "tagmesh/row.hpp"
#include "tagmesh/tag.hpp"

namespace tagmesh {

enum class Dataflow : std::uint8_t { kWeightStationary = 0, kOutputStationary = 1 };
enum class Activation : std::uint8_t { kNone = 0, kRelu = 1 };

struct MeshConfig {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Dataflow dataflow = Dataflow::kWeightStationary;
  Activation activation = Activation::kNone;

  /// Cycles from feeding a row to that row emerging. Depends only on the
  /// shape and dataflow.
  std::size_t output_latency() const;

  friend bool operator==(const MeshConfig&, const MeshConfig&) = default;
};

/// Row-major matrix of tagged rows.
struct Matrix {
  std::vector<TaggedRow> rows;
  std::size_t cols = 0;

  std::size_t row_count() const { return rows.size(); }
};

/// ReLU without a data-dependent branch.
constexpr std::int32_t relu(std::int32_t v) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(v) &
                                   ~static_cast<std::uint32_t>(v >> 31));
}

/// Tag of output row i from the tags of a_i, d_i and the stationary operand.
inline TagResult output_row_tag(Tag a, Tag d, Tag stationary, const TagRules& rules = {}) {
  const Tag tags[] = {a, d, stationary};
  return rules.fold(tags);
}

/// Fixed-length shift register. Length 0 is a wire.
template <typename T>
class DelayLine {
 public:
  DelayLine() = default;
  explicit DelayLine(std::size_t length) : slots_(length) {}

  T shift(T in) {
    if (slots_.empty()) return in;
    T out = std::move(slots_[head_]);
    slots_[head_] = std::move(in);
    head_ = (head_ + 1) % slots_.size();
    return out;
  }
  std::size_t length() const { return slots_.size(); }

  friend bool operator==(const DelayLine&, const DelayLine&) = default;

 private:
  std::vector<T> slots_;
  std::size_t head_ = 0;
};

/// Cycle-stepped systolic array.
///
/// The PEs carry no tag logic. Each output row's tag is resolved when the
/// row is fed and travels through a queue whose depth equals the output
/// latency, so it leaves the queue in the same cycle the row leaves the
/// array.
///
/// Weight-stationary: preload B (rows x cols), then feed (a_i, d_i) pairs,
/// one per cycle at most, back-to-back rows allowed.
///
/// Output-stationary: preload D (rows x cols), then feed exactly `rows`
/// consecutive (a_k, b_k) pairs. A rows go through a transposer, so
/// a_k has `rows` elements and b_k has `cols`. Each pass needs a new
/// preload.
class Mesh {
 public:
  explicit Mesh(MeshConfig cfg, TagRules rules = {});

  const MeshConfig& config() const { return cfg_; }
  void set_activation(Activation act) { cfg_.activation = act; }

  std::optional<MixingFault> preload(const Matrix& stationary);
  std::optional<MixingFault> feed_row(const TaggedRow& a, const TaggedRow& side);
  std::optional<TaggedRow> step();

  bool faulted() const { return faulted_; }
  bool preloaded() const { return preloaded_; }
  bool busy() const;
  Tag stationary_tag() const { return stationary_tag_; }
  std::uint64_t cycle() const { return cycle_; }
  std::uint64_t rows_emitted() const { return emitted_; }

  // Instrumentation: tag storage of the parallel queue versus one tag
  // register per PE.
  std::size_t tag_registers() const { return tag_queue_.size(); }
  std::size_t per_pe_tag_registers() const { return cfg_.rows * cfg_.cols; }

  /// Tag resolved by this cycle's feed, before it enters the queue.
  std::optional<Tag> pending_tag() const { return pending_tag_; }
  /// Queue contents, index 0 is the newest entry.
  const std::vector<std::optional<Tag>>& tag_queue() const { return tag_queue_; }
  /// PEs that performed a MAC on live data during the last step.
  bool pe_active(std::size_t r, std::size_t c) const { return active_[r * cfg_.cols + c] != 0; }

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  struct Cell {
    std::int32_t value = 0;
    bool valid = false;
    friend bool operator==(const Cell&, const Cell&) = default;
  };
  struct Feed {
    std::vector<std::int32_t> a;
    std::vector<std::int32_t> side;
    friend bool operator==(const Feed&, const Feed&) = default;
  };

  std::optional<MixingFault> fail(const MixingFault& f);
  std::optional<MixingFault> feed_ws(const TaggedRow& a, const TaggedRow& d);
  std::optional<MixingFault> feed_os(const TaggedRow& a, const TaggedRow& b);
  std::optional<std::vector<std::int32_t>> step_ws();
  std::optional<std::vector<std::int32_t>> step_os();
  std::optional<Tag> shift_tag_queue();

  Cell& at(std::vector<Cell>& grid, std::size_t r, std::size_t c) { return grid[r * cfg_.cols + c]; }

  MeshConfig cfg_;
  TagRules rules_;

  std::vector<std::int32_t> stationary_;  // B (WS) or running accumulators (OS)
  Tag stationary_tag_;
  std::vector<Tag> d_tags_;  // OS only
  bool preloaded_ = false;
  bool faulted_ = false;

  std::vector<DelayLine<Cell>> a_lines_;
  std::vector<DelayLine<Cell>> side_lines_;  // D columns (WS) or B columns (OS)
  std::vector<DelayLine<Cell>> out_lines_;   // WS output de-skew
  std::vector<Cell> pe_a_;
  std::vector<Cell> pe_side_;  // partial sums (WS) or B values (OS)
  std::vector<std::uint8_t> active_;

  // OS pass bookkeeping.
  std::vector<std::vector<std::int32_t>> transposer_;
  bool pass_active_ = false;
  std::uint64_t pass_start_ = 0;
  std::size_t pass_feeds_ = 0;
  Tag b_fold_;

  std::optional<Feed> fed_;
  std::optional<Tag> pending_tag_;
  std::vector<std::optional<Tag>> tag_queue_;
  std::optional<std::vector<std::int32_t>> out_reg_;

  std::uint64_t cycle_ = 0;
  std::uint64_t emitted_ = 0;
};

}  // namespace tagmesh
