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

#include "tagmesh/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tagmesh {

namespace {

std::int32_t mac(std::int32_t acc, std::int32_t a, std::int32_t b) {
  return wrap_to(ElemWidth::k32, static_cast<std::int64_t>(acc) +
                                     static_cast<std::int64_t>(a) * static_cast<std::int64_t>(b));
}

void require(bool cond, const char* what) {
  if (!cond) throw std::logic_error(what);
}

}  // namespace

std::size_t MeshConfig::output_latency() const {
  // WS: input skew plus the diagonal wavefront. OS adds the transposer.
  return dataflow == Dataflow::kWeightStationary ? rows + cols : 2 * rows + cols;
}

Mesh::Mesh(MeshConfig cfg, TagRules rules) : cfg_(cfg), rules_(rules) {
  if (cfg.rows == 0 || cfg.cols == 0) throw std::invalid_argument("mesh needs at least one PE");
  const std::size_t pes = cfg.rows * cfg.cols;
  stationary_.assign(pes, 0);
  pe_a_.assign(pes, {});
  pe_side_.assign(pes, {});
  active_.assign(pes, 0);
  tag_queue_.assign(cfg.output_latency(), std::nullopt);

  for (std::size_t r = 0; r < cfg.rows; ++r) a_lines_.emplace_back(r);
  if (cfg.dataflow == Dataflow::kWeightStationary) {
    for (std::size_t c = 0; c < cfg.cols; ++c) {
      side_lines_.emplace_back(c);
      out_lines_.emplace_back(cfg.cols - 1 - c);
    }
  } else {
    for (std::size_t c = 0; c < cfg.cols; ++c) side_lines_.emplace_back(cfg.rows + c);
    d_tags_.assign(cfg.rows, kPublic);
    transposer_.assign(cfg.rows, std::vector<std::int32_t>(cfg.rows, 0));
  }
}

bool Mesh::busy() const {
  return fed_.has_value() || out_reg_.has_value() || pass_active_ ||
         std::any_of(tag_queue_.begin(), tag_queue_.end(),
                     [](const auto& t) { return t.has_value(); });
}

std::optional<MixingFault> Mesh::fail(const MixingFault& f) {
  // Sticky: rows still in flight are dropped along with everything after.
  faulted_ = true;
  fed_.reset();
  pending_tag_.reset();
  out_reg_.reset();
  return f;
}

std::optional<MixingFault> Mesh::preload(const Matrix& m) {
  require(!faulted_, "preload after a mesh fault");
  require(!busy(), "preload while rows are in flight");
  if (m.row_count() != cfg_.rows || m.cols != cfg_.cols) {
    throw std::invalid_argument("stationary matrix does not match the mesh shape");
  }
  for (const auto& row : m.rows) {
    if (row.width() != cfg_.cols) throw std::invalid_argument("ragged stationary matrix");
  }

  if (cfg_.dataflow == Dataflow::kWeightStationary) {
    std::vector<Tag> tags;
    for (const auto& row : m.rows) tags.push_back(row.tag);
    const TagResult folded = rules_.fold(tags);
    if (!folded.ok()) {
      preloaded_ = false;
      return fail(*folded.fault);
    }
    stationary_tag_ = folded.tag;
  } else {
    // Each output row depends on its own d_i only.
    for (std::size_t r = 0; r < cfg_.rows; ++r) d_tags_[r] = m.rows[r].tag;
    stationary_tag_ = kPublic;
    b_fold_ = kPublic;
    pass_feeds_ = 0;
  }
  for (std::size_t r = 0; r < cfg_.rows; ++r) {
    std::copy(m.rows[r].elems.begin(), m.rows[r].elems.end(),
              stationary_.begin() + static_cast<std::ptrdiff_t>(r * cfg_.cols));
  }
  preloaded_ = true;
  return std::nullopt;
}

std::optional<MixingFault> Mesh::feed_row(const TaggedRow& a, const TaggedRow& side) {
  require(!faulted_, "feed after a mesh fault");
  require(preloaded_, "feed before preload");
  require(!fed_, "two feeds in one cycle");
  return cfg_.dataflow == Dataflow::kWeightStationary ? feed_ws(a, side) : feed_os(a, side);
}

std::optional<MixingFault> Mesh::feed_ws(const TaggedRow& a, const TaggedRow& d) {
  if (a.width() != cfg_.rows || d.width() != cfg_.cols) {
    throw std::invalid_argument("fed rows do not match the mesh shape");
  }
  const TagResult tag = output_row_tag(a.tag, d.tag, stationary_tag_, rules_);
  if (!tag.ok()) return fail(*tag.fault);
  fed_ = Feed{a.elems, d.elems};
  pending_tag_ = tag.tag;
  return std::nullopt;
}

std::optional<MixingFault> Mesh::feed_os(const TaggedRow& a, const TaggedRow& b) {
  if (a.width() != cfg_.rows || b.width() != cfg_.cols) {
    throw std::invalid_argument("fed rows do not match the mesh shape");
  }
  require(pass_feeds_ < cfg_.rows, "output-stationary pass already complete; preload again");
  require(pass_feeds_ == 0 || pass_start_ + pass_feeds_ == cycle_,
          "output-stationary feeds must be consecutive");

  const std::size_t k = pass_feeds_;
  const TagResult b_fold = rules_.join(b_fold_, b.tag);
  if (!b_fold.ok()) return fail(*b_fold.fault);
  // Rows already queued in this pass also depend on b_k.
  for (std::size_t slot = 0; slot < k; ++slot) {
    const TagResult amended = rules_.join(*tag_queue_[slot], b.tag);
    if (!amended.ok()) return fail(*amended.fault);
    tag_queue_[slot] = amended.tag;
  }
  const TagResult tag = output_row_tag(a.tag, d_tags_[k], b_fold.tag, rules_);
  if (!tag.ok()) return fail(*tag.fault);

  b_fold_ = b_fold.tag;
  if (k == 0) {
    pass_start_ = cycle_;
    pass_active_ = true;
  }
  ++pass_feeds_;
  fed_ = Feed{a.elems, b.elems};
  pending_tag_ = tag.tag;
  return std::nullopt;
}

std::optional<Tag> Mesh::shift_tag_queue() {
  std::optional<Tag> popped = tag_queue_.back();
  std::move_backward(tag_queue_.begin(), tag_queue_.end() - 1, tag_queue_.end());
  tag_queue_.front() = pending_tag_;
  pending_tag_.reset();
  return popped;
}

std::optional<std::vector<std::int32_t>> Mesh::step_ws() {
  const std::size_t R = cfg_.rows;
  const std::size_t C = cfg_.cols;

  std::vector<Cell> a_edge(R);
  std::vector<Cell> d_edge(C);
  std::vector<Cell> bottom(C);
  for (std::size_t r = 0; r < R; ++r) {
    a_edge[r] = a_lines_[r].shift(fed_ ? Cell{fed_->a[r], true} : Cell{});
  }
  for (std::size_t c = 0; c < C; ++c) {
    d_edge[c] = side_lines_[c].shift(fed_ ? Cell{fed_->side[c], true} : Cell{});
    bottom[c] = out_lines_[c].shift(at(pe_side_, R - 1, c));
  }

  std::vector<Cell> next_a(pe_a_.size());
  std::vector<Cell> next_ps(pe_side_.size());
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      const Cell in_a = c == 0 ? a_edge[r] : at(pe_a_, r, c - 1);
      const Cell in_ps = r == 0 ? d_edge[c] : at(pe_side_, r - 1, c);
      next_a[r * C + c] = in_a;
      next_ps[r * C + c] = {mac(in_ps.value, in_a.value, stationary_[r * C + c]), in_ps.valid};
      active_[r * C + c] = in_ps.valid ? 1 : 0;
    }
  }
  pe_a_ = std::move(next_a);
  pe_side_ = std::move(next_ps);

  auto emitted = std::move(out_reg_);
  out_reg_.reset();
  if (bottom[0].valid) {
    std::vector<std::int32_t> row(C);
    for (std::size_t c = 0; c < C; ++c) {
      require(bottom[c].valid, "output de-skew lost alignment");
      row[c] = bottom[c].value;
    }
    out_reg_ = std::move(row);
  }
  return emitted;
}

std::optional<std::vector<std::int32_t>> Mesh::step_os() {
  const std::size_t R = cfg_.rows;
  const std::size_t C = cfg_.cols;
  const std::size_t latency = cfg_.output_latency();
  const std::uint64_t q = pass_active_ ? cycle_ - pass_start_ : 0;

  if (fed_) transposer_[pass_feeds_ - 1] = fed_->a;

  std::vector<Cell> a_edge(R);
  std::vector<Cell> b_edge(C);
  const bool emitting_columns = pass_active_ && q >= R && q < 2 * R;
  for (std::size_t i = 0; i < R; ++i) {
    const Cell in = emitting_columns ? Cell{transposer_[i][q - R], true} : Cell{};
    a_edge[i] = a_lines_[i].shift(in);
  }
  for (std::size_t j = 0; j < C; ++j) {
    b_edge[j] = side_lines_[j].shift(fed_ ? Cell{fed_->side[j], true} : Cell{});
  }

  std::vector<Cell> next_a(pe_a_.size());
  std::vector<Cell> next_b(pe_side_.size());
  for (std::size_t i = 0; i < R; ++i) {
    for (std::size_t j = 0; j < C; ++j) {
      const Cell in_a = j == 0 ? a_edge[i] : at(pe_a_, i, j - 1);
      const Cell in_b = i == 0 ? b_edge[j] : at(pe_side_, i - 1, j);
      const bool live = in_a.valid && in_b.valid;
      auto& acc = stationary_[i * C + j];
      acc = mac(acc, in_a.value, in_b.value);
      next_a[i * C + j] = in_a;
      next_b[i * C + j] = in_b;
      active_[i * C + j] = live ? 1 : 0;
    }
  }
  pe_a_ = std::move(next_a);
  pe_side_ = std::move(next_b);

  auto emitted = std::move(out_reg_);
  out_reg_.reset();
  if (pass_active_ && q + 1 >= latency && q + 1 - latency < R) {
    const std::size_t i = q + 1 - latency;
    out_reg_ = std::vector<std::int32_t>(stationary_.begin() + static_cast<std::ptrdiff_t>(i * C),
                                         stationary_.begin() + static_cast<std::ptrdiff_t>((i + 1) * C));
    if (i + 1 == R) {
      pass_active_ = false;
      preloaded_ = false;
    }
  }
  return emitted;
}

std::optional<TaggedRow> Mesh::step() {
  if (faulted_) {
    std::fill(active_.begin(), active_.end(), 0);
    ++cycle_;
    return std::nullopt;
  }

  auto values = cfg_.dataflow == Dataflow::kWeightStationary ? step_ws() : step_os();
  const std::optional<Tag> tag = shift_tag_queue();
  fed_.reset();
  ++cycle_;

  require(values.has_value() == tag.has_value(), "tag queue out of step with the array");
  if (!values) return std::nullopt;

  if (cfg_.activation == Activation::kRelu) {
    for (auto& v : *values) v = relu(v);
  }
  ++emitted_;
  return TaggedRow{std::move(*values), *tag};
}

}  // namespace tagmesh
