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

#include "tagmesh/workload.hpp"

#include <algorithm>
#include <stdexcept>

#include "tagmesh/mesh.hpp"

namespace tagmesh {

ElemWidth input_elem_for(std::size_t dim) {
  return (dim * 8) % 64 == 0 ? ElemWidth::k8 : ElemWidth::k32;
}

IntMatrix clip8(IntMatrix m) {
  for (auto& v : m.values) v = std::clamp<std::int32_t>(v, -128, 127);
  return m;
}

IntMatrix relu(IntMatrix m) {
  for (auto& v : m.values) v = relu(v);
  return m;
}

IntMatrix read_matrix(const TaggedMemory& mem, const MatrixHandle& h) {
  IntMatrix out(h.rows, h.cols);
  for (std::size_t r = 0; r < h.rows; ++r) {
    std::vector<std::uint64_t> raw(h.stride);
    for (std::uint64_t w = 0; w < h.stride; ++w) raw[w] = mem.at(h.addr + r * h.stride + w).data;
    const auto elems = unpack_elems(raw, h.cols, h.elem);
    std::copy(elems.begin(), elems.end(), out.values.begin() + static_cast<std::ptrdiff_t>(r * h.cols));
  }
  return out;
}

std::vector<Tag> read_row_tags(const TaggedMemory& mem, const MatrixHandle& h) {
  std::vector<Tag> tags;
  for (std::size_t r = 0; r < h.rows; ++r) tags.push_back(mem.at(h.word_of(r, 0)).tag);
  return tags;
}

WorkloadBuilder::WorkloadBuilder(AcceleratorConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.spad_banks < 3) throw std::invalid_argument("tiled kernels need three scratchpad banks");
}

MatrixHandle WorkloadBuilder::reserve(std::size_t rows, std::size_t cols, ElemWidth elem) {
  MatrixHandle h;
  h.addr = image_.size();
  h.rows = rows;
  h.cols = cols;
  h.padded_rows = pad(rows);
  h.padded_cols = pad(cols);
  h.elem = elem;
  h.stride = row_span_words(h.padded_cols, elem);
  row_span_words(cfg_.dim, elem);  // tiles must be word-aligned too
  image_.resize(image_.size() + h.padded_rows * h.stride);
  return h;
}

std::uint64_t WorkloadBuilder::reserve_words(std::size_t n) {
  const std::uint64_t at = image_.size();
  image_.resize(image_.size() + n);
  return at;
}

MatrixHandle WorkloadBuilder::place(const IntMatrix& m, std::span<const Tag> row_tags,
                                    ElemWidth elem) {
  if (row_tags.size() != m.rows) throw DimensionMismatch("one tag per matrix row");
  MatrixHandle h = reserve(m.rows, m.cols, elem);
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::vector<std::int32_t> row(h.padded_cols, 0);
    std::copy_n(m.values.begin() + static_cast<std::ptrdiff_t>(r * m.cols), m.cols, row.begin());
    const auto words = pack_elems(row, elem);
    for (std::uint64_t w = 0; w < words.size(); ++w) {
      image_[h.addr + r * h.stride + w] = TaggedWord{words[w], row_tags[r]};
    }
  }
  return h;
}

void WorkloadBuilder::set_config(Dataflow df, Activation act, std::size_t k) {
  const auto dim = static_cast<std::uint32_t>(cfg_.dim);
  const ConfigArgs args{df, act, static_cast<std::uint32_t>(k), dim, dim};
  if (last_config_ && *last_config_ == args) return;
  emit(encode(args));
  last_config_ = args;
}

void WorkloadBuilder::mvin(const MatrixHandle& m, std::size_t row0, std::size_t rows,
                           std::size_t col0, std::size_t cols, std::uint32_t spad_row,
                           std::uint32_t col_offset) {
  MoveArgs a;
  a.addr = static_cast<std::uint32_t>(m.word_of(row0, col0));
  a.stride = static_cast<std::uint32_t>(m.stride);
  a.row = spad_row;
  a.rows = static_cast<std::uint32_t>(rows);
  a.col_offset = col_offset;
  a.cols = cols == cfg_.dim ? 0 : static_cast<std::uint32_t>(cols);
  a.elem = m.elem;
  emit(encode_mvin(a));
}

void WorkloadBuilder::mvout(const MatrixHandle& m, std::size_t row0, std::size_t rows,
                            std::size_t col0, std::uint32_t acc_row) {
  MoveArgs a;
  a.addr = static_cast<std::uint32_t>(m.word_of(row0, col0));
  a.stride = static_cast<std::uint32_t>(m.stride);
  a.row = acc_row;
  a.rows = static_cast<std::uint32_t>(rows);
  a.elem = m.elem;
  emit(encode_mvout(a));
}

void WorkloadBuilder::tiled_matmul(const MatrixHandle& a, const MatrixHandle& b,
                                   const std::optional<MatrixHandle>& d, const MatrixHandle& c,
                                   Dataflow df, bool relu_out) {
  const std::size_t dim = cfg_.dim;
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols ||
      (d && (d->rows != a.rows || d->cols != b.cols))) {
    throw DimensionMismatch("tiled matmul operands do not conform");
  }
  const std::size_t k_tiles_rows = a.padded_rows;
  const std::size_t n_tiles = a.padded_cols / dim;
  const std::size_t m_tiles = b.padded_cols / dim;
  auto act_for = [&](std::size_t nt) {
    return relu_out && nt + 1 == n_tiles ? Activation::kRelu : Activation::kNone;
  };

  if (df == Dataflow::kWeightStationary) {
    const std::size_t limit = std::min(cfg_.spad_depth, cfg_.acc_depth) / dim * dim;
    if (limit == 0) throw std::invalid_argument("scratchpad shallower than one tile");
    for (std::size_t k0 = 0; k0 < k_tiles_rows; k0 += limit) {
      const std::size_t kk = std::min(limit, k_tiles_rows - k0);
      for (std::size_t mt = 0; mt < m_tiles; ++mt) {
        for (std::size_t nt = 0; nt < n_tiles; ++nt) {
          set_config(df, act_for(nt), kk);
          mvin(b, nt * dim, dim, mt * dim, dim, b_base());
          emit(encode(PreloadArgs{b_base(), RowSource::kScratchpad}));
          mvin(a, k0, kk, nt * dim, dim, a_base());

          ComputeArgs args;
          args.a_row = a_base();
          if (nt > 0) {
            args.d_source = RowSource::kAccumulator;
            args.d_row = 0;
          } else if (d) {
            mvin(*d, k0, kk, mt * dim, dim, d_base());
            args.d_source = RowSource::kScratchpad;
            args.d_row = d_base();
          }
          emit(encode(args));
        }
        mvout(c, k0, kk, mt * dim, 0);
      }
    }
    return;
  }

  for (std::size_t kt = 0; kt < k_tiles_rows / dim; ++kt) {
    for (std::size_t mt = 0; mt < m_tiles; ++mt) {
      for (std::size_t nt = 0; nt < n_tiles; ++nt) {
        set_config(df, act_for(nt), dim);
        if (nt > 0) {
          emit(encode(PreloadArgs{0, RowSource::kAccumulator}));
        } else if (d) {
          mvin(*d, kt * dim, dim, mt * dim, dim, d_base());
          emit(encode(PreloadArgs{d_base(), RowSource::kScratchpad}));
        } else {
          emit(encode(PreloadArgs{0, RowSource::kZero}));
        }
        mvin(a, kt * dim, dim, nt * dim, dim, a_base());
        mvin(b, nt * dim, dim, mt * dim, dim, b_base());
        ComputeArgs args;
        args.a_row = a_base();
        args.b_row = b_base();
        emit(encode(args));
      }
      mvout(c, kt * dim, dim, mt * dim, 0);
    }
  }
}

void WorkloadBuilder::expect(const MatrixHandle& where, IntMatrix values,
                             std::vector<Tag> row_tags) {
  if (values.rows != where.rows || values.cols != where.cols || row_tags.size() != where.rows) {
    throw DimensionMismatch("expected region does not match its handle");
  }
  expected_.push_back({where, std::move(values), std::move(row_tags)});
}

Workload WorkloadBuilder::finish(std::string name) && {
  TaggedMemory mem(image_.size());
  for (std::uint64_t a = 0; a < image_.size(); ++a) mem.poke(a, image_[a]);
  return {std::move(name), cfg_, std::move(mem), std::move(commands_), std::move(expected_)};
}

}  // namespace tagmesh
