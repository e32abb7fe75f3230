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
#include <string>
#include <vector>

#include "tagmesh/command.hpp"
#include "tagmesh/controller.hpp"
#include "tagmesh/memory.hpp"
#include "tagmesh/oracle.hpp"

namespace tagmesh {

/// A matrix laid out row-major in main memory, padded to mesh-size tiles.
struct MatrixHandle {
  std::uint64_t addr = 0;
  std::size_t rows = 0;  // logical
  std::size_t cols = 0;  // logical
  std::size_t padded_rows = 0;
  std::size_t padded_cols = 0;
  std::uint64_t stride = 0;  // words per row
  ElemWidth elem = ElemWidth::k8;

  std::uint64_t word_of(std::size_t row, std::size_t col) const {
    return addr + row * stride + (col * bits(elem)) / 64;
  }
};

/// A region of memory whose final contents are known in advance.
struct ExpectedMatrix {
  MatrixHandle where;
  IntMatrix values;
  std::vector<Tag> row_tags;
};

struct Workload {
  std::string name;
  AcceleratorConfig config;
  TaggedMemory memory;
  std::vector<Command> commands;
  std::vector<ExpectedMatrix> expected;
};

/// Logical values of a matrix region.
IntMatrix read_matrix(const TaggedMemory& mem, const MatrixHandle& h);
/// Tag of the first word of each logical row.
std::vector<Tag> read_row_tags(const TaggedMemory& mem, const MatrixHandle& h);

/// Assembles a memory image and a command list.
///
/// Scratchpad layout used by the tiled kernels: A tiles in bank 0, D tiles
/// in bank 1, B tiles in bank 2; results land in accumulator rows from 0.
class WorkloadBuilder {
 public:
  explicit WorkloadBuilder(AcceleratorConfig cfg);

  const AcceleratorConfig& config() const { return cfg_; }

  MatrixHandle place(const IntMatrix& m, std::span<const Tag> row_tags, ElemWidth elem);
  MatrixHandle reserve(std::size_t rows, std::size_t cols, ElemWidth elem);
  /// Extra untraced words at the end of memory.
  std::uint64_t reserve_words(std::size_t n);

  void emit(const Command& c) { commands_.push_back(c); }
  void set_config(Dataflow df, Activation act, std::size_t k);
  void mvin(const MatrixHandle& m, std::size_t row0, std::size_t rows, std::size_t col0,
            std::size_t cols, std::uint32_t spad_row, std::uint32_t col_offset = 0);
  void mvout(const MatrixHandle& m, std::size_t row0, std::size_t rows, std::size_t col0,
             std::uint32_t acc_row);

  /// C = act(A * B + D), tiled over the mesh. D may be absent.
  void tiled_matmul(const MatrixHandle& a, const MatrixHandle& b,
                    const std::optional<MatrixHandle>& d, const MatrixHandle& c, Dataflow df,
                    bool relu);

  void expect(const MatrixHandle& where, IntMatrix values, std::vector<Tag> row_tags);

  std::uint32_t a_base() const { return 0; }
  std::uint32_t d_base() const { return static_cast<std::uint32_t>(cfg_.spad_depth); }
  std::uint32_t b_base() const { return static_cast<std::uint32_t>(2 * cfg_.spad_depth); }

  Workload finish(std::string name) &&;

 private:
  std::size_t pad(std::size_t n) const { return (n + cfg_.dim - 1) / cfg_.dim * cfg_.dim; }

  AcceleratorConfig cfg_;
  std::vector<TaggedWord> image_;
  std::vector<Command> commands_;
  std::vector<ExpectedMatrix> expected_;
  std::optional<ConfigArgs> last_config_;
};

/// Widest-compatible input element width for a mesh: 8-bit when a row fills
/// whole words, 32-bit otherwise.
ElemWidth input_elem_for(std::size_t dim);

/// Saturates every value to int8.
IntMatrix clip8(IntMatrix m);
IntMatrix relu(IntMatrix m);

}  // namespace tagmesh
