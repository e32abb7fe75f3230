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
#include <string>
#include <string_view>

#include "tagmesh/memory.hpp"
#include "tagmesh/mesh.hpp"
#include "tagmesh/tag.hpp"

namespace tagmesh {

enum class CommandKind : std::uint8_t { kConfig, kMvin, kMvout, kPreload, kCompute };

std::string_view to_string(CommandKind k);
std::optional<CommandKind> parse_command_kind(std::string_view s);

/// Accelerator instruction: an opcode plus two tagged 64-bit operands, as
/// delivered over the coprocessor command interface.
struct Command {
  CommandKind kind = CommandKind::kConfig;
  Tag inst_tag;
  TaggedWord rs1;
  TaggedWord rs2;

  friend bool operator==(const Command&, const Command&) = default;
};

/// Where a stationary or D operand comes from.
enum class RowSource : std::uint8_t { kZero = 0, kScratchpad = 1, kAccumulator = 2 };

// Decoded operand views. Field layouts:
//
//   CONFIG   rs1 = dataflow[1:0] | activation[3:2]
//            rs2 = K[15:0] | N[31:16] | M[47:32]
//   MVIN     rs1 = addr[31:0] | stride[63:32]            (stride 0: packed)
//            rs2 = row[15:0] | rows[31:16] | col_offset[43:32] | cols[55:44] | elem[57:56]
//   MVOUT    rs1 = addr[31:0] | stride[63:32]
//            rs2 = acc_row[15:0] | rows[31:16] | elem[57:56]
//   PRELOAD  rs1 = row[15:0] | source[17:16]
//   COMPUTE  rs1 = a_row[15:0] | d_row[31:16] | d_source[33:32]
//            rs2 = dest[15:0] | accumulate[16] | b_row[47:32]
//
// elem: 0 = 8-bit, 1 = 32-bit. cols 0 means the full mesh width.

struct ConfigArgs {
  Dataflow dataflow = Dataflow::kWeightStationary;
  Activation activation = Activation::kNone;
  std::uint32_t k = 0, n = 0, m = 0;
  friend bool operator==(const ConfigArgs&, const ConfigArgs&) = default;
};

struct MoveArgs {
  std::uint32_t addr = 0;
  std::uint32_t stride = 0;
  std::uint32_t row = 0;
  std::uint32_t rows = 1;
  std::uint32_t col_offset = 0;  // MVIN only
  std::uint32_t cols = 0;        // MVIN only
  ElemWidth elem = ElemWidth::k8;
  friend bool operator==(const MoveArgs&, const MoveArgs&) = default;
};

struct PreloadArgs {
  std::uint32_t row = 0;
  RowSource source = RowSource::kScratchpad;
  friend bool operator==(const PreloadArgs&, const PreloadArgs&) = default;
};

struct ComputeArgs {
  std::uint32_t a_row = 0;
  std::uint32_t d_row = 0;
  RowSource d_source = RowSource::kZero;
  std::uint32_t dest = 0;
  bool accumulate = false;
  std::uint32_t b_row = 0;  // output-stationary only
  friend bool operator==(const ComputeArgs&, const ComputeArgs&) = default;
};

Command encode(const ConfigArgs& a);
Command encode_mvin(const MoveArgs& a);
Command encode_mvout(const MoveArgs& a);
Command encode(const PreloadArgs& a);
Command encode(const ComputeArgs& a);

/// Decoders throw std::invalid_argument on reserved field values.
ConfigArgs decode_config(const Command& c);
MoveArgs decode_move(const Command& c);
PreloadArgs decode_preload(const Command& c);
ComputeArgs decode_compute(const Command& c);

}  // namespace tagmesh
