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

#include "tagmesh/command.hpp"

#include <array>
#include <stdexcept>

namespace tagmesh {

namespace {

constexpr std::uint64_t field(std::uint64_t word, unsigned lo, unsigned width) {
  return (word >> lo) & ((std::uint64_t{1} << width) - 1);
}

constexpr std::uint64_t put(std::uint64_t value, unsigned lo, unsigned width) {
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  if (value > mask) throw std::invalid_argument("command field overflows its encoding");
  return value << lo;
}

ElemWidth decode_elem(std::uint64_t code) {
  switch (code) {
    case 0: return ElemWidth::k8;
    case 1: return ElemWidth::k32;
    default: throw std::invalid_argument("reserved element width code");
  }
}

std::uint64_t elem_code(ElemWidth w) { return w == ElemWidth::k8 ? 0 : 1; }

RowSource decode_source(std::uint64_t code) {
  if (code > 2) throw std::invalid_argument("reserved row source");
  return static_cast<RowSource>(code);
}

Command make(CommandKind kind, std::uint64_t rs1, std::uint64_t rs2) {
  return Command{kind, kPublic, {rs1, kPublic}, {rs2, kPublic}};
}

std::uint64_t encode_move_rs1(const MoveArgs& a) {
  return put(a.addr, 0, 32) | put(a.stride, 32, 32);
}

constexpr std::array<std::string_view, 5> kNames = {"config", "mvin", "mvout", "preload",
                                                     "compute"};

}  // namespace

std::string_view to_string(CommandKind k) { return kNames[static_cast<std::size_t>(k)]; }

std::optional<CommandKind> parse_command_kind(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == s) return static_cast<CommandKind>(i);
  }
  return std::nullopt;
}

Command encode(const ConfigArgs& a) {
  return make(CommandKind::kConfig,
              put(static_cast<std::uint64_t>(a.dataflow), 0, 2) |
                  put(static_cast<std::uint64_t>(a.activation), 2, 2),
              put(a.k, 0, 16) | put(a.n, 16, 16) | put(a.m, 32, 16));
}

Command encode_mvin(const MoveArgs& a) {
  return make(CommandKind::kMvin, encode_move_rs1(a),
              put(a.row, 0, 16) | put(a.rows, 16, 16) | put(a.col_offset, 32, 12) |
                  put(a.cols, 44, 12) | put(elem_code(a.elem), 56, 2));
}

Command encode_mvout(const MoveArgs& a) {
  return make(CommandKind::kMvout, encode_move_rs1(a),
              put(a.row, 0, 16) | put(a.rows, 16, 16) | put(elem_code(a.elem), 56, 2));
}

Command encode(const PreloadArgs& a) {
  return make(CommandKind::kPreload,
              put(a.row, 0, 16) | put(static_cast<std::uint64_t>(a.source), 16, 2), 0);
}

Command encode(const ComputeArgs& a) {
  return make(CommandKind::kCompute,
              put(a.a_row, 0, 16) | put(a.d_row, 16, 16) |
                  put(static_cast<std::uint64_t>(a.d_source), 32, 2),
              put(a.dest, 0, 16) | put(a.accumulate ? 1 : 0, 16, 1) | put(a.b_row, 32, 16));
}

ConfigArgs decode_config(const Command& c) {
  ConfigArgs a;
  const auto df = field(c.rs1.data, 0, 2);
  const auto act = field(c.rs1.data, 2, 2);
  if (df > 1 || act > 1) throw std::invalid_argument("reserved dataflow or activation");
  a.dataflow = static_cast<Dataflow>(df);
  a.activation = static_cast<Activation>(act);
  a.k = static_cast<std::uint32_t>(field(c.rs2.data, 0, 16));
  a.n = static_cast<std::uint32_t>(field(c.rs2.data, 16, 16));
  a.m = static_cast<std::uint32_t>(field(c.rs2.data, 32, 16));
  return a;
}

MoveArgs decode_move(const Command& c) {
  MoveArgs a;
  a.addr = static_cast<std::uint32_t>(field(c.rs1.data, 0, 32));
  a.stride = static_cast<std::uint32_t>(field(c.rs1.data, 32, 32));
  a.row = static_cast<std::uint32_t>(field(c.rs2.data, 0, 16));
  a.rows = static_cast<std::uint32_t>(field(c.rs2.data, 16, 16));
  if (c.kind == CommandKind::kMvin) {
    a.col_offset = static_cast<std::uint32_t>(field(c.rs2.data, 32, 12));
    a.cols = static_cast<std::uint32_t>(field(c.rs2.data, 44, 12));
  }
  a.elem = decode_elem(field(c.rs2.data, 56, 2));
  return a;
}

PreloadArgs decode_preload(const Command& c) {
  return {static_cast<std::uint32_t>(field(c.rs1.data, 0, 16)),
          decode_source(field(c.rs1.data, 16, 2))};
}

ComputeArgs decode_compute(const Command& c) {
  ComputeArgs a;
  a.a_row = static_cast<std::uint32_t>(field(c.rs1.data, 0, 16));
  a.d_row = static_cast<std::uint32_t>(field(c.rs1.data, 16, 16));
  a.d_source = decode_source(field(c.rs1.data, 32, 2));
  a.dest = static_cast<std::uint32_t>(field(c.rs2.data, 0, 16));
  a.accumulate = field(c.rs2.data, 16, 1) != 0;
  a.b_row = static_cast<std::uint32_t>(field(c.rs2.data, 32, 16));
  return a;
}

}  // namespace tagmesh
