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
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tagmesh/command.hpp"
#include "tagmesh/memory.hpp"
#include "tagmesh/mesh.hpp"
#include "tagmesh/observation.hpp"
#include "tagmesh/scratchpad.hpp"

namespace tagmesh {

struct AcceleratorConfig {
  std::size_t dim = 4;  // square mesh, also the scratchpad row width
  std::size_t spad_banks = 4;
  std::size_t spad_depth = 128;  // rows per bank
  std::size_t acc_depth = 128;
  Dataflow dataflow = Dataflow::kWeightStationary;
  Activation activation = Activation::kNone;
  TagRules rules;

  void validate() const;
  friend bool operator==(const AcceleratorConfig&, const AcceleratorConfig&) = default;
};

/// Per-cycle view handed to trace writers.
struct CycleRecord {
  std::uint64_t cycle;
  std::size_t command_index;
  CommandKind command;
  const Mesh& mesh;
  std::optional<Tag> fed_tag;
  const std::optional<TaggedRow>& emitted;
};

using CycleObserver = std::function<void(const CycleRecord&)>;

/// Everything that makes up the accelerator's architectural state.
struct ControllerState {
  AcceleratorConfig config;
  TaggedMemory memory;
  std::vector<ScratchpadBank> banks;
  ScratchpadBank acc;
  Mesh mesh;
  ConfigArgs shape;
  std::deque<Command> queue;
  std::uint64_t cycle = 0;
  SimStats stats;

  friend bool operator==(const ControllerState&, const ControllerState&) = default;
};

/// In-order front end. Commands are checked on issue, then executed one at
/// a time; every cycle steps the scratchpad banks, then the mesh.
///
/// The schedule of every command is a function of its operand fields and
/// the configured shape only.
class Controller {
 public:
  Controller(AcceleratorConfig cfg, TaggedMemory mem);

  /// Rejects commands whose opcode or operands carry a nonzero tag. A
  /// rejected command leaves the state untouched.
  std::optional<Fault> issue(const Command& cmd);

  /// Executes queued commands until the queue is empty or a fault stops
  /// execution. The queue is cleared on fault.
  std::optional<Fault> run_pending();

  void set_observer(CycleObserver obs) { observer_ = std::move(obs); }

  const ControllerState& state() const { return s_; }
  const TaggedMemory& memory() const { return s_.memory; }
  std::uint64_t cycle() const { return s_.cycle; }
  SimStats stats() const;

 private:
  struct Halt {
    Fault fault;
  };

  void execute(const Command& cmd);
  void exec_config(const ConfigArgs& a);
  void exec_mvin(const MoveArgs& a);
  void exec_mvout(const MoveArgs& a);
  void exec_preload(const PreloadArgs& a);
  void exec_compute(const ComputeArgs& a);
  void compute_ws(const ComputeArgs& a);
  void compute_os(const ComputeArgs& a);

  struct RowRef {
    std::size_t bank;  // index into banks, or banks.size() for the accumulator
    std::size_t row;
  };
  RowRef spad_row(std::uint64_t global) const;
  RowRef acc_row(std::uint64_t row) const;
  ScratchpadBank& bank(std::size_t index);
  std::vector<TaggedRow> fetch(std::span<const RowRef> refs);

  void drain_acc_writes(std::size_t total, const ComputeArgs& a);
  void tick();
  [[noreturn]] void halt(FaultKind kind, std::string detail,
                         std::optional<MixingFault> tags = std::nullopt);

  ControllerState s_;
  CycleObserver observer_;
  std::vector<std::deque<TaggedRow>> inbox_;
  std::deque<TaggedRow> emitted_;
  std::size_t command_index_ = 0;
  CommandKind current_ = CommandKind::kConfig;
};

struct RunResult {
  SimObservation observation;
  SimStats stats;
  TaggedMemory memory;  // final contents, blinded words included
};

/// Issues and executes `commands` in order against `mem`.
RunResult run(const AcceleratorConfig& cfg, std::span<const Command> commands, TaggedMemory mem,
              CycleObserver observer = {});

}  // namespace tagmesh
