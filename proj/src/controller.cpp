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

#include "tagmesh/controller.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tagmesh {

namespace {

std::int32_t clip8(std::int32_t v) { return std::clamp<std::int32_t>(v, -128, 127); }

}  // namespace

void AcceleratorConfig::validate() const {
  if (dim == 0 || spad_banks == 0 || spad_depth == 0 || acc_depth == 0) {
    throw std::invalid_argument("accelerator dimensions must be positive");
  }
  if (dim > 0xfff || spad_banks * spad_depth > 0xffff || acc_depth > 0xffff) {
    throw std::invalid_argument("accelerator dimensions exceed the command encoding");
  }
}

Controller::Controller(AcceleratorConfig cfg, TaggedMemory mem)
    : s_{cfg,
         std::move(mem),
         {},
         ScratchpadBank({cfg.dim, cfg.acc_depth, ElemWidth::k32, true}, cfg.rules),
         Mesh({cfg.dim, cfg.dim, cfg.dataflow, cfg.activation}, cfg.rules),
         ConfigArgs{cfg.dataflow, cfg.activation, static_cast<std::uint32_t>(cfg.dim),
                    static_cast<std::uint32_t>(cfg.dim), static_cast<std::uint32_t>(cfg.dim)},
         {},
         0,
         {}} {
  cfg.validate();
  for (std::size_t b = 0; b < cfg.spad_banks; ++b) {
    s_.banks.emplace_back(BankConfig{cfg.dim, cfg.spad_depth, ElemWidth::k8, false}, cfg.rules);
  }
  inbox_.resize(cfg.spad_banks + 1);
}

SimStats Controller::stats() const {
  SimStats st = s_.stats;
  st.total_cycles = s_.cycle;
  st.tag_registers_used = s_.mesh.tag_registers();
  st.per_pe_equivalent_registers = s_.mesh.per_pe_tag_registers();
  return st;
}

std::optional<Fault> Controller::issue(const Command& cmd) {
  auto reject = [&](const char* what) {
    return Fault{FaultKind::kCommand, s_.cycle,
                 std::string(to_string(cmd.kind)) + ": " + what + " is blinded", std::nullopt};
  };
  if (cmd.inst_tag.is_blinded()) return reject("instruction");
  if (cmd.rs1.tag.is_blinded()) return reject("rs1");
  if (cmd.rs2.tag.is_blinded()) return reject("rs2");
  s_.queue.push_back(cmd);
  return std::nullopt;
}

std::optional<Fault> Controller::run_pending() {
  while (!s_.queue.empty()) {
    const Command cmd = s_.queue.front();
    s_.queue.pop_front();
    try {
      execute(cmd);
    } catch (const Halt& h) {
      s_.queue.clear();
      return h.fault;
    } catch (const RowOutOfRange& e) {
      s_.queue.clear();
      return Fault{FaultKind::kOutOfRange, s_.cycle, e.what(), std::nullopt};
    } catch (const OutOfRange& e) {
      s_.queue.clear();
      return Fault{FaultKind::kOutOfRange, s_.cycle, e.what(), std::nullopt};
    } catch (const std::invalid_argument& e) {
      s_.queue.clear();
      return Fault{FaultKind::kInvalidCommand, s_.cycle, e.what(), std::nullopt};
    }
    ++command_index_;
  }
  return std::nullopt;
}

void Controller::halt(FaultKind kind, std::string detail, std::optional<MixingFault> tags) {
  throw Halt{Fault{kind, s_.cycle, std::string(to_string(current_)) + ": " + detail, tags}};
}

void Controller::execute(const Command& cmd) {
  current_ = cmd.kind;
  tick();  // dispatch
  switch (cmd.kind) {
    case CommandKind::kConfig: exec_config(decode_config(cmd)); break;
    case CommandKind::kMvin: exec_mvin(decode_move(cmd)); break;
    case CommandKind::kMvout: exec_mvout(decode_move(cmd)); break;
    case CommandKind::kPreload: exec_preload(decode_preload(cmd)); break;
    case CommandKind::kCompute: exec_compute(decode_compute(cmd)); break;
  }
}

Controller::RowRef Controller::spad_row(std::uint64_t global) const {
  const std::size_t depth = s_.config.spad_depth;
  if (global >= depth * s_.banks.size()) throw RowOutOfRange(global, depth * s_.banks.size());
  return {static_cast<std::size_t>(global / depth), static_cast<std::size_t>(global % depth)};
}

Controller::RowRef Controller::acc_row(std::uint64_t row) const {
  if (row >= s_.config.acc_depth) throw RowOutOfRange(row, s_.config.acc_depth);
  return {s_.banks.size(), static_cast<std::size_t>(row)};
}

ScratchpadBank& Controller::bank(std::size_t index) {
  return index == s_.banks.size() ? s_.acc : s_.banks[index];
}

void Controller::tick() {
  for (std::size_t b = 0; b <= s_.banks.size(); ++b) {
    SpadResponse resp = bank(b).step();
    if (resp.kind == SpadResponse::Kind::kFault) {
      halt(FaultKind::kMixing, "scratchpad write: " + resp.fault->describe(), resp.fault);
    }
    if (resp.kind == SpadResponse::Kind::kReadData) inbox_[b].push_back(std::move(resp.data));
  }

  const std::optional<Tag> fed = s_.mesh.pending_tag();
  std::optional<TaggedRow> out = s_.mesh.step();
  if (observer_) observer_(CycleRecord{s_.cycle, command_index_, current_, s_.mesh, fed, out});
  if (out) emitted_.push_back(std::move(*out));
  ++s_.cycle;
}

std::vector<TaggedRow> Controller::fetch(std::span<const RowRef> refs) {
  const std::size_t nbanks = s_.banks.size() + 1;
  std::vector<std::deque<std::size_t>> todo(nbanks);
  std::vector<std::deque<std::size_t>> in_flight(nbanks);
  for (std::size_t i = 0; i < refs.size(); ++i) todo[refs[i].bank].push_back(i);

  std::vector<TaggedRow> out(refs.size());
  std::size_t received = 0;
  while (received < refs.size()) {
    for (std::size_t b = 0; b < nbanks; ++b) {
      if (todo[b].empty()) continue;
      const std::size_t i = todo[b].front();
      if (bank(b).request(SpadRequest::read(refs[i].row))) {
        todo[b].pop_front();
        in_flight[b].push_back(i);
      }
    }
    tick();
    for (std::size_t b = 0; b < nbanks; ++b) {
      while (!inbox_[b].empty()) {
        out[in_flight[b].front()] = std::move(inbox_[b].front());
        in_flight[b].pop_front();
        inbox_[b].pop_front();
        ++received;
      }
    }
  }
  return out;
}

void Controller::exec_config(const ConfigArgs& a) {
  const std::size_t dim = s_.config.dim;
  if (a.n != dim || a.m != dim) throw std::invalid_argument("N and M must equal the mesh size");
  if (a.k == 0 || a.k > s_.config.spad_depth || a.k > s_.config.acc_depth) {
    throw std::invalid_argument("K outside the scratchpad depth");
  }
  if (a.dataflow == Dataflow::kOutputStationary && a.k != dim) {
    throw std::invalid_argument("output-stationary tiles need K equal to the mesh size");
  }
  if (s_.mesh.busy()) throw std::logic_error("CONFIG while the mesh is busy");
  if (a.dataflow != s_.mesh.config().dataflow) {
    s_.mesh = Mesh({dim, dim, a.dataflow, a.activation}, s_.config.rules);
  }
  s_.mesh.set_activation(a.activation);
  s_.shape = a;
}

void Controller::exec_mvin(const MoveArgs& a) {
  const std::size_t dim = s_.config.dim;
  const std::size_t cols = a.cols == 0 ? dim : a.cols;
  if (a.rows == 0) throw std::invalid_argument("MVIN of zero rows");
  if (a.col_offset + cols > dim) throw std::invalid_argument("MVIN columns exceed the row width");
  const std::uint64_t span = row_span_words(cols, a.elem);
  const std::uint64_t stride = a.stride == 0 ? span : a.stride;
  spad_row(std::uint64_t{a.row} + a.rows - 1);
  const std::uint64_t last = a.addr + (a.rows - 1) * stride;
  if (last + span > s_.memory.size()) throw OutOfRange(last, span, s_.memory.size());

  const bool full = a.col_offset == 0 && cols == dim;
  std::vector<bool> mask;
  if (!full) {
    mask.assign(dim, false);
    std::fill_n(mask.begin() + a.col_offset, cols, true);
  }

  for (std::uint32_t j = 0; j < a.rows; ++j) {
    RowLoad load = dma_load_row(s_.memory, a.addr + j * stride, cols, a.elem, s_.cycle,
                                s_.config.rules);
    if (load.fault) halt(FaultKind::kMixing, "DMA row: " + load.fault->describe(), load.fault);
    for (std::uint64_t w = 1; w < span; ++w) tick();

    std::vector<std::int32_t> data(dim, 0);
    std::copy(load.row.elems.begin(), load.row.elems.end(), data.begin() + a.col_offset);
    const RowRef dst = spad_row(std::uint64_t{a.row} + j);
    bank(dst.bank).request(SpadRequest::write(dst.row, std::move(data), load.row.tag, mask));
    tick();
  }
  tick();  // last write leaves stage 2
  ++s_.stats.mvin_count;
}

void Controller::exec_mvout(const MoveArgs& a) {
  const std::size_t dim = s_.config.dim;
  if (a.rows == 0) throw std::invalid_argument("MVOUT of zero rows");
  const std::uint64_t span = row_span_words(dim, a.elem);
  const std::uint64_t stride = a.stride == 0 ? span : a.stride;
  acc_row(std::uint64_t{a.row} + a.rows - 1);
  const std::uint64_t last = a.addr + (a.rows - 1) * stride;
  if (last + span > s_.memory.size()) throw OutOfRange(last, span, s_.memory.size());

  std::vector<RowRef> refs;
  for (std::uint32_t j = 0; j < a.rows; ++j) refs.push_back(acc_row(a.row + j));
  std::vector<TaggedRow> rows = fetch(refs);

  for (std::uint32_t j = 0; j < a.rows; ++j) {
    TaggedRow& row = rows[j];
    if (a.elem == ElemWidth::k8) {
      for (auto& v : row.elems) v = clip8(v);
    }
    dma_store_row(s_.memory, a.addr + j * stride, row, a.elem, s_.cycle);
    for (std::uint64_t w = 0; w < span; ++w) tick();
  }
  ++s_.stats.mvout_count;
}

void Controller::exec_preload(const PreloadArgs& a) {
  const std::size_t dim = s_.config.dim;
  Matrix m;
  m.cols = dim;
  if (a.source == RowSource::kZero) {
    m.rows.assign(dim, TaggedRow::zeros(dim));
  } else {
    std::vector<RowRef> refs;
    for (std::size_t i = 0; i < dim; ++i) {
      refs.push_back(a.source == RowSource::kScratchpad ? spad_row(a.row + i) : acc_row(a.row + i));
    }
    m.rows = fetch(refs);
  }
  if (auto f = s_.mesh.preload(m)) halt(FaultKind::kMixing, "stationary rows: " + f->describe(), f);
  tick();
}

void Controller::exec_compute(const ComputeArgs& a) {
  if (!s_.mesh.preloaded()) throw std::invalid_argument("COMPUTE without a preloaded operand");
  if (a.dest + s_.shape.k > s_.config.acc_depth) {
    throw RowOutOfRange(a.dest + s_.shape.k - 1, s_.config.acc_depth);
  }
  if (s_.mesh.config().dataflow == Dataflow::kWeightStationary) {
    compute_ws(a);
  } else {
    compute_os(a);
  }
  s_.stats.compute_rows += s_.shape.k;
}

void Controller::drain_acc_writes(std::size_t total, const ComputeArgs& a) {
  // Called with feeding finished; writes out whatever the mesh still emits.
  std::size_t written = 0;
  while (written < total) {
    if (emitted_.empty() && !s_.mesh.busy()) throw std::logic_error("mesh drained short of K rows");
    if (!emitted_.empty()) {
      TaggedRow row = std::move(emitted_.front());
      emitted_.pop_front();
      const std::size_t dst = a.dest + written;
      s_.acc.request(a.accumulate ? SpadRequest::accumulate_into(dst, std::move(row.elems), row.tag)
                                  : SpadRequest::write(dst, std::move(row.elems), row.tag));
      ++written;
    }
    tick();
  }
  tick();  // last write leaves stage 2
}

void Controller::compute_ws(const ComputeArgs& a) {
  const std::size_t dim = s_.config.dim;
  const std::size_t k = s_.shape.k;

  std::vector<RowRef> refs;
  for (std::size_t i = 0; i < k; ++i) refs.push_back(spad_row(a.a_row + i));
  for (std::size_t i = 0; i < k && a.d_source != RowSource::kZero; ++i) {
    refs.push_back(a.d_source == RowSource::kScratchpad ? spad_row(a.d_row + i)
                                                        : acc_row(a.d_row + i));
  }
  std::vector<TaggedRow> rows = fetch(refs);
  const TaggedRow zero = TaggedRow::zeros(dim);

  // Feed one row per cycle; emitted rows are written back as they appear.
  std::size_t written = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const TaggedRow& d = a.d_source == RowSource::kZero ? zero : rows[k + i];
    if (auto f = s_.mesh.feed_row(rows[i], d)) {
      halt(FaultKind::kMixing, "row " + std::to_string(i) + ": " + f->describe(), f);
    }
    if (!emitted_.empty()) {
      TaggedRow row = std::move(emitted_.front());
      emitted_.pop_front();
      const std::size_t dst = a.dest + written;
      s_.acc.request(a.accumulate ? SpadRequest::accumulate_into(dst, std::move(row.elems), row.tag)
                                  : SpadRequest::write(dst, std::move(row.elems), row.tag));
      ++written;
    }
    tick();
  }
  ComputeArgs rest = a;
  rest.dest = a.dest + static_cast<std::uint32_t>(written);
  drain_acc_writes(k - written, rest);
}

void Controller::compute_os(const ComputeArgs& a) {
  const std::size_t dim = s_.config.dim;
  std::vector<RowRef> refs;
  for (std::size_t i = 0; i < dim; ++i) refs.push_back(spad_row(a.a_row + i));
  for (std::size_t i = 0; i < dim; ++i) refs.push_back(spad_row(a.b_row + i));
  std::vector<TaggedRow> rows = fetch(refs);

  for (std::size_t i = 0; i < dim; ++i) {
    if (auto f = s_.mesh.feed_row(rows[i], rows[dim + i])) {
      halt(FaultKind::kMixing, "row " + std::to_string(i) + ": " + f->describe(), f);
    }
    tick();
  }
  drain_acc_writes(dim, a);
}

RunResult run(const AcceleratorConfig& cfg, std::span<const Command> commands, TaggedMemory mem,
              CycleObserver observer) {
  Controller ctl(cfg, std::move(mem));
  if (observer) ctl.set_observer(std::move(observer));

  std::optional<Fault> fault;
  for (const Command& cmd : commands) {
    fault = ctl.issue(cmd);
    if (!fault) fault = ctl.run_pending();
    if (fault) break;
  }
  const SimStats stats = ctl.stats();
  return {SimObservation::project(ctl.memory(), ctl.cycle(), fault), stats, ctl.memory()};
}

}  // namespace tagmesh
