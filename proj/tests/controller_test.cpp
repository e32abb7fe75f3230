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

#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tagmesh/controller.hpp"
#include "tagmesh/workload.hpp"

using namespace tagmesh;
using namespace tagmesh::testing;

namespace {

Tag t(unsigned v) { return Tag(static_cast<std::uint8_t>(v)); }

AcceleratorConfig two_by_two() {
  AcceleratorConfig cfg;
  cfg.dim = 2;
  cfg.spad_depth = 16;
  cfg.acc_depth = 16;
  return cfg;
}

struct Mm2x2 {
  Workload w;
  MatrixHandle c;
};

// MVIN A, B, D; PRELOAD B; COMPUTE; MVOUT C on a 2x2 mesh.
Mm2x2 mm2x2(std::vector<Tag> a_tags, std::vector<Tag> b_tags, std::vector<Tag> d_tags,
          Dataflow df = Dataflow::kWeightStationary) {
  WorkloadBuilder wb(two_by_two());
  const auto ha = wb.place(IntMatrix(2, 2, {1, 2, 3, 4}), a_tags, ElemWidth::k32);
  const auto hb = wb.place(IntMatrix(2, 2, {5, 6, 7, 8}), b_tags, ElemWidth::k32);
  const auto hd = wb.place(IntMatrix(2, 2, {1, 1, 1, 1}), d_tags, ElemWidth::k32);
  const auto hc = wb.reserve(2, 2, ElemWidth::k32);
  wb.tiled_matmul(ha, hb, hd, hc, df, false);
  return {std::move(wb).finish("mm2x2"), hc};
}

const std::vector<Tag> kZero2{kPublic, kPublic};

}  // namespace

TEST_CASE("worked example produces C") {
  for (auto df : {Dataflow::kWeightStationary, Dataflow::kOutputStationary}) {
    const auto f = mm2x2(kZero2, kZero2, kZero2, df);
    const auto r = run(f.w.config, f.w.commands, f.w.memory);
    REQUIRE_FALSE(r.observation.fault);
    CHECK(read_matrix(r.memory, f.c) == IntMatrix(2, 2, {20, 23, 44, 51}));
    CHECK(read_row_tags(r.memory, f.c) == kZero2);
  }
}

TEST_CASE("tagged A gives tagged C with the same values") {
  const auto plain = mm2x2(kZero2, kZero2, kZero2);
  const auto tagged = mm2x2({t(5), t(5)}, kZero2, kZero2);
  const auto rp = run(plain.w.config, plain.w.commands, plain.w.memory);
  const auto rt = run(tagged.w.config, tagged.w.commands, tagged.w.memory);
  REQUIRE_FALSE(rt.observation.fault);
  CHECK(read_matrix(rt.memory, tagged.c) == read_matrix(rp.memory, plain.c));
  for (std::uint64_t w = 0; w < 2 * tagged.c.stride; ++w) {
    CHECK(rt.memory.at(tagged.c.addr + w).tag == t(5));
  }
  CHECK(rt.observation.total_cycles == rp.observation.total_cycles);
  CHECK(rt.observation.access_trace == rp.observation.access_trace);
}

TEST_CASE("mismatched B tags fault at PRELOAD before any MVOUT") {
  const auto f = mm2x2(kZero2, {t(4), t(6)}, kZero2);
  const auto r = run(f.w.config, f.w.commands, f.w.memory);
  REQUIRE(r.observation.fault);
  CHECK(r.observation.fault->kind == FaultKind::kMixing);
  CHECK(*r.observation.fault->tags == MixingFault{t(4), t(6)});
  for (const auto& e : r.observation.access_trace.entries()) CHECK(e.kind == AccessKind::kRead);
  CHECK(r.memory.words() == f.w.memory.words());
}

TEST_CASE("issue rejects blinded commands") {
  Controller c(two_by_two(), TaggedMemory(8));
  CHECK_FALSE(c.issue(encode(ConfigArgs{Dataflow::kWeightStationary, Activation::kNone, 2, 2, 2})));

  const ControllerState before = c.state();
  Command compute = encode(ComputeArgs{});
  compute.rs1.tag = t(1);
  const auto f1 = c.issue(compute);
  REQUIRE(f1);
  CHECK(f1->kind == FaultKind::kCommand);
  CHECK(f1->detail == "compute: rs1 is blinded");
  CHECK(c.state() == before);

  Command mvin = encode_mvin(MoveArgs{});
  mvin.inst_tag = t(7);
  const auto f2 = c.issue(mvin);
  REQUIRE(f2);
  CHECK(f2->detail == "mvin: instruction is blinded");
  CHECK(c.state() == before);
  CHECK(c.memory().trace().size() == 0);
}

TEST_CASE("a blinded command stops the run with no memory traffic from it") {
  auto f = mm2x2(kZero2, kZero2, kZero2);
  auto cmds = f.w.commands;
  std::size_t at = 0;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    if (cmds[i].kind == CommandKind::kMvout) at = i;
  }
  cmds[at].rs2.tag = t(3);
  const auto r = run(f.w.config, cmds, f.w.memory);
  REQUIRE(r.observation.fault);
  CHECK(r.observation.fault->kind == FaultKind::kCommand);
  const std::vector<Command> prefix(cmds.begin(), cmds.begin() + static_cast<std::ptrdiff_t>(at));
  const auto p = run(f.w.config, prefix, f.w.memory);
  CHECK(r.observation.access_trace == p.observation.access_trace);
  CHECK(r.memory.words() == p.memory.words());
}

TEST_CASE("runs are deterministic") {
  const auto f = mm2x2({t(2), kPublic}, kZero2, {kPublic, t(2)});
  const auto a = run(f.w.config, f.w.commands, f.w.memory);
  const auto b = run(f.w.config, f.w.commands, f.w.memory);
  CHECK(a.observation == b.observation);
  CHECK(a.stats == b.stats);
  CHECK(a.memory == b.memory);
}

TEST_CASE("cycles and trace depend only on the schedule") {
  std::mt19937_64 rng(8);
  for (auto df : {Dataflow::kWeightStationary, Dataflow::kOutputStationary}) {
    AcceleratorConfig cfg;
    cfg.dim = 4;
    cfg.spad_depth = 32;
    cfg.acc_depth = 32;
    std::optional<SimObservation> first;
    std::optional<SimStats> first_stats;
    for (int v = 0; v < 30; ++v) {
      WorkloadBuilder wb(cfg);
      std::vector<Tag> a_tags(10);
      for (auto& x : a_tags) x = rng() % 2 ? t(3) : kPublic;
      const auto ha = wb.place(random_matrix(rng, 10, 6), a_tags, ElemWidth::k32);
      const auto hb = wb.place(random_matrix(rng, 6, 7), std::vector<Tag>(6, kPublic), ElemWidth::k32);
      const auto hc = wb.reserve(10, 7, ElemWidth::k32);
      wb.tiled_matmul(ha, hb, std::nullopt, hc, df, df == Dataflow::kWeightStationary);
      const auto w = std::move(wb).finish("x");
      const auto r = run(w.config, w.commands, w.memory);
      REQUIRE_FALSE(r.observation.fault);
      if (!first) {
        first = r.observation;
        first_stats = r.stats;
      }
      CHECK(r.observation.total_cycles == first->total_cycles);
      CHECK(r.observation.access_trace == first->access_trace);
      CHECK(r.stats == *first_stats);
    }
  }
}

TEST_CASE("tiled results match the oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    AcceleratorConfig cfg;
    cfg.dim = trial % 2 ? 4 : 8;
    cfg.spad_depth = 16;
    cfg.acc_depth = 16;
    const auto df = trial % 3 ? Dataflow::kWeightStationary : Dataflow::kOutputStationary;
    const std::size_t k = 1 + rng() % 40, n = 1 + rng() % 20, m = 1 + rng() % 20;
    const auto a = random_matrix(rng, k, n);
    const auto b = random_matrix(rng, n, m);
    const auto d = random_matrix(rng, k, m);
    WorkloadBuilder wb(cfg);
    const auto elem = input_elem_for(cfg.dim);
    const auto ha = wb.place(a, std::vector<Tag>(k, kPublic), elem);
    const auto hb = wb.place(b, std::vector<Tag>(n, kPublic), elem);
    const auto hd = wb.place(d, std::vector<Tag>(k, kPublic), elem);
    const auto hc = wb.reserve(k, m, ElemWidth::k32);
    const bool use_relu = trial % 4 == 0;
    wb.tiled_matmul(ha, hb, hd, hc, df, use_relu);
    const auto w = std::move(wb).finish("tiled");
    const auto r = run(w.config, w.commands, w.memory);
    REQUIRE_FALSE(r.observation.fault);
    auto want = oracle_matmul(a, b, d);
    if (use_relu) want = relu(std::move(want));
    CHECK(read_matrix(r.memory, hc) == want);
  }
}

TEST_CASE("bad operands become faults, not crashes") {
  Controller c(two_by_two(), TaggedMemory(4));
  MoveArgs m;
  m.addr = 3;
  m.rows = 2;
  m.elem = ElemWidth::k32;
  c.issue(encode_mvin(m));
  auto f = c.run_pending();
  REQUIRE(f);
  CHECK(f->kind == FaultKind::kOutOfRange);

  Controller c2(two_by_two(), TaggedMemory(4));
  Command bad = encode(ConfigArgs{});
  bad.rs1.data = 3;
  c2.issue(bad);
  f = c2.run_pending();
  REQUIRE(f);
  CHECK(f->kind == FaultKind::kInvalidCommand);
  CHECK_FALSE(f->is_security_fault());

  Controller c3(two_by_two(), TaggedMemory(4));
  c3.issue(encode(ComputeArgs{}));
  f = c3.run_pending();
  REQUIRE(f);
  CHECK(f->kind == FaultKind::kInvalidCommand);
}

TEST_CASE("partial MVIN mixing faults in the scratchpad") {
  AcceleratorConfig cfg = two_by_two();
  cfg.dim = 4;
  TaggedMemory mem(8);
  mem.poke(0, {1, t(1)});
  mem.poke(1, {2, t(2)});
  Controller c(cfg, mem);
  MoveArgs left;
  left.addr = 0;
  left.cols = 2;
  left.elem = ElemWidth::k32;
  MoveArgs right = left;
  right.addr = 1;
  right.col_offset = 2;
  c.issue(encode_mvin(left));
  c.issue(encode_mvin(right));
  const auto f = c.run_pending();
  REQUIRE(f);
  CHECK(f->kind == FaultKind::kMixing);
  CHECK(*f->tags == MixingFault{t(1), t(2)});
}

TEST_CASE("register instrumentation") {
  for (std::size_t n : {2u, 8u, 32u}) {
    AcceleratorConfig cfg;
    cfg.dim = n;
    Controller c(cfg, TaggedMemory(1));
    CHECK(c.stats().tag_registers_used == 2 * n);
    CHECK(c.stats().per_pe_equivalent_registers == n * n);
  }
}
