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

// Writes the bundled example workloads into a directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "tagmesh/workload_file.hpp"

namespace {

using namespace tagmesh;

IntMatrix from_rows(std::initializer_list<std::initializer_list<std::int32_t>> rows) {
  IntMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    for (auto v : r) m.values[i++] = v;
  }
  return m;
}

IntMatrix random_int8(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  IntMatrix m(rows, cols);
  for (auto& v : m.values) v = static_cast<std::int32_t>(rng() % 256) - 128;
  return m;
}

AcceleratorConfig small_config(std::size_t dim) {
  AcceleratorConfig cfg;
  cfg.dim = dim;
  cfg.spad_depth = 16;
  cfg.acc_depth = 16;
  return cfg;
}

// C = A*B + D on a 2x2 weight-stationary mesh with the given row tags.
Workload mm2x2(std::string name, std::vector<Tag> a_tags, std::vector<Tag> b_tags,
              std::vector<Tag> d_tags) {
  const IntMatrix a = from_rows({{1, 2}, {3, 4}});
  const IntMatrix b = from_rows({{5, 6}, {7, 8}});
  const IntMatrix d = from_rows({{1, 1}, {1, 1}});
  WorkloadBuilder wb(small_config(2));
  const auto ha = wb.place(a, a_tags, ElemWidth::k32);
  const auto hb = wb.place(b, b_tags, ElemWidth::k32);
  const auto hd = wb.place(d, d_tags, ElemWidth::k32);
  const auto hc = wb.reserve(2, 2, ElemWidth::k32);
  wb.tiled_matmul(ha, hb, hd, hc, Dataflow::kWeightStationary, false);
  const TagOracle tags = oracle_output_tags(a_tags, d_tags, b_tags);
  if (!tags.fault) wb.expect(hc, oracle_matmul(a, b, d), tags.row_tags);
  return std::move(wb).finish(std::move(name));
}

Workload tiled64(std::size_t dim, Dataflow df) {
  std::mt19937_64 rng(64 + dim);
  const IntMatrix a = random_int8(rng, 64, 64);
  const IntMatrix b = random_int8(rng, 64, 64);
  std::vector<Tag> a_tags(64, kPublic);
  for (std::size_t r = 0; r < 64; r += 2) a_tags[r] = Tag(7);
  const std::vector<Tag> b_tags(64, kPublic);
  AcceleratorConfig cfg;
  cfg.dim = dim;
  cfg.spad_depth = 64;
  cfg.acc_depth = 64;
  WorkloadBuilder wb(cfg);
  const auto ha = wb.place(a, a_tags, input_elem_for(dim));
  const auto hb = wb.place(b, b_tags, input_elem_for(dim));
  const auto hc = wb.reserve(64, 64, ElemWidth::k32);
  wb.tiled_matmul(ha, hb, std::nullopt, hc, df, false);
  wb.expect(hc, oracle_matmul(a, b, {}), oracle_output_tags(a_tags, {}, b_tags).row_tags);
  return std::move(wb).finish("tiled64-" + std::to_string(dim) + "x" + std::to_string(dim) +
                              (df == Dataflow::kWeightStationary ? "-ws" : "-os"));
}

// Two-layer perceptron: H = clip8(relu(X*W1 + B1)), Y = H*W2 + B2.
Workload perceptron() {
  std::mt19937_64 rng(2026);
  const std::size_t batch = 16, in = 32, hidden = 24, out = 10;
  const IntMatrix x = random_int8(rng, batch, in);
  const IntMatrix w1 = random_int8(rng, in, hidden);
  const IntMatrix w2 = random_int8(rng, hidden, out);
  IntMatrix b1(batch, hidden), b2(batch, out);
  const IntMatrix bias1 = random_int8(rng, 1, hidden), bias2 = random_int8(rng, 1, out);
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t c = 0; c < hidden; ++c) b1.at(r, c) = bias1.at(0, c);
    for (std::size_t c = 0; c < out; ++c) b2.at(r, c) = bias2.at(0, c);
  }
  // Rows of the batch belong to one client; the model is public.
  std::vector<Tag> x_tags(batch, kPublic);
  for (std::size_t r = 0; r < batch / 2; ++r) x_tags[r] = Tag(9);

  AcceleratorConfig cfg;
  cfg.dim = 8;
  cfg.spad_depth = 64;
  cfg.acc_depth = 64;
  WorkloadBuilder wb(cfg);
  const auto hx = wb.place(x, x_tags, ElemWidth::k8);
  const auto hw1 = wb.place(w1, std::vector<Tag>(in, kPublic), ElemWidth::k8);
  const auto hw2 = wb.place(w2, std::vector<Tag>(hidden, kPublic), ElemWidth::k8);
  const auto hb1 = wb.place(b1, std::vector<Tag>(batch, kPublic), ElemWidth::k8);
  const auto hb2 = wb.place(b2, std::vector<Tag>(batch, kPublic), ElemWidth::k8);
  const auto hh = wb.reserve(batch, hidden, ElemWidth::k8);
  const auto hy = wb.reserve(batch, out, ElemWidth::k32);
  wb.tiled_matmul(hx, hw1, hb1, hh, Dataflow::kWeightStationary, true);
  wb.tiled_matmul(hh, hw2, hb2, hy, Dataflow::kWeightStationary, false);

  const IntMatrix h = clip8(relu(oracle_matmul(x, w1, b1)));
  const std::vector<Tag> none(batch, kPublic);
  const auto h_tags = oracle_output_tags(x_tags, none, std::vector<Tag>(in, kPublic)).row_tags;
  wb.expect(hh, h, h_tags);
  wb.expect(hy, oracle_matmul(h, w2, b2),
            oracle_output_tags(h_tags, none, std::vector<Tag>(hidden, kPublic)).row_tags);
  return std::move(wb).finish("perceptron");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_workloads <dir>\n";
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);

  const Tag p = kPublic;
  std::vector<std::pair<std::string, WorkloadFile>> out;
  auto add = [&](const std::string& file, const Workload& w) { out.emplace_back(file, to_file(w)); };

  add("mm2x2_untagged.json", mm2x2("mm2x2-untagged", {p, p}, {p, p}, {p, p}));
  add("mm2x2_a_blinded.json", mm2x2("mm2x2-a-blinded", {p, Tag(5)}, {p, p}, {p, p}));
  add("mm2x2_d_blinded.json", mm2x2("mm2x2-d-blinded", {p, p}, {p, p}, {Tag(5), p}));
  add("mm2x2_b_blinded.json", mm2x2("mm2x2-b-blinded", {p, p}, {p, Tag(5)}, {p, p}));
  add("mismatched_b_tags.json", mm2x2("mismatched-b-tags", {p, p}, {Tag(4), Tag(6)}, {p, p}));
  {
    Workload w = mm2x2("tagged-operand", {p, p}, {p, p}, {p, p});
    w.expected.clear();
    for (auto& c : w.commands) {
      if (c.kind == CommandKind::kCompute) c.rs1.tag = Tag(1);
    }
    add("tagged_operand.json", w);
  }
  add("tiled64_8x8.json", tiled64(8, Dataflow::kWeightStationary));
  add("tiled64_16x16.json", tiled64(16, Dataflow::kWeightStationary));
  add("tiled64_32x32.json", tiled64(32, Dataflow::kWeightStationary));
  add("tiled64_8x8_os.json", tiled64(8, Dataflow::kOutputStationary));
  add("perceptron.json", perceptron());

  int status = 0;
  for (const auto& [file, w] : out) {
    // Round-trip and self-check before writing.
    const WorkloadFile back = parse_workload(dump_workload(w));
    const RunResult r = run(back.config, back.commands, back.initial_memory());
    const auto bad = compare_expected(back, r.memory);
    if (!r.observation.fault && !bad.empty()) {
      std::cerr << file << ": " << bad.size() << " mismatches, first: " << bad.front() << '\n';
      status = 1;
    }
    std::ofstream(dir / file, std::ios::binary) << dump_workload(w);
  }
  return status;
}
