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

#include "tagmesh/fuzz.hpp"

#include <omp.h>

#include <array>
#include <sstream>
#include <stdexcept>

#include "tagmesh/noninterference.hpp"

namespace tagmesh {

namespace {

constexpr std::array<std::pair<std::string_view, FuzzTemplate>, 7> kTemplates = {{
    {"matmul", FuzzTemplate::kMatmul},
    {"matmul2", FuzzTemplate::kMatmul2},
    {"matmul4", FuzzTemplate::kMatmul4},
    {"matmul8", FuzzTemplate::kMatmul8},
    {"partial-write", FuzzTemplate::kPartialWrite},
    {"fault", FuzzTemplate::kFault},
    {"perceptron", FuzzTemplate::kPerceptron},
}};

// Uniform in [lo, hi]. Plain modulo keeps results identical across
// standard libraries; the bias is irrelevant here.
std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

bool coin(std::mt19937_64& rng, unsigned percent) { return rng() % 100 < percent; }

Tag draw_client_tag(std::mt19937_64& rng) { return Tag(static_cast<std::uint8_t>(draw(rng, 1, 255))); }

Tag draw_other_tag(std::mt19937_64& rng, Tag not_this) {
  Tag t = draw_client_tag(rng);
  while (t == not_this) t = draw_client_tag(rng);
  return t;
}

IntMatrix random_int8(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  IntMatrix m(rows, cols);
  for (auto& v : m.values) v = static_cast<std::int32_t>(draw(rng, 0, 255)) - 128;
  return m;
}

std::vector<Tag> random_tags(std::mt19937_64& rng, std::size_t n, std::span<const Tag> choices) {
  std::vector<Tag> tags(n);
  for (auto& t : tags) t = choices[draw(rng, 0, choices.size() - 1)];
  return tags;
}

AcceleratorConfig config_for(std::size_t dim, const TagRules& rules) {
  AcceleratorConfig cfg;
  cfg.dim = dim;
  cfg.spad_banks = 4;
  cfg.spad_depth = 64;
  cfg.acc_depth = 64;
  cfg.rules = rules;
  return cfg;
}

Dataflow draw_dataflow(std::mt19937_64& rng) {
  return coin(rng, 50) ? Dataflow::kWeightStationary : Dataflow::kOutputStationary;
}

// One tiled C = act(A*B + D) whose row tags come from `choices`.
Workload matmul_workload(std::mt19937_64& rng, std::size_t dim, std::span<const Tag> choices,
                         bool blind_b, const TagRules& rules, std::string name) {
  const std::size_t k = draw(rng, 1, 2 * dim + 1);
  const std::size_t n = draw(rng, 1, 2 * dim);
  const std::size_t m = draw(rng, 1, 2 * dim);
  const bool has_d = coin(rng, 50);
  const bool relu_out = coin(rng, 50);
  const Dataflow df = draw_dataflow(rng);

  const IntMatrix a = random_int8(rng, k, n);
  const IntMatrix b = random_int8(rng, n, m);
  const IntMatrix d = has_d ? random_int8(rng, k, m) : IntMatrix{};
  const Tag public_only[] = {kPublic};
  const auto a_tags = random_tags(rng, k, choices);
  const auto b_tags = random_tags(rng, n, blind_b ? choices : std::span<const Tag>(public_only));
  const auto d_tags = has_d ? random_tags(rng, k, choices) : std::vector<Tag>{};

  WorkloadBuilder wb(config_for(dim, rules));
  const ElemWidth in = input_elem_for(dim);
  const auto ha = wb.place(a, a_tags, in);
  const auto hb = wb.place(b, b_tags, in);
  std::optional<MatrixHandle> hd;
  if (has_d) hd = wb.place(d, d_tags, in);
  const auto hc = wb.reserve(k, m, ElemWidth::k32);
  wb.tiled_matmul(ha, hb, hd, hc, df, relu_out);

  const TagOracle tags = oracle_output_tags(a_tags, d_tags, b_tags);
  if (!tags.fault) {
    IntMatrix c = oracle_matmul(a, b, d);
    wb.expect(hc, relu_out ? relu(std::move(c)) : std::move(c), tags.row_tags);
  }
  return std::move(wb).finish(std::move(name));
}

Workload partial_write_workload(std::mt19937_64& rng, const TagRules& rules) {
  const std::size_t dim = coin(rng, 50) ? 4 : 8;
  const std::size_t half = dim / 2;
  const std::size_t k = draw(rng, 1, 2 * dim);
  const Tag t = draw_client_tag(rng);
  const Tag t2 = draw_other_tag(rng, t);
  const bool stray = coin(rng, 25);

  const IntMatrix left = random_int8(rng, k, half);
  const IntMatrix right = random_int8(rng, k, half);
  const IntMatrix b = random_int8(rng, dim, dim);
  const Tag pair[] = {kPublic, t};
  auto left_tags = random_tags(rng, k, pair);
  auto right_tags = random_tags(rng, k, pair);
  if (stray) right_tags[draw(rng, 0, k - 1)] = t2;
  const Tag b_choice[] = {kPublic, kPublic, kPublic, t};
  const auto b_tags = random_tags(rng, dim, b_choice);

  WorkloadBuilder wb(config_for(dim, rules));
  const auto hl = wb.place(left, left_tags, ElemWidth::k32);
  const auto hr = wb.place(right, right_tags, ElemWidth::k32);
  const auto hb = wb.place(b, b_tags, ElemWidth::k32);
  const auto hc = wb.reserve(k, dim, ElemWidth::k32);

  wb.set_config(Dataflow::kWeightStationary, Activation::kNone, k);
  wb.mvin(hb, 0, dim, 0, dim, wb.b_base());
  wb.emit(encode(PreloadArgs{wb.b_base(), RowSource::kScratchpad}));
  wb.mvin(hl, 0, k, 0, half, wb.a_base(), 0);
  wb.mvin(hr, 0, k, 0, half, wb.a_base(), static_cast<std::uint32_t>(half));
  ComputeArgs args;
  args.a_row = wb.a_base();
  wb.emit(encode(args));
  wb.mvout(hc, 0, k, 0, 0);

  // Row tags of the assembled A, straight from the policy.
  std::vector<Tag> a_tags(k);
  bool mixed = false;
  IntMatrix a(k, dim);
  for (std::size_t r = 0; r < k; ++r) {
    const Tag l = left_tags[r];
    const Tag rt = right_tags[r];
    if (l.is_blinded() && rt.is_blinded() && l != rt) mixed = true;
    a_tags[r] = l.is_blinded() ? l : rt;
    for (std::size_t c = 0; c < half; ++c) {
      a.at(r, c) = left.at(r, c);
      a.at(r, half + c) = right.at(r, c);
    }
  }
  const TagOracle tags = oracle_output_tags(a_tags, {}, b_tags);
  if (!mixed && !tags.fault) wb.expect(hc, oracle_matmul(a, b, {}), tags.row_tags);
  return std::move(wb).finish("partial-write");
}

Workload fault_workload(std::mt19937_64& rng, const TagRules& rules) {
  const std::size_t dim = std::array<std::size_t, 3>{2, 4, 8}[draw(rng, 0, 2)];
  const Tag t1 = draw_client_tag(rng);
  const Tag t2 = draw_other_tag(rng, t1);
  const Tag choices[] = {kPublic, kPublic, t1, t2};

  if (coin(rng, 66)) return matmul_workload(rng, dim, choices, true, rules, "fault");

  // Accumulate a t2 product onto accumulator rows holding a t1 result.
  const std::size_t k = draw(rng, 1, 2 * dim);
  const IntMatrix a1 = random_int8(rng, k, dim);
  const IntMatrix a2 = random_int8(rng, k, dim);
  const IntMatrix b = random_int8(rng, dim, dim);
  const Tag first[] = {kPublic, t1};
  const Tag second[] = {kPublic, t2};
  const auto a1_tags = random_tags(rng, k, first);
  const auto a2_tags = random_tags(rng, k, second);
  const std::vector<Tag> b_tags(dim, kPublic);

  WorkloadBuilder wb(config_for(dim, rules));
  const ElemWidth in = input_elem_for(dim);
  const auto h1 = wb.place(a1, a1_tags, in);
  const auto h2 = wb.place(a2, a2_tags, in);
  const auto hb = wb.place(b, b_tags, in);
  const auto hc = wb.reserve(k, dim, ElemWidth::k32);

  wb.set_config(Dataflow::kWeightStationary, Activation::kNone, k);
  wb.mvin(hb, 0, dim, 0, dim, wb.b_base());
  wb.emit(encode(PreloadArgs{wb.b_base(), RowSource::kScratchpad}));
  wb.mvin(h1, 0, k, 0, dim, wb.a_base());
  ComputeArgs args;
  args.a_row = wb.a_base();
  wb.emit(encode(args));
  wb.mvin(h2, 0, k, 0, dim, wb.a_base());
  args.accumulate = true;
  wb.emit(encode(args));
  wb.mvout(hc, 0, k, 0, 0);

  bool mixed = false;
  std::vector<Tag> c_tags(k);
  for (std::size_t r = 0; r < k; ++r) {
    mixed = mixed || (a1_tags[r].is_blinded() && a2_tags[r].is_blinded());
    c_tags[r] = a1_tags[r].is_blinded() ? a1_tags[r] : a2_tags[r];
  }
  if (!mixed) {
    IntMatrix c = oracle_matmul(a1, b, {});
    const IntMatrix c2 = oracle_matmul(a2, b, {});
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      c.values[i] = static_cast<std::int32_t>(static_cast<std::uint32_t>(c.values[i]) +
                                              static_cast<std::uint32_t>(c2.values[i]));
    }
    wb.expect(hc, std::move(c), c_tags);
  }
  return std::move(wb).finish("fault");
}

Workload perceptron_workload(std::mt19937_64& rng, const TagRules& rules) {
  const std::size_t dim = 8;
  const std::size_t k = draw(rng, 1, 12);
  const std::size_t n0 = draw(rng, 1, 16);
  const std::size_t hidden = draw(rng, 1, 16);
  const std::size_t out = draw(rng, 1, 16);
  const Dataflow df = draw_dataflow(rng);
  const Tag t = draw_client_tag(rng);
  const bool blind_model = coin(rng, 25);

  const IntMatrix x = random_int8(rng, k, n0);
  const IntMatrix w1 = random_int8(rng, n0, hidden);
  const IntMatrix w2 = random_int8(rng, hidden, out);
  IntMatrix b1(k, hidden);
  IntMatrix b2(k, out);
  const IntMatrix bias1 = random_int8(rng, 1, hidden);
  const IntMatrix bias2 = random_int8(rng, 1, out);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < hidden; ++c) b1.at(r, c) = bias1.at(0, c);
    for (std::size_t c = 0; c < out; ++c) b2.at(r, c) = bias2.at(0, c);
  }
  const Tag pair[] = {kPublic, t};
  const auto x_tags = random_tags(rng, k, pair);
  const std::vector<Tag> w1_tags(n0, blind_model ? t : kPublic);
  const std::vector<Tag> w2_tags(hidden, blind_model ? t : kPublic);
  const std::vector<Tag> b1_tags(k, kPublic);
  const std::vector<Tag> b2_tags(k, kPublic);

  WorkloadBuilder wb(config_for(dim, rules));
  const auto hx = wb.place(x, x_tags, ElemWidth::k8);
  const auto hw1 = wb.place(w1, w1_tags, ElemWidth::k8);
  const auto hw2 = wb.place(w2, w2_tags, ElemWidth::k8);
  const auto hb1 = wb.place(b1, b1_tags, ElemWidth::k8);
  const auto hb2 = wb.place(b2, b2_tags, ElemWidth::k8);
  const auto hh = wb.reserve(k, hidden, ElemWidth::k8);
  const auto hy = wb.reserve(k, out, ElemWidth::k32);
  wb.tiled_matmul(hx, hw1, hb1, hh, df, true);
  wb.tiled_matmul(hh, hw2, hb2, hy, df, false);

  const IntMatrix h = clip8(relu(oracle_matmul(x, w1, b1)));
  const TagOracle h_tags = oracle_output_tags(x_tags, b1_tags, w1_tags);
  const TagOracle y_tags = oracle_output_tags(h_tags.row_tags, b2_tags, w2_tags);
  wb.expect(hh, h, h_tags.row_tags);
  wb.expect(hy, oracle_matmul(h, w2, b2), y_tags.row_tags);
  return std::move(wb).finish("perceptron");
}

}  // namespace

std::optional<FuzzTemplate> parse_template(std::string_view name) {
  for (const auto& [n, t] : kTemplates) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::string_view to_string(FuzzTemplate t) {
  for (const auto& [n, tt] : kTemplates) {
    if (tt == t) return n;
  }
  return "?";
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

Workload make_workload(FuzzTemplate t, std::mt19937_64& rng, const TagRules& rules) {
  const Tag client = draw_client_tag(rng);
  const Tag single[] = {kPublic, client};
  switch (t) {
    case FuzzTemplate::kMatmul: {
      const std::size_t dim = std::array<std::size_t, 3>{2, 4, 8}[draw(rng, 0, 2)];
      return matmul_workload(rng, dim, single, coin(rng, 30), rules, "matmul");
    }
    case FuzzTemplate::kMatmul2: return matmul_workload(rng, 2, single, coin(rng, 30), rules, "matmul2");
    case FuzzTemplate::kMatmul4: return matmul_workload(rng, 4, single, coin(rng, 30), rules, "matmul4");
    case FuzzTemplate::kMatmul8: return matmul_workload(rng, 8, single, coin(rng, 30), rules, "matmul8");
    case FuzzTemplate::kPartialWrite: return partial_write_workload(rng, rules);
    case FuzzTemplate::kFault: return fault_workload(rng, rules);
    case FuzzTemplate::kPerceptron: return perceptron_workload(rng, rules);
  }
  throw std::invalid_argument("unknown template");
}

TaggedMemory blinded_twin(const TaggedMemory& mem, std::mt19937_64& rng) {
  TaggedMemory twin(mem.size());
  for (std::uint64_t a = 0; a < mem.size(); ++a) {
    TaggedWord w = mem.words()[a];
    if (w.tag.is_blinded()) w.data = rng();
    twin.poke(a, w);
  }
  return twin;
}

TrialOutcome run_trial(FuzzTemplate t, std::uint64_t seed, std::size_t trial,
                       const TagRules& rules) {
  TrialOutcome out{trial, false, {}};
  try {
    auto rng = trial_rng(seed, trial);
    const Workload w = make_workload(t, rng, rules);
    const TaggedMemory twin = blinded_twin(w.memory, rng);
    const NonInterference ni = check_noninterference(w.config, w.commands, w.memory, twin);
    if (!ni.pass()) {
      out.field = *ni.counterexample;
      return out;
    }
    if (!ni.first.observation.fault) {
      for (const auto& e : w.expected) {
        if (read_matrix(ni.first.memory, e.where) != e.values ||
            read_row_tags(ni.first.memory, e.where) != e.row_tags) {
          out.field = "oracle";
          return out;
        }
      }
    }
    out.pass = true;
  } catch (const std::exception& e) {
    out.field = std::string("error: ") + e.what();
  }
  return out;
}

std::size_t FuzzReport::passed() const {
  std::size_t n = 0;
  for (const auto& t : trials) n += t.pass ? 1 : 0;
  return n;
}

std::string FuzzReport::text() const {
  std::ostringstream os;
  for (const auto& t : trials) {
    os << "trial " << t.index << ": " << (t.pass ? "PASS" : "FAIL " + t.field) << '\n';
  }
  os << "summary: template=" << to_string(templ) << " seed=" << seed
     << " trials=" << trials.size() << " passed=" << passed() << " counterexamples=" << failed()
     << '\n';
  return os.str();
}

FuzzReport fuzz_noninterference_serial(FuzzTemplate t, std::uint64_t seed, std::size_t trials,
                                       const TagRules& rules) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  FuzzReport report{t, seed, {}};
  report.trials.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) report.trials.push_back(run_trial(t, seed, i, rules));
  return report;
}

FuzzReport fuzz_noninterference(FuzzTemplate t, std::uint64_t seed, std::size_t trials,
                                const FuzzOptions& opts) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (opts.jobs <= 1) return fuzz_noninterference_serial(t, seed, trials, opts.rules);

  FuzzReport report{t, seed, std::vector<TrialOutcome>(trials)};
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(opts.jobs))
  for (std::int64_t i = 0; i < n; ++i) {
    report.trials[static_cast<std::size_t>(i)] =
        run_trial(t, seed, static_cast<std::size_t>(i), opts.rules);
  }
  return report;
}

}  // namespace tagmesh
