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

#include "doctest.h"
#include "tagmesh/fuzz.hpp"
#include "tagmesh/noninterference.hpp"
#include "tagmesh/oracle.hpp"
#include "tagmesh/workload.hpp"

using namespace tagmesh;

namespace {

Tag t(unsigned v) { return Tag(static_cast<std::uint8_t>(v)); }

Workload small_matmul(std::vector<Tag> a_tags, std::vector<Tag> b_tags) {
  AcceleratorConfig cfg;
  cfg.dim = 2;
  cfg.spad_depth = 16;
  cfg.acc_depth = 16;
  WorkloadBuilder wb(cfg);
  const auto ha = wb.place(IntMatrix(2, 2, {1, 2, 3, 4}), a_tags, ElemWidth::k32);
  const auto hb = wb.place(IntMatrix(2, 2, {5, 6, 7, 8}), b_tags, ElemWidth::k32);
  const auto hc = wb.reserve(2, 2, ElemWidth::k32);
  wb.tiled_matmul(ha, hb, std::nullopt, hc, Dataflow::kWeightStationary, false);
  return std::move(wb).finish("small");
}

}  // namespace

TEST_CASE("blinded equivalence") {
  TaggedMemory a(4), b(4);
  CHECK(blinded_equivalent(a, b));
  a.poke(1, {10, t(5)});
  b.poke(1, {99, t(5)});
  CHECK(blinded_equivalent(a, b));
  a.poke(2, {1, kPublic});
  CHECK_FALSE(blinded_equivalent(a, b));
  b.poke(2, {1, t(1)});
  CHECK_FALSE(blinded_equivalent(a, b));  // tag maps differ
  CHECK_THROWS(blinded_equivalent(a, TaggedMemory(5)));
}

TEST_CASE("paired runs that differ in blinded A pass") {
  const auto w = small_matmul({t(5), t(5)}, {kPublic, kPublic});
  TaggedMemory twin = w.memory;
  for (std::uint64_t i = 0; i < twin.size(); ++i) {
    if (twin.at(i).tag.is_blinded()) twin.poke(i, {twin.at(i).data ^ 0xdeadbeef, twin.at(i).tag});
  }
  const auto ni = check_noninterference(w.config, w.commands, w.memory, twin);
  CHECK(ni.pass());
  CHECK(ni.first.memory != ni.second.memory);
}

TEST_CASE("differing public data is a precondition violation") {
  const auto w = small_matmul({kPublic, kPublic}, {kPublic, kPublic});
  TaggedMemory other = w.memory;
  other.poke(0, {other.at(0).data + 1, kPublic});
  CHECK_THROWS_AS(check_noninterference(w.config, w.commands, w.memory, other),
                  PreconditionViolation);
}

TEST_CASE("faulting pairs fault on the same cycle") {
  const auto w = small_matmul({kPublic, kPublic}, {t(4), t(6)});
  TaggedMemory twin = w.memory;
  for (std::uint64_t i = 0; i < twin.size(); ++i) {
    if (twin.at(i).tag.is_blinded()) twin.poke(i, {~twin.at(i).data, twin.at(i).tag});
  }
  const auto ni = check_noninterference(w.config, w.commands, w.memory, twin);
  CHECK(ni.pass());
  REQUIRE(ni.first.observation.fault);
  CHECK(ni.first.observation.fault->cycle == ni.second.observation.fault->cycle);
}

TEST_CASE("first difference names the field") {
  SimObservation x;
  x.tag_map = {kPublic};
  SimObservation y = x;
  CHECK_FALSE(first_difference(x, y));
  y.public_words[0] = 1;
  CHECK(first_difference(x, y) == "public_words");
  y.tag_map = {t(1)};
  CHECK(first_difference(x, y) == "tag_map");
  y.total_cycles = 9;
  CHECK(first_difference(x, y) == "total_cycles");
  y.fault = Fault{FaultKind::kMixing, 3, "a", std::nullopt};
  CHECK(first_difference(x, y) == "fault");

  x = y;
  x.fault->detail = "different words";
  CHECK_FALSE(first_difference(x, y));
}

TEST_CASE("matmul oracle") {
  const IntMatrix eye(2, 2, {1, 0, 0, 1});
  const IntMatrix b(2, 2, {5, 6, 7, 8});
  const IntMatrix d(2, 2, {1, 1, 1, 1});
  CHECK(oracle_matmul(eye, b, d) == IntMatrix(2, 2, {6, 7, 8, 9}));
  CHECK(oracle_matmul(IntMatrix(2, 2, {1, 2, 3, 4}), b, d) == IntMatrix(2, 2, {20, 23, 44, 51}));
  CHECK(oracle_matmul(IntMatrix(1, 2, {1, 1}), b, {}) == IntMatrix(1, 2, {12, 14}));
  CHECK_THROWS_AS(oracle_matmul(IntMatrix(2, 3), b, {}), DimensionMismatch);
  CHECK_THROWS_AS(oracle_matmul(eye, b, IntMatrix(1, 2)), DimensionMismatch);
}

TEST_CASE("tag oracle") {
  const std::vector<Tag> z2{kPublic, kPublic};
  CHECK(oracle_output_tags(z2, z2, z2) == TagOracle{z2, false});
  const auto b4 = oracle_output_tags(z2, {}, std::vector<Tag>{kPublic, t(4)});
  CHECK(b4.row_tags == std::vector<Tag>{t(4), t(4)});
  CHECK(oracle_output_tags(std::vector<Tag>{t(1)}, {}, std::vector<Tag>{t(2)}).fault);
}

TEST_CASE("fuzzer passes on a correct build") {
  const auto r = fuzz_noninterference(FuzzTemplate::kMatmul8, 42, 10, {});
  CHECK(r.passed() == 10);
  CHECK(r.failed() == 0);
  CHECK_THROWS_AS(fuzz_noninterference(FuzzTemplate::kMatmul8, 42, 0, {}), std::invalid_argument);
}

TEST_CASE("fuzz reports are deterministic and ordered") {
  const auto a = fuzz_noninterference(FuzzTemplate::kMatmul, 7, 30, {});
  const auto b = fuzz_noninterference(FuzzTemplate::kMatmul, 7, 30, {});
  CHECK(a.text() == b.text());
  const std::string text = a.text();
  CHECK(text.rfind("summary: template=matmul seed=7 trials=30 passed=30 counterexamples=0\n") !=
        std::string::npos);
  CHECK(text.substr(0, 15) == "trial 0: PASS\nt");
}

TEST_CASE("parallel trials match the serial reference") {
  for (auto tmpl : {FuzzTemplate::kMatmul, FuzzTemplate::kFault, FuzzTemplate::kPartialWrite}) {
    const auto serial = fuzz_noninterference_serial(tmpl, 5, 40, {});
    FuzzOptions opts;
    opts.jobs = 4;
    const auto parallel = fuzz_noninterference(tmpl, 5, 40, opts);
    CHECK(serial.text() == parallel.text());

    FuzzOptions stub;
    stub.jobs = 3;
    stub.rules = TagRules(JoinMode::kStubAlwaysPublic);
    CHECK(fuzz_noninterference_serial(tmpl, 5, 40, stub.rules).text() ==
          fuzz_noninterference(tmpl, 5, 40, stub).text());
  }
}

TEST_CASE("templates and seeds") {
  for (auto name : {"matmul", "matmul2", "matmul4", "matmul8", "partial-write", "fault",
                    "perceptron"}) {
    const auto t = parse_template(name);
    REQUIRE(t);
    CHECK(to_string(*t) == name);
  }
  CHECK_FALSE(parse_template("resnet"));

  auto r1 = trial_rng(42, 3), r2 = trial_rng(42, 3), r3 = trial_rng(42, 4);
  const auto x = r1();
  CHECK(x == r2());
  CHECK(x != r3());
}

TEST_CASE("blinded twin only touches tagged data") {
  TaggedMemory m(16);
  for (std::uint64_t i = 0; i < 16; ++i) m.poke(i, {i, i % 3 ? kPublic : t(2)});
  auto rng = trial_rng(1, 1);
  const auto twin = blinded_twin(m, rng);
  CHECK(blinded_equivalent(m, twin));
  CHECK(twin != m);
}
