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
#include <vector>

#include "doctest.h"
#include "tagmesh/scratchpad.hpp"

using namespace tagmesh;

namespace {

using Elems = std::vector<std::int32_t>;

ScratchpadBank bank(std::size_t width = 4, std::size_t depth = 8, bool acc = false) {
  return ScratchpadBank(BankConfig{width, depth, acc ? ElemWidth::k32 : ElemWidth::k8, acc});
}

// Full write of `data` with tag `t`, drained.
void put(ScratchpadBank& b, std::size_t row, Elems data, Tag t) {
  REQUIRE(b.request(SpadRequest::write(row, std::move(data), t)));
  b.step();
  b.step();
}

// Atomic read-check-write model executed in acceptance order.
struct Reference {
  std::vector<TaggedRow> rows;
  bool faulted = false;

  std::optional<MixingFault> apply(const SpadRequest& r) {
    TaggedRow& cur = rows[r.row];
    if (!r.accumulate && r.full_mask()) {
      cur = TaggedRow{r.data, r.tag};
      for (auto& e : cur.elems) e = wrap_to(ElemWidth::k8, e);
      return std::nullopt;
    }
    const auto j = tag_join(cur.tag, r.tag);
    if (!j.ok()) {
      faulted = true;
      return j.fault;
    }
    for (std::size_t i = 0; i < cur.elems.size(); ++i) {
      if (r.mask.empty() || r.mask[i]) cur.elems[i] = wrap_to(ElemWidth::k8, r.data[i]);
    }
    cur.tag = j.tag;
    return std::nullopt;
  }
};

}  // namespace

TEST_CASE("write offered alone is accepted") {
  auto b = bank();
  CHECK(b.request(SpadRequest::write(0, {1, 2, 3, 4}, kPublic)));
}

TEST_CASE("write wins over a same-cycle read") {
  auto b = bank();
  put(b, 2, {9, 9, 9, 9}, kPublic);
  const auto g = b.request(SpadRequest::read(2), SpadRequest::write(1, {1, 1, 1, 1}, kPublic));
  CHECK(g.write_accepted);
  CHECK_FALSE(g.read_accepted);
  CHECK(b.step().none());
  CHECK(b.step().none());  // the write committed; no read data ever appears
  CHECK(b.row(1).elems == Elems{1, 1, 1, 1});
}

TEST_CASE("one offer per cycle") {
  auto b = bank();
  CHECK(b.request(SpadRequest::read(0)));
  CHECK_THROWS_AS(b.request(SpadRequest::read(1)), std::logic_error);
}

TEST_CASE("row range is checked") {
  auto b = bank(4, 8);
  CHECK_THROWS_AS(b.request(SpadRequest::read(8)), RowOutOfRange);
  CHECK_THROWS_AS(b.request(SpadRequest::write(9, {0, 0, 0, 0}, kPublic)), RowOutOfRange);
  CHECK_THROWS_AS(b.row(8), RowOutOfRange);
}

TEST_CASE("read data arrives one cycle after acceptance") {
  auto b = bank();
  put(b, 5, {1, 2, 3, 4}, Tag(3));
  REQUIRE(b.request(SpadRequest::read(5)));
  CHECK(b.step().none());
  const auto r = b.step();
  REQUIRE(r.kind == SpadResponse::Kind::kReadData);
  CHECK(r.row == 5);
  CHECK(r.data == TaggedRow{{1, 2, 3, 4}, Tag(3)});
}

TEST_CASE("bypass forwards a committed write to the next read") {
  auto b = bank();
  REQUIRE(b.request(SpadRequest::write(3, {7, 7, 7, 7}, Tag(2))));
  CHECK(b.step().none());                  // t: stage 1 samples row 3
  REQUIRE(b.request(SpadRequest::read(3)));
  CHECK(b.step().none());                  // t+1: write commits, read sampled
  const auto r = b.step();                 // t+2
  REQUIRE(r.kind == SpadResponse::Kind::kReadData);
  CHECK(r.data == TaggedRow{{7, 7, 7, 7}, Tag(2)});
  CHECK(b.bypass_count() == 1);
}

TEST_CASE("bypass is suppressed when the write faults") {
  auto b = bank();
  put(b, 3, {4, 4, 4, 4}, Tag(4));
  REQUIRE(b.request(SpadRequest::write(3, {2, 2, 2, 2}, Tag(2), {true, false, true, false})));
  b.step();
  REQUIRE(b.request(SpadRequest::read(3)));
  const auto f = b.step();
  REQUIRE(f.kind == SpadResponse::Kind::kFault);
  CHECK(*f.fault == MixingFault{Tag(4), Tag(2)});
  const auto r = b.step();
  REQUIRE(r.kind == SpadResponse::Kind::kReadData);
  CHECK(r.data == TaggedRow{{4, 4, 4, 4}, Tag(4)});
  CHECK(b.row(3) == TaggedRow{{4, 4, 4, 4}, Tag(4)});
  CHECK(b.bypass_count() == 0);
  CHECK(b.faulted());
}

TEST_CASE("faults are sticky but later requests still run") {
  auto b = bank();
  put(b, 0, {1, 1, 1, 1}, Tag(1));
  REQUIRE(b.request(SpadRequest::write(0, {0, 0, 0, 0}, Tag(9), {true, true, true, false})));
  b.step();
  b.step();
  CHECK(b.faulted());
  put(b, 1, {5, 5, 5, 5}, kPublic);
  CHECK(b.row(1).elems == Elems{5, 5, 5, 5});
  CHECK(b.faulted());
}

TEST_CASE("full and partial write tag rules") {
  auto b = bank();
  put(b, 0, {1, 1, 1, 1}, Tag(7));
  put(b, 0, {0, 0, 0, 0}, kPublic);
  CHECK(b.row(0) == TaggedRow{{0, 0, 0, 0}, kPublic});

  put(b, 1, {1, 2, 3, 4}, kPublic);
  REQUIRE(b.request(SpadRequest::write(1, {9, 9, 9, 9}, Tag(5), {false, true, false, true})));
  b.step();
  CHECK(b.step().none());
  CHECK(b.row(1) == TaggedRow{{1, 9, 3, 9}, Tag(5)});

  put(b, 2, {1, 2, 3, 4}, Tag(4));
  REQUIRE(b.request(SpadRequest::write(2, {9, 9, 9, 9}, Tag(2), {true, false, false, false})));
  b.step();
  CHECK(b.step().kind == SpadResponse::Kind::kFault);
  CHECK(b.row(2) == TaggedRow{{1, 2, 3, 4}, Tag(4)});
}

TEST_CASE("partial write faults exactly when both tags are distinct and nonzero") {
  for (unsigned cur = 0; cur < 4; ++cur) {
    for (unsigned in = 0; in < 4; ++in) {
      auto b = bank();
      put(b, 0, {1, 1, 1, 1}, Tag(static_cast<std::uint8_t>(cur)));
      REQUIRE(b.request(SpadRequest::write(0, {2, 2, 2, 2}, Tag(static_cast<std::uint8_t>(in)),
                                           {true, true, false, false})));
      b.step();
      const bool faulted = b.step().kind == SpadResponse::Kind::kFault;
      CHECK(faulted == (cur != 0 && in != 0 && cur != in));
    }
  }
}

TEST_CASE("accumulator adds and always joins") {
  auto b = bank(2, 4, true);
  put(b, 0, {10, -3}, kPublic);
  REQUIRE(b.request(SpadRequest::accumulate_into(0, {5, 5}, Tag(6))));
  b.step();
  b.step();
  CHECK(b.row(0) == TaggedRow{{15, 2}, Tag(6)});

  REQUIRE(b.request(SpadRequest::accumulate_into(0, {1, 1}, Tag(8))));
  b.step();
  CHECK(b.step().kind == SpadResponse::Kind::kFault);
  CHECK(b.row(0) == TaggedRow{{15, 2}, Tag(6)});

  auto wrap = bank(1, 1, true);
  put(wrap, 0, {INT32_MAX}, kPublic);
  REQUIRE(wrap.request(SpadRequest::accumulate_into(0, {1}, kPublic)));
  wrap.step();
  wrap.step();
  CHECK(wrap.row(0).elems[0] == INT32_MIN);

  auto plain = bank();
  CHECK_THROWS_AS(plain.request(SpadRequest::accumulate_into(0, {1, 1, 1, 1}, kPublic)),
                  std::invalid_argument);
}

TEST_CASE("N back-to-back writes finish in N+1 cycles") {
  for (std::size_t n : {1u, 2u, 7u, 64u}) {
    auto b = bank(4, 64);
    std::size_t cycles = 0;
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(b.request(SpadRequest::write(i % 64, {int(i), 0, 0, 0}, kPublic)));
      b.step();
      ++cycles;
    }
    while (!b.idle()) {
      b.step();
      ++cycles;
    }
    CHECK(cycles == n + 1);
    CHECK(b.row((n - 1) % 64).elems[0] == static_cast<std::int32_t>(n - 1));
  }
}

TEST_CASE("pipeline matches the atomic reference model") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t width = 4, depth = 4;
    auto b = bank(width, depth);
    Reference ref{std::vector<TaggedRow>(depth, TaggedRow::zeros(width)), false};
    std::vector<TaggedRow> expected_reads;
    std::vector<TaggedRow> got_reads;
    std::vector<std::uint64_t> request_cycles;
    std::vector<std::uint64_t> response_cycles;
    std::size_t ref_faults = 0, got_faults = 0;

    const std::size_t steps = 40;
    for (std::size_t cyc = 0; cyc < steps + 2; ++cyc) {
      if (cyc < steps) {
        const auto kind = rng() % 3;
        const std::size_t row = rng() % depth;
        if (kind == 0) {
          REQUIRE(b.request(SpadRequest::read(row)));
          expected_reads.push_back(ref.rows[row]);
          request_cycles.push_back(cyc);
        } else if (kind == 1) {
          Elems data(width);
          for (auto& v : data) v = static_cast<std::int32_t>(rng() % 256) - 128;
          std::vector<bool> mask;
          if (rng() % 2) {
            for (std::size_t i = 0; i < width; ++i) mask.push_back(rng() % 2);
          }
          const Tag t(static_cast<std::uint8_t>(rng() % 3));
          auto req = SpadRequest::write(row, data, t, mask);
          REQUIRE(b.request(req));
          if (ref.apply(req)) ++ref_faults;
        }
      }
      const auto r = b.step();
      if (r.kind == SpadResponse::Kind::kReadData) {
        got_reads.push_back(r.data);
        response_cycles.push_back(cyc);
      }
      if (r.kind == SpadResponse::Kind::kFault) ++got_faults;
    }
    REQUIRE(got_reads == expected_reads);
    for (std::size_t i = 0; i < request_cycles.size(); ++i) {
      CHECK(response_cycles[i] == request_cycles[i] + 1);
    }
    CHECK(got_faults == ref_faults);
    CHECK(b.faulted() == ref.faulted);
    for (std::size_t r = 0; r < depth; ++r) CHECK(b.row(r) == ref.rows[r]);
  }
}

TEST_CASE("response timing ignores data and tags") {
  std::mt19937_64 rng(5);
  std::vector<std::size_t> schedule;  // 0 idle, 1 read, 2 write
  for (int i = 0; i < 50; ++i) schedule.push_back(rng() % 3);
  std::vector<std::vector<std::uint64_t>> timings;
  for (int variant = 0; variant < 20; ++variant) {
    auto b = bank();
    std::vector<std::uint64_t> times;
    for (std::size_t cyc = 0; cyc < schedule.size() + 2; ++cyc) {
      if (cyc < schedule.size() && schedule[cyc] == 1) b.request(SpadRequest::read(cyc % 8));
      if (cyc < schedule.size() && schedule[cyc] == 2) {
        Elems d(4);
        for (auto& v : d) v = static_cast<std::int32_t>(rng() % 256) - 128;
        b.request(SpadRequest::write(cyc % 8, d, Tag(static_cast<std::uint8_t>(rng() % 3)),
                                     {true, false, true, true}));
      }
      if (b.step().kind == SpadResponse::Kind::kReadData) times.push_back(cyc);
    }
    timings.push_back(times);
  }
  for (const auto& t : timings) CHECK(t == timings[0]);
}
