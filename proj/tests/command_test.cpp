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
#include "tagmesh/command.hpp"

using namespace tagmesh;

TEST_CASE("operand encodings round trip") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    ConfigArgs c{rng() % 2 ? Dataflow::kWeightStationary : Dataflow::kOutputStationary,
                 rng() % 2 ? Activation::kRelu : Activation::kNone,
                 static_cast<std::uint32_t>(rng() % 0x10000), static_cast<std::uint32_t>(rng() % 0x10000),
                 static_cast<std::uint32_t>(rng() % 0x10000)};
    CHECK(decode_config(encode(c)) == c);

    MoveArgs m;
    m.addr = static_cast<std::uint32_t>(rng());
    m.stride = static_cast<std::uint32_t>(rng());
    m.row = static_cast<std::uint32_t>(rng() % 0x10000);
    m.rows = static_cast<std::uint32_t>(rng() % 0x10000);
    m.col_offset = static_cast<std::uint32_t>(rng() % 0x1000);
    m.cols = static_cast<std::uint32_t>(rng() % 0x1000);
    m.elem = rng() % 2 ? ElemWidth::k8 : ElemWidth::k32;
    CHECK(decode_move(encode_mvin(m)) == m);

    PreloadArgs p{static_cast<std::uint32_t>(rng() % 0x10000), static_cast<RowSource>(rng() % 3)};
    CHECK(decode_preload(encode(p)) == p);

    ComputeArgs k{static_cast<std::uint32_t>(rng() % 0x10000), static_cast<std::uint32_t>(rng() % 0x10000),
                  static_cast<RowSource>(rng() % 3), static_cast<std::uint32_t>(rng() % 0x10000),
                  rng() % 2 == 0, static_cast<std::uint32_t>(rng() % 0x10000)};
    CHECK(decode_compute(encode(k)) == k);
  }
}

TEST_CASE("mvout ignores column fields") {
  MoveArgs m;
  m.col_offset = 3;
  m.cols = 2;
  const auto back = decode_move(encode_mvout(m));
  CHECK(back.col_offset == 0);
  CHECK(back.cols == 0);
}

TEST_CASE("encoders refuse fields that do not fit") {
  ConfigArgs c;
  c.k = 0x10000;
  CHECK_THROWS_AS(encode(c), std::invalid_argument);
  MoveArgs m;
  m.cols = 0x1000;
  CHECK_THROWS_AS(encode_mvin(m), std::invalid_argument);
}

TEST_CASE("reserved codes are rejected on decode") {
  Command c = encode(ConfigArgs{});
  c.rs1.data = 2;  // dataflow 2
  CHECK_THROWS_AS(decode_config(c), std::invalid_argument);
  c.rs1.data = 2u << 2;  // activation 2
  CHECK_THROWS_AS(decode_config(c), std::invalid_argument);

  Command p = encode(PreloadArgs{});
  p.rs1.data = 3u << 16;
  CHECK_THROWS_AS(decode_preload(p), std::invalid_argument);

  Command m = encode_mvin(MoveArgs{});
  m.rs2.data |= std::uint64_t{2} << 56;
  CHECK_THROWS_AS(decode_move(m), std::invalid_argument);
}

TEST_CASE("command names") {
  for (auto k : {CommandKind::kConfig, CommandKind::kMvin, CommandKind::kMvout,
                 CommandKind::kPreload, CommandKind::kCompute}) {
    CHECK(parse_command_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_command_kind("flush"));
}
