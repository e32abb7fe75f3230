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
#include <stdexcept>
#include <vector>

#include "tagmesh/row.hpp"
#include "tagmesh/tag.hpp"

namespace tagmesh {

class RowOutOfRange : public std::out_of_range {
 public:
  RowOutOfRange(std::size_t row, std::size_t depth);
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

enum class SpadOp : std::uint8_t { kRead, kWrite };

struct SpadRequest {
  SpadOp op = SpadOp::kRead;
  std::size_t row = 0;
  std::vector<std::int32_t> data;  // writes only
  std::vector<bool> mask;          // writes only; empty means every lane
  Tag tag;                         // writes only
  bool accumulate = false;         // writes only; accumulator banks only

  static SpadRequest read(std::size_t row) { return {SpadOp::kRead, row, {}, {}, kPublic, false}; }
  static SpadRequest write(std::size_t row, std::vector<std::int32_t> data, Tag tag,
                           std::vector<bool> mask = {}) {
    return {SpadOp::kWrite, row, std::move(data), std::move(mask), tag, false};
  }
  static SpadRequest accumulate_into(std::size_t row, std::vector<std::int32_t> data, Tag tag,
                                     std::vector<bool> mask = {}) {
    return {SpadOp::kWrite, row, std::move(data), std::move(mask), tag, true};
  }

  bool full_mask() const;
  friend bool operator==(const SpadRequest&, const SpadRequest&) = default;
};

struct SpadResponse {
  enum class Kind : std::uint8_t { kNone, kReadData, kFault };

  Kind kind = Kind::kNone;
  std::size_t row = 0;
  TaggedRow data;                     // kReadData
  std::optional<MixingFault> fault;   // kFault

  bool none() const { return kind == Kind::kNone; }
};

struct Arbitration {
  bool read_accepted = false;
  bool write_accepted = false;
};

struct BankConfig {
  std::size_t width = 0;
  std::size_t depth = 0;
  ElemWidth elem = ElemWidth::k8;
  bool accumulator = false;
  friend bool operator==(const BankConfig&, const BankConfig&) = default;
};

/// One row-tagged SRAM bank.
///
/// Accepts at most one request per cycle, writes winning over reads. Every
/// request spends one cycle in stage 1 (data and tag SRAM read) and one in
/// stage 2 (read response, or tag check then write). A stage-1 read or
/// tag lookup that hits the row being written by stage 2 in the same cycle
/// is served by the bypass, and only when that write passed its check.
class ScratchpadBank {
 public:
  explicit ScratchpadBank(BankConfig cfg, TagRules rules = {});

  const BankConfig& config() const { return cfg_; }

  /// Offers this cycle's read and/or write. Must be called at most once
  /// per cycle, before step().
  Arbitration request(const std::optional<SpadRequest>& read,
                      const std::optional<SpadRequest>& write);
  /// Single-source convenience; returns whether the request was accepted.
  bool request(const SpadRequest& req);

  /// Advances one cycle.
  SpadResponse step();

  bool idle() const { return !incoming_ && !stage2_; }
  bool faulted() const { return faulted_; }
  const TaggedRow& row(std::size_t index) const;

  std::uint64_t bypass_count() const { return bypasses_; }

  friend bool operator==(const ScratchpadBank&, const ScratchpadBank&) = default;

 private:
  struct InFlight {
    SpadRequest req;
    TaggedRow sampled;  // row contents seen in stage 1
    friend bool operator==(const InFlight&, const InFlight&) = default;
  };

  void validate(const SpadRequest& req) const;
  // Returns the committed row, or nullopt when the tag check failed.
  std::optional<TaggedRow> commit(const InFlight& w, std::optional<MixingFault>& fault);

  BankConfig cfg_;
  TagRules rules_;
  std::vector<TaggedRow> rows_;
  std::optional<SpadRequest> incoming_;
  std::optional<InFlight> stage2_;
  bool offered_ = false;
  bool faulted_ = false;
  std::uint64_t bypasses_ = 0;
};

}  // namespace tagmesh
