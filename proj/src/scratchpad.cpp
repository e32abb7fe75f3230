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

#include "tagmesh/scratchpad.hpp"

#include <algorithm>
#include <string>

namespace tagmesh {

RowOutOfRange::RowOutOfRange(std::size_t row, std::size_t depth)
    : std::out_of_range("scratchpad row " + std::to_string(row) + " outside depth " +
                        std::to_string(depth)),
      row_(row) {}

bool SpadRequest::full_mask() const {
  return std::all_of(mask.begin(), mask.end(), [](bool b) { return b; });
}

ScratchpadBank::ScratchpadBank(BankConfig cfg, TagRules rules)
    : cfg_(cfg), rules_(rules), rows_(cfg.depth, TaggedRow::zeros(cfg.width)) {
  if (cfg.width == 0 || cfg.depth == 0) throw std::invalid_argument("empty scratchpad bank");
}

const TaggedRow& ScratchpadBank::row(std::size_t index) const {
  if (index >= rows_.size()) throw RowOutOfRange(index, rows_.size());
  return rows_[index];
}

void ScratchpadBank::validate(const SpadRequest& req) const {
  if (req.row >= cfg_.depth) throw RowOutOfRange(req.row, cfg_.depth);
  if (req.op == SpadOp::kRead) return;
  if (req.data.size() != cfg_.width) throw std::invalid_argument("write data width mismatch");
  if (!req.mask.empty() && req.mask.size() != cfg_.width) {
    throw std::invalid_argument("write mask width mismatch");
  }
  if (req.accumulate && !cfg_.accumulator) {
    throw std::invalid_argument("accumulating write to a non-accumulator bank");
  }
}

Arbitration ScratchpadBank::request(const std::optional<SpadRequest>& read,
                                    const std::optional<SpadRequest>& write) {
  if (offered_) throw std::logic_error("scratchpad bank offered twice in one cycle");
  if (read && read->op != SpadOp::kRead) throw std::invalid_argument("read slot holds a write");
  if (write && write->op != SpadOp::kWrite) throw std::invalid_argument("write slot holds a read");
  if (read) validate(*read);
  if (write) validate(*write);

  offered_ = true;
  Arbitration grant;
  if (write) {
    incoming_ = *write;
    grant.write_accepted = true;
  } else if (read) {
    incoming_ = *read;
    grant.read_accepted = true;
  }
  return grant;
}

bool ScratchpadBank::request(const SpadRequest& req) {
  const Arbitration g = req.op == SpadOp::kRead ? request(req, std::nullopt)
                                                : request(std::nullopt, req);
  return g.read_accepted || g.write_accepted;
}

std::optional<TaggedRow> ScratchpadBank::commit(const InFlight& w,
                                                std::optional<MixingFault>& fault) {
  const SpadRequest& req = w.req;
  // A full overwrite destroys the old row, so nothing flows from it.
  if (!req.accumulate && req.full_mask()) {
    TaggedRow out{req.data, req.tag};
    for (auto& e : out.elems) e = wrap_to(cfg_.elem, e);
    return out;
  }

  const TagResult joined = rules_.join(w.sampled.tag, req.tag);
  if (!joined.ok()) {
    fault = joined.fault;
    return std::nullopt;
  }
  TaggedRow out = w.sampled;
  for (std::size_t i = 0; i < cfg_.width; ++i) {
    if (!req.mask.empty() && !req.mask[i]) continue;
    const std::int64_t v = req.accumulate
                               ? static_cast<std::int64_t>(out.elems[i]) + req.data[i]
                               : static_cast<std::int64_t>(req.data[i]);
    out.elems[i] = wrap_to(cfg_.elem, v);
  }
  out.tag = joined.tag;
  return out;
}

SpadResponse ScratchpadBank::step() {
  SpadResponse out;

  // Stage 1: synchronous SRAM read of the row as it stood at cycle start.
  std::optional<InFlight> next;
  if (incoming_) {
    const std::size_t r = incoming_->row;
    next = InFlight{std::move(*incoming_), rows_[r]};
    incoming_.reset();
  }

  // Stage 2: answer the read, or check and commit the write.
  if (stage2_) {
    const std::size_t r = stage2_->req.row;
    out.row = r;
    if (stage2_->req.op == SpadOp::kRead) {
      out.kind = SpadResponse::Kind::kReadData;
      out.data = std::move(stage2_->sampled);
    } else {
      std::optional<MixingFault> fault;
      if (auto committed = commit(*stage2_, fault)) {
        rows_[r] = *committed;
        if (next && next->req.row == r) {
          next->sampled = std::move(*committed);
          ++bypasses_;
        }
      } else {
        faulted_ = true;
        out.kind = SpadResponse::Kind::kFault;
        out.fault = fault;
      }
    }
  }

  stage2_ = std::move(next);
  offered_ = false;
  return out;
}

}  // namespace tagmesh
