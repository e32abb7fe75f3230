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

#include "tagmesh/trace.hpp"

namespace tagmesh {

namespace {

void put_tag(std::ostream& os, const std::optional<Tag>& t) {
  if (t) {
    os << static_cast<unsigned>(t->value);
  } else {
    os << '-';
  }
}

}  // namespace

void TraceWriter::header(const AcceleratorConfig& cfg) {
  os_ << "# mesh " << cfg.dim << 'x' << cfg.dim << ' '
      << (cfg.dataflow == Dataflow::kWeightStationary ? "WS" : "OS") << " latency "
      << MeshConfig{cfg.dim, cfg.dim, cfg.dataflow, cfg.activation}.output_latency() << '\n';
}

void TraceWriter::record(const CycleRecord& r) {
  const Mesh& m = r.mesh;
  os_ << "cycle " << r.cycle << " cmd " << r.command_index << ' ' << to_string(r.command);

  os_ << " wave ";
  for (std::size_t i = 0; i < m.config().rows; ++i) {
    if (i != 0) os_ << '/';
    for (std::size_t j = 0; j < m.config().cols; ++j) os_ << (m.pe_active(i, j) ? '#' : '.');
  }

  os_ << " queue [";
  const auto& q = m.tag_queue();
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i != 0) os_ << ' ';
    put_tag(os_, q[i]);
  }
  os_ << "] feed ";
  put_tag(os_, r.fed_tag);

  if (r.emitted) {
    os_ << " out [";
    for (std::size_t i = 0; i < r.emitted->elems.size(); ++i) {
      if (i != 0) os_ << ' ';
      os_ << r.emitted->elems[i];
    }
    os_ << "] tag " << static_cast<unsigned>(r.emitted->tag.value);
  }
  if (m.faulted()) os_ << " FAULT";
  os_ << '\n';
}

}  // namespace tagmesh
