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

#include <ostream>

#include "tagmesh/controller.hpp"

namespace tagmesh {

/// Renders one line per simulated cycle: the command in flight, the mesh
/// wavefront (`#` for a PE holding live data, `.` otherwise, rows split by
/// `/`), the tag queue (oldest entry last, `-` for an empty slot), the tag
/// fed this cycle, and any row leaving the mesh together with its tag.
///
/// Output depends only on simulator state, so a fixed workload always
/// yields byte-identical text.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& os) : os_(os) {}

  void header(const AcceleratorConfig& cfg);
  void record(const CycleRecord& r);
  CycleObserver observer() {
    return [this](const CycleRecord& r) { record(r); };
  }

 private:
  std::ostream& os_;
};

}  // namespace tagmesh
