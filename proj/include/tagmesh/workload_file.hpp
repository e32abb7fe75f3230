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

#include <stdexcept>
#include <string>
#include <vector>

#include "tagmesh/workload.hpp"

namespace tagmesh {

/// Rejected workload text: bad syntax, unknown or missing fields, values
/// out of range.
class WorkloadFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One word of a memory image.
struct MemoryRecord {
  std::uint64_t addr = 0;
  std::uint64_t data = 0;
  Tag tag;
  friend bool operator==(const MemoryRecord&, const MemoryRecord&) = default;
};

/// Parsed form of a workload file.
struct WorkloadFile {
  std::string name;
  AcceleratorConfig config;
  std::uint64_t memory_words = 0;
  std::vector<MemoryRecord> memory;
  std::vector<Command> commands;
  std::vector<MemoryRecord> expected;

  TaggedMemory initial_memory() const;
};

WorkloadFile parse_workload(const std::string& text);
WorkloadFile load_workload(const std::string& path);
std::string dump_workload(const WorkloadFile& w);

/// Converts a generated workload. Expected matrices become per-word
/// records covering each logical row.
WorkloadFile to_file(const Workload& w);

/// Words of `mem` that differ from the expected records.
std::vector<std::string> compare_expected(const WorkloadFile& w, const TaggedMemory& mem);

}  // namespace tagmesh
