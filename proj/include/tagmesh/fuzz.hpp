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
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tagmesh/tag.hpp"
#include "tagmesh/workload.hpp"

namespace tagmesh {

enum class FuzzTemplate : std::uint8_t {
  kMatmul,  // mesh size drawn from {2, 4, 8}
  kMatmul2,
  kMatmul4,
  kMatmul8,
  kPartialWrite,
  kFault,
  kPerceptron,
};

std::optional<FuzzTemplate> parse_template(std::string_view name);
std::string_view to_string(FuzzTemplate t);

/// Deterministic per-trial generator, independent of thread scheduling.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Draws one random workload from a template. Workloads carry oracle
/// expectations whenever the tag policy says the run cannot fault.
Workload make_workload(FuzzTemplate t, std::mt19937_64& rng, const TagRules& rules = {});

/// Same tags and public data; every blinded word gets fresh random data.
TaggedMemory blinded_twin(const TaggedMemory& mem, std::mt19937_64& rng);

struct TrialOutcome {
  std::size_t index = 0;
  bool pass = false;
  std::string field;  // first differing observable, "oracle", or an error

  friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

struct FuzzOptions {
  std::size_t jobs = 1;
  TagRules rules;
};

struct FuzzReport {
  FuzzTemplate templ = FuzzTemplate::kMatmul;
  std::uint64_t seed = 0;
  std::vector<TrialOutcome> trials;

  std::size_t passed() const;
  std::size_t failed() const { return trials.size() - passed(); }
  /// One line per trial, summary last.
  std::string text() const;

  friend bool operator==(const FuzzReport&, const FuzzReport&) = default;
};

TrialOutcome run_trial(FuzzTemplate t, std::uint64_t seed, std::size_t trial, const TagRules& rules);

/// Runs `trials` paired executions. Trials are spread over `jobs` OpenMP
/// threads; the report is ordered by trial index regardless.
/// Throws std::invalid_argument when trials is 0.
FuzzReport fuzz_noninterference(FuzzTemplate t, std::uint64_t seed, std::size_t trials,
                                const FuzzOptions& opts = {});

/// Single-threaded reference for fuzz_noninterference.
FuzzReport fuzz_noninterference_serial(FuzzTemplate t, std::uint64_t seed, std::size_t trials,
                                       const TagRules& rules = {});

}  // namespace tagmesh
