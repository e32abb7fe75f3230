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

// tagmesh: run, trace and verify workloads on the tag-tracking accelerator model.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tagmesh/fuzz.hpp"
#include "tagmesh/trace.hpp"
#include "tagmesh/workload_file.hpp"

namespace {

using namespace tagmesh;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kSecurityFault = 2;
constexpr int kMismatch = 3;
constexpr int kCounterexample = 4;

void print_stats(const SimStats& s) {
  std::cout << "total_cycles " << s.total_cycles << '\n'
            << "mvin_count " << s.mvin_count << '\n'
            << "mvout_count " << s.mvout_count << '\n'
            << "compute_rows " << s.compute_rows << '\n'
            << "tag_registers_used " << s.tag_registers_used << '\n'
            << "per_pe_equivalent_registers " << s.per_pe_equivalent_registers << '\n';
}

int simulate(const std::string& path, const std::string& trace_out, bool detail) {
  WorkloadFile w;
  try {
    w = load_workload(path);
  } catch (const WorkloadFileError& e) {
    std::cout << "error: " << e.what() << '\n';
    return kUsage;
  }

  std::ofstream trace_file;
  std::optional<TraceWriter> tracer;
  if (!trace_out.empty()) {
    trace_file.open(trace_out, std::ios::binary | std::ios::trunc);
    if (!trace_file) {
      std::cout << "error: cannot write " << trace_out << '\n';
      return kUsage;
    }
    tracer.emplace(trace_file);
    tracer->header(w.config);
  }

  const RunResult r = run(w.config, w.commands, w.initial_memory(),
                          tracer ? tracer->observer() : CycleObserver{});
  std::cout << "workload " << (w.name.empty() ? path : w.name) << '\n';
  print_stats(r.stats);
  if (detail) {
    std::cout << "access_trace_entries " << r.observation.access_trace.entries().size() << '\n'
              << "public_words " << r.observation.public_words.size() << '\n';
  }

  if (const auto& f = r.observation.fault) {
    std::cout << "fault " << to_string(f->kind) << " at cycle " << f->cycle << ": " << f->detail
              << '\n';
    return f->is_security_fault() ? kSecurityFault : kUsage;
  }
  const auto mismatches = compare_expected(w, r.memory);
  for (const auto& m : mismatches) std::cout << "mismatch " << m << '\n';
  if (!mismatches.empty()) return kMismatch;
  if (!w.expected.empty()) std::cout << "expected: " << w.expected.size() << " words match\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-level model of a tag-tracking systolic matmul accelerator"};
  app.require_subcommand(1);

  std::string file;
  std::string trace_out;
  bool stats = false;
  auto* run_cmd = app.add_subcommand("run", "Simulate a workload file");
  run_cmd->add_option("file", file, "Workload file")->required();
  run_cmd->add_option("--trace-out", trace_out, "Write a per-cycle trace to this path");
  run_cmd->add_flag("--stats", stats, "Print observation summary as well");

  auto* trace_cmd = app.add_subcommand("trace", "Simulate a workload and write its cycle trace");
  trace_cmd->add_option("file", file, "Workload file")->required();
  trace_cmd->add_option("--out", trace_out, "Trace output path")->required();

  std::string templ;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t jobs = 1;
  std::string mutation = "none";
  auto* verify_cmd = app.add_subcommand("verify", "Fuzz the non-interference property");
  verify_cmd->add_option("--template", templ, "Workload template")
      ->required()
      ->check(CLI::IsMember({"matmul", "matmul2", "matmul4", "matmul8", "partial-write", "fault",
                             "perceptron"}));
  verify_cmd->add_option("--seed", seed, "Base seed")->required();
  verify_cmd->add_option("--trials", trials, "Number of trials")->required();
  verify_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1, 1024));
  verify_cmd->add_option("--mutation", mutation, "Inject a policy bug (checker self-test)")
      ->check(CLI::IsMember({"none", "stub-join"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (run_cmd->parsed()) return simulate(file, trace_out, stats);
  if (trace_cmd->parsed()) return simulate(file, trace_out, false);

  if (trials == 0) {
    std::cout << "error: --trials must be at least 1\n";
    return kUsage;
  }
  FuzzOptions opts;
  opts.jobs = jobs;
  if (mutation == "stub-join") opts.rules = TagRules(JoinMode::kStubAlwaysPublic);
  const FuzzReport report = fuzz_noninterference(*parse_template(templ), seed, trials, opts);
  std::cout << report.text();
  return report.failed() == 0 ? kOk : kCounterexample;
}
