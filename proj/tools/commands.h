// Copyright 2026 The maskdl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MASKDL_TOOLS_COMMANDS_H_
#define MASKDL_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.h"
#include "maskdl/theory.h"
#include "maskdl/trainer.h"

namespace maskdl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitVerifyFailed = 3;

struct SweepRow {
  std::string experiment;
  double axis_value = 0.0;
  Algorithm algorithm = Algorithm::kBaseline;
  InitKind init = InitKind::kSamples;
  std::uint64_t seed = 0;
  double final_d_r_cosine = 0.0;
  double final_d_r_euclidean = 0.0;
  double final_loss = 0.0;
  double wall_time_s = 0.0;
};

struct SweepOptions {
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  /// Write wall_time_s as 0 so reruns give identical bytes.
  bool reproducible = false;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

struct SweepResult {
  ExperimentConfig config;
  std::uint64_t master_seed = 0;
  std::vector<SweepRow> rows;  // cell enumeration order
};

/// Runs every (axis value, algorithm, init, seed) cell in that nesting order.
/// Cells sharing a seed share the ground truth and data streams.
SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& options);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
Json sweep_aggregate_json(const SweepResult& result);

Json run_result_json(const RunResult& result);
void write_history_csv(const RunResult& result, std::ostream& out);
Json overfit_report_json(const OverfitReport& report);
Json masking_report_json(const MaskingReport& report);

void write_matrix_csv(const Matrix& M, std::ostream& out);
Matrix read_matrix_csv(std::istream& in);

/// printf("%.17g"), independent of the global locale.
std::string format_real(double v);

/// Command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace maskdl::cli

#endif  // MASKDL_TOOLS_COMMANDS_H_
