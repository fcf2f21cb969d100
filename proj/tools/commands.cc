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

#include "commands.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "maskdl/dataset_io.h"
#include "maskdl/error.h"
#include "maskdl/metrics.h"
#include "maskdl/numerics.h"

namespace maskdl::cli {
namespace {

constexpr std::uint64_t kTrainSeedStream = 3;

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

Json matrix_json(const Matrix& M) {
  return Json{{"rows", M.rows()},
              {"cols", M.cols()},
              {"order", "column_major"},
              {"data", std::vector<double>(M.data(), M.data() + M.size())}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::filesystem::path prepare_out_dir(const std::string& out) {
  const std::filesystem::path dir = std::filesystem::path(out.empty() ? "." : out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

std::uint64_t train_seed(std::uint64_t master, std::uint64_t seed) {
  RngStream s = RngStream(master).derive(seed).derive(kTrainSeedStream);
  return s.next_u64();
}

Json net_spec_json(const NetSpec& spec) {
  return Json{{"epsilon", spec.epsilon},
              {"radius", spec.radius},
              {"gamma1", spec.gamma1},
              {"gamma2", spec.gamma2},
              {"hole_radius", spec.hole_radius},
              {"grid_cover", spec.grid_cover},
              {"supports", spec.supports.size()},
              {"columns", spec.columns}};
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
  cfg.validate();
  struct Cell {
    double axis_value;
    Algorithm algorithm;
    InitKind init;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  std::size_t n_holdout = cfg.model.n_holdout;
  for (double v : cfg.axis) {
    const CellSetup setup = apply_axis(cfg, v);
    if (cfg.model.n_holdout == 0) {
      const std::size_t p_prime =
          setup.train.p_prime == 0 ? setup.model.p : setup.train.p_prime;
      n_holdout = std::max(n_holdout, p_prime);
    }
    for (Algorithm a : cfg.algorithms) {
      for (InitKind i : cfg.inits) {
        for (std::uint64_t s : cfg.seeds) cells.push_back({v, a, i, s});
      }
    }
  }

  SweepResult result;
  result.config = cfg;
  result.master_seed = options.master_seed;
  result.rows.resize(cells.size());
  std::mutex log_mutex;
  std::size_t done = 0;
  parallel_for(cells.size(), options.threads, [&](std::size_t c) {
    const Cell& cell = cells[c];
    const auto start = std::chrono::steady_clock::now();
    const CellSetup setup = apply_axis(cfg, cell.axis_value);
    const Dataset data = make_dataset(setup.model, n_holdout,
                                      RngStream(options.master_seed).derive(cell.seed));
    TrainConfig tc = setup.train;
    tc.algorithm = cell.algorithm;
    tc.init = cell.init;
    tc.seed = train_seed(options.master_seed, cell.seed);
    tc.threads = 1;
    const RunResult run = train(data, tc);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    SweepRow& row = result.rows[c];
    row.experiment = cfg.experiment;
    row.axis_value = cell.axis_value;
    row.algorithm = cell.algorithm;
    row.init = cell.init;
    row.seed = cell.seed;
    row.final_d_r_cosine = run.error_cosine.back();
    row.final_d_r_euclidean = run.error_euclidean.back();
    row.final_loss = run.loss_history.back();
    row.wall_time_s = options.reproducible ? 0.0 : seconds;
    if (options.log) {
      std::lock_guard lock(log_mutex);
      ++done;
      *options.log << "[" << done << "/" << cells.size() << "] " << cfg.experiment << " "
                   << to_string(cfg.axis_param) << "=" << format_real(cell.axis_value)
                   << " " << to_string(cell.algorithm) << "/" << to_string(cell.init)
                   << " seed " << cell.seed << ": d_r_cosine "
                   << format_real(row.final_d_r_cosine) << " (" << seconds << " s)\n";
    }
  });
  return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "# maskdl sweep\n";
  out << "# master_seed: " << result.master_seed << "\n";
  out << "# config: " << to_json(result.config).dump() << "\n";
  out << "experiment,axis_value,algorithm,init,seed,final_d_r_cosine,"
         "final_d_r_euclidean,final_loss,wall_time_s\n";
  for (const SweepRow& r : result.rows) {
    out << r.experiment << ',' << format_real(r.axis_value) << ','
        << to_string(r.algorithm) << ',' << to_string(r.init) << ',' << r.seed << ','
        << format_real(r.final_d_r_cosine) << ',' << format_real(r.final_d_r_euclidean)
        << ',' << format_real(r.final_loss) << ',' << format_real(r.wall_time_s) << '\n';
  }
}

Json sweep_aggregate_json(const SweepResult& result) {
  const ExperimentConfig& cfg = result.config;
  Json cells = Json::array();
  for (double v : cfg.axis) {
    for (Algorithm a : cfg.algorithms) {
      for (InitKind i : cfg.inits) {
        std::vector<double> cos, euc, loss;
        std::vector<std::uint64_t> seeds;
        for (const SweepRow& r : result.rows) {
          if (r.axis_value == v && r.algorithm == a && r.init == i) {
            cos.push_back(r.final_d_r_cosine);
            euc.push_back(r.final_d_r_euclidean);
            loss.push_back(r.final_loss);
            seeds.push_back(r.seed);
          }
        }
        auto stats = [](const std::vector<double>& x) {
          const MeanStd m = mean_std(x);
          return Json{{"mean", m.mean}, {"std", m.std}};
        };
        cells.push_back(Json{{"axis_value", v},
                             {"algorithm", to_string(a)},
                             {"init", to_string(i)},
                             {"count", cos.size()},
                             {"seeds", seeds},
                             {"final_d_r_cosine", stats(cos)},
                             {"final_d_r_euclidean", stats(euc)},
                             {"final_loss", stats(loss)}});
      }
    }
  }
  return Json{{"experiment", cfg.experiment},
              {"master_seed", result.master_seed},
              {"config", to_json(cfg)},
              {"cells", cells}};
}

Json run_result_json(const RunResult& result) {
  return Json{{"config", to_json(result.config)},
              {"iterations", result.iterations},
              {"error_cosine", result.error_cosine},
              {"error_euclidean", result.error_euclidean},
              {"loss_history", result.loss_history},
              {"final_dictionary", matrix_json(result.final_dictionary)}};
}

void write_history_csv(const RunResult& result, std::ostream& out) {
  out << "# maskdl train\n";
  out << "# master_seed: " << result.config.seed << "\n";
  out << "# config: " << to_json(result.config).dump() << "\n";
  out << "epoch,d_r_cosine,d_r_euclidean,loss\n";
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    out << e << ',' << format_real(result.error_cosine[e]) << ','
        << format_real(result.error_euclidean[e]) << ','
        << format_real(result.loss_history[e]) << '\n';
  }
}

Json overfit_report_json(const OverfitReport& r) {
  Json j{{"theorem", "overfit"},
         {"loss_a", r.loss_a},
         {"loss_b", r.loss_b},
         {"gap", r.gap},
         {"gap_se", r.gap_se},
         {"d_r_euclidean", r.d_r_euclidean},
         {"d_r_cosine", r.d_r_cosine},
         {"sigma_min_sq", r.sigma_min_sq},
         {"p_over_d", r.p_over_d},
         {"n_eval", r.n_eval},
         {"columns", r.columns},
         {"checks",
          {{"gap_above_3se", r.gap > 3.0 * r.gap_se},
           {"d_r_euclidean_above_0.001", r.d_r_euclidean > 1e-3}}},
         {"passed", r.passed}};
  if (r.net) j["net"] = net_spec_json(*r.net);
  return j;
}

Json masking_report_json(const MaskingReport& r) {
  Json points = Json::array();
  for (const MaskedRiskReport& p : r.points) {
    points.push_back(Json{{"sigma_z", p.sigma_z},
                          {"risk_omp", p.omp},
                          {"risk_ls_oracle", p.ls_oracle},
                          {"risk_ridge_oracle", p.ridge_oracle},
                          {"conditional_risk_ls", p.ls_conditional},
                          {"conditional_risk_ridge", p.ridge_conditional},
                          {"gap", p.gap},
                          {"gap_se", p.gap_se},
                          {"recovery_rate", p.recovery_rate},
                          {"trials", p.trials}});
  }
  return Json{{"theorem", "masking"},
              {"coherence", r.coherence},
              {"coherence_limit", r.coherence_limit},
              {"coherence_margin", r.coherence_limit - r.coherence},
              {"incoherent", r.incoherent},
              {"points", points},
              {"gap_step_se", r.gap_step_se},
              {"recovery_step_se", r.recovery_step_se},
              {"checks",
               {{"gap_non_increasing", r.gap_non_increasing},
                {"recovery_non_decreasing", r.recovery_non_decreasing},
                {"ridge_dominates", r.ridge_dominates}}},
              {"warnings", r.warnings},
              {"passed", r.passed}};
}

void write_matrix_csv(const Matrix& M, std::ostream& out) {
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(M(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, comma - pos);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw ParseError("matrix csv: bad number '" + cell + "'");
      }
      row.push_back(v);
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("matrix csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix csv: no data");
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      M(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return M;
}

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  unsigned threads = 0;
  bool paper_scale = false;
  bool strict = false;
};

unsigned resolve_threads(unsigned flag) {
  return flag == 0 ? default_thread_count() : flag;
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic(14, '\0');
  in.read(magic.data(), 14);
  in.clear();
  in.seekg(0);
  if (magic == "MASKDL-DATASET") return read_dataset(in).model.A;
  return read_matrix_csv(in);
}

int cmd_gen(const CommonFlags& f) {
  ModelConfig cfg;
  if (!f.config.empty()) cfg = model_from_json(read_json_file(f.config));
  cfg.validate();
  const std::size_t n_holdout = cfg.n_holdout == 0 ? cfg.p : cfg.n_holdout;
  const std::uint64_t seed = f.seed.value_or(0);
  const Dataset ds = make_dataset(cfg, n_holdout, RngStream(seed));
  const auto dir = prepare_out_dir(f.out);
  save_dataset(ds, dir / "dataset.bin");
  Json meta{{"master_seed", seed}, {"model", to_json(cfg)}, {"n_holdout", n_holdout}};
  write_json(dir / "gen.json", meta);
  std::cout << "wrote " << (dir / "dataset.bin").string() << "\n";
  return kExitOk;
}

int cmd_train(const CommonFlags& f, const std::string& dataset_path) {
  TrainConfig cfg;
  if (!f.config.empty()) cfg = train_from_json(read_json_file(f.config));
  if (f.seed) cfg.seed = *f.seed;
  cfg.threads = resolve_threads(f.threads);
  const Dataset ds = load_dataset(dataset_path);
  const RunResult result = train(ds, cfg);
  const auto dir = prepare_out_dir(f.out);
  Json j = run_result_json(result);
  j["dataset"] = Json{{"path", dataset_path}, {"seed", ds.seed}, {"stream_id", ds.stream_id}};
  write_json(dir / "run.json", j);
  std::ostringstream hist;
  write_history_csv(result, hist);
  write_text(dir / "history.csv", hist.str());
  std::ostringstream dict;
  dict << "# maskdl dictionary\n";
  dict << "# master_seed: " << cfg.seed << "\n";
  dict << "# config: " << to_json(cfg).dump() << "\n";
  write_matrix_csv(result.final_dictionary, dict);
  write_text(dir / "dictionary.csv", dict.str());
  std::cout << "final d_r_cosine " << format_real(result.error_cosine.back())
            << ", d_r_euclidean " << format_real(result.error_euclidean.back()) << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonFlags& f, const std::string& preset_name, bool reproducible) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = experiment_from_json(read_json_file(f.config), f.paper_scale);
  } else {
    cfg = preset(preset_name, f.paper_scale);
    cfg.validate();
  }
  SweepOptions opts;
  opts.master_seed = f.seed.value_or(0);
  opts.threads = resolve_threads(f.threads);
  opts.reproducible = reproducible;
  opts.log = &std::cerr;
  const SweepResult result = run_sweep(cfg, opts);
  const auto dir = prepare_out_dir(f.out);
  std::ostringstream csv;
  write_sweep_csv(result, csv);
  write_text(dir / "sweep.csv", csv.str());
  write_json(dir / "aggregate.json", sweep_aggregate_json(result));
  std::cout << "wrote " << (dir / "sweep.csv").string() << " ("
            << result.rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_verify(const CommonFlags& f, const std::string& theorem) {
  const std::uint64_t seed = f.seed.value_or(0);
  const unsigned threads = resolve_threads(f.threads);
  const Json params = f.config.empty() ? Json::object() : read_json_file(f.config);
  RngStream root(seed);
  Json report;
  bool passed = false;
  if (theorem == "overfit") {
    const OverfitParams o = overfit_from_json(params);
    ModelConfig mc;
    mc.d = o.d;
    mc.p = o.p;
    mc.k = 1;
    mc.noise_var = o.noise_var;
    mc.sigma_z = o.sigma_z;
    mc.normalize_codes = o.normalize_codes;
    mc.dictionary = o.dictionary;
    RngStream a_rng = root.derive(1);
    const GroundTruthModel model = make_model(mc, a_rng);
    NetParams np;
    np.gamma1 = o.gamma1;
    np.gamma2 = o.gamma2;
    np.lambda_z = o.lambda_z;
    np.sigma = o.net_sigma;
    np.budget = o.budget;
    RngStream eval_rng = root.derive(2);
    const OverfitReport r = verify_theorem_overfit(model, np, o.n_eval, eval_rng, threads);
    report = overfit_report_json(r);
    report["params"] = to_json(o);
    passed = r.passed;
  } else if (theorem == "masking") {
    const MaskingParams m = masking_from_json(params);
    ModelConfig mc;
    mc.d = m.d;
    mc.p = m.p;
    mc.k = m.k;
    mc.noise_var = m.noise_var;
    mc.sigma_z = 1.0;
    mc.normalize_codes = false;
    mc.dictionary = m.dictionary;
    RngStream a_rng = root.derive(1);
    const GroundTruthModel model = make_model(mc, a_rng);
    if (m.mask_size < 1 || m.mask_size >= m.d || m.k > m.mask_size) {
      throw ConfigError("masking: need k <= mask_size < d");
    }
    RngStream mask_rng = root.derive(3);
    const Mask mask = Mask::random(mask_rng, m.d, m.mask_size);
    const double mu = mutual_coherence(select_rows(model.A, mask.observed()));
    const double limit = 1.0 / (2.0 * static_cast<double>(m.k) - 1.0);
    if (f.strict && !(mu < limit)) {
      report = Json{{"theorem", "masking"},
                    {"coherence", mu},
                    {"coherence_limit", limit},
                    {"precondition_error", "P_M A has coherence " + format_real(mu) +
                                               ", not below 1/(2k-1) = " +
                                               format_real(limit)},
                    {"passed", false}};
    } else {
      RngStream eval_rng = root.derive(2);
      const MaskingReport r = verify_theorem_masking(model, mask, m.sigma_z_grid, m.trials,
                                                     eval_rng, f.strict, threads);
      report = masking_report_json(r);
      passed = r.passed;
    }
    report["params"] = to_json(m);
    report["strict"] = f.strict;
  } else {
    throw ConfigError("unknown theorem '" + theorem + "' (expected overfit or masking)");
  }
  report["master_seed"] = seed;
  const auto dir = prepare_out_dir(f.out);
  const auto path = dir / ("verify_" + theorem + ".json");
  write_json(path, report);
  std::cout << theorem << ": " << (passed ? "PASS" : "FAIL") << " (" << path.string()
            << ")\n";
  return passed ? kExitOk : kExitVerifyFailed;
}

int cmd_metrics(const CommonFlags& f, const std::string& truth, const std::string& learned,
                std::size_t rip_s, double rip_budget) {
  const Matrix A = load_matrix(truth);
  const Matrix B = load_matrix(learned);
  const RecoveryReport r = recovery_error(A, B);
  Json report{{"truth", truth},
              {"learned", learned},
              {"d_r_cosine", r.d_r_cosine},
              {"d_r_euclidean", r.d_r_euclidean},
              {"coherence_truth", mutual_coherence(A)},
              {"coherence_learned", mutual_coherence(B)}};
  if (rip_s > 0) {
    RngStream rng(f.seed.value_or(0));
    const RipEstimate est = rip_delta(B, rip_s, RipMode::kSampled, rip_budget, rng);
    report["rip"] = Json{{"s", rip_s},
                         {"delta", est.delta},
                         {"is_lower_bound", est.is_lower_bound},
                         {"supports_evaluated", est.supports_evaluated},
                         {"worst_support", est.worst_support}};
  }
  report["master_seed"] = f.seed.value_or(0);
  const auto dir = prepare_out_dir(f.out);
  write_json(dir / "metrics.json", report);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

void add_common(CLI::App* app, CommonFlags& f, bool paper_scale, bool strict) {
  app->add_option("--config", f.config, "JSON config file");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--threads", f.threads,
                  "worker threads (default: MASKDL_THREADS or hardware concurrency)");
  if (paper_scale) app->add_flag("--paper-scale", f.paper_scale, "use paper-scale presets");
  if (strict) app->add_flag("--strict", f.strict, "treat precondition warnings as errors");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"maskdl: sparse dictionary learning with a masked objective"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  add_common(gen, flags, false, false);

  std::string dataset_path;
  auto* train_cmd = app.add_subcommand("train", "train one dictionary");
  add_common(train_cmd, flags, false, false);
  train_cmd->add_option("--dataset", dataset_path, "dataset file from 'gen'")->required();

  std::string preset_name = "scale_overrealization";
  bool reproducible = false;
  auto* sweep = app.add_subcommand("sweep", "run a multi-seed experiment sweep");
  add_common(sweep, flags, true, false);
  sweep->add_option("--preset", preset_name,
                    "scale_overrealization, scale_all, noise_sweep or custom");
  sweep->add_flag("--reproducible", reproducible, "write wall_time_s as 0");

  std::string theorem;
  auto* verify = app.add_subcommand("verify", "run a theory check");
  add_common(verify, flags, false, true);
  verify->add_option("theorem", theorem, "overfit or masking")->required();

  std::string truth, learned;
  std::size_t rip_s = 0;
  double rip_budget = 1000;
  auto* metrics = app.add_subcommand("metrics", "recovery error and dictionary statistics");
  add_common(metrics, flags, false, false);
  metrics->add_option("--truth", truth, "ground truth: dataset file or matrix CSV")
      ->required();
  metrics->add_option("--learned", learned, "learned dictionary matrix CSV")->required();
  metrics->add_option("--rip-s", rip_s, "sparsity level for the RIP estimate (0: skip)");
  metrics->add_option("--rip-budget", rip_budget, "number of supports for the RIP estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen(flags);
    if (train_cmd->parsed()) return cmd_train(flags, dataset_path);
    if (sweep->parsed()) return cmd_sweep(flags, preset_name, reproducible);
    if (verify->parsed()) return cmd_verify(flags, theorem);
    if (metrics->parsed()) return cmd_metrics(flags, truth, learned, rip_s, rip_budget);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace maskdl::cli
