// Copyright 2026 The gt2fls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "gt2fls/calibration.hpp"
#include "gt2fls/config.hpp"
#include "gt2fls/dataset.hpp"
#include "gt2fls/error.hpp"
#include "gt2fls/model_io.hpp"
#include "gt2fls/pipeline.hpp"
#include "gt2fls/report.hpp"
#include "gt2fls/training.hpp"
#include "json.hpp"

namespace gt2fls::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
};

// Training flags are kept as text and routed through apply_train_option so
// the config file and the command line share one parser.
struct TrainFlags {
  std::vector<std::pair<std::string, std::optional<std::string>>> values = {
      {"epochs", {}}, {"batch_size", {}}, {"learning_rate", {}}, {"rules", {}},
      {"planes", {}}, {"point_output", {}}, {"beta1", {}}, {"beta2", {}},
      {"adam_epsilon", {}}, {"tau_lo", {}}, {"tau_hi", {}},
  };

  void attach(CLI::App& app) {
    for (auto& [key, value] : values) {
      std::string flag = "--" + key;
      std::replace(flag.begin() + 2, flag.end(), '_', '-');
      app.add_option(flag, value, "training setting '" + key + "'");
    }
  }
};

TrainConfig resolve_train_config(const GlobalOptions& g, const TrainFlags& flags,
                                 std::optional<double> phi) {
  TrainConfig cfg;
  if (g.config) {
    for (const auto& [key, value] : read_key_value_file(*g.config)) {
      apply_train_option(cfg, key, value);
    }
  }
  if (phi) {
    const QuantilePair tau = quantiles_for_coverage(*phi);
    cfg.tau_lo = tau.lo;
    cfg.tau_hi = tau.hi;
  }
  for (const auto& [key, value] : flags.values) {
    if (value) apply_train_option(cfg, key, *value);
  }
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

struct LoadedData {
  Dataset raw;
  Dataset normalized;
  std::optional<DatasetSplit> split;
};

LoadedData load_for_model(const ModelBundle& bundle, const fs::path& data_path,
                          const std::string& target, std::ostream& err) {
  const CsvLoadResult csv = load_csv(data_path, target.empty() ? bundle.target_name : target);
  if (csv.dropped_rows > 0) err << "dropped " << csv.dropped_rows << " unusable row(s)\n";
  if (csv.data.dims() != bundle.params.inputs()) {
    throw Error(ErrorCode::kInvalidInput, "dataset has " + std::to_string(csv.data.dims()) +
                                              " features, model expects " +
                                              std::to_string(bundle.params.inputs()));
  }
  LoadedData out{csv.data, zscore_apply(bundle.normalization, csv.data), std::nullopt};
  if (bundle.split_info) {
    out.split = split(csv.data.size(), bundle.split_info->scheme, bundle.split_info->seed);
  }
  return out;
}

Dataset select_rows(const LoadedData& data, const std::string& subset_name) {
  if (subset_name == "all") return data.normalized;
  if (!data.split) return data.normalized;
  if (subset_name == "train") return subset(data.normalized, data.split->train);
  if (subset_name == "calib") {
    if (data.split->calib.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "model was trained without a calibration split");
    }
    return subset(data.normalized, data.split->calib);
  }
  if (subset_name == "test") return subset(data.normalized, data.split->test);
  throw Error(ErrorCode::kInvalidConfig, "unknown subset '" + subset_name + "'");
}

const std::vector<std::string> kSubsets = {"train", "calib", "test", "all"};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Alpha-plane calibrated general type-2 fuzzy logic regression", "gt2fls"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "seed for splitting and training");
  app.add_option("--config", g.config, "key=value file of training settings (flags override)")
      ->check(CLI::ExistingFile);

  // train
  CLI::App* train_cmd = app.add_subcommand("train", "train a model on a CSV dataset");
  std::string train_data, train_target, train_out, train_split = "calibrated";
  std::optional<std::string> train_log;
  std::optional<double> train_phi;
  TrainFlags train_flags;
  train_cmd->add_option("--data", train_data, "CSV dataset")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--target", train_target, "target column name or index (default: last)");
  train_cmd->add_option("--out", train_out, "model JSON output")->required();
  train_cmd->add_option("--phi", train_phi, "coverage; sets tau to [(1-phi)/2, (1+phi)/2]")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--split", train_split, "row split: calibrated (70/15/15), direct (85/15), none")
      ->check(CLI::IsMember({"calibrated", "direct", "none"}));
  train_cmd->add_option("--log", train_log, "per-epoch CSV log");
  train_flags.attach(*train_cmd);

  // calibrate
  CLI::App* cal_cmd = app.add_subcommand("calibrate", "choose the alpha-plane for a target coverage");
  std::string cal_model, cal_data, cal_target, cal_method = "search", cal_subset = "calib";
  double cal_phi = 0.9;
  double cal_lookup_delta = 0.01;
  std::optional<double> cal_delta, cal_gamma, cal_eps, cal_alpha_init;
  std::optional<std::size_t> cal_iters;
  std::optional<std::string> cal_curve, cal_record;
  cal_cmd->add_option("--model", cal_model, "model JSON")->required()->check(CLI::ExistingFile);
  cal_cmd->add_option("--data", cal_data, "CSV dataset")->required()->check(CLI::ExistingFile);
  cal_cmd->add_option("--target", cal_target, "target column (default: the model's)");
  cal_cmd->add_option("--phi-d", cal_phi, "desired coverage, below 0.99")->required();
  cal_cmd->add_option("--method", cal_method, "search or lookup")
      ->check(CLI::IsMember({"search", "lookup"}));
  cal_cmd->add_option("--delta", cal_delta, "initial search step, or lookup grid step");
  cal_cmd->add_option("--gamma", cal_gamma, "search step shrink factor");
  cal_cmd->add_option("--epsilon", cal_eps, "search tolerance (default max(0.005, 1/Q))");
  cal_cmd->add_option("--alpha-init", cal_alpha_init, "search starting alpha");
  cal_cmd->add_option("--max-iters", cal_iters, "search iteration cap");
  cal_cmd->add_option("--subset", cal_subset, "rows to calibrate on")->check(CLI::IsMember(kSubsets));
  cal_cmd->add_option("--curve", cal_curve, "also write the sampled coverage curve CSV");
  cal_cmd->add_option("--record", cal_record, "write the calibration record as JSON");

  // evaluate
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "interval and point metrics at one alpha");
  std::string eval_model, eval_data, eval_target, eval_subset = "test";
  double eval_alpha = kAlpha0;
  eval_cmd->add_option("--model", eval_model, "model JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval_data, "CSV dataset")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--target", eval_target, "target column (default: the model's)");
  eval_cmd->add_option("--alpha", eval_alpha, "alpha-plane for the interval");
  eval_cmd->add_option("--subset", eval_subset, "rows to score")->check(CLI::IsMember(kSubsets));

  // report
  CLI::App* rep_cmd = app.add_subcommand("report", "run an experiment spec and print the table");
  std::string rep_spec;
  std::optional<std::string> rep_csv;
  rep_cmd->add_option("spec", rep_spec, "experiment spec JSON")->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--csv", rep_csv, "per-seed CSV output (overrides the spec)");

  // curve
  CLI::App* curve_cmd = app.add_subcommand("curve", "export the alpha-to-coverage curve");
  std::string curve_model, curve_data, curve_target, curve_subset = "calib";
  double curve_delta = 0.1;
  std::optional<std::string> curve_out;
  curve_cmd->add_option("--model", curve_model, "model JSON")->required()->check(CLI::ExistingFile);
  curve_cmd->add_option("--data", curve_data, "CSV dataset")->required()->check(CLI::ExistingFile);
  curve_cmd->add_option("--target", curve_target, "target column (default: the model's)");
  curve_cmd->add_option("--delta", curve_delta, "alpha grid step");
  curve_cmd->add_option("--subset", curve_subset, "rows to measure")->check(CLI::IsMember(kSubsets));
  curve_cmd->add_option("--out", curve_out, "CSV path (default: stdout)");

  // synth
  CLI::App* synth_cmd = app.add_subcommand("synth", "write the heteroscedastic synthetic dataset");
  std::size_t synth_rows = 4000;
  std::string synth_out;
  synth_cmd->add_option("--rows", synth_rows, "number of rows");
  synth_cmd->add_option("--out", synth_out, "CSV path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) {
      const TrainConfig cfg = resolve_train_config(g, train_flags, train_phi);
      const CsvLoadResult csv = load_csv(train_data, train_target);
      if (csv.dropped_rows > 0) err << "dropped " << csv.dropped_rows << " unusable row(s)\n";
      const std::uint64_t split_seed = g.seed.value_or(cfg.seed);
      std::optional<DatasetSplit> s;
      std::vector<std::size_t> rows;
      if (train_split != "none") {
        s = split(csv.data.size(), parse_split_scheme(train_split), split_seed);
        rows = s->train;
      }
      ModelBundle bundle;
      bundle.normalization = zscore_fit(csv.data, rows);
      const Dataset normalized = zscore_apply(bundle.normalization, csv.data);
      const Dataset train_rows = rows.empty() ? normalized : subset(normalized, rows);
      const TrainResult result = train(train_rows, cfg);
      bundle.params = result.params;
      bundle.train_config = cfg;
      bundle.feature_names = csv.data.feature_names;
      bundle.target_name = csv.data.target_name;
      bundle.split_info = s;
      save_model(bundle, train_out);
      if (train_log) write_training_log(result.log, *train_log);
      const EpochLog best = result.best_epoch > 0 ? result.log.at(result.best_epoch - 1)
                                                  : evaluate_objective(result.params, train_rows, cfg);
      out << "model=" << train_out << "\nrows=" << train_rows.size()
          << "\nbest_epoch=" << result.best_epoch << "\nloss=" << best.loss
          << "\npicp_alpha0=" << best.picp_alpha0 << "\nrmse=" << best.rmse << '\n';
      return kExitOk;
    }

    if (*cal_cmd) {
      const ModelBundle bundle = load_model(cal_model);
      const LoadedData data = load_for_model(bundle, cal_data, cal_target, err);
      const Dataset calib = select_rows(data, cal_subset);
      const CoverageCurve curve(bundle.params, calib);
      const CoverageOracle oracle = [&](double a) { return curve(a); };
      CalibrationRecord rec;
      rec.method = parse_calibration_method(cal_method);
      rec.phi_d = cal_phi;
      if (!(cal_phi < kEnvelopeCoverage)) {
        throw Error(ErrorCode::kPrecondition, "phi_d must be below 0.99");
      }
      if (rec.method == CalibrationMethod::kSearch) {
        SearchConfig sc = SearchConfig::defaults_for(cal_phi, curve.size());
        if (cal_delta) sc.delta = *cal_delta;
        if (cal_gamma) sc.gamma = *cal_gamma;
        if (cal_eps) sc.epsilon = *cal_eps;
        if (cal_alpha_init) sc.alpha_init = *cal_alpha_init;
        if (cal_iters) sc.max_iters = *cal_iters;
        const SearchResult r = calibrate_search(oracle, sc);
        rec.alpha_star = r.alpha;
        rec.phi_achieved = r.phi;
        rec.iterations = r.iterations;
        rec.converged = r.converged;
      } else {
        const CalibrationTable table = build_lookup_table(oracle, cal_delta.value_or(cal_lookup_delta));
        const LookupResult l = lookup_alpha(table, cal_phi);
        if (l.out_of_range) err << "warning: phi_d outside the sampled coverage range, clamped\n";
        rec.alpha_star = l.alpha;
        rec.phi_achieved = curve(l.alpha);
        rec.iterations = table.entries.size();
        rec.converged = !l.out_of_range;
      }
      if (cal_curve) {
        export_calibration_curve(build_lookup_table(oracle, cal_delta.value_or(cal_lookup_delta)),
                                 *cal_curve);
      }
      out.precision(17);
      out << "method=" << to_string(rec.method) << "\nphi_d=" << rec.phi_d
          << "\nalpha_star=" << rec.alpha_star << "\nphi_achieved=" << rec.phi_achieved
          << "\niterations=" << rec.iterations << "\nconverged=" << (rec.converged ? "true" : "false")
          << "\ncalib_rows=" << curve.size() << '\n';
      if (cal_record) {
        nlohmann::json j = {{"method", to_string(rec.method)}, {"phi_d", rec.phi_d},
                            {"alpha_star", rec.alpha_star},    {"phi_achieved", rec.phi_achieved},
                            {"iterations", rec.iterations},    {"converged", rec.converged}};
        std::ofstream f(*cal_record);
        if (!f) throw Error(ErrorCode::kIo, "cannot write " + *cal_record);
        f << j.dump(2) << '\n';
      }
      return kExitOk;
    }

    if (*eval_cmd) {
      const ModelBundle bundle = load_model(eval_model);
      const LoadedData data = load_for_model(bundle, eval_data, eval_target, err);
      const Dataset rows = select_rows(data, eval_subset);
      const std::vector<AlphaLevel> planes = bundle.train_config.plane_levels();
      const IntervalMetrics m = evaluate_model(bundle.params, rows, AlphaLevel(eval_alpha), planes);
      out.precision(17);
      out << "alpha=" << eval_alpha << "\nrows=" << rows.size() << "\npicp=" << m.picp
          << "\npinaw=" << m.pinaw << "\nrmse=" << m.rmse << '\n';
      return kExitOk;
    }

    if (*rep_cmd) {
      ExperimentSpec spec = load_experiment_spec(rep_spec);
      if (g.seed) spec.config.seeds = {*g.seed};
      if (g.config) {
        for (const auto& [key, value] : read_key_value_file(*g.config)) {
          apply_train_option(spec.config.train, key, value);
        }
      }
      const Dataset raw = load_spec_dataset(spec);
      const ExperimentReport report = run_pipeline(raw, spec.config);
      out << format_report_table(report);
      const std::optional<fs::path> csv =
          rep_csv ? std::optional<fs::path>(*rep_csv) : spec.output_csv;
      if (csv) write_report_csv(report, *csv);
      return kExitOk;
    }

    if (*curve_cmd) {
      const ModelBundle bundle = load_model(curve_model);
      const LoadedData data = load_for_model(bundle, curve_data, curve_target, err);
      const CalibrationTable table =
          build_lookup_table(bundle.params, select_rows(data, curve_subset), curve_delta);
      if (curve_out) {
        export_calibration_curve(table, *curve_out);
      } else {
        out.precision(17);
        out << "alpha,phi\n";
        for (const CalibrationEntry& e : table.entries) out << e.alpha << ',' << e.phi << '\n';
      }
      return kExitOk;
    }

    if (*synth_cmd) {
      const Dataset d = make_heteroscedastic_dataset(synth_rows, g.seed.value_or(1));
      std::ofstream f(synth_out);
      if (!f) throw Error(ErrorCode::kIo, "cannot write " + synth_out);
      f.precision(17);
      f << "x,y\n";
      for (std::size_t i = 0; i < d.size(); ++i) f << d.features(i, 0) << ',' << d.targets[i] << '\n';
      out << "rows=" << d.size() << "\nout=" << synth_out << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::kInvalidConfig || e.code() == ErrorCode::kPrecondition;
    return usage ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace gt2fls::cli
