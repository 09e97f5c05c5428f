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

#include "gt2fls/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gt2fls/error.hpp"
#include "gt2fls/metrics.hpp"

namespace gt2fls {

CoverageCurve::CoverageCurve(const ModelParams& model, const Dataset& calib)
    : targets_(calib.targets), predictor_(model, calib.features) {
  if (targets_.empty()) throw Error(ErrorCode::kEmptySet, "empty calibration set");
}

double CoverageCurve::operator()(double alpha) const {
  std::vector<double> lo(targets_.size()), hi(targets_.size());
  predictor_.intervals(AlphaLevel(alpha), lo, hi);
  return picp(targets_, lo, hi);
}

double coverage_at_alpha(const ModelParams& model, const Dataset& calib, AlphaLevel alpha) {
  return CoverageCurve(model, calib)(alpha.value());
}

void CalibrationTable::validate() const {
  if (entries.size() < 2) throw Error(ErrorCode::kInvalidConfig, "table needs two entries");
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (!(entries[k].alpha > entries[k - 1].alpha)) {
      throw Error(ErrorCode::kInvalidConfig, "table alphas must be strictly increasing");
    }
    if (entries[k].phi > entries[k - 1].phi) {
      throw Error(ErrorCode::kInvalidConfig, "table coverage must be non-increasing in alpha");
    }
  }
}

std::vector<double> alpha_grid(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "quantization step must lie in (0, 1)");
  }
  std::vector<double> grid{kAlpha0};
  // Snap k * delta to 12 decimals so 0.1 * 3 is stored as 0.3.
  for (std::size_t k = 1;; ++k) {
    const double a = std::round(static_cast<double>(k) * delta * 1e12) / 1e12;
    if (a > 1.0) break;
    grid.push_back(a);
  }
  grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  grid.erase(std::remove_if(grid.begin(), grid.end(), [](double a) { return a < kAlpha0; }),
             grid.end());
  if (grid.size() < 2) throw Error(ErrorCode::kInvalidConfig, "alpha grid has fewer than 2 points");
  return grid;
}

void isotonic_non_increasing(std::vector<double>& values) {
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1) {
      const Block& last = blocks.back();
      const Block& prev = blocks[blocks.size() - 2];
      if (prev.sum / static_cast<double>(prev.count) >= last.sum / static_cast<double>(last.count)) {
        break;
      }
      const Block merged{prev.sum + last.sum, prev.count + last.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::size_t i = 0;
  for (const Block& b : blocks) {
    const double mean = b.count == 1 ? b.sum : b.sum / static_cast<double>(b.count);
    for (std::size_t j = 0; j < b.count; ++j) values[i++] = mean;
  }
}

CalibrationTable build_lookup_table(const CoverageOracle& coverage, double delta) {
  const std::vector<double> grid = alpha_grid(delta);
  std::vector<double> phi(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) phi[k] = coverage(grid[k]);
  isotonic_non_increasing(phi);
  CalibrationTable table;
  for (std::size_t k = 0; k < grid.size(); ++k) table.entries.push_back({grid[k], phi[k]});
  return table;
}

CalibrationTable build_lookup_table(const ModelParams& model, const Dataset& calib, double delta) {
  const CoverageCurve curve(model, calib);
  return build_lookup_table([&](double a) { return curve(a); }, delta);
}

LookupResult lookup_alpha(const CalibrationTable& table, double phi_d) {
  table.validate();
  const auto& e = table.entries;
  if (e.front().phi == e.back().phi) {
    throw Error(ErrorCode::kFlatCurve, "coverage is constant over alpha; cannot invert");
  }
  if (phi_d > e.front().phi) return {e.front().alpha, true};
  if (phi_d < e.back().phi) return {e.back().alpha, true};
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    if (phi_d == e[k].phi) return {e[k].alpha, false};
    if (phi_d > e[k + 1].phi) {
      const double t = (e[k].phi - phi_d) / (e[k].phi - e[k + 1].phi);
      return {e[k].alpha + t * (e[k + 1].alpha - e[k].alpha), false};
    }
  }
  return {e.back().alpha, false};
}

void SearchConfig::validate() const {
  if (!(phi_d > 0.0 && phi_d < 0.99)) {
    throw Error(ErrorCode::kInvalidConfig, "target coverage must lie in (0, 0.99)");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::kInvalidConfig, "gamma must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidConfig, "epsilon must be > 0");
  if (!(alpha_init >= kAlpha0 && alpha_init <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha_init must lie in [0.01, 1]");
  }
  if (!(delta > 0.0)) throw Error(ErrorCode::kInvalidConfig, "delta must be > 0");
  if (!(delta_floor > 0.0)) throw Error(ErrorCode::kInvalidConfig, "delta_floor must be > 0");
}

SearchConfig SearchConfig::defaults_for(double phi_d, std::size_t calib_size) {
  SearchConfig cfg;
  cfg.phi_d = phi_d;
  if (calib_size > 0) cfg.epsilon = std::max(0.005, 1.0 / static_cast<double>(calib_size));
  return cfg;
}

SearchResult calibrate_search(const CoverageOracle& coverage, const SearchConfig& cfg) {
  cfg.validate();
  SearchResult r;
  r.alpha = cfg.alpha_init;
  r.phi = coverage(r.alpha);
  double objective = std::fabs(r.phi - cfg.phi_d);
  r.objective_trace.push_back(objective);

  double delta = cfg.delta;
  while (objective >= cfg.epsilon) {
    if (r.iterations >= cfg.max_iters || delta < cfg.delta_floor) break;
    ++r.iterations;
    const double a_plus = std::min(r.alpha + delta, 1.0);
    const double a_minus = std::max(r.alpha - delta, kAlpha0);
    const double phi_plus = coverage(a_plus);
    const double phi_minus = coverage(a_minus);
    const double o_plus = std::fabs(phi_plus - cfg.phi_d);
    const double o_minus = std::fabs(phi_minus - cfg.phi_d);
    const bool plus_better = o_plus < objective;
    const bool minus_better = o_minus < objective;
    if (plus_better && (!minus_better || o_plus <= o_minus)) {
      r.alpha = a_plus;
      r.phi = phi_plus;
      objective = o_plus;
    } else if (minus_better) {
      r.alpha = a_minus;
      r.phi = phi_minus;
      objective = o_minus;
    } else {
      delta *= cfg.gamma;
    }
    r.objective_trace.push_back(objective);
  }
  r.converged = objective < cfg.epsilon;
  return r;
}

SearchResult calibrate_search(const ModelParams& model, const Dataset& calib,
                              const SearchConfig& cfg) {
  const CoverageCurve curve(model, calib);
  return calibrate_search([&](double a) { return curve(a); }, cfg);
}

void export_calibration_curve(const CalibrationTable& table, const std::filesystem::path& path) {
  table.validate();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.precision(17);
  out << "alpha,phi\n";
  for (const CalibrationEntry& e : table.entries) out << e.alpha << ',' << e.phi << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

CalibrationTable read_calibration_curve(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("alpha,phi", 0) != 0) {
    throw Error(ErrorCode::kParse, path.string() + " is missing the alpha,phi header");
  }
  CalibrationTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    CalibrationEntry e;
    char comma = 0;
    if (!(row >> e.alpha >> comma >> e.phi) || comma != ',') {
      throw Error(ErrorCode::kParse, "malformed curve row: " + line);
    }
    table.entries.push_back(e);
  }
  table.validate();
  return table;
}

std::string to_string(CalibrationMethod method) {
  return method == CalibrationMethod::kSearch ? "search" : "lookup";
}

CalibrationMethod parse_calibration_method(const std::string& text) {
  if (text == "search") return CalibrationMethod::kSearch;
  if (text == "lookup") return CalibrationMethod::kLookup;
  throw Error(ErrorCode::kInvalidConfig, "unknown calibration method '" + text + "'");
}

}  // namespace gt2fls
