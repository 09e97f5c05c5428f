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

#include "gt2fls/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gt2fls/error.hpp"
#include "gt2fls/inference.hpp"
#include "gt2fls/metrics.hpp"
#include "gt2fls/simd/kernels.hpp"

namespace gt2fls {
namespace {

// Keeps softplus outputs strictly positive once exp(r) underflows.
constexpr double kPositiveFloor = 1e-300;

double sigmoid(double r) {
  if (r >= 0.0) return 1.0 / (1.0 + std::exp(-r));
  const double e = std::exp(r);
  return e / (1.0 + e);
}

// d pinball(y - q; tau) / d q
double pinball_bound_derivative(double y, double bound, double tau) {
  return y - bound > 0.0 ? -tau : 1.0 - tau;
}

// Gradient accumulator in constrained coordinates.
struct ModelGradient {
  explicit ModelGradient(std::size_t rules, std::size_t inputs)
      : centers(rules * inputs, 0.0),
        sigma(rules * inputs, 0.0),
        sigma_l(inputs, 0.0),
        sigma_r(inputs, 0.0),
        slopes(rules * inputs, 0.0),
        intercepts(rules, 0.0) {}

  std::vector<double> centers, sigma, sigma_l, sigma_r, slopes, intercepts;
};

// Forward/backward state for one sample.
class SampleTape {
 public:
  SampleTape(const ModelParams& model, const TrainConfig& cfg)
      : model_(model),
        cfg_(cfg),
        evaluator_(model),
        planes_(cfg.point_output == PointOutput::kPlaneAggregate ? cfg.plane_levels()
                                                                 : std::vector<AlphaLevel>{}),
        plane_states_(planes_.size()),
        d_gamma_(model.rules() * model.inputs()),
        d_firing_lower_(model.rules()),
        d_firing_upper_(model.rules()),
        d_consequent_(model.rules()) {
    for (const AlphaLevel& a : planes_) plane_alpha_sum_ += a.value();
  }

  double forward(std::span<const double> x, double y) {
    y_ = y;
    evaluator_.set_input(x);
    evaluator_.evaluate(AlphaLevel(kAlpha0), base_);
    if (planes_.empty()) {
      point_ = alpha_plane_center(base_.km.trs);
    } else {
      double num = 0.0;
      for (std::size_t k = 0; k < planes_.size(); ++k) {
        evaluator_.evaluate(planes_[k], plane_states_[k]);
        num += alpha_plane_center(plane_states_[k].km.trs) * planes_[k].value();
      }
      point_ = num / plane_alpha_sum_;
    }
    return log_cosh_loss(y_ - point_) +
           pinball_pair_loss(y_, base_.km.trs.lo, base_.km.trs.hi, cfg_.tau_lo, cfg_.tau_hi);
  }

  double point() const { return point_; }
  const TypeReducedSet& alpha0_interval() const { return base_.km.trs; }

  // Accumulates weight * d loss / d theta (constrained coordinates).
  void backward(double weight, ModelGradient& g) {
    std::fill(d_gamma_.begin(), d_gamma_.end(), 0.0);
    std::fill(d_consequent_.begin(), d_consequent_.end(), 0.0);

    const double d_point = -std::tanh(y_ - point_) * weight;
    double d_lo = pinball_bound_derivative(y_, base_.km.trs.lo, cfg_.tau_lo) * weight;
    double d_hi = pinball_bound_derivative(y_, base_.km.trs.hi, cfg_.tau_hi) * weight;
    if (planes_.empty()) {
      d_lo += 0.5 * d_point;
      d_hi += 0.5 * d_point;
    } else {
      for (std::size_t k = 0; k < planes_.size(); ++k) {
        const double share = 0.5 * d_point * planes_[k].value() / plane_alpha_sum_;
        backward_plane(plane_states_[k], share, share, g);
      }
    }
    backward_plane(base_, d_lo, d_hi, g);

    const std::size_t rules = model_.rules();
    const std::size_t inputs = model_.inputs();
    const auto x = evaluator_.input();
    const auto gamma = evaluator_.gamma();
    for (std::size_t p = 0; p < rules; ++p) {
      g.intercepts[p] += d_consequent_[p];
      for (std::size_t m = 0; m < inputs; ++m) {
        const std::size_t i = p * inputs + m;
        g.slopes[i] += d_consequent_[p] * x[m];
        if (d_gamma_[i] == 0.0) continue;
        const double s = model_.sigma(p, m);
        const double z = (x[m] - model_.centers(p, m)) / s;
        g.centers[i] += d_gamma_[i] * gamma[i] * z / s;
        g.sigma[i] += d_gamma_[i] * gamma[i] * z * z / s;
      }
    }
  }

  void append_signature(std::vector<std::int64_t>& sig) const {
    sig.push_back(y_ - base_.km.trs.lo > 0.0);
    sig.push_back(y_ - base_.km.trs.hi > 0.0);
    append_plane_signature(base_, sig);
    for (const PlaneState& s : plane_states_) append_plane_signature(s, sig);
  }

 private:
  enum ClampState : std::int64_t { kFree = 0, kClamped = 1, kFloored = 2 };

  ClampState upper_state(const PlaneState& s, std::size_t i) const {
    const std::size_t m = i % model_.inputs();
    if (evaluator_.gamma()[i] + s.spread * model_.sigma_r[m] >= 1.0) return kClamped;
    return s.upper[i] > simd::kMembershipFloor ? kFree : kFloored;
  }

  ClampState lower_state(const PlaneState& s, std::size_t i) const {
    const std::size_t m = i % model_.inputs();
    if (evaluator_.gamma()[i] - s.spread * model_.sigma_l[m] <= 0.0) return kClamped;
    return s.lower[i] > simd::kMembershipFloor ? kFree : kFloored;
  }

  void append_plane_signature(const PlaneState& s, std::vector<std::int64_t>& sig) const {
    for (std::size_t idx : s.km.order) sig.push_back(static_cast<std::int64_t>(idx));
    sig.push_back(static_cast<std::int64_t>(s.km.left_switch));
    sig.push_back(static_cast<std::int64_t>(s.km.right_switch));
    for (std::size_t i = 0; i < s.upper.size(); ++i) {
      sig.push_back(upper_state(s, i));
      sig.push_back(lower_state(s, i));
    }
  }

  void backward_plane(const PlaneState& s, double d_lo, double d_hi, ModelGradient& g) {
    const std::size_t rules = model_.rules();
    const std::size_t inputs = model_.inputs();
    const auto y = evaluator_.consequents();
    const KmSolution& km = s.km;
    std::fill(d_firing_lower_.begin(), d_firing_lower_.end(), 0.0);
    std::fill(d_firing_upper_.begin(), d_firing_upper_.end(), 0.0);

    // lo = sum w y / sum w with the switch points held fixed.
    for (std::size_t i = 0; i < rules; ++i) {
      const std::size_t p = km.order[i];
      const bool use_upper = i < km.left_switch;
      const double w = use_upper ? s.firing_upper[p] : s.firing_lower[p];
      const double inv = 1.0 / km.lower_weight_sum;
      d_consequent_[p] += d_lo * w * inv;
      const double dw = d_lo * (y[p] - km.trs.lo) * inv;
      (use_upper ? d_firing_upper_ : d_firing_lower_)[p] += dw;
    }
    for (std::size_t i = 0; i < rules; ++i) {
      const std::size_t p = km.order[i];
      const bool use_lower = i < km.right_switch;
      const double w = use_lower ? s.firing_lower[p] : s.firing_upper[p];
      const double inv = 1.0 / km.upper_weight_sum;
      d_consequent_[p] += d_hi * w * inv;
      const double dw = d_hi * (y[p] - km.trs.hi) * inv;
      (use_lower ? d_firing_lower_ : d_firing_upper_)[p] += dw;
    }

    // f = exp(sum_m log mu_m - scale); the common scale cancels in KM.
    for (std::size_t p = 0; p < rules; ++p) {
      const double df_up = d_firing_upper_[p] * s.firing_upper[p];
      const double df_lo = d_firing_lower_[p] * s.firing_lower[p];
      for (std::size_t m = 0; m < inputs; ++m) {
        const std::size_t i = p * inputs + m;
        if (df_up != 0.0 && upper_state(s, i) == kFree) {
          const double d_mu = df_up / s.upper[i];
          d_gamma_[i] += d_mu;
          g.sigma_r[m] += d_mu * s.spread;
        }
        if (df_lo != 0.0 && lower_state(s, i) == kFree) {
          const double d_mu = df_lo / s.lower[i];
          d_gamma_[i] += d_mu;
          g.sigma_l[m] -= d_mu * s.spread;
        }
      }
    }
  }

  const ModelParams& model_;
  const TrainConfig& cfg_;
  RuleEvaluator evaluator_;
  std::vector<AlphaLevel> planes_;
  double plane_alpha_sum_ = 0.0;
  PlaneState base_;
  std::vector<PlaneState> plane_states_;
  double y_ = 0.0;
  double point_ = 0.0;
  std::vector<double> d_gamma_;
  std::vector<double> d_firing_lower_;
  std::vector<double> d_firing_upper_;
  std::vector<double> d_consequent_;
};

std::vector<std::size_t> resolve_batch(const Dataset& data, std::span<const std::size_t> batch) {
  if (!batch.empty()) return {batch.begin(), batch.end()};
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

[[noreturn]] void rethrow_with_sample(const Error& e, std::size_t index) {
  throw Error(e.code(), std::string(e.what()) + " (sample " + std::to_string(index) + ")");
}

double sample_loss(SampleTape& tape, const Dataset& data, std::size_t index) {
  try {
    return tape.forward(data.features.row(index), data.targets[index]);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateFiring) throw;
    rethrow_with_sample(e, index);
  }
}

void check_batch(const Dataset& data, std::span<const std::size_t> rows, const RawParams& raw) {
  if (rows.empty()) throw Error(ErrorCode::kEmptySet, "empty batch");
  if (raw.inputs() != data.dims()) {
    throw Error(ErrorCode::kInvalidInput, "parameter width does not match the dataset");
  }
  for (std::size_t r : rows) {
    if (r >= data.size()) throw Error(ErrorCode::kInvalidInput, "batch index out of range");
  }
}

double objective(const ModelParams& model, const Dataset& data,
                 std::span<const std::size_t> rows, const TrainConfig& cfg) {
  SampleTape tape(model, cfg);
  double sum = 0.0;
  for (std::size_t r : rows) sum += sample_loss(tape, data, r);
  return sum / static_cast<double>(rows.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (!(tau_lo > 0.0 && tau_lo < 0.5 && tau_hi > 0.5 && tau_hi < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "quantile levels must satisfy 0 < tau_lo < 0.5 < tau_hi < 1");
  }
  if (batch_size < 1) throw Error(ErrorCode::kInvalidConfig, "batch size must be >= 1");
  if (rules < 1) throw Error(ErrorCode::kInvalidConfig, "rule count must be >= 1");
  if (!(learning_rate > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(adam_epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid Adam hyperparameters");
  }
  if (planes.empty()) throw Error(ErrorCode::kInvalidConfig, "plane stack is empty");
  for (double a : planes) {
    if (!(a >= kAlpha0 && a <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "plane alpha outside [0.01, 1]");
    }
  }
}

std::vector<AlphaLevel> TrainConfig::plane_levels() const {
  std::vector<AlphaLevel> levels;
  levels.reserve(planes.size());
  for (double a : planes) levels.emplace_back(a);
  return levels;
}

QuantilePair quantiles_for_coverage(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "coverage must lie in (0, 1)");
  }
  return {(1.0 - phi) / 2.0, (1.0 + phi) / 2.0};
}

double softplus(double r) {
  const double v = r > 0.0 ? r + std::log1p(std::exp(-r)) : std::log1p(std::exp(r));
  return v + kPositiveFloor;
}

double inverse_softplus(double v) { return v + std::log(-std::expm1(-v)); }

RawParams::RawParams(std::size_t rules, std::size_t inputs)
    : rules_(rules), inputs_(inputs), values_(learnable_parameter_count(rules, inputs), 0.0) {}

RawParams RawParams::from_model(const ModelParams& model) {
  model.validate();
  RawParams raw(model.rules(), model.inputs());
  std::copy(model.centers.flat().begin(), model.centers.flat().end(), raw.centers().begin());
  std::transform(model.sigma.flat().begin(), model.sigma.flat().end(), raw.sigma().begin(),
                 inverse_softplus);
  std::transform(model.sigma_l.begin(), model.sigma_l.end(), raw.sigma_l().begin(),
                 inverse_softplus);
  std::transform(model.sigma_r.begin(), model.sigma_r.end(), raw.sigma_r().begin(),
                 inverse_softplus);
  std::copy(model.slopes.flat().begin(), model.slopes.flat().end(), raw.slopes().begin());
  std::copy(model.intercepts.begin(), model.intercepts.end(), raw.intercepts().begin());
  return raw;
}

ModelParams RawParams::constrain() const {
  const RawParams& self = *this;
  ModelParams model(rules_, inputs_);
  std::copy(self.centers().begin(), self.centers().end(), model.centers.flat().begin());
  std::transform(self.sigma().begin(), self.sigma().end(), model.sigma.flat().begin(), softplus);
  std::transform(self.sigma_l().begin(), self.sigma_l().end(), model.sigma_l.begin(), softplus);
  std::transform(self.sigma_r().begin(), self.sigma_r().end(), model.sigma_r.begin(), softplus);
  std::copy(self.slopes().begin(), self.slopes().end(), model.slopes.flat().begin());
  std::copy(self.intercepts().begin(), self.intercepts().end(), model.intercepts.begin());
  return model;
}

double log_cosh_loss(double eps) {
  const double a = std::fabs(eps);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double pinball_pair_loss(double y, double lo, double hi, double tau_lo, double tau_hi) {
  const double u_lo = y - lo;
  const double u_hi = y - hi;
  return std::max(tau_lo * u_lo, (tau_lo - 1.0) * u_lo) +
         std::max(tau_hi * u_hi, (tau_hi - 1.0) * u_hi);
}

double total_loss(const Dataset& data, std::span<const std::size_t> batch, const RawParams& raw,
                  const TrainConfig& cfg) {
  const std::vector<std::size_t> rows = resolve_batch(data, batch);
  check_batch(data, rows, raw);
  return objective(raw.constrain(), data, rows, cfg);
}

LossGradient loss_and_grad(const Dataset& data, std::span<const std::size_t> batch,
                           const RawParams& raw, const TrainConfig& cfg) {
  const std::vector<std::size_t> rows = resolve_batch(data, batch);
  check_batch(data, rows, raw);
  const ModelParams model = raw.constrain();
  const std::size_t rules = model.rules();
  const std::size_t inputs = model.inputs();

  SampleTape tape(model, cfg);
  ModelGradient g(rules, inputs);
  const double weight = 1.0 / static_cast<double>(rows.size());
  double sum = 0.0;
  for (std::size_t r : rows) {
    sum += sample_loss(tape, data, r);
    tape.backward(weight, g);
  }

  LossGradient out{sum * weight, RawParams(rules, inputs)};
  RawParams& d = out.gradient;
  const RawParams& r = raw;
  std::copy(g.centers.begin(), g.centers.end(), d.centers().begin());
  std::copy(g.slopes.begin(), g.slopes.end(), d.slopes().begin());
  std::copy(g.intercepts.begin(), g.intercepts.end(), d.intercepts().begin());
  auto chain = [](std::span<const double> dv, std::span<const double> rv, std::span<double> dst) {
    for (std::size_t i = 0; i < dv.size(); ++i) dst[i] = dv[i] * sigmoid(rv[i]);
  };
  chain(g.sigma, r.sigma(), d.sigma());
  chain(g.sigma_l, r.sigma_l(), d.sigma_l());
  chain(g.sigma_r, r.sigma_r(), d.sigma_r());
  return out;
}

RawParams grad(const Dataset& data, std::span<const std::size_t> batch, const RawParams& raw,
               const TrainConfig& cfg) {
  return loss_and_grad(data, batch, raw, cfg).gradient;
}

std::vector<std::int64_t> piecewise_signature(const Dataset& data,
                                              std::span<const std::size_t> batch,
                                              const RawParams& raw, const TrainConfig& cfg) {
  const std::vector<std::size_t> rows = resolve_batch(data, batch);
  check_batch(data, rows, raw);
  const ModelParams model = raw.constrain();
  SampleTape tape(model, cfg);
  std::vector<std::int64_t> sig;
  for (std::size_t r : rows) {
    sample_loss(tape, data, r);
    tape.append_signature(sig);
  }
  return sig;
}

void adam_step(RawParams& raw, const RawParams& gradient, AdamState& state,
               const AdamOptions& options) {
  const std::size_t n = raw.size();
  if (gradient.size() != n || state.m.size() != n || state.v.size() != n) {
    throw Error(ErrorCode::kInvalidInput, "Adam state does not match the parameter count");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  auto theta = raw.flat();
  const auto g = gradient.flat();
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = options.beta1 * state.m[i] + (1.0 - options.beta1) * g[i];
    state.v[i] = options.beta2 * state.v[i] + (1.0 - options.beta2) * g[i] * g[i];
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    theta[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
  }
}

EpochLog evaluate_objective(const ModelParams& model, const Dataset& data,
                            const TrainConfig& cfg) {
  if (data.size() == 0) throw Error(ErrorCode::kEmptySet, "empty dataset");
  SampleTape tape(model, cfg);
  const std::size_t n = data.size();
  std::vector<double> lo(n), hi(n), point(n);
  double sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sum += sample_loss(tape, data, r);
    lo[r] = tape.alpha0_interval().lo;
    hi[r] = tape.alpha0_interval().hi;
    point[r] = tape.point();
  }
  EpochLog log;
  log.loss = sum / static_cast<double>(n);
  log.picp_alpha0 = picp(data.targets, lo, hi);
  log.rmse = rmse(data.targets, point);
  return log;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t n = data.size();
  const std::size_t rules = cfg.rules;
  if (n < rules) {
    throw Error(ErrorCode::kInvalidConfig, "need at least as many samples as rules");
  }
  std::mt19937_64 rng(cfg.seed);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  ModelParams init(rules, data.dims());
  for (std::size_t p = 0; p < rules; ++p) {
    const auto x = data.features.row(order[p]);
    std::copy(x.begin(), x.end(), init.centers.row(p).begin());
    init.intercepts[p] = data.targets[order[p]];
  }

  RawParams raw = RawParams::from_model(init);
  AdamState state(raw.size());
  const AdamOptions adam{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_epsilon};

  TrainResult result;
  result.best_loss = std::numeric_limits<double>::infinity();
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      const LossGradient lg =
          loss_and_grad(data, std::span(order).subspan(start, len), raw, cfg);
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorCode::kDivergence,
                    "non-finite minibatch loss in epoch " + std::to_string(epoch));
      }
      adam_step(raw, lg.gradient, state, adam);
    }

    ModelParams model = raw.constrain();
    EpochLog log = evaluate_objective(model, data, cfg);
    log.epoch = epoch;
    if (!std::isfinite(log.loss)) {
      throw Error(ErrorCode::kDivergence, "non-finite training loss in epoch " + std::to_string(epoch));
    }
    result.log.push_back(log);
    if (log.loss < result.best_loss) {
      result.best_loss = log.loss;
      result.best_epoch = epoch;
      result.params = std::move(model);
    }
  }
  if (cfg.epochs == 0) {
    result.params = raw.constrain();
    result.best_loss = evaluate_objective(result.params, data, cfg).loss;
  }
  return result;
}

void write_training_log(std::span<const EpochLog> log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.precision(17);
  out << "epoch,loss,picp_alpha0,rmse\n";
  for (const EpochLog& e : log) {
    out << e.epoch << ',' << e.loss << ',' << e.picp_alpha0 << ',' << e.rmse << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace gt2fls
