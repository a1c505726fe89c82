#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttl/csv.hpp"
#include "ttl/errors.hpp"
#include "ttl/integrator.hpp"
#include "ttl/rnn.hpp"
#include "ttl/vehicle.hpp"

namespace ttl {

// ---------------------------------------------------------------------------
// Excitation and data collection

struct ExcitationConfig {
  std::uint64_t seed = 1;
  std::size_t n_samples = 5000;
  double dt = 0.01;
  double input_min = 0.0;
  double input_max = 15.0;
  double hold_min = 0.2;
  double hold_max = 1.0;
  Channel channel = Channel::U;

  /// Defaults for a channel: T in [0, 15] N for U, eps in [-1, 1] for W.
  static ExcitationConfig for_channel(Channel c) {
    ExcitationConfig cfg;
    cfg.channel = c;
    if (c == Channel::W) {
      cfg.input_min = -1.0;
      cfg.input_max = 1.0;
    }
    return cfg;
  }

  void validate() const {
    if (n_samples == 0) throw ConfigError("excitation: n_samples must be > 0");
    if (!(dt > 0.0)) throw ConfigError("excitation: dt must be > 0");
    if (!(input_min < input_max)) throw ConfigError("excitation: input_min must be < input_max");
    if (!(hold_min > 0.0) || !(hold_min <= hold_max))
      throw ConfigError("excitation: need 0 < hold_min <= hold_max");
    if (channel == Channel::W && (input_min < -1.0 || input_max > 1.0))
      throw ConfigError("excitation: eps bounds must lie within [-1, 1]");
  }
};

struct Signal {
  std::vector<double> t;
  std::vector<double> value;
};

/// Piecewise-constant random input: each level ~ U[input_min, input_max],
/// held for a duration ~ U[hold_min, hold_max] (at least one sample).
inline Signal generate_excitation(const ExcitationConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> level(cfg.input_min, cfg.input_max);
  std::uniform_real_distribution<double> hold(cfg.hold_min, cfg.hold_max);

  Signal s;
  s.t.reserve(cfg.n_samples);
  s.value.reserve(cfg.n_samples);
  while (s.value.size() < cfg.n_samples) {
    const double v = level(rng);
    const auto span = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hold(rng) / cfg.dt)));
    for (std::size_t i = 0; i < span && s.value.size() < cfg.n_samples; ++i) {
      s.t.push_back(static_cast<double>(s.value.size()) * cfg.dt);
      s.value.push_back(v);
    }
  }
  return s;
}

struct Sample {
  double t = 0.0;
  double input = 0.0;
  double output = 0.0;
};

/// (input, velocity) pairs; `output[k]` is the velocity at `t[k]` before
/// `input[k]` is applied over [t[k], t[k+1]).
struct Dataset {
  Channel channel = Channel::U;
  double dt = 0.01;
  /// Gravity projection cos(theta) held during U-channel collection.
  double eps_hold = 0.0;
  std::vector<Sample> records;

  std::vector<double> inputs() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.input);
    return v;
  }
  std::vector<double> outputs() const {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.output);
    return v;
  }
};

/// Open-loop velocity derivative of one channel. U: w = q = 0 and
/// cos(theta) = eps_hold; W: u = q = 0.
inline double channel_plant_rate(Channel c, double velocity, double input, double eps_hold,
                                 const VehicleParams& vp) {
  if (c == Channel::U)
    return h1({velocity, 0.0}, 0.0, vp) - vp.gravity * std::sqrt(1.0 - eps_hold * eps_hold) +
           input / vp.mass;
  return h2({0.0, velocity}, 0.0, vp) + vp.gravity * input;
}

/// Drives the channel plant from rest with the excitation signal (RK4 at cfg.dt).
inline Dataset collect_dataset(const ExcitationConfig& cfg, const VehicleParams& vp,
                               double eps_hold = 0.0) {
  vp.validate();
  const Signal sig = generate_excitation(cfg);
  Dataset d;
  d.channel = cfg.channel;
  d.dt = cfg.dt;
  d.eps_hold = eps_hold;
  d.records.reserve(sig.value.size());
  double v = 0.0;
  for (std::size_t k = 0; k < sig.value.size(); ++k) {
    d.records.push_back({sig.t[k], sig.value[k], v});
    const double in = sig.value[k];
    try {
      v = rk4_step(
          [&](double, double x) { return channel_plant_rate(cfg.channel, x, in, eps_hold, vp); },
          v, sig.t[k], cfg.dt);
    } catch (const DivergenceError&) {
      throw DivergenceError("data collection diverged", sig.t[k]);
    }
  }
  return d;
}

inline std::string dataset_to_csv(const Dataset& d) {
  std::ostringstream out;
  out << "t,input,output\n";
  for (const auto& r : d.records)
    out << csv::g17(r.t) << ',' << csv::g17(r.input) << ',' << csv::g17(r.output) << '\n';
  return out.str();
}

inline Dataset dataset_from_csv(const std::string& text, Channel channel) {
  const auto rows = csv::lines(text);
  if (rows.empty() || rows[0] != "t,input,output")
    throw ConfigError("dataset: missing header 't,input,output'");
  Dataset d;
  d.channel = channel;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = csv::split(rows[i]);
    if (f.size() != 3) throw ConfigError("dataset: expected 3 fields in '" + rows[i] + "'");
    d.records.push_back({csv::parse_double(f[0]), csv::parse_double(f[1]), csv::parse_double(f[2])});
  }
  if (d.records.size() < 2) throw ConfigError("dataset: need at least two samples");
  for (std::size_t i = 1; i < d.records.size(); ++i)
    if (!(d.records[i].t > d.records[i - 1].t)) throw ConfigError("dataset: t not increasing");
  d.dt = d.records[1].t - d.records[0].t;
  return d;
}

// ---------------------------------------------------------------------------
// Loss

inline double mse(std::span<const double> real, std::span<const double> predicted) {
  if (real.size() != predicted.size()) throw UsageError("mse: length mismatch");
  if (real.empty()) throw UsageError("mse: empty sequences");
  double acc = 0.0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    const double e = real[i] - predicted[i];
    acc += e * e;
  }
  return acc / static_cast<double>(real.size());
}

inline double variance(std::span<const double> v) {
  if (v.empty()) throw UsageError("variance: empty sequence");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------
// Network preparation and free-running prediction

/// Thrust (U) or eps (W) that holds the channel plant at rest.
inline double trim_input(Channel c, double eps_hold, const VehicleParams& vp) {
  return c == Channel::U ? vp.mass * vp.gravity * std::sqrt(1.0 - eps_hold * eps_hold) : 0.0;
}

/// Fresh network for a dataset: seeded weights, input centered on the trim
/// input, output scaled to 5x the largest recorded |velocity|.
inline RnnNetwork prepare_network(const Dataset& d, const VehicleParams& vp, std::uint64_t seed,
                                  Eigen::Index neurons = 8) {
  if (d.records.empty()) throw UsageError("prepare_network: empty dataset");
  RnnNetwork net = RnnNetwork::initialized(neurons, 1, seed, d.channel);
  const double center = trim_input(d.channel, d.eps_hold, vp);
  double lo = d.records.front().input, hi = lo, ymax = 0.0;
  for (const auto& r : d.records) {
    lo = std::min(lo, r.input);
    hi = std::max(hi, r.input);
    ymax = std::max(ymax, std::abs(r.output));
  }
  net.scaling.input_center = center;
  net.scaling.input_scale = std::max({center - lo, hi - center, 1e-9});
  net.scaling.output_scale = 5.0 * std::max(ymax, 1e-3);
  net.trained_eps = d.eps_hold;
  return net;
}

/// Network state at which a run aligned with `first_output` starts: zero,
/// except the readout neuron which holds the first measured velocity.
inline Eigen::VectorXd aligned_initial_state(const RnnNetwork& net, double first_output) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(net.size());
  x(net.readout) = first_output / net.scaling.output_scale;
  return x;
}

/// Free-running readout trajectory for a physical input sequence; element k
/// is the prediction at sample k (before input k is applied).
inline std::vector<double> predict_outputs(const RnnNetwork& net, std::span<const double> inputs,
                                           double dt, const Eigen::VectorXd& x0) {
  std::vector<double> out;
  out.reserve(inputs.size());
  Eigen::VectorXd x = x0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    out.push_back(net.scaling.output_scale * x(net.readout));
    const Eigen::VectorXd p = scalar_input(net.normalize_input(inputs[k]));
    x = rk4_step([&](double, const Eigen::VectorXd& s) { return rnn_rate_at(net, s, p); }, x,
                 static_cast<double>(k) * dt, dt);
  }
  return out;
}

inline std::vector<double> predict_outputs(const RnnNetwork& net, const Dataset& d) {
  const auto in = d.inputs();
  return predict_outputs(net, in, d.dt, aligned_initial_state(net, d.records.front().output));
}

inline double dataset_mse(const RnnNetwork& net, const Dataset& d) {
  const auto pred = predict_outputs(net, d);
  const auto real = d.outputs();
  return mse(real, pred);
}

/// Dataset whose outputs are a teacher network's free-running readout.
inline Dataset teacher_dataset(const RnnNetwork& teacher, const Signal& sig, double dt) {
  Dataset d;
  d.channel = teacher.channel;
  d.dt = dt;
  d.eps_hold = teacher.trained_eps;
  const auto out = predict_outputs(teacher, sig.value, dt, teacher.state);
  for (std::size_t k = 0; k < sig.value.size(); ++k)
    d.records.push_back({sig.t[k], sig.value[k], out[k]});
  return d;
}

// ---------------------------------------------------------------------------
// Offline training: backpropagation through the unrolled RK4 trajectory

struct LossGradient {
  double loss = 0.0;
  Eigen::MatrixXd d_wx;
  Eigen::MatrixXd d_wp;
};

namespace detail {

/// Adjoint of f(a) = -C a + Wx tanh(a) + Wp s: returns J(a)^T g and
/// accumulates g tanh(a)^T into d_wx and g s^T into d_wp.
inline Eigen::VectorXd rate_adjoint(const RnnNetwork& net, const Eigen::VectorXd& a,
                                    const Eigen::VectorXd& s, const Eigen::VectorXd& g,
                                    LossGradient& grad) {
  const Eigen::ArrayXd th = a.array().tanh();
  grad.d_wx.noalias() += g * th.matrix().transpose();
  grad.d_wp.noalias() += g * s.transpose();
  const Eigen::VectorXd back = net.w_rec.transpose() * g;
  return (-net.leak.array() * g.array() + (1.0 - th * th) * back.array()).matrix();
}

/// Maps the adjoint of x_{k+1} back to x_k through one RK4 step from `x`
/// with tanh(input) = `s`.
inline Eigen::VectorXd step_adjoint(const RnnNetwork& net, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& s, double h,
                                    const Eigen::VectorXd& lam, LossGradient& grad) {
  auto f = [&](const Eigen::VectorXd& a) -> Eigen::VectorXd {
    return (-net.leak.array() * a.array()).matrix() + net.w_rec * a.array().tanh().matrix() +
           net.w_in * s;
  };
  const Eigen::VectorXd a1 = x;
  const Eigen::VectorXd k1 = f(a1);
  const Eigen::VectorXd a2 = x + 0.5 * h * k1;
  const Eigen::VectorXd k2 = f(a2);
  const Eigen::VectorXd a3 = x + 0.5 * h * k2;
  const Eigen::VectorXd k3 = f(a3);
  const Eigen::VectorXd a4 = x + h * k3;

  Eigen::VectorXd gx = lam;
  Eigen::VectorXd gk1 = (h / 6.0) * lam;
  Eigen::VectorXd gk2 = (h / 3.0) * lam;
  Eigen::VectorXd gk3 = (h / 3.0) * lam;
  const Eigen::VectorXd gk4 = (h / 6.0) * lam;

  const Eigen::VectorXd ga4 = rate_adjoint(net, a4, s, gk4, grad);
  gx += ga4;
  gk3 += h * ga4;
  const Eigen::VectorXd ga3 = rate_adjoint(net, a3, s, gk3, grad);
  gx += ga3;
  gk2 += 0.5 * h * ga3;
  const Eigen::VectorXd ga2 = rate_adjoint(net, a2, s, gk2, grad);
  gx += ga2;
  gk1 += 0.5 * h * ga2;
  gx += rate_adjoint(net, a1, s, gk1, grad);
  return gx;
}

}  // namespace detail

/// Dataset MSE of the free-running readout and its gradient with respect to
/// Wx and Wp (C is held fixed).
inline LossGradient loss_and_gradient(const RnnNetwork& net, const Dataset& d) {
  const std::size_t n_steps = d.records.size();
  if (n_steps == 0) throw UsageError("loss_and_gradient: empty dataset");
  const Eigen::Index n = net.size();
  const double scale = net.scaling.output_scale;
  const double h = d.dt;

  std::vector<Eigen::VectorXd> xs;
  std::vector<Eigen::VectorXd> ss;
  xs.reserve(n_steps);
  ss.reserve(n_steps);
  Eigen::VectorXd x = aligned_initial_state(net, d.records.front().output);
  LossGradient grad;
  for (std::size_t k = 0; k < n_steps; ++k) {
    xs.push_back(x);
    const double e = scale * x(net.readout) - d.records[k].output;
    grad.loss += e * e;
    const Eigen::VectorXd p = scalar_input(net.normalize_input(d.records[k].input));
    ss.push_back(p.array().tanh().matrix());
    if (k + 1 < n_steps)
      x = rk4_step([&](double, const Eigen::VectorXd& st) { return rnn_rate_at(net, st, p); }, x,
                   d.records[k].t, h);
  }
  const double inv_n = 1.0 / static_cast<double>(n_steps);
  grad.loss *= inv_n;

  grad.d_wx = Eigen::MatrixXd::Zero(n, n);
  grad.d_wp = Eigen::MatrixXd::Zero(n, net.inputs());
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(n);
  for (std::size_t k = n_steps; k-- > 0;) {
    lam(net.readout) +=
        2.0 * scale * (scale * xs[k](net.readout) - d.records[k].output) * inv_n;
    if (k > 0) lam = detail::step_adjoint(net, xs[k - 1], ss[k - 1], h, lam, grad);
  }
  return grad;
}

struct TrainOptions {
  std::size_t epochs = 400;
  double learning_rate = 0.02;
  /// Global gradient-norm clip applied before the Adam update.
  double clip = 10.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Floor for every recurrent weight after each update.
  double positivity_floor = 1e-4;
};

struct EpochMse {
  std::size_t epoch = 0;
  double mse = 0.0;
};

struct TrainingReport {
  std::vector<EpochMse> epoch_mse;
  double final_mse = 0.0;
  std::size_t epochs = 0;
  double learning_rate = 0.0;
};

struct TrainResult {
  RnnNetwork net;
  TrainingReport report;
};

/// Full-sequence gradient descent (Adam) on the dataset MSE. One epoch is
/// one gradient step. Returns the best network seen, which includes the
/// network after the last update.
inline TrainResult train_offline(const Dataset& data, const RnnNetwork& initial,
                                 const TrainOptions& opt = {}) {
  initial.validate();
  if (data.channel != initial.channel) throw UsageError("train_offline: channel mismatch");
  if (data.records.empty()) throw UsageError("train_offline: empty dataset");

  TrainResult res{initial, {}};
  res.report.epochs = opt.epochs;
  res.report.learning_rate = opt.learning_rate;
  if (opt.epochs == 0) return res;

  RnnNetwork net = initial;
  project_positive(net, opt.positivity_floor);
  const Eigen::Index n = net.size();
  Eigen::MatrixXd m_wx = Eigen::MatrixXd::Zero(n, n), v_wx = m_wx;
  Eigen::MatrixXd m_wp = Eigen::MatrixXd::Zero(n, net.inputs()), v_wp = m_wp;

  double best = std::numeric_limits<double>::infinity();
  auto keep_if_best = [&](double loss, const RnnNetwork& candidate) {
    if (loss < best) {
      best = loss;
      res.net = candidate;
    }
  };

  for (std::size_t epoch = 1; epoch <= opt.epochs; ++epoch) {
    LossGradient g;
    try {
      g = loss_and_gradient(net, data);
    } catch (const DivergenceError&) {
      throw DivergenceError("training diverged", static_cast<double>(epoch));
    }
    if (!std::isfinite(g.loss) || !g.d_wx.allFinite() || !g.d_wp.allFinite())
      throw DivergenceError("training loss is non-finite", static_cast<double>(epoch));
    res.report.epoch_mse.push_back({epoch, g.loss});
    keep_if_best(g.loss, net);

    const double norm = std::sqrt(g.d_wx.squaredNorm() + g.d_wp.squaredNorm());
    if (norm > opt.clip) {
      g.d_wx *= opt.clip / norm;
      g.d_wp *= opt.clip / norm;
    }
    const double t = static_cast<double>(epoch);
    const double c1 = 1.0 - std::pow(opt.beta1, t);
    const double c2 = 1.0 - std::pow(opt.beta2, t);
    auto adam = [&](Eigen::MatrixXd& w, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                    const Eigen::MatrixXd& grad) {
      m = opt.beta1 * m + (1.0 - opt.beta1) * grad;
      v = opt.beta2 * v + (1.0 - opt.beta2) * grad.cwiseProduct(grad);
      w.array() -= opt.learning_rate * (m.array() / c1) /
                   ((v.array() / c2).sqrt() + opt.adam_eps);
    };
    adam(net.w_rec, m_wx, v_wx, g.d_wx);
    adam(net.w_in, m_wp, v_wp, g.d_wp);
    project_positive(net, opt.positivity_floor);
  }

  double last = std::numeric_limits<double>::infinity();
  try {
    last = dataset_mse(net, data);
  } catch (const DivergenceError&) {
  }
  if (std::isfinite(last)) keep_if_best(last, net);
  res.report.final_mse = best;
  return res;
}

inline std::string report_to_csv(const TrainingReport& r) {
  std::ostringstream out;
  out << "epoch,mse\n";
  for (const auto& e : r.epoch_mse) out << e.epoch << ',' << csv::shortest(e.mse) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Online adaptation

struct AdaptOptions {
  double positivity_floor = 1e-4;
};

struct LyapunovSample {
  double t = 0.0;
  double value = 0.0;
};

struct AdaptResult {
  RnnNetwork net;
  /// Readout error (network units) at each sample, or |x_tilde| in teacher mode.
  std::vector<double> x_tilde;
  /// Filled only in teacher mode.
  std::vector<LyapunovSample> lyapunov;
};

namespace detail {

struct AdaptLayout {
  Eigen::Index n, k;
  Eigen::Index x_hat() const { return 0; }
  Eigen::Index wx() const { return n; }
  Eigen::Index wp() const { return n + n * n; }
  Eigen::Index x_teacher() const { return n + n * n + n * k; }
  Eigen::Index size(bool teacher) const { return x_teacher() + (teacher ? n : 0); }
};

inline Eigen::VectorXd pack(const RnnNetwork& net, const AdaptLayout& L,
                            const Eigen::VectorXd* teacher_state) {
  Eigen::VectorXd z(L.size(teacher_state != nullptr));
  z.segment(L.x_hat(), L.n) = net.state;
  z.segment(L.wx(), L.n * L.n) = Eigen::Map<const Eigen::VectorXd>(net.w_rec.data(), L.n * L.n);
  z.segment(L.wp(), L.n * L.k) = Eigen::Map<const Eigen::VectorXd>(net.w_in.data(), L.n * L.k);
  if (teacher_state) z.segment(L.x_teacher(), L.n) = *teacher_state;
  return z;
}

inline void unpack(const Eigen::VectorXd& z, const AdaptLayout& L, RnnNetwork& net) {
  net.state = z.segment(L.x_hat(), L.n);
  net.w_rec = Eigen::Map<const Eigen::MatrixXd>(z.data() + L.wx(), L.n, L.n);
  net.w_in = Eigen::Map<const Eigen::MatrixXd>(z.data() + L.wp(), L.n, L.k);
}

}  // namespace detail

/// Adapts the readout row of `net` along a measured (input, velocity) stream,
/// co-integrating the network state and the weight laws with RK4. The
/// measured velocity is held constant over each step.
inline AdaptResult adapt_online(const RnnNetwork& net, std::span<const double> inputs,
                                std::span<const double> measured, double dt,
                                const AdaptOptions& opt = {}) {
  net.validate();
  if (!(dt > 0.0)) throw UsageError("adapt_online: dt must be > 0");
  if (inputs.size() != measured.size()) throw UsageError("adapt_online: stream length mismatch");
  const detail::AdaptLayout L{net.size(), net.inputs()};
  const Eigen::Index r = net.readout;

  AdaptResult res{net, {}, {}};
  RnnNetwork work = net;
  Eigen::VectorXd z = detail::pack(work, L, nullptr);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const double target = measured[k] / net.scaling.output_scale;
    res.x_tilde.push_back(target - z(L.x_hat() + r));
    const Eigen::VectorXd p = scalar_input(net.normalize_input(inputs[k]));
    auto rhs = [&](double, const Eigen::VectorXd& s) -> Eigen::VectorXd {
      RnnNetwork cur = work;
      detail::unpack(s, L, cur);
      Eigen::VectorXd ds = Eigen::VectorXd::Zero(s.size());
      ds.segment(L.x_hat(), L.n) = rnn_rate_at(cur, cur.state, p);
      Eigen::VectorXd xt = Eigen::VectorXd::Zero(L.n);
      xt(r) = target - cur.state(r);
      const WeightRates wr = weight_update_rates(xt, cur.state, p);
      ds.segment(L.wx(), L.n * L.n) = Eigen::Map<const Eigen::VectorXd>(wr.d_wx.data(), L.n * L.n);
      ds.segment(L.wp(), L.n * L.k) = Eigen::Map<const Eigen::VectorXd>(wr.d_wp.data(), L.n * L.k);
      return ds;
    };
    const double t = static_cast<double>(k) * dt;
    try {
      z = rk4_step(rhs, z, t, dt);
    } catch (const DivergenceError&) {
      throw DivergenceError("online adaptation diverged", t);
    }
    detail::unpack(z, L, work);
    project_positive(work, opt.positivity_floor);
    z = detail::pack(work, L, nullptr);
  }
  res.net = work;
  return res;
}

/// Teacher-student adaptation: the full teacher state is observed, every row
/// of the student adapts, and the Lyapunov candidate (built from the teacher's
/// weights) is sampled before each step and after the last one. The student
/// starts from the teacher's state; inputs are physical and normalized with
/// the teacher's scaling.
inline AdaptResult adapt_online(const RnnNetwork& student, const RnnNetwork& teacher,
                                std::span<const double> inputs, double dt,
                                const AdaptOptions& opt = {}) {
  student.validate();
  teacher.validate();
  if (!(dt > 0.0)) throw UsageError("adapt_online: dt must be > 0");
  if (student.size() != teacher.size() || student.inputs() != teacher.inputs())
    throw ConfigError("adapt_online: teacher/student dimensions differ");
  const detail::AdaptLayout L{student.size(), student.inputs()};

  AdaptResult res{student, {}, {}};
  RnnNetwork work = student;
  work.state = teacher.state;
  Eigen::VectorXd z = detail::pack(work, L, &teacher.state);

  auto sample = [&](double t) {
    EstimationError e{z.segment(L.x_teacher(), L.n) - z.segment(L.x_hat(), L.n),
                      teacher.w_rec - work.w_rec, teacher.w_in - work.w_in};
    res.lyapunov.push_back({t, lyapunov_value(e)});
    res.x_tilde.push_back(e.x_tilde.norm());
  };

  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const double t = static_cast<double>(k) * dt;
    sample(t);
    const Eigen::VectorXd p = scalar_input(teacher.normalize_input(inputs[k]));
    auto rhs = [&](double, const Eigen::VectorXd& s) -> Eigen::VectorXd {
      RnnNetwork cur = work;
      detail::unpack(s, L, cur);
      const Eigen::VectorXd xt_state = s.segment(L.x_teacher(), L.n);
      Eigen::VectorXd ds(s.size());
      ds.segment(L.x_hat(), L.n) = rnn_rate_at(cur, cur.state, p);
      ds.segment(L.x_teacher(), L.n) = rnn_rate_at(teacher, xt_state, p);
      const WeightRates wr = weight_update_rates(xt_state - cur.state, cur.state, p);
      ds.segment(L.wx(), L.n * L.n) = Eigen::Map<const Eigen::VectorXd>(wr.d_wx.data(), L.n * L.n);
      ds.segment(L.wp(), L.n * L.k) = Eigen::Map<const Eigen::VectorXd>(wr.d_wp.data(), L.n * L.k);
      return ds;
    };
    try {
      z = rk4_step(rhs, z, t, dt);
    } catch (const DivergenceError&) {
      throw DivergenceError("online adaptation diverged", t);
    }
    detail::unpack(z, L, work);
    project_positive(work, opt.positivity_floor);
    z.segment(L.wx(), L.n * L.n) = Eigen::Map<const Eigen::VectorXd>(work.w_rec.data(), L.n * L.n);
  }
  sample(static_cast<double>(inputs.size()) * dt);
  res.net = work;
  return res;
}

}  // namespace ttl
