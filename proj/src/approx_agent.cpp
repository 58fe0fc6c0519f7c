#include "uiadapt/approx_agent.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "uiadapt/error.hpp"
#include "uiadapt/rng.hpp"

namespace uiadapt {

void ApproxConfig::validate() const {
  if (!(step_size > 0.0)) fail(ErrorKind::Config, "step_size must be > 0");
  if (hidden_layer && hidden_width == 0) fail(ErrorKind::Config, "hidden_width must be >= 1");
  if (!(init_scale >= 0.0)) fail(ErrorKind::Config, "init_scale must be >= 0");
}

ApproxAgent::ApproxAgent(const Discretization& d, ApproxConfig config, std::uint64_t init_seed)
    : disc_(d), config_(config) {
  disc_.validate();
  config_.validate();
  num_states_ = disc_.state_count();
  for (TabularDim dim : disc_.tabular_dims) {
    block_offsets_.push_back(feature_dim_);
    feature_dim_ += disc_.cardinality(dim);
  }
  if (!config_.hidden_layer) {
    params_.assign(kNumActions * feature_dim_ + kNumActions, 0.0);
    return;
  }
  const std::size_t h = config_.hidden_width;
  params_.assign(h * feature_dim_ + h + kNumActions * h + kNumActions, 0.0);
  Rng rng = make_stream(init_seed, "approx-init");
  for (std::size_t i = 0; i < h * feature_dim_; ++i) {
    params_[i] = config_.init_scale * (2.0 * uniform01(rng) - 1.0);
  }
}

std::vector<std::size_t> ApproxAgent::active_features(StateIndex s) const {
  const DiscreteState ds = decode_tabular(s, disc_);
  std::vector<std::size_t> out(ds.buckets.size());
  for (std::size_t k = 0; k < ds.buckets.size(); ++k) out[k] = block_offsets_[k] + ds.buckets[k];
  return out;
}

std::vector<double> ApproxAgent::features(StateIndex s) const {
  std::vector<double> phi(feature_dim_, 0.0);
  for (std::size_t i : active_features(s)) phi[i] = 1.0;
  return phi;
}

ApproxAgent::Forward ApproxAgent::forward(StateIndex s) const {
  const auto active = active_features(s);
  const std::size_t f = feature_dim_;
  Forward out;
  if (!config_.hidden_layer) {
    const double* w = params_.data();
    const double* b = w + kNumActions * f;
    for (std::size_t a = 0; a < kNumActions; ++a) {
      double z = b[a];
      for (std::size_t i : active) z += w[a * f + i];
      out.q[a] = z;
    }
    return out;
  }
  const std::size_t h = config_.hidden_width;
  const double* u = params_.data();
  const double* c = u + h * f;
  const double* v = c + h;
  const double* b = v + kNumActions * h;
  out.hidden.resize(h);
  for (std::size_t j = 0; j < h; ++j) {
    double z = c[j];
    for (std::size_t i : active) z += u[j * f + i];
    out.hidden[j] = std::tanh(z);
  }
  for (std::size_t a = 0; a < kNumActions; ++a) {
    double z = b[a];
    for (std::size_t j = 0; j < h; ++j) z += v[a * h + j] * out.hidden[j];
    out.q[a] = z;
  }
  return out;
}

QVector ApproxAgent::predict(StateIndex s) const { return forward(s).q; }

double ApproxAgent::td_target(const Transition& t, const LearningParams& p) const {
  if (t.done) return t.r;
  const QVector next = predict(t.s_next);
  double best = next[0];
  for (double q : next) best = std::max(best, q);
  return t.r + p.gamma * best;
}

double ApproxAgent::loss(StateIndex s, AdaptationAction a, double target) const {
  const double err = target - predict(s)[action_index(a)];
  return 0.5 * err * err;
}

std::vector<double> ApproxAgent::loss_gradient(StateIndex s, AdaptationAction a,
                                               double target) const {
  const Forward fw = forward(s);
  const auto active = active_features(s);
  const std::size_t ai = action_index(a);
  const std::size_t f = feature_dim_;
  const double delta = fw.q[ai] - target;  // dL/dQ(s, a)

  std::vector<double> grad(params_.size(), 0.0);
  if (!config_.hidden_layer) {
    for (std::size_t i : active) grad[ai * f + i] = delta;
    grad[kNumActions * f + ai] = delta;
    return grad;
  }
  const std::size_t h = config_.hidden_width;
  const std::size_t c_off = h * f;
  const std::size_t v_off = c_off + h;
  const std::size_t b_off = v_off + kNumActions * h;
  for (std::size_t j = 0; j < h; ++j) {
    grad[v_off + ai * h + j] = delta * fw.hidden[j];
    const double dpre = delta * params_[v_off + ai * h + j] * (1.0 - fw.hidden[j] * fw.hidden[j]);
    grad[c_off + j] = dpre;
    for (std::size_t i : active) grad[j * f + i] = dpre;
  }
  grad[b_off + ai] = delta;
  return grad;
}

double ApproxAgent::update(const Transition& t, const LearningParams& p) {
  if (t.s >= num_states_ || t.s_next >= num_states_) {
    fail(ErrorKind::Range, "transition state index outside the state space");
  }
  const double target = td_target(t, p);
  const double before = loss(t.s, t.a, target);
  if (!std::isfinite(before)) fail(ErrorKind::Divergence, "approximate agent loss is not finite");
  const std::vector<double> grad = loss_gradient(t.s, t.a, target);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i] -= config_.step_size * grad[i];
    if (!std::isfinite(params_[i])) {
      fail(ErrorKind::Divergence, "approximate agent weights are not finite");
    }
  }
  return before;
}

void ApproxAgent::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) {
    fail(ErrorKind::Range, "parameter vector has the wrong length");
  }
  params_.assign(params.begin(), params.end());
}

std::vector<AdaptationAction> ApproxAgent::greedy_policy() const {
  std::vector<AdaptationAction> out(num_states_);
  for (StateIndex s = 0; s < num_states_; ++s) {
    const QVector q = predict(s);
    out[s] = greedy_action(q);
  }
  return out;
}

QVector approx_predict(const ApproxAgent& agent, StateIndex s) { return agent.predict(s); }

double approx_update(ApproxAgent& agent, const Transition& t, const LearningParams& p) {
  return agent.update(t, p);
}

// ---------------------------------------------------------------------------

void save_snapshot(const ApproxAgent& agent, std::ostream& out) {
  char buf[40];
  const ApproxConfig& cfg = agent.config();
  const Discretization& d = agent.discretization();
  out << "uiadapt-approx v1\n";
  std::snprintf(buf, sizeof buf, "%.17g", cfg.step_size);
  out << "hidden " << (cfg.hidden_layer ? 1 : 0) << " width " << cfg.hidden_width << " step "
      << buf << " params " << agent.parameter_count() << "\n";
  out << "dims " << d.tabular_dims.size();
  for (TabularDim dim : d.tabular_dims) out << " " << to_string(dim);
  out << "\n";
  auto write_bounds = [&](const char* name, const std::vector<double>& b) {
    out << name << " " << b.size();
    for (double v : b) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << " " << buf;
    }
    out << "\n";
  };
  write_bounds("emotion", d.emotion_boundaries);
  write_bounds("brightness", d.brightness_boundaries);
  for (double v : agent.parameters()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
}

ApproxAgent load_approx(std::istream& in) {
  auto expect = [&](const char* kw) {
    std::string token;
    if (!(in >> token) || token != kw) {
      fail(ErrorKind::Validation, std::string("approx snapshot: expected '") + kw + "'");
    }
  };
  expect("uiadapt-approx");
  expect("v1");
  ApproxConfig cfg;
  int hidden = 0;
  std::size_t count = 0;
  expect("hidden");
  in >> hidden;
  expect("width");
  in >> cfg.hidden_width;
  expect("step");
  in >> cfg.step_size;
  expect("params");
  in >> count;
  cfg.hidden_layer = hidden != 0;

  Discretization d;
  std::size_t ndims = 0;
  expect("dims");
  in >> ndims;
  d.tabular_dims.clear();
  for (std::size_t i = 0; i < ndims; ++i) {
    std::string name;
    in >> name;
    d.tabular_dims.push_back(parse_enum<TabularDim>(name));
  }
  auto read_bounds = [&](const char* name, std::vector<double>& b) {
    expect(name);
    std::size_t n = 0;
    in >> n;
    b.assign(n, 0.0);
    for (double& v : b) in >> v;
  };
  read_bounds("emotion", d.emotion_boundaries);
  read_bounds("brightness", d.brightness_boundaries);
  if (!in) fail(ErrorKind::Validation, "malformed approx snapshot header");

  ApproxAgent agent(d, cfg, 0);
  if (agent.parameter_count() != count) {
    fail(ErrorKind::Validation, "approx snapshot parameter count does not match its shape");
  }
  std::vector<double> params(count);
  for (double& v : params) {
    if (!(in >> v) || !std::isfinite(v)) fail(ErrorKind::Validation, "bad approx snapshot value");
  }
  agent.set_parameters(params);
  return agent;
}

}  // namespace uiadapt
