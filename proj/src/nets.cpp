#include "dynsel/nets.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "dynsel/kernels.hpp"
#include "dynsel/rng.hpp"

namespace dynsel {

using nlohmann::ordered_json;

MlpGrad zero_grad(const MlpParams& p) {
  MlpGrad g;
  g.w1.assign(p.w1.size(), 0.0);
  g.b1.assign(p.b1.size(), 0.0);
  g.w2.assign(p.w2.size(), 0.0);
  g.b2 = 0.0;
  return g;
}

CriticInput make_critic_input(const std::vector<FusedState>& states) {
  if (states.empty()) throw std::invalid_argument("make_critic_input: no states");
  const std::size_t d = states[0].vector.size();
  if (d < 2)
    throw std::invalid_argument("make_critic_input: states must carry the two stage entries");
  CriticInput in;
  in.vector.assign(d + 2, 0.0);
  for (const auto& s : states) {
    if (s.vector.size() != d)
      throw std::invalid_argument("make_critic_input: inconsistent state lengths");
    for (std::size_t j = 0; j < d; ++j) in.vector[j] += s.vector[j];
  }
  const double inv = 1.0 / static_cast<double>(states.size());
  for (std::size_t j = 0; j < d; ++j) in.vector[j] *= inv;
  in.vector[d] = states[0].vector[0];      // perf_prev
  in.vector[d + 1] = states[0].vector[1];  // t/T
  return in;
}

MlpParams init_params(std::uint64_t seed, int in, int hidden) {
  if (in < 1 || hidden < 1) throw std::invalid_argument("init_params: in and hidden must be >= 1");
  MlpParams p;
  p.in = in;
  p.hidden = hidden;
  Rng rng(mix_seed(seed, 21));
  const auto xavier = [&rng](std::vector<double>& w, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : w) v = rng.uniform(-bound, bound);
  };
  p.w1.assign(static_cast<std::size_t>(hidden) * static_cast<std::size_t>(in), 0.0);
  xavier(p.w1, in, hidden);
  p.b1.assign(static_cast<std::size_t>(hidden), 0.0);
  p.w2.assign(static_cast<std::size_t>(hidden), 0.0);
  xavier(p.w2, hidden, 1);
  p.b2 = 0.0;
  p.shift.assign(static_cast<std::size_t>(in), 0.0);
  p.scale.assign(static_cast<std::size_t>(in), 1.0);
  return p;
}

void fit_normalization(MlpParams& params, const std::vector<const double*>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("fit_normalization: empty batch");
  const std::size_t d = static_cast<std::size_t>(params.in);
  const double inv = 1.0 / static_cast<double>(inputs.size());
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const double* x : inputs)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
  for (std::size_t j = 0; j < d; ++j) mean[j] *= inv;
  for (const double* x : inputs)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x[j] - mean[j];
      var[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) {
    params.shift[j] = mean[j];
    const double sd = std::sqrt(var[j] * inv);
    // A dimension constant across the fitting batch (e.g. stage features at
    // the fitting step) keeps unit scale; flooring it instead would blow up
    // every later value of that dimension.
    params.scale[j] = sd < 1e-12 ? 1.0 : std::max(sd, 1e-6);
  }
}

double mlp_forward_cached(const MlpParams& p, const double* x, MlpCache& f) {
  const std::size_t in = static_cast<std::size_t>(p.in);
  const std::size_t hid = static_cast<std::size_t>(p.hidden);
  f.xn.resize(in);
  for (std::size_t j = 0; j < in; ++j) f.xn[j] = (x[j] - p.shift[j]) / p.scale[j];
  f.h.resize(hid);
  kernels::matvec(p.w1.data(), hid, in, f.xn.data(), f.h.data());
  for (std::size_t r = 0; r < hid; ++r) f.h[r] = std::tanh(f.h[r] + p.b1[r]);
  f.out = kernels::active().dot(p.w2.data(), f.h.data(), hid) + p.b2;
  return f.out;
}

void mlp_backward_cached(const MlpParams& p, const MlpCache& f, double upstream,
                         MlpGrad& g) {
  if (upstream == 0.0) return;
  const std::size_t in = static_cast<std::size_t>(p.in);
  const std::size_t hid = static_cast<std::size_t>(p.hidden);
  g.b2 += upstream;
  kernels::active().axpy(upstream, f.h.data(), g.w2.data(), hid);
  std::vector<double> dz(hid);
  for (std::size_t r = 0; r < hid; ++r)
    dz[r] = upstream * p.w2[r] * (1.0 - f.h[r] * f.h[r]);
  for (std::size_t r = 0; r < hid; ++r) g.b1[r] += dz[r];
  kernels::outer_acc(dz.data(), hid, in, f.xn.data(), g.w1.data());
}

double mlp_forward(const MlpParams& p, const double* x) {
  MlpCache f;
  return mlp_forward_cached(p, x, f);
}

void mlp_backward(const MlpParams& p, const double* x, double upstream, MlpGrad& g) {
  if (upstream == 0.0) return;
  MlpCache f;
  mlp_forward_cached(p, x, f);
  mlp_backward_cached(p, f, upstream, g);
}

double actor_score(const MlpParams& params, const FusedState& state) {
  if (static_cast<int>(state.vector.size()) != params.in)
    throw std::invalid_argument("actor_score: input dimension mismatch");
  return mlp_forward(params, state.vector.data());
}

MlpGrad actor_grad(const MlpParams& params, const std::vector<FusedState>& states,
                   const std::vector<double>& upstream) {
  if (states.size() != upstream.size())
    throw std::invalid_argument("actor_grad: states/upstream length mismatch");
  MlpGrad g = zero_grad(params);
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (static_cast<int>(states[j].vector.size()) != params.in)
      throw std::invalid_argument("actor_grad: input dimension mismatch");
    mlp_backward(params, states[j].vector.data(), upstream[j], g);
  }
  return g;
}

double critic_value(const MlpParams& params, const CriticInput& input) {
  if (static_cast<int>(input.vector.size()) != params.in)
    throw std::invalid_argument("critic_value: input dimension mismatch");
  return mlp_forward(params, input.vector.data());
}

MlpGrad critic_grad(const MlpParams& params, const std::vector<CriticInput>& inputs,
                    const std::vector<double>& upstream) {
  if (inputs.size() != upstream.size())
    throw std::invalid_argument("critic_grad: inputs/upstream length mismatch");
  MlpGrad g = zero_grad(params);
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (static_cast<int>(inputs[j].vector.size()) != params.in)
      throw std::invalid_argument("critic_grad: input dimension mismatch");
    mlp_backward(params, inputs[j].vector.data(), upstream[j], g);
  }
  return g;
}

MlpParams sgd_wd_step(MlpParams params, const MlpGrad& grad, double lr,
                      double weight_decay) {
  if (grad.w1.size() != params.w1.size() || grad.b1.size() != params.b1.size() ||
      grad.w2.size() != params.w2.size())
    throw std::invalid_argument("sgd_wd_step: gradient shape mismatch");
  const auto& k = kernels::active();
  k.sgd_step(params.w1.data(), grad.w1.data(), params.w1.size(), lr, weight_decay);
  k.sgd_step(params.w2.data(), grad.w2.data(), params.w2.size(), lr, weight_decay);
  k.sgd_step(params.b1.data(), grad.b1.data(), params.b1.size(), lr, 0.0);
  params.b2 -= lr * grad.b2;
  return params;
}

std::string checkpoint_json(const MlpParams& params) {
  ordered_json j;
  j["format"] = "dynsel-mlp";
  j["version"] = 1;
  j["in"] = params.in;
  j["hidden"] = params.hidden;
  j["w1"] = params.w1;
  j["b1"] = params.b1;
  j["w2"] = params.w2;
  j["b2"] = params.b2;
  j["shift"] = params.shift;
  j["scale"] = params.scale;
  return j.dump();
}

MlpParams checkpoint_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw std::runtime_error(std::string("checkpoint parse error: ") + e.what());
  }
  MlpParams p;
  try {
    if (j.at("format").get<std::string>() != "dynsel-mlp")
      throw std::runtime_error("checkpoint: unknown format tag");
    p.in = j.at("in").get<int>();
    p.hidden = j.at("hidden").get<int>();
    p.w1 = j.at("w1").get<std::vector<double>>();
    p.b1 = j.at("b1").get<std::vector<double>>();
    p.w2 = j.at("w2").get<std::vector<double>>();
    p.b2 = j.at("b2").get<double>();
    p.shift = j.at("shift").get<std::vector<double>>();
    p.scale = j.at("scale").get<std::vector<double>>();
  } catch (const ordered_json::exception& e) {
    throw std::runtime_error(std::string("checkpoint field error: ") + e.what());
  }
  const std::size_t in = static_cast<std::size_t>(p.in);
  const std::size_t hid = static_cast<std::size_t>(p.hidden);
  if (p.in < 1 || p.hidden < 1 || p.w1.size() != hid * in || p.b1.size() != hid ||
      p.w2.size() != hid || p.shift.size() != in || p.scale.size() != in)
    throw std::runtime_error("checkpoint: shape mismatch");
  for (double s : p.scale)
    if (!(s > 0.0)) throw std::runtime_error("checkpoint: scale entries must be > 0");
  return p;
}

void save_checkpoint(const MlpParams& params, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f.good()) throw std::runtime_error("cannot open for writing: " + path);
  f << checkpoint_json(params) << '\n';
  if (!f.good()) throw std::runtime_error("write failed: " + path);
}

MlpParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f.good()) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return checkpoint_from_json(text);
}

}  // namespace dynsel
