#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynsel/fusion.hpp"

namespace dynsel {

// One-hidden-layer tanh MLP with a scalar output and a frozen input affine
// normalization (fitted once, not part of the trainable parameters). Serves
// as both the actor (scores one fused state) and the critic (values a set
// summary).
struct MlpParams {
  int in = 0;
  int hidden = 0;
  std::vector<double> w1;     // hidden x in, row-major
  std::vector<double> b1;     // hidden
  std::vector<double> w2;     // hidden
  double b2 = 0.0;
  std::vector<double> shift;  // in
  std::vector<double> scale;  // in, entries > 0
};

// Gradient with the same trainable shapes (normalization is a buffer).
struct MlpGrad {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};

MlpGrad zero_grad(const MlpParams& p);

// Permutation-invariant critic input: mean over all fused vectors at a step,
// concatenated with the stage features [perf_prev, t/T] (which sit in the
// first two entries of every fused vector).
struct CriticInput {
  std::vector<double> vector;  // length fused_dim + 2
};

CriticInput make_critic_input(const std::vector<FusedState>& states);

// Xavier-uniform weights, zero biases, identity normalization.
MlpParams init_params(std::uint64_t seed, int in, int hidden);

// Fits shift/scale from a batch of input vectors: per-dimension mean and
// std (floored at 1e-6; dimensions that are constant across the batch keep
// scale 1 so later non-constant values stay in range).
void fit_normalization(MlpParams& params, const std::vector<const double*>& inputs);

double mlp_forward(const MlpParams& p, const double* x);

// Accumulates into g the exact gradient of upstream * output(x).
void mlp_backward(const MlpParams& p, const double* x, double upstream, MlpGrad& g);

// Two-phase variant for hot loops: forward keeps the activations so the
// backward pass does not recompute them.
struct MlpCache {
  std::vector<double> xn;
  std::vector<double> h;
  double out = 0.0;
};

double mlp_forward_cached(const MlpParams& p, const double* x, MlpCache& cache);
void mlp_backward_cached(const MlpParams& p, const MlpCache& cache, double upstream,
                         MlpGrad& g);

double actor_score(const MlpParams& params, const FusedState& state);

// Exact gradient of sum_j upstream[j] * actor_score(params, states[j]).
MlpGrad actor_grad(const MlpParams& params, const std::vector<FusedState>& states,
                   const std::vector<double>& upstream);

double critic_value(const MlpParams& params, const CriticInput& input);

MlpGrad critic_grad(const MlpParams& params, const std::vector<CriticInput>& inputs,
                    const std::vector<double>& upstream);

// w <- w - lr*(g + weight_decay*w) for weights; biases skip the decay term.
MlpParams sgd_wd_step(MlpParams params, const MlpGrad& grad, double lr,
                      double weight_decay);

// JSON checkpoint, bit-exact round trip.
void save_checkpoint(const MlpParams& params, const std::string& path);
MlpParams load_checkpoint(const std::string& path);
std::string checkpoint_json(const MlpParams& params);
MlpParams checkpoint_from_json(const std::string& text);

}  // namespace dynsel
