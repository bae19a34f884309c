#pragma once

#include <cstdint>
#include <vector>

#include "dynsel/corpus.hpp"

namespace dynsel {

// The inner trainable system: a linear softmax classifier over payload
// features. Anything exposing init/update/performance with these shapes can
// stand in for it.
struct LearnerState {
  int F = 0;
  int L = 0;
  std::vector<double> W;  // L x F, row-major
  std::vector<double> b;  // L
  int step = 0;
  std::uint64_t seed = 0;
};

// Zero weights, so the initial model predicts uniformly and the initial
// performance is exactly -ln L.
LearnerState learner_init(std::uint64_t seed, int F, int L);

// One full-batch cross-entropy gradient step on the batch's payload pairs.
// The batch is summed in ascending id order, making the update
// permutation-invariant.
LearnerState learner_update(LearnerState state,
                            const std::vector<const InstructionRecord*>& batch,
                            double lr);

// P = -(mean cross-entropy on the validation set); higher is better.
double performance(const LearnerState& state, const ValidationSet& val);

// Mean cross-entropy of the state on arbitrary feature/label pairs; the
// piece both performance and the self-paced baseline's initial losses use.
double mean_cross_entropy(const LearnerState& state,
                          const std::vector<std::vector<double>>& features,
                          const std::vector<int>& labels);

}  // namespace dynsel
