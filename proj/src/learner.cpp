#include "dynsel/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynsel/kernels.hpp"

namespace dynsel {

namespace {

// Stable softmax probabilities from logits, in place.
void softmax_inplace(std::vector<double>& z) {
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double total = 0.0;
  for (auto& v : z) {
    v = std::exp(v - mx);
    total += v;
  }
  for (auto& v : z) v /= total;
}

void logits_of(const LearnerState& s, const std::vector<double>& x,
               std::vector<double>& z) {
  z.resize(static_cast<std::size_t>(s.L));
  kernels::matvec(s.W.data(), static_cast<std::size_t>(s.L),
                  static_cast<std::size_t>(s.F), x.data(), z.data());
  for (int l = 0; l < s.L; ++l) z[static_cast<std::size_t>(l)] += s.b[static_cast<std::size_t>(l)];
}

}  // namespace

LearnerState learner_init(std::uint64_t seed, int F, int L) {
  if (F < 1 || L < 2) throw std::invalid_argument("learner_init: need F >= 1, L >= 2");
  LearnerState s;
  s.F = F;
  s.L = L;
  s.W.assign(static_cast<std::size_t>(L) * static_cast<std::size_t>(F), 0.0);
  s.b.assign(static_cast<std::size_t>(L), 0.0);
  s.seed = seed;
  return s;
}

LearnerState learner_update(LearnerState state,
                            const std::vector<const InstructionRecord*>& batch,
                            double lr) {
  if (batch.empty()) throw std::invalid_argument("learner_update: empty batch");
  std::vector<const InstructionRecord*> ordered = batch;
  std::sort(ordered.begin(), ordered.end(),
            [](const InstructionRecord* a, const InstructionRecord* b) { return a->id < b->id; });

  const std::size_t fdim = static_cast<std::size_t>(state.F);
  const std::size_t ldim = static_cast<std::size_t>(state.L);
  std::vector<double> gw(ldim * fdim, 0.0), gb(ldim, 0.0), z;
  const double inv = 1.0 / static_cast<double>(ordered.size());
  for (const InstructionRecord* r : ordered) {
    if (static_cast<int>(r->payload_features.size()) != state.F ||
        r->payload_label < 0 || r->payload_label >= state.L)
      throw std::invalid_argument("learner_update: payload shape mismatch at id " +
                                  std::to_string(r->id));
    logits_of(state, r->payload_features, z);
    softmax_inplace(z);
    z[static_cast<std::size_t>(r->payload_label)] -= 1.0;  // dCE/dlogits = p - onehot
    for (auto& v : z) v *= inv;
    kernels::outer_acc(z.data(), ldim, fdim, r->payload_features.data(), gw.data());
    for (std::size_t l = 0; l < ldim; ++l) gb[l] += z[l];
  }
  const auto& k = kernels::active();
  k.sgd_step(state.W.data(), gw.data(), state.W.size(), lr, 0.0);
  k.sgd_step(state.b.data(), gb.data(), state.b.size(), lr, 0.0);
  ++state.step;
  return state;
}

double mean_cross_entropy(const LearnerState& state,
                          const std::vector<std::vector<double>>& features,
                          const std::vector<int>& labels) {
  if (features.empty() || features.size() != labels.size())
    throw std::invalid_argument("mean_cross_entropy: bad feature/label shapes");
  std::vector<double> z;
  double total = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    logits_of(state, features[i], z);
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - mx);
    lse = mx + std::log(lse);
    total += lse - z[static_cast<std::size_t>(labels[i])];
  }
  return total / static_cast<double>(features.size());
}

double performance(const LearnerState& state, const ValidationSet& val) {
  return -mean_cross_entropy(state, val.features, val.labels);
}

}  // namespace dynsel
