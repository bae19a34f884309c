#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynsel/corpus.hpp"
#include "dynsel/rl.hpp"
#include "dynsel/rng.hpp"

namespace dynsel {

// Uniform sample of B distinct ids from 0..n-1. `step` is accepted so the
// call site reads like the other per-step selectors; the draw comes from rng.
std::vector<int> rand_select(int step, int n, int B, Rng& rng);

// Self-paced schedule: rank ids by (initial loss asc, id asc), cut the
// ranking into `total_steps` contiguous buckets whose sizes differ by at
// most one (earlier buckets take the remainder). Returns the buckets.
std::vector<std::vector<int>> sspl_schedule(const std::vector<double>& initial_losses,
                                            int total_steps, int B);

// Ids trained at 1-based `step`: the step's bucket, topped up from the
// following buckets' heads (wrapping) when the bucket is short of B.
std::vector<int> sspl_step_ids(const std::vector<std::vector<int>>& schedule, int step,
                               int B);

// Static subset schedule: the top `subset_size` ids by (score desc, id asc)
// are fixed once, then each epoch visits the whole subset in a seeded
// shuffled order, emitted as consecutive batches of B. B must divide
// subset_size. Returns epochs * subset_size / B batches.
std::vector<std::vector<int>> static_select(const std::vector<double>& scores, int B,
                                            int epochs, int subset_size,
                                            std::uint64_t seed);

struct BaselineConfig {
  int T = 20;
  int B = 20;
  double learner_lr = 0.5;
  int static_subset = 0;  // 0 resolves to B
  int static_epochs = 0;  // 0 resolves to T * B / subset (step-budget match)
};

// Runs one episode with a non-learned selector: "random", "sspl", or
// "static". For "static", `static_scores` ranks the pool (higher = kept);
// when empty, log p(y|x) is used so the easiest responses form the subset.
EpisodeTrace run_baseline(const Corpus& corpus, const ValidationSet& val,
                          const std::string& method, const BaselineConfig& cfg,
                          std::uint64_t seed,
                          const std::vector<double>& static_scores = {});

}  // namespace dynsel
