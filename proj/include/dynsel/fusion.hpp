#pragma once

#include <unordered_map>
#include <vector>

#include "dynsel/corpus.hpp"

namespace dynsel {

// Training-progress features shared by every record at a step.
struct StageInfo {
  double perf_prev = 0.0;  // P_{t-1}
  int t = 1;
  int T = 1;
};

// Per-record selection counts; resets at the start of each episode.
struct AvailabilityCounter {
  std::unordered_map<int, int> counts;

  int get(int id) const {
    const auto it = counts.find(id);
    return it == counts.end() ? 0 : it->second;
  }
};

// The vector the actor scores: [perf_prev, t/T] ++ [len(x), len(y),
// logP(y|x), logP(y)] ++ pooled embedding ++ [selection count].
struct FusedState {
  int id = 0;
  std::vector<double> vector;
};

inline int fused_dim(int d_sem) { return 7 + d_sem; }

// Contiguous-segment mean pooling of an embedding down to d_sem entries.
std::vector<double> pool_embedding(const std::vector<double>& embedding, int d_sem);

FusedState fuse(const InstructionRecord& record, const StageInfo& stage,
                const AvailabilityCounter& avail, int d_sem);

// Element-wise fuse over the corpus in id order.
std::vector<FusedState> fuse_all(const Corpus& corpus, const StageInfo& stage,
                                 const AvailabilityCounter& avail, int d_sem);

// Returns the counter with each selected id incremented once. A batch is a
// set: duplicate ids are an error.
AvailabilityCounter record_selection(AvailabilityCounter counts,
                                     const std::vector<int>& selected_ids);

}  // namespace dynsel
