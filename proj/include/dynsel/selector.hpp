#pragma once

#include <string>
#include <vector>

#include "dynsel/cluster.hpp"
#include "dynsel/rng.hpp"

namespace dynsel {

struct SelectionConfig {
  int B = 1;           // batch size
  int interval_M = 1;  // policy selection every M steps, random in between
};

// Diversity-constrained top-score selection. Base quota floor(B/C) per
// class; the remainder goes one each to the classes with the highest best
// score (ties by class index); within a class, top-quota by score with ties
// by id ascending; classes smaller than their quota contribute everything
// and the deficit is refilled from the leftover pool in global score order.
// scores[id] indexes by dense record id. Returns B ids, ascending.
std::vector<int> select_batch(const std::vector<double>& scores,
                              const DiversityClasses& classes,
                              const SelectionConfig& cfg);

struct SelectionOutcome {
  std::vector<int> ids;
  std::string selected_by;  // "policy" | "random"
};

// Policy selection on steps 1, 1+M, 1+2M, ...; uniform without-replacement
// random batches everywhere else. step is 1-based.
SelectionOutcome select_or_random(int step, const std::vector<double>& scores,
                                  const DiversityClasses& classes,
                                  const SelectionConfig& cfg, Rng& rng);

}  // namespace dynsel
