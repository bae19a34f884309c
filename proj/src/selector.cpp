#include "dynsel/selector.hpp"

#include <algorithm>
#include <stdexcept>

namespace dynsel {

std::vector<int> select_batch(const std::vector<double>& scores,
                              const DiversityClasses& classes,
                              const SelectionConfig& cfg) {
  const int n = static_cast<int>(classes.assignment.size());
  const int b_total = cfg.B;
  const int c_count = classes.C;
  if (b_total < 1) throw std::invalid_argument("select_batch: B must be >= 1");
  if (b_total > n) throw std::invalid_argument("select_batch: B exceeds corpus size");
  if (c_count < 1 || b_total < c_count)
    throw std::invalid_argument("select_batch: need B >= C >= 1");

  auto members = classes.members();
  const auto score_of = [&scores](int id) {
    if (id < 0 || id >= static_cast<int>(scores.size()))
      throw std::invalid_argument("select_batch: id " + std::to_string(id) + " has no score");
    return scores[static_cast<std::size_t>(id)];
  };
  // Within-class order: score descending, id ascending on ties. Member lists
  // arrive id-ascending, so stable_sort keeps the tie-break.
  for (auto& m : members)
    std::stable_sort(m.begin(), m.end(),
                     [&](int a, int b) { return score_of(a) > score_of(b); });

  // Base quota per class, remainder to the classes with the best top score.
  std::vector<int> quota(static_cast<std::size_t>(c_count), b_total / c_count);
  int rem = b_total - (b_total / c_count) * c_count;
  if (rem > 0) {
    std::vector<int> order(static_cast<std::size_t>(c_count));
    for (int c = 0; c < c_count; ++c) order[static_cast<std::size_t>(c)] = c;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const auto& ma = members[static_cast<std::size_t>(a)];
      const auto& mb = members[static_cast<std::size_t>(b)];
      if (ma.empty() || mb.empty()) return mb.empty() && !ma.empty();
      return score_of(ma[0]) > score_of(mb[0]);
    });
    for (int i = 0; i < rem; ++i) ++quota[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }

  // Per-class take; whatever a short class cannot fill comes from the
  // leftover pool in global (score desc, id asc) order.
  std::vector<int> picked;
  std::vector<int> leftover;
  picked.reserve(static_cast<std::size_t>(b_total));
  for (int c = 0; c < c_count; ++c) {
    const auto& m = members[static_cast<std::size_t>(c)];
    const int take = std::min<int>(quota[static_cast<std::size_t>(c)], static_cast<int>(m.size()));
    picked.insert(picked.end(), m.begin(), m.begin() + take);
    leftover.insert(leftover.end(), m.begin() + take, m.end());
  }
  if (static_cast<int>(picked.size()) < b_total) {
    std::sort(leftover.begin(), leftover.end(), [&](int a, int b) {
      const double sa = score_of(a), sb = score_of(b);
      if (sa != sb) return sa > sb;
      return a < b;
    });
    const int need = b_total - static_cast<int>(picked.size());
    picked.insert(picked.end(), leftover.begin(), leftover.begin() + need);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

SelectionOutcome select_or_random(int step, const std::vector<double>& scores,
                                  const DiversityClasses& classes,
                                  const SelectionConfig& cfg, Rng& rng) {
  if (step < 1) throw std::invalid_argument("select_or_random: step is 1-based");
  if (cfg.interval_M < 1) throw std::invalid_argument("select_or_random: interval_M must be >= 1");
  if ((step - 1) % cfg.interval_M == 0)
    return {select_batch(scores, classes, cfg), "policy"};
  const int n = static_cast<int>(classes.assignment.size());
  return {rng.sample_without_replacement(n, cfg.B), "random"};
}

}  // namespace dynsel
