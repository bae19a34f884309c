#include "dynsel/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dynsel/learner.hpp"

namespace dynsel {

std::vector<int> rand_select(int step, int n, int B, Rng& rng) {
  (void)step;
  return rng.sample_without_replacement(n, B);
}

std::vector<std::vector<int>> sspl_schedule(const std::vector<double>& initial_losses,
                                            int total_steps, int B) {
  const int n = static_cast<int>(initial_losses.size());
  if (total_steps < 1) throw std::invalid_argument("sspl_schedule: total_steps must be >= 1");
  if (B < 1 || B > n) throw std::invalid_argument("sspl_schedule: need 1 <= B <= N");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&initial_losses](int a, int b) {
    const double la = initial_losses[static_cast<std::size_t>(a)];
    const double lb = initial_losses[static_cast<std::size_t>(b)];
    if (la != lb) return la < lb;
    return a < b;
  });

  const int q = n / total_steps;
  const int r = n % total_steps;
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(total_steps));
  std::size_t pos = 0;
  for (int k = 0; k < total_steps; ++k) {
    const int size = q + (k < r ? 1 : 0);
    auto& bucket = buckets[static_cast<std::size_t>(k)];
    bucket.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                  order.begin() + static_cast<std::ptrdiff_t>(pos) + size);
    pos += static_cast<std::size_t>(size);
  }
  return buckets;
}

std::vector<int> sspl_step_ids(const std::vector<std::vector<int>>& schedule, int step,
                               int B) {
  const int len = static_cast<int>(schedule.size());
  if (len < 1) throw std::invalid_argument("sspl_step_ids: empty schedule");
  if (step < 1 || step > len)
    throw std::invalid_argument("sspl_step_ids: step out of range");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(B));
  for (int k = 0; k < len && static_cast<int>(out.size()) < B; ++k) {
    const auto& bucket = schedule[static_cast<std::size_t>((step - 1 + k) % len)];
    for (int id : bucket) {
      if (static_cast<int>(out.size()) == B) break;
      out.push_back(id);
    }
  }
  if (static_cast<int>(out.size()) != B)
    throw std::invalid_argument("sspl_step_ids: schedule holds fewer than B ids");
  return out;
}

std::vector<std::vector<int>> static_select(const std::vector<double>& scores, int B,
                                            int epochs, int subset_size,
                                            std::uint64_t seed) {
  const int n = static_cast<int>(scores.size());
  if (B < 1) throw std::invalid_argument("static_select: B must be >= 1");
  if (subset_size < B || subset_size > n)
    throw std::invalid_argument("static_select: need B <= subset_size <= N");
  if (subset_size % B != 0)
    throw std::invalid_argument("static_select: B must divide subset_size");
  if (epochs < 1) throw std::invalid_argument("static_select: epochs must be >= 1");

  std::vector<int> ranked(static_cast<std::size_t>(n));
  std::iota(ranked.begin(), ranked.end(), 0);
  std::sort(ranked.begin(), ranked.end(), [&scores](int a, int b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  std::vector<int> subset(ranked.begin(), ranked.begin() + subset_size);
  std::sort(subset.begin(), subset.end());

  std::vector<std::vector<int>> batches;
  batches.reserve(static_cast<std::size_t>(epochs) *
                  static_cast<std::size_t>(subset_size / B));
  for (int e = 1; e <= epochs; ++e) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(e)));
    std::vector<int> pass = subset;
    rng.shuffle(pass);
    for (int beg = 0; beg < subset_size; beg += B)
      batches.emplace_back(pass.begin() + beg, pass.begin() + beg + B);
  }
  return batches;
}

EpisodeTrace run_baseline(const Corpus& corpus, const ValidationSet& val,
                          const std::string& method, const BaselineConfig& cfg,
                          std::uint64_t seed,
                          const std::vector<double>& static_scores) {
  const int n = static_cast<int>(corpus.records.size());

  if (method == "random") {
    Rng rng(mix_seed(seed, 31));
    const SelectFn select = [&rng, n, &cfg](int t, const StageInfo&,
                                            const AvailabilityCounter&) -> StepChoice {
      return {rand_select(t, n, cfg.B, rng), "random", false, 0.0, 0.0};
    };
    return drive_episode(corpus, val, cfg.T, cfg.B, cfg.learner_lr, select);
  }

  if (method == "sspl") {
    const LearnerState l0 = learner_init(seed, corpus.meta.F, corpus.meta.L);
    std::vector<double> losses(static_cast<std::size_t>(n));
    for (const auto& r : corpus.records)
      losses[static_cast<std::size_t>(r.id)] =
          mean_cross_entropy(l0, {r.payload_features}, {r.payload_label});
    const auto schedule = sspl_schedule(losses, cfg.T, cfg.B);
    const SelectFn select = [&schedule, &cfg](int t, const StageInfo&,
                                              const AvailabilityCounter&) -> StepChoice {
      return {sspl_step_ids(schedule, t, cfg.B), "sspl", false, 0.0, 0.0};
    };
    return drive_episode(corpus, val, cfg.T, cfg.B, cfg.learner_lr, select);
  }

  if (method == "static") {
    std::vector<double> scores = static_scores;
    if (scores.empty()) {
      scores.resize(static_cast<std::size_t>(n));
      for (const auto& r : corpus.records)
        scores[static_cast<std::size_t>(r.id)] = r.log_p_y_given_x;
    }
    if (static_cast<int>(scores.size()) != n)
      throw std::invalid_argument("run_baseline: static scores must cover every id");
    const int subset = cfg.static_subset > 0 ? cfg.static_subset : cfg.B;
    int epochs = cfg.static_epochs;
    if (epochs <= 0) {
      // Match the step budget: schedule length epochs * subset / B >= T.
      epochs = (cfg.T * cfg.B + subset - 1) / subset;
      epochs = std::max(epochs, 1);
    }
    const auto batches = static_select(scores, cfg.B, epochs, subset, seed);
    const int len = static_cast<int>(batches.size());
    const SelectFn select = [&batches, len](int t, const StageInfo&,
                                            const AvailabilityCounter&) -> StepChoice {
      return {batches[static_cast<std::size_t>((t - 1) % len)], "static", false, 0.0, 0.0};
    };
    return drive_episode(corpus, val, cfg.T, cfg.B, cfg.learner_lr, select);
  }

  throw std::invalid_argument("run_baseline: unknown method: " + method);
}

}  // namespace dynsel
