#include "dynsel/rl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dynsel/kernels.hpp"

namespace dynsel {

double reward(double perf_t, double perf_prev) { return perf_t - perf_prev; }

std::pair<std::vector<double>, std::vector<double>> gae(
    const std::vector<double>& rewards, const std::vector<double>& values,
    double gamma, double lam) {
  const std::size_t t_len = rewards.size();
  if (values.size() != t_len + 1)
    throw std::invalid_argument("gae: values must have one more entry than rewards");
  std::vector<double> adv(t_len), ret(t_len);
  double acc = 0.0;
  for (std::size_t i = t_len; i-- > 0;) {
    const double delta = rewards[i] + gamma * values[i + 1] - values[i];
    acc = delta + gamma * lam * acc;
    adv[i] = acc;
    ret[i] = values[i] + acc;
  }
  return {std::move(adv), std::move(ret)};
}

std::map<int, double> class_softmax(const std::vector<double>& scores_by_id,
                                    const std::vector<int>& class_members) {
  if (class_members.empty()) throw std::invalid_argument("class_softmax: empty class");
  const auto score_of = [&scores_by_id](int id) {
    if (id < 0 || id >= static_cast<int>(scores_by_id.size()))
      throw std::invalid_argument("class_softmax: id " + std::to_string(id) + " has no score");
    return scores_by_id[static_cast<std::size_t>(id)];
  };
  double mx = score_of(class_members[0]);
  for (int id : class_members) mx = std::max(mx, score_of(id));
  double total = 0.0;
  std::map<int, double> out;
  for (int id : class_members) {
    const double e = std::exp(score_of(id) - mx);
    out[id] = e;
    total += e;
  }
  for (auto& [id, p] : out) {
    (void)id;
    p /= total;
  }
  return out;
}

namespace {

constexpr double kLogRatioClamp = 20.0;

// Shared ratio computation: new/old scores over all fused states, per-class
// log-sum-exp for classes holding selected ids, and the summed log ratio.
struct RatioWork {
  std::vector<double> scores_new;
  std::vector<double> scores_old;
  std::vector<int> n_selected;     // per class
  std::vector<double> lse_new;     // per class, valid where n_selected > 0
  std::vector<double> lse_old;
  double log_ratio = 0.0;          // unclamped
};

double logsumexp_members(const std::vector<double>& scores, const std::vector<int>& members) {
  double mx = scores[static_cast<std::size_t>(members[0])];
  for (int id : members) mx = std::max(mx, scores[static_cast<std::size_t>(id)]);
  double total = 0.0;
  for (int id : members) total += std::exp(scores[static_cast<std::size_t>(id)] - mx);
  return mx + std::log(total);
}

// Old-policy scores are constant per round (theta_old is frozen), so the
// update loop hands compute_ratio a per-transition cache entry filled on
// first visit instead of re-running the old forward pass every epoch.
struct OldScoreEntry {
  bool filled = false;
  std::vector<double> scores;
  std::vector<double> lse;  // per class, valid where the transition selects
};

void compute_ratio(const MlpParams& theta_new, const MlpParams& theta_old,
                   const TransitionRecord& tr, const DiversityClasses& classes,
                   const std::vector<std::vector<int>>& members, RatioWork& w,
                   std::vector<MlpCache>* caches, OldScoreEntry* old_entry) {
  const auto& states = *tr.states;
  const std::size_t n = states.size();
  const bool have_old = old_entry && old_entry->filled;
  w.scores_new.resize(n);
  if (!have_old) w.scores_old.resize(n);
  if (caches) caches->resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (states[j].id != static_cast<int>(j))
      throw std::invalid_argument("transition states must be in dense id order");
    const double* x = states[j].vector.data();
    w.scores_new[j] = caches ? mlp_forward_cached(theta_new, x, (*caches)[j])
                             : mlp_forward(theta_new, x);
    if (!have_old) w.scores_old[j] = mlp_forward(theta_old, x);
  }

  const std::size_t c_count = members.size();
  w.n_selected.assign(c_count, 0);
  w.lse_new.assign(c_count, 0.0);
  if (!have_old) w.lse_old.assign(c_count, 0.0);
  for (int id : tr.selected) {
    const auto it = classes.assignment.find(id);
    if (it == classes.assignment.end())
      throw std::invalid_argument("selected id " + std::to_string(id) +
                                  " missing from diversity classes");
    ++w.n_selected[static_cast<std::size_t>(it->second)];
  }
  for (std::size_t c = 0; c < c_count; ++c) {
    if (w.n_selected[c] == 0) continue;
    w.lse_new[c] = logsumexp_members(w.scores_new, members[c]);
    if (!have_old) w.lse_old[c] = logsumexp_members(w.scores_old, members[c]);
  }
  if (have_old) {
    w.scores_old = old_entry->scores;
    w.lse_old = old_entry->lse;
  } else if (old_entry) {
    old_entry->scores = w.scores_old;
    old_entry->lse = w.lse_old;
    old_entry->filled = true;
  }

  double log_ratio = 0.0;
  for (int id : tr.selected) {
    const std::size_t c = static_cast<std::size_t>(classes.assignment.at(id));
    const std::size_t j = static_cast<std::size_t>(id);
    log_ratio += (w.scores_new[j] - w.lse_new[c]) - (w.scores_old[j] - w.lse_old[c]);
  }
  w.log_ratio = log_ratio;
}

double clamp_log_ratio(double v, bool* clamped) {
  if (v > kLogRatioClamp) {
    if (clamped) *clamped = true;
    return kLogRatioClamp;
  }
  if (v < -kLogRatioClamp) {
    if (clamped) *clamped = true;
    return -kLogRatioClamp;
  }
  return v;
}

}  // namespace

double importance_log_ratio(const MlpParams& theta_new, const MlpParams& theta_old,
                            const TransitionRecord& transition,
                            const DiversityClasses& classes) {
  RatioWork w;
  const auto members = classes.members();
  compute_ratio(theta_new, theta_old, transition, classes, members, w, nullptr, nullptr);
  return clamp_log_ratio(w.log_ratio, nullptr);
}

namespace {

std::pair<double, MlpGrad> actor_loss_and_grad_impl(
    const MlpParams& theta, const MlpParams& theta_old,
    const std::vector<const TransitionRecord*>& batch,
    const std::vector<double>& advantages, const DiversityClasses& classes,
    double eps_clip, const std::vector<OldScoreEntry*>* old_entries) {
  if (batch.empty()) throw std::invalid_argument("actor_loss_and_grad: empty batch");
  if (batch.size() != advantages.size())
    throw std::invalid_argument("actor_loss_and_grad: batch/advantages length mismatch");
  if (!(eps_clip > 0.0)) throw std::invalid_argument("actor_loss_and_grad: eps_clip must be > 0");

  const auto members = classes.members();
  MlpGrad grad = zero_grad(theta);
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  RatioWork w;
  std::vector<MlpCache> caches;
  std::vector<double> upstream;

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const TransitionRecord& tr = *batch[b];
    compute_ratio(theta, theta_old, tr, classes, members, w, &caches,
                  old_entries ? (*old_entries)[b] : nullptr);
    bool clamped = false;
    const double log_ratio = clamp_log_ratio(w.log_ratio, &clamped);
    const double ratio = std::exp(log_ratio);
    const double adv = advantages[b];
    const double clipped = std::clamp(ratio, 1.0 - eps_clip, 1.0 + eps_clip);
    const double surr_raw = ratio * adv;
    const double surr_clip = clipped * adv;
    loss += -std::min(surr_raw, surr_clip);

    // Subgradient of min: the ratio only carries gradient when the raw
    // branch is active and the log-ratio safety clamp did not trigger.
    if (surr_raw <= surr_clip && !clamped && adv != 0.0) {
      const double d_logr = -ratio * adv * inv;  // d(loss_b)/d(log ratio), batch-averaged
      const std::size_t n = tr.states->size();
      upstream.assign(n, 0.0);
      for (std::size_t c = 0; c < members.size(); ++c) {
        if (w.n_selected[c] == 0) continue;
        const double n_i = static_cast<double>(w.n_selected[c]);
        for (int id : members[c]) {
          const std::size_t j = static_cast<std::size_t>(id);
          const double p = std::exp(w.scores_new[j] - w.lse_new[c]);
          upstream[j] = d_logr * (-n_i * p);
        }
      }
      for (int id : tr.selected) upstream[static_cast<std::size_t>(id)] += d_logr;
      for (std::size_t j = 0; j < n; ++j)
        mlp_backward_cached(theta, caches[j], upstream[j], grad);
    }
  }
  return {loss * inv, std::move(grad)};
}

}  // namespace

std::pair<double, MlpGrad> actor_loss_and_grad(
    const MlpParams& theta, const MlpParams& theta_old,
    const std::vector<const TransitionRecord*>& batch,
    const std::vector<double>& advantages, const DiversityClasses& classes,
    double eps_clip) {
  return actor_loss_and_grad_impl(theta, theta_old, batch, advantages, classes, eps_clip,
                                  nullptr);
}

std::pair<double, MlpGrad> critic_loss_and_grad(
    const MlpParams& phi, const std::vector<const TransitionRecord*>& batch,
    const std::vector<double>& returns) {
  if (batch.empty()) throw std::invalid_argument("critic_loss_and_grad: empty batch");
  if (batch.size() != returns.size())
    throw std::invalid_argument("critic_loss_and_grad: batch/returns length mismatch");
  MlpGrad grad = zero_grad(phi);
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const CriticInput& in = batch[b]->critic_input;
    const double v = critic_value(phi, in);
    const double diff = v - returns[b];
    loss += diff * diff;
    mlp_backward(phi, in.vector.data(), 2.0 * diff * inv, grad);
  }
  return {loss * inv, std::move(grad)};
}

EpisodeTrace drive_episode(const Corpus& corpus, const ValidationSet& val, int T,
                           int B, double learner_lr, const SelectFn& select) {
  const int n = static_cast<int>(corpus.records.size());
  if (T < 1) throw std::invalid_argument("drive_episode: T must be >= 1");
  if (B < 1 || B > n) throw std::invalid_argument("drive_episode: need 1 <= B <= N");

  bool tagged = false;
  for (const auto& r : corpus.records)
    if (r.utility_tag) tagged = true;

  LearnerState learner = learner_init(0, corpus.meta.F, corpus.meta.L);
  AvailabilityCounter avail;
  EpisodeTrace trace;
  trace.perf0 = performance(learner, val);
  double perf_prev = trace.perf0;

  for (int t = 1; t <= T; ++t) {
    const StageInfo stage{perf_prev, t, T};
    const auto t0 = std::chrono::steady_clock::now();
    StepChoice choice = select(t, stage, avail);
    trace.selection_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (static_cast<int>(choice.ids.size()) != B)
      throw std::runtime_error("episode step " + std::to_string(t) + ": selector returned " +
                               std::to_string(choice.ids.size()) + " ids, expected " +
                               std::to_string(B));

    std::vector<const InstructionRecord*> batch;
    batch.reserve(choice.ids.size());
    for (int id : choice.ids) {
      if (id < 0 || id >= n)
        throw std::runtime_error("episode step " + std::to_string(t) + ": id out of range");
      batch.push_back(&corpus.records[static_cast<std::size_t>(id)]);
    }
    learner = learner_update(learner, batch, learner_lr);
    const double perf_t = performance(learner, val);

    StepRecord row;
    row.step = t;
    row.selected_by = std::move(choice.selected_by);
    row.perf = perf_t;
    row.reward = reward(perf_t, perf_prev);
    row.has_scores = choice.has_scores;
    row.mean_score_selected = choice.mean_score_selected;
    row.mean_score_unselected = choice.mean_score_unselected;
    if (tagged) {
      int aligned = 0;
      for (const InstructionRecord* r : batch)
        if (r->utility_tag && *r->utility_tag) ++aligned;
      row.frac_aligned_selected = static_cast<double>(aligned) / B;
    }
    row.selected = std::move(choice.ids);
    if (row.selected_by == "policy") ++trace.policy_invocations;
    avail = record_selection(avail, row.selected);
    trace.steps.push_back(std::move(row));
    perf_prev = perf_t;
  }
  trace.final_perf = perf_prev;
  return trace;
}

std::pair<EpisodeTrace, std::vector<TransitionRecord>> run_episode(
    const Corpus& corpus, const ValidationSet& val, const DiversityClasses& classes,
    const MlpParams& theta, const MlpParams& phi, const TrainConfig& cfg,
    std::uint64_t seed) {
  const int n = static_cast<int>(corpus.records.size());
  if (cfg.interval_M < 1) throw std::invalid_argument("run_episode: interval_M must be >= 1");
  Rng rng(mix_seed(seed, 31));
  std::vector<TransitionRecord> transitions;
  bool has_pending = false;
  double pending_base = 0.0;
  const SelectionConfig scfg{cfg.B, cfg.interval_M};

  const SelectFn select = [&](int t, const StageInfo& stage,
                              const AvailabilityCounter& avail) -> StepChoice {
    if ((t - 1) % cfg.interval_M != 0) {
      return {rng.sample_without_replacement(n, cfg.B), "random", false, 0.0, 0.0};
    }
    auto states = std::make_shared<std::vector<FusedState>>(
        fuse_all(corpus, stage, avail, cfg.d_sem));
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (const auto& s : *states)
      scores[static_cast<std::size_t>(s.id)] = actor_score(theta, s);
    std::vector<int> ids = select_batch(scores, classes, scfg);

    if (has_pending) {
      transitions.back().reward = stage.perf_prev - pending_base;
      transitions.back().next_states = states;
    }
    TransitionRecord tr;
    tr.states = states;
    tr.selected = ids;
    tr.critic_input = make_critic_input(*states);
    tr.value = critic_value(phi, tr.critic_input);
    transitions.push_back(std::move(tr));
    pending_base = stage.perf_prev;
    has_pending = true;

    std::vector<char> in_sel(static_cast<std::size_t>(n), 0);
    for (int id : ids) in_sel[static_cast<std::size_t>(id)] = 1;
    double sum_sel = 0.0, sum_unsel = 0.0;
    for (int j = 0; j < n; ++j)
      (in_sel[static_cast<std::size_t>(j)] ? sum_sel : sum_unsel) +=
          scores[static_cast<std::size_t>(j)];
    StepChoice out;
    out.ids = std::move(ids);
    out.selected_by = "policy";
    out.has_scores = true;
    out.mean_score_selected = sum_sel / cfg.B;
    out.mean_score_unselected = n > cfg.B ? sum_unsel / (n - cfg.B) : 0.0;
    return out;
  };

  EpisodeTrace trace = drive_episode(corpus, val, cfg.ppo.T, cfg.B, cfg.learner_lr, select);
  if (has_pending) transitions.back().reward = trace.final_perf - pending_base;
  return {std::move(trace), std::move(transitions)};
}

namespace {

std::vector<double> standardize(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> out(n);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double sd = 1.0;
  if (n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  sd = std::max(sd, 1e-8);
  for (std::size_t i = 0; i < n; ++i) out[i] = (v[i] - mean) / sd;
  return out;
}

}  // namespace

TrainResult train_policy(const Corpus& corpus, const ValidationSet& val,
                         const TrainConfig& cfg, std::uint64_t seed) {
  const auto& p = cfg.ppo;
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw std::invalid_argument("train_policy: gamma in [0,1]");
  if (!(p.lam >= 0.0 && p.lam <= 1.0)) throw std::invalid_argument("train_policy: lam in [0,1]");
  if (!(p.eps_clip > 0.0)) throw std::invalid_argument("train_policy: eps_clip must be > 0");
  if (p.K < 1 || p.K2 < 0 || p.T < 1 || p.minibatch < 1)
    throw std::invalid_argument("train_policy: need K >= 1, K2 >= 0, T >= 1, minibatch >= 1");
  if (cfg.C < 1 || cfg.B < cfg.C) throw std::invalid_argument("train_policy: need B >= C >= 1");

  ClusterPoints points;
  points.reserve(corpus.records.size());
  for (const auto& r : corpus.records) points.emplace_back(r.id, r.embedding);
  DiversityClasses classes =
      kmeans_multi(points, cfg.C, cfg.cluster_seed, cfg.cluster_max_iters, cfg.cluster_tol);

  const int d_in = fused_dim(cfg.d_sem);
  MlpParams theta = init_params(mix_seed(seed, 41), d_in, cfg.hidden);
  MlpParams phi = init_params(mix_seed(seed, 42), d_in + 2, cfg.hidden);

  // Input normalization, fitted once from the first round's initial fused
  // batch and frozen. The critic reuses the fused statistics: its input is
  // the fused mean plus the stage features, which are fused dims 0 and 1.
  {
    LearnerState l0 = learner_init(seed, corpus.meta.F, corpus.meta.L);
    const double p0 = performance(l0, val);
    const AvailabilityCounter fresh;
    const auto states0 = fuse_all(corpus, StageInfo{p0, 1, p.T}, fresh, cfg.d_sem);
    std::vector<const double*> ptrs;
    ptrs.reserve(states0.size());
    for (const auto& s : states0) ptrs.push_back(s.vector.data());
    fit_normalization(theta, ptrs);
    for (int j = 0; j < d_in; ++j) {
      phi.shift[static_cast<std::size_t>(j)] = theta.shift[static_cast<std::size_t>(j)];
      phi.scale[static_cast<std::size_t>(j)] = theta.scale[static_cast<std::size_t>(j)];
    }
    phi.shift[static_cast<std::size_t>(d_in)] = theta.shift[0];
    phi.scale[static_cast<std::size_t>(d_in)] = theta.scale[0];
    phi.shift[static_cast<std::size_t>(d_in) + 1] = theta.shift[1];
    phi.scale[static_cast<std::size_t>(d_in) + 1] = theta.scale[1];
  }

  TrainResult result;
  for (int k = 1; k <= p.K; ++k) {
    auto [trace, transitions] =
        run_episode(corpus, val, classes, theta, phi, cfg, mix_seed(seed, 100 + static_cast<std::uint64_t>(k)));
    result.traces.push_back(std::move(trace));
    if (!cfg.spill_dir.empty())
      write_transitions(cfg.spill_dir + "/buffer_round_" + std::to_string(k) + ".bin",
                        transitions);

    const std::size_t m = transitions.size();
    std::vector<double> rewards(m), values(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      rewards[i] = transitions[i].reward;
      values[i] = transitions[i].value;
    }
    const auto [adv, ret] = gae(rewards, values, p.gamma, p.lam);
    const auto adv_std = standardize(adv);

    const MlpParams theta_old = theta;
    Rng rng_upd(mix_seed(seed, 1000 + static_cast<std::uint64_t>(k)));
    std::vector<int> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = static_cast<int>(i);
    std::vector<OldScoreEntry> old_cache(m);
    for (int epoch = 0; epoch < p.K2; ++epoch) {
      rng_upd.shuffle(order);
      for (std::size_t beg = 0; beg < m; beg += static_cast<std::size_t>(p.minibatch)) {
        const std::size_t end = std::min(m, beg + static_cast<std::size_t>(p.minibatch));
        std::vector<const TransitionRecord*> mb;
        std::vector<OldScoreEntry*> mb_old;
        std::vector<double> mb_adv, mb_ret;
        for (std::size_t i = beg; i < end; ++i) {
          const std::size_t idx = static_cast<std::size_t>(order[i]);
          mb.push_back(&transitions[idx]);
          mb_old.push_back(&old_cache[idx]);
          mb_adv.push_back(adv_std[idx]);
          mb_ret.push_back(ret[idx]);
        }
        const auto [a_loss, a_grad] =
            actor_loss_and_grad_impl(theta, theta_old, mb, mb_adv, classes, p.eps_clip, &mb_old);
        (void)a_loss;
        theta = sgd_wd_step(std::move(theta), a_grad, cfg.actor_lr, cfg.weight_decay);
        const auto [c_loss, c_grad] = critic_loss_and_grad(phi, mb, mb_ret);
        (void)c_loss;
        phi = sgd_wd_step(std::move(phi), c_grad, cfg.critic_lr, cfg.weight_decay);
      }
    }
  }
  result.theta = std::move(theta);
  result.phi = std::move(phi);
  result.classes = std::move(classes);
  return result;
}

namespace {

constexpr std::uint32_t kBufferMagic = 0x42525344u;  // "DSRB"

template <typename T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
  T v;
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!f.good()) throw std::runtime_error("replay buffer file truncated");
  return v;
}

void put_states(std::ofstream& f, const std::vector<FusedState>& states) {
  put<std::uint64_t>(f, states.size());
  put<std::uint64_t>(f, states.empty() ? 0 : states[0].vector.size());
  for (const auto& s : states) {
    put<std::int32_t>(f, s.id);
    f.write(reinterpret_cast<const char*>(s.vector.data()),
            static_cast<std::streamsize>(s.vector.size() * sizeof(double)));
  }
}

std::shared_ptr<std::vector<FusedState>> get_states(std::ifstream& f) {
  const auto n = get<std::uint64_t>(f);
  const auto dim = get<std::uint64_t>(f);
  auto states = std::make_shared<std::vector<FusedState>>(n);
  for (auto& s : *states) {
    s.id = get<std::int32_t>(f);
    s.vector.resize(dim);
    f.read(reinterpret_cast<char*>(s.vector.data()),
           static_cast<std::streamsize>(dim * sizeof(double)));
    if (!f.good()) throw std::runtime_error("replay buffer file truncated");
  }
  return states;
}

}  // namespace

void write_transitions(const std::string& path,
                       const std::vector<TransitionRecord>& transitions) {
  std::ofstream f(path, std::ios::binary);
  if (!f.good()) throw std::runtime_error("cannot open for writing: " + path);
  put<std::uint32_t>(f, kBufferMagic);
  put<std::uint32_t>(f, 1u);
  put<std::uint64_t>(f, transitions.size());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& tr = transitions[i];
    put_states(f, *tr.states);
    put<std::uint64_t>(f, tr.selected.size());
    for (int id : tr.selected) put<std::int32_t>(f, id);
    put<double>(f, tr.reward);
    put<double>(f, tr.value);
    std::uint8_t flag = 0;
    if (tr.next_states) {
      const bool shared_with_next =
          i + 1 < transitions.size() && tr.next_states == transitions[i + 1].states;
      flag = shared_with_next ? 1 : 2;
    }
    put<std::uint8_t>(f, flag);
    if (flag == 2) put_states(f, *tr.next_states);
  }
  if (!f.good()) throw std::runtime_error("write failed: " + path);
}

std::vector<TransitionRecord> read_transitions(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f.good()) throw std::runtime_error("cannot open replay buffer: " + path);
  if (get<std::uint32_t>(f) != kBufferMagic)
    throw std::runtime_error("not a replay buffer file: " + path);
  if (get<std::uint32_t>(f) != 1u)
    throw std::runtime_error("unsupported replay buffer version: " + path);
  const auto m = get<std::uint64_t>(f);
  std::vector<TransitionRecord> out(m);
  std::vector<std::uint8_t> flags(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    auto& tr = out[i];
    tr.states = get_states(f);
    const auto b = get<std::uint64_t>(f);
    tr.selected.resize(b);
    for (auto& id : tr.selected) id = get<std::int32_t>(f);
    tr.reward = get<double>(f);
    tr.value = get<double>(f);
    flags[i] = get<std::uint8_t>(f);
    if (flags[i] == 2) tr.next_states = get_states(f);
    tr.critic_input = make_critic_input(*tr.states);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (flags[i] == 1) {
      if (i + 1 >= m) throw std::runtime_error("replay buffer: dangling next-state link");
      out[i].next_states = out[i + 1].states;
    }
  }
  return out;
}

}  // namespace dynsel
