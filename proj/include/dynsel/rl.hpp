#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dynsel/cluster.hpp"
#include "dynsel/corpus.hpp"
#include "dynsel/fusion.hpp"
#include "dynsel/learner.hpp"
#include "dynsel/nets.hpp"
#include "dynsel/selector.hpp"

namespace dynsel {

// One replay-buffer entry. states/next_states hold every fused vector at the
// step (next_states is shared with the following entry's states; null at the
// end of the episode). critic_input caches the set summary of states.
struct TransitionRecord {
  std::shared_ptr<const std::vector<FusedState>> states;
  std::vector<int> selected;
  double reward = 0.0;
  double value = 0.0;
  std::shared_ptr<const std::vector<FusedState>> next_states;
  CriticInput critic_input;
};

struct PpoConfig {
  double gamma = 0.99;
  double lam = 1.0;
  double eps_clip = 0.2;
  int K = 20;         // rounds
  int K2 = 20;        // update epochs per round
  int T = 20;         // steps per round
  int minibatch = 8;  // transitions per update
};

// Everything train_policy needs beyond the corpus: episode shape, network
// sizes, optimizer settings, and the clustering that defines the diversity
// classes.
struct TrainConfig {
  PpoConfig ppo;
  int B = 20;
  int interval_M = 1;
  int d_sem = 32;
  int hidden = 64;
  double learner_lr = 0.5;
  double actor_lr = 0.1;
  double critic_lr = 0.2;
  double weight_decay = 0.01;
  int C = 1;
  std::uint64_t cluster_seed = 0;
  int cluster_max_iters = 50;
  double cluster_tol = 1e-6;
  std::string spill_dir;  // when set, each round's buffer is written here
};

struct StepRecord {
  int step = 0;
  std::string selected_by;
  double perf = 0.0;    // P_t, after this step's update
  double reward = 0.0;  // P_t - P_{t-1}
  bool has_scores = false;
  double mean_score_selected = 0.0;
  double mean_score_unselected = 0.0;
  double frac_aligned_selected = -1.0;  // < 0 when the corpus is untagged
  std::vector<int> selected;
};

struct EpisodeTrace {
  double perf0 = 0.0;
  double final_perf = 0.0;
  std::vector<StepRecord> steps;
  double selection_seconds = 0.0;  // time spent choosing batches
  int policy_invocations = 0;
};

double reward(double perf_t, double perf_prev);

// values has one extra entry: the bootstrap value of the state after the
// last step (zero at episode end). Returns (advantages, returns).
std::pair<std::vector<double>, std::vector<double>> gae(
    const std::vector<double>& rewards, const std::vector<double>& values,
    double gamma, double lam);

// Softmax over one class's scores (max-subtracted), keyed by member id.
std::map<int, double> class_softmax(const std::vector<double>& scores_by_id,
                                    const std::vector<int>& class_members);

// log of the product over selected ids of new/old per-class softmax
// probability quotients, clamped to [-20, 20].
double importance_log_ratio(const MlpParams& theta_new, const MlpParams& theta_old,
                            const TransitionRecord& transition,
                            const DiversityClasses& classes);

// Negated clipped-surrogate objective, averaged over the batch; the gradient
// flows through the ratio only where the unclipped branch is active.
std::pair<double, MlpGrad> actor_loss_and_grad(
    const MlpParams& theta, const MlpParams& theta_old,
    const std::vector<const TransitionRecord*>& batch,
    const std::vector<double>& advantages, const DiversityClasses& classes,
    double eps_clip);

// Mean squared error of the critic against the returns.
std::pair<double, MlpGrad> critic_loss_and_grad(
    const MlpParams& phi, const std::vector<const TransitionRecord*>& batch,
    const std::vector<double>& returns);

// Generic episode loop shared by the policy and every baseline: init learner,
// then per step select -> update -> evaluate -> reward -> count selections.
struct StepChoice {
  std::vector<int> ids;
  std::string selected_by;
  bool has_scores = false;
  double mean_score_selected = 0.0;
  double mean_score_unselected = 0.0;
};
using SelectFn =
    std::function<StepChoice(int t, const StageInfo& stage, const AvailabilityCounter& avail)>;

EpisodeTrace drive_episode(const Corpus& corpus, const ValidationSet& val, int T,
                           int B, double learner_lr, const SelectFn& select);

// One data-collection episode under the current actor/critic: fuses, scores,
// selects every interval_M-th step (random batches between), and records one
// transition per policy step whose reward spans the steps up to the next
// policy selection.
std::pair<EpisodeTrace, std::vector<TransitionRecord>> run_episode(
    const Corpus& corpus, const ValidationSet& val, const DiversityClasses& classes,
    const MlpParams& theta, const MlpParams& phi, const TrainConfig& cfg,
    std::uint64_t seed);

// K rounds of collect-then-update. Input normalization is fitted once from
// the first round's initial fused batch; theta_old stays fixed across the K2
// epochs of a round; advantages are standardized per round.
struct TrainResult {
  MlpParams theta;
  MlpParams phi;
  std::vector<EpisodeTrace> traces;  // one per round
  DiversityClasses classes;
};

TrainResult train_policy(const Corpus& corpus, const ValidationSet& val,
                         const TrainConfig& cfg, std::uint64_t seed);

// Replay-buffer spill format (one file per round).
void write_transitions(const std::string& path,
                       const std::vector<TransitionRecord>& transitions);
std::vector<TransitionRecord> read_transitions(const std::string& path);

}  // namespace dynsel
