#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynsel/baselines.hpp"
#include "dynsel/corpus.hpp"
#include "dynsel/rl.hpp"

namespace dynsel {

struct SyntheticSpec {
  bool enabled = false;
  std::uint64_t seed = 0;
  int n = 0;
  double frac_aligned = 0.0;
  int E = 32;
  int F = 16;
  int L = 4;
};

// One experiment: a method, a corpus source, and the per-module settings,
// parsed from a flat key=value document with dotted sections.
struct ExperimentConfig {
  std::string method;  // raise | rand | sspl | static
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::string corpus_path;  // exactly one of corpus_path / synthetic
  SyntheticSpec synthetic;
  int n_val = 100;
  std::uint64_t val_seed = 7;
  TrainConfig train;
  std::string static_scorer = "neg_difficulty";  // or actor_init
  int static_subset = 0;                          // 0 resolves to B
  int static_epochs = 0;                          // 0 resolves to step-budget match
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Effective settings, one "key = value" per line, defaults filled in.
// Identical runs produce identical text; it is the run_id hash input
// (output paths excluded) and the stored config snapshot.
std::string canonical_config_text(const ExperimentConfig& cfg);
std::string config_run_id(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string format_double(double v);  // shortest round-trip decimal

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<std::pair<int, EpisodeTrace>> rounds;  // (round index, trace)
  double final_perf = 0.0;
  // Wall-clock selection totals; kept for in-process checks, never serialized.
  double selection_seconds = 0.0;
  int policy_invocations = 0;
  bool has_nets = false;  // raise carries the trained actor/critic
  MlpParams theta;
  MlpParams phi;
};

struct ExperimentResult {
  std::string run_id;
  std::string method;
  std::uint64_t corpus_hash = 0;
  std::vector<SeedResult> seeds;
};

// Loads or generates the configured corpus, then splits off the validation
// set. Returned corpus is the training remainder.
std::pair<Corpus, ValidationSet> prepare_corpus(const ExperimentConfig& cfg);

// K-means over (id, embedding) with the experiment's cluster settings.
DiversityClasses cluster_corpus(const Corpus& corpus, const TrainConfig& cfg);

// Per-seed scores from a freshly initialized actor on the initial fused
// batch; the "actor_init" static-baseline scorer.
std::vector<double> actor_init_scores(const Corpus& corpus, const ValidationSet& val,
                                      const TrainConfig& cfg, std::uint64_t seed);

// Runs every seed on its own worker thread; results come back in config
// seed order. raise = train_policy, with final P taken from the last
// training round; baselines run a single episode (round 1). When out_dir
// is set, writes metrics.csv, summary.json, config.snapshot and (raise)
// per-seed checkpoints under out_dir/<run_id>/, all atomically.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string metrics_csv(const ExperimentResult& result);
std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& result);

// (avg_method - avg_full) / (avg_full - avg_zero), as a signed percentage.
double avg_q(double avg_method, double avg_full, double avg_zero);

// P(X >= wins) for X ~ Binomial(nonzero, 1/2): the one-sided sign test.
double sign_test_p(int wins, int nonzero);

struct MethodSummary {
  std::string method;
  std::vector<double> final_perf;  // per seed, in seed order
};

struct ReportRow {
  std::string method;
  int n_seeds = 0;
  double mean = 0.0;
  double stddev = 0.0;       // sample std; 0 when n_seeds < 2
  bool has_comparison = false;  // set on non-reference rows
  double mean_delta = 0.0;   // mean(final_perf - reference final_perf)
  int wins = 0;              // positive deltas
  int nonzero = 0;           // nonzero deltas
  double p_value = 1.0;      // one-sided sign test
};

// Per-method stats plus paired comparison against the named reference
// method. Methods being compared must have the same number of seeds.
std::vector<ReportRow> aggregate(const std::vector<MethodSummary>& methods,
                                 const std::string& reference);

// Reads method and per-seed final performance back out of a run directory's
// summary.json.
MethodSummary read_run_summary(const std::string& run_dir);

// One row per method. When full/zero averages are supplied, appends an
// avg_q column computed from each method's mean.
std::string report_csv(const std::vector<ReportRow>& rows,
                       const std::optional<std::pair<double, double>>& full_zero);

void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dynsel
