#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dynsel {

// One candidate training sample: difficulty features (lengths,
// log-likelihoods), a semantic embedding, and the payload the inner learner
// trains on. utility_tag is synthetic-only ground truth, invisible to the
// selection policy.
struct InstructionRecord {
  int id = 0;
  int prompt_len = 0;
  int response_len = 0;
  double log_p_y_given_x = 0.0;
  double log_p_y = 0.0;
  std::vector<double> embedding;         // length E
  std::vector<double> payload_features;  // length F
  int payload_label = 0;                 // in [0, L)
  std::optional<bool> utility_tag;
};

struct CorpusMeta {
  int E = 0;
  int F = 0;
  int L = 0;
  int N = 0;
  std::string source;        // "synthetic" or a file path
  std::uint64_t seed = 0;    // generator seed when synthetic
  // After split_validation: original id of each (re-indexed) record. Empty
  // means identity. In-memory audit trail only, not serialized.
  std::vector<int> source_ids;
};

struct Corpus {
  std::vector<InstructionRecord> records;  // sorted by id, ids dense 0..N-1
  CorpusMeta meta;
};

// Features/labels drawn from the target task; all the inner learner's
// evaluation ever sees.
struct ValidationSet {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
};

// Parses a JSON Lines corpus file (meta header line, then one record per
// line) and validates every invariant. Errors name the line or record id.
Corpus load_corpus(const std::string& path);

void save_corpus(const Corpus& corpus, const std::string& path);

// Serialized form of save_corpus, used for hashing and round-trip checks.
std::string corpus_to_jsonl(const Corpus& corpus);

// Builds a corpus with planted utility structure: ceil(frac_aligned*n)
// records share the hidden validation task's payload distribution and an
// embedding cluster of their own; the rest come from distractor families
// whose label geometry is unrelated to the task. Deterministic per seed.
Corpus generate_synthetic(std::uint64_t seed, int n, double frac_aligned,
                          int E, int F, int L);

// Splits off n_val records as the validation set (aligned records only when
// the corpus carries utility tags). The remaining training records are
// re-indexed to dense ids 0..N'-1 in original order, with the original ids
// kept in meta.source_ids.
std::pair<Corpus, ValidationSet> split_validation(const Corpus& corpus,
                                                  std::uint64_t seed, int n_val);

}  // namespace dynsel
