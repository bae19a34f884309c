#include "dynsel/corpus.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "dynsel/rng.hpp"

namespace dynsel {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

json record_to_json(const InstructionRecord& r) {
  json j;
  j["id"] = r.id;
  j["prompt_len"] = r.prompt_len;
  j["response_len"] = r.response_len;
  j["log_p_y_given_x"] = r.log_p_y_given_x;
  j["log_p_y"] = r.log_p_y;
  j["embedding"] = r.embedding;
  j["payload_features"] = r.payload_features;
  j["payload_label"] = r.payload_label;
  if (r.utility_tag) j["utility_tag"] = *r.utility_tag;
  return j;
}

InstructionRecord record_from_json(const json& j, int line_no) {
  InstructionRecord r;
  try {
    r.id = j.at("id").get<int>();
    r.prompt_len = j.at("prompt_len").get<int>();
    r.response_len = j.at("response_len").get<int>();
    r.log_p_y_given_x = j.at("log_p_y_given_x").get<double>();
    r.log_p_y = j.at("log_p_y").get<double>();
    r.embedding = j.at("embedding").get<std::vector<double>>();
    r.payload_features = j.at("payload_features").get<std::vector<double>>();
    r.payload_label = j.at("payload_label").get<int>();
    if (j.contains("utility_tag")) r.utility_tag = j.at("utility_tag").get<bool>();
  } catch (const json::exception& e) {
    throw std::runtime_error("corpus record at line " + std::to_string(line_no) +
                             ": " + e.what());
  }
  return r;
}

void validate_record(const InstructionRecord& r, int E, int F, int L) {
  const std::string at = " at id=" + std::to_string(r.id);
  require(r.prompt_len >= 0, "prompt_len must be >= 0" + at);
  require(r.response_len >= 0, "response_len must be >= 0" + at);
  require(r.log_p_y_given_x <= 0.0, "log_p_y_given_x must be <= 0" + at);
  require(r.log_p_y <= 0.0, "log_p_y must be <= 0" + at);
  require(std::isfinite(r.log_p_y_given_x) && std::isfinite(r.log_p_y),
          "log-likelihoods must be finite" + at);
  require(static_cast<int>(r.embedding.size()) == E,
          "embedding length must equal E=" + std::to_string(E) + at);
  require(static_cast<int>(r.payload_features.size()) == F,
          "payload_features length must equal F=" + std::to_string(F) + at);
  require(r.payload_label >= 0 && r.payload_label < L,
          "payload_label must lie in [0, L)" + at);
}

void validate_corpus(Corpus& corpus) {
  auto& recs = corpus.records;
  const int n = static_cast<int>(recs.size());
  require(n >= 1, "corpus must hold at least one record");
  require(corpus.meta.N == n, "meta N=" + std::to_string(corpus.meta.N) +
                                  " does not match record count " + std::to_string(n));
  std::unordered_set<int> seen;
  for (const auto& r : recs) {
    require(seen.insert(r.id).second, "duplicate id=" + std::to_string(r.id));
    require(r.id >= 0 && r.id < n,
            "ids must be dense 0..N-1; got id=" + std::to_string(r.id));
    validate_record(r, corpus.meta.E, corpus.meta.F, corpus.meta.L);
  }
  std::sort(recs.begin(), recs.end(),
            [](const InstructionRecord& a, const InstructionRecord& b) { return a.id < b.id; });
}

// Integer drawn from a log-normal shape: round(exp(N(mu, sigma))), min 1.
int lognormal_len(Rng& rng, double mu, double sigma) {
  const int v = static_cast<int>(std::lround(std::exp(mu + sigma * rng.normal())));
  return v < 1 ? 1 : v;
}

}  // namespace

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  json meta;
  meta["__meta__"] = 1;
  meta["E"] = corpus.meta.E;
  meta["F"] = corpus.meta.F;
  meta["L"] = corpus.meta.L;
  meta["N"] = corpus.meta.N;
  meta["source"] = corpus.meta.source;
  meta["seed"] = corpus.meta.seed;
  out += meta.dump();
  out += '\n';
  for (const auto& r : corpus.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "cannot open for writing: " + path);
  f << corpus_to_jsonl(corpus);
  require(f.good(), "write failed: " + path);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open corpus file: " + path);

  Corpus corpus;
  std::string line;
  int line_no = 0;
  bool have_meta = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("corpus parse error at line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    if (!have_meta) {
      require(j.is_object() && j.contains("__meta__"),
              "first corpus line must be the __meta__ header");
      try {
        corpus.meta.E = j.at("E").get<int>();
        corpus.meta.F = j.at("F").get<int>();
        corpus.meta.L = j.at("L").get<int>();
        corpus.meta.N = j.at("N").get<int>();
        corpus.meta.source = j.value("source", std::string());
        corpus.meta.seed = j.value("seed", std::uint64_t{0});
      } catch (const json::exception& e) {
        throw std::runtime_error(std::string("corpus meta header: ") + e.what());
      }
      have_meta = true;
      continue;
    }
    corpus.records.push_back(record_from_json(j, line_no));
  }
  require(have_meta, "corpus file is empty: " + path);
  validate_corpus(corpus);
  return corpus;
}

Corpus generate_synthetic(std::uint64_t seed, int n, double frac_aligned,
                          int E, int F, int L) {
  if (n < 10) throw std::invalid_argument("generate_synthetic: n must be >= 10");
  if (!(frac_aligned > 0.0 && frac_aligned < 1.0))
    throw std::invalid_argument("generate_synthetic: frac_aligned must lie in (0,1)");
  if (E < 1 || F < 1 || L < 2)
    throw std::invalid_argument("generate_synthetic: need E >= 1, F >= 1, L >= 2");
  if (frac_aligned * n < 1.0)
    throw std::invalid_argument("generate_synthetic: frac_aligned * n must be >= 1");
  const int n_aligned = static_cast<int>(std::ceil(frac_aligned * n));
  if (n_aligned >= n)
    throw std::invalid_argument("generate_synthetic: aligned count out of range");

  constexpr int kNoiseFamilies = 5;
  constexpr double kCenterScale = 2.0;        // payload class centers
  constexpr double kEmbCenterScale = 1.5;     // distractor embedding family centers
  constexpr double kAlignedEmbCenter = 6.0;   // aligned embedding cluster center
  constexpr double kAlignedEmbSpread = 4.0;   // within-cluster spread of aligned embeddings

  // Payload geometry: the task's L class centers, plus per-family centers for
  // the distractors whose label structure is unrelated to the task's.
  Rng rng_centers(mix_seed(seed, 1));
  std::vector<std::vector<double>> task_centers(static_cast<std::size_t>(L));
  for (auto& c : task_centers) c = rng_centers.normal_vec(static_cast<std::size_t>(F), kCenterScale);
  std::vector<std::vector<std::vector<double>>> fam_centers(kNoiseFamilies);
  for (auto& fam : fam_centers) {
    fam.resize(static_cast<std::size_t>(L));
    for (auto& c : fam) c = rng_centers.normal_vec(static_cast<std::size_t>(F), kCenterScale);
  }

  Rng rng_emb(mix_seed(seed, 2));
  const std::vector<double> aligned_emb_center =
      rng_emb.normal_vec(static_cast<std::size_t>(E), kAlignedEmbCenter);
  std::vector<std::vector<double>> fam_emb_centers(kNoiseFamilies);
  for (auto& c : fam_emb_centers) c = rng_emb.normal_vec(static_cast<std::size_t>(E), kEmbCenterScale);

  Rng rng_flags(mix_seed(seed, 3));
  std::vector<char> aligned(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n_aligned; ++i) aligned[static_cast<std::size_t>(i)] = 1;
  rng_flags.shuffle(aligned);

  Rng rng_rec(mix_seed(seed, 4));
  Corpus corpus;
  corpus.meta = {E, F, L, n, "synthetic", seed, {}};
  corpus.records.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    InstructionRecord r;
    r.id = id;
    const bool is_aligned = aligned[static_cast<std::size_t>(id)] != 0;
    r.utility_tag = is_aligned;
    r.payload_label = static_cast<int>(rng_rec.uniform_int(static_cast<std::uint64_t>(L)));

    const std::vector<double>* feat_center;
    const std::vector<double>* emb_center;
    if (is_aligned) {
      feat_center = &task_centers[static_cast<std::size_t>(r.payload_label)];
      emb_center = &aligned_emb_center;
    } else {
      const auto fam = rng_rec.uniform_int(kNoiseFamilies);
      feat_center = &fam_centers[fam][static_cast<std::size_t>(r.payload_label)];
      emb_center = &fam_emb_centers[fam];
    }
    r.payload_features = rng_rec.normal_vec(static_cast<std::size_t>(F));
    for (int i = 0; i < F; ++i) r.payload_features[static_cast<std::size_t>(i)] += (*feat_center)[static_cast<std::size_t>(i)];
    // The aligned cluster is broader than any single distractor family: real
    // task-relevant data is topically varied, while each distractor family is
    // a narrow mode. The cluster stays K-means separable (centers are far
    // apart relative to both spreads).
    r.embedding = rng_rec.normal_vec(static_cast<std::size_t>(E),
                                     is_aligned ? kAlignedEmbSpread : 1.0);
    for (int i = 0; i < E; ++i) r.embedding[static_cast<std::size_t>(i)] += (*emb_center)[static_cast<std::size_t>(i)];

    // Each difficulty field carries its own weak alignment correlation:
    // aligned items have slightly shorter prompts and responses, score a bit
    // higher under the reference model, and their instruction explains more
    // of the response (larger conditional-vs-marginal gap). Every signal is
    // noisy enough to overlap heavily between the two populations.
    r.prompt_len = lognormal_len(rng_rec, std::log(is_aligned ? 22.0 : 27.0), 0.25);
    r.response_len = lognormal_len(rng_rec, std::log(is_aligned ? 60.0 : 85.0), 0.2);
    r.log_p_y_given_x =
        -0.03 * r.response_len - (is_aligned ? 0.0 : 0.55) + 0.6 * rng_rec.normal();
    r.log_p_y = r.log_p_y_given_x - (is_aligned ? 3.1 : 2.5) - 0.55 * rng_rec.normal();
    corpus.records.push_back(std::move(r));
  }
  return corpus;
}

std::pair<Corpus, ValidationSet> split_validation(const Corpus& corpus,
                                                  std::uint64_t seed, int n_val) {
  const int n = static_cast<int>(corpus.records.size());
  if (n_val < 1 || n_val >= n)
    throw std::invalid_argument("split_validation: n_val must lie in [1, N)");

  // Tagged corpora draw validation from the aligned task distribution only.
  std::vector<int> candidates;
  bool tagged = false;
  for (const auto& r : corpus.records) {
    if (r.utility_tag) tagged = true;
  }
  for (const auto& r : corpus.records) {
    if (!tagged || (r.utility_tag && *r.utility_tag)) candidates.push_back(r.id);
  }
  if (static_cast<int>(candidates.size()) < n_val)
    throw std::invalid_argument(
        "split_validation: not enough aligned records for n_val=" + std::to_string(n_val));

  Rng rng(mix_seed(seed, 7));
  const auto picked_idx =
      rng.sample_without_replacement(static_cast<int>(candidates.size()), n_val);
  std::vector<char> in_val(static_cast<std::size_t>(n), 0);
  for (int i : picked_idx) in_val[static_cast<std::size_t>(candidates[static_cast<std::size_t>(i)])] = 1;

  ValidationSet val;
  Corpus train;
  train.meta = corpus.meta;
  for (const auto& r : corpus.records) {
    if (in_val[static_cast<std::size_t>(r.id)]) {
      val.features.push_back(r.payload_features);
      val.labels.push_back(r.payload_label);
    } else {
      InstructionRecord t = r;
      train.meta.source_ids.push_back(r.id);
      t.id = static_cast<int>(train.records.size());
      train.records.push_back(std::move(t));
    }
  }
  train.meta.N = static_cast<int>(train.records.size());
  return {std::move(train), std::move(val)};
}

}  // namespace dynsel
