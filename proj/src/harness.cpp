#include "dynsel/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dynsel/learner.hpp"

#ifndef DYNSEL_VERSION
#define DYNSEL_VERSION "v0-unknown"
#endif

namespace dynsel {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* want) {
  throw std::invalid_argument("config key " + key + ": expected " + want + ", got '" +
                              value + "'");
}

long long parse_ll(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value, "an integer");
  }
  if (used != value.size()) bad_value(key, value, "an integer");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  return static_cast<int>(parse_ll(key, value));
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const long long v = parse_ll(key, value);
  if (v < 0) bad_value(key, value, "a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value, "a number");
  }
  if (used != value.size()) bad_value(key, value, "a number");
  return v;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& key,
                                           const std::string& value) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_value(key, value, "comma-separated integers");
    out.push_back(parse_u64(key, item));
  }
  if (out.empty()) bad_value(key, value, "comma-separated integers");
  return out;
}

void validate_config(const ExperimentConfig& cfg) {
  static const char* kMethods[] = {"raise", "rand", "sspl", "static"};
  if (std::find(std::begin(kMethods), std::end(kMethods), cfg.method) ==
      std::end(kMethods))
    throw std::invalid_argument("run.method must be one of raise|rand|sspl|static, got '" +
                                cfg.method + "'");
  if (cfg.seeds.empty()) throw std::invalid_argument("run.seeds must be nonempty");
  const bool has_path = !cfg.corpus_path.empty();
  if (has_path == cfg.synthetic.enabled)
    throw std::invalid_argument(
        "exactly one corpus source required: corpus.path or corpus.synthetic.*");
  if (cfg.synthetic.enabled) {
    const auto& s = cfg.synthetic;
    if (s.n < 1) throw std::invalid_argument("corpus.synthetic.n must be >= 1");
    if (!(s.frac_aligned >= 0.0 && s.frac_aligned <= 1.0))
      throw std::invalid_argument("corpus.synthetic.frac_aligned must be in [0, 1]");
    if (s.E < 1 || s.F < 1 || s.L < 2)
      throw std::invalid_argument("corpus.synthetic needs E >= 1, F >= 1, L >= 2");
  }
  if (cfg.n_val < 1) throw std::invalid_argument("corpus.n_val must be >= 1");
  if (cfg.static_scorer != "neg_difficulty" && cfg.static_scorer != "actor_init")
    throw std::invalid_argument(
        "static.scorer must be neg_difficulty or actor_init, got '" + cfg.static_scorer +
        "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");

    if (key == "run.method") cfg.method = value;
    else if (key == "run.seeds") cfg.seeds = parse_seed_list(key, value);
    else if (key == "run.out_dir") cfg.out_dir = value;
    else if (key == "corpus.path") cfg.corpus_path = value;
    else if (key == "corpus.synthetic.seed") { cfg.synthetic.enabled = true; cfg.synthetic.seed = parse_u64(key, value); }
    else if (key == "corpus.synthetic.n") { cfg.synthetic.enabled = true; cfg.synthetic.n = parse_int(key, value); }
    else if (key == "corpus.synthetic.frac_aligned") { cfg.synthetic.enabled = true; cfg.synthetic.frac_aligned = parse_real(key, value); }
    else if (key == "corpus.synthetic.E") { cfg.synthetic.enabled = true; cfg.synthetic.E = parse_int(key, value); }
    else if (key == "corpus.synthetic.F") { cfg.synthetic.enabled = true; cfg.synthetic.F = parse_int(key, value); }
    else if (key == "corpus.synthetic.L") { cfg.synthetic.enabled = true; cfg.synthetic.L = parse_int(key, value); }
    else if (key == "corpus.n_val") cfg.n_val = parse_int(key, value);
    else if (key == "corpus.val_seed") cfg.val_seed = parse_u64(key, value);
    else if (key == "select.d_sem") cfg.train.d_sem = parse_int(key, value);
    else if (key == "select.C") cfg.train.C = parse_int(key, value);
    else if (key == "select.B") cfg.train.B = parse_int(key, value);
    else if (key == "select.interval_M") cfg.train.interval_M = parse_int(key, value);
    else if (key == "select.cluster_seed") cfg.train.cluster_seed = parse_u64(key, value);
    else if (key == "select.cluster_max_iters") cfg.train.cluster_max_iters = parse_int(key, value);
    else if (key == "select.cluster_tol") cfg.train.cluster_tol = parse_real(key, value);
    else if (key == "learner.lr") cfg.train.learner_lr = parse_real(key, value);
    else if (key == "ppo.gamma") cfg.train.ppo.gamma = parse_real(key, value);
    else if (key == "ppo.lam") cfg.train.ppo.lam = parse_real(key, value);
    else if (key == "ppo.eps_clip") cfg.train.ppo.eps_clip = parse_real(key, value);
    else if (key == "ppo.K") cfg.train.ppo.K = parse_int(key, value);
    else if (key == "ppo.K2") cfg.train.ppo.K2 = parse_int(key, value);
    else if (key == "ppo.T") cfg.train.ppo.T = parse_int(key, value);
    else if (key == "ppo.minibatch") cfg.train.ppo.minibatch = parse_int(key, value);
    else if (key == "net.hidden") cfg.train.hidden = parse_int(key, value);
    else if (key == "opt.actor_lr") cfg.train.actor_lr = parse_real(key, value);
    else if (key == "opt.critic_lr") cfg.train.critic_lr = parse_real(key, value);
    else if (key == "opt.weight_decay") cfg.train.weight_decay = parse_real(key, value);
    else if (key == "static.scorer") cfg.static_scorer = value;
    else if (key == "static.subset") cfg.static_subset = parse_int(key, value);
    else if (key == "static.epochs") cfg.static_epochs = parse_int(key, value);
    else if (key == "spill.dir") cfg.train.spill_dir = value;
    else throw std::invalid_argument("unknown config key: " + key);
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f.good()) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string seeds_csv(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(seeds[i]);
  }
  return out;
}

// (key, value, part_of_hash)
std::vector<std::tuple<std::string, std::string, bool>> config_pairs(
    const ExperimentConfig& cfg) {
  std::vector<std::tuple<std::string, std::string, bool>> kv;
  const auto add = [&kv](const std::string& k, const std::string& v, bool hashed = true) {
    kv.emplace_back(k, v, hashed);
  };
  add("run.method", cfg.method);
  add("run.seeds", seeds_csv(cfg.seeds));
  if (!cfg.out_dir.empty()) add("run.out_dir", cfg.out_dir, false);
  if (!cfg.corpus_path.empty()) {
    add("corpus.path", cfg.corpus_path);
  } else {
    add("corpus.synthetic.seed", std::to_string(cfg.synthetic.seed));
    add("corpus.synthetic.n", std::to_string(cfg.synthetic.n));
    add("corpus.synthetic.frac_aligned", format_double(cfg.synthetic.frac_aligned));
    add("corpus.synthetic.E", std::to_string(cfg.synthetic.E));
    add("corpus.synthetic.F", std::to_string(cfg.synthetic.F));
    add("corpus.synthetic.L", std::to_string(cfg.synthetic.L));
  }
  add("corpus.n_val", std::to_string(cfg.n_val));
  add("corpus.val_seed", std::to_string(cfg.val_seed));
  const TrainConfig& t = cfg.train;
  add("select.d_sem", std::to_string(t.d_sem));
  add("select.C", std::to_string(t.C));
  add("select.B", std::to_string(t.B));
  add("select.interval_M", std::to_string(t.interval_M));
  add("select.cluster_seed", std::to_string(t.cluster_seed));
  add("select.cluster_max_iters", std::to_string(t.cluster_max_iters));
  add("select.cluster_tol", format_double(t.cluster_tol));
  add("learner.lr", format_double(t.learner_lr));
  add("ppo.gamma", format_double(t.ppo.gamma));
  add("ppo.lam", format_double(t.ppo.lam));
  add("ppo.eps_clip", format_double(t.ppo.eps_clip));
  add("ppo.K", std::to_string(t.ppo.K));
  add("ppo.K2", std::to_string(t.ppo.K2));
  add("ppo.T", std::to_string(t.ppo.T));
  add("ppo.minibatch", std::to_string(t.ppo.minibatch));
  add("net.hidden", std::to_string(t.hidden));
  add("opt.actor_lr", format_double(t.actor_lr));
  add("opt.critic_lr", format_double(t.critic_lr));
  add("opt.weight_decay", format_double(t.weight_decay));
  if (cfg.method == "static") {
    add("static.scorer", cfg.static_scorer);
    add("static.subset", std::to_string(cfg.static_subset));
    add("static.epochs", std::to_string(cfg.static_epochs));
  }
  if (!t.spill_dir.empty()) add("spill.dir", t.spill_dir, false);
  return kv;
}

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace

std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v, hashed] : config_pairs(cfg)) {
    (void)hashed;
    out += k + " = " + v + "\n";
  }
  return out;
}

std::string config_run_id(const ExperimentConfig& cfg) {
  std::string hashed;
  for (const auto& [k, v, in_hash] : config_pairs(cfg))
    if (in_hash) hashed += k + "=" + v + "\n";
  return cfg.method + "-" + hex16(fnv1a64(hashed.data(), hashed.size()));
}

std::pair<Corpus, ValidationSet> prepare_corpus(const ExperimentConfig& cfg) {
  Corpus full = cfg.synthetic.enabled
                    ? generate_synthetic(cfg.synthetic.seed, cfg.synthetic.n,
                                         cfg.synthetic.frac_aligned, cfg.synthetic.E,
                                         cfg.synthetic.F, cfg.synthetic.L)
                    : load_corpus(cfg.corpus_path);
  return split_validation(full, cfg.val_seed, cfg.n_val);
}

DiversityClasses cluster_corpus(const Corpus& corpus, const TrainConfig& cfg) {
  ClusterPoints points;
  points.reserve(corpus.records.size());
  for (const auto& r : corpus.records) points.emplace_back(r.id, r.embedding);
  return kmeans_multi(points, cfg.C, cfg.cluster_seed, cfg.cluster_max_iters,
                      cfg.cluster_tol);
}

std::vector<double> actor_init_scores(const Corpus& corpus, const ValidationSet& val,
                                      const TrainConfig& cfg, std::uint64_t seed) {
  MlpParams theta = init_params(mix_seed(seed, 41), fused_dim(cfg.d_sem), cfg.hidden);
  const LearnerState l0 = learner_init(seed, corpus.meta.F, corpus.meta.L);
  const double p0 = performance(l0, val);
  const AvailabilityCounter fresh;
  const auto states = fuse_all(corpus, StageInfo{p0, 1, cfg.ppo.T}, fresh, cfg.d_sem);
  std::vector<const double*> ptrs;
  ptrs.reserve(states.size());
  for (const auto& s : states) ptrs.push_back(s.vector.data());
  fit_normalization(theta, ptrs);
  std::vector<double> scores(corpus.records.size());
  for (const auto& s : states)
    scores[static_cast<std::size_t>(s.id)] = actor_score(theta, s);
  return scores;
}

namespace {

SeedResult run_seed(const ExperimentConfig& cfg, const Corpus& corpus,
                    const ValidationSet& val, std::uint64_t seed) {
  SeedResult r;
  r.seed = seed;
  if (cfg.method == "raise") {
    TrainResult t = train_policy(corpus, val, cfg.train, seed);
    // Final P is the last training round's end-of-episode performance: the
    // policy's job is to steer the learner it trains, so the round-K learner
    // is the evaluated artifact.
    r.final_perf = t.traces.back().final_perf;
    for (std::size_t k = 0; k < t.traces.size(); ++k)
      r.rounds.emplace_back(static_cast<int>(k) + 1, std::move(t.traces[k]));
    r.has_nets = true;
    r.theta = std::move(t.theta);
    r.phi = std::move(t.phi);
  } else {
    BaselineConfig bc;
    bc.T = cfg.train.ppo.T;
    bc.B = cfg.train.B;
    bc.learner_lr = cfg.train.learner_lr;
    bc.static_subset = cfg.static_subset;
    bc.static_epochs = cfg.static_epochs;
    std::vector<double> scores;
    if (cfg.method == "static" && cfg.static_scorer == "actor_init")
      scores = actor_init_scores(corpus, val, cfg.train, seed);
    const std::string inner = cfg.method == "rand" ? "random" : cfg.method;
    EpisodeTrace trace = run_baseline(corpus, val, inner, bc, seed, scores);
    r.final_perf = trace.final_perf;
    r.rounds.emplace_back(1, std::move(trace));
  }
  for (const auto& [round, trace] : r.rounds) {
    (void)round;
    r.selection_seconds += trace.selection_seconds;
    r.policy_invocations += trace.policy_invocations;
  }
  return r;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  auto [corpus, val] = prepare_corpus(cfg);
  ExperimentResult result;
  result.run_id = config_run_id(cfg);
  result.method = cfg.method;
  {
    const std::string bytes = corpus_to_jsonl(corpus);
    result.corpus_hash = fnv1a64(bytes.data(), bytes.size());
  }

  const std::size_t n = cfg.seeds.size();
  result.seeds.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> workers;
  workers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    workers.emplace_back([&, i]() {
      try {
        result.seeds[i] = run_seed(cfg, corpus, val, cfg.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (!cfg.out_dir.empty()) {
    const std::filesystem::path dir =
        std::filesystem::path(cfg.out_dir) / result.run_id;
    std::filesystem::create_directories(dir);
    write_file_atomic((dir / "metrics.csv").string(), metrics_csv(result));
    write_file_atomic((dir / "summary.json").string(), summary_json(cfg, result));
    write_file_atomic((dir / "config.snapshot").string(), canonical_config_text(cfg));
    for (const auto& s : result.seeds) {
      if (!s.has_nets) continue;
      const std::string tag = std::to_string(s.seed);
      write_file_atomic((dir / ("actor_seed_" + tag + ".json")).string(),
                        checkpoint_json(s.theta));
      write_file_atomic((dir / ("critic_seed_" + tag + ".json")).string(),
                        checkpoint_json(s.phi));
    }
  }
  return result;
}

std::string metrics_csv(const ExperimentResult& result) {
  std::string out =
      "run_id,method,seed,round,step,selected_by,perf,reward,"
      "mean_score_selected,mean_score_unselected,frac_aligned_selected\n";
  for (const auto& sr : result.seeds) {
    for (const auto& [round, trace] : sr.rounds) {
      for (const auto& step : trace.steps) {
        out += result.run_id;
        out += ',';
        out += result.method;
        out += ',';
        out += std::to_string(sr.seed);
        out += ',';
        out += std::to_string(round);
        out += ',';
        out += std::to_string(step.step);
        out += ',';
        out += step.selected_by;
        out += ',';
        out += format_double(step.perf);
        out += ',';
        out += format_double(step.reward);
        out += ',';
        if (step.has_scores) {
          out += format_double(step.mean_score_selected);
          out += ',';
          out += format_double(step.mean_score_unselected);
        } else {
          out += ',';
        }
        out += ',';
        if (step.frac_aligned_selected >= 0.0)
          out += format_double(step.frac_aligned_selected);
        out += '\n';
      }
    }
  }
  return out;
}

std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  ordered_json j;
  j["run_id"] = result.run_id;
  j["method"] = result.method;
  j["version"] = DYNSEL_VERSION;
  j["corpus_hash"] = hex16(result.corpus_hash);
  ordered_json conf = ordered_json::object();
  for (const auto& [k, v, hashed] : config_pairs(cfg)) {
    (void)hashed;
    conf[k] = v;
  }
  j["config"] = std::move(conf);
  std::vector<double> finals;
  ordered_json seeds = ordered_json::array();
  ordered_json perfs = ordered_json::array();
  for (const auto& s : result.seeds) {
    seeds.push_back(s.seed);
    perfs.push_back(s.final_perf);
    finals.push_back(s.final_perf);
  }
  j["seeds"] = std::move(seeds);
  j["final_perf"] = std::move(perfs);
  j["final_perf_mean"] = mean_of(finals);
  j["final_perf_std"] = sample_std(finals);
  j["rounds_per_seed"] =
      result.seeds.empty() ? 0 : static_cast<int>(result.seeds[0].rounds.size());
  return j.dump(2) + "\n";
}

double avg_q(double avg_method, double avg_full, double avg_zero) {
  if (avg_full == avg_zero)
    throw std::invalid_argument("avg_q: avg_full and avg_zero must differ");
  return (avg_method - avg_full) / (avg_full - avg_zero) * 100.0;
}

double sign_test_p(int wins, int nonzero) {
  if (nonzero < 0 || wins < 0 || wins > nonzero)
    throw std::invalid_argument("sign_test_p: need 0 <= wins <= nonzero");
  if (nonzero == 0) return 1.0;
  // P(X >= wins), X ~ Binomial(nonzero, 1/2).
  long double coef = 1.0L;  // C(n, 0)
  long double tail = 0.0L;
  for (int k = 0; k <= nonzero; ++k) {
    if (k >= wins) tail += coef;
    coef = coef * static_cast<long double>(nonzero - k) / static_cast<long double>(k + 1);
  }
  return static_cast<double>(tail / std::pow(2.0L, nonzero));
}

std::vector<ReportRow> aggregate(const std::vector<MethodSummary>& methods,
                                 const std::string& reference) {
  const MethodSummary* ref = nullptr;
  for (const auto& m : methods)
    if (m.method == reference) ref = &m;
  if (!ref)
    throw std::invalid_argument("aggregate: reference method '" + reference +
                                "' not among inputs");
  std::vector<ReportRow> rows;
  rows.reserve(methods.size());
  for (const auto& m : methods) {
    ReportRow row;
    row.method = m.method;
    row.n_seeds = static_cast<int>(m.final_perf.size());
    row.mean = mean_of(m.final_perf);
    row.stddev = sample_std(m.final_perf);
    if (m.method != reference) {
      if (m.final_perf.size() != ref->final_perf.size())
        throw std::invalid_argument("aggregate: method '" + m.method + "' has " +
                                    std::to_string(m.final_perf.size()) +
                                    " seeds but reference has " +
                                    std::to_string(ref->final_perf.size()));
      row.has_comparison = true;
      double dsum = 0.0;
      for (std::size_t i = 0; i < m.final_perf.size(); ++i) {
        const double d = m.final_perf[i] - ref->final_perf[i];
        dsum += d;
        if (d > 0.0) ++row.wins;
        if (d != 0.0) ++row.nonzero;
      }
      row.mean_delta = m.final_perf.empty()
                           ? 0.0
                           : dsum / static_cast<double>(m.final_perf.size());
      row.p_value = sign_test_p(row.wins, row.nonzero);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MethodSummary read_run_summary(const std::string& run_dir) {
  const std::string path = run_dir + "/summary.json";
  std::ifstream f(path);
  if (!f.good()) throw std::invalid_argument("cannot open run summary: " + path);
  ordered_json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("malformed run summary " + path + ": " + e.what());
  }
  if (!j.contains("method") || !j.contains("final_perf"))
    throw std::runtime_error("run summary " + path + " lacks method/final_perf");
  MethodSummary out;
  out.method = j.at("method").get<std::string>();
  for (const auto& v : j.at("final_perf")) out.final_perf.push_back(v.get<double>());
  return out;
}

std::string report_csv(const std::vector<ReportRow>& rows,
                       const std::optional<std::pair<double, double>>& full_zero) {
  std::string out =
      "method,n_seeds,mean_final_perf,std_final_perf,mean_delta_vs_ref,wins,nonzero,"
      "sign_test_p";
  if (full_zero) out += ",avg_q_pct";
  out += '\n';
  for (const auto& r : rows) {
    out += r.method;
    out += ',';
    out += std::to_string(r.n_seeds);
    out += ',';
    out += format_double(r.mean);
    out += ',';
    out += format_double(r.stddev);
    out += ',';
    if (r.has_comparison) {
      out += format_double(r.mean_delta);
      out += ',';
      out += std::to_string(r.wins);
      out += ',';
      out += std::to_string(r.nonzero);
      out += ',';
      out += format_double(r.p_value);
    } else {
      out += ",,,";
    }
    if (full_zero)
      out += ',' + format_double(avg_q(r.mean, full_zero->first, full_zero->second));
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f.good()) throw std::runtime_error("cannot open for writing: " + tmp);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f.good()) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dynsel
