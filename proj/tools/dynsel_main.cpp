#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynsel/baselines.hpp"
#include "dynsel/cluster.hpp"
#include "dynsel/corpus.hpp"
#include "dynsel/harness.hpp"
#include "dynsel/kernels.hpp"
#include "dynsel/rl.hpp"

namespace {

using namespace dynsel;

void print_experiment(const ExperimentConfig& cfg, const ExperimentResult& result) {
  std::cout << "run_id: " << result.run_id << "\n";
  if (!cfg.out_dir.empty())
    std::cout << "wrote: " << cfg.out_dir << "/" << result.run_id << "\n";
  for (const auto& s : result.seeds)
    std::cout << "seed " << s.seed << ": final_perf " << format_double(s.final_perf)
              << "\n";
  std::vector<double> finals;
  for (const auto& s : result.seeds) finals.push_back(s.final_perf);
  double mean = 0.0;
  for (double f : finals) mean += f;
  mean /= static_cast<double>(finals.empty() ? 1 : finals.size());
  std::cout << "final_perf_mean: " << format_double(mean) << "\n";
}

int run_cli(int argc, char** argv) {
  CLI::App app{"dynamic instruction selection laboratory"};
  app.require_subcommand(1);

  // generate: synthetic corpus to JSONL
  auto* gen = app.add_subcommand("generate", "write a synthetic corpus as JSON lines");
  std::uint64_t g_seed = 0;
  int g_n = 0, g_e = 32, g_f = 16, g_l = 4;
  double g_frac = 0.1;
  std::string g_out;
  gen->add_option("--seed", g_seed, "generator seed")->required();
  gen->add_option("--n", g_n, "number of records")->required();
  gen->add_option("--frac-aligned", g_frac, "fraction of task-aligned records");
  gen->add_option("--E", g_e, "embedding dimension");
  gen->add_option("--F", g_f, "payload feature dimension");
  gen->add_option("--L", g_l, "payload label count");
  gen->add_option("--out", g_out, "output JSONL path")->required();
  gen->callback([&]() {
    const Corpus corpus = generate_synthetic(g_seed, g_n, g_frac, g_e, g_f, g_l);
    write_file_atomic(g_out, corpus_to_jsonl(corpus));
    std::cout << "wrote: " << g_out << " (" << corpus.records.size() << " records)\n";
  });

  // cluster: diversity classes to CSV
  auto* clu = app.add_subcommand("cluster", "k-means diversity classes to CSV");
  std::string c_corpus, c_out;
  int c_c = 1, c_iters = 50;
  std::uint64_t c_seed = 0;
  double c_tol = 1e-6;
  clu->add_option("--corpus", c_corpus, "corpus JSONL path")->required();
  clu->add_option("--C", c_c, "number of classes")->required();
  clu->add_option("--seed", c_seed, "k-means seed");
  clu->add_option("--max-iters", c_iters, "iteration cap");
  clu->add_option("--tol", c_tol, "centroid-shift stop threshold");
  clu->add_option("--out", c_out, "output CSV path")->required();
  clu->callback([&]() {
    const Corpus corpus = load_corpus(c_corpus);
    ClusterPoints points;
    points.reserve(corpus.records.size());
    for (const auto& r : corpus.records) points.emplace_back(r.id, r.embedding);
    const DiversityClasses classes = kmeans(points, c_c, c_seed, c_iters, c_tol);
    write_file_atomic(c_out, assignment_csv(classes));
    std::cout << "wrote: " << c_out << " (C=" << classes.C
              << ", objective=" << format_double(objective(points, classes)) << ")\n";
  });

  // train-policy / run-baseline: full experiments from a config file
  std::string tp_config;
  auto* tp = app.add_subcommand("train-policy", "train the selection policy per config");
  tp->add_option("--config", tp_config, "experiment config file")->required();
  tp->callback([&]() {
    const ExperimentConfig cfg = load_config(tp_config);
    if (cfg.method != "raise")
      throw std::invalid_argument("train-policy needs run.method = raise, got '" +
                                  cfg.method + "'");
    print_experiment(cfg, run_experiment(cfg));
  });

  std::string rb_config;
  auto* rb = app.add_subcommand("run-baseline", "run a baseline selector per config");
  rb->add_option("--config", rb_config, "experiment config file")->required();
  rb->callback([&]() {
    const ExperimentConfig cfg = load_config(rb_config);
    if (cfg.method == "raise")
      throw std::invalid_argument("run-baseline needs run.method rand|sspl|static");
    print_experiment(cfg, run_experiment(cfg));
  });

  // replay: one episode from checkpointed nets
  auto* rp = app.add_subcommand("replay", "run one episode with checkpointed nets");
  std::string rp_config, rp_actor, rp_critic, rp_out;
  std::uint64_t rp_seed = 0;
  int rp_round = 1;
  rp->add_option("--config", rp_config, "experiment config file")->required();
  rp->add_option("--actor", rp_actor, "actor checkpoint JSON")->required();
  rp->add_option("--critic", rp_critic, "critic checkpoint JSON")->required();
  rp->add_option("--seed", rp_seed, "episode seed")->required();
  rp->add_option("--round", rp_round, "round index used for the seed stream");
  rp->add_option("--out", rp_out, "metrics CSV path (default: stdout)");
  rp->callback([&]() {
    const ExperimentConfig cfg = load_config(rp_config);
    const MlpParams theta = load_checkpoint(rp_actor);
    const MlpParams phi = load_checkpoint(rp_critic);
    const int d_in = fused_dim(cfg.train.d_sem);
    if (theta.in != d_in)
      throw std::invalid_argument("actor checkpoint input dim " +
                                  std::to_string(theta.in) + " does not match d_sem (" +
                                  std::to_string(d_in) + " expected)");
    if (phi.in != d_in + 2)
      throw std::invalid_argument("critic checkpoint input dim " +
                                  std::to_string(phi.in) + " does not match d_sem (" +
                                  std::to_string(d_in + 2) + " expected)");
    auto [corpus, val] = prepare_corpus(cfg);
    const DiversityClasses classes = cluster_corpus(corpus, cfg.train);
    auto [trace, transitions] =
        run_episode(corpus, val, classes, theta, phi, cfg.train,
                    mix_seed(rp_seed, 100 + static_cast<std::uint64_t>(rp_round)));
    (void)transitions;
    ExperimentResult res;
    res.run_id = "replay-" + config_run_id(cfg);
    res.method = "replay";
    SeedResult sr;
    sr.seed = rp_seed;
    sr.final_perf = trace.final_perf;
    sr.rounds.emplace_back(rp_round, std::move(trace));
    res.seeds.push_back(std::move(sr));
    const std::string csv = metrics_csv(res);
    if (rp_out.empty())
      std::cout << csv;
    else {
      write_file_atomic(rp_out, csv);
      std::cout << "wrote: " << rp_out << "\n";
    }
    std::cout << "final_perf: " << format_double(res.seeds[0].final_perf) << "\n";
  });

  // report: aggregate finished runs
  auto* rep = app.add_subcommand("report", "compare finished runs");
  std::vector<std::string> rep_runs;
  std::string rep_reference = "raise", rep_out;
  double rep_full = 0.0, rep_zero = 0.0;
  rep->add_option("--run", rep_runs, "run directory (repeatable)")
      ->required()
      ->expected(-1);
  rep->add_option("--reference", rep_reference, "reference method for paired stats");
  auto* full_opt = rep->add_option("--avg-full", rep_full, "full-data average for avg_q");
  auto* zero_opt = rep->add_option("--avg-zero", rep_zero, "zero-data average for avg_q");
  full_opt->needs(zero_opt);
  zero_opt->needs(full_opt);
  rep->add_option("--out", rep_out, "report CSV path (default: stdout)");
  rep->callback([&]() {
    std::vector<MethodSummary> methods;
    for (const auto& dir : rep_runs) methods.push_back(read_run_summary(dir));
    const auto rows = aggregate(methods, rep_reference);
    std::optional<std::pair<double, double>> full_zero;
    if (full_opt->count() > 0) full_zero = std::make_pair(rep_full, rep_zero);
    const std::string csv = report_csv(rows, full_zero);
    if (rep_out.empty())
      std::cout << csv;
    else {
      write_file_atomic(rep_out, csv);
      std::cout << "wrote: " << rep_out << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
