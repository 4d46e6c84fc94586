// Command-line front end: dataset statistics, single runs, sweeps, and the
// synthetic dataset generator.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/experiment.hpp"
#include "tempim/stats.hpp"
#include "tempim/synthetic.hpp"

namespace {

using tempim::ExperimentSpec;

struct RunOptions {
  std::string input;
  std::string format = "snapshots";
  std::size_t bins = 0;
  std::string scheme = "equal-time";
  std::string preset;
  std::size_t p = 0;
  std::size_t horizon = 0;
  std::vector<double> lambdas;
  std::vector<std::size_t> ks{1};
  std::vector<std::string> methods{"oracle"};
  std::string im;
  std::size_t mc_runs = 1000;
  std::size_t greedy_mc_runs = 0;
  std::uint64_t seed = 0;
  tempim::Hyperparameters hyper;
  std::string config;
  std::string out;
};

std::size_t env_workers() {
  if (const char* w = std::getenv("TEMPIM_WORKERS")) {
    try {
      return static_cast<std::size_t>(std::stoul(w));
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed TEMPIM_WORKERS='" << w << "'\n";
    }
  }
  return 1;
}

template <typename T>
std::vector<T> as_list(const nlohmann::json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

// Config keys override command-line flags.
void apply_config(RunOptions& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw std::runtime_error("cannot open config '" + o.config + "'");
  const auto cfg = nlohmann::json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config must be a JSON object");
  for (const auto& [key, v] : cfg.items()) {
    if (key == "input") o.input = v.get<std::string>();
    else if (key == "format") o.format = v.get<std::string>();
    else if (key == "bins") o.bins = v.get<std::size_t>();
    else if (key == "scheme") o.scheme = v.get<std::string>();
    else if (key == "preset") o.preset = v.get<std::string>();
    else if (key == "p") o.p = v.get<std::size_t>();
    else if (key == "T") o.horizon = v.get<std::size_t>();
    else if (key == "lambda") o.lambdas = as_list<double>(v);
    else if (key == "k") o.ks = as_list<std::size_t>(v);
    else if (key == "method" || key == "methods") o.methods = as_list<std::string>(v);
    else if (key == "im") o.im = v.get<std::string>();
    else if (key == "mc_runs") o.mc_runs = v.get<std::size_t>();
    else if (key == "greedy_mc_runs") o.greedy_mc_runs = v.get<std::size_t>();
    else if (key == "seed") o.seed = v.get<std::uint64_t>();
    else if (key == "xi") o.hyper.xi = v.get<double>();
    else if (key == "phi") o.hyper.phi = v.get<double>();
    else if (key == "nmf_rank") o.hyper.nmf_rank = v.get<std::size_t>();
    else if (key == "nmf_restarts") o.hyper.nmf_restarts = v.get<std::size_t>();
    else if (key == "nmf_max_iterations") o.hyper.nmf_max_iterations = v.get<std::size_t>();
    else if (key == "alpha_grid") o.hyper.alpha_grid = v.get<std::vector<double>>();
    else if (key == "jc_add") o.hyper.jc_add = v.get<double>();
    else if (key == "jc_remove") o.hyper.jc_remove = v.get<double>();
    else if (key == "out") o.out = v.get<std::string>();
    else throw std::runtime_error("unknown config key '" + key + "'");
  }
}

std::vector<ExperimentSpec> build_specs(const RunOptions& o) {
  if (o.input.empty()) throw std::runtime_error("an input dataset is required (--input)");
  ExperimentSpec base;
  base.dataset.path = o.input;
  base.dataset.format = tempim::parse_format(o.format);
  base.dataset.bins = o.bins;
  base.dataset.scheme = tempim::parse_scheme(o.scheme);
  base.horizon = o.horizon;
  base.p = o.p;
  base.im = tempim::ImAlgorithm::greedy;
  std::vector<double> lambdas = o.lambdas;
  if (!o.preset.empty()) {
    const auto& preset = tempim::find_preset(o.preset);
    if (base.horizon == 0) base.horizon = preset.horizon;
    if (base.p == 0) base.p = preset.p;
    if (lambdas.empty()) lambdas = {preset.lambda};
    base.im = preset.im;
  }
  if (!o.im.empty()) base.im = tempim::parse_im_algorithm(o.im);
  if (lambdas.empty()) lambdas = {0.1};
  if (base.p == 0) throw std::runtime_error("the training length p is required (--p or --preset)");
  base.mc_runs = o.mc_runs;
  base.greedy_mc_runs = o.greedy_mc_runs;
  base.seed = o.seed;
  base.hyper = o.hyper;
  base.workers = 1;

  std::vector<ExperimentSpec> specs;
  for (const auto& m : o.methods)
    for (double lambda : lambdas)
      for (std::size_t k : o.ks) {
        ExperimentSpec s = base;
        s.method = tempim::parse_method(m);
        s.lambda = lambda;
        s.k = k;
        specs.push_back(s);
      }
  return specs;
}

void add_run_flags(CLI::App* cmd, RunOptions& o, bool sweep) {
  cmd->add_option("--input,-i", o.input, "dataset file");
  cmd->add_option("--format", o.format, "snapshots | events | events-uvt");
  cmd->add_option("--bins", o.bins, "snapshot count when aggregating events");
  cmd->add_option("--scheme", o.scheme, "equal-time | equal-count");
  cmd->add_option("--preset", o.preset, "dataset defaults: reality, email4, hs1, hospital, office, copenb, college");
  cmd->add_option("--p", o.p, "number of observed snapshots");
  cmd->add_option("--T", o.horizon, "total snapshots used (default: all)");
  cmd->add_option("--lambda", o.lambdas, "infection probability")->delimiter(',');
  cmd->add_option("--k", o.ks, "seed set size")->delimiter(',');
  cmd->add_option(sweep ? "--methods,--method" : "--method,--methods", o.methods,
                  "oracle, static-last, static-mem, jc, logreg, logreg-sum, nmf, nmf-sum")
      ->delimiter(',');
  cmd->add_option("--im", o.im, "greedy | dyndeg");
  cmd->add_option("--mc-runs", o.mc_runs, "Monte Carlo runs for evaluation");
  cmd->add_option("--greedy-mc-runs", o.greedy_mc_runs, "Monte Carlo runs per greedy evaluation (default: --mc-runs)");
  cmd->add_option("--seed", o.seed, "master RNG seed");
  cmd->add_option("--xi", o.hyper.xi, "density recency decay");
  cmd->add_option("--phi", o.hyper.phi, "NMF attenuation");
  cmd->add_option("--nmf-rank", o.hyper.nmf_rank, "NMF latent dimension (default: round(0.05 n))");
  cmd->add_option("--nmf-restarts", o.hyper.nmf_restarts, "NMF random restarts");
  cmd->add_option("--nmf-max-iterations", o.hyper.nmf_max_iterations, "NMF iteration cap");
  cmd->add_option("--alpha-grid", o.hyper.alpha_grid, "LASSO penalty grid")->delimiter(',');
  cmd->add_option("--jc-add", o.hyper.jc_add, "Jaccard addition fraction");
  cmd->add_option("--jc-remove", o.hyper.jc_remove, "Jaccard removal fraction");
  cmd->add_option("--config", o.config, "JSON config; its keys override flags");
  cmd->add_option("--out,-o", o.out, "results CSV (a .json sidecar is written next to it)");
}

int run_specs(RunOptions& o) {
  apply_config(o);
  const auto specs = build_specs(o);
  const auto sweep = tempim::run_sweep(specs, env_workers());
  if (o.out.empty()) {
    tempim::write_results_csv(std::cout, sweep);
  } else {
    std::ofstream csv(o.out);
    tempim::write_results_csv(csv, sweep);
    std::ofstream json(o.out + ".json");
    json << tempim::results_json(sweep).dump(2) << '\n';
  }
  for (const auto& r : sweep.records)
    if (!r.ok()) std::cerr << "spec " << r.fingerprint << " failed: " << r.error << '\n';
  return sweep.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ex ante influence maximization on temporal networks"};
  app.require_subcommand(1);

  std::string stats_input, stats_format = "snapshots", stats_scheme = "equal-time";
  std::size_t stats_bins = 0;
  auto* stats = app.add_subcommand("stats", "summary statistics of a dataset");
  stats->add_option("--input,-i", stats_input, "dataset file")->required();
  stats->add_option("--format", stats_format, "snapshots | events | events-uvt");
  stats->add_option("--bins", stats_bins, "snapshot count when aggregating events");
  stats->add_option("--scheme", stats_scheme, "equal-time | equal-count");

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "run one experiment (or the product of list-valued flags)");
  add_run_flags(run, run_opts, false);

  RunOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "run every method x lambda x k combination");
  add_run_flags(sweep, sweep_opts, true);

  tempim::SyntheticOptions synth;
  std::string synth_out;
  auto* gen = app.add_subcommand("gen-synthetic", "write a planted stable-hub network in snapshot format");
  gen->add_option("--nodes", synth.nodes);
  gen->add_option("--snapshots", synth.snapshots);
  gen->add_option("--hubs", synth.hubs);
  gen->add_option("--hub-prob", synth.hub_edge_prob);
  gen->add_option("--background-prob", synth.background_edge_prob);
  gen->add_option("--seed", synth.seed);
  gen->add_option("--out,-o", synth_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stats) {
      tempim::DatasetSource src{stats_input, tempim::parse_format(stats_format), stats_bins,
                                tempim::parse_scheme(stats_scheme)};
      const auto s = tempim::dataset_stats(tempim::load_dataset(src));
      std::cout << std::setprecision(6) << "n\t" << s.nodes << "\nm\t" << s.unique_links << "\nmean_density\t"
                << s.mean_density << "\nT\t" << s.snapshots << "\nfNT\t" << s.frac_nodes_half << "\nfLT\t"
                << s.frac_links_half << "\nFNT\t" << s.frac_nodes_ends << "\nFLT\t" << s.frac_links_ends
                << "\nDA\t" << s.degree_assortativity << '\n';
      return 0;
    }
    if (*run) return run_specs(run_opts);
    if (*sweep) return run_specs(sweep_opts);
    if (*gen) {
      const auto net = tempim::generate_stable_hub(synth);
      if (synth_out.empty()) {
        tempim::write_snapshots(std::cout, net);
      } else {
        std::ofstream out(synth_out);
        tempim::write_snapshots(out, net);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
