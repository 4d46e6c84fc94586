#pragma once

// Experiment orchestration: observe snapshots [0, p), forecast [p, T) with
// one of the registered methods, select seeds on the forecast, and score
// them by SI simulation on the true future snapshots.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tempim/core.hpp"
#include "tempim/diffusion.hpp"
#include "tempim/linkpred.hpp"
#include "tempim/parallel.hpp"
#include "tempim/random.hpp"
#include "tempim/select.hpp"
#include "tempim/stats.hpp"

namespace tempim {

enum class Method { oracle, static_last, static_mem, jc, logreg, logreg_sum, nmf, nmf_sum };
enum class ImAlgorithm { greedy, dyndeg };
enum class DatasetFormat { snapshots, events, events_uvt };

inline constexpr Method kAllMethods[] = {Method::oracle,     Method::static_last, Method::static_mem,
                                         Method::jc,         Method::logreg,      Method::logreg_sum,
                                         Method::nmf,        Method::nmf_sum};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::oracle: return "oracle";
    case Method::static_last: return "static-last";
    case Method::static_mem: return "static-mem";
    case Method::jc: return "jc";
    case Method::logreg: return "logreg";
    case Method::logreg_sum: return "logreg-sum";
    case Method::nmf: return "nmf";
    case Method::nmf_sum: return "nmf-sum";
  }
  return "?";
}

inline std::string_view to_string(ImAlgorithm a) { return a == ImAlgorithm::greedy ? "greedy" : "dyndeg"; }

inline std::string_view to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::snapshots: return "snapshots";
    case DatasetFormat::events: return "events";
    case DatasetFormat::events_uvt: return "events-uvt";
  }
  return "?";
}

inline std::string_view to_string(BinScheme s) { return s == BinScheme::equal_time ? "equal-time" : "equal-count"; }

inline Method parse_method(std::string_view s) {
  for (auto m : kAllMethods)
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

inline ImAlgorithm parse_im_algorithm(std::string_view s) {
  if (s == "greedy") return ImAlgorithm::greedy;
  if (s == "dyndeg") return ImAlgorithm::dyndeg;
  throw std::invalid_argument("unknown IM algorithm '" + std::string(s) + "'");
}

inline DatasetFormat parse_format(std::string_view s) {
  if (s == "snapshots") return DatasetFormat::snapshots;
  if (s == "events") return DatasetFormat::events;
  if (s == "events-uvt") return DatasetFormat::events_uvt;
  throw std::invalid_argument("unknown dataset format '" + std::string(s) + "'");
}

inline BinScheme parse_scheme(std::string_view s) {
  if (s == "equal-time") return BinScheme::equal_time;
  if (s == "equal-count") return BinScheme::equal_count;
  throw std::invalid_argument("unknown binning scheme '" + std::string(s) + "'");
}

/// Score-sum methods rank nodes directly and skip the IM algorithm.
inline bool is_score_sum(Method m) { return m == Method::logreg_sum || m == Method::nmf_sum; }

struct DatasetSource {
  std::string path;
  DatasetFormat format = DatasetFormat::snapshots;
  std::size_t bins = 0;  // event formats only
  BinScheme scheme = BinScheme::equal_time;
};

struct Hyperparameters {
  double xi = 0.9;                // density recency decay
  double phi = 0.9;               // NMF attenuation
  std::size_t nmf_rank = 0;       // 0: max(1, round(0.05 n))
  std::size_t nmf_restarts = 25;
  std::size_t nmf_max_iterations = 500;
  std::vector<double> alpha_grid = default_alpha_grid();
  double jc_add = 0.05;
  double jc_remove = 0.05;
};

struct ExperimentSpec {
  DatasetSource dataset;
  std::size_t p = 1;
  std::size_t horizon = 0;  // T; 0 uses every snapshot
  double lambda = 0.1;
  std::size_t k = 1;
  Method method = Method::oracle;
  ImAlgorithm im = ImAlgorithm::greedy;
  std::size_t mc_runs = 1000;
  std::size_t greedy_mc_runs = 0;  // 0: same as mc_runs
  std::uint64_t seed = 0;
  Hyperparameters hyper;
  std::size_t workers = 1;  // execution only; not part of the fingerprint
};

/// Per-dataset defaults for the evaluated real-world networks.
struct DatasetPreset {
  std::string_view name;
  std::size_t horizon;
  std::size_t p;
  double lambda;
  ImAlgorithm im;
};

inline constexpr DatasetPreset kPresets[] = {
    {"reality", 24, 20, 0.10, ImAlgorithm::greedy},   {"email4", 39, 30, 0.05, ImAlgorithm::dyndeg},
    {"hs1", 20, 16, 0.10, ImAlgorithm::dyndeg},       {"hospital", 16, 12, 0.10, ImAlgorithm::greedy},
    {"office", 7, 6, 0.10, ImAlgorithm::greedy},      {"copenb", 100, 90, 0.05, ImAlgorithm::dyndeg},
    {"college", 50, 40, 0.25, ImAlgorithm::dyndeg},
};

inline const DatasetPreset& find_preset(std::string_view name) {
  for (const auto& p : kPresets)
    if (p.name == name) return p;
  throw std::invalid_argument("unknown dataset preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Serialization and fingerprints
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ExperimentSpec& s) {
  return {
      {"dataset",
       {{"path", s.dataset.path},
        {"format", to_string(s.dataset.format)},
        {"bins", s.dataset.bins},
        {"scheme", to_string(s.dataset.scheme)}}},
      {"p", s.p},
      {"T", s.horizon},
      {"lambda", s.lambda},
      {"k", s.k},
      {"method", to_string(s.method)},
      {"im", to_string(s.im)},
      {"mc_runs", s.mc_runs},
      {"greedy_mc_runs", s.greedy_mc_runs},
      {"seed", s.seed},
      {"hyper",
       {{"xi", s.hyper.xi},
        {"phi", s.hyper.phi},
        {"nmf_rank", s.hyper.nmf_rank},
        {"nmf_restarts", s.hyper.nmf_restarts},
        {"nmf_max_iterations", s.hyper.nmf_max_iterations},
        {"alpha_grid", s.hyper.alpha_grid},
        {"jc_add", s.hyper.jc_add},
        {"jc_remove", s.hyper.jc_remove}}},
  };
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return out;
}

/// Stable hash of every result-relevant spec field.
inline std::string fingerprint(const ExperimentSpec& s) { return hex64(fnv1a64(to_json(s).dump())); }

/// Hash of the fields that determine the forecast (shared across k, lambda,
/// IM algorithm and evaluation settings).
inline std::string prediction_key(const ExperimentSpec& s) {
  auto j = to_json(s);
  for (const char* drop : {"k", "lambda", "im", "mc_runs", "greedy_mc_runs"}) j.erase(drop);
  return hex64(fnv1a64(j.dump()));
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct StageTimings {
  double load = 0.0;
  double predict = 0.0;
  double select = 0.0;
  double evaluate = 0.0;
};

struct ResultRecord {
  std::string fingerprint;
  ExperimentSpec spec;
  double mean_spread = 0.0;
  double std_error = 0.0;
  SeedSet seeds;
  std::size_t n_active = 0;  // active nodes in the window seeds were chosen on
  std::size_t filled = 0;    // seeds added by the degree fill rule
  StageTimings timings;
  std::vector<std::uint32_t> per_run_final_counts;
  std::string error;  // non-empty for failed specs

  bool ok() const { return error.empty(); }
};

/// Forecast used for seed selection. Exactly one of `window` / `scores` is
/// set: score-sum methods carry the score matrix they rank by.
struct Forecast {
  std::optional<TemporalNetwork> window;
  std::optional<ScoreMatrix> scores;
  Snapshot static_graph;  // graph for static degree discount (static methods)
  bool is_static = false;
};

namespace detail {

inline void validate(const ExperimentSpec& s, const TemporalNetwork& net) {
  if (s.p < 1 || s.p >= net.horizon())
    throw std::invalid_argument("need 1 <= p < T (p = " + std::to_string(s.p) + ", T = " +
                                std::to_string(net.horizon()) + ")");
  if (s.k < 1 || s.k > net.node_count())
    throw std::invalid_argument("need 1 <= k <= n (k = " + std::to_string(s.k) + ")");
  if (!(s.lambda >= 0.0 && s.lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  if (s.mc_runs < 1) throw std::invalid_argument("mc_runs must be at least 1");
  if ((s.method == Method::logreg || s.method == Method::logreg_sum) && s.p < 3)
    throw std::invalid_argument("logistic methods need p >= 3");
}

inline TemporalNetwork replicate(const Snapshot& g, std::size_t steps) {
  return TemporalNetwork(g.node_count(), std::vector<Snapshot>(steps, g));
}

inline NmfOptions nmf_options(const ExperimentSpec& s, std::size_t n) {
  NmfOptions o;
  o.rank = s.hyper.nmf_rank ? s.hyper.nmf_rank : default_nmf_rank(n);
  o.attenuation = s.hyper.phi;
  o.restarts = s.hyper.nmf_restarts;
  o.max_iterations = s.hyper.nmf_max_iterations;
  o.seed = stream_seed(s.seed, 4);
  o.workers = s.workers;
  return o;
}

inline double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace detail

inline TemporalNetwork load_dataset(const DatasetSource& src) {
  if (src.format == DatasetFormat::snapshots) return read_snapshots_file(src.path);
  if (src.bins < 1) throw std::invalid_argument("event datasets need a bin count");
  const auto columns = src.format == DatasetFormat::events ? EventColumns::time_u_v : EventColumns::u_v_time;
  return aggregate(read_events_file(src.path, columns), src.bins, src.scheme);
}

/// Forecast from the observed snapshots only. `observed` holds snapshots
/// [0, p); the true future is deliberately not a parameter. The oracle has
/// no forecast and is handled by the caller.
inline Forecast predict_window(const ExperimentSpec& spec, const TemporalNetwork& observed, std::size_t steps) {
  const std::size_t p = observed.horizon();
  const std::size_t n = observed.node_count();
  Forecast f;
  switch (spec.method) {
    case Method::oracle:
      throw std::logic_error("oracle selection uses the true future, not a forecast");
    case Method::static_last:
      f.static_graph = observed.snapshot(p - 1);
      f.is_static = true;
      f.window = detail::replicate(f.static_graph, steps);
      break;
    case Method::static_mem:
      f.static_graph = memory_graph(observed, p);
      f.is_static = true;
      f.window = detail::replicate(f.static_graph, steps);
      break;
    case Method::jc:
      f.window = TemporalNetwork(n, jaccard_rollout(observed.snapshot(p - 1), steps, spec.hyper.jc_add,
                                                    spec.hyper.jc_remove, stream_seed(spec.seed, 3)));
      break;
    case Method::logreg:
    case Method::logreg_sum: {
      LassoOptions opts;
      opts.alpha_grid = spec.hyper.alpha_grid;
      opts.workers = spec.workers;
      const auto model = fit_lasso_logit(observed, p, opts);
      if (spec.method == Method::logreg_sum) {
        f.scores = lasso_rollout(model, observed, p, 1).front();
        break;
      }
      const double rho = density_profile(observed, p, spec.hyper.xi).weighted;
      std::vector<Snapshot> snaps;
      for (const auto& s : lasso_rollout(model, observed, p, steps)) snaps.push_back(binarize(s, rho));
      f.window = TemporalNetwork(n, std::move(snaps));
      break;
    }
    case Method::nmf:
    case Method::nmf_sum: {
      const auto opts = detail::nmf_options(spec, n);
      const auto model = fit_temporal_nmf(observed, p, opts);
      if (spec.method == Method::nmf_sum) {
        f.scores = nmf_scores(model);
        break;
      }
      const double rho = density_profile(observed, p, spec.hyper.xi).weighted;
      f.window = nmf_rollout(model, observed, p, steps, rho, opts).future.as_network(n);
      break;
    }
  }
  return f;
}

/// Caches loaded datasets and forecasts across the specs of one sweep.
class ExperimentCache {
 public:
  std::shared_ptr<const TemporalNetwork> dataset(const DatasetSource& src) {
    ExperimentSpec probe;
    probe.dataset = src;
    const std::string key = to_json(probe).at("dataset").dump();
    std::lock_guard lock(mutex_);
    auto& slot = datasets_[key];
    if (!slot) slot = std::make_shared<const TemporalNetwork>(load_dataset(src));
    return slot;
  }

  std::shared_ptr<const Forecast> forecast(const ExperimentSpec& spec, const TemporalNetwork& observed,
                                           std::size_t steps) {
    const std::string key = prediction_key(spec);
    {
      std::lock_guard lock(mutex_);
      if (auto it = forecasts_.find(key); it != forecasts_.end()) return it->second;
    }
    auto made = std::make_shared<const Forecast>(predict_window(spec, observed, steps));
    std::lock_guard lock(mutex_);
    return forecasts_.emplace(key, std::move(made)).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const TemporalNetwork>> datasets_;
  std::map<std::string, std::shared_ptr<const Forecast>> forecasts_;
};

/// Runs one spec on an in-memory network (snapshots beyond spec.horizon are
/// ignored).
inline ResultRecord run_experiment(const ExperimentSpec& spec, const TemporalNetwork& full,
                                   ExperimentCache* cache = nullptr) {
  using clock = std::chrono::steady_clock;
  ResultRecord rec;
  rec.spec = spec;
  rec.fingerprint = fingerprint(spec);

  const std::size_t horizon = spec.horizon ? spec.horizon : full.horizon();
  if (horizon > full.horizon())
    throw std::invalid_argument("T = " + std::to_string(horizon) + " exceeds the " +
                                std::to_string(full.horizon()) + " available snapshots");
  const TemporalNetwork net = full.slice(0, horizon);
  detail::validate(spec, net);
  const std::size_t p = spec.p;
  const std::size_t steps = horizon - p;
  const TemporalNetwork observed = net.slice(0, p);
  const Snapshot memory = memory_graph(observed, p);

  auto t0 = clock::now();
  std::shared_ptr<const Forecast> forecast;
  std::optional<TemporalNetwork> truth_window;
  if (spec.method == Method::oracle) {
    truth_window = net.slice(p, horizon);
  } else {
    forecast = cache ? cache->forecast(spec, observed, steps)
                     : std::make_shared<const Forecast>(predict_window(spec, observed, steps));
  }
  rec.timings.predict = detail::elapsed(t0);

  t0 = clock::now();
  if (forecast && forecast->scores) {
    rec.seeds = score_sum_select(*forecast->scores, spec.k);
    const Eigen::VectorXd theta = forecast->scores->row_sums();
    rec.n_active = static_cast<std::size_t>((theta.array() > 0.0).count());
  } else {
    const TemporalNetwork& window = truth_window ? *truth_window : *forecast->window;
    rec.n_active = window.active_node_count();
    const std::size_t k_eff = std::min(spec.k, rec.n_active);
    SeedSet chosen;
    if (k_eff > 0) {
      if (spec.im == ImAlgorithm::greedy) {
        DiffusionConfig cfg;
        cfg.lambda = spec.lambda;
        cfg.start_t = 0;
        cfg.end_t = steps - 1;
        cfg.mc_runs = spec.greedy_mc_runs ? spec.greedy_mc_runs : spec.mc_runs;
        cfg.rng_seed = stream_seed(spec.seed, 1);
        cfg.workers = spec.workers;
        chosen = greedy_select(window, k_eff, mc_estimator(window, cfg));
      } else if (forecast && forecast->is_static) {
        chosen = static_degree_discount(forecast->static_graph, k_eff);
      } else if (steps >= 2) {
        chosen = dyn_deg_discount(window, 0, steps - 1, k_eff, spec.lambda);
      } else {
        // A single-snapshot window has no dynamic degree.
        chosen = static_degree_discount(window.snapshot(0), k_eff);
      }
    }
    rec.seeds = fill_by_degree(chosen, memory, spec.k);
    rec.filled = spec.k - chosen.size();
  }
  rec.timings.select = detail::elapsed(t0);

  t0 = clock::now();
  DiffusionConfig eval;
  eval.lambda = spec.lambda;
  eval.start_t = p;
  eval.end_t = horizon - 1;
  eval.mc_runs = spec.mc_runs;
  eval.rng_seed = stream_seed(spec.seed, 2);
  eval.workers = spec.workers;
  auto outcome = simulate_si(net, rec.seeds, eval);
  rec.timings.evaluate = detail::elapsed(t0);
  rec.mean_spread = outcome.mean_spread;
  rec.std_error = outcome.std_error;
  rec.per_run_final_counts = std::move(outcome.per_run_final_counts);
  return rec;
}

/// Loads the spec's dataset and runs it.
inline ResultRecord run_experiment(const ExperimentSpec& spec, ExperimentCache* cache = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  std::shared_ptr<const TemporalNetwork> net =
      cache ? cache->dataset(spec.dataset) : std::make_shared<const TemporalNetwork>(load_dataset(spec.dataset));
  const double load = detail::elapsed(t0);
  auto rec = run_experiment(spec, *net, cache);
  rec.timings.load = load;
  return rec;
}

struct SweepResult {
  std::vector<ResultRecord> records;  // sorted by fingerprint
  bool all_ok() const {
    return std::all_of(records.begin(), records.end(), [](const ResultRecord& r) { return r.ok(); });
  }
};

/// Runs every spec; failures become error records. Specs sharing a
/// forecast are grouped so each forecast is computed once; groups run on
/// `workers` threads.
inline SweepResult run_sweep(const std::vector<ExperimentSpec>& specs, std::size_t workers = 1,
                             const TemporalNetwork* in_memory = nullptr) {
  if (specs.empty()) throw std::invalid_argument("sweep needs at least one spec");
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < specs.size(); ++i) groups[prediction_key(specs[i])].push_back(i);
  std::vector<std::vector<std::size_t>> order;
  for (auto& [key, members] : groups) order.push_back(std::move(members));

  ExperimentCache cache;
  SweepResult result;
  result.records.resize(specs.size());
  parallel_for(order.size(), workers, [&](std::size_t g) {
    for (auto i : order[g]) {
      try {
        result.records[i] = in_memory ? run_experiment(specs[i], *in_memory, &cache) : run_experiment(specs[i], &cache);
      } catch (const std::exception& e) {
        ResultRecord failed;
        failed.spec = specs[i];
        failed.fingerprint = fingerprint(specs[i]);
        failed.error = e.what();
        result.records[i] = std::move(failed);
      }
    }
  });
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const ResultRecord& a, const ResultRecord& b) { return a.fingerprint < b.fingerprint; });
  return result;
}

// ---------------------------------------------------------------------------
// Result emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// Key identifying the oracle row comparable to a record.
inline std::string oracle_key(const ExperimentSpec& s) {
  auto j = to_json(s);
  j.erase("method");
  return j.dump();
}

}  // namespace detail

/// Tidy results table, one row per record, including mean_spread divided
/// by the matching oracle row's spread.
inline void write_results_csv(std::ostream& out, const SweepResult& sweep) {
  std::map<std::string, double> oracle;
  for (const auto& r : sweep.records)
    if (r.ok() && r.spec.method == Method::oracle) oracle[detail::oracle_key(r.spec)] = r.mean_spread;

  out << "fingerprint,dataset,method,im,k,lambda,p,T,mc_runs,seed,mean_spread,std_error,ratio_to_oracle,n_active,"
         "filled,seeds,status\n";
  for (const auto& r : sweep.records) {
    const auto& s = r.spec;
    out << r.fingerprint << ',' << detail::csv_escape(s.dataset.path) << ',' << to_string(s.method) << ','
        << (is_score_sum(s.method) ? std::string_view("none") : to_string(s.im)) << ',' << s.k << ','
        << detail::format_double(s.lambda) << ',' << s.p << ',' << s.horizon << ',' << s.mc_runs << ',' << s.seed
        << ',';
    if (!r.ok()) {
      out << ",,,,,," << detail::csv_escape("error: " + r.error) << '\n';
      continue;
    }
    out << detail::format_double(r.mean_spread) << ',' << detail::format_double(r.std_error) << ',';
    if (auto it = oracle.find(detail::oracle_key(s)); it != oracle.end() && it->second > 0.0)
      out << detail::format_double(r.mean_spread / it->second);
    out << ',' << r.n_active << ',' << r.filled << ',';
    const auto& nodes = r.seeds.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) out << (i ? ";" : "") << nodes[i];
    out << ",ok\n";
  }
}

inline std::string results_csv(const SweepResult& sweep) {
  std::ostringstream out;
  write_results_csv(out, sweep);
  return out.str();
}

/// Full records, including specs, seed sets and stage timings.
inline nlohmann::json results_json(const SweepResult& sweep) {
  auto rows = nlohmann::json::array();
  for (const auto& r : sweep.records) {
    nlohmann::json row = {{"fingerprint", r.fingerprint}, {"spec", to_json(r.spec)}};
    if (!r.ok()) {
      row["error"] = r.error;
    } else {
      row["mean_spread"] = r.mean_spread;
      row["std_error"] = r.std_error;
      row["seeds"] = r.seeds.nodes();
      row["n_active"] = r.n_active;
      row["filled"] = r.filled;
      row["timings"] = {{"load", r.timings.load},
                        {"predict", r.timings.predict},
                        {"select", r.timings.select},
                        {"evaluate", r.timings.evaluate}};
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tempim
