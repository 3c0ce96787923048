#include "unpast/consensus.hpp"
#include "unpast/evaluation.hpp"
#include "unpast/io.hpp"
#include "unpast/pipeline.hpp"
#include "unpast/report.hpp"
#include "unpast/simulation.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace unpast;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("UNPAST_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw UsageError(fmt::format("UNPAST_THREADS must be a positive integer, got \"{}\"", env));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

template <class F>
void write_stream(const fs::path& path, F&& body) {
  std::ostringstream s;
  body(s);
  write_text(path, s.str());
}

void write_modules(const fs::path& path, const std::vector<FeatureModule>& modules,
                   const std::vector<std::string>& feature_ids) {
  write_stream(path, [&](std::ostream& out) {
    out << "id\tmode\tn_features\tfeatures\n";
    for (std::size_t i = 0; i < modules.size(); ++i) {
      const auto& mod = modules[i];
      out << i << '\t' << to_string(mod.mode) << '\t' << mod.members.size() << '\t';
      for (std::size_t k = 0; k < mod.members.size(); ++k) {
        if (k) out << ' ';
        if (mod.signs[k] < 0) out << '-';
        out << feature_ids[mod.members[k]];
      }
      out << '\n';
    }
  });
}

// -- run --------------------------------------------------------------------

struct RunOptions {
  std::string matrix;
  std::string binarization = "kmeans";
  std::string clustering = "louvain";
  std::string directions = "separate";
  double pval = 0.01;
  std::size_t min_n_samples = 5;
  double edge_threshold = 1.0 / 3.0;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  std::size_t n_runs = 1;
  double de_lfc = 1.0;
  double de_pval = 0.05;
  bool no_de = false;
  std::string null_cache;
  bool dump_modules = false;
};

UnpastParams make_params(const RunOptions& o) {
  UnpastParams p;
  try {
    p.binarization.method = parse_binarization_method(o.binarization);
    p.clustering.algorithm = parse_clustering_algorithm(o.clustering);
    p.clustering.direction_mode = parse_direction_mode(o.directions);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  p.binarization.p_threshold = o.pval;
  p.binarization.min_bicluster_size = o.min_n_samples;
  p.clustering.edge_threshold = o.edge_threshold;
  p.clustering.louvain_resolution = o.resolution;
  p.de.enabled = !o.no_de;
  p.de.lfc_min = o.de_lfc;
  p.de.p_max = o.de_pval;
  if (!o.null_cache.empty()) p.null_cache_dir = fs::path(o.null_cache);
  p.set_seed(o.seed);
  try {
    validate(p.binarization);
    validate(p.clustering);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.n_runs < 1) throw UsageError("--n-runs must be at least 1");
  return p;
}

void cmd_run(const RunOptions& o, const fs::path& out) {
  UnpastParams params = make_params(o);
  const ExpressionMatrix m = read_matrix(o.matrix);

  Json config;
  config["command"] = "run";
  config["matrix"] = o.matrix;
  config["n_runs"] = o.n_runs;
  config["params"] = to_json(params);

  if (o.n_runs == 1) {
    const auto result = run_unpast(m, params);
    write_biclusters(out / "biclusters.tsv", result.biclusters, m.feature_ids(), m.sample_ids());
    if (o.dump_modules) write_modules(out / "modules.tsv", result.modules, m.feature_ids());
    write_text(out / "config.json", dump(config));
    std::cout << result.biclusters.size() << " biclusters\n";
    return;
  }

  std::vector<std::vector<Bicluster>> runs;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < o.n_runs; ++i) {
    params.set_seed(o.seed + i);
    auto result = run_unpast(m, params);
    const std::string name = fmt::format("biclusters_run{}.tsv", i);
    write_biclusters(out / name, result.biclusters, m.feature_ids(), m.sample_ids());
    if (o.dump_modules) write_modules(out / fmt::format("modules_run{}.tsv", i), result.modules, m.feature_ids());
    runs.push_back(std::move(result.biclusters));
    names.push_back(name);
  }
  ConsensusParams cp;
  cp.method = params.binarization.method;
  cp.min_bicluster_size = o.min_n_samples;
  cp.seed = o.seed;
  const auto cons = consensus_biclusters(runs, m, cp);
  write_biclusters(out / "biclusters.tsv", cons.biclusters, m.feature_ids(), m.sample_ids());
  write_text(out / "consensus.json", dump(to_json(cons, names, m.feature_ids(), m.sample_ids())));
  config["consensus"] = to_json(cp);
  write_text(out / "config.json", dump(config));
  std::cout << cons.biclusters.size() << " consensus biclusters\n";
}

// -- simulate ---------------------------------------------------------------

struct SimOptions {
  std::string scenario = "A";
  SimulationSpec spec;
  long coexpr_modules = -1;
  bool suite = false;
};

void write_simulation(const SimulatedData& d, const SimulationSpec& spec, const fs::path& dir) {
  write_matrix(dir / "matrix.tsv", d.matrix);
  write_ground_truth(dir / "truth.tsv", d.truth, d.matrix.sample_ids());
  write_text(dir / "simulation.json", dump(to_json(spec)));
}

void cmd_simulate(SimOptions o, const fs::path& out) {
  Json config;
  config["command"] = "simulate";
  if (o.suite) {
    const auto specs = suite_specs(o.spec.seed);
    const auto data = generate_suite(o.spec.seed);
    Json entries = Json::array();
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const std::string name =
          fmt::format("scenario{}_biomarkers{}", to_string(specs[i].scenario), specs[i].n_biomarkers);
      write_simulation(data[i], specs[i], out / name);
      entries.push_back(name);
    }
    config["suite"] = true;
    config["seed"] = o.spec.seed;
    config["datasets"] = std::move(entries);
    write_text(out / "config.json", dump(config));
    return;
  }
  try {
    o.spec.scenario = parse_scenario(o.scenario);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (o.coexpr_modules >= 0) o.spec.coexpr_modules = static_cast<std::size_t>(o.coexpr_modules);
  try {
    validate(o.spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto d = generate(o.spec);
  write_simulation(d, o.spec, out);
  config["suite"] = false;
  config["spec"] = to_json(o.spec);
  write_text(out / "config.json", dump(config));
}

// -- evaluate / redundancy / consensus ---------------------------------------

struct EvalOptions {
  std::string biclusters;
  std::string truth;
  std::string matrix;
  double alpha = 0.05;
};

void cmd_evaluate(const EvalOptions& o, const fs::path& out) {
  const auto header = read_matrix_header(o.matrix);
  const auto truth = read_ground_truth(o.truth, header.sample_ids);
  const auto bics = resolve_biclusters(read_bicluster_records(o.biclusters), header.feature_ids, header.sample_ids);
  std::vector<IndexSet> predicted;
  for (const auto& b : bics) predicted.push_back(b.samples);
  const auto report = best_match_performance(truth, predicted, header.sample_ids.size(), o.alpha);
  write_text(out / "report.json", dump(to_json(report)));
  write_stream(out / "matches.tsv", [&](std::ostream& s) { write_match_table(s, report); });
  Json config;
  config["command"] = "evaluate";
  config["biclusters"] = o.biclusters;
  config["truth"] = o.truth;
  config["matrix"] = o.matrix;
  config["alpha"] = o.alpha;
  write_text(out / "config.json", dump(config));
  std::cout << fmt::format("performance {:.6f}\n", report.total);
}

void cmd_redundancy(const EvalOptions& o, const fs::path& out) {
  const auto header = read_matrix_header(o.matrix);
  const auto bics = resolve_biclusters(read_bicluster_records(o.biclusters), header.feature_ids, header.sample_ids);
  if (bics.size() < 2) throw DataError("redundancy needs at least two biclusters");
  const auto report = fsp(bics, header.feature_ids.size(), header.sample_ids.size(), o.alpha);
  write_text(out / "redundancy.json", dump(to_json(report)));
  write_stream(out / "pairs.tsv", [&](std::ostream& s) { write_redundancy_table(s, report); });
  Json config;
  config["command"] = "redundancy";
  config["biclusters"] = o.biclusters;
  config["matrix"] = o.matrix;
  config["alpha"] = o.alpha;
  write_text(out / "config.json", dump(config));
  std::cout << fmt::format("fsp {:.6f}\n", report.fsp);
}

struct ConsOptions {
  std::string matrix;
  std::vector<std::string> runs;
  std::string binarization = "kmeans";
  std::size_t min_n_samples = 5;
  double min_frequency = 1.0 / 3.0;
  double resolution = 1.0;
  std::uint64_t seed = 0;
};

void cmd_consensus(const ConsOptions& o, const fs::path& out) {
  ConsensusParams cp;
  try {
    cp.method = parse_binarization_method(o.binarization);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  cp.min_bicluster_size = o.min_n_samples;
  cp.min_frequency = o.min_frequency;
  cp.resolution = o.resolution;
  cp.seed = o.seed;
  if (o.runs.size() < 2) throw UsageError("--runs needs at least two bicluster files");
  const ExpressionMatrix m = read_matrix(o.matrix);
  std::vector<std::vector<Bicluster>> runs;
  for (const auto& r : o.runs) {
    auto bics = resolve_biclusters(read_bicluster_records(r), m.feature_ids(), m.sample_ids());
    for (auto& b : bics) finalize_bicluster(m, b);
    runs.push_back(std::move(bics));
  }
  const auto cons = consensus_biclusters(runs, m, cp);
  write_biclusters(out / "consensus.tsv", cons.biclusters, m.feature_ids(), m.sample_ids());
  write_text(out / "consensus.json", dump(to_json(cons, o.runs, m.feature_ids(), m.sample_ids())));
  Json config;
  config["command"] = "consensus";
  config["matrix"] = o.matrix;
  config["runs"] = o.runs;
  config["params"] = to_json(cp);
  write_text(out / "config.json", dump(config));
  std::cout << cons.biclusters.size() << " consensus biclusters\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"unpast: differentially expressed biclusters"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (default: UNPAST_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
  };

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Find biclusters in an expression matrix");
  run_cmd->add_option("matrix", run.matrix, "Features x samples TSV")->required();
  run_cmd->add_option("--binarization", run.binarization)->check(CLI::IsMember({"kmeans", "ward", "gmm"}))
      ->capture_default_str();
  run_cmd->add_option("--clustering", run.clustering)->check(CLI::IsMember({"louvain", "tom"}))
      ->capture_default_str();
  run_cmd->add_option("--directions", run.directions)->check(CLI::IsMember({"separate", "joint"}))
      ->capture_default_str();
  run_cmd->add_option("--pval", run.pval, "Binarization p-value threshold")->capture_default_str();
  run_cmd->add_option("--min-n-samples", run.min_n_samples, "Minimum bicluster size")->capture_default_str();
  run_cmd->add_option("--edge-threshold", run.edge_threshold, "Jaccard edge threshold")->capture_default_str();
  run_cmd->add_option("--resolution", run.resolution, "Louvain resolution")->capture_default_str();
  run_cmd->add_option("--seed", run.seed)->capture_default_str();
  run_cmd->add_option("--n-runs", run.n_runs, "Seeded runs; more than one adds a consensus")
      ->capture_default_str();
  run_cmd->add_option("--de-lfc", run.de_lfc)->capture_default_str();
  run_cmd->add_option("--de-pval", run.de_pval)->capture_default_str();
  run_cmd->add_flag("--no-de", run.no_de, "Skip the differential expression check");
  run_cmd->add_option("--null-cache", run.null_cache, "Directory for cached null SNR models");
  run_cmd->add_flag("--dump-modules", run.dump_modules, "Also write modules.tsv");
  add_common(run_cmd);

  SimOptions sim;
  std::string sizes_text = "10,20,50,100";
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic benchmark dataset");
  sim_cmd->add_option("--scenario", sim.scenario)->check(CLI::IsMember({"A", "B", "C"}))->capture_default_str();
  sim_cmd->add_option("--n-features", sim.spec.n_features)->capture_default_str();
  sim_cmd->add_option("--n-samples", sim.spec.n_samples)->capture_default_str();
  sim_cmd->add_option("--subtype-sizes", sizes_text, "Comma-separated subtype sizes")->capture_default_str();
  sim_cmd->add_option("--n-biomarkers", sim.spec.n_biomarkers)->capture_default_str();
  sim_cmd->add_option("--signal-mean", sim.spec.signal_mean)->capture_default_str();
  sim_cmd->add_option("--signal-std", sim.spec.signal_std)->capture_default_str();
  sim_cmd->add_option("--coexpr-modules", sim.coexpr_modules, "Default: 4 in scenario C, else 0");
  sim_cmd->add_option("--coexpr-size", sim.spec.coexpr_size)->capture_default_str();
  sim_cmd->add_option("--coexpr-r", sim.spec.coexpr_r)->capture_default_str();
  sim_cmd->add_option("--seed", sim.spec.seed)->capture_default_str();
  sim_cmd->add_flag("--suite", sim.suite, "Write the 3 x 3 scenario/biomarker grid");
  add_common(sim_cmd);

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score biclusters against known subtypes");
  eval_cmd->add_option("--biclusters", ev.biclusters)->required();
  eval_cmd->add_option("--truth", ev.truth)->required();
  eval_cmd->add_option("--matrix", ev.matrix, "Matrix the biclusters refer to")->required();
  eval_cmd->add_option("--alpha", ev.alpha)->capture_default_str();
  add_common(eval_cmd);

  EvalOptions red;
  auto* red_cmd = app.add_subcommand("redundancy", "Fraction of significantly overlapping bicluster pairs");
  red_cmd->add_option("--biclusters", red.biclusters)->required();
  red_cmd->add_option("--matrix", red.matrix)->required();
  red_cmd->add_option("--alpha", red.alpha)->capture_default_str();
  add_common(red_cmd);

  ConsOptions co;
  auto* cons_cmd = app.add_subcommand("consensus", "Combine biclusters of several runs");
  cons_cmd->add_option("--matrix", co.matrix)->required();
  cons_cmd->add_option("--runs", co.runs, "Bicluster files, one per run")->required();
  cons_cmd->add_option("--binarization", co.binarization)->check(CLI::IsMember({"kmeans", "ward", "gmm"}))
      ->capture_default_str();
  cons_cmd->add_option("--min-n-samples", co.min_n_samples)->capture_default_str();
  cons_cmd->add_option("--min-frequency", co.min_frequency)->capture_default_str();
  cons_cmd->add_option("--resolution", co.resolution)->capture_default_str();
  cons_cmd->add_option("--seed", co.seed)->capture_default_str();
  add_common(cons_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    omp_set_num_threads(resolve_threads(threads));
    const fs::path out(out_dir);
    if (*run_cmd) {
      cmd_run(run, out);
    } else if (*sim_cmd) {
      sim.spec.subtype_sizes.clear();
      std::stringstream ss(sizes_text);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          sim.spec.subtype_sizes.push_back(std::stoul(tok));
        } catch (const std::exception&) {
          throw UsageError(fmt::format("--subtype-sizes: \"{}\" is not a size", tok));
        }
      }
      cmd_simulate(sim, out);
    } else if (*eval_cmd) {
      cmd_evaluate(ev, out);
    } else if (*red_cmd) {
      cmd_redundancy(red, out);
    } else if (*cons_cmd) {
      cmd_consensus(co, out);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
