#include "unpast/consensus.hpp"
#include "unpast/evaluation.hpp"
#include "unpast/pipeline.hpp"
#include "unpast/rng.hpp"
#include "unpast/simulation.hpp"
#include "unpast/stats.hpp"

#include <fmt/format.h>

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace unpast;

namespace {

// Tolerances and bars.
constexpr double kEasyMinTotal = 0.90;
constexpr double kEasyMaxSeconds = 600.0;
constexpr int kHardMinSignificantRuns = 3;
constexpr double kHardMaxDrop = 0.35;
constexpr double kNullMaxPassFraction = 0.025;
constexpr std::size_t kNullMaxBiclusters = 3;
constexpr double kFisherTol = 1e-10;
constexpr double kAriTol = 1e-12;
constexpr double kSnrTol = 1e-12;
constexpr double kAffineTol = 1e-9;
constexpr int kRandomTrials = 100;
constexpr int kRandomMinClean = 95;
constexpr double kScaleMaxSeconds = 30.0 * 60.0;
constexpr double kScaleMaxRssGiB = 8.0;
constexpr int kSeeds = 5;

const fs::path kRoot = fs::temp_directory_path() / "unpast_acceptance";

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<IndexSet> sample_sets(const std::vector<Bicluster>& bics) {
  std::vector<IndexSet> out;
  for (const auto& b : bics) out.push_back(b.samples);
  return out;
}

UnpastParams default_params(std::uint64_t seed) {
  UnpastParams p;
  p.set_seed(seed);
  p.null_cache_dir = kRoot / "null_cache";
  return p;
}

IndexSet random_subset(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  std::shuffle(v.begin(), v.end(), rng);
  v.resize(k);
  std::sort(v.begin(), v.end());
  return v;
}

IndexSet span_set(std::size_t a, std::size_t b) {
  IndexSet s(b - a);
  std::iota(s.begin(), s.end(), a);
  return s;
}

// 1. Scenario A, 500 biomarkers, default parameters.
void easy_regime() {
  double worst = 1.0, slowest = 0.0;
  std::string totals;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    SimulationSpec spec;
    spec.scenario = Scenario::A;
    spec.n_biomarkers = 500;
    spec.seed = static_cast<std::uint64_t>(seed);
    const auto data = generate(spec);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = run_unpast(data.matrix, default_params(spec.seed));
    slowest = std::max(slowest, seconds_since(t0));
    const double total = best_match_performance(data.truth, sample_sets(result.biclusters), 200).total;
    worst = std::min(worst, total);
    totals += fmt::format("{}{:.4f}", totals.empty() ? "" : " ", total);
  }
  report(1, "scenario A with 500 biomarkers", worst >= kEasyMinTotal && slowest < kEasyMaxSeconds,
         fmt::format("totals {}; min {:.4f} >= {}; slowest run {:.1f} s < {} s", totals, worst,
                     kEasyMinTotal, slowest, kEasyMaxSeconds));
}

// 2. Scenarios B and C, 5 vs 500 biomarkers, one tuned parameter set.
UnpastParams hard_params(std::uint64_t seed) {
  auto p = default_params(seed);
  p.binarization.method = BinarizationMethod::gmm;
  p.clustering.edge_threshold = 0.5;
  return p;
}

void hard_regime() {
  bool pass = true;
  std::string detail = "gmm binarization, edge threshold 0.5;";
  for (auto scenario : {Scenario::B, Scenario::C}) {
    std::map<std::size_t, double> mean_total;
    std::vector<int> significant(4, 0);
    for (std::size_t nb : {std::size_t{5}, std::size_t{500}}) {
      double sum = 0.0;
      for (int seed = 1; seed <= kSeeds; ++seed) {
        SimulationSpec spec;
        spec.scenario = scenario;
        spec.n_biomarkers = nb;
        spec.seed = static_cast<std::uint64_t>(seed);
        const auto data = generate(spec);
        const auto result = run_unpast(data.matrix, hard_params(spec.seed));
        const auto rep = best_match_performance(data.truth, sample_sets(result.biclusters), 200);
        sum += rep.total;
        if (nb == 5) {
          for (std::size_t t = 0; t < rep.truths.size(); ++t) {
            if (rep.truths[t].best_match && rep.truths[t].adjusted_pvalue < 0.05) ++significant[t];
          }
        }
      }
      mean_total[nb] = sum / kSeeds;
    }
    const double drop = mean_total[500] - mean_total[5];
    const int fewest = *std::min_element(significant.begin(), significant.end());
    pass = pass && fewest >= kHardMinSignificantRuns && drop <= kHardMaxDrop;
    detail += fmt::format(" {}: significant runs per subtype {}/{}/{}/{} (need >= {} of {}), mean total 500 {:.4f} -> 5 {:.4f}, drop {:.4f} <= {};",
                          to_string(scenario), significant[0], significant[1], significant[2],
                          significant[3], kHardMinSignificantRuns, kSeeds, mean_total[500],
                          mean_total[5], drop, kHardMaxDrop);
  }
  detail.pop_back();
  report(2, "scenarios B and C with 5 biomarkers", pass, detail);
}

// 3. Pure noise.
ExpressionMatrix noise_matrix(std::size_t nf, std::size_t ns, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> v(nf * ns);
  for (auto& x : v) x = nd(rng);
  std::vector<std::string> fid, sid;
  for (std::size_t i = 0; i < nf; ++i) fid.push_back("g" + std::to_string(i));
  for (std::size_t j = 0; j < ns; ++j) sid.push_back("s" + std::to_string(j));
  return {fid, sid, v};
}

void null_calibration() {
  double worst_fraction = 0.0;
  std::size_t worst_count = 0;
  std::string runs;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto m = noise_matrix(10000, 200, 1000 + static_cast<std::uint64_t>(seed));
    const auto result = run_unpast(m, default_params(static_cast<std::uint64_t>(seed)));
    const double fraction = static_cast<double>(result.binarized.size()) / 10000.0;
    worst_fraction = std::max(worst_fraction, fraction);
    worst_count = std::max(worst_count, result.biclusters.size());
    runs += fmt::format("{}{:.2f}%/{}", runs.empty() ? "" : " ", 100.0 * fraction, result.biclusters.size());
  }
  report(3, "null calibration on 10000x200 noise",
         worst_fraction <= kNullMaxPassFraction && worst_count <= kNullMaxBiclusters,
         fmt::format("pass fraction/biclusters per seed {}; max {:.2f}% <= {:.1f}%, max {} <= {}", runs,
                     100.0 * worst_fraction, 100.0 * kNullMaxPassFraction, worst_count,
                     kNullMaxBiclusters));
}

// 4. Statistical oracles.
using u128 = unsigned __int128;

u128 choose(unsigned n, unsigned k) {
  if (k > n) return 0;
  u128 r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double fisher_worst_error() {
  double worst = 0.0;
  for (unsigned n = 1; n <= 60; ++n) {
    for (unsigned a = 0; a <= n; ++a) {
      for (unsigned b = 0; a + b <= n; ++b) {
        for (unsigned c = 0; a + b + c <= n; ++c) {
          const unsigned d = n - a - b - c;
          const unsigned r1 = a + b, r2 = c + d, c1 = a + c;
          const u128 obs = choose(r1, a) * choose(r2, c1 - a);
          const unsigned lo = c1 > r2 ? c1 - r2 : 0, hi = std::min(r1, c1);
          u128 left = 0, right = 0, two = 0;
          for (unsigned x = lo; x <= hi; ++x) {
            const u128 p = choose(r1, x) * choose(r2, c1 - x);
            if (x <= a) left += p;
            if (x >= a) right += p;
            if (p <= obs) two += p;
          }
          const long double den = static_cast<long double>(choose(n, c1));
          const auto got = fisher_exact(a, b, c, d);
          worst = std::max({worst, std::abs(got.left - static_cast<double>(left / den)),
                            std::abs(got.right - static_cast<double>(right / den)),
                            std::abs(got.two_tailed - static_cast<double>(two / den))});
        }
      }
    }
  }
  return worst;
}

double ari_oracle(const IndexSet& a, const IndexSet& b, std::size_t n) {
  std::vector<int> la(n, 0), lb(n, 0);
  for (auto i : a) la[i] = 1;
  for (auto i : b) lb[i] = 1;
  long long t[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < n; ++i) ++t[la[i]][lb[i]];
  const auto c2 = [](long long x) { return x * (x - 1) / 2; };
  long long sij = 0, sa = 0, sb = 0;
  for (int i = 0; i < 2; ++i) {
    sa += c2(t[i][0] + t[i][1]);
    sb += c2(t[0][i] + t[1][i]);
    for (int j = 0; j < 2; ++j) sij += c2(t[i][j]);
  }
  const long double expected = static_cast<long double>(sa) * sb / c2(static_cast<long long>(n));
  const long double mx = 0.5L * (sa + sb);
  if (mx == expected) return 1.0;
  return static_cast<double>((sij - expected) / (mx - expected));
}

std::vector<double> bh_reference(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return p[x] < p[y]; });
  std::vector<double> out(m);
  for (std::size_t r = 0; r < m; ++r) {
    double best = 1.0;
    for (std::size_t j = r; j < m; ++j) {
      best = std::min(best, p[order[j]] * static_cast<double>(m) / static_cast<double>(j + 1));
    }
    out[order[r]] = best;
  }
  return out;
}

void statistical_oracles() {
  const double fisher = fisher_worst_error();

  Rng rng(4);
  double ari = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng() % 300;
    const auto a = random_subset(rng, n, 1 + rng() % (n - 1));
    const auto b = random_subset(rng, n, 1 + rng() % (n - 1));
    ari = std::max(ari, std::abs(ari_bipartition(a, b, n) - ari_oracle(a, b, n)));
  }

  std::uniform_real_distribution<double> u(0.0, 1.0);
  int adjust_mismatch = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> p(1 + rng() % 60);
    for (auto& x : p) x = t % 3 == 0 ? std::round(u(rng) * 20) / 20 : std::pow(u(rng), 3);
    std::vector<double> bon(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) bon[i] = std::min(1.0, p[i] * static_cast<double>(p.size()));
    if (adjust(p, Adjustment::bh) != bh_reference(p)) ++adjust_mismatch;
    if (adjust(p, Adjustment::bonferroni) != bon) ++adjust_mismatch;
  }
  report(4, "statistical oracles", fisher <= kFisherTol && ari <= kAriTol && adjust_mismatch == 0,
         fmt::format("fisher max error {:.3g} <= {:g} over all tables with total <= 60; ari max error {:.3g} <= {:g} on 1000 pairs; "
                     "BH/Bonferroni mismatches {} on 1000 vectors",
                     fisher, kFisherTol, ari, kAriTol, adjust_mismatch));
}

// 5. SNR oracle.
double direct_snr(const std::vector<double>& v, const IndexSet& s) {
  std::vector<double> in, out;
  std::vector<bool> mark(v.size(), false);
  for (auto i : s) mark[i] = true;
  for (std::size_t i = 0; i < v.size(); ++i) (mark[i] ? in : out).push_back(v[i]);
  const auto ms = [](const std::vector<double>& x) {
    long double m = 0;
    for (double e : x) m += e;
    m /= x.size();
    long double ss = 0;
    for (double e : x) ss += (e - m) * (e - m);
    return std::pair<long double, long double>(m, std::sqrt(ss / x.size()));
  };
  const auto [mi, si] = ms(in);
  const auto [mo, so] = ms(out);
  return static_cast<double>(std::abs(mi - mo) / (si + so));
}

void snr_oracle() {
  Rng rng(5);
  std::normal_distribution<double> nd(0.0, 1.0);
  double direct = 0.0, affine = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3 + rng() % 60;
    std::vector<double> v(n);
    for (auto& x : v) x = nd(rng);
    const auto s = random_subset(rng, n, 1 + rng() % (n - 1));
    const double got = snr(v, s);
    direct = std::max(direct, std::abs(got - direct_snr(v, s)));
    const double a = 0.01 + static_cast<double>(rng() % 1000) / 10.0;
    const double b = static_cast<double>(rng() % 200) - 100.0;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = a * v[i] + b;
    affine = std::max(affine, std::abs(snr(w, s) - got));
  }
  report(5, "snr oracle", direct <= kSnrTol && affine <= kAffineTol,
         fmt::format("max error vs direct arithmetic {:.3g} <= {:g}; max change under a*x+b {:.3g} <= {:g}",
                     direct, kSnrTol, affine, kAffineTol));
}

// 6. Metric sanity.
void metric_sanity() {
  Rng rng(6);
  const std::size_t n = 200;
  GroundTruth truth{{"a", "b", "c", "d"},
                    {span_set(0, 10), span_set(10, 30), span_set(30, 80), span_set(80, 180)},
                    n};
  const double exact = best_match_performance(truth, truth.members, n).total;
  std::vector<IndexSet> complements;
  for (const auto& s : truth.members) complements.push_back(complement(s, n));
  const double inverted = best_match_performance(truth, complements, n).total;

  int clean = 0;
  for (int trial = 0; trial < kRandomTrials; ++trial) {
    GroundTruth t{{"x"}, {random_subset(rng, n, 20)}, n};
    std::vector<IndexSet> pred;
    for (int k = 0; k < 100; ++k) pred.push_back(random_subset(rng, n, 20));
    if (!best_match_performance(t, pred, n).truths[0].best_match) ++clean;
  }
  report(6, "metric sanity", exact == 1.0 && inverted == 1.0 && clean >= kRandomMinClean,
         fmt::format("predicted == truth {}; complements {}; random trials without a significant match {}/{} (need >= {})",
                     exact, inverted, clean, kRandomTrials, kRandomMinClean));
}

// 7. Consensus idempotence on pipeline output.
using Content = std::set<std::pair<std::vector<std::size_t>, IndexSet>>;

Content contents(const std::vector<Bicluster>& v) {
  Content out;
  for (const auto& b : v) out.emplace(b.features, b.samples);
  return out;
}

void consensus_idempotence() {
  SimulationSpec spec;
  spec.scenario = Scenario::A;
  spec.n_biomarkers = 50;
  spec.seed = 7;
  const auto data = generate(spec);
  const auto run = run_unpast(data.matrix, default_params(7)).biclusters;

  ConsensusParams cp;
  const auto same = consensus_biclusters(std::vector<std::vector<Bicluster>>(5, run), data.matrix, cp);
  const bool idempotent = !run.empty() && contents(same.biclusters) == contents(run);

  // The lowest-ranked bicluster kept by one run only.
  bool single_absent = run.size() >= 2;
  if (single_absent) {
    std::vector<Bicluster> without(run.begin(), run.end() - 1);
    std::vector<std::vector<Bicluster>> runs(5, without);
    runs[2] = run;
    const auto c = consensus_biclusters(runs, data.matrix, cp);
    const auto& lone = run.back();
    for (const auto& b : c.biclusters) {
      for (auto f : lone.features) {
        if (std::binary_search(b.features.begin(), b.features.end(), f)) single_absent = false;
      }
      if (b.samples == lone.samples) single_absent = false;
    }
    single_absent = single_absent && contents(c.biclusters) == contents(without);
  }
  report(7, "consensus idempotence", idempotent && single_absent,
         fmt::format("5 identical runs of {} biclusters reproduced exactly: {}; pattern from 1 of 5 runs absent: {}",
                     run.size(), idempotent ? "yes" : "no", single_absent ? "yes" : "no"));
}

// 8. FSP endpoints.
Bicluster block(std::size_t f0, std::size_t f1, std::size_t s0, std::size_t s1) {
  Bicluster b;
  for (auto f = f0; f < f1; ++f) {
    b.features.push_back(f);
    b.signs.push_back(1);
  }
  b.samples = span_set(s0, s1);
  return b;
}

void fsp_endpoints() {
  const std::vector<Bicluster> dup{block(0, 10, 0, 20), block(0, 10, 0, 20)};
  const std::vector<Bicluster> dis{block(0, 10, 0, 20), block(10, 20, 20, 40), block(20, 30, 40, 50)};
  const std::vector<Bicluster> three{block(0, 100, 0, 50), block(0, 80, 0, 50), block(500, 600, 100, 150)};
  const double a = fsp(dup, 100, 50).fsp;
  const double b = fsp(dis, 100, 50).fsp;
  const double c = fsp(three, 1000, 200).fsp;
  report(8, "fsp endpoints", a == 1.0 && b == 0.0 && c == 1.0 / 3.0,
         fmt::format("duplicated {}; disjoint {}; one of three pairs {} (expect {})", a, b, c, 1.0 / 3.0));
}

// 9. CLI determinism.
int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" UNPAST_CLI_PATH "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = s.str();
  }
  return out;
}

void cli_determinism() {
  const fs::path root = kRoot / "cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path sim = root / "sim_ref";
  const std::string sim_args = "simulate --scenario C --n-features 3000 --n-biomarkers 50 --seed 3";
  const std::string cache = " --null-cache " + q(root / "cache");
  const auto matrix = q(sim / "matrix.tsv");
  const auto truth = q(sim / "truth.tsv");
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", sim_args},
      {"run", "run " + matrix + " --seed 11" + cache},
      {"run-gmm-joint", "run " + matrix + " --seed 11 --binarization gmm --directions joint" + cache},
      {"run-consensus", "run " + matrix + " --seed 11 --n-runs 3 --dump-modules" + cache},
      {"evaluate", "evaluate --biclusters " + q(root / "ref" / "run" / "biclusters.tsv") + " --truth " + truth +
                       " --matrix " + matrix},
      {"redundancy", "redundancy --biclusters " + q(root / "ref" / "run-consensus" / "biclusters_run0.tsv") +
                         " --matrix " + matrix},
      {"consensus", "consensus --matrix " + matrix + " --runs " +
                        q(root / "ref" / "run-consensus" / "biclusters_run0.tsv") + " " +
                        q(root / "ref" / "run-consensus" / "biclusters_run1.tsv") + " " +
                        q(root / "ref" / "run-consensus" / "biclusters_run2.tsv")},
  };
  bool ok = cli(sim_args + " --out " + q(sim)) == 0;
  std::size_t files = 0;
  std::vector<std::string> differing;
  const std::vector<std::pair<std::string, std::string>> variants{
      {"ref", "--threads 1"}, {"again", "--threads 1"}, {"threads4", "--threads 4"}, {"env", ""}};
  for (const auto& [name, args] : commands) {
    std::map<std::string, std::string> ref;
    for (const auto& [variant, flags] : variants) {
      const fs::path out = root / variant / name;
      const std::string env = variant == "env" ? "UNPAST_THREADS=3" : "";
      if (cli(args + " " + flags + " --out " + q(out), env) != 0) {
        ok = false;
        differing.push_back(name + " (" + variant + " failed)");
        continue;
      }
      auto snap = snapshot(out);
      if (variant == "ref") {
        ref = std::move(snap);
        files += ref.size();
        if (ref.empty()) ok = false;
      } else if (snap != ref) {
        ok = false;
        differing.push_back(name + " (" + variant + ")");
      }
    }
  }
  std::string diff;
  for (const auto& d : differing) diff += (diff.empty() ? "" : ", ") + d;
  report(9, "cli determinism", ok && differing.empty(),
         fmt::format("{} subcommand invocations, {} output files compared across --threads 1 twice, --threads 4 and UNPAST_THREADS=3; differing: {}",
                     commands.size(), files, diff.empty() ? "none" : diff));
}

// 10. Scale ceiling.
struct ChildUsage {
  int status = -1;
  double seconds = 0.0;
  double max_rss_gib = 0.0;
};

ChildUsage run_measured(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  const auto t0 = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid == 0) {
    if (!std::freopen("/dev/null", "w", stdout)) _exit(127);
    execv(argv[0], argv.data());
    _exit(127);
  }
  ChildUsage u;
  int status = 0;
  rusage ru{};
  if (pid > 0 && wait4(pid, &status, 0, &ru) == pid) {
    u.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    u.max_rss_gib = static_cast<double>(ru.ru_maxrss) / (1024.0 * 1024.0);
  }
  u.seconds = seconds_since(t0);
  return u;
}

void scale_ceiling() {
  const fs::path root = kRoot / "scale";
  fs::remove_all(root);
  const bool made = cli("simulate --scenario A --n-features 18000 --n-samples 2000 --subtype-sizes 100,200,500,1000 "
                        "--n-biomarkers 50 --seed 1 --out " + q(root / "sim")) == 0;
  ChildUsage u;
  if (made) {
    u = run_measured({UNPAST_CLI_PATH, "run", (root / "sim" / "matrix.tsv").string(), "--seed", "1",
                      "--null-cache", (root / "cache").string(), "--out", (root / "run").string()});
  }
  fs::remove_all(root);
  report(10, "run on 18000x2000", made && u.status == 0 && u.seconds < kScaleMaxSeconds &&
                                      u.max_rss_gib < kScaleMaxRssGiB,
         fmt::format("exit {}; wall {:.1f} s < {} s; peak RSS {:.3f} GiB < {} GiB", u.status, u.seconds,
                     kScaleMaxSeconds, u.max_rss_gib, kScaleMaxRssGiB));
}

} // namespace

int main() {
  fs::remove_all(kRoot);
  fs::create_directories(kRoot);
  const auto t0 = std::chrono::steady_clock::now();
  easy_regime();
  hard_regime();
  null_calibration();
  statistical_oracles();
  snr_oracle();
  metric_sanity();
  consensus_idempotence();
  fsp_endpoints();
  cli_determinism();
  scale_ceiling();
  fs::remove_all(kRoot);
  std::printf("%d of 10 criteria failed; %.1f s\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
