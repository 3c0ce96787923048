#include "unpast/binarization.hpp"
#include "unpast/rng.hpp"

#include <doctest.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>

using namespace unpast;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  Rng rng(seed);
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

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
    return std::pair<double, double>(static_cast<double>(m), static_cast<double>(std::sqrt(ss / x.size())));
  };
  const auto [mi, si] = ms(in);
  const auto [mo, so] = ms(out);
  return std::abs(mi - mo) / (si + so);
}

double sse(const std::vector<double>& v, const std::vector<std::size_t>& g) {
  double m = 0;
  for (auto i : g) m += v[i];
  m /= g.size();
  double s = 0;
  for (auto i : g) s += (v[i] - m) * (v[i] - m);
  return s;
}

// Best 2-means split by enumerating every bipartition.
IndexSet brute_two_means_high(const std::vector<double>& v) {
  const std::size_t n = v.size();
  double best = std::numeric_limits<double>::infinity();
  IndexSet best_high;
  for (std::uint64_t mask = 1; mask < (1ULL << (n - 1)); ++mask) {
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? a : b).push_back(i);
    const double cost = sse(v, a) + sse(v, b);
    if (cost < best - 1e-12) {
      best = cost;
      double ma = 0, mb = 0;
      for (auto i : a) ma += v[i] / a.size();
      for (auto i : b) mb += v[i] / b.size();
      best_high = ma > mb ? a : b;
    }
  }
  return best_high;
}

// Generic agglomerative Ward clustering: any two clusters may merge.
IndexSet generic_ward_high(const std::vector<double>& v) {
  std::vector<std::vector<std::size_t>> cl;
  for (std::size_t i = 0; i < v.size(); ++i) cl.push_back({i});
  const auto mean = [&](const std::vector<std::size_t>& c) {
    double m = 0;
    for (auto i : c) m += v[i];
    return m / c.size();
  };
  while (cl.size() > 2) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < cl.size(); ++i) {
      for (std::size_t j = i + 1; j < cl.size(); ++j) {
        const double na = cl[i].size(), nb = cl[j].size();
        const double d = mean(cl[i]) - mean(cl[j]);
        const double cost = na * nb / (na + nb) * d * d;
        if (cost < best) {
          best = cost;
          bi = i;
          bj = j;
        }
      }
    }
    cl[bi].insert(cl[bi].end(), cl[bj].begin(), cl[bj].end());
    cl.erase(cl.begin() + static_cast<long>(bj));
  }
  auto high = mean(cl[0]) > mean(cl[1]) ? cl[0] : cl[1];
  std::sort(high.begin(), high.end());
  return high;
}

ExpressionMatrix noise_matrix(std::size_t nf, std::size_t ns, std::uint64_t seed) {
  std::vector<std::string> f, s;
  for (std::size_t i = 0; i < nf; ++i) f.push_back("f" + std::to_string(i));
  for (std::size_t j = 0; j < ns; ++j) s.push_back("s" + std::to_string(j));
  return {f, s, normals(nf * ns, seed)};
}

bool same_features(const std::vector<BinarizedFeature>& a, const std::vector<BinarizedFeature>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].feature_index != b[i].feature_index || a[i].minority != b[i].minority ||
        a[i].direction != b[i].direction || a[i].snr != b[i].snr || a[i].pvalue != b[i].pvalue)
      return false;
  }
  return true;
}

} // namespace

TEST_CASE("snr examples") {
  const std::vector<double> v{1, 2, 1, 2, 9, 10, 11};
  CHECK(snr(v, {4, 5, 6}) == doctest::Approx(8.5 / (std::sqrt(2.0 / 3.0) + 0.5)).epsilon(1e-12));
  CHECK(snr(v, {4, 5, 6}) == doctest::Approx(6.456).epsilon(1e-3));
  const std::vector<double> eq{1, 3, 2, 2};
  CHECK(snr(eq, {0, 1}) == 0.0);
  const std::vector<double> sep{0, 0, 0, 7, 7};
  CHECK(snr(sep, {3, 4}) == kSnrCap);
  CHECK_THROWS_AS(snr(sep, {}), std::invalid_argument);
  CHECK_THROWS_AS(snr(sep, {0, 1, 2, 3, 4}), std::invalid_argument);
  CHECK_THROWS_AS(snr(sep, {9}), std::invalid_argument);
}

TEST_CASE("snr matches direct arithmetic and is affine invariant") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3 + rng() % 60;
    auto v = normals(n, rng());
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    IndexSet s(idx.begin(), idx.begin() + static_cast<long>(1 + rng() % (n - 1)));
    std::sort(s.begin(), s.end());
    const double got = snr(v, s);
    CHECK(std::abs(got - direct_snr(v, s)) <= 1e-12);
    std::vector<double> w(n);
    const double a = 0.01 + (rng() % 1000) / 10.0, b = static_cast<double>(rng() % 200) - 100.0;
    for (std::size_t i = 0; i < n; ++i) w[i] = a * v[i] + b;
    CHECK(std::abs(snr(w, s) - got) <= 1e-9);
  }
}

TEST_CASE("binarize_feature examples") {
  const std::vector<double> v{0, 0, 0, 0, 10, 10};
  for (auto m : {BinarizationMethod::two_means, BinarizationMethod::ward, BinarizationMethod::gmm}) {
    const auto r = binarize_feature(v, m, 1);
    REQUIRE(r);
    CHECK(r->minority == IndexSet{4, 5});
    CHECK(r->direction == Direction::up);
  }
  const std::vector<double> tie{0, 0, 0, 10, 10, 10};
  bool saw_up = false, saw_down = false;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto r = binarize_feature(tie, BinarizationMethod::two_means, seed);
    REQUIRE(r);
    if (r->direction == Direction::up) {
      CHECK(r->minority == IndexSet{3, 4, 5});
      saw_up = true;
    } else {
      CHECK(r->minority == IndexSet{0, 1, 2});
      saw_down = true;
    }
    CHECK(binarize_feature(tie, BinarizationMethod::two_means, seed)->minority == r->minority);
  }
  CHECK(saw_up);
  CHECK(saw_down);
  const std::vector<double> low{-5, -5, -5, -5, 0, 0, 0, 0, 0, 0};
  const auto r = binarize_feature(low, BinarizationMethod::two_means, 3);
  REQUIRE(r);
  CHECK(r->minority == IndexSet{0, 1, 2, 3});
  CHECK(r->direction == Direction::down);
  const std::vector<double> flat{2, 2, 2, 2};
  CHECK_FALSE(binarize_feature(flat, BinarizationMethod::gmm, 0));
}

TEST_CASE("two_means equals exhaustive bipartition search") {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 4 + rng() % 11;
    auto v = normals(n, rng());
    if (t % 2) for (std::size_t i = 0; i < n / 3; ++i) v[i] += 3.0;
    const auto p = partition_values(v, BinarizationMethod::two_means);
    REQUIRE(p);
    CHECK(p->high == brute_two_means_high(v));
  }
}

TEST_CASE("ward equals generic agglomerative Ward") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 4 + rng() % 40;
    auto v = normals(n, rng());
    if (t % 2) for (std::size_t i = 0; i < n / 4; ++i) v[i] -= 2.5;
    const auto p = partition_values(v, BinarizationMethod::ward);
    REQUIRE(p);
    CHECK(p->high == generic_ward_high(v));
  }
}

TEST_CASE("gmm separates a clear mixture") {
  auto v = normals(200, 17, 1.0);
  for (std::size_t i = 0; i < 30; ++i) v[i] += 6.0;
  const auto r = binarize_feature(v, BinarizationMethod::gmm, 0);
  REQUIRE(r);
  IndexSet expect(30);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(r->minority == expect);
  CHECK(r->direction == Direction::up);
}

TEST_CASE("binarize_feature is sign equivariant") {
  Rng rng(4);
  for (auto m : {BinarizationMethod::two_means, BinarizationMethod::ward, BinarizationMethod::gmm}) {
    for (int t = 0; t < 50; ++t) {
      auto v = normals(41, rng());
      for (std::size_t i = 0; i < 9; ++i) v[i] += 3.0;
      std::vector<double> neg(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
      const auto a = binarize_feature(v, m, 7);
      const auto b = binarize_feature(neg, m, 7);
      REQUIRE(a);
      REQUIRE(b);
      CHECK(a->minority == b->minority);
      CHECK(a->direction != b->direction);
    }
  }
}

TEST_CASE("null model size and p-values") {
  CHECK(null_draw_count(0.01) == 10000);
  CHECK(null_draw_count(1e-5) == 1000000);
  CHECK(null_draw_count(0.5) == 10000);
  const std::vector<std::size_t> sizes{5, 20};
  const auto model = build_null_model(60, sizes, 0.01, BinarizationMethod::two_means, 42);
  CHECK(model.n_draws() == 10000);
  for (auto k : sizes) {
    const auto& d = model.draws(k);
    CHECK(d.size() == 10000);
    CHECK(std::is_sorted(d.begin(), d.end()));
    CHECK(d.front() >= 0.0);
  }
  const auto& d = model.draws(20);
  CHECK(empirical_pvalue(model, 20, d.back() + 1.0) == doctest::Approx(1.0 / 10001.0));
  CHECK(empirical_pvalue(model, 20, d.front() - 1.0) == 1.0);
  CHECK(std::abs(empirical_pvalue(model, 20, d[5000]) - 0.5) <= 2.0 / 10000);
  double prev = 2.0;
  for (double x = 0.0; x < 3.0; x += 0.01) {
    const double p = empirical_pvalue(model, 20, x);
    CHECK(p <= prev);
    CHECK(p > 0.0);
    prev = p;
  }
  CHECK_THROWS_AS(empirical_pvalue(model, 7, 1.0), std::out_of_range);
  CHECK_THROWS(build_null_model(60, std::vector<std::size_t>{31}, 0.01, BinarizationMethod::two_means, 1));
}

TEST_CASE("null median falls as n grows at fixed k/n") {
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {50, 100, 200, 400}) {
    const std::vector<std::size_t> k{n / 10};
    const auto model = build_null_model(n, k, 0.01, BinarizationMethod::two_means, 42);
    const double median = model.draws(k[0])[5000];
    CHECK(median < prev);
    prev = median;
  }
}

TEST_CASE("null model is reproducible and cache round trips") {
  const std::vector<std::size_t> sizes{6, 11};
  const auto a = build_null_model(40, sizes, 0.01, BinarizationMethod::ward, 42);
  const auto b = build_null_model(40, sizes, 0.01, BinarizationMethod::ward, 42);
  CHECK(a.all_draws() == b.all_draws());
  const auto dir = std::filesystem::temp_directory_path() / "unpast_test_null";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "model.bin";
  save_null_model(path, a);
  const auto back = load_null_model(path, 40, BinarizationMethod::ward, 10000, 42, sizes);
  REQUIRE(back);
  CHECK(back->all_draws() == a.all_draws());
  CHECK_FALSE(load_null_model(path, 41, BinarizationMethod::ward, 10000, 42, sizes));
  CHECK_FALSE(load_null_model(path, 40, BinarizationMethod::gmm, 10000, 42, sizes));
  CHECK_FALSE(load_null_model(path, 40, BinarizationMethod::ward, 20000, 42, sizes));
  CHECK_FALSE(load_null_model(path, 40, BinarizationMethod::ward, 10000, 43, sizes));
  CHECK_FALSE(load_null_model(path, 40, BinarizationMethod::ward, 10000, 42, std::vector<std::size_t>{7}));
  CHECK_FALSE(load_null_model(dir / "missing.bin", 40, BinarizationMethod::ward, 10000, 42, sizes));
  std::filesystem::remove_all(dir);
}

TEST_CASE("binarize_all keeps a planted feature and drops tiny splits") {
  // First seed where the shifted samples sit strictly above the background,
  // so the planted set is the unique correct answer.
  std::vector<double> values;
  ExpressionMatrix m0;
  for (std::uint64_t seed = 8;; ++seed) {
    m0 = noise_matrix(30, 100, seed);
    values = m0.values();
    double lo = 1e9, hi = -1e9;
    for (std::size_t s = 0; s < 100; ++s) {
      if (s % 5 == 0) {
        values[s] += 4.0;
        lo = std::min(lo, values[s]);
      } else {
        hi = std::max(hi, values[s]);
      }
    }
    if (lo > hi + 0.5) break;
  }
  for (std::size_t s = 0; s < 3; ++s) values[1 * 100 + s] = 50.0;
  const ExpressionMatrix m(m0.feature_ids(), m0.sample_ids(), values);
  BinarizationParams p;
  const auto z = zscore_rows(m);
  const auto out = binarize_all(z, p);
  REQUIRE_FALSE(out.empty());
  CHECK(out[0].feature_index == 0);
  IndexSet planted;
  for (std::size_t s = 0; s < 20; ++s) planted.push_back(s * 5);
  CHECK(out[0].minority == planted);
  CHECK(out[0].direction == Direction::up);
  for (const auto& f : out) {
    CHECK(f.feature_index != 1);
    CHECK(f.minority.size() >= p.min_bicluster_size);
    CHECK(f.minority.size() <= 50);
    CHECK(f.pvalue <= p.p_threshold);
    CHECK(f.snr > 0.0);
    CHECK(std::abs(f.snr - snr(z.row(f.feature_index), f.minority)) <= 1e-12);
  }
}

TEST_CASE("planted +4 sd shift lands in the minority on any seed") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto m0 = noise_matrix(1, 200, seed);
    auto values = m0.values();
    IndexSet planted;
    for (std::size_t s = 0; s < 20; ++s) {
      values[s * 7] += 4.0;
      planted.push_back(s * 7);
    }
    const auto r = binarize_feature(values, BinarizationMethod::two_means, seed);
    REQUIRE(r);
    CHECK(r->direction == Direction::up);
    CHECK(intersection_size(r->minority, planted) >= 18);
  }
}

TEST_CASE("binarize_all is deterministic across thread counts and uses the cache") {
  const auto m = noise_matrix(400, 60, 21);
  const auto z = zscore_rows(m);
  BinarizationParams p;
  p.p_threshold = 0.05;
  p.master_seed = 9;
  omp_set_num_threads(1);
  const auto a = binarize_all(z, p);
  omp_set_num_threads(4);
  const auto b = binarize_all(z, p);
  CHECK(same_features(a, b));
  CHECK_FALSE(a.empty());

  const auto dir = std::filesystem::temp_directory_path() / "unpast_test_cache";
  std::filesystem::remove_all(dir);
  const auto c = binarize_all(z, p, dir);
  CHECK(same_features(a, c));
  CHECK_FALSE(std::filesystem::is_empty(dir));
  const auto d = binarize_all(z, p, dir);
  CHECK(same_features(a, d));
  std::filesystem::remove_all(dir);
}

TEST_CASE("binarization params validation") {
  BinarizationParams p;
  CHECK_NOTHROW(validate(p));
  p.p_threshold = 1.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p.p_threshold = 0.01;
  p.min_bicluster_size = 1;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  CHECK(parse_binarization_method("kmeans") == BinarizationMethod::two_means);
  CHECK(parse_binarization_method("ward") == BinarizationMethod::ward);
  CHECK(parse_binarization_method("gmm") == BinarizationMethod::gmm);
  CHECK_THROWS_AS(parse_binarization_method("dbscan"), std::invalid_argument);
}
