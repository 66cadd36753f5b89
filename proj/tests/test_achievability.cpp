#include "wtb/achievability.hpp"

#include "wtb/converse.hpp"
#include "wtb/metrics.hpp"
#include "wtb/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace wtb;
using namespace wtb::achievability;
using probkit::LogSpectrum;
using probkit::SpectrumAtom;

namespace {

GaussianWiretap bench_channel() {
  return GaussianWiretap(1.0, std::pow(10.0, -0.3), std::pow(10.0, 0.3));
}

channels::DmcScenario bsc_pair_scenario(double p1, double pd) {
  std::vector<Eigen::MatrixXd> joint;
  for (int x = 0; x < 2; ++x) {
    Eigen::MatrixXd m(2, 2);
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        m(y, z) = (y == x ? 1 - p1 : p1) * (z == y ? 1 - pd : pd);
    joint.push_back(m);
  }
  return {channels::DMWiretap(2, 2, 2, joint), metrics::FiniteDist::uniform(2)};
}

}  // namespace

TEST_SUITE("achievability") {

TEST_CASE("lemma1 on a degenerate eavesdropper") {
  // Z independent of X: the information density is identically zero
  const auto s = LogSpectrum::point_mass(0.0, 1e-4);
  const double lnk = std::log(64.0);
  // gamma = 1: E_1 = 0 and the expectation term is exactly 1
  CHECK(lemma1_delta(s, lnk, 0.0) == doctest::Approx(0.5 / 8.0).epsilon(1e-12));
  CHECK(wh_baseline_delta(s, lnk, 0.0) == doctest::Approx(0.5 / 8.0).epsilon(1e-12));
  // E_gamma near one plus the amplification term pushes past 1; capped
  const auto hot = LogSpectrum::point_mass(5.0, 1e-4);
  CHECK(lemma1_delta(hot, 0.0, 0.0) == 1.0);
  // weakened baseline at K = 100, gamma = 1: 0 + (1/2)sqrt(1/100)
  CHECK(wh_baseline_delta(s, std::log(100.0), 0.0) ==
        doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("lemma1 matches exhaustive enumeration on a 10-letter BSC eavesdropper") {
  const double p = 0.2;
  const long n = 10;
  const double lnk = std::log(16.0), lg = 2.0;
  std::vector<SpectrumAtom> atoms = {{std::log(2.0 * (1.0 - p)), 1.0 - p},
                                     {std::log(2.0 * p), p}};
  const auto sn = probkit::self_convolve(LogSpectrum::from_atoms(atoms, 1e-4), n);
  const double via_spectrum = lemma1_delta(sn, lnk, lg);

  // exact two-term evaluation over the binomial law of the sequence
  double eg = 0.0, expect = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double v = (n - k) * std::log(2 * (1 - p)) + k * std::log(2 * p);
    const double mass = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                 std::lgamma(n - k + 1.0) + k * std::log(p) +
                                 (n - k) * std::log1p(-p));
    if (v >= lg) eg += mass - std::exp(lg) * mass * std::exp(-v);
    expect += mass * std::exp(-std::fabs(v - lg));
  }
  const double oracle =
      std::min(1.0, eg + 0.5 * std::sqrt(std::exp(lg - lnk) * expect));
  CHECK(via_spectrum == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("weakened baseline dominates lemma1 everywhere") {
  Rng rng(55);
  for (int t = 0; t < 1000; ++t) {
    std::vector<SpectrumAtom> atoms;
    double mass = 0.0;
    const int na = 2 + static_cast<int>(rng.next_u64() % 4);
    for (int i = 0; i < na; ++i) {
      atoms.push_back({2.0 * rng.normal(), rng.uniform_pos()});
      mass += atoms.back().mass;
    }
    for (auto& a : atoms) a.mass /= mass;
    const auto s = LogSpectrum::from_atoms(atoms, 1e-5);
    const double lnk = kLn2 * static_cast<double>(rng.next_u64() % 12);
    const double lg = 2.0 * rng.normal();
    CHECK(lemma1_delta(s, lnk, lg) <= wh_baseline_delta(s, lnk, lg) + 1e-12);
  }
}

TEST_CASE("gaussian eve law: both lemma1 routes agree at small n") {
  // spectrum route unavailable for the continuous law; check the two E_gamma
  // tails against each other instead via the identity-based evaluator
  const auto law = GaussEveLaw::build(bench_channel(), 12);
  for (double off = -2.0; off <= 2.0; off += 0.5) {
    const double lg = law.signal.mean() + off * law.signal.stddev();
    const double eg = law.e_gamma_ln(lg);
    CHECK(eg >= 0.0);
    CHECK(eg <= 1.0);
    // alternative Q-tail through the signal-density change of measure
    const double qt = std::exp(lg + law.signal_density.log_exp_tail(lg));
    const double eg2 = std::max(0.0, probkit::nc_chi2_sf(lg, law.signal) - qt);
    CHECK(eg == doctest::Approx(eg2).epsilon(5e-5));
  }
}

TEST_CASE("sphere cap fraction") {
  CHECK(std::exp(log_sphere_cap(-1.0, 8)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(log_sphere_cap(0.0, 8)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(log_sphere_cap(1.0, 8) == kNegInf);
  // Monte Carlo on the 6-sphere
  Rng rng(2025);
  const long samples = 400000;
  long hits = 0;
  const double u0 = 0.35;
  for (long i = 0; i < samples; ++i) {
    double v[6], norm2 = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
    if (v[0] / std::sqrt(norm2) >= u0) ++hits;
  }
  const double mc = static_cast<double>(hits) / samples;
  const double se = std::sqrt(mc * (1 - mc) / samples);
  CHECK(std::fabs(std::exp(log_sphere_cap(u0, 6)) - mc) < 3.0 * se);
}

TEST_CASE("rcu_sphere trivial size and naive-geometry oracle") {
  const auto g = bench_channel();
  const auto sampler = RcuSphere::build(g, 6, 20000, 42);
  CHECK(sampler.epsilon(0.0).mean == 0.0);  // single codeword

  // naive oracle: explicit sphere geometry, inner probability by sampling
  // independent competitors
  Rng rng(77);
  const long n = 6, outer = 4000, inner = 2000;
  const double a = 4.0;
  const double sp = std::sqrt(g.power);
  double acc = 0.0, acc2 = 0.0;
  for (long i = 0; i < outer; ++i) {
    double x[6], y[6];
    for (long j = 0; j < n; ++j) x[j] = rng.normal();
    double nx = 0.0;
    for (long j = 0; j < n; ++j) nx += x[j] * x[j];
    const double sc = sp * std::sqrt(static_cast<double>(n) / nx);
    double ip = 0.0, ny = 0.0;
    for (long j = 0; j < n; ++j) {
      x[j] *= sc;
      y[j] = x[j] + rng.normal() * std::sqrt(g.noise_legit);
      ip += x[j] * y[j];
      ny += y[j] * y[j];
    }
    long wins = 0;
    for (long k = 0; k < inner; ++k) {
      double xb[6], nb = 0.0, ipb = 0.0;
      for (long j = 0; j < n; ++j) {
        xb[j] = rng.normal();
        nb += xb[j] * xb[j];
      }
      const double scb = sp * std::sqrt(static_cast<double>(n) / nb);
      for (long j = 0; j < n; ++j) ipb += scb * xb[j] * y[j];
      if (ipb >= ip) ++wins;
    }
    const double v =
        std::min(1.0, (a - 1.0) * static_cast<double>(wins) / inner);
    acc += v;
    acc2 += v * v;
  }
  const double naive = acc / outer;
  const double se_naive =
      std::sqrt((acc2 / outer - naive * naive) / outer);
  const auto formula = sampler.epsilon(std::log(a));
  const double se = std::hypot(se_naive, formula.std_err) + 1e-4;  // inner-MC bias guard
  CHECK(std::fabs(formula.mean - naive) < 3.0 * se);
}

TEST_CASE("dt_bound trivial cases and exhaustive BSC check") {
  // zero information density: DT is 1 for a >= 1
  const auto s0 = LogSpectrum::point_mass(0.0, 1e-4);
  CHECK(dt_bound(s0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dt_bound(s0, 7.0) == doctest::Approx(1.0).epsilon(1e-12));
  // tiny a: the bound collapses toward 0
  CHECK(dt_bound(s0, 1e-9) <= 1e-8);

  const double p = 0.11;
  const long n = 8;
  std::vector<SpectrumAtom> atoms = {{std::log(2 * (1 - p)), 1 - p},
                                     {std::log(2 * p), p}};
  const auto sn = probkit::self_convolve(LogSpectrum::from_atoms(atoms, 1e-4), n);
  const double a = 16.0;
  // exhaustive: 1 - E_a over the binomial atoms
  double eg = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double v = (n - k) * std::log(2 * (1 - p)) + k * std::log(2 * p);
    const double mass = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                 std::lgamma(n - k + 1.0) + k * std::log(p) +
                                 (n - k) * std::log1p(-p));
    eg += std::max(0.0, mass - a * mass * std::exp(-v));
  }
  CHECK(dt_bound(sn, a) == doctest::Approx(1.0 - eg).epsilon(1e-7));
}

TEST_CASE("thm1 on the benchmark channel: feasible band and monotonicity") {
  const auto g = bench_channel();
  AchOptions opt;
  opt.mc_samples = 20000;
  opt.seed = 5;
  const auto p1000 = thm1_rate(1000, 1e-3, 1e-3, g, opt);
  const auto p2000 = thm1_rate(2000, 1e-3, 1e-3, g, opt);
  const auto p3000 = thm1_rate(3000, 1e-3, 1e-3, g, opt);
  CHECK(p2000.status == PointStatus::kOk);
  CHECK(p2000.rate_bits > 0.0);
  CHECK(p2000.rate_bits < 0.4982892142331043);  // strictly below C_S
  CHECK(p3000.rate_bits >= p1000.rate_bits);
}

TEST_CASE("no-secrecy limit recovers pure channel coding") {
  const auto g = bench_channel();
  AchOptions opt;
  opt.mc_samples = 20000;
  opt.seed = 5;
  const auto open = thm1_rate(500, 1e-3, 1.0, g, opt);
  const auto tight = thm1_rate(500, 1e-3, 1e-3, g, opt);
  CHECK(open.status == PointStatus::kOk);
  CHECK(open.k_star == 0.0);  // K = 1: the whole mother code is one bin
  CHECK(open.rate_bits > tight.rate_bits);
  // the mother-code size is shared, so the gap is exactly log2(K)/n
  CHECK(open.mk_star == doctest::Approx(tight.mk_star).epsilon(1e-12));
}

TEST_CASE("thm1 rate is nondecreasing across a 5x5 (epsilon, delta) lattice") {
  const auto g = bench_channel();
  AchOptions opt;
  opt.mc_samples = 10000;
  opt.seed = 11;
  const long n = 800;
  const double eps_grid[] = {1e-4, 1e-3, 1e-2, 0.05, 0.2};
  const double delta_grid[] = {1e-4, 1e-3, 1e-2, 0.05, 0.2};
  double rate[5][5];
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      rate[i][j] = thm1_rate(n, eps_grid[i], delta_grid[j], g, opt).rate_bits;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (i > 0) CHECK(rate[i][j] >= rate[i - 1][j] - 1e-9);
      if (j > 0) CHECK(rate[i][j] >= rate[i][j - 1] - 1e-9);
    }
}

TEST_CASE("gamma optimizer never loses to a fixed gamma") {
  const auto g = bench_channel();
  const long n = 300;
  const double delta = 1e-3;
  AchOptions opt;
  opt.mc_samples = 10000;
  opt.seed = 3;
  const auto pt = thm1_rate(n, 1e-3, delta, g, opt);
  REQUIRE(pt.status == PointStatus::kOk);
  const auto law = GaussEveLaw::build(g, n);
  // smallest power-of-two K meeting delta at the optimizer's gamma
  auto k_min_at = [&](double lg) {
    for (int k = 0; k <= 4000; ++k)
      if (lemma1_delta(law, k * kLn2, lg) <= delta) return k;
    return 1 << 20;
  };
  const int k_star = static_cast<int>(pt.k_star);
  CHECK(lemma1_delta(law, k_star * kLn2, pt.gamma_star) <= delta + 1e-12);
  const double i2 = 0.5 * std::log1p(g.power / g.noise_eve);
  for (double off : {-2.0, -0.5, 0.0, 0.8, 2.5}) {
    const double lg = n * i2 + off * std::sqrt(n * 0.278129134);
    CHECK(k_star <= k_min_at(lg));
  }
}

TEST_CASE("dmc path: thm1 and wh produce ordered, feasible rates") {
  const auto sc = bsc_pair_scenario(0.05, 1.0 / 6.0);
  AchOptions opt;
  opt.max_bins = 1u << 16;
  const auto t1 = thm1_rate(400, 1e-3, 1e-3, sc, opt);
  const auto twh = wh_rate(400, 1e-3, 1e-3, sc, opt);
  CHECK(t1.status == PointStatus::kOk);
  CHECK(t1.rate_bits > 0.0);
  CHECK(t1.rate_bits >= twh.rate_bits - 1e-12);
  // secrecy capacity of the pair in bits
  const double cs = (0.500402423538188 - 0.198515243731775) * kLog2E;
  CHECK(t1.rate_bits < cs);
}

TEST_CASE("asymmetric degraded channel keeps achievability below the converse") {
  // asymmetric legitimate kernel degraded by a symmetric flip
  Eigen::MatrixXd wy(2, 2);
  wy << 0.95, 0.05, 0.30, 0.70;
  const double pd = 0.15;
  std::vector<Eigen::MatrixXd> joint;
  for (int x = 0; x < 2; ++x) {
    Eigen::MatrixXd m(2, 2);
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        m(y, z) = wy(x, y) * (z == y ? 1 - pd : pd);
    joint.push_back(m);
  }
  channels::DmcScenario sc{channels::DMWiretap(2, 2, 2, joint),
                           metrics::FiniteDist::uniform(2)};
  AchOptions aopt;
  aopt.max_bins = 1u << 16;
  converse::ConvOptions copt;
  copt.max_bins = 1u << 16;
  for (long n : {300L, 900L}) {
    const auto t1 = thm1_rate(n, 1e-3, 1e-3, sc, aopt);
    const auto t3 = converse::thm3_rate(n, 1e-3, 1e-3, sc, copt);
    CHECK(t1.rate_bits <= t3.rate_bits + 1e-12);
    CHECK(t3.status == PointStatus::kOk);
  }
}

TEST_CASE("dmc reliability bound dominates a direct random-coding simulation") {
  // the spectrum RCU relaxation upper-bounds the ensemble error of
  // constant-composition codebooks under posterior-metric decoding
  const double p1 = 0.08;
  Eigen::MatrixXd wy(2, 2);
  wy << 1 - p1, p1, p1, 1 - p1;
  const long n = 12;
  const long a = 8;  // codebook size
  const long half = n / 2;

  // bound side: composition spectrum with the type penalty
  ArrayXd qy(2);
  qy << 0.5, 0.5;
  std::vector<LogSpectrum> parts = {
      channels::dmc_letter_llr_spectrum(0, wy, metrics::FiniteDist{qy}, 1e-5),
      channels::dmc_letter_llr_spectrum(1, wy, metrics::FiniteDist{qy}, 1e-5)};
  std::vector<std::int64_t> counts = {half, half};
  const auto spec = probkit::composition_convolve(parts, counts);
  const double penalty = 2.0 * std::log(static_cast<double>(n) + 1.0);
  const double bound =
      rcu_spectrum(spec, std::log(static_cast<double>(a - 1)) + penalty);

  // simulation side: balanced binary codewords, exact ML (min distance),
  // ties resolved pessimistically as errors
  Rng rng(2718);
  const long books = 300, uses = 60;
  double err = 0.0;
  long trials = 0;
  std::vector<std::uint32_t> cw(static_cast<std::size_t>(a));
  for (long b = 0; b < books; ++b) {
    for (auto& c : cw) {
      // random word of weight n/2
      std::uint32_t w = 0;
      int ones = 0;
      while (ones < half) {
        const int pos = static_cast<int>(rng.next_u64() % n);
        if (!(w >> pos & 1)) {
          w |= 1u << pos;
          ++ones;
        }
      }
      c = w;
    }
    for (long u = 0; u < uses; ++u) {
      const auto sent = cw[0];
      std::uint32_t flips = 0;
      for (long i = 0; i < n; ++i)
        if (rng.uniform() < p1) flips |= 1u << i;
      const auto received = sent ^ flips;
      const int d0 = __builtin_popcount(received ^ sent);
      bool fail = false;
      for (std::size_t j = 1; j < cw.size(); ++j)
        if (__builtin_popcount(received ^ cw[j]) <= d0) fail = true;
      err += fail ? 1.0 : 0.0;
      ++trials;
    }
  }
  const double sim = err / static_cast<double>(trials);
  const double se = std::sqrt(sim * (1 - sim) / static_cast<double>(trials));
  CHECK(bound + 3.0 * se >= sim);
}

TEST_CASE("dmc_composition rounds to the exact blocklength") {
  ArrayXd p(3);
  p << 0.2, 0.5, 0.3;
  const auto c = dmc_composition(metrics::FiniteDist{p}, 101);
  CHECK(c.counts[0] + c.counts[1] + c.counts[2] == 101);
  CHECK(std::fabs(c.type[0] - 0.2) < 0.01);
}

}  // TEST_SUITE
