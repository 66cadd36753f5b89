#include "wtb/spectrum.hpp"

#include "wtb/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace wtb;
using namespace wtb::probkit;

namespace {

LogSpectrum bsc_info_density(double p, double step = 1e-4) {
  // uniform input, induced output: atoms at ln(2(1-p)) and ln(2p)
  std::vector<SpectrumAtom> atoms = {{std::log(2.0 * (1.0 - p)), 1.0 - p},
                                     {std::log(2.0 * p), p}};
  return LogSpectrum::from_atoms(atoms, step);
}

double log_binom_pmf(long n, long k, double p) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         k * std::log(p) + (n - k) * std::log1p(-p);
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("quantization preserves mass and mean exactly") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SpectrumAtom> atoms;
    double mass = 0.0, mean = 0.0;
    for (int i = 0; i < 12; ++i) {
      const double m = rng.uniform_pos();
      atoms.push_back({4.0 * rng.normal(), m});
      mass += m;
    }
    for (auto& a : atoms) {
      a.mass /= mass;
      mean += a.mass * a.value;
    }
    const auto s = LogSpectrum::from_atoms(atoms, 0.01);
    CHECK(s.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.mean() == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("self_convolve identity and binomial") {
  const auto s = bsc_info_density(0.11);
  const auto s1 = self_convolve(s, 1);
  CHECK(s1.mean() == doctest::Approx(s.mean()).epsilon(1e-14));
  CHECK(s1.bins() == s.bins());

  std::vector<SpectrumAtom> two = {{0.0, 0.5}, {1.0, 0.5}};
  const auto t = LogSpectrum::from_atoms(two, 0.25);
  const auto t2 = self_convolve(t, 2);
  CHECK(t2.tail_geq(1.999) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(t2.tail_geq(0.999) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(t2.tail_geq(-0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t2.mean() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("n-fold BSC tail matches the binomial sum") {
  const double p = 0.11;
  const long n = 500;
  const auto s = self_convolve(bsc_info_density(p), n);
  // value of the sum with k low-likelihood letters
  const double vhi = std::log(2.0 * (1.0 - p)), vlo = std::log(2.0 * p);
  // generic threshold strictly between the k=54 and k=55 atoms
  const long kthr = 55;
  const double thr = n * vhi + (kthr - 0.5) * (vlo - vhi);
  long double oracle = 0.0L;
  for (long k = 0; k < kthr; ++k)
    oracle += expl(static_cast<long double>(log_binom_pmf(n, k, p)));
  CHECK(s.tail_geq(thr) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-9));
  // the tail at the mean sits near 1/2 for a sum this long
  CHECK(s.tail_geq(s.mean()) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("mass conservation and mean additivity up to n = 10^4") {
  const auto s = bsc_info_density(0.2, 1e-3);
  for (long n : {10L, 313L, 4096L, 10000L}) {
    const auto c = self_convolve(s, n);
    CHECK(std::fabs(c.total_mass() - 1.0) <= 1e-9);
    CHECK(std::fabs(c.mean() - n * s.mean()) <=
          n * c.step() / 2.0 + 1e-9);
    CHECK(c.variance() ==
          doctest::Approx(n * s.variance()).epsilon(1e-3));
  }
}

TEST_CASE("change-of-measure tail on the lattice") {
  // two atoms: Q-mass of {L >= t} is exactly sum w e^{-v}
  std::vector<SpectrumAtom> atoms = {{std::log(4.0), 0.8}, {std::log(0.25), 0.2}};
  const auto s = LogSpectrum::from_atoms(atoms, 1e-4);
  CHECK(std::exp(s.log_exp_tail(0.0)) == doctest::Approx(0.8 / 4.0).epsilon(1e-8));
  CHECK(std::exp(s.log_exp_tail(-10.0)) ==
        doctest::Approx(0.8 / 4.0 + 0.2 * 4.0).epsilon(1e-8));
}

TEST_CASE("quadrature of exp(-|L - t0|)") {
  std::vector<SpectrumAtom> atoms = {{-1.0, 0.3}, {0.5, 0.45}, {2.0, 0.25}};
  const auto s = LogSpectrum::from_atoms(atoms, 1e-4);
  const double t0 = 0.7;
  double oracle = 0.0;
  for (const auto& a : atoms) oracle += a.mass * std::exp(-std::fabs(a.value - t0));
  CHECK(std::exp(s.log_expect_exp_abs(t0)) == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("composition convolution equals direct product") {
  std::vector<SpectrumAtom> a1 = {{0.0, 0.5}, {1.0, 0.5}};
  std::vector<SpectrumAtom> a2 = {{-0.5, 0.25}, {0.5, 0.75}};
  std::vector<LogSpectrum> parts = {LogSpectrum::from_atoms(a1, 0.25),
                                    LogSpectrum::from_atoms(a2, 0.25)};
  std::vector<std::int64_t> counts = {2, 1};
  const auto c = composition_convolve(parts, counts);
  // direct: (X1+X2) + Y with the obvious pmf
  CHECK(c.mean() == doctest::Approx(2 * 0.5 + 0.25).epsilon(1e-12));
  CHECK(c.tail_geq(2.49) == doctest::Approx(0.25 * 0.75).epsilon(1e-12));
  CHECK(c.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("infinite atoms propagate through convolution") {
  std::vector<SpectrumAtom> a = {{0.0, 0.9}};
  const auto s = LogSpectrum::from_atoms(a, 0.1, /*mass_pos_inf=*/0.1);
  const auto c = self_convolve(s, 3);
  // +inf if any letter hits the zero-reference event
  CHECK(c.mass_pos_inf() == doctest::Approx(1.0 - std::pow(0.9, 3)).epsilon(1e-12));
  CHECK(c.tail_geq(1000.0) == doctest::Approx(c.mass_pos_inf()).epsilon(1e-12));
  CHECK(c.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("step mismatch and lattice cap are rejected") {
  std::vector<SpectrumAtom> a = {{0.0, 1.0}};
  const auto s1 = LogSpectrum::from_atoms(a, 0.1);
  const auto s2 = LogSpectrum::from_atoms(a, 0.2);
  CHECK_THROWS_AS(convolve(s1, s2), std::invalid_argument);

  std::vector<SpectrumAtom> wide = {{0.0, 0.5}, {100.0, 0.5}};
  const auto w = LogSpectrum::from_atoms(wide, 1e-4);
  ConvolveOptions tight;
  tight.max_bins = 1000;
  CHECK_THROWS_AS(convolve(w, w, tight), std::invalid_argument);
  // self_convolve widens the step instead of overflowing
  const auto ok = self_convolve(w, 64, tight);
  CHECK(ok.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ok.mean() == doctest::Approx(64 * 50.0).epsilon(1e-9));
}

TEST_CASE("regrid widens only") {
  const auto s = bsc_info_density(0.3, 1e-4);
  const auto r = regrid(s, 0.01);
  CHECK(r.step() == doctest::Approx(0.01));
  CHECK(r.mean() == doctest::Approx(s.mean()).epsilon(1e-12));
  const auto same = regrid(s, 1e-5);
  CHECK(same.step() == doctest::Approx(1e-4));
}

}  // TEST_SUITE
