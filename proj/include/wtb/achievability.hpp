#pragma once

#include "wtb/bound_point.hpp"
#include "wtb/channels.hpp"
#include "wtb/density_grid.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace wtb::channels {

struct DmcScenario {
  DMWiretap channel;
  metrics::FiniteDist input;
};
using WiretapScenario = std::variant<GaussianWiretap, DmcScenario>;

}  // namespace wtb::channels

namespace wtb::achievability {

using channels::DmcScenario;
using channels::GaussianWiretap;
using channels::WiretapScenario;
using metrics::FiniteDist;
using probkit::DensityGrid;
using probkit::LogSpectrum;
using probkit::NoncentralChi2;

// Eavesdropper information-density law at the constant-power codeword,
// carried under both measures plus a sampled density for quadrature.
struct GaussEveLaw {
  NoncentralChi2 signal;
  NoncentralChi2 noise;
  DensityGrid signal_density;

  static GaussEveLaw build(const GaussianWiretap& g, long n);

  // E_gamma(P_{Z^n | X^n = xbar}, Q_{Z^n}); both tails exact
  double e_gamma_ln(double ln_gamma) const;
  // log E[exp(-|i(xbar;Z) - ln gamma|)] under the signal measure
  double log_expect_exp_abs(double ln_gamma) const;
};

// Privacy-amplification secrecy bound: E_gamma term plus
// (1/2) sqrt((gamma/K) E[exp(-|i - ln gamma|)]). Capped at 1.
double lemma1_delta(const LogSpectrum& eve_llr, double ln_k, double ln_gamma);
double lemma1_delta(const GaussEveLaw& law, double ln_k, double ln_gamma);

// Weakened baseline: expectation term replaced by 1.
double wh_baseline_delta(const LogSpectrum& eve_llr, double ln_k, double ln_gamma);
double wh_baseline_delta(const GaussEveLaw& law, double ln_k, double ln_gamma);

// Random-coding union bound for the sphere ensemble. The pairwise error
// probability given (X,Y) is an exact spherical-cap fraction; only the outer
// expectation is Monte Carlo, driven by the two scalar sufficient statistics.
class RcuSphere {
 public:
  static RcuSphere build(const GaussianWiretap& g, long n, std::size_t samples,
                         std::uint64_t seed);

  struct Eval {
    double mean;
    double std_err;
    double upper3() const { return mean + 3.0 * std_err; }
  };
  // codebook size passed as ln(MK)
  Eval epsilon(double ln_total) const;

 private:
  std::vector<double> log_cap_;
};

// one-shot convenience wrapper (mean estimate; build RcuSphere to reuse
// the sample across codebook sizes)
double rcu_sphere(long n, double ln_total, const GaussianWiretap& g,
                  std::size_t mc_samples, std::uint64_t seed);

// log of the fraction of the unit sphere in R^n with first coordinate >= u0
double log_sphere_cap(double u0, long n);

// Dependence-testing bound 1 - E_a(P_XY, P_X P_Y) from the joint-vs-product
// information-density spectrum.
double dt_bound(const LogSpectrum& llr_xy, double a);
double dt_bound_ln(const LogSpectrum& llr_xy, double ln_a);

// Spectrum RCU relaxation E[min{1, e^{ln_c} e^{-S}}]; ln_c folds in the
// codebook size and any change-of-measure penalty.
double rcu_spectrum(const LogSpectrum& llr_xy, double ln_c);

struct AchOptions {
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 1;
  int gamma_grid = 64;
  std::size_t max_bins = std::size_t{1} << 20;
};

// Largest uniform-partition-code secret rate meeting (epsilon, delta):
// reliability fixes the largest mother-code size MK, privacy amplification
// fixes the smallest power-of-two bin size K.
BoundPoint thm1_rate(long n, double eps, double delta, const WiretapScenario& sc,
                     const AchOptions& opt = {});
// Same search with the weakened secrecy term.
BoundPoint wh_rate(long n, double eps, double delta, const WiretapScenario& sc,
                   const AchOptions& opt = {});

// Shared pieces also used by the converse side for DMC scenarios.
struct DmcComposition {
  std::vector<std::int64_t> counts;     // per input letter, sums to n
  ArrayXd type;                         // counts / n
};
DmcComposition dmc_composition(const FiniteDist& px, long n);

}  // namespace wtb::achievability
