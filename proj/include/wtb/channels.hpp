#pragma once

#include "wtb/density_grid.hpp"
#include "wtb/finite_dist.hpp"
#include "wtb/nc_chi2.hpp"
#include "wtb/spectrum.hpp"

#include <Eigen/Dense>

#include <vector>

namespace wtb::channels {

using metrics::FiniteDist;
using probkit::DensityGrid;
using probkit::LogSpectrum;
using probkit::NoncentralChi2;

// Discrete memoryless wiretap channel: joint kernel P_{YZ|X} with derived
// marginals. Immutable after construction.
class DMWiretap {
 public:
  DMWiretap(Index nx, Index ny, Index nz, std::vector<Eigen::MatrixXd> joint_yz_given_x);

  Index nx() const { return nx_; }
  Index ny() const { return ny_; }
  Index nz() const { return nz_; }

  // P_{YZ|X=x}(y,z), ny x nz
  const Eigen::MatrixXd& joint(Index x) const { return joint_[static_cast<std::size_t>(x)]; }
  // rows are inputs
  const Eigen::MatrixXd& legit() const { return py_given_x_; }   // nx x ny
  const Eigen::MatrixXd& eaves() const { return pz_given_x_; }   // nx x nz

  ArrayXd output_y(const FiniteDist& px) const;  // P_{Y|X} o P_X
  ArrayXd output_z(const FiniteDist& px) const;

 private:
  Index nx_, ny_, nz_;
  std::vector<Eigen::MatrixXd> joint_;
  Eigen::MatrixXd py_given_x_, pz_given_x_;
};

// Power-constrained Gaussian wiretap pair; requires noise_eve > noise_legit.
struct GaussianWiretap {
  double power;
  double noise_legit;
  double noise_eve;

  GaussianWiretap(double p, double n1, double n2)
      : power(p), noise_legit(n1), noise_eve(n2) {
    require(p > 0.0 && n1 > 0.0 && n2 > n1,
            "GaussianWiretap: need P > 0 and 0 < N1 < N2");
  }
};

// Per-letter law of ln(W(out|X)/Q(out)) under P_X x W, lattice-quantized.
// Output letters with Q = 0 but positive conditional mass become a +inf atom.
LogSpectrum dmc_llr_spectrum(const FiniteDist& px, const Eigen::MatrixXd& w,
                             const FiniteDist& q_out, double step);

// Law of the same ratio under W(.|x) for one fixed input letter.
LogSpectrum dmc_letter_llr_spectrum(Index x, const Eigen::MatrixXd& w,
                                    const FiniteDist& q_out, double step);

enum class EveMeasure { kSignal, kNoise };

// Exact law of the n-letter eavesdropper information density at the
// constant-power codeword, with the white reference output N(0, (P+N2) I).
// Under kSignal the observation is codeword plus eavesdropper noise; under
// kNoise it is drawn from the reference itself.
NoncentralChi2 gauss_eve_llr(const GaussianWiretap& g, long n, EveMeasure under);

// n-letter log dP_{Y Z|X=xbar} / d(P_{Z|X=xbar} Q_{Y|Z}) as a constant plus
// two independent scaled noncentral chi-squares (2x2 quadratic form
// diagonalized once).
struct QuadFormTerm {
  double lambda;
  long dof;
  double noncentrality;
};
struct QuadFormLLR {
  double constant = 0.0;
  std::vector<QuadFormTerm> terms;

  double mean() const;
  double variance() const;
  double stddev() const { return std::sqrt(variance()); }
};

QuadFormLLR gauss_conv_llr(const GaussianWiretap& g, long n);

// CDF of the quadratic-form law by nested quadrature (absolute error ~1e-9).
double quadform_cdf(const QuadFormLLR& q, double x);

// Sampled density of the law (component convolution on a shared grid); the
// carrier for Neyman-Pearson computations at large n.
DensityGrid quadform_density(const QuadFormLLR& q, Index max_points = 1 << 17,
                             double half_width_sds = 14.0);

}  // namespace wtb::channels
