#pragma once

#include "wtb/common.hpp"
#include "wtb/nc_chi2.hpp"

namespace wtb::probkit {

// Uniform-grid sampled density with prepared cumulative tails. Used for the
// continuous log-likelihood-ratio laws (noncentral chi-square and quadratic
// forms): upper quantiles and exponentially weighted tails stay accurate in
// log space even when the linear probabilities underflow.
class DensityGrid {
 public:
  DensityGrid() = default;
  DensityGrid(double t0, double step, ArrayXd log_f);

  double t0() const { return t0_; }
  double step() const { return step_; }
  Index size() const { return logf_.size(); }
  double t(Index i) const { return t0_ + step_ * static_cast<double>(i); }
  const ArrayXd& log_f() const { return logf_; }

  // integral of the density over the grid (diagnostic; ~1)
  double total() const { return total_; }

  // P[T >= x] by trapezoid integration
  double tail(double x) const;
  // t* with P[T >= t*] = alpha
  double upper_quantile(double alpha) const;
  // log of integral_x^inf e^{-s} f(s) ds
  double log_exp_tail(double x) const;
  // log of integral e^{-|s - x|} f(s) ds
  double log_expect_exp_abs(double x) const;

 private:
  double cell_mass(Index i) const;          // mass of [t_i, t_{i+1}]
  double log_cell_exp_mass(Index i) const;  // log of int over cell of e^{-s} f
  double t0_ = 0.0, step_ = 1.0;
  ArrayXd logf_;
  ArrayXd tail_;      // tail_[i] = P[T >= t_i]
  ArrayXd log_etail_; // log int_{t_i}^inf e^{-s} f ds
  double total_ = 0.0;
};

// density grid for an affine noncentral chi-square law, covering
// mean +- half_width_sds standard deviations
DensityGrid nc_chi2_density(const NoncentralChi2& law, Index points = 8192,
                            double half_width_sds = 16.0);

}  // namespace wtb::probkit
