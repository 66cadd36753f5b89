#pragma once

#include "wtb/common.hpp"

#include <vector>

namespace wtb::probkit {

// Law of shift + scale * W with W ~ chi-square(dof, noncentrality).
// scale may be negative; queries reflect through the single chi-square kernel.
struct NoncentralChi2 {
  long dof = 1;
  double noncentrality = 0.0;
  double scale = 1.0;
  double shift = 0.0;

  double mean() const {
    return shift + scale * (static_cast<double>(dof) + noncentrality);
  }
  double variance() const {
    return scale * scale * 2.0 * (static_cast<double>(dof) + 2.0 * noncentrality);
  }
  double stddev() const { return std::sqrt(variance()); }
};

// P[shift + scale*W <= x], absolute error ~1e-12
double nc_chi2_cdf(double x, const NoncentralChi2& d);
double nc_chi2_sf(double x, const NoncentralChi2& d);
double nc_chi2_log_cdf(double x, const NoncentralChi2& d);
double nc_chi2_log_sf(double x, const NoncentralChi2& d);

// CDF/SF of the standardized kernel W ~ chi2(dof, nc)
double chi2_noncentral_cdf(double w, double dof, double nc);
double chi2_noncentral_sf(double w, double dof, double nc);
double chi2_noncentral_log_cdf(double w, double dof, double nc);
double chi2_noncentral_log_sf(double w, double dof, double nc);

// Pointwise log-density evaluator for W ~ chi2(dof, nc); Poisson-mixture
// series with precomputed weights, usable deep in both tails.
class NcChi2Pdf {
 public:
  NcChi2Pdf(double dof, double nc);
  double log_pdf(double w) const;

 private:
  double dof_, nc_;
  long j0_ = 0;
  std::vector<double> pre_;  // log pois_j - lgamma(a_j) - a_j*ln2, a_j = dof/2 + j
};

// log density of the affine law at point x
double nc_chi2_log_pdf(double x, const NoncentralChi2& d);

}  // namespace wtb::probkit
