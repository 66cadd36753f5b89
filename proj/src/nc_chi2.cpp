#include "wtb/nc_chi2.hpp"

#include "wtb/special.hpp"

#include <algorithm>
#include <cmath>

namespace wtb::probkit {

namespace {

// Poisson(nc/2) index window covering all but ~1e-16 of the weight
void poisson_window(double nc, long& j0, long& j1) {
  const double m = 0.5 * nc;
  if (m < 40.0) {
    j0 = 0;
    j1 = static_cast<long>(std::ceil(m + 12.0 * std::sqrt(m + 1.0) + 25.0));
    return;
  }
  const double sd = std::sqrt(m);
  j0 = std::max(0L, static_cast<long>(std::floor(m - 12.0 * sd - 10.0)));
  j1 = static_cast<long>(std::ceil(m + 12.0 * sd + 10.0));
}

double log_poisson_pmf(long j, double m) {
  if (m == 0.0) return j == 0 ? 0.0 : kNegInf;
  return -m + static_cast<double>(j) * std::log(m) -
         std::lgamma(static_cast<double>(j) + 1.0);
}

// mix[j] applied to per-component log values f(a_j) via logsumexp
template <typename F>
double poisson_mix_log(double nc, F&& log_term) {
  long j0, j1;
  poisson_window(nc, j0, j1);
  const double m = 0.5 * nc;
  double best = kNegInf;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(j1 - j0 + 1));
  for (long j = j0; j <= j1; ++j) {
    const double lt = log_poisson_pmf(j, m) + log_term(j);
    terms.push_back(lt);
    best = std::max(best, lt);
  }
  if (best == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - best);
  return best + std::log(s);
}

}  // namespace

double chi2_noncentral_cdf(double w, double dof, double nc) {
  if (w <= 0.0) return 0.0;
  if (nc < 1e-14) return gamma_p(0.5 * dof, 0.5 * w);
  long j0, j1;
  poisson_window(nc, j0, j1);
  const double m = 0.5 * nc;
  double acc = 0.0;
  for (long j = j0; j <= j1; ++j)
    acc += std::exp(log_poisson_pmf(j, m)) *
           gamma_p(0.5 * dof + static_cast<double>(j), 0.5 * w);
  return std::min(1.0, acc);
}

double chi2_noncentral_sf(double w, double dof, double nc) {
  if (w <= 0.0) return 1.0;
  if (nc < 1e-14) return gamma_q(0.5 * dof, 0.5 * w);
  long j0, j1;
  poisson_window(nc, j0, j1);
  const double m = 0.5 * nc;
  double acc = 0.0;
  for (long j = j0; j <= j1; ++j)
    acc += std::exp(log_poisson_pmf(j, m)) *
           gamma_q(0.5 * dof + static_cast<double>(j), 0.5 * w);
  return std::min(1.0, acc);
}

double chi2_noncentral_log_cdf(double w, double dof, double nc) {
  if (w <= 0.0) return kNegInf;
  if (nc < 1e-14) return log_gamma_p(0.5 * dof, 0.5 * w);
  return std::min(0.0, poisson_mix_log(nc, [&](long j) {
    return log_gamma_p(0.5 * dof + static_cast<double>(j), 0.5 * w);
  }));
}

double chi2_noncentral_log_sf(double w, double dof, double nc) {
  if (w <= 0.0) return 0.0;
  if (nc < 1e-14) return log_gamma_q(0.5 * dof, 0.5 * w);
  return std::min(0.0, poisson_mix_log(nc, [&](long j) {
    return log_gamma_q(0.5 * dof + static_cast<double>(j), 0.5 * w);
  }));
}

double nc_chi2_cdf(double x, const NoncentralChi2& d) {
  require(d.dof >= 1 && d.noncentrality >= 0.0 && d.scale != 0.0,
          "nc_chi2_cdf: invalid law");
  const double w = (x - d.shift) / d.scale;
  if (d.scale > 0.0)
    return chi2_noncentral_cdf(w, static_cast<double>(d.dof), d.noncentrality);
  return chi2_noncentral_sf(w, static_cast<double>(d.dof), d.noncentrality);
}

double nc_chi2_sf(double x, const NoncentralChi2& d) {
  const double w = (x - d.shift) / d.scale;
  if (d.scale > 0.0)
    return chi2_noncentral_sf(w, static_cast<double>(d.dof), d.noncentrality);
  return chi2_noncentral_cdf(w, static_cast<double>(d.dof), d.noncentrality);
}

double nc_chi2_log_cdf(double x, const NoncentralChi2& d) {
  const double w = (x - d.shift) / d.scale;
  if (d.scale > 0.0)
    return chi2_noncentral_log_cdf(w, static_cast<double>(d.dof), d.noncentrality);
  return chi2_noncentral_log_sf(w, static_cast<double>(d.dof), d.noncentrality);
}

double nc_chi2_log_sf(double x, const NoncentralChi2& d) {
  const double w = (x - d.shift) / d.scale;
  if (d.scale > 0.0)
    return chi2_noncentral_log_sf(w, static_cast<double>(d.dof), d.noncentrality);
  return chi2_noncentral_log_cdf(w, static_cast<double>(d.dof), d.noncentrality);
}

NcChi2Pdf::NcChi2Pdf(double dof, double nc) : dof_(dof), nc_(nc) {
  long j1;
  poisson_window(nc, j0_, j1);
  const double m = 0.5 * nc;
  pre_.resize(static_cast<std::size_t>(j1 - j0_ + 1));
  for (long j = j0_; j <= j1; ++j) {
    const double a = 0.5 * dof_ + static_cast<double>(j);
    pre_[static_cast<std::size_t>(j - j0_)] =
        log_poisson_pmf(j, m) - std::lgamma(a) - a * kLn2;
  }
}

double NcChi2Pdf::log_pdf(double w) const {
  if (w <= 0.0) return kNegInf;
  const double lw = std::log(w);
  double best = kNegInf;
  const double base = -0.5 * w - lw;  // central chi2(k) pdf = w^{k/2-1} e^{-w/2} / (2^{k/2} G(k/2))
  for (std::size_t i = 0; i < pre_.size(); ++i) {
    const double a = 0.5 * dof_ + static_cast<double>(j0_ + static_cast<long>(i));
    best = std::max(best, pre_[i] + a * lw + base);
  }
  if (best == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i = 0; i < pre_.size(); ++i) {
    const double a = 0.5 * dof_ + static_cast<double>(j0_ + static_cast<long>(i));
    s += std::exp(pre_[i] + a * lw + base - best);
  }
  return best + std::log(s);
}

double nc_chi2_log_pdf(double x, const NoncentralChi2& d) {
  NcChi2Pdf pdf(static_cast<double>(d.dof), d.noncentrality);
  const double w = (x - d.shift) / d.scale;
  return pdf.log_pdf(w) - std::log(std::fabs(d.scale));
}

}  // namespace wtb::probkit
