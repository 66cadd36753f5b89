#include "wtb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace wtb::metrics {

double total_variation(const FiniteDist& p, const FiniteDist& q) {
  require(p.size() == q.size(), "total_variation: mismatched supports");
  return 0.5 * (p.p - q.p).abs().sum();
}

double e_gamma(const FiniteDist& p, const FiniteDist& q, double gamma) {
  require(p.size() == q.size(), "e_gamma: mismatched supports");
  require(gamma > 0.0, "e_gamma: gamma must be positive");
  return (p.p - gamma * q.p).max(0.0).sum();
}

double beta_alpha(const FiniteDist& p, const FiniteDist& q, double alpha) {
  require(p.size() == q.size(), "beta_alpha: mismatched supports");
  require(alpha >= 0.0 && alpha <= 1.0 + 1e-12, "beta_alpha: alpha in [0,1]");
  alpha = std::min(alpha, 1.0);
  if (alpha <= 0.0) return 0.0;

  const Index n = p.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // descending likelihood ratio; Q = 0 atoms with P > 0 rank first
  auto ratio = [&](Index i) {
    if (q[i] <= 0.0) return p[i] > 0.0 ? kInf : -1.0;  // P=Q=0 atoms are inert
    return p[i] / q[i];
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return ratio(a) > ratio(b); });

  long double pc = 0.0L, qc = 0.0L;
  for (Index i : order) {
    if (pc + p[i] < alpha - 1e-15) {
      pc += p[i];
      qc += q[i];
      continue;
    }
    const double need = static_cast<double>(alpha - pc);
    if (p[i] > 0.0) {
      const double theta = std::clamp(need / p[i], 0.0, 1.0);
      qc += theta * q[i];
    }
    return static_cast<double>(qc);
  }
  return static_cast<double>(qc);  // alpha exceeds total P mass; whole space
}

double e_gamma_spectrum_ln(const probkit::LogSpectrum& l, double ln_gamma) {
  const double ptail = l.tail_geq(ln_gamma);
  const double lq = l.log_exp_tail(ln_gamma);
  const double g_q = std::exp(ln_gamma + lq);
  return std::max(0.0, ptail - g_q);
}

double e_gamma_spectrum(const probkit::LogSpectrum& l, double gamma) {
  require(gamma > 0.0, "e_gamma_spectrum: gamma must be positive");
  return e_gamma_spectrum_ln(l, std::log(gamma));
}

double log_beta_alpha_spectrum(const probkit::LogSpectrum& l, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0 + 1e-12, "beta_alpha_spectrum: alpha in [0,1]");
  alpha = std::min(alpha, 1.0);
  if (alpha <= 0.0) return kNegInf;

  // +inf atoms first: they carry no Q-mass
  long double pc = l.mass_pos_inf();
  if (pc >= alpha) return kNegInf;

  const auto& w = l.weights();
  double lbeta = kNegInf;
  for (Index i = l.bins() - 1; i >= 0; --i) {
    if (w[i] <= 0.0) continue;
    const double v = l.value(i);
    if (pc + w[i] < alpha - 1e-15) {
      pc += w[i];
      lbeta = log_add(lbeta, std::log(w[i]) - v);
      continue;
    }
    const double theta = std::clamp(static_cast<double>(alpha - pc) / w[i], 0.0, 1.0);
    if (theta > 0.0) lbeta = log_add(lbeta, std::log(theta * w[i]) - v);
    return lbeta;
  }
  return lbeta;
}

double beta_alpha_spectrum(const probkit::LogSpectrum& l, double alpha) {
  return std::exp(log_beta_alpha_spectrum(l, alpha));
}

}  // namespace wtb::metrics
