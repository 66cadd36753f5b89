#include "wtb/density_grid.hpp"

#include <algorithm>
#include <cmath>

namespace wtb::probkit {

DensityGrid::DensityGrid(double t0, double step, ArrayXd log_f)
    : t0_(t0), step_(step), logf_(std::move(log_f)) {
  require(step_ > 0.0 && logf_.size() >= 2, "DensityGrid: bad grid");
  const Index n = logf_.size();
  tail_ = ArrayXd::Zero(n);
  log_etail_ = ArrayXd::Constant(n, kNegInf);
  long double acc = 0.0L;
  double lacc = kNegInf;
  for (Index i = n - 2; i >= 0; --i) {
    acc += cell_mass(i);
    tail_[i] = static_cast<double>(acc);
    lacc = log_add(lacc, log_cell_exp_mass(i));
    log_etail_[i] = lacc;
  }
  total_ = tail_[0];
}

double DensityGrid::cell_mass(Index i) const {
  const double a = logf_[i], b = logf_[i + 1];
  if (a == kNegInf && b == kNegInf) return 0.0;
  return 0.5 * step_ * (std::exp(a) + std::exp(b));
}

double DensityGrid::log_cell_exp_mass(Index i) const {
  const double a = logf_[i] - t(i), b = logf_[i + 1] - t(i + 1);
  if (a == kNegInf && b == kNegInf) return kNegInf;
  return std::log(0.5 * step_) + log_add(a, b);
}

double DensityGrid::tail(double x) const {
  if (x <= t0_) return total_;
  const double pos = (x - t0_) / step_;
  if (pos >= static_cast<double>(size() - 1)) return 0.0;
  const Index i = static_cast<Index>(pos);
  const double frac = pos - static_cast<double>(i);
  // subtract the part of cell i below x (linear in the cell)
  const double fa = std::exp(logf_[i]);
  const double fb = std::exp(logf_[i + 1]);
  const double fx = fa + (fb - fa) * frac;
  const double below = 0.5 * (fa + fx) * frac * step_;
  return tail_[i] - below;
}

double DensityGrid::upper_quantile(double alpha) const {
  require(alpha > 0.0 && alpha < 1.0, "upper_quantile: alpha in (0,1)");
  const double m = std::min(alpha, total_ * (1.0 - 1e-12));
  // first index with tail_ <= m, then interpolate within the cell to its left
  Index lo = 0, hi = size() - 1;
  while (lo < hi) {
    const Index mid = (lo + hi) / 2;
    if (tail_[mid] <= m) hi = mid; else lo = mid + 1;
  }
  if (lo == 0) return t0_;
  const Index i = lo - 1;  // tail_[i] > m >= tail_[i+1]
  const double need = tail_[i] - m;  // mass of cell i below t*
  const double fa = std::exp(logf_[i]);
  const double fb = std::exp(logf_[i + 1]);
  const double full = 0.5 * (fa + fb) * step_;
  double frac = full > 0.0 ? need / full : 0.0;
  frac = std::clamp(frac, 0.0, 1.0);
  return t(i) + frac * step_;
}

double DensityGrid::log_exp_tail(double x) const {
  if (x <= t0_) return log_etail_[0];
  const double pos = (x - t0_) / step_;
  if (pos >= static_cast<double>(size() - 1)) return kNegInf;
  const Index i = static_cast<Index>(pos);
  const double frac = pos - static_cast<double>(i);
  // upper part of cell i: trapezoid between x and t_{i+1}
  const double la = logf_[i], lb = logf_[i + 1];
  double lfx;
  if (la == kNegInf && lb == kNegInf) lfx = kNegInf;
  else {
    const double fa = std::exp(la), fb = std::exp(lb);
    const double fx = fa + (fb - fa) * frac;
    lfx = fx > 0.0 ? std::log(fx) : kNegInf;
  }
  const double w = (1.0 - frac) * step_;
  double partial = kNegInf;
  if (w > 0.0)
    partial = std::log(0.5 * w) + log_add(lfx - x, lb - t(i + 1));
  const double rest = (i + 1 < size()) ? log_etail_[i + 1] : kNegInf;
  return log_add(partial, rest);
}

double DensityGrid::log_expect_exp_abs(double x) const {
  // integral e^{x-s} f over s>=x, plus integral e^{s-x} f over s<x
  const double upper = x + log_exp_tail(x);
  double lower = kNegInf;
  const double end = std::min(x, t(size() - 1));
  for (Index i = 0; i + 1 < size() && t(i) < end; ++i) {
    const double hi = std::min(end, t(i + 1));
    const double w = hi - t(i);
    if (w <= 0.0) continue;
    const double la = logf_[i] + t(i);
    const double frac = (hi - t(i)) / step_;
    const double fa = std::exp(logf_[i]);
    const double fb = std::exp(logf_[i + 1]);
    const double fhi = fa + (fb - fa) * frac;
    const double lbv = (fhi > 0.0 ? std::log(fhi) : kNegInf) + hi;
    lower = log_add(lower, std::log(0.5 * w) + log_add(la, lbv));
  }
  lower -= x;
  return log_add(upper, lower);
}

DensityGrid nc_chi2_density(const NoncentralChi2& law, Index points,
                            double half_width_sds) {
  const double mu = law.mean();
  const double sd = law.stddev();
  const double lo = mu - half_width_sds * sd;
  const double hi = mu + half_width_sds * sd;
  const double h = (hi - lo) / static_cast<double>(points - 1);
  NcChi2Pdf pdf(static_cast<double>(law.dof), law.noncentrality);
  const double lscale = std::log(std::fabs(law.scale));
  ArrayXd lf(points);
  for (Index i = 0; i < points; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double w = (x - law.shift) / law.scale;
    lf[i] = pdf.log_pdf(w) - lscale;
  }
  return DensityGrid(lo, h, std::move(lf));
}

}  // namespace wtb::probkit
