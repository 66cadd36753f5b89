#include "wtb/spectrum.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

namespace wtb::probkit {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

ArrayXd linear_convolve(const ArrayXd& a, const ArrayXd& b) {
  const std::size_t la = static_cast<std::size_t>(a.size());
  const std::size_t lb = static_cast<std::size_t>(b.size());
  const std::size_t lout = la + lb - 1;
  // direct convolution is cheaper (and exact) for small operands
  if (la * lb <= 1u << 16) {
    ArrayXd out = ArrayXd::Zero(static_cast<Index>(lout));
    for (std::size_t i = 0; i < la; ++i) {
      if (a[static_cast<Index>(i)] == 0.0) continue;
      out.segment(static_cast<Index>(i), static_cast<Index>(lb)) +=
          a[static_cast<Index>(i)] * b;
    }
    return out;
  }
  const std::size_t lp = next_pow2(lout);
  std::vector<std::complex<double>> fa(lp), fb(lp);
  for (std::size_t i = 0; i < la; ++i) fa[i] = a[static_cast<Index>(i)];
  for (std::size_t i = 0; i < lb; ++i) fb[i] = b[static_cast<Index>(i)];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> Fa(lp), Fb(lp);
  fft.fwd(Fa, fa);
  fft.fwd(Fb, fb);
  for (std::size_t i = 0; i < lp; ++i) Fa[i] *= Fb[i];
  std::vector<std::complex<double>> conv(lp);
  fft.inv(conv, Fa);
  ArrayXd out(static_cast<Index>(lout));
  for (std::size_t i = 0; i < lout; ++i) out[static_cast<Index>(i)] = conv[i].real();
  return out;
}

namespace {

void trim_and_clean(ArrayXd& w, double& offset, double step, double trim_rel) {
  const double mx = w.maxCoeff();
  const double thr = mx * trim_rel;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] < thr) w[i] = 0.0;
  Index lo = 0, hi = w.size() - 1;
  while (lo < hi && w[lo] == 0.0) ++lo;
  while (hi > lo && w[hi] == 0.0) --hi;
  if (lo > 0 || hi < w.size() - 1) {
    ArrayXd nw = w.segment(lo, hi - lo + 1).eval();
    w.swap(nw);
    offset += step * static_cast<double>(lo);
  }
}

}  // namespace

LogSpectrum LogSpectrum::from_atoms(std::span<const SpectrumAtom> atoms, double step,
                                    double mass_pos_inf) {
  require(step > 0.0, "LogSpectrum: step must be positive");
  require(!atoms.empty() || mass_pos_inf > 0.0, "LogSpectrum: empty law");
  double vmin = kInf, vmax = -kInf;
  for (const auto& a : atoms) {
    require(std::isfinite(a.value), "LogSpectrum: atom value must be finite");
    require(a.mass >= -1e-15, "LogSpectrum: negative atom mass");
    vmin = std::min(vmin, a.value);
    vmax = std::max(vmax, a.value);
  }
  LogSpectrum s;
  s.step_ = step;
  s.pos_inf_ = mass_pos_inf;
  if (atoms.empty()) {
    s.offset_ = 0.0;
    s.w_ = ArrayXd::Zero(1);
    return s;
  }
  s.offset_ = vmin;
  const Index nb = static_cast<Index>(std::floor((vmax - vmin) / step)) + 2;
  s.w_ = ArrayXd::Zero(nb);
  for (const auto& a : atoms) {
    if (a.mass <= 0.0) continue;
    const double pos = (a.value - vmin) / step;
    Index i = static_cast<Index>(std::floor(pos));
    double f = pos - static_cast<double>(i);
    if (i >= nb - 1) { i = nb - 2; f = 1.0; }
    s.w_[i] += a.mass * (1.0 - f);
    s.w_[i + 1] += a.mass * f;
  }
  return s;
}

LogSpectrum LogSpectrum::point_mass(double value, double step) {
  SpectrumAtom a{value, 1.0};
  return from_atoms(std::span<const SpectrumAtom>(&a, 1), step);
}

double LogSpectrum::mean() const {
  const double m = w_.sum();
  if (m <= 0.0) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < w_.size(); ++i) acc += w_[i] * value(i);
  return acc / m;
}

double LogSpectrum::variance() const {
  const double m = w_.sum();
  if (m <= 0.0) return 0.0;
  const double mu = mean();
  double acc = 0.0;
  for (Index i = 0; i < w_.size(); ++i) {
    const double d = value(i) - mu;
    acc += w_[i] * d * d;
  }
  return acc / m;
}

Index LogSpectrum::lower_bin(double t) const {
  // tolerance absorbs float jitter in offset arithmetic, small vs the step
  const double pos = (t - offset_) / step_ - 1e-9;
  if (pos <= 0.0) return 0;
  const auto i = static_cast<Index>(std::ceil(pos));
  return std::min(i, bins());
}

double LogSpectrum::tail_geq(double t) const {
  long double acc = pos_inf_;
  for (Index i = bins() - 1; i >= lower_bin(t); --i) acc += w_[i];
  return static_cast<double>(acc);
}

double LogSpectrum::log_exp_tail(double t) const {
  const Index i0 = lower_bin(t);
  double m = kNegInf;
  for (Index i = i0; i < bins(); ++i)
    if (w_[i] > 0.0) m = std::max(m, std::log(w_[i]) - value(i));
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (Index i = i0; i < bins(); ++i)
    if (w_[i] > 0.0) s += std::exp(std::log(w_[i]) - value(i) - m);
  return m + std::log(s);
}

double LogSpectrum::log_expect_exp_abs(double t0) const {
  // E[e^{-|L-t0|}] = e^{t0} E[e^{-L} 1{L>=t0}] + e^{-t0} E[e^{L} 1{L<t0}]
  const Index i0 = lower_bin(t0);
  double upper = t0 + log_exp_tail(t0);
  double m = kNegInf;
  for (Index i = 0; i < i0; ++i)
    if (w_[i] > 0.0) m = std::max(m, std::log(w_[i]) + value(i));
  double lower = kNegInf;
  if (m != kNegInf) {
    double s = 0.0;
    for (Index i = 0; i < i0; ++i)
      if (w_[i] > 0.0) s += std::exp(std::log(w_[i]) + value(i) - m);
    lower = -t0 + m + std::log(s);
  }
  return log_add(upper, lower);
}

void LogSpectrum::validate(double tol) const {
  require(step_ > 0.0 && std::isfinite(offset_), "LogSpectrum: bad lattice");
  require((w_ >= 0.0).all(), "LogSpectrum: negative weight");
  require(std::fabs(total_mass() - 1.0) <= tol, "LogSpectrum: mass not normalized");
}

LogSpectrum convolve(const LogSpectrum& a, const LogSpectrum& b,
                     const ConvolveOptions& opt) {
  require(std::fabs(a.step_ - b.step_) <= 1e-12 * a.step_,
          "convolve: operands must share a lattice step");
  LogSpectrum out;
  out.step_ = a.step_;
  out.offset_ = a.offset_ + b.offset_;
  out.w_ = linear_convolve(a.w_, b.w_);
  out.w_ = out.w_.max(0.0);
  require(static_cast<std::size_t>(out.w_.size()) <= opt.max_bins,
          "convolve: lattice size exceeds configured cap");
  // sum hits +inf iff either operand does
  const double fa = a.w_.sum(), fb = b.w_.sum();
  out.pos_inf_ = a.pos_inf_ * (fb + b.pos_inf_) + fa * b.pos_inf_;
  trim_and_clean(out.w_, out.offset_, out.step_, opt.trim_rel);
  // renormalize the finite part to its exact product mass
  const double target = fa * fb;
  const double got = out.w_.sum();
  if (got > 0.0) out.w_ *= target / got;
  return out;
}

LogSpectrum regrid(const LogSpectrum& s, double new_step) {
  if (new_step <= s.step()) return s;
  std::vector<SpectrumAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(s.bins()));
  for (Index i = 0; i < s.bins(); ++i)
    if (s.weights()[i] > 0.0) atoms.push_back({s.value(i), s.weights()[i]});
  return LogSpectrum::from_atoms(atoms, new_step, s.mass_pos_inf());
}

LogSpectrum self_convolve(const LogSpectrum& s, std::int64_t n,
                          const ConvolveOptions& opt) {
  require(n >= 1, "self_convolve: n must be positive");
  if (n == 1) return s;
  // pick the lattice step up front so the n-letter support fits the cap
  // 10% headroom absorbs the edge bins the squaring chain accretes
  const double range = (s.max_value() - s.min_value()) * static_cast<double>(n);
  const double min_step = range / (0.9 * static_cast<double>(opt.max_bins));
  LogSpectrum base = regrid(s, std::max(s.step(), min_step));

  // convolve() combines the +inf masses stage by stage, so plain
  // square-and-multiply is enough
  LogSpectrum acc;
  bool have_acc = false;
  std::int64_t e = n;
  while (e > 0) {
    if (e & 1) {
      acc = have_acc ? convolve(acc, base, opt) : base;
      have_acc = true;
    }
    e >>= 1;
    if (e > 0) base = convolve(base, base, opt);
  }
  return acc;
}

LogSpectrum composition_convolve(std::span<const LogSpectrum> parts,
                                 std::span<const std::int64_t> counts,
                                 const ConvolveOptions& opt) {
  require(parts.size() == counts.size() && !parts.empty(),
          "composition_convolve: size mismatch");
  double range = 0.0;
  const double step0 = parts[0].step();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    require(std::fabs(parts[i].step() - step0) <= 1e-12 * step0,
            "composition_convolve: parts must share a lattice step");
    if (counts[i] > 0)
      range += (parts[i].max_value() - parts[i].min_value()) *
               static_cast<double>(counts[i]);
  }
  const double step = std::max(step0, range / (0.9 * static_cast<double>(opt.max_bins)));
  LogSpectrum acc;
  bool have = false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (counts[i] == 0) continue;
    LogSpectrum block = self_convolve(regrid(parts[i], step), counts[i], opt);
    acc = have ? convolve(acc, block, opt) : block;
    have = true;
  }
  require(have, "composition_convolve: all counts zero");
  return acc;
}

}  // namespace wtb::probkit
