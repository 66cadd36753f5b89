#pragma once

#include "wtb/common.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace wtb::probkit {

struct SpectrumAtom {
  double value;  // nats
  double mass;
};

struct ConvolveOptions {
  std::size_t max_bins = std::size_t{1} << 22;
  // bins below trim_rel * max weight are zeroed after each FFT stage; this
  // removes FFT noise that would otherwise corrupt change-of-measure tails
  double trim_rel = 1e-14;
};

// Lattice-quantized law of a log-likelihood ratio under the P measure.
// Atom mass is split between adjacent lattice sites preserving the mean, so
// exponential-weight sums over the lattice are second-order accurate in step.
class LogSpectrum {
 public:
  LogSpectrum() = default;

  static LogSpectrum from_atoms(std::span<const SpectrumAtom> atoms, double step,
                                double mass_pos_inf = 0.0);
  static LogSpectrum point_mass(double value, double step);

  double offset() const { return offset_; }
  double step() const { return step_; }
  const ArrayXd& weights() const { return w_; }
  double mass_pos_inf() const { return pos_inf_; }

  Index bins() const { return w_.size(); }
  double value(Index i) const { return offset_ + step_ * static_cast<double>(i); }
  double min_value() const { return offset_; }
  double max_value() const { return value(bins() - 1); }

  double total_mass() const { return w_.sum() + pos_inf_; }
  // moments of the finite part
  double mean() const;
  double variance() const;

  // P[L >= t]; bins are attributed by center value, +inf mass included
  double tail_geq(double t) const;
  // log E[e^{-L} 1{L >= t}]  (the Q-tail by change of measure)
  double log_exp_tail(double t) const;
  // log E[exp(-|L - t0|)]
  double log_expect_exp_abs(double t0) const;

  // smallest bin index with value(i) >= t (bins() if none)
  Index lower_bin(double t) const;

  void scale_mass(double factor) { w_ *= factor; pos_inf_ *= factor; }
  void validate(double tol = 1e-9) const;

  friend LogSpectrum convolve(const LogSpectrum& a, const LogSpectrum& b,
                              const ConvolveOptions& opt);

 private:
  double offset_ = 0.0;
  double step_ = 1.0;
  ArrayXd w_;
  double pos_inf_ = 0.0;
};

LogSpectrum convolve(const LogSpectrum& a, const LogSpectrum& b,
                     const ConvolveOptions& opt = {});

// Distribution of the sum of n i.i.d. copies, exponentiation by squaring.
// The lattice step is widened up front if the n-letter support would exceed
// opt.max_bins.
LogSpectrum self_convolve(const LogSpectrum& s, std::int64_t n,
                          const ConvolveOptions& opt = {});

// Law of sum over independent blocks: counts[i] i.i.d. copies drawn from
// parts[i]. All parts must share one lattice step.
LogSpectrum composition_convolve(std::span<const LogSpectrum> parts,
                                 std::span<const std::int64_t> counts,
                                 const ConvolveOptions& opt = {});

// Widens the lattice to the given step (no-op when new_step <= step).
LogSpectrum regrid(const LogSpectrum& s, double new_step);

// Linear convolution of two nonnegative weight arrays (direct for small
// operands, FFT otherwise). Shared by every lattice and density convolution.
ArrayXd linear_convolve(const ArrayXd& a, const ArrayXd& b);

}  // namespace wtb::probkit
