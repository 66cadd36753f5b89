#pragma once

#include "wtb/finite_dist.hpp"
#include "wtb/spectrum.hpp"

namespace wtb::metrics {

// d(P,Q) = (1/2) sum |P - Q|
double total_variation(const FiniteDist& p, const FiniteDist& q);

// E_gamma(P,Q) = sum_x max{P(x) - gamma Q(x), 0}. Atoms with Q = 0 < P sit
// above every threshold.
double e_gamma(const FiniteDist& p, const FiniteDist& q, double gamma);

// Neyman-Pearson optimum: smallest Q-mass of a randomized test with P-mass
// alpha. Boundary atom included fractionally, never sampled.
double beta_alpha(const FiniteDist& p, const FiniteDist& q, double alpha);

// Spectrum-based counterparts. The spectrum is the law of ln(dP/dQ) under P;
// Q-side tails come from the change of measure Q[L >= t] = E_P[e^{-L} 1{L>=t}].
double e_gamma_spectrum(const probkit::LogSpectrum& l, double gamma);
double e_gamma_spectrum_ln(const probkit::LogSpectrum& l, double ln_gamma);

double beta_alpha_spectrum(const probkit::LogSpectrum& l, double alpha);
double log_beta_alpha_spectrum(const probkit::LogSpectrum& l, double alpha);

}  // namespace wtb::metrics
