#pragma once

#include "wtb/channels.hpp"

#include <optional>
#include <string>

namespace wtb::asymptotics {

using channels::DMWiretap;
using channels::GaussianWiretap;
using metrics::FiniteDist;

// secrecy capacity and dispersion constants, natural-log units
struct SecondOrderTerms {
  double cs = 0.0;    // nats / channel use
  double cs_u = 0.0;  // converse capacity term
  double v1 = 0.0;    // nats^2: reliability dispersion
  double v2 = 0.0;    // secrecy dispersion
  double vc = 0.0;    // converse dispersion
};

struct ChannelInfo {
  double mi;   // I(X;Y), nats
  double var;  // V(P_X, P_{Y|X}), nats^2
};

// mutual information and conditional information variance for one marginal
// kernel (rows are inputs)
ChannelInfo channel_info(const FiniteDist& px, const Eigen::MatrixXd& w);

struct DmcInfo {
  double mi;        // I(X;Y)
  double var;       // V(P_X, P_{Y|X})
  double mi_cond;   // I(X;Y|Z)
  double var_cond;  // V~(P_X, P_{YZ|X})
};
DmcInfo dmc_info_quantities(const FiniteDist& px, const DMWiretap& ch);

struct SecondOrderResult {
  double r_ach = 0.0;   // nats per use, O-terms dropped
  double r_conv = 0.0;
  SecondOrderTerms terms;
  FiniteDist input_ach;   // maximizer of I(X;Y) - I(X;Z)
  FiniteDist input_conv;  // maximizer of I(X;Y|Z)
  std::vector<std::string> warnings;
};

struct DmcSecondOrderOptions {
  bool assume_degraded = false;  // skip the degradedness fit
  int grid_points = 10000;       // binary-input exhaustive grid
  int multistarts = 20;          // ternary-input ascent restarts
};

// Second-order expansions for a DM wiretap channel. Refuses channels that
// fail the degradedness fit (the auxiliary-variable reduction V = X would be
// unjustified) and channels without a unique capacity-achieving input.
SecondOrderResult dmc_second_order(const DMWiretap& ch, long n, double eps,
                                   double delta,
                                   const DmcSecondOrderOptions& opt = {});

// Closed forms for the Gaussian wiretap channel.
SecondOrderResult gauss_second_order(const GaussianWiretap& g, long n, double eps,
                                     double delta);
SecondOrderTerms gauss_terms(const GaussianWiretap& g);

// Least-squares degradedness check: is there a row-stochastic D with
// P_{Z|X} = P_{Y|X} D? Returns the residual (Frobenius).
double degradedness_residual(const DMWiretap& ch);

}  // namespace wtb::asymptotics
