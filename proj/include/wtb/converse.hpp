#pragma once

#include "wtb/achievability.hpp"
#include "wtb/bound_point.hpp"
#include "wtb/channels.hpp"

#include <functional>
#include <span>
#include <vector>

namespace wtb::converse {

using achievability::WiretapScenario;
using channels::DMWiretap;
using channels::GaussianWiretap;
using metrics::FiniteDist;
using probkit::LogSpectrum;

// Channel code for the legitimate link partitioned into message cells, with a
// stochastic in-cell encoder.
struct PartitionCode {
  std::vector<int> letters;  // codeword -> input letter
  std::vector<int> cell;     // codeword -> message, 0-based
  Eigen::MatrixXd encoder;   // M x N, row m supported on cell m

  int size() const { return static_cast<int>(letters.size()); }
  int message_count() const { return static_cast<int>(encoder.rows()); }
  bool uniform_partition(double tol = 1e-12) const;
  void validate() const;

  // equal-weight encoder on each cell
  static PartitionCode uniform(std::vector<int> letters, std::vector<int> cell);
};

// --- exact joint laws induced by a tiny code (single-letter enumeration) ---
// Codebooks are multisets, so codeword-level laws live on the index space;
// collapsing repeated letters would understate the secrecy-side beta.
Eigen::MatrixXd wz_joint(const PartitionCode& c, const DMWiretap& ch);       // M x |Z|
Eigen::MatrixXd wy_joint(const PartitionCode& c, const DMWiretap& ch);       // M x |Y|
Eigen::MatrixXd cw_z_joint(const PartitionCode& c, const DMWiretap& ch);     // N x |Z|
Eigen::MatrixXd cw_y_joint(const PartitionCode& c, const DMWiretap& ch);     // N x |Y|
ArrayXd codeword_marginal(const PartitionCode& c);  // P_X over codeword index
// exact smallest error probability of the legitimate link (MAP decoding of W)
double map_error_w(const PartitionCode& c, const DMWiretap& ch);
// exact smallest codeword-level error probability (MAP decoding of X)
double map_error_codeword(const PartitionCode& c, const DMWiretap& ch);

struct ConvOptions {
  int tau_grid = 64;
  std::size_t max_bins = std::size_t{1} << 20;
  double rate_cap_bits = 16.0;
};

// Hypothesis-testing converse: log M <= inf_tau log((tau+delta)/tau) - log
// beta_{1-eps-delta-tau}, with the conditional reference Q_{Y|Z}. Gaussian
// scenarios evaluate beta exactly from the quadratic-form law; DMC scenarios
// lower-bound beta from the worst-type product kernel plus the type-counting
// penalty.
BoundPoint thm3_rate(long n, double eps, double delta, const WiretapScenario& sc,
                     const ConvOptions& opt = {});

// Comparison bound with objective log(1/tau^2) - log beta on the same test.
BoundPoint hayashi_rate(long n, double eps, double delta, const WiretapScenario& sc,
                        const ConvOptions& opt = {});

// --- exact small-scale converses, used as soundness oracles ---

// Meta-converse over (W, output) pairs for a given encoder; no optimization
// over encoders. Returns the upper bound on M.
double thm2_smallscale(const PartitionCode& code, const DMWiretap& ch,
                       const FiniteDist& q_y, double eps, double delta,
                       double tau);

// E_{N/M}(P_XZ, P_X^unif Q_Z): every (M,eps,delta) partition code leaks at
// least this much against Q_Z.
double lemma4_leakage_lb(const PartitionCode& code, const DMWiretap& ch,
                         const FiniteDist& q_z);

// d(P_{Y|C}, Q_Y) >= E_N(P^unif P_{Y|X}, P^unif Q_Y) for a codebook of size N.
double resolvability_lb(std::span<const int> codebook_letters,
                        const Eigen::MatrixXd& legit_kernel,
                        const FiniteDist& q_y);

// Partition-code converse: beta ratio minimized over tau grid and reference
// outputs (induced output plus extras). Returns the upper bound on M.
double thm4_smallscale(const PartitionCode& code, const DMWiretap& ch,
                       double eps, double delta,
                       std::span<const FiniteDist> qy_extra = {});

// List-decoding leakage lower bound 1 - eps_ld - L/M for a given decoder
// (codeword indices per eavesdropper letter).
struct ListDecodeBound {
  double eps_ld;
  long max_list;
  double bound;
};
ListDecodeBound thm5_list_lb(const PartitionCode& code, const DMWiretap& ch,
                             const std::function<std::vector<int>(Index)>& decoder);

// --- internals exposed for tests and the curve driver ---

class GaussConverseEvaluator {
 public:
  GaussConverseEvaluator(const GaussianWiretap& g, long n);
  double log_beta(double alpha) const;
  const channels::QuadFormLLR& llr() const { return llr_; }
  const probkit::DensityGrid& density() const { return density_; }

 private:
  channels::QuadFormLLR llr_;
  probkit::DensityGrid density_;
};

class DmcConverseEvaluator {
 public:
  DmcConverseEvaluator(const DMWiretap& ch, long n, double alpha_hint,
                       const ConvOptions& opt = {});
  // evaluator pinned to one composition (test hook for the worst-type search)
  DmcConverseEvaluator(const DMWiretap& ch, long n, const ArrayXd& type,
                       const ConvOptions& opt);
  // valid for every code; u-scan of e^{-u-penalty}(alpha - P[S >= u])
  double log_beta_lb(double alpha, bool with_penalty = true) const;
  const LogSpectrum& spectrum() const { return spec_; }
  const ArrayXd& worst_type() const { return type_; }

 private:
  LogSpectrum spec_;
  ArrayXd type_;
  double penalty_;
};

}  // namespace wtb::converse
