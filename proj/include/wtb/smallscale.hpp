#pragma once

#include "wtb/converse.hpp"
#include "wtb/rng.hpp"

#include <optional>

namespace wtb::smallscale {

using channels::DMWiretap;
using converse::PartitionCode;
using metrics::FiniteDist;

// Fully enumerable wiretap instance: a codebook of at most a dozen letters,
// small output alphabets, and a message count dividing the codebook size.
struct TinyInstance {
  DMWiretap channel;
  std::vector<int> codebook;  // input letters, size N
  int message_count;          // M | N

  int size() const { return static_cast<int>(codebook.size()); }
};

TinyInstance random_instance(Rng& rng, int max_codebook = 12);

// random partition code on an instance (balanced cells; optionally a random
// stochastic in-cell encoder instead of the uniform one)
PartitionCode random_partition_code(const TinyInstance& t, Rng& rng,
                                    bool uniform_encoder);

// Exact total-variation leakage d(P_WZ, P_W P_Z) of a partition code.
double exhaustive_leakage(const PartitionCode& code, const DMWiretap& ch);
// same against an arbitrary reference Q_Z
double exhaustive_leakage_vs(const PartitionCode& code, const DMWiretap& ch,
                             const FiniteDist& q_z);

// Minimum leakage over all balanced partitions of the codebook into M cells
// with uniform in-cell encoders. Enumerates every partition.
double min_partition_leakage(const TinyInstance& t);
// same search, also returning the minimizing cell assignment
std::pair<double, std::vector<int>> min_partition_leakage_witness(const TinyInstance& t);
long count_balanced_partitions(int n, int m);

// Exact Neyman-Pearson optimum by enumerating deterministic test sets plus
// one fractional atom (the vertex structure of the underlying LP).
// Independent oracle for metrics::beta_alpha; supports of size <= 20.
double brute_beta(const FiniteDist& p, const FiniteDist& q, double alpha);

// Exhaustive list decoder: the L a-posteriori-most-likely codewords for each
// eavesdropper letter, ties broken by codeword index.
struct ListDecodeResult {
  double eps_ld;
  double bound;  // 1 - eps_ld - L/M
};
ListDecodeResult exhaustive_list_decoder(const PartitionCode& code,
                                         const DMWiretap& ch, long list_size);

// Exact Lemma-1 right-hand side for a tiny codebook: E_gamma term plus the
// amplification term, both by direct enumeration.
double lemma1_delta_exact(const TinyInstance& t, const FiniteDist& q_z,
                          double gamma);

// --- certification corpus -------------------------------------------------

struct FamilyReport {
  std::string family;
  long instances = 0;
  long checks = 0;
  long violations = 0;
  double worst_margin = kInf;  // smallest slack observed (>= 0 means sound)
};

struct VerifyReport {
  std::vector<FamilyReport> families;
  bool pass() const {
    for (const auto& f : families)
      if (f.violations > 0) return false;
    return true;
  }
};

// Runs every certification family on `count` random instances.
VerifyReport run_certifications(std::uint64_t seed, long count);

}  // namespace wtb::smallscale
