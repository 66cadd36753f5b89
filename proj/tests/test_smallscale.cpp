#include "wtb/smallscale.hpp"

#include "wtb/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace wtb;
using namespace wtb::smallscale;
using metrics::FiniteDist;

namespace {

DMWiretap noiseless_z_channel(int nx) {
  // Z = X exactly; Y is an independent coin
  std::vector<Eigen::MatrixXd> joint;
  for (int x = 0; x < nx; ++x) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, nx);
    m(0, x) = 0.5;
    m(1, x) = 0.5;
    joint.push_back(m);
  }
  return DMWiretap(nx, 2, nx, joint);
}

DMWiretap constant_z_channel() {
  std::vector<Eigen::MatrixXd> joint;
  for (int x = 0; x < 2; ++x) {
    Eigen::MatrixXd m(2, 2);
    m << (x == 0 ? 0.9 : 0.1), 0.0, (x == 0 ? 0.1 : 0.9), 0.0;
    joint.push_back(m);
  }
  return DMWiretap(2, 2, 2, joint);
}

}  // namespace

TEST_SUITE("smallscale") {

TEST_CASE("balanced partition counts") {
  CHECK(count_balanced_partitions(4, 2) == 3);
  CHECK(count_balanced_partitions(6, 3) == 15);
  CHECK(count_balanced_partitions(12, 3) == 5775);
}

TEST_CASE("min_partition_leakage vanishes for an uninformative eavesdropper") {
  TinyInstance t{constant_z_channel(), {0, 1, 0, 1}, 2};
  CHECK(min_partition_leakage(t) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exhaustive leakage of the identity eavesdropper") {
  // M = N singleton cells over a noiseless Z: hand-computed 1 - 1/M
  const int m = 4;
  const auto ch = noiseless_z_channel(m);
  std::vector<int> letters, cells;
  for (int i = 0; i < m; ++i) {
    letters.push_back(i);
    cells.push_back(i);
  }
  const auto code = converse::PartitionCode::uniform(letters, cells);
  CHECK(exhaustive_leakage(code, ch) ==
        doctest::Approx(1.0 - 1.0 / m).epsilon(1e-12));
}

TEST_CASE("sandwich: lemma4 <= exhaustive minimum <= lemma1 on a BSC eavesdropper") {
  // degraded BSC pair as the channel, fixed codebook
  std::vector<Eigen::MatrixXd> joint;
  const double p1 = 0.1, pd = 0.2;
  for (int x = 0; x < 2; ++x) {
    Eigen::MatrixXd m(2, 2);
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        m(y, z) = (y == x ? 1 - p1 : p1) * (z == y ? 1 - pd : pd);
    joint.push_back(m);
  }
  TinyInstance t{DMWiretap(2, 2, 2, joint), {0, 0, 1, 1, 0, 1}, 3};
  const double mid = min_partition_leakage(t);

  ArrayXd pz = ArrayXd::Zero(2);
  for (int cw : t.codebook)
    pz += t.channel.eaves().row(cw).transpose().array() / t.size();
  const FiniteDist qz{pz};

  double lemma1_best = kInf;
  for (int gi = 0; gi < 64; ++gi)
    lemma1_best =
        std::min(lemma1_best, lemma1_delta_exact(t, qz, std::exp(-3.0 + 6.0 * gi / 63.0)));
  CHECK(mid <= lemma1_best + 1e-12);

  // the lower bound holds for every partition code, in particular the best one
  double lemma4_max = -kInf;
  std::vector<int> cell(6, -1);
  // scan a few explicit partitions
  const std::vector<std::vector<int>> parts = {
      {0, 0, 1, 1, 2, 2}, {0, 1, 2, 0, 1, 2}, {0, 1, 1, 2, 2, 0}};
  for (const auto& c : parts) {
    const auto code = converse::PartitionCode::uniform(t.codebook, c);
    const Eigen::MatrixXd xz = converse::cw_z_joint(code, t.channel);
    const FiniteDist pzc{xz.colwise().sum().transpose().array()};
    const double lb = converse::lemma4_leakage_lb(code, t.channel, pzc);
    CHECK(exhaustive_leakage(code, t.channel) >= lb - 1e-12);
    lemma4_max = std::max(lemma4_max, lb);
  }
  CHECK(lemma4_max <= lemma1_best + 1e-12);
}

TEST_CASE("brute_beta trivial values and oracle agreement") {
  Rng rng(61);
  ArrayXd pv(4);
  pv << 0.4, 0.3, 0.2, 0.1;
  const FiniteDist p{pv};
  CHECK(brute_beta(p, p, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (double al : {0.15, 0.5, 0.85})
    CHECK(brute_beta(p, p, al) == doctest::Approx(al).epsilon(1e-13));

  for (int t = 0; t < 1000; ++t) {
    const Index n = 2 + static_cast<Index>(rng.next_u64() % 7);
    ArrayXd a(n), b(n);
    for (Index i = 0; i < n; ++i) {
      a[i] = -std::log(rng.uniform_pos());
      b[i] = -std::log(rng.uniform_pos());
    }
    const FiniteDist pp{a / a.sum()}, qq{b / b.sum()};
    const double al = rng.uniform();
    CHECK(std::fabs(metrics::beta_alpha(pp, qq, al) - brute_beta(pp, qq, al)) <=
          1e-12);
  }
}

TEST_CASE("exhaustive list decoder extreme list sizes") {
  const auto ch = noiseless_z_channel(2);
  TinyInstance t{ch, {0, 1, 0, 1}, 2};
  Rng rng(5);
  const auto code = random_partition_code(t, rng, true);
  const auto full = exhaustive_list_decoder(code, ch, 4);
  CHECK(full.eps_ld == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(full.bound == doctest::Approx(1.0 - 4.0 / 2.0).epsilon(1e-12));
  const auto empty = exhaustive_list_decoder(code, ch, 0);
  CHECK(empty.eps_ld == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(empty.bound == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(exhaustive_list_decoder(code, ch, 5), std::invalid_argument);
}

TEST_CASE("existence witness: a constructed code meets both certified terms") {
  // the amplification bound promises a good partition of any channel code;
  // exhibit it explicitly on tiny instances
  Rng rng(91);
  for (int it = 0; it < 20; ++it) {
    const auto t = random_instance(rng, 8);
    const auto& ch = t.channel;
    const auto [leak, cells] = min_partition_leakage_witness(t);
    const auto code = converse::PartitionCode::uniform(t.codebook, cells);
    CHECK(code.uniform_partition());

    // secrecy side: the constructed code stays within the certified bound
    ArrayXd pz = ArrayXd::Zero(ch.nz());
    for (int cw : t.codebook)
      pz += ch.eaves().row(cw).transpose().array() / t.size();
    const FiniteDist qz{pz};
    double bound = kInf;
    for (int gi = 0; gi < 48; ++gi)
      bound = std::min(bound,
                       lemma1_delta_exact(t, qz, std::exp(-4.0 + 8.0 * gi / 47.0)));
    CHECK(exhaustive_leakage(code, ch) == doctest::Approx(leak).epsilon(1e-12));
    CHECK(leak <= bound + 1e-12);

    // reliability side: decoding W through the partition never beats decoding
    // the codeword, and the partition never hurts the message error
    CHECK(converse::map_error_w(code, ch) <=
          converse::map_error_codeword(code, ch) + 1e-12);
  }
}

TEST_CASE("certification corpus passes clean") {
  const auto rep = run_certifications(12345, 10);
  for (const auto& f : rep.families) {
    INFO(f.family);
    CHECK(f.violations == 0);
    CHECK(f.checks > 0);
  }
  CHECK(rep.pass());
}

}  // TEST_SUITE
