#include "wtb/smallscale.hpp"

#include "wtb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wtb::smallscale {

namespace {

Eigen::MatrixXd random_kernel(Rng& rng, Index rows, Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    double s = 0.0;
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = -std::log(rng.uniform_pos());
      s += m(i, j);
    }
    m.row(i) /= s;
  }
  return m;
}

}  // namespace

TinyInstance random_instance(Rng& rng, int max_codebook) {
  const Index nx = 2 + static_cast<Index>(rng.next_u64() % 3);  // 2..4
  const Index ny = 2 + static_cast<Index>(rng.next_u64() % 3);
  const Index nz = 2 + static_cast<Index>(rng.next_u64() % 3);
  std::vector<Eigen::MatrixXd> joint;
  for (Index x = 0; x < nx; ++x) {
    Eigen::MatrixXd j = random_kernel(rng, 1, ny * nz);
    Eigen::MatrixXd m(ny, nz);
    for (Index y = 0; y < ny; ++y)
      for (Index z = 0; z < nz; ++z) m(y, z) = j(0, y * nz + z);
    joint.push_back(m);
  }
  static const std::pair<int, int> shapes[] = {{4, 2}, {6, 2}, {6, 3}, {8, 2},
                                               {8, 4}, {9, 3}, {12, 3}, {12, 4}};
  std::pair<int, int> pick;
  do {
    pick = shapes[rng.next_u64() % std::size(shapes)];
  } while (pick.first > max_codebook);
  TinyInstance t{DMWiretap(nx, ny, nz, std::move(joint)), {}, pick.second};
  t.codebook.resize(static_cast<std::size_t>(pick.first));
  for (auto& c : t.codebook) c = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(nx));
  return t;
}

PartitionCode random_partition_code(const TinyInstance& t, Rng& rng,
                                    bool uniform_encoder) {
  const int n = t.size(), m = t.message_count;
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[rng.next_u64() % static_cast<std::uint64_t>(i + 1)]);
  std::vector<int> cell(static_cast<std::size_t>(n));
  const int k = n / m;
  for (int i = 0; i < n; ++i) cell[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = i / k;
  auto pc = PartitionCode::uniform(t.codebook, cell);
  if (!uniform_encoder) {
    for (int w = 0; w < m; ++w) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) {
        if (cell[static_cast<std::size_t>(c)] != w) continue;
        pc.encoder(w, c) = -std::log(rng.uniform_pos());
        s += pc.encoder(w, c);
      }
      for (int c = 0; c < n; ++c)
        if (cell[static_cast<std::size_t>(c)] == w) pc.encoder(w, c) /= s;
    }
    pc.validate();
  }
  return pc;
}

double exhaustive_leakage(const PartitionCode& code, const DMWiretap& ch) {
  const Eigen::MatrixXd wz = converse::wz_joint(code, ch);
  const ArrayXd pz = wz.colwise().sum().transpose().array();
  const int m = code.message_count();
  double acc = 0.0;
  for (Index w = 0; w < m; ++w)
    for (Index z = 0; z < ch.nz(); ++z)
      acc += std::fabs(wz(w, z) - pz[z] / m);
  return 0.5 * acc;
}

double exhaustive_leakage_vs(const PartitionCode& code, const DMWiretap& ch,
                             const FiniteDist& q_z) {
  const Eigen::MatrixXd wz = converse::wz_joint(code, ch);
  const int m = code.message_count();
  double acc = 0.0;
  for (Index w = 0; w < m; ++w)
    for (Index z = 0; z < ch.nz(); ++z)
      acc += std::fabs(wz(w, z) - q_z[z] / m);
  return 0.5 * acc;
}

namespace {

// enumerate balanced partitions of {0..n-1} into m cells of size k = n/m;
// the first free element always opens the next cell, which kills permutations
// of equal-size cells
template <typename Visit>
void enum_partitions(int n, int m, std::vector<int>& cell, int assigned,
                     std::vector<int>& cell_fill, Visit&& visit) {
  if (assigned == n) {
    visit(cell);
    return;
  }
  const int k = n / m;
  int first = 0;
  while (cell[static_cast<std::size_t>(first)] >= 0) ++first;
  int opened = 0;
  for (int w = 0; w < m; ++w)
    if (cell_fill[static_cast<std::size_t>(w)] > 0) opened = w + 1;
  // place `first` into any partially filled cell or the next empty one
  for (int w = 0; w <= std::min(opened, m - 1); ++w) {
    if (cell_fill[static_cast<std::size_t>(w)] >= k) continue;
    cell[static_cast<std::size_t>(first)] = w;
    ++cell_fill[static_cast<std::size_t>(w)];
    enum_partitions(n, m, cell, assigned + 1, cell_fill, visit);
    --cell_fill[static_cast<std::size_t>(w)];
    cell[static_cast<std::size_t>(first)] = -1;
  }
}

}  // namespace

long count_balanced_partitions(int n, int m) {
  require(m >= 1 && n % m == 0, "count_balanced_partitions: M must divide N");
  long count = 0;
  std::vector<int> cell(static_cast<std::size_t>(n), -1);
  std::vector<int> fill(static_cast<std::size_t>(m), 0);
  enum_partitions(n, m, cell, 0, fill, [&](const std::vector<int>&) { ++count; });
  return count;
}

std::pair<double, std::vector<int>> min_partition_leakage_witness(
    const TinyInstance& t) {
  const int n = t.size(), m = t.message_count;
  require(m >= 1 && n % m == 0, "min_partition_leakage: M must divide N");
  double best = kInf;
  std::vector<int> best_cell;
  std::vector<int> cell(static_cast<std::size_t>(n), -1);
  std::vector<int> fill(static_cast<std::size_t>(m), 0);
  enum_partitions(n, m, cell, 0, fill, [&](const std::vector<int>& c) {
    const auto pc = PartitionCode::uniform(t.codebook, c);
    const double leak = exhaustive_leakage(pc, t.channel);
    if (leak < best) {
      best = leak;
      best_cell = c;
    }
  });
  return {best, best_cell};
}

double min_partition_leakage(const TinyInstance& t) {
  return min_partition_leakage_witness(t).first;
}

double brute_beta(const FiniteDist& p, const FiniteDist& q, double alpha) {
  require(p.size() == q.size(), "brute_beta: mismatched supports");
  require(p.size() <= 20, "brute_beta: support too large for enumeration");
  require(alpha >= 0.0 && alpha <= 1.0 + 1e-12, "brute_beta: alpha in [0,1]");
  alpha = std::min(alpha, 1.0);
  if (alpha <= 0.0) return 0.0;
  const Index n = p.size();
  const std::uint64_t lim = std::uint64_t{1} << n;
  double best = kInf;
  for (std::uint64_t mask = 0; mask < lim; ++mask) {
    double ps = 0.0, qs = 0.0;
    for (Index i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) {
        ps += p[i];
        qs += q[i];
      }
    if (ps >= alpha - 1e-15) best = std::min(best, qs);
    // fractional completion by one atom outside the set
    for (Index j = 0; j < n; ++j) {
      if (mask & (std::uint64_t{1} << j)) continue;
      if (p[j] <= 0.0) continue;
      const double need = alpha - ps;
      if (need <= 0.0 || need > p[j] + 1e-15) continue;
      const double theta = std::clamp(need / p[j], 0.0, 1.0);
      best = std::min(best, qs + theta * q[j]);
    }
  }
  return best;
}

ListDecodeResult exhaustive_list_decoder(const PartitionCode& code,
                                         const DMWiretap& ch, long list_size) {
  require(list_size >= 0 && list_size <= code.size(),
          "exhaustive_list_decoder: list size in [0, N]");
  const ArrayXd pc = converse::codeword_marginal(code);
  const int n = code.size(), m = code.message_count();
  double correct = 0.0;
  for (Index z = 0; z < ch.nz(); ++z) {
    std::vector<std::pair<double, int>> post;
    for (int cw = 0; cw < n; ++cw)
      post.push_back(
          {pc[cw] * ch.eaves()(code.letters[static_cast<std::size_t>(cw)], z), cw});
    std::stable_sort(post.begin(), post.end(), [](const auto& a, const auto& b) {
      return a.first > b.first;  // ties keep index order
    });
    for (long i = 0; i < list_size; ++i)
      correct += post[static_cast<std::size_t>(i)].first;
  }
  const double eps_ld = 1.0 - correct;
  return {eps_ld,
          1.0 - eps_ld - static_cast<double>(list_size) / static_cast<double>(m)};
}

double lemma1_delta_exact(const TinyInstance& t, const FiniteDist& q_z,
                          double gamma) {
  require(gamma > 0.0, "lemma1_delta_exact: gamma > 0");
  const int n = t.size();
  const auto& ch = t.channel;
  // P_XZ with X uniform over the codebook (codeword level)
  double e_gamma_term = 0.0;
  double expect = 0.0;
  const double lg = std::log(gamma);
  for (int cw = 0; cw < n; ++cw) {
    const int x = t.codebook[static_cast<std::size_t>(cw)];
    for (Index z = 0; z < ch.nz(); ++z) {
      const double pz = ch.eaves()(x, z);
      if (pz <= 0.0) continue;
      const double mass = pz / n;
      if (q_z[z] <= 0.0) {
        e_gamma_term += mass;  // info density +inf: above every threshold
        continue;
      }
      const double i_xz = std::log(pz) - std::log(q_z[z]);
      e_gamma_term += std::max(0.0, mass - gamma * (q_z[z] / n));
      expect += mass * std::exp(-std::fabs(i_xz - lg));
    }
  }
  const int m = t.message_count;
  const double k = static_cast<double>(n) / m;
  return std::min(1.0, e_gamma_term + 0.5 * std::sqrt(gamma / k * expect));
}

namespace {

void record(FamilyReport& f, double margin) {
  ++f.checks;
  f.worst_margin = std::min(f.worst_margin, margin);
  if (margin < -1e-9) ++f.violations;
}

}  // namespace

VerifyReport run_certifications(std::uint64_t seed, long count) {
  require(count >= 1, "run_certifications: count >= 1");
  VerifyReport rep;
  rep.families = {FamilyReport{"lemma1"},       FamilyReport{"lemma4"},
                  FamilyReport{"thm2"},         FamilyReport{"thm4"},
                  FamilyReport{"thm5"},         FamilyReport{"resolvability"},
                  FamilyReport{"beta_oracle"}};
  auto& lemma1 = rep.families[0];
  auto& lemma4 = rep.families[1];
  auto& thm2 = rep.families[2];
  auto& thm4 = rep.families[3];
  auto& thm5 = rep.families[4];
  auto& resolv = rep.families[5];
  auto& betao = rep.families[6];

  for (long it = 0; it < count; ++it) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(it), "corpus"));
    const auto t = random_instance(rng);
    const auto& ch = t.channel;

    // Lemma 1: the best balanced partition beats the bound for every gamma/Q_Z
    {
      ++lemma1.instances;
      const double min_leak = min_partition_leakage(t);
      ArrayXd pz = ArrayXd::Zero(ch.nz());
      for (int cw : t.codebook)
        pz += ch.eaves().row(cw).transpose().array() / t.size();
      const FiniteDist induced{pz};
      const FiniteDist unif = FiniteDist::uniform(ch.nz());
      for (const auto& qz : {induced, unif})
        for (int gi = 0; gi < 32; ++gi) {
          const double gamma = std::exp(-4.0 + 9.0 * gi / 31.0);
          record(lemma1, lemma1_delta_exact(t, qz, gamma) - min_leak);
        }
    }

    const auto code_u = random_partition_code(t, rng, /*uniform_encoder=*/true);
    const auto code_s = random_partition_code(t, rng, /*uniform_encoder=*/false);

    // Lemma 4 with Q_Z = code-induced P_Z
    for (const auto& code : {code_u, code_s}) {
      ++lemma4.instances;
      const Eigen::MatrixXd xz = converse::cw_z_joint(code, ch);
      const FiniteDist pz{xz.colwise().sum().transpose().array()};
      const double lhs = exhaustive_leakage(code, ch);
      const double rhs = converse::lemma4_leakage_lb(code, ch, pz);
      record(lemma4, lhs - rhs);
    }

    // meta-converse soundness: every M-bound must admit the actual code;
    // thm2 works at the message level, thm4 at the codeword level
    for (const auto& code : {code_u, code_s}) {
      const double delta = exhaustive_leakage(code, ch);
      const double eps_w = converse::map_error_w(code, ch);
      const double eps_cw = converse::map_error_codeword(code, ch);
      const double m = code.message_count();
      if (eps_w + delta < 0.999) {
        ++thm2.instances;
        const Eigen::MatrixXd wy = converse::wy_joint(code, ch);
        const FiniteDist qy{wy.colwise().sum().transpose().array()};
        for (double tau : {0.1 * (1.0 - delta), 0.5 * (1.0 - delta)})
          record(thm2, converse::thm2_smallscale(code, ch, qy, eps_w, delta, tau) - m);
      }
      if (eps_cw + delta < 0.999) {
        ++thm4.instances;
        record(thm4, converse::thm4_smallscale(code, ch, eps_cw, delta) - m);
      }
    }

    // list decoding: leakage against every Q_Z dominates the list bound
    {
      ++thm5.instances;
      const auto& code = code_u;
      const Eigen::MatrixXd wz = converse::wz_joint(code, ch);
      const FiniteDist pz{wz.colwise().sum().transpose().array()};
      std::vector<FiniteDist> qzs = {pz, FiniteDist::uniform(ch.nz())};
      for (int r = 0; r < 3; ++r) {
        ArrayXd q(ch.nz());
        for (Index z = 0; z < ch.nz(); ++z) q[z] = -std::log(rng.uniform_pos());
        qzs.push_back(FiniteDist{q / q.sum()});
      }
      for (long l = 0; l <= std::min<long>(code.size(), 4); ++l) {
        const auto res = exhaustive_list_decoder(code, ch, l);
        for (const auto& qz : qzs)
          record(thm5, exhaustive_leakage_vs(code, ch, qz) - res.bound);
      }
    }

    // resolvability corollary on the raw codebook
    {
      ++resolv.instances;
      ArrayXd py = ArrayXd::Zero(ch.ny());
      for (int cw : t.codebook)
        py += ch.legit().row(cw).transpose().array() / t.size();
      std::vector<FiniteDist> qys = {FiniteDist{py}, FiniteDist::uniform(ch.ny())};
      ArrayXd q(ch.ny());
      for (Index y = 0; y < ch.ny(); ++y) q[y] = -std::log(rng.uniform_pos());
      qys.push_back(FiniteDist{q / q.sum()});
      for (const auto& qy : qys) {
        const double lhs = 0.5 * (py - qy.p).abs().sum();  // d(P_{Y|C}, Q_Y)
        const double rhs = converse::resolvability_lb(t.codebook, ch.legit(), qy);
        record(resolv, lhs - rhs);
      }
    }

    // mutual certification of the two Neyman-Pearson routes
    {
      ++betao.instances;
      const Index sup = 3 + static_cast<Index>(rng.next_u64() % 6);
      ArrayXd pa(sup), qa(sup);
      for (Index i = 0; i < sup; ++i) {
        pa[i] = -std::log(rng.uniform_pos());
        qa[i] = -std::log(rng.uniform_pos());
      }
      const FiniteDist p{pa / pa.sum()}, q{qa / qa.sum()};
      for (double alpha : {0.05, 0.3, 0.8, 0.99}) {
        const double exact = metrics::beta_alpha(p, q, alpha);
        const double brute = brute_beta(p, q, alpha);
        record(betao, 1e-12 - std::fabs(exact - brute) + 1e-12);
      }
    }
  }
  return rep;
}

}  // namespace wtb::smallscale
