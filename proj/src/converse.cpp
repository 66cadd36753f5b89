#include "wtb/converse.hpp"

#include "wtb/metrics.hpp"
#include "wtb/special.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <memory>

namespace wtb::converse {

namespace {

constexpr double kGolden = 0.6180339887498949;

template <typename F>
double golden_min(F&& f, double a, double b, int iters = 48) {
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

FiniteDist flatten(const Eigen::MatrixXd& m) {
  ArrayXd v(m.size());
  Index k = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v[k++] = m(i, j);
  return FiniteDist{v};
}

FiniteDist product_dist(const ArrayXd& a, const ArrayXd& b) {
  ArrayXd v(a.size() * b.size());
  Index k = 0;
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < b.size(); ++j) v[k++] = a[i] * b[j];
  return FiniteDist{v};
}

}  // namespace

bool PartitionCode::uniform_partition(double tol) const {
  const int m = message_count();
  std::vector<int> sizes(static_cast<std::size_t>(m), 0);
  for (int c : cell) ++sizes[static_cast<std::size_t>(c)];
  for (int s : sizes)
    if (s != sizes[0]) return false;
  for (Index w = 0; w < encoder.rows(); ++w)
    for (Index c = 0; c < encoder.cols(); ++c) {
      if (cell[static_cast<std::size_t>(c)] != w) continue;
      if (std::fabs(encoder(w, c) - 1.0 / sizes[0]) > tol) return false;
    }
  return true;
}

void PartitionCode::validate() const {
  const int n = size();
  const int m = message_count();
  require(n >= 1 && m >= 1 && static_cast<int>(cell.size()) == n,
          "PartitionCode: shape");
  require(encoder.cols() == n, "PartitionCode: encoder shape");
  for (Index w = 0; w < m; ++w) {
    double s = 0.0;
    for (Index c = 0; c < n; ++c) {
      require(encoder(w, c) >= -1e-15, "PartitionCode: negative encoder mass");
      if (cell[static_cast<std::size_t>(c)] != w)
        require(encoder(w, c) == 0.0, "PartitionCode: encoder leaves its cell");
      s += encoder(w, c);
    }
    require(std::fabs(s - 1.0) <= 1e-12, "PartitionCode: encoder row sum");
  }
}

PartitionCode PartitionCode::uniform(std::vector<int> letters, std::vector<int> cell) {
  PartitionCode pc;
  pc.letters = std::move(letters);
  pc.cell = std::move(cell);
  const int n = pc.size();
  const int m = 1 + *std::max_element(pc.cell.begin(), pc.cell.end());
  std::vector<int> sizes(static_cast<std::size_t>(m), 0);
  for (int c : pc.cell) ++sizes[static_cast<std::size_t>(c)];
  pc.encoder = Eigen::MatrixXd::Zero(m, n);
  for (int c = 0; c < n; ++c) {
    const int w = pc.cell[static_cast<std::size_t>(c)];
    pc.encoder(w, c) = 1.0 / sizes[static_cast<std::size_t>(w)];
  }
  pc.validate();
  return pc;
}

Eigen::MatrixXd wz_joint(const PartitionCode& c, const DMWiretap& ch) {
  const int m = c.message_count();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, ch.nz());
  for (int w = 0; w < m; ++w)
    for (int cw = 0; cw < c.size(); ++cw) {
      const double pw = c.encoder(w, cw) / m;
      if (pw <= 0.0) continue;
      out.row(w) += pw * ch.eaves().row(c.letters[static_cast<std::size_t>(cw)]);
    }
  return out;
}

Eigen::MatrixXd wy_joint(const PartitionCode& c, const DMWiretap& ch) {
  const int m = c.message_count();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, ch.ny());
  for (int w = 0; w < m; ++w)
    for (int cw = 0; cw < c.size(); ++cw) {
      const double pw = c.encoder(w, cw) / m;
      if (pw <= 0.0) continue;
      out.row(w) += pw * ch.legit().row(c.letters[static_cast<std::size_t>(cw)]);
    }
  return out;
}

ArrayXd codeword_marginal(const PartitionCode& c) {
  ArrayXd p = ArrayXd::Zero(c.size());
  const int m = c.message_count();
  for (int w = 0; w < m; ++w)
    for (int cw = 0; cw < c.size(); ++cw) p[cw] += c.encoder(w, cw) / m;
  return p;
}

Eigen::MatrixXd cw_z_joint(const PartitionCode& c, const DMWiretap& ch) {
  const ArrayXd pc = codeword_marginal(c);
  Eigen::MatrixXd out(c.size(), ch.nz());
  for (int cw = 0; cw < c.size(); ++cw)
    out.row(cw) = pc[cw] * ch.eaves().row(c.letters[static_cast<std::size_t>(cw)]);
  return out;
}

Eigen::MatrixXd cw_y_joint(const PartitionCode& c, const DMWiretap& ch) {
  const ArrayXd pc = codeword_marginal(c);
  Eigen::MatrixXd out(c.size(), ch.ny());
  for (int cw = 0; cw < c.size(); ++cw)
    out.row(cw) = pc[cw] * ch.legit().row(c.letters[static_cast<std::size_t>(cw)]);
  return out;
}

double map_error_w(const PartitionCode& c, const DMWiretap& ch) {
  const Eigen::MatrixXd wy = wy_joint(c, ch);
  double correct = 0.0;
  for (Index y = 0; y < wy.cols(); ++y) correct += wy.col(y).maxCoeff();
  return 1.0 - correct;
}

double map_error_codeword(const PartitionCode& c, const DMWiretap& ch) {
  const ArrayXd pc = codeword_marginal(c);
  double correct = 0.0;
  for (Index y = 0; y < ch.ny(); ++y) {
    double best = 0.0;
    for (int cw = 0; cw < c.size(); ++cw)
      best = std::max(best,
                      pc[cw] * ch.legit()(c.letters[static_cast<std::size_t>(cw)], y));
    correct += best;
  }
  return 1.0 - correct;
}

// ---------------------------------------------------------------------------

GaussConverseEvaluator::GaussConverseEvaluator(const GaussianWiretap& g, long n)
    : llr_(channels::gauss_conv_llr(g, n)),
      density_(channels::quadform_density(llr_)) {}

double GaussConverseEvaluator::log_beta(double alpha) const {
  const double tstar = density_.upper_quantile(alpha);
  return density_.log_exp_tail(tstar);
}

namespace {

struct TypeKernelStats {
  double mean, var;
};

// per-letter moments of ln(J_x / (P_{Z|X=x} P^{(t)}_{Y|Z})) for each letter
std::vector<TypeKernelStats> type_kernel_stats(const DMWiretap& ch,
                                               const ArrayXd& type) {
  const Index nx = ch.nx(), ny = ch.ny(), nz = ch.nz();
  Eigen::MatrixXd pyz = Eigen::MatrixXd::Zero(ny, nz);
  for (Index x = 0; x < nx; ++x) pyz += type[x] * ch.joint(x);
  const Eigen::VectorXd pz = pyz.colwise().sum();
  std::vector<TypeKernelStats> out(static_cast<std::size_t>(nx));
  for (Index x = 0; x < nx; ++x) {
    double m1 = 0.0, m2 = 0.0;
    for (Index y = 0; y < ny; ++y)
      for (Index z = 0; z < nz; ++z) {
        const double j = ch.joint(x)(y, z);
        if (j <= 0.0) continue;
        const double pyz_cond = pz[z] > 0.0 ? pyz(y, z) / pz[z] : 0.0;
        const double pzx = ch.eaves()(x, z);
        double g;
        if (pyz_cond <= 0.0) g = 700.0;  // unreachable reference: effectively +inf
        else g = std::log(j) - std::log(pzx) - std::log(pyz_cond);
        m1 += j * g;
        m2 += j * g * g;
      }
    out[static_cast<std::size_t>(x)] = {m1, m2 - m1 * m1};
  }
  return out;
}

ArrayXd worst_type_search(const DMWiretap& ch, long n, double alpha_hint) {
  const Index nx = ch.nx();
  require(nx <= 3, "DMC converse: worst-type search supports |X| <= 3");
  const double qa = probkit::q_inv(std::clamp(alpha_hint, 1e-9, 1.0 - 1e-9));
  const double nn = static_cast<double>(n);
  auto score = [&](const ArrayXd& type) {
    const auto stats = type_kernel_stats(ch, type);
    double mean = 0.0, var = 0.0;
    for (Index x = 0; x < nx; ++x) {
      mean += nn * type[x] * stats[static_cast<std::size_t>(x)].mean;
      var += nn * type[x] * stats[static_cast<std::size_t>(x)].var;
    }
    return mean + std::sqrt(std::max(var, 0.0)) * qa;
  };

  ArrayXd best;
  double best_score = -kInf;
  auto consider = [&](const ArrayXd& t) {
    const double s = score(t);
    if (s > best_score) { best_score = s; best = t; }
  };
  if (nx == 1) {
    best = ArrayXd::Ones(1);
  } else if (nx == 2) {
    for (long k = 0; k <= n; ++k) {
      ArrayXd t(2);
      t << static_cast<double>(k) / nn, static_cast<double>(n - k) / nn;
      consider(t);
    }
  } else {
    const long grid = std::min<long>(n, 96);
    for (long i = 0; i <= grid; ++i)
      for (long j = 0; i + j <= grid; ++j) {
        ArrayXd t(3);
        t << static_cast<double>(i) / grid, static_cast<double>(j) / grid,
            static_cast<double>(grid - i - j) / grid;
        // snap to an achievable composition
        for (Index x = 0; x < 3; ++x)
          t[x] = std::round(t[x] * nn) / nn;
        const double s = t.sum();
        if (std::fabs(s - 1.0) > 0.5 / nn) continue;
        t /= s;
        consider(t);
      }
  }
  return best;
}

}  // namespace

DmcConverseEvaluator::DmcConverseEvaluator(const DMWiretap& ch, long n,
                                           double alpha_hint,
                                           const ConvOptions& opt)
    : DmcConverseEvaluator(ch, n, worst_type_search(ch, n, alpha_hint), opt) {}

DmcConverseEvaluator::DmcConverseEvaluator(const DMWiretap& ch, long n,
                                           const ArrayXd& type,
                                           const ConvOptions& opt) {
  type_ = type;
  penalty_ = static_cast<double>(ch.nx()) * std::log(static_cast<double>(n) + 1.0);

  // exact composition counts for the chosen type
  const auto comp = achievability::dmc_composition(FiniteDist{type_}, n);
  const Index nx = ch.nx(), ny = ch.ny(), nz = ch.nz();
  Eigen::MatrixXd pyz = Eigen::MatrixXd::Zero(ny, nz);
  for (Index x = 0; x < nx; ++x) pyz += comp.type[x] * ch.joint(x);
  const Eigen::VectorXd pz = pyz.colwise().sum();

  probkit::ConvolveOptions copt;
  copt.max_bins = opt.max_bins;
  std::vector<LogSpectrum> parts;
  std::vector<std::int64_t> counts;
  const double base_step = 1e-4;
  for (Index x = 0; x < nx; ++x) {
    if (comp.counts[static_cast<std::size_t>(x)] == 0) continue;
    std::vector<probkit::SpectrumAtom> atoms;
    double pos_inf = 0.0;
    for (Index y = 0; y < ny; ++y)
      for (Index z = 0; z < nz; ++z) {
        const double j = ch.joint(x)(y, z);
        if (j <= 0.0) continue;
        const double cond = pz[z] > 0.0 ? pyz(y, z) / pz[z] : 0.0;
        if (cond <= 0.0) { pos_inf += j; continue; }
        atoms.push_back(
            {std::log(j) - std::log(ch.eaves()(x, z)) - std::log(cond), j});
      }
    parts.push_back(LogSpectrum::from_atoms(atoms, base_step, pos_inf));
    counts.push_back(comp.counts[static_cast<std::size_t>(x)]);
  }
  spec_ = probkit::composition_convolve(parts, counts, copt);
}

double DmcConverseEvaluator::log_beta_lb(double alpha, bool with_penalty) const {
  const double pen = with_penalty ? penalty_ : 0.0;
  const auto& w = spec_.weights();
  double best = kNegInf;
  long double tail = spec_.mass_pos_inf();
  // scan thresholds from the top of the lattice; beta >= e^{-u-pen}(alpha - P[S >= u])
  for (Index i = spec_.bins() - 1; i >= 0; --i) {
    const double u = spec_.value(i);
    if (tail < alpha) {
      const double v = -u - pen + std::log(alpha - static_cast<double>(tail));
      best = std::max(best, v);
    }
    tail += w[i];
  }
  return best;
}

namespace {

struct TauObjective {
  std::function<double(double)> log_beta;  // alpha -> log beta
  double eps, delta;
  bool hayashi;

  double operator()(double tau) const {
    const double alpha = 1.0 - eps - delta - tau;
    if (alpha <= 0.0 || tau <= 0.0) return kInf;
    const double lb = log_beta(alpha);
    const double lead = hayashi ? -2.0 * std::log(tau)
                                : std::log((tau + delta) / tau);
    return lead - lb;
  }
};

BoundPoint conv_point(long n, const char* id, const TauObjective& obj,
                      const ConvOptions& opt) {
  const double window = 1.0 - obj.eps - obj.delta;
  require(window > 0.0, "converse: epsilon + delta must be < 1");
  const double lo = 1e-4 * window, hi = window * (1.0 - 1e-4);
  double best = kInf, best_tau = lo;
  for (int i = 0; i < opt.tau_grid; ++i) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(i) /
                                                static_cast<double>(opt.tau_grid - 1));
    const double v = obj(t);
    if (v < best) { best = v; best_tau = t; }
  }
  const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(opt.tau_grid - 1));
  const double t = golden_min(obj, best_tau / ratio, std::min(hi, best_tau * ratio));
  if (obj(t) < best) { best = obj(t); best_tau = t; }

  BoundPoint pt;
  pt.n = n;
  pt.bound_id = id;
  pt.tau_star = best_tau;
  const double rate_bits = nats_to_bits(std::max(0.0, best) / static_cast<double>(n));
  if (rate_bits > opt.rate_cap_bits || !std::isfinite(rate_bits)) {
    pt.rate_bits = opt.rate_cap_bits;
    pt.status = PointStatus::kCapped;
  } else {
    pt.rate_bits = rate_bits;
  }
  return pt;
}

BoundPoint conv_rate(long n, double eps, double delta, const WiretapScenario& sc,
                     const ConvOptions& opt, bool hayashi, const char* id) {
  require(eps > 0.0 && delta > 0.0 && eps + delta < 1.0,
          "converse: need eps, delta > 0 and eps + delta < 1");
  TauObjective obj;
  obj.eps = eps;
  obj.delta = delta;
  obj.hayashi = hayashi;
  if (const auto* g = std::get_if<GaussianWiretap>(&sc)) {
    auto eval = std::make_shared<GaussConverseEvaluator>(*g, n);
    obj.log_beta = [eval](double a) { return eval->log_beta(a); };
    return conv_point(n, id, obj, opt);
  }
  const auto& dmc = std::get<channels::DmcScenario>(sc);
  auto eval = std::make_shared<DmcConverseEvaluator>(dmc.channel, n,
                                                     1.0 - eps - delta, opt);
  obj.log_beta = [eval](double a) { return eval->log_beta_lb(a); };
  return conv_point(n, id, obj, opt);
}

}  // namespace

BoundPoint thm3_rate(long n, double eps, double delta, const WiretapScenario& sc,
                     const ConvOptions& opt) {
  return conv_rate(n, eps, delta, sc, opt, /*hayashi=*/false, "thm3");
}

BoundPoint hayashi_rate(long n, double eps, double delta, const WiretapScenario& sc,
                        const ConvOptions& opt) {
  return conv_rate(n, eps, delta, sc, opt, /*hayashi=*/true, "hayashi");
}

// ---------------------------------------------------------------------------

double thm2_smallscale(const PartitionCode& code, const DMWiretap& ch,
                       const FiniteDist& q_y, double eps, double delta,
                       double tau) {
  require(tau > 0.0 && tau < 1.0 - delta, "thm2_smallscale: tau in (0, 1-delta)");
  const int m = code.message_count();
  const Eigen::MatrixXd wz = wz_joint(code, ch);
  const Eigen::MatrixXd wy = wy_joint(code, ch);
  const ArrayXd pw = ArrayXd::Constant(m, 1.0 / m);
  const ArrayXd pz = wz.colwise().sum().transpose().array();
  const double b_secrecy = metrics::beta_alpha(flatten(wz), product_dist(pw, pz),
                                               delta + tau);
  const double b_channel = metrics::beta_alpha(flatten(wy), product_dist(pw, q_y.p),
                                               1.0 - eps);
  if (b_channel <= 0.0) return kInf;
  return b_secrecy / (tau * b_channel);
}

double lemma4_leakage_lb(const PartitionCode& code, const DMWiretap& ch,
                         const FiniteDist& q_z) {
  const int n = code.size();
  const int m = code.message_count();
  const Eigen::MatrixXd xz = cw_z_joint(code, ch);
  const ArrayXd unif = ArrayXd::Constant(n, 1.0 / n);
  const double gamma = static_cast<double>(n) / static_cast<double>(m);
  return metrics::e_gamma(flatten(xz), product_dist(unif, q_z.p), gamma);
}

double resolvability_lb(std::span<const int> codebook_letters,
                        const Eigen::MatrixXd& legit_kernel,
                        const FiniteDist& q_y) {
  require(!codebook_letters.empty(), "resolvability_lb: empty codebook");
  const auto n = static_cast<Index>(codebook_letters.size());
  const ArrayXd unif = ArrayXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd joint(n, legit_kernel.cols());
  for (Index c = 0; c < n; ++c)
    joint.row(c) =
        legit_kernel.row(codebook_letters[static_cast<std::size_t>(c)]) /
        static_cast<double>(n);
  return metrics::e_gamma(flatten(joint), product_dist(unif, q_y.p),
                          static_cast<double>(n));
}

double thm4_smallscale(const PartitionCode& code, const DMWiretap& ch,
                       double eps, double delta,
                       std::span<const FiniteDist> qy_extra) {
  const int n = code.size();
  const Eigen::MatrixXd xz = cw_z_joint(code, ch);
  const Eigen::MatrixXd xy = cw_y_joint(code, ch);
  const ArrayXd unif = ArrayXd::Constant(n, 1.0 / n);
  const ArrayXd pz = xz.colwise().sum().transpose().array();

  std::vector<FiniteDist> qys;
  qys.push_back(FiniteDist{xy.colwise().sum().transpose().array()});
  for (const auto& q : qy_extra) qys.push_back(q);

  double best = kInf;
  for (const auto& qy : qys) {
    for (int i = 1; i <= 63; ++i) {
      const double tau = (1.0 - delta) * static_cast<double>(i) / 64.0;
      const double bs = metrics::beta_alpha(flatten(xz), product_dist(unif, pz),
                                            delta + tau);
      const double bc = metrics::beta_alpha(flatten(xy), product_dist(unif, qy.p),
                                            1.0 - eps);
      if (bc <= 0.0) continue;
      best = std::min(best, bs / (tau * bc));
    }
  }
  return best;
}

ListDecodeBound thm5_list_lb(const PartitionCode& code, const DMWiretap& ch,
                             const std::function<std::vector<int>(Index)>& decoder) {
  const int m = code.message_count();
  const ArrayXd pc = codeword_marginal(code);
  long lmax = 0;
  double correct = 0.0;
  for (Index z = 0; z < ch.nz(); ++z) {
    const auto list = decoder(z);
    lmax = std::max<long>(lmax, static_cast<long>(list.size()));
    for (int cw : list)
      correct += pc[cw] * ch.eaves()(code.letters[static_cast<std::size_t>(cw)], z);
  }
  const double eps_ld = 1.0 - correct;
  return {eps_ld, lmax,
          1.0 - eps_ld - static_cast<double>(lmax) / static_cast<double>(m)};
}

}  // namespace wtb::converse
