#include "wtb/asymptotics.hpp"

#include "wtb/special.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wtb::asymptotics {

namespace {

// projection onto the probability simplex (Euclidean)
ArrayXd project_simplex(ArrayXd v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (Index i = 0; i < n; ++i) {
    css += u[static_cast<std::size_t>(i)];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
  }
  for (Index i = 0; i < n; ++i) v[i] = std::max(0.0, v[i] - theta);
  return v;
}

struct Maximizer {
  FiniteDist arg;
  double value;
  bool unique;
};

// exhaustive grid for binary inputs, multistart projected ascent otherwise
template <typename F>
Maximizer maximize_over_inputs(Index nx, F&& f, int grid_points, int multistarts) {
  if (nx == 1) {
    FiniteDist p = FiniteDist::uniform(1);
    return {p, f(p), true};
  }
  if (nx == 2) {
    double best = -kInf, best_p = 0.5;
    std::vector<std::pair<double, double>> hits;  // (value, p)
    for (int i = 0; i <= grid_points; ++i) {
      const double p = static_cast<double>(i) / grid_points;
      ArrayXd v(2);
      v << p, 1.0 - p;
      const double val = f(FiniteDist{v});
      hits.push_back({val, p});
      if (val > best) { best = val; best_p = p; }
    }
    // cluster near-optimal grid points; far-apart hits mean a non-unique max
    bool unique = true;
    for (const auto& [val, p] : hits)
      if (val > best - 1e-9 && std::fabs(p - best_p) > 1e-2) unique = false;
    ArrayXd v(2);
    v << best_p, 1.0 - best_p;
    return {FiniteDist{v}, best, unique};
  }

  // numerical-gradient projected ascent with restarts, fixed internal stream
  double best = -kInf;
  ArrayXd best_p;
  std::vector<ArrayXd> tops;
  std::uint64_t state = 0x9E3779B97F4A7C15ULL;
  auto next_uniform = [&]() {
    state ^= state << 13; state ^= state >> 7; state ^= state << 17;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  for (int s = 0; s < multistarts; ++s) {
    ArrayXd p(nx);
    for (Index i = 0; i < nx; ++i) p[i] = -std::log(next_uniform() + 1e-12);
    p /= p.sum();
    double step = 0.1;
    double fp = f(FiniteDist{p});
    for (int it = 0; it < 400; ++it) {
      ArrayXd grad(nx);
      const double h = 1e-6;
      for (Index i = 0; i < nx; ++i) {
        ArrayXd q = p;
        q[i] += h;
        q /= q.sum();
        grad[i] = (f(FiniteDist{q}) - fp) / h;
      }
      ArrayXd cand = project_simplex(p + step * grad);
      const double fc = f(FiniteDist{cand});
      if (fc > fp) { p = cand; fp = fc; step *= 1.2; }
      else step *= 0.5;
      if (step < 1e-10) break;
    }
    if (fp > best) { best = fp; best_p = p; }
    tops.push_back(p);
  }
  bool unique = true;
  for (const auto& t : tops) {
    const double val = f(FiniteDist{t});
    if (val > best - 1e-7 && (t - best_p).abs().maxCoeff() > 1e-2) unique = false;
  }
  return {FiniteDist{best_p}, best, unique};
}

}  // namespace

ChannelInfo channel_info(const FiniteDist& px, const Eigen::MatrixXd& w) {
  require(px.size() == w.rows(), "channel_info: input size");
  const Index ny = w.cols();
  ArrayXd py = ArrayXd::Zero(ny);
  for (Index x = 0; x < w.rows(); ++x) py += px[x] * w.row(x).transpose().array();
  double mi = 0.0, var = 0.0;
  for (Index x = 0; x < w.rows(); ++x) {
    if (px[x] <= 0.0) continue;
    double d = 0.0, m2 = 0.0;
    for (Index y = 0; y < ny; ++y) {
      const double pyx = w(x, y);
      if (pyx <= 0.0) continue;
      const double l = std::log(pyx) - std::log(py[y]);
      d += pyx * l;
      m2 += pyx * l * l;
    }
    mi += px[x] * d;
    var += px[x] * (m2 - d * d);
  }
  return {mi, var};
}

DmcInfo dmc_info_quantities(const FiniteDist& px, const DMWiretap& ch) {
  require(px.size() == ch.nx(), "dmc_info_quantities: input size");
  const auto legit = channel_info(px, ch.legit());

  // joint output law and conditional P_{Y|Z}
  Eigen::MatrixXd pyz = Eigen::MatrixXd::Zero(ch.ny(), ch.nz());
  for (Index x = 0; x < ch.nx(); ++x) pyz += px[x] * ch.joint(x);
  const Eigen::VectorXd pz = pyz.colwise().sum();

  double mi_c = 0.0, var_c = 0.0;
  for (Index x = 0; x < ch.nx(); ++x) {
    if (px[x] <= 0.0) continue;
    double d = 0.0, m2 = 0.0;
    for (Index y = 0; y < ch.ny(); ++y)
      for (Index z = 0; z < ch.nz(); ++z) {
        const double j = ch.joint(x)(y, z);
        if (j <= 0.0) continue;
        const double cond = pyz(y, z) / pz[z];
        const double l = std::log(j) - std::log(ch.eaves()(x, z)) - std::log(cond);
        d += j * l;
        m2 += j * l * l;
      }
    mi_c += px[x] * d;
    var_c += px[x] * (m2 - d * d);
  }
  return {legit.mi, legit.var, mi_c, var_c};
}

double degradedness_residual(const DMWiretap& ch) {
  // fit row-stochastic D (ny x nz) with legit * D = eaves, projected gradient
  const Index ny = ch.ny(), nz = ch.nz();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(ny, nz, 1.0 / static_cast<double>(nz));
  const Eigen::MatrixXd& a = ch.legit();
  const Eigen::MatrixXd& b = ch.eaves();
  double step = 0.5;
  double prev = (a * d - b).squaredNorm();
  for (int it = 0; it < 4000; ++it) {
    const Eigen::MatrixXd grad = 2.0 * a.transpose() * (a * d - b);
    Eigen::MatrixXd cand = d - step * grad;
    for (Index y = 0; y < ny; ++y)
      cand.row(y) = project_simplex(cand.row(y).transpose().array()).transpose();
    const double r = (a * cand - b).squaredNorm();
    if (r < prev) { d = cand; prev = r; step *= 1.1; }
    else step *= 0.5;
    if (prev < 1e-24 || step < 1e-14) break;
  }
  return std::sqrt(prev);
}

SecondOrderResult dmc_second_order(const DMWiretap& ch, long n, double eps,
                                   double delta,
                                   const DmcSecondOrderOptions& opt) {
  require(n >= 1, "dmc_second_order: n >= 1");
  require(eps > 0.0 && delta > 0.0 && eps + delta < 1.0,
          "dmc_second_order: need eps, delta > 0 and eps + delta < 1");
  if (!opt.assume_degraded) {
    const double resid = degradedness_residual(ch);
    require(resid <= 1e-8,
            "dmc_second_order: channel failed the degradedness fit (residual " +
                std::to_string(resid) +
                "); auxiliary-variable optimization is out of scope");
  }

  auto secrecy_gap = [&](const FiniteDist& p) {
    return channel_info(p, ch.legit()).mi - channel_info(p, ch.eaves()).mi;
  };
  auto cond_mi = [&](const FiniteDist& p) {
    return dmc_info_quantities(p, ch).mi_cond;
  };
  const auto ach = maximize_over_inputs(ch.nx(), secrecy_gap, opt.grid_points,
                                        opt.multistarts);
  const auto conv = maximize_over_inputs(ch.nx(), cond_mi, opt.grid_points,
                                         opt.multistarts);
  SecondOrderResult out;
  out.input_ach = ach.arg;
  out.input_conv = conv.arg;
  if (!ach.unique)
    out.warnings.push_back("secrecy-capacity input maximizer is not unique");
  if (!conv.unique)
    out.warnings.push_back("conditional-information maximizer is not unique");
  require(out.warnings.empty(),
          "dmc_second_order: expansion undefined without a unique maximizer");

  out.terms.cs = ach.value;
  out.terms.cs_u = conv.value;
  out.terms.v1 = channel_info(ach.arg, ch.legit()).var;
  out.terms.v2 = channel_info(ach.arg, ch.eaves()).var;
  out.terms.vc = dmc_info_quantities(conv.arg, ch).var_cond;

  const double nn = static_cast<double>(n);
  out.r_ach = out.terms.cs - std::sqrt(out.terms.v1 / nn) * probkit::q_inv(eps) -
              std::sqrt(out.terms.v2 / nn) * probkit::q_inv(delta);
  out.r_conv =
      out.terms.cs_u - std::sqrt(out.terms.vc / nn) * probkit::q_inv(eps + delta);
  return out;
}

SecondOrderTerms gauss_terms(const GaussianWiretap& g) {
  const double p = g.power, n1 = g.noise_legit, n2 = g.noise_eve;
  SecondOrderTerms t;
  t.cs = 0.5 * std::log1p(p / n1) - 0.5 * std::log1p(p / n2);
  t.cs_u = t.cs;
  t.v1 = 0.5 * (p * p + 2.0 * p * n1) / ((p + n1) * (p + n1));
  t.v2 = 0.5 * (p * p + 2.0 * p * n2) / ((p + n2) * (p + n2));
  t.vc = t.v1 + t.v2 - (p * n1 / (p + n1)) * (1.0 / n2 + 1.0 / (p + n2));
  return t;
}

SecondOrderResult gauss_second_order(const GaussianWiretap& g, long n, double eps,
                                     double delta) {
  require(n >= 1, "gauss_second_order: n >= 1");
  require(eps > 0.0 && delta > 0.0 && eps + delta < 1.0,
          "gauss_second_order: need eps, delta > 0 and eps + delta < 1");
  SecondOrderResult out;
  out.terms = gauss_terms(g);
  const double nn = static_cast<double>(n);
  out.r_ach = out.terms.cs - std::sqrt(out.terms.v1 / nn) * probkit::q_inv(eps) -
              std::sqrt(out.terms.v2 / nn) * probkit::q_inv(delta);
  out.r_conv =
      out.terms.cs - std::sqrt(out.terms.vc / nn) * probkit::q_inv(eps + delta);
  return out;
}

}  // namespace wtb::asymptotics
