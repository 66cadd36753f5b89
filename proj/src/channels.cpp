#include "wtb/channels.hpp"

#include "wtb/special.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace wtb::channels {

DMWiretap::DMWiretap(Index nx, Index ny, Index nz,
                     std::vector<Eigen::MatrixXd> joint_yz_given_x)
    : nx_(nx), ny_(ny), nz_(nz), joint_(std::move(joint_yz_given_x)) {
  require(nx_ >= 1 && ny_ >= 1 && nz_ >= 1, "DMWiretap: empty alphabet");
  require(static_cast<Index>(joint_.size()) == nx_, "DMWiretap: kernel count != |X|");
  py_given_x_.resize(nx_, ny_);
  pz_given_x_.resize(nx_, nz_);
  for (Index x = 0; x < nx_; ++x) {
    const auto& j = joint_[static_cast<std::size_t>(x)];
    require(j.rows() == ny_ && j.cols() == nz_, "DMWiretap: kernel shape");
    require((j.array() >= -1e-15).all(), "DMWiretap: negative transition probability");
    require(std::fabs(j.sum() - 1.0) <= 1e-12,
            "DMWiretap: P_{YZ|X=x} must sum to 1");
    py_given_x_.row(x) = j.rowwise().sum().transpose();
    pz_given_x_.row(x) = j.colwise().sum();
  }
}

ArrayXd DMWiretap::output_y(const FiniteDist& px) const {
  require(px.size() == nx_, "output_y: input size");
  return (px.p.matrix().transpose() * py_given_x_).transpose().array();
}

ArrayXd DMWiretap::output_z(const FiniteDist& px) const {
  require(px.size() == nx_, "output_z: input size");
  return (px.p.matrix().transpose() * pz_given_x_).transpose().array();
}

LogSpectrum dmc_letter_llr_spectrum(Index x, const Eigen::MatrixXd& w,
                                    const FiniteDist& q_out, double step) {
  require(x >= 0 && x < w.rows(), "dmc_letter_llr_spectrum: input letter");
  require(w.cols() == q_out.size(), "dmc_letter_llr_spectrum: output size");
  std::vector<probkit::SpectrumAtom> atoms;
  double pos_inf = 0.0;
  for (Index o = 0; o < w.cols(); ++o) {
    const double pw = w(x, o);
    if (pw <= 0.0) continue;
    if (q_out[o] <= 0.0) {
      pos_inf += pw;  // conditional mass where the reference vanishes
      continue;
    }
    atoms.push_back({std::log(pw) - std::log(q_out[o]), pw});
  }
  return LogSpectrum::from_atoms(atoms, step, pos_inf);
}

LogSpectrum dmc_llr_spectrum(const FiniteDist& px, const Eigen::MatrixXd& w,
                             const FiniteDist& q_out, double step) {
  require(px.size() == w.rows(), "dmc_llr_spectrum: input size");
  require(w.cols() == q_out.size(), "dmc_llr_spectrum: output size");
  std::vector<probkit::SpectrumAtom> atoms;
  double pos_inf = 0.0;
  for (Index x = 0; x < w.rows(); ++x) {
    if (px[x] <= 0.0) continue;
    for (Index o = 0; o < w.cols(); ++o) {
      const double pw = w(x, o);
      if (pw <= 0.0) continue;
      const double mass = px[x] * pw;
      if (q_out[o] <= 0.0) {
        pos_inf += mass;
        continue;
      }
      atoms.push_back({std::log(pw) - std::log(q_out[o]), mass});
    }
  }
  return LogSpectrum::from_atoms(atoms, step, pos_inf);
}

NoncentralChi2 gauss_eve_llr(const GaussianWiretap& g, long n, EveMeasure under) {
  require(n >= 1, "gauss_eve_llr: n >= 1");
  const double p = g.power, n2 = g.noise_eve;
  const double nq = p + n2;  // reference output variance
  // per-letter term (1/2)ln(nq/n2) + z^2/(2 nq) - (z - sqrt(P))^2/(2 n2)
  // completes the square around mu0 with curvature -a
  const double a = p / (2.0 * n2 * nq);
  const double mu0 = nq / std::sqrt(p);
  const double nn = static_cast<double>(n);
  const double shift =
      nn * (0.5 * std::log(nq / n2) + a * mu0 * mu0 - p / (2.0 * n2));
  NoncentralChi2 law;
  law.dof = n;
  law.shift = shift;
  if (under == EveMeasure::kSignal) {
    law.scale = -a * n2;
    law.noncentrality = nn * n2 / p;
  } else {
    law.scale = -a * nq;
    law.noncentrality = nn * nq / p;
  }
  return law;
}

double QuadFormLLR::mean() const {
  double m = constant;
  for (const auto& t : terms)
    m += t.lambda * (static_cast<double>(t.dof) + t.noncentrality);
  return m;
}

double QuadFormLLR::variance() const {
  double v = 0.0;
  for (const auto& t : terms)
    v += t.lambda * t.lambda * 2.0 *
         (static_cast<double>(t.dof) + 2.0 * t.noncentrality);
  return v;
}

QuadFormLLR gauss_conv_llr(const GaussianWiretap& g, long n) {
  require(n >= 1, "gauss_conv_llr: n >= 1");
  const double p = g.power, n1 = g.noise_legit, n2 = g.noise_eve;
  const double sp = std::sqrt(p);
  const double r1 = std::sqrt(n1), r2 = std::sqrt(n2 - n1);
  const double cs = 0.5 * std::log(1.0 + p / n1) - 0.5 * std::log(1.0 + p / n2);

  // per-letter term in standardized normals, T = g'Ag + b'g + c
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  double c = 0.0;
  auto add_quad = [&](double coef, double u1, double u2, double u0) {
    // coef * (u0 + u1 g1 + u2 g2)^2, folded with the global 1/2
    const double h = 0.5 * coef;
    A(0, 0) += h * u1 * u1;
    A(1, 1) += h * u2 * u2;
    A(0, 1) += h * u1 * u2;
    A(1, 0) += h * u1 * u2;
    b(0) += 2.0 * h * u0 * u1;
    b(1) += 2.0 * h * u0 * u2;
    c += h * u0 * u0;
  };
  add_quad(1.0 / n2, r1, r2, 0.0);         // (U+Ub)^2/N2
  add_quad(-1.0 / n1, r1, 0.0, 0.0);       // -U^2/N1
  add_quad(1.0 / (p + n1), r1, 0.0, sp);   // (sqrtP+U)^2/(P+N1)
  add_quad(-1.0 / (p + n2), r1, r2, sp);   // -(sqrtP+U+Ub)^2/(P+N2)

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
  const Eigen::Vector2d lam = es.eigenvalues();
  const Eigen::Vector2d beta = es.eigenvectors().transpose() * b;

  QuadFormLLR q;
  const double nn = static_cast<double>(n);
  double c2 = c;
  for (int j = 0; j < 2; ++j) {
    require(std::fabs(lam[j]) > 1e-13 * A.norm(),
            "gauss_conv_llr: degenerate quadratic form");
    const double d = beta[j] / (2.0 * lam[j]);
    c2 -= beta[j] * beta[j] / (4.0 * lam[j]);
    q.terms.push_back({lam[j], n, nn * d * d});
  }
  q.constant = nn * (cs + c2);
  return q;
}

namespace {

// adaptive Simpson over the second component with exact chi-square CDF inside
double quadform_cdf_two_terms(const QuadFormLLR& q, double x) {
  const auto& t1 = q.terms[0];
  const auto& t2 = q.terms[1];
  const double d2 = static_cast<double>(t2.dof);
  const double mu2 = d2 + t2.noncentrality;
  const double sd2 = std::sqrt(2.0 * (d2 + 2.0 * t2.noncentrality));
  const double lo = std::max(0.0, mu2 - 16.0 * sd2);
  const double hi = mu2 + 16.0 * sd2;
  probkit::NcChi2Pdf pdf2(d2, t2.noncentrality);

  auto inner = [&](double w2) {
    // P[lambda1 W1 <= x - c - lambda2 w2]
    const double r = (x - q.constant - t2.lambda * w2) / t1.lambda;
    const double cdf1 =
        t1.lambda > 0.0
            ? probkit::chi2_noncentral_cdf(r, static_cast<double>(t1.dof),
                                           t1.noncentrality)
            : probkit::chi2_noncentral_sf(r, static_cast<double>(t1.dof),
                                          t1.noncentrality);
    return std::exp(pdf2.log_pdf(w2)) * cdf1;
  };

  // composite Simpson; the integrand is smooth on the bulk window
  const int segments = 4096;
  const double h = (hi - lo) / segments;
  double acc = inner(lo) + inner(hi);
  for (int i = 1; i < segments; ++i)
    acc += inner(lo + h * i) * (i % 2 ? 4.0 : 2.0);
  return std::clamp(acc * h / 3.0, 0.0, 1.0);
}

}  // namespace

double quadform_cdf(const QuadFormLLR& q, double x) {
  if (q.terms.empty()) return x >= q.constant ? 1.0 : 0.0;
  if (q.terms.size() == 1) {
    const auto& t = q.terms[0];
    NoncentralChi2 law{t.dof, t.noncentrality, t.lambda, q.constant};
    return nc_chi2_cdf(x, law);
  }
  require(q.terms.size() == 2, "quadform_cdf: expected at most two terms");
  return quadform_cdf_two_terms(q, x);
}

DensityGrid quadform_density(const QuadFormLLR& q, Index max_points,
                             double half_width_sds) {
  require(q.terms.size() == 2, "quadform_density: expected two terms");
  const auto& t1 = q.terms[0];
  const auto& t2 = q.terms[1];

  struct Comp {
    double mu, sd, lo, hi;
  };
  auto comp = [&](const QuadFormTerm& t) {
    const double d = static_cast<double>(t.dof);
    const double mu_w = d + t.noncentrality;
    const double sd_w = std::sqrt(2.0 * (d + 2.0 * t.noncentrality));
    const double wlo = std::max(0.0, mu_w - half_width_sds * sd_w);
    const double whi = mu_w + half_width_sds * sd_w;
    Comp c;
    c.mu = t.lambda * mu_w;
    c.sd = std::fabs(t.lambda) * sd_w;
    c.lo = t.lambda > 0 ? t.lambda * wlo : t.lambda * whi;
    c.hi = t.lambda > 0 ? t.lambda * whi : t.lambda * wlo;
    return c;
  };
  const Comp c1 = comp(t1), c2 = comp(t2);
  double h = std::min(c1.sd, c2.sd) / 64.0;
  const double span = (c1.hi - c1.lo) + (c2.hi - c2.lo);
  if (span / h > static_cast<double>(max_points))
    h = span / static_cast<double>(max_points);

  auto sample = [&](const QuadFormTerm& t, const Comp& c) {
    const Index m = static_cast<Index>((c.hi - c.lo) / h) + 1;
    probkit::NcChi2Pdf pdf(static_cast<double>(t.dof), t.noncentrality);
    ArrayXd f(m);
    const double labs = std::log(std::fabs(t.lambda));
    for (Index i = 0; i < m; ++i) {
      const double s = c.lo + h * static_cast<double>(i);
      f[i] = std::exp(pdf.log_pdf(s / t.lambda) - labs);
    }
    return f;
  };
  const ArrayXd f1 = sample(t1, c1);
  const ArrayXd f2 = sample(t2, c2);

  // densities are harmless in linear space on the bulk window
  ArrayXd conv = probkit::linear_convolve(f1, f2).max(0.0);
  conv *= h;
  // zero the FFT noise floor; exponential reweighting would otherwise blow
  // it up far below the bulk
  const double floor = conv.maxCoeff() * 1e-15;
  ArrayXd logf(conv.size());
  for (Index i = 0; i < conv.size(); ++i)
    logf[i] = conv[i] > floor ? std::log(conv[i]) : kNegInf;
  const double t0 = q.constant + c1.lo + c2.lo;
  return DensityGrid(t0, h, std::move(logf));
}

}  // namespace wtb::channels
