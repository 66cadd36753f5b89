#include "wtb/achievability.hpp"

#include "wtb/metrics.hpp"
#include "wtb/rng.hpp"
#include "wtb/special.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace wtb::achievability {

namespace {

constexpr double kGolden = 0.6180339887498949;

// golden-section minimization on [a,b] of a unimodal-ish objective
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

double delta_from_terms(double e_gamma_term, double ln_gamma, double ln_k,
                        double log_expect) {
  const double root = 0.5 * (ln_gamma - ln_k + log_expect);
  const double val = e_gamma_term + 0.5 * std::exp(root);
  return std::min(val, 1.0);
}

}  // namespace

GaussEveLaw GaussEveLaw::build(const GaussianWiretap& g, long n) {
  GaussEveLaw law;
  law.signal = channels::gauss_eve_llr(g, n, channels::EveMeasure::kSignal);
  law.noise = channels::gauss_eve_llr(g, n, channels::EveMeasure::kNoise);
  law.signal_density = probkit::nc_chi2_density(law.signal);
  return law;
}

double GaussEveLaw::e_gamma_ln(double ln_gamma) const {
  const double ptail = probkit::nc_chi2_sf(ln_gamma, signal);
  const double lq = probkit::nc_chi2_log_sf(ln_gamma, noise);
  return std::max(0.0, ptail - std::exp(ln_gamma + lq));
}

double GaussEveLaw::log_expect_exp_abs(double ln_gamma) const {
  return signal_density.log_expect_exp_abs(ln_gamma);
}

double lemma1_delta(const LogSpectrum& eve_llr, double ln_k, double ln_gamma) {
  require(ln_k >= 0.0, "lemma1_delta: K >= 1");
  const double eg = metrics::e_gamma_spectrum_ln(eve_llr, ln_gamma);
  return delta_from_terms(eg, ln_gamma, ln_k, eve_llr.log_expect_exp_abs(ln_gamma));
}

double lemma1_delta(const GaussEveLaw& law, double ln_k, double ln_gamma) {
  require(ln_k >= 0.0, "lemma1_delta: K >= 1");
  return delta_from_terms(law.e_gamma_ln(ln_gamma), ln_gamma, ln_k,
                          law.log_expect_exp_abs(ln_gamma));
}

double wh_baseline_delta(const LogSpectrum& eve_llr, double ln_k, double ln_gamma) {
  require(ln_k >= 0.0, "wh_baseline_delta: K >= 1");
  const double eg = metrics::e_gamma_spectrum_ln(eve_llr, ln_gamma);
  return delta_from_terms(eg, ln_gamma, ln_k, 0.0);
}

double wh_baseline_delta(const GaussEveLaw& law, double ln_k, double ln_gamma) {
  require(ln_k >= 0.0, "wh_baseline_delta: K >= 1");
  return delta_from_terms(law.e_gamma_ln(ln_gamma), ln_gamma, ln_k, 0.0);
}

double log_sphere_cap(double u0, long n) {
  require(n >= 2, "log_sphere_cap: n >= 2");
  u0 = std::clamp(u0, -1.0, 1.0);
  const double a = 0.5 * (static_cast<double>(n) - 1.0);
  const double x = 1.0 - u0 * u0;
  if (u0 >= 0.0) return std::log(0.5) + probkit::log_reg_inc_beta(x, a, 0.5);
  return std::log1p(-0.5 * probkit::reg_inc_beta(x, a, 0.5));
}

RcuSphere RcuSphere::build(const GaussianWiretap& g, long n, std::size_t samples,
                           std::uint64_t seed) {
  require(n >= 2, "RcuSphere: n >= 2");
  require(samples >= 2, "RcuSphere: need samples");
  RcuSphere r;
  r.log_cap_.resize(samples);
  Rng rng(seed);
  const double p = g.power, n1 = g.noise_legit;
  const double sp = std::sqrt(p);
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = rng.normal() * std::sqrt(nn * n1);  // sum of noises
    const double v = rng.chi2(nn - 1.0);                 // residual square sum
    const double t = n1 * v + s * s / nn;                // ||U||^2
    const double ip = sp * (nn * sp + s);                // <x, y>
    const double ynorm2 = nn * p + 2.0 * sp * s + t;     // ||y||^2
    double u0 = ip / (std::sqrt(nn * p) * std::sqrt(ynorm2));
    u0 = std::clamp(u0, -1.0, 1.0);
    // cap fraction P[<Xbar, y>/|y| >= u0 * sqrt(nP)] on the sphere
    r.log_cap_[i] = log_sphere_cap(u0, n);
  }
  return r;
}

RcuSphere::Eval RcuSphere::epsilon(double ln_total) const {
  if (ln_total <= 0.0) return {0.0, 0.0};  // a single codeword never errs here
  // a - 1 with a = e^{ln_total}
  const double ln_am1 = ln_total + std::log1p(-std::exp(-ln_total));
  long double acc = 0.0L, acc2 = 0.0L;
  for (double lc : log_cap_) {
    const double x = ln_am1 + lc;
    const double v = x >= 0.0 ? 1.0 : std::exp(x);
    acc += v;
    acc2 += v * v;
  }
  const double m = static_cast<double>(acc) / static_cast<double>(log_cap_.size());
  const double ex2 = static_cast<double>(acc2) / static_cast<double>(log_cap_.size());
  const double var = std::max(0.0, ex2 - m * m);
  return {m, std::sqrt(var / static_cast<double>(log_cap_.size()))};
}

double rcu_sphere(long n, double ln_total, const GaussianWiretap& g,
                  std::size_t mc_samples, std::uint64_t seed) {
  return RcuSphere::build(g, n, mc_samples, seed).epsilon(ln_total).mean;
}

double dt_bound_ln(const LogSpectrum& llr_xy, double ln_a) {
  return 1.0 - metrics::e_gamma_spectrum_ln(llr_xy, ln_a);
}

double dt_bound(const LogSpectrum& llr_xy, double a) {
  require(a > 0.0, "dt_bound: a > 0");
  return dt_bound_ln(llr_xy, std::log(a));
}

double rcu_spectrum(const LogSpectrum& llr_xy, double ln_c) {
  const double upper = std::exp(ln_c + llr_xy.log_exp_tail(ln_c));
  const double below = std::max(0.0, llr_xy.total_mass() - llr_xy.tail_geq(ln_c));
  return std::min(1.0, below + upper);
}

DmcComposition dmc_composition(const FiniteDist& px, long n) {
  const Index k = px.size();
  DmcComposition c;
  c.counts.assign(static_cast<std::size_t>(k), 0);
  std::vector<std::pair<double, Index>> rem;
  long total = 0;
  for (Index x = 0; x < k; ++x) {
    const double exact = px[x] * static_cast<double>(n);
    const auto fl = static_cast<std::int64_t>(std::floor(exact));
    c.counts[static_cast<std::size_t>(x)] = fl;
    total += fl;
    rem.push_back({exact - std::floor(exact), x});
  }
  std::sort(rem.begin(), rem.end(), std::greater<>());
  for (long i = 0; total < n; ++i, ++total)
    ++c.counts[static_cast<std::size_t>(rem[static_cast<std::size_t>(i)].second)];
  c.type = ArrayXd(k);
  for (Index x = 0; x < k; ++x)
    c.type[x] = static_cast<double>(c.counts[static_cast<std::size_t>(x)]) /
                static_cast<double>(n);
  return c;
}

namespace {

// search state shared by thm1 and the weakened baseline
struct DeltaSide {
  // minimal ln K (continuous) at a given ln gamma; +inf when infeasible
  std::function<double(double)> ln_k_min;
  double center;  // grid center in ln gamma
  double width;   // half-width
};

struct SecrecyPick {
  double ln_k = 0.0;
  double ln_gamma = 0.0;
  bool feasible = false;
};

SecrecyPick pick_k(const DeltaSide& side, int grid_points) {
  SecrecyPick out;
  double best = kInf, best_g = 0.0;
  const double lo = side.center - side.width, hi = side.center + side.width;
  for (int i = 0; i < grid_points; ++i) {
    const double g = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(grid_points - 1);
    const double v = side.ln_k_min(g);
    if (v < best) { best = v; best_g = g; }
  }
  if (best == kInf) return out;
  const double span = (hi - lo) / static_cast<double>(grid_points - 1);
  const double g =
      golden_min([&](double x) { return side.ln_k_min(x); },
                 best_g - 2.0 * span, best_g + 2.0 * span);
  double v = side.ln_k_min(g);
  if (v > best) v = best; else best_g = g;
  // K restricted to powers of two
  const double k_exp = std::max(0.0, std::ceil(v / kLn2 - 1e-12));
  out.ln_k = k_exp * kLn2;
  out.ln_gamma = best_g;
  out.feasible = true;
  return out;
}

// ln K needed so the two-term bound meets delta at this gamma
double ln_k_needed(double e_gamma_term, double ln_gamma, double log_expect,
                   double delta) {
  if (delta >= 1.0) return 0.0;  // the bound is capped at 1, any K qualifies
  if (!(e_gamma_term < delta)) return kInf;
  return ln_gamma + log_expect - 2.0 * std::log(2.0 * (delta - e_gamma_term));
}

struct EpsSide {
  std::function<double(double)> eps_of_ln_a;  // conservative estimate
  double hi0;                                 // initial upper bracket
};

// largest ln a with eps(ln a) <= eps (monotone bisection)
std::optional<double> max_ln_a(const EpsSide& side, double eps) {
  double lo = kLn2;
  if (side.eps_of_ln_a(lo) > eps) return std::nullopt;
  double hi = side.hi0;
  int guard = 0;
  while (side.eps_of_ln_a(hi) <= eps && guard++ < 64) hi *= 2.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (side.eps_of_ln_a(mid) <= eps) lo = mid; else hi = mid;
  }
  return lo;
}

BoundPoint assemble(long n, const char* id, std::optional<double> ln_a,
                    const SecrecyPick& pick, double stderr_val) {
  BoundPoint pt;
  pt.n = n;
  pt.bound_id = id;
  pt.mc_stderr = stderr_val;
  if (!ln_a || !pick.feasible) {
    pt.status = PointStatus::kInfeasible;
    return pt;
  }
  const double rate_nats = (*ln_a - pick.ln_k) / static_cast<double>(n);
  if (rate_nats <= 0.0) {
    pt.status = PointStatus::kInfeasible;
    pt.gamma_star = pick.ln_gamma;
    pt.k_star = pick.ln_k / kLn2;
    pt.mk_star = *ln_a / kLn2;
    return pt;
  }
  pt.rate_bits = nats_to_bits(rate_nats);
  pt.gamma_star = pick.ln_gamma;
  pt.k_star = pick.ln_k / kLn2;
  pt.mk_star = *ln_a / kLn2;
  return pt;
}

BoundPoint ach_rate_gauss(long n, double eps, double delta,
                          const GaussianWiretap& g, const AchOptions& opt,
                          bool weakened, const char* id) {
  const auto sampler = RcuSphere::build(
      g, n, opt.mc_samples, derive_seed(opt.seed, static_cast<std::uint64_t>(n), "eps-side"));
  EpsSide eps_side;
  eps_side.eps_of_ln_a = [&](double ln_a) { return sampler.epsilon(ln_a).upper3(); };
  eps_side.hi0 = static_cast<double>(n) * 0.5 * std::log1p(g.power / g.noise_legit) + 8.0;
  const auto ln_a = max_ln_a(eps_side, eps);

  const auto law = GaussEveLaw::build(g, n);
  const double i2 = 0.5 * std::log1p(g.power / g.noise_eve);
  const double v2 = 0.5 * (g.power * g.power + 2.0 * g.power * g.noise_eve) /
                    ((g.power + g.noise_eve) * (g.power + g.noise_eve));
  DeltaSide dside;
  dside.center = static_cast<double>(n) * i2;
  dside.width = 6.0 * std::sqrt(static_cast<double>(n) * v2) + 6.0;
  dside.ln_k_min = [&, weakened](double lg) {
    const double eg = law.e_gamma_ln(lg);
    const double le = weakened ? 0.0 : law.log_expect_exp_abs(lg);
    return ln_k_needed(eg, lg, le, delta);
  };
  const auto pick = pick_k(dside, opt.gamma_grid);
  const double se = ln_a ? sampler.epsilon(*ln_a).std_err : 0.0;
  return assemble(n, id, ln_a, pick, se);
}

struct DmcSpectra {
  LogSpectrum eve;    // n-letter eve information density, type reference
  LogSpectrum legit;  // n-letter legit information density, type reference
  double penalty;     // |X| ln(n+1), type-class change-of-measure cost
};

DmcSpectra build_dmc_spectra(const DmcScenario& sc, long n,
                             const AchOptions& opt) {
  const auto& ch = sc.channel;
  const auto comp = dmc_composition(sc.input, n);

  ArrayXd qz = ArrayXd::Zero(ch.nz());
  ArrayXd qy = ArrayXd::Zero(ch.ny());
  for (Index x = 0; x < ch.nx(); ++x) {
    qz += comp.type[x] * ch.eaves().row(x).transpose().array();
    qy += comp.type[x] * ch.legit().row(x).transpose().array();
  }
  const FiniteDist qzd{qz}, qyd{qy};

  // one shared lattice step per side, sized from the summed per-letter ranges
  probkit::ConvolveOptions copt;
  copt.max_bins = opt.max_bins;
  std::vector<LogSpectrum> eve_parts, legit_parts;
  std::vector<std::int64_t> counts;
  const double base_step = 1e-4;
  for (Index x = 0; x < ch.nx(); ++x) {
    if (comp.counts[static_cast<std::size_t>(x)] == 0) continue;
    counts.push_back(comp.counts[static_cast<std::size_t>(x)]);
    eve_parts.push_back(
        channels::dmc_letter_llr_spectrum(x, ch.eaves(), qzd, base_step));
    legit_parts.push_back(
        channels::dmc_letter_llr_spectrum(x, ch.legit(), qyd, base_step));
  }
  DmcSpectra out{
      probkit::composition_convolve(eve_parts, counts, copt),
      probkit::composition_convolve(legit_parts, counts, copt),
      static_cast<double>(ch.nx()) * std::log(static_cast<double>(n) + 1.0)};
  return out;
}

BoundPoint ach_rate_dmc(long n, double eps, double delta, const DmcScenario& sc,
                        const AchOptions& opt, bool weakened, const char* id) {
  const auto spectra = build_dmc_spectra(sc, n, opt);

  EpsSide eps_side;
  eps_side.eps_of_ln_a = [&](double ln_a) {
    const double ln_am1 = ln_a + std::log1p(-std::exp(-std::max(ln_a, kLn2)));
    return rcu_spectrum(spectra.legit, ln_am1 + spectra.penalty);
  };
  eps_side.hi0 = spectra.legit.mean() + 10.0 * std::sqrt(spectra.legit.variance()) + 8.0;
  const auto ln_a = max_ln_a(eps_side, eps);

  DeltaSide dside;
  dside.center = spectra.eve.mean();
  dside.width = 6.0 * std::sqrt(spectra.eve.variance()) + 6.0;
  dside.ln_k_min = [&, weakened](double lg) {
    const double eg = metrics::e_gamma_spectrum_ln(spectra.eve, lg);
    const double le = weakened ? 0.0 : spectra.eve.log_expect_exp_abs(lg);
    return ln_k_needed(eg, lg, le, delta);
  };
  const auto pick = pick_k(dside, opt.gamma_grid);
  return assemble(n, id, ln_a, pick, 0.0);
}

BoundPoint ach_rate(long n, double eps, double delta, const WiretapScenario& sc,
                    const AchOptions& opt, bool weakened, const char* id) {
  require(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta <= 1.0,
          "ach rate: epsilon in (0,1), delta in (0,1]");
  if (const auto* g = std::get_if<GaussianWiretap>(&sc))
    return ach_rate_gauss(n, eps, delta, *g, opt, weakened, id);
  return ach_rate_dmc(n, eps, delta, std::get<DmcScenario>(sc), opt, weakened, id);
}

}  // namespace

BoundPoint thm1_rate(long n, double eps, double delta, const WiretapScenario& sc,
                     const AchOptions& opt) {
  return ach_rate(n, eps, delta, sc, opt, /*weakened=*/false, "thm1");
}

BoundPoint wh_rate(long n, double eps, double delta, const WiretapScenario& sc,
                   const AchOptions& opt) {
  return ach_rate(n, eps, delta, sc, opt, /*weakened=*/true, "wh");
}

}  // namespace wtb::achievability
