#include "wtb/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace wtb::cli {

const char* bound_name(BoundId b) {
  switch (b) {
    case BoundId::kThm1: return "thm1";
    case BoundId::kWh: return "wh";
    case BoundId::kThm3: return "thm3";
    case BoundId::kHayashi: return "hayashi";
    case BoundId::kNaAch: return "na_ach";
    case BoundId::kNaConv: return "na_conv";
  }
  return "?";
}

BoundId bound_from_name(const std::string& s) {
  for (BoundId b : {BoundId::kThm1, BoundId::kWh, BoundId::kThm3,
                    BoundId::kHayashi, BoundId::kNaAch, BoundId::kNaConv})
    if (s == bound_name(b)) return b;
  throw std::invalid_argument("unknown bound id: " + s);
}

void ScenarioConfig::validate() const {
  require(!n_grid.empty(), "config: n_grid is empty");
  long prev = 0;
  for (long n : n_grid) {
    require(n > prev, "config: n_grid must be ascending positive integers");
    prev = n;
  }
  require(epsilon > 0.0 && epsilon < 1.0, "config: epsilon in (0,1)");
  require(delta > 0.0 && delta < 1.0, "config: delta in (0,1)");
  require(epsilon + delta < 1.0, "config: epsilon + delta must be < 1");
  require(!bounds.empty(), "config: bound set is empty");
  require(mc_samples >= 100, "config: mc_samples too small");
}

namespace {

struct RawConfig {
  std::map<std::string, std::string> kv;  // "section.key" -> value
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

RawConfig parse_raw(const std::string& text) {
  RawConfig rc;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', "config line " + std::to_string(lineno) +
                                      ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos,
            "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
    rc.kv[section + "." + key] = val;
  }
  return rc;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    require(pos == s.size(), what + ": trailing characters in '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(what + ": not a number: '" + s + "'");
  }
}

std::vector<long> parse_n_grid(const std::string& s) {
  std::vector<long> out;
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    // start:stop:step
    const auto colon2 = s.find(':', colon + 1);
    require(colon2 != std::string::npos, "n_grid: expected start:stop:step");
    const long start = std::stol(s.substr(0, colon));
    const long stop = std::stol(s.substr(colon + 1, colon2 - colon - 1));
    const long step = std::stol(s.substr(colon2 + 1));
    require(step > 0 && start > 0 && stop >= start, "n_grid: bad range");
    for (long n = start; n <= stop; n += step) out.push_back(n);
    return out;
  }
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stol(tok));
  }
  return out;
}

std::vector<BoundId> parse_bounds(const std::string& s) {
  std::vector<BoundId> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(bound_from_name(tok));
  }
  return out;
}

}  // namespace

channels::DmcScenario load_dmc_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open transition file: " + path);
  Index nx, ny, nz;
  require(static_cast<bool>(in >> nx >> ny >> nz), "transition file: header");
  require(nx >= 1 && ny >= 1 && nz >= 1 && nx <= 64 && ny <= 256 && nz <= 256,
          "transition file: implausible sizes");
  std::vector<Eigen::MatrixXd> joint;
  for (Index x = 0; x < nx; ++x) {
    Eigen::MatrixXd m(ny, nz);
    for (Index y = 0; y < ny; ++y)
      for (Index z = 0; z < nz; ++z) {
        double v;
        require(static_cast<bool>(in >> v), "transition file: truncated tensor");
        m(y, z) = v;
      }
    joint.push_back(m);
  }
  ArrayXd px = ArrayXd::Constant(nx, 1.0 / static_cast<double>(nx));
  double v;
  if (in >> v) {
    px[0] = v;
    for (Index x = 1; x < nx; ++x) {
      require(static_cast<bool>(in >> v), "transition file: truncated input law");
      px[x] = v;
    }
  }
  return {channels::DMWiretap(nx, ny, nz, std::move(joint)),
          metrics::FiniteDist{px}};
}

ScenarioConfig parse_config_text(const std::string& text) {
  const RawConfig rc = parse_raw(text);
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = rc.kv.find(key);
    return it == rc.kv.end() ? nullptr : &it->second;
  };
  auto need = [&](const std::string& key) -> const std::string& {
    const auto* v = get(key);
    require(v != nullptr, "config: missing " + key);
    return *v;
  };

  std::set<std::string> known = {
      "scenario.kind",        "scenario.snr_legit_db", "scenario.snr_eve_db",
      "scenario.transition_file",
      "grid.n_grid",          "grid.epsilon",          "grid.delta",
      "bounds.set",           "run.seed",              "run.mc_samples",
      "run.out",              "run.max_bins"};
  for (const auto& [k, v] : rc.kv)
    require(known.count(k) > 0, "config: unknown key " + k);

  ScenarioConfig cfg;
  const std::string kind = need("scenario.kind");
  if (kind == "gaussian") {
    const double snr1 = to_double(need("scenario.snr_legit_db"), "snr_legit_db");
    const double snr2 = to_double(need("scenario.snr_eve_db"), "snr_eve_db");
    // power normalized to 1; the bounds depend only on the two SNRs
    const double n1 = std::pow(10.0, -snr1 / 10.0);
    const double n2 = std::pow(10.0, -snr2 / 10.0);
    require(n2 > n1, "config: eavesdropper SNR must be below the legitimate SNR");
    cfg.scenario = channels::GaussianWiretap(1.0, n1, n2);
  } else if (kind == "dmc") {
    cfg.scenario = load_dmc_file(need("scenario.transition_file"));
  } else {
    throw std::invalid_argument("config: kind must be gaussian or dmc");
  }
  cfg.n_grid = parse_n_grid(need("grid.n_grid"));
  cfg.epsilon = to_double(need("grid.epsilon"), "epsilon");
  cfg.delta = to_double(need("grid.delta"), "delta");
  cfg.bounds = parse_bounds(need("bounds.set"));
  if (const auto* v = get("run.seed")) cfg.seed = std::stoull(*v);
  if (const auto* v = get("run.mc_samples")) cfg.mc_samples = std::stoull(*v);
  if (const auto* v = get("run.out")) cfg.out_path = *v;
  if (const auto* v = get("run.max_bins")) cfg.max_bins = std::stoull(*v);
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

BoundPoint eval_bound(const ScenarioConfig& cfg, long n, BoundId b) {
  achievability::AchOptions aopt;
  aopt.mc_samples = cfg.mc_samples;
  aopt.seed = cfg.seed;
  aopt.max_bins = cfg.max_bins;
  converse::ConvOptions copt;
  copt.max_bins = cfg.max_bins;
  switch (b) {
    case BoundId::kThm1:
      return achievability::thm1_rate(n, cfg.epsilon, cfg.delta, cfg.scenario, aopt);
    case BoundId::kWh:
      return achievability::wh_rate(n, cfg.epsilon, cfg.delta, cfg.scenario, aopt);
    case BoundId::kThm3:
      return converse::thm3_rate(n, cfg.epsilon, cfg.delta, cfg.scenario, copt);
    case BoundId::kHayashi:
      return converse::hayashi_rate(n, cfg.epsilon, cfg.delta, cfg.scenario, copt);
    case BoundId::kNaAch:
    case BoundId::kNaConv: {
      asymptotics::SecondOrderResult r;
      if (const auto* g = std::get_if<channels::GaussianWiretap>(&cfg.scenario)) {
        r = asymptotics::gauss_second_order(*g, n, cfg.epsilon, cfg.delta);
      } else {
        const auto& dmc = std::get<channels::DmcScenario>(cfg.scenario);
        r = asymptotics::dmc_second_order(dmc.channel, n, cfg.epsilon, cfg.delta);
      }
      BoundPoint pt;
      pt.n = n;
      pt.bound_id = bound_name(b);
      const double nats = b == BoundId::kNaAch ? r.r_ach : r.r_conv;
      pt.rate_bits = std::max(0.0, nats_to_bits(nats));
      return pt;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::vector<BoundPoint> run_curve(const ScenarioConfig& cfg) {
  cfg.validate();
  struct Task {
    long n;
    BoundId b;
  };
  std::vector<Task> tasks;
  for (long n : cfg.n_grid)
    for (BoundId b : cfg.bounds) tasks.push_back({n, b});

  std::vector<BoundPoint> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  const unsigned workers =
      std::min<unsigned>(std::thread::hardware_concurrency(),
                         static_cast<unsigned>(tasks.size()));
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      rows[i] = eval_bound(cfg, tasks[i].n, tasks[i].b);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  // deterministic output order regardless of scheduling
  std::stable_sort(rows.begin(), rows.end(), [](const BoundPoint& a, const BoundPoint& b) {
    if (a.n != b.n) return a.n < b.n;
    return a.bound_id < b.bound_id;
  });
  return rows;
}

std::string csv_header() {
  return "n,bound_id,rate_bits,gamma_star,tau_star,k_star,mk_star,mc_stderr,status";
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string csv_row(const BoundPoint& p) {
  std::ostringstream os;
  os << p.n << ',' << p.bound_id << ',' << fmt(p.rate_bits) << ','
     << fmt(p.gamma_star) << ',' << fmt(p.tau_star) << ',' << fmt(p.k_star) << ','
     << fmt(p.mk_star) << ',' << fmt(p.mc_stderr) << ',' << to_string(p.status);
  return os.str();
}

void write_csv(const std::vector<BoundPoint>& rows, std::ostream& os) {
  os << csv_header() << '\n';
  for (const auto& r : rows) os << csv_row(r) << '\n';
}

AsymptoticTable run_asymptotic(const ScenarioConfig& cfg) {
  cfg.validate();
  AsymptoticTable t;
  for (long n : cfg.n_grid) {
    asymptotics::SecondOrderResult r;
    if (const auto* g = std::get_if<channels::GaussianWiretap>(&cfg.scenario))
      r = asymptotics::gauss_second_order(*g, n, cfg.epsilon, cfg.delta);
    else
      r = asymptotics::dmc_second_order(
          std::get<channels::DmcScenario>(cfg.scenario).channel, n, cfg.epsilon,
          cfg.delta);
    t.terms = r.terms;
    t.rows.push_back({n, nats_to_bits(r.r_ach), nats_to_bits(r.r_conv)});
  }
  return t;
}

void write_asymptotic(const AsymptoticTable& t, std::ostream& os, bool csv) {
  const double b = kLog2E, b2 = kLog2E * kLog2E;
  if (csv) {
    os << "n,na_ach_bits,na_conv_bits\n";
    for (const auto& r : t.rows)
      os << r.n << ',' << fmt(r.r_ach_bits) << ',' << fmt(r.r_conv_bits) << '\n';
    return;
  }
  os << "C_S    = " << fmt(t.terms.cs * b) << " bits/use\n"
     << "C_S^u  = " << fmt(t.terms.cs_u * b) << " bits/use\n"
     << "V1     = " << fmt(t.terms.v1 * b2) << " bits^2\n"
     << "V2     = " << fmt(t.terms.v2 * b2) << " bits^2\n"
     << "V_c    = " << fmt(t.terms.vc * b2) << " bits^2\n";
  os << "n,na_ach_bits,na_conv_bits\n";
  for (const auto& r : t.rows)
    os << r.n << ',' << fmt(r.r_ach_bits) << ',' << fmt(r.r_conv_bits) << '\n';
}

void write_verify_report(const smallscale::VerifyReport& rep, std::ostream& os) {
  for (const auto& f : rep.families) {
    os << "family=" << f.family << " instances=" << f.instances
       << " checks=" << f.checks << " violations=" << f.violations
       << " worst_margin=" << fmt(f.worst_margin)
       << " status=" << (f.violations == 0 ? "PASS" : "FAIL") << '\n';
  }
  os << "overall=" << (rep.pass() ? "PASS" : "FAIL") << '\n';
}

}  // namespace wtb::cli
