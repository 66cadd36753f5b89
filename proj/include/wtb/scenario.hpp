#pragma once

#include "wtb/achievability.hpp"
#include "wtb/asymptotics.hpp"
#include "wtb/bound_point.hpp"
#include "wtb/converse.hpp"
#include "wtb/smallscale.hpp"

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace wtb::cli {

using achievability::WiretapScenario;

enum class BoundId { kThm1, kWh, kThm3, kHayashi, kNaAch, kNaConv };
const char* bound_name(BoundId b);
BoundId bound_from_name(const std::string& s);

struct ScenarioConfig {
  WiretapScenario scenario = channels::GaussianWiretap(1.0, 0.5, 2.0);
  std::vector<long> n_grid;
  double epsilon = 1e-3;
  double delta = 1e-3;
  std::vector<BoundId> bounds;
  std::uint64_t seed = 1;
  std::size_t mc_samples = 100000;
  std::string out_path = "curve.csv";
  std::size_t max_bins = std::size_t{1} << 20;

  void validate() const;
};

// flat key = value text with [section] headers; '#' starts a comment
ScenarioConfig parse_config_file(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

// whitespace-separated tensor file: "nx ny nz", nx blocks of ny*nz entries of
// P_{YZ|X}(y,z|x) (y-major), then optionally nx input probabilities
channels::DmcScenario load_dmc_file(const std::string& path);

// one row per (n, bound); rows come back sorted by (n, bound id)
std::vector<BoundPoint> run_curve(const ScenarioConfig& cfg);

std::string csv_header();
std::string csv_row(const BoundPoint& p);
void write_csv(const std::vector<BoundPoint>& rows, std::ostream& os);

struct AsymptoticRow {
  long n;
  double r_ach_bits;
  double r_conv_bits;
};
struct AsymptoticTable {
  asymptotics::SecondOrderTerms terms;  // nats
  std::vector<AsymptoticRow> rows;
};
AsymptoticTable run_asymptotic(const ScenarioConfig& cfg);
void write_asymptotic(const AsymptoticTable& t, std::ostream& os, bool csv);

void write_verify_report(const smallscale::VerifyReport& rep, std::ostream& os);

}  // namespace wtb::cli
