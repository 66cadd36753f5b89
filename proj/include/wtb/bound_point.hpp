#pragma once

#include <limits>
#include <string>

namespace wtb {

enum class PointStatus { kOk, kInfeasible, kCapped };

inline const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::kOk: return "ok";
    case PointStatus::kInfeasible: return "infeasible";
    case PointStatus::kCapped: return "capped";
  }
  return "?";
}

// One row of a rate-versus-blocklength curve. Large optimizers are carried in
// log form: gamma_star is ln(gamma), k_star and mk_star are log2 of K and MK.
struct BoundPoint {
  long n = 0;
  std::string bound_id;
  double rate_bits = 0.0;
  double gamma_star = std::numeric_limits<double>::quiet_NaN();
  double tau_star = std::numeric_limits<double>::quiet_NaN();
  double k_star = std::numeric_limits<double>::quiet_NaN();
  double mk_star = std::numeric_limits<double>::quiet_NaN();
  double mc_stderr = std::numeric_limits<double>::quiet_NaN();
  PointStatus status = PointStatus::kOk;
};

}  // namespace wtb
