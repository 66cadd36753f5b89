#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace wtb {

using Eigen::ArrayXd;
using Eigen::Index;

inline constexpr double kLn2 = 0.6931471805599453094;
inline constexpr double kLog2E = 1.4426950408889634074;  // bits per nat
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double nats_to_bits(double x) { return x * kLog2E; }
inline double bits_to_nats(double x) { return x * kLn2; }

// log(e^a + e^b), tolerant of -inf operands
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(e^a - e^b) for a >= b; returns -inf when the difference vanishes
inline double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (a <= b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace wtb
