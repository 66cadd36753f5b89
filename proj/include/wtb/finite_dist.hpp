#pragma once

#include "wtb/common.hpp"

namespace wtb::metrics {

// Probability mass function on an indexed finite set.
struct FiniteDist {
  ArrayXd p;

  FiniteDist() = default;
  explicit FiniteDist(ArrayXd probs) : p(std::move(probs)) { validate(); }

  static FiniteDist uniform(Index n) {
    return FiniteDist(ArrayXd::Constant(n, 1.0 / static_cast<double>(n)));
  }

  Index size() const { return p.size(); }
  double operator[](Index i) const { return p[i]; }

  void validate() const {
    require(p.size() > 0, "FiniteDist: empty support");
    require((p >= -1e-15).all(), "FiniteDist: negative probability");
    require(std::fabs(p.sum() - 1.0) <= 1e-12, "FiniteDist: probabilities must sum to 1");
  }
};

}  // namespace wtb::metrics
