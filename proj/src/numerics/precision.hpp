#pragma once

#include "numerics/errors.hpp"
#include "numerics/real.hpp"

#include <cmath>

namespace wml {

struct PrecisionConfig {
  int digits = 50;
  double quad_rel_tol = 1e-40;
  double tail_threshold = 1e-60;

  static PrecisionConfig with_digits(int d) {
    PrecisionConfig c;
    c.digits = d;
    c.quad_rel_tol = std::pow(10.0, -(d - 10));
    c.tail_threshold = std::pow(10.0, -(d + 10));
    return c;
  }

  void validate() const {
    require(digits >= 30, "digits must be at least 30");
    require(digits <= 2000, "digits must be at most 2000");
    require(quad_rel_tol > 0, "quad_rel_tol must be positive");
    require(tail_threshold > 0, "tail_threshold must be positive");
  }

  // Ten guard digits on top of the requested significance.
  mpfr_prec_t working_bits() const { return digits_to_bits(digits + 10); }
};

class WorkingPrecision : public PrecisionScope {
public:
  explicit WorkingPrecision(const PrecisionConfig& cfg) : PrecisionScope(cfg.working_bits()) {}
};

}  // namespace wml
