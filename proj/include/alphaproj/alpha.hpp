#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "alphaproj/errors.hpp"

namespace alphaproj {

/// Divergence order alpha on the extended half line [0, +inf].
///
/// Orders 0 and +inf are evaluation-only: divergences accept them,
/// projection routines reject them.
class AlphaOrder {
 public:
  enum class Regime { zero, sub_one, one, super_one, infinity };

  explicit AlphaOrder(double value) : value_(value) {
    if (std::isnan(value) || value < 0.0) {
      throw ValidationError("alpha must be a real number >= 0, got " +
                            std::to_string(value));
    }
    if (std::isinf(value)) {
      regime_ = Regime::infinity;
    } else if (value == 0.0) {
      regime_ = Regime::zero;
    } else if (value == 1.0) {
      regime_ = Regime::one;
    } else if (value < 1.0) {
      regime_ = Regime::sub_one;
    } else {
      regime_ = Regime::super_one;
    }
  }

  static AlphaOrder zero() { return AlphaOrder(0.0); }
  static AlphaOrder infinity() {
    return AlphaOrder(std::numeric_limits<double>::infinity());
  }

  double value() const { return value_; }
  Regime regime() const { return regime_; }

  bool is_zero() const { return regime_ == Regime::zero; }
  bool is_one() const { return regime_ == Regime::one; }
  bool is_infinite() const { return regime_ == Regime::infinity; }
  /// Finite and strictly positive: the orders the projection theory covers.
  bool is_finite_positive() const {
    return regime_ != Regime::zero && regime_ != Regime::infinity;
  }

  /// Throws unless alpha is finite and positive.
  void require_finite_positive(const char* where) const {
    if (!is_finite_positive()) {
      throw ValidationError(std::string(where) +
                            ": alpha must lie in (0, inf), got " +
                            std::to_string(value_));
    }
  }

 private:
  double value_;
  Regime regime_;
};

}  // namespace alphaproj
