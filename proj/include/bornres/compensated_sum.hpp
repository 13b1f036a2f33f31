#pragma once

#include <cmath>
#include <complex>

namespace bornres {

// Neumaier variant of Kahan summation. Pole sums alternate in sign and span
// many decades, so every expansion accumulates through this.
class CompensatedSum {
 public:
  CompensatedSum &operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  [[nodiscard]] double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class CompensatedComplexSum {
 public:
  CompensatedComplexSum &operator+=(std::complex<double> z) {
    re_ += z.real();
    im_ += z.imag();
    return *this;
  }

  [[nodiscard]] std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace bornres
