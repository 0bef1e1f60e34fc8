#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace meanlb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an iterative solver fails to converge or a monotonicity
/// precondition of a root bracket is violated.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

/// log(sum(exp(xs))) with the usual max shift; -inf for an empty range.
double log_sum_exp(std::span<const double> xs);

struct RootResult {
  double root = 0.0;
  double residual = 0.0;  // |f(root)|
  int iterations = 0;
};

/// Bisection for a continuous function with f(lo) and f(hi) of opposite
/// signs. Stops when the bracket is narrower than `x_tol` (absolute) or when
/// it can no longer be split in floating point. Throws NumericError without a
/// sign change.
template <class F>
RootResult bisect(F&& f, double lo, double hi, double x_tol, int max_iter = 400) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw NumericError("bisect: no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  int it = 0;
  while (it < max_iter) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi) || hi - lo <= x_tol) break;
    const double fm = f(mid);
    ++it;
    if (fm == 0.0) return {mid, 0.0, it};
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  if (std::abs(flo) <= std::abs(fhi)) return {lo, std::abs(flo), it};
  return {hi, std::abs(fhi), it};
}

/// Standard normal density.
inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

/// Standard normal cdf through erfc, accurate in both tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace meanlb
