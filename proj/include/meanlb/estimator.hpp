#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace meanlb {

/// (1/2)(exp((2/n) log(2e(n+1)²/δ)) - 1). Requires n >= 1 and 0 < δ < 1.
double y_schedule(std::size_t n, double delta);

struct MinKL {
  double y = 0.0;            // 0 means y_schedule(n, δ) chosen by the caller
  double c_grid_span = 1.0;  // bracket widening (in bracket widths) if no sign change
  int mu_grid_size = 129;
  double bisect_tol = 1e-6;  // relative to 1 + range(sample)
  double dual_tol = 1e-9;
  bool operator==(const MinKL&) const = default;
};
struct EmpiricalMean {
  bool operator==(const EmpiricalMean&) const = default;
};
struct MedianOfMeans {
  std::size_t blocks = 1;
  bool operator==(const MedianOfMeans&) const = default;
};
struct TrimmedMean {
  double trim_fraction = 0.0;
  bool operator==(const TrimmedMean&) const = default;
};

using EstimatorSpec = std::variant<MinKL, EmpiricalMean, MedianOfMeans, TrimmedMean>;

/// Throws DomainError for empty grids, y < 0, blocks == 0 or a trim fraction
/// outside [0, 1/2).
void validate(const EstimatorSpec& spec);

/// Short identifier: minkl, minkl(y=0.5), mean, mom(5), trimmed(0.1).
std::string to_string(const EstimatorSpec& spec);
/// Inverse of to_string; the extra minkl keys are mu_grid, tol and span.
/// Throws DomainError on malformed text.
EstimatorSpec parse_estimator(std::string_view text);

/// inf KL(P̂, F) over F with E_F[X] <= c - sqrt(2 y Var_F[X]). Computed as the
/// minimum over candidate means µ < c of the equal-mean projection with
/// variance bound (c - µ)²/(2y): a grid of `grid_size` points on
/// [min(sample, c) - 2·span, c), one golden-section refinement around the best
/// grid point and the µ → -∞ limit log(1 + 2y). Zero when P̂ itself belongs to
/// the set.
double dhat_left(std::span<const double> sample, double c, double y, int grid_size = 129,
                 double dual_tol = 1e-9);

/// dhat_left of the sample reflected about c, evaluated at c.
double dhat_right(std::span<const double> sample, double c, double y, int grid_size = 129,
                  double dual_tol = 1e-9);

struct MinKLResult {
  double estimate = 0.0;
  double y = 0.0;
  double lo = 0.0;  // final bracket: gap(lo) > 0 >= gap(hi)
  double hi = 0.0;
  double gap_lo = 0.0;  // dhat_left - dhat_right at the initial bracket ends
  double gap_hi = 0.0;
  int bisections = 0;
  bool widened = false;
};

/// sup{c : dhat_left(c) > dhat_right(c)} by bisection. The initial bracket is
/// mean ± sqrt(2y)·sd (population sd): at its right end P̂ lies in the left set
/// and at its left end in the right set, so the gap changes sign there.
/// Throws NumericError if the gap has no sign change even after one widening.
MinKLResult minkl_estimate(std::span<const double> sample, double y, const MinKL& opts = {});

/// dhat_left(c) > dhat_right(c), with early exits (the bisection's test).
bool minkl_gap_positive(std::span<const double> sample, double c, double y,
                        const MinKL& opts = {});

/// Whether |minkl_estimate - center| >= width, decided from the sign of the
/// non-increasing gap at center ± width: the estimate is >= center + width iff
/// the gap is positive there and <= center - width iff it is not positive
/// there (up to the bisection tolerance). Two gap evaluations instead of a
/// full bisection.
bool minkl_exceeds(std::span<const double> sample, double y, double center, double width,
                   const MinKL& opts = {});

/// Baselines. Median of means uses floor(n/blocks)-sized contiguous blocks with
/// the remainder folded into the last block and the midpoint of the two middle
/// block means for an even block count. Trimmed mean drops floor(trim·n)
/// values from each side. Throws DomainError for incompatible sizes.
double empirical_mean(std::span<const double> sample);
double median_of_means(std::span<const double> sample, std::size_t blocks);
double trimmed_mean(std::span<const double> sample, double trim_fraction);

/// Dispatch over the spec. For MinKL with y == 0 the caller must supply
/// y_fallback > 0 (normally y_schedule(n, δ)).
double estimate(const EstimatorSpec& spec, std::span<const double> sample,
                double y_fallback = 0.0);

}  // namespace meanlb
