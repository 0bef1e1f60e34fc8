#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "meanlb/distributions.hpp"

namespace meanlb {

enum class MeanKind { at_most, at_least, equal };
enum class Centering { raw, about_m };

/// The set {F : E_F[X] (<=, >=, =) m, E_F[Y²] <= B} where Y = X - m for
/// about_m centering and Y = X for raw centering.
struct MomentConstraints {
  MeanKind mean_kind = MeanKind::at_most;
  double m = 0.0;
  double B = 1.0;
  Centering centering = Centering::about_m;

  /// Bound on E_F[(X - m)²] implied at mean m: B for about_m, B - m² for raw.
  double centered_bound() const;
};

/// Throws DomainError if B <= 0, m is not finite, or the set is empty
/// (raw centering with B < m² and a mean constraint that forces |E X| >= |m|).
void validate(const MomentConstraints& cons);

/// Dual point in centred coordinates: the dual objective is
///   (1/n) Σ log(1 + λ₁ (X_i - m) + λ₂ ((X_i - m)² - B'))
/// with B' = cons.centered_bound(). For raw centering the raw-coordinate
/// multiplier on X - m is λ₁ - 2mλ₂.
struct DualCertificate {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double value = 0.0;
  bool feasible = true;
  double residual = 0.0;  // bound on the distance of `value` to the dual optimum
  int iterations = 0;
};

/// Membership of (λ₁, λ₂) in the dual set for `cons`: λ₂ >= 0, the quadratic
/// 1 + λ₁ z + λ₂(z² - B') is nonnegative on R (λ₂ > 0 ⇒ λ₁² <= 4λ₂(1 - λ₂B');
/// λ₂ = 0 ⇒ λ₁ = 0) and the raw mean multiplier has the sign required by the
/// mean constraint. `rel_tol` scales the slack allowed in each inequality.
bool certificate_in_lambda(double lambda1, double lambda2, const MomentConstraints& cons,
                           double rel_tol = 1e-12);

/// Dual objective at (λ₁, λ₂); -inf when some log argument is <= 0.
double dual_objective(std::span<const double> sample, const MomentConstraints& cons,
                      double lambda1, double lambda2);

/// inf { KL(P̂, F) : F in the set } through its two-dimensional concave dual.
/// The dual set is mapped onto the unit disk and maximised by a log-barrier
/// Newton method; `residual` is the barrier's duality-gap bound (<= tol).
/// Throws DomainError for an empty sample or invalid constraints and
/// NumericError if Newton fails to converge in 500 steps.
DualCertificate kinf_dual(std::span<const double> sample, const MomentConstraints& cons,
                          double tol = 1e-9);
DualCertificate kinf_dual(const Sample& sample, const MomentConstraints& cons, double tol = 1e-9);

struct PrimalOracleResult {
  double value = 0.0;  // +inf when infeasible on the grid
  bool grid_feasible = true;
  std::vector<double> grid;     // sorted support actually used
  std::vector<double> weights;  // optimal F on `grid`
  double constraint_residual = 0.0;
  int iterations = 0;
};

/// Brute-force primal: minimises KL(P̂, F) over F supported on grid ∪ sample
/// by a primal barrier Newton method. The moment constraints are relaxed by
/// 1e-13·(1 + B) so that grids on which they can only hold with equality keep
/// an interior. An empty feasible set on the grid gives grid_feasible = false
/// and value = +inf rather than an error.
PrimalOracleResult kinf_primal_oracle(std::span<const double> sample,
                                      const MomentConstraints& cons,
                                      std::span<const double> grid);

/// The oracle on an automatically built grid: a wide coarse grid first, then
/// repeated local refinement around the heaviest atom that is not a sample
/// point until the local spacing is below spacing·sqrt(B).
PrimalOracleResult kinf_primal_refined(std::span<const double> sample,
                                       const MomentConstraints& cons, double spacing = 1e-3);

/// (1/n) log(e (n+1)² / δ). Requires n >= 1 and 0 < δ <= 1.
double concentration_threshold(std::size_t n, double delta);

struct ConcentrationReport {
  std::size_t trials = 0;
  std::size_t exceed = 0;
  double rate = 0.0;
  double se = 0.0;  // sqrt(rate (1 - rate) / trials)
  double threshold = 0.0;
  double max_value = 0.0;
};

/// Fraction of trials with kinf_dual(sample, {mean <= m, E(X-m)² <= σ²}) at
/// least concentration_threshold(n, δ), where m and σ² are the exact moments
/// of `dist`. Trial t uses sample(dist, n, seed, t); the report does not
/// depend on `workers`.
ConcentrationReport verify_kinf_concentration(const ScenarioDist& dist, std::size_t n,
                                              double delta, std::size_t trials, Seed seed,
                                              unsigned workers = 0);

}  // namespace meanlb
