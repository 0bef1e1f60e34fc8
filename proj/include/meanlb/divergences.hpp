#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "meanlb/distributions.hpp"

namespace meanlb {

/// A divergence value. `value` is +inf when the divergence is infinite.
/// `exact` is false for values produced by an iterative solver, in which case
/// `residual` carries the solver's final mismatch.
struct DivergenceValue {
  double value = 0.0;
  bool exact = true;
  double residual = 0.0;
};

/// Σ p log(p/q); +inf unless P << Q.
DivergenceValue kl_discrete(const DiscreteDist& p, const DiscreteDist& q);

/// -(1/(1-α)) log Σ p^α q^(1-α); +inf for mutually singular P, Q.
/// Throws DomainError unless 0 < α < 1.
DivergenceValue renyi_discrete(double alpha, const DiscreteDist& p, const DiscreteDist& q);

/// Hellinger distance H with H² = (1/2) Σ (√p - √q)².
double hellinger_discrete(const DiscreteDist& p, const DiscreteDist& q);
double hellinger_squared_discrete(const DiscreteDist& p, const DiscreteDist& q);

struct ChernoffResult {
  DivergenceValue divergence;
  DiscreteDist p_star;  // the minimising P (F itself when F == G)
  double alpha = 0.5;   // P* ∝ F^α G^(1-α)
  bool used_fallback = false;
};

/// inf_P max{KL(P,F), KL(P,G)}. The minimiser lies on the geometric
/// mixtures P_α ∝ F^α G^(1-α) restricted to the common support; α is found by
/// bisection on KL(P_α,F) - KL(P_α,G), which is non-increasing in α. The
/// monotonicity is checked on a coarse α grid first and golden-section search
/// on the max is used if it fails. Disjoint supports give +inf (p_star = F).
ChernoffResult chernoff_discrete(const DiscreteDist& f, const DiscreteDist& g, double tol = 1e-10);

/// D_{1/2} between N(mu1, s1²) and N(mu2, s2²).
double renyi_half_gaussian(double mu1, double s1, double mu2, double s2);

/// KL(Laplace(0,b), Laplace(delta,b)) = e^{-Δ/b} + Δ/b - 1 with Δ = |delta|.
double kl_laplace_shift(double delta, double b);

using PointEvent = std::function<bool(double)>;
using SampleEvent = std::function<bool(std::span<const double>)>;

struct DataProcessingReport {
  double p_event = 0.0;   // P(E)
  double q_event = 0.0;   // Q(E)
  double kl = 0.0;
  double kl_rhs = 0.0;    // P(E) log(1/Q(E)) - log 2
  double kl_slack = 0.0;  // kl - kl_rhs
  std::vector<double> alphas;
  std::vector<double> renyi_lhs;  // (1-α) D_α(P,Q)
  std::vector<double> renyi_rhs;  // min{α,1-α} log(1/max{P(E),Q(Eᶜ)}) - log 2
  double min_renyi_slack = 0.0;
  bool holds = true;
};

/// Checks KL(P,Q) >= P(E) log 1/Q(E) - log 2 and the Rényi form
/// (1-α) D_α(P,Q) >= min{α,1-α} log 1/max{P(E),Q(Eᶜ)} - log 2 for
/// α = 0.1, ..., 0.9. `tol` absorbs rounding in the comparison.
DataProcessingReport verify_data_processing(const DiscreteDist& p, const DiscreteDist& q,
                                            const PointEvent& event, double tol = 1e-12);

struct ChangeOfMeasureReport {
  double f_event = 0.0;       // F^n(E)
  double g_complement = 0.0;  // G^n(Eᶜ)
  double kl_pf = 0.0;
  double kl_pg = 0.0;
  double lhs = 0.0;  // 2 max{F^n(E), G^n(Eᶜ)} e^{n max KL + nβ}
  double rhs = 0.0;  // 1 - P^n(avg llr_F - KL > β) - P^n(avg llr_G - KL > β)
  double slack = 0.0;
  double kl_product_pf = 0.0;  // KL(P^n, F^n) by enumeration
  double kl_product_pg = 0.0;
  std::size_t outcomes = 0;    // total number of n-tuples enumerated
  bool holds = true;
};

inline constexpr std::size_t kMaxEnumeration = 1'000'000;

/// Exhaustive check of the three-point change-of-measure inequality on
/// Ω^n. Throws DomainError if any of |supp P|^n, |supp F|^n, |supp G|^n exceeds
/// kMaxEnumeration, or if n == 0 or beta <= 0.
ChangeOfMeasureReport verify_change_of_measure(const DiscreteDist& p, const DiscreteDist& f,
                                               const DiscreteDist& g, std::size_t n,
                                               const SampleEvent& event, double beta,
                                               double tol = 1e-12);

}  // namespace meanlb
