#pragma once

#include <functional>
#include <vector>

namespace meanlb {

struct FisherSolveResult {
  double epsilon = 0.0;
  double root = 0.0;  // ω or k
  double info = 0.0;
  double residual = 0.0;
};

/// ε(ω) = 2cos²(ω/2)/(ω tan(ω/2) + 2) on (0, π), decreasing from 1 to 0.
double interval_mass_epsilon(double omega);
/// ω with ε(ω) = eps and I₁ = ω²/(1 + 2/(ω tan(ω/2))). Requires 0 < eps < 1.
FisherSolveResult solve_omega(double eps);

/// 2φ(k)/k - 2Φ(-k), decreasing in k > 0.
double huber_k_lhs(double k);
/// k with huber_k_lhs(k) = eps/(1-eps) and I₂ evaluated from the lemma's
/// display as written, (1-ε)(2Φ(k/2) - 1) + (1-ε)(2e^{-k²/2}/k - 2k e^{-k²/2})/√(2π).
/// Requires 0 < eps < 1/2.
FisherSolveResult solve_huber_k(double eps);
/// Fisher information of Huber's least favourable density at the same k,
/// (1-ε)(2Φ(k) - 1); used to cross-check the display above.
double huber_least_favorable_info(double eps);
/// Huber's least favourable density and its derivative for a given (ε, k).
double huber_least_favorable_density(double x, double eps, double k);
double huber_least_favorable_derivative(double x, double eps, double k);

struct FisherNumericResult {
  double info = 0.0;
  double mass = 0.0;   // ∫ f over the support
  double error = 0.0;  // quadrature error estimate of info
};

/// ∫ f'(x)²/f(x) dx over [lo, hi] (infinite ends allowed) by adaptive
/// Gauss-Kronrod quadrature, with the integrand set to 0 where f(x) = 0.
/// Throws DomainError if ∫ f differs from 1 by more than 1e-8 or lo >= hi.
FisherNumericResult fisher_numeric(const std::function<double(double)>& f,
                                   const std::function<double(double)>& df, double lo,
                                   double hi);

struct FisherSweepRow {
  double epsilon = 0.0;
  double omega = 0.0;
  double I1 = 0.0;
  double k = 0.0;      // NaN when ε >= 1/2
  double I2 = 0.0;
  double I2_huber = 0.0;
};

/// `points` log-spaced ε over [lo, hi] (defaults: 97 points on [0.01, 0.49]).
std::vector<FisherSweepRow> fisher_sweep(double lo = 0.01, double hi = 0.49, int points = 97);

}  // namespace meanlb
