#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace meanlb {

enum class BoundClass {
  gaussian,
  laplace,
  finite_variance_1,
  finite_variance_2,
  moment_alpha,
  log_lipschitz,
  fisher,
  bounded_support,
  semi_bounded,
};

/// Units of BoundResult::value.
///  variance_y  : y, the width is sqrt(2 σ² y)
///  width       : ε, absolute width
///  width_sqrt_n: η, the width is η/sqrt(n)
///  delta_floor : smallest δ compatible with the class
enum class BoundKind { variance_y, width, width_sqrt_n, delta_floor };

struct BoundQuery {
  BoundClass cls = BoundClass::gaussian;
  std::size_t n = 1;
  double delta = 0.05;
  double alpha = 0.5;     // moment_alpha
  double L = 1.0;         // log_lipschitz
  double I = 1.0;         // fisher
  double a = 0.0;         // bounded_support
  double b = 1.0;
  double variance = 1.0;  // semi_bounded
};

struct BoundResult {
  double value = 0.0;
  BoundKind kind = BoundKind::variance_y;
  double residual = 0.0;
  bool feasible = true;  // laplace: δ above the floor
  bool clamped = false;  // δ beyond the positivity threshold, value set to 0
};

// Every calculator throws DomainError for n == 0, δ outside (0,1) or
// out-of-domain class parameters.

/// (1/2)(exp((1/n) log(1/4δ)) - 1); 0 (clamped) for δ >= 1/4.
BoundResult finite_variance_bound_1(std::size_t n, double delta);
/// Root in y of (1/2) log(1+2y) + (2/√n) log(√(1+2y) + √(2y)) = (1/n) log(1/4δ).
BoundResult finite_variance_bound_2(std::size_t n, double delta);
/// The same with δ given as log δ (< 0), for δ below the double range.
BoundResult finite_variance_bound_2_log(std::size_t n, double log_delta);
/// Right-hand side of the display above.
double finite_variance_rhs(std::size_t n, double y);
/// (1/(2n)) log(1/4δ).
BoundResult gaussian_bound(std::size_t n, double delta);
/// e^{-4n}/4.
double laplace_floor(std::size_t n);
bool laplace_feasible(std::size_t n, double delta);
BoundResult laplace_bound(std::size_t n, double delta);
/// x ↦ x²/4 - e^{-2x} - 2x + 1, the scalar function of the Laplace analysis,
/// and its positive root (≈ 7.4641).
double laplace_root_function(double x);
double laplace_root();
/// 2^{-1/(1+α)} ((1/n) log(1/2δ))^{α/(1+α)}; 0 for δ >= 1/2.
BoundResult moment_alpha_bound(std::size_t n, double delta, double alpha);
/// (1/L) log(1 + sqrt(4 (1 - exp(-log(1/4δ)/(2n))))); 0 for δ >= 1/4.
BoundResult log_lipschitz_bound(std::size_t n, double delta, double L);
/// (1/√I)(sqrt(1 + 2 log(1/4δ)) - 1); 0 for δ >= 1/4.
BoundResult fisher_bound(double delta, double I);
/// ((b-a)/π)(sqrt(1 + 2 log(1/4δ)) - 1).
BoundResult bounded_support_bound(double delta, double a, double b);
/// 9 - 24/π.
double semi_bounded_constant();
/// sqrt(variance/(9 - 24/π)) (sqrt(1 + 2 log(1/4δ)) - 1).
BoundResult semi_bounded_bound(double delta, double variance);

BoundResult compute_bound(const BoundQuery& q);

std::string to_string(BoundClass c);
std::string to_string(BoundKind k);
/// Throws DomainError for unknown names.
BoundClass parse_bound_class(std::string_view name);

struct SweepRow {
  BoundQuery query;
  BoundResult result;
};

/// compute_bound over `steps` log-spaced δ from lo to hi (inclusive).
std::vector<SweepRow> sweep_delta(const BoundQuery& base, double lo, double hi, int steps);

}  // namespace meanlb
