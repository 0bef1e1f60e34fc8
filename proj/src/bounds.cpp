#include "meanlb/bounds.hpp"

#include <cmath>

#include "meanlb/numeric.hpp"

namespace meanlb {

namespace {

void check_n(std::size_t n) {
  if (n == 0) throw DomainError("bound: n must be >= 1");
}
void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("bound: delta must lie in (0,1)");
}

// log(1/4δ), clamped at 0 with the flag set.
double log_quarter(double delta, bool& clamped) {
  const double v = -std::log(4.0 * delta);
  clamped = !(v > 0.0);
  return clamped ? 0.0 : v;
}

double fisher_factor(double delta, bool& clamped) {
  const double l = log_quarter(delta, clamped);
  return std::sqrt(1.0 + 2.0 * l) - 1.0;
}

}  // namespace

BoundResult finite_variance_bound_1(std::size_t n, double delta) {
  check_n(n);
  check_delta(delta);
  BoundResult r;
  const double l = log_quarter(delta, r.clamped);
  r.value = 0.5 * std::expm1(l / static_cast<double>(n));
  return r;
}

double finite_variance_rhs(std::size_t n, double y) {
  check_n(n);
  if (!(y >= 0.0)) throw DomainError("finite_variance_rhs: y must be >= 0");
  // log(√(1+2y) + √(2y)) = asinh(√(2y))
  return 0.5 * std::log1p(2.0 * y) +
         2.0 / std::sqrt(static_cast<double>(n)) * std::asinh(std::sqrt(2.0 * y));
}

BoundResult finite_variance_bound_2(std::size_t n, double delta) {
  check_delta(delta);
  return finite_variance_bound_2_log(n, std::log(delta));
}

BoundResult finite_variance_bound_2_log(std::size_t n, double log_delta) {
  check_n(n);
  if (!(log_delta < 0.0)) throw DomainError("bound: log delta must be < 0");
  BoundResult r;
  const double l = -std::log(4.0) - log_delta;
  r.clamped = !(l > 0.0);
  if (r.clamped) return r;
  const double target = l / static_cast<double>(n);
  auto f = [&](double y) { return finite_variance_rhs(n, y) - target; };
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  while (hi > 1e-300 && f(0.5 * hi) >= 0.0) hi *= 0.5;
  const RootResult root = bisect(f, 0.5 * hi, hi, 1e-12 * hi);
  r.value = root.root;
  r.residual = root.residual;
  return r;
}

BoundResult gaussian_bound(std::size_t n, double delta) {
  check_n(n);
  check_delta(delta);
  BoundResult r;
  r.value = log_quarter(delta, r.clamped) / (2.0 * static_cast<double>(n));
  return r;
}

double laplace_floor(std::size_t n) {
  check_n(n);
  return 0.25 * std::exp(-4.0 * static_cast<double>(n));
}

bool laplace_feasible(std::size_t n, double delta) {
  check_delta(delta);
  return delta >= laplace_floor(n);
}

BoundResult laplace_bound(std::size_t n, double delta) {
  BoundResult r;
  r.kind = BoundKind::delta_floor;
  r.value = laplace_floor(n);
  r.feasible = laplace_feasible(n, delta);
  return r;
}

double laplace_root_function(double x) {
  return 0.25 * x * x - std::exp(-2.0 * x) - 2.0 * x + 1.0;
}

double laplace_root() {
  // Non-increasing on [0, log(8)/2] from 0, convex beyond and positive at 8.
  return bisect(laplace_root_function, 0.5 * std::log(8.0), 8.0, 1e-14).root;
}

BoundResult moment_alpha_bound(std::size_t n, double delta, double alpha) {
  check_n(n);
  check_delta(delta);
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("moment_alpha_bound: alpha must lie in (0,1)");
  BoundResult r;
  r.kind = BoundKind::width;
  const double l = -std::log(2.0 * delta);
  if (!(l > 0.0)) {
    r.clamped = true;
    return r;
  }
  r.value = std::pow(2.0, -1.0 / (1.0 + alpha)) *
            std::pow(l / static_cast<double>(n), alpha / (1.0 + alpha));
  return r;
}

BoundResult log_lipschitz_bound(std::size_t n, double delta, double L) {
  check_n(n);
  check_delta(delta);
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("log_lipschitz_bound: L must be > 0");
  BoundResult r;
  r.kind = BoundKind::width;
  const double l = log_quarter(delta, r.clamped);
  const double inner = -std::expm1(-l / (2.0 * static_cast<double>(n)));
  r.value = std::log1p(std::sqrt(4.0 * inner)) / L;
  return r;
}

BoundResult fisher_bound(double delta, double I) {
  check_delta(delta);
  if (!(I > 0.0) || !std::isfinite(I)) throw DomainError("fisher_bound: I must be > 0");
  BoundResult r;
  r.kind = BoundKind::width_sqrt_n;
  r.value = fisher_factor(delta, r.clamped) / std::sqrt(I);
  return r;
}

BoundResult bounded_support_bound(double delta, double a, double b) {
  check_delta(delta);
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("bounded_support_bound: need finite a < b");
  }
  BoundResult r;
  r.kind = BoundKind::width_sqrt_n;
  r.value = (b - a) / kPi * fisher_factor(delta, r.clamped);
  return r;
}

double semi_bounded_constant() { return 9.0 - 24.0 / kPi; }

BoundResult semi_bounded_bound(double delta, double variance) {
  check_delta(delta);
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw DomainError("semi_bounded_bound: variance must be > 0");
  }
  BoundResult r;
  r.kind = BoundKind::width_sqrt_n;
  r.value = std::sqrt(variance / semi_bounded_constant()) * fisher_factor(delta, r.clamped);
  return r;
}

BoundResult compute_bound(const BoundQuery& q) {
  switch (q.cls) {
    case BoundClass::gaussian: return gaussian_bound(q.n, q.delta);
    case BoundClass::laplace: return laplace_bound(q.n, q.delta);
    case BoundClass::finite_variance_1: return finite_variance_bound_1(q.n, q.delta);
    case BoundClass::finite_variance_2: return finite_variance_bound_2(q.n, q.delta);
    case BoundClass::moment_alpha: return moment_alpha_bound(q.n, q.delta, q.alpha);
    case BoundClass::log_lipschitz: return log_lipschitz_bound(q.n, q.delta, q.L);
    case BoundClass::fisher: return fisher_bound(q.delta, q.I);
    case BoundClass::bounded_support: return bounded_support_bound(q.delta, q.a, q.b);
    case BoundClass::semi_bounded: return semi_bounded_bound(q.delta, q.variance);
  }
  throw DomainError("compute_bound: unknown class");
}

std::string to_string(BoundClass c) {
  switch (c) {
    case BoundClass::gaussian: return "gaussian";
    case BoundClass::laplace: return "laplace";
    case BoundClass::finite_variance_1: return "finite_variance_1";
    case BoundClass::finite_variance_2: return "finite_variance_2";
    case BoundClass::moment_alpha: return "moment_alpha";
    case BoundClass::log_lipschitz: return "log_lipschitz";
    case BoundClass::fisher: return "fisher";
    case BoundClass::bounded_support: return "bounded_support";
    case BoundClass::semi_bounded: return "semi_bounded";
  }
  return "?";
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::variance_y: return "y";
    case BoundKind::width: return "width";
    case BoundKind::width_sqrt_n: return "width_sqrt_n";
    case BoundKind::delta_floor: return "delta_floor";
  }
  return "?";
}

BoundClass parse_bound_class(std::string_view name) {
  for (BoundClass c : {BoundClass::gaussian, BoundClass::laplace, BoundClass::finite_variance_1,
                       BoundClass::finite_variance_2, BoundClass::moment_alpha,
                       BoundClass::log_lipschitz, BoundClass::fisher,
                       BoundClass::bounded_support, BoundClass::semi_bounded}) {
    if (to_string(c) == name) return c;
  }
  throw DomainError("unknown bound class '" + std::string(name) + "'");
}

std::vector<SweepRow> sweep_delta(const BoundQuery& base, double lo, double hi, int steps) {
  check_delta(lo);
  check_delta(hi);
  if (!(lo <= hi)) throw DomainError("sweep_delta: need lo <= hi");
  if (steps < 1 || (steps == 1 && lo != hi)) throw DomainError("sweep_delta: need steps >= 2");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < steps; ++i) {
    BoundQuery q = base;
    q.delta = steps == 1 || i == 0 ? lo
              : i + 1 == steps    ? hi
                               : std::exp(llo + (lhi - llo) * i / (steps - 1));
    rows.push_back({q, compute_bound(q)});
  }
  return rows;
}

}  // namespace meanlb
