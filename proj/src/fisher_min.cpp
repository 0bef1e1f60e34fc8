#include "meanlb/fisher_min.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "meanlb/numeric.hpp"

namespace meanlb {

namespace {

// Sampled sign check of a strictly decreasing map before bisection.
template <class F>
void require_decreasing(F&& f, double lo, double hi, const char* what) {
  constexpr int kSamples = 65;
  double prev = f(lo);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = lo + (hi - lo) * i / kSamples;
    const double v = f(x);
    if (!(v < prev)) throw NumericError(std::string(what) + ": map is not decreasing on the bracket");
    prev = v;
  }
}

}  // namespace

double interval_mass_epsilon(double omega) {
  const double c = std::cos(0.5 * omega);
  return 2.0 * c * c / (omega * std::tan(0.5 * omega) + 2.0);
}

FisherSolveResult solve_omega(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("solve_omega: eps must lie in (0,1)");
  const double lo = 1e-9;
  const double hi = kPi - 1e-9;
  require_decreasing(interval_mass_epsilon, lo, hi, "solve_omega");
  auto f = [&](double w) { return interval_mass_epsilon(w) - eps; };
  double a = lo;
  double b = hi;
  // Outside the bracket the root sits closer to an end than 1e-9 allows.
  if (f(a) < 0.0) a = std::numeric_limits<double>::min();
  if (f(b) > 0.0) b = std::nextafter(kPi, 0.0);
  const RootResult r = bisect(f, a, b, 0.0, 2000);
  FisherSolveResult res;
  res.epsilon = eps;
  res.root = r.root;
  res.residual = r.residual;
  res.info = r.root * r.root / (1.0 + 2.0 / (r.root * std::tan(0.5 * r.root)));
  return res;
}

double huber_k_lhs(double k) { return 2.0 * normal_pdf(k) / k - 2.0 * normal_cdf(-k); }

namespace {

double solve_k(double eps) {
  const double lo = 1e-9;
  const double hi = 10.0;
  require_decreasing(huber_k_lhs, lo, hi, "solve_huber_k");
  const double target = eps / (1.0 - eps);
  return bisect([&](double k) { return huber_k_lhs(k) - target; }, lo, hi, 0.0, 2000).root;
}

void check_huber_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("huber: eps must lie in (0,1/2)");
}

}  // namespace

FisherSolveResult solve_huber_k(double eps) {
  check_huber_eps(eps);
  const double k = solve_k(eps);
  FisherSolveResult res;
  res.epsilon = eps;
  res.root = k;
  res.residual = std::abs(huber_k_lhs(k) - eps / (1.0 - eps));
  const double e = std::exp(-0.5 * k * k);
  res.info = (1.0 - eps) * (2.0 * normal_cdf(0.5 * k) - 1.0) +
             (1.0 - eps) / std::sqrt(2.0 * kPi) * (2.0 * e / k - 2.0 * k * e);
  return res;
}

double huber_least_favorable_info(double eps) {
  check_huber_eps(eps);
  const double k = solve_k(eps);
  return (1.0 - eps) * (2.0 * normal_cdf(k) - 1.0);
}

double huber_least_favorable_density(double x, double eps, double k) {
  const double ax = std::abs(x);
  if (ax <= k) return (1.0 - eps) * normal_pdf(x);
  return (1.0 - eps) * normal_pdf(k) * std::exp(-k * (ax - k));
}

double huber_least_favorable_derivative(double x, double eps, double k) {
  const double psi = std::abs(x) <= k ? x : (x > 0.0 ? k : -k);
  return -psi * huber_least_favorable_density(x, eps, k);
}

FisherNumericResult fisher_numeric(const std::function<double(double)>& f,
                                   const std::function<double(double)>& df, double lo,
                                   double hi) {
  if (!(lo < hi)) throw DomainError("fisher_numeric: need lo < hi");
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  constexpr unsigned kDepth = 20;
  constexpr double kTol = 1e-13;
  FisherNumericResult res;
  double err = 0.0;
  res.mass = Quad::integrate(f, lo, hi, kDepth, kTol, &err);
  if (!(std::abs(res.mass - 1.0) <= 1e-8)) {
    throw DomainError("fisher_numeric: density integrates to " + format_double(res.mass));
  }
  auto integrand = [&](double x) {
    const double fx = f(x);
    if (!(fx > 0.0)) return 0.0;
    const double d = df(x);
    return d * d / fx;
  };
  res.info = Quad::integrate(integrand, lo, hi, kDepth, kTol, &res.error);
  return res;
}

std::vector<FisherSweepRow> fisher_sweep(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi < 1.0 && lo <= hi) || points < 1 || (points == 1 && lo != hi)) {
    throw DomainError("fisher_sweep: need 0 < lo <= hi < 1 and points >= 2");
  }
  std::vector<FisherSweepRow> rows;
  rows.reserve(static_cast<std::size_t>(points));
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < points; ++i) {
    FisherSweepRow row;
    row.epsilon = points == 1 || i == 0 ? lo
                  : i + 1 == points    ? hi
                                       : std::exp(llo + (lhi - llo) * i / (points - 1));
    const FisherSolveResult w = solve_omega(row.epsilon);
    row.omega = w.root;
    row.I1 = w.info;
    if (row.epsilon < 0.5) {
      const FisherSolveResult k = solve_huber_k(row.epsilon);
      row.k = k.root;
      row.I2 = k.info;
      row.I2_huber = huber_least_favorable_info(row.epsilon);
    } else {
      row.k = row.I2 = row.I2_huber = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace meanlb
