#include "meanlb/kinf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "meanlb/numeric.hpp"
#include "meanlb/parallel.hpp"

namespace meanlb {

double MomentConstraints::centered_bound() const {
  return centering == Centering::about_m ? B : B - m * m;
}

void validate(const MomentConstraints& cons) {
  if (!std::isfinite(cons.m)) throw DomainError("moment constraints: m must be finite");
  if (!(cons.B > 0.0) || !std::isfinite(cons.B)) {
    throw DomainError("moment constraints: second-moment bound B must be > 0");
  }
  if (cons.centering == Centering::raw && cons.B < cons.m * cons.m) {
    const bool empty = cons.mean_kind == MeanKind::equal ||
                       (cons.mean_kind == MeanKind::at_most && cons.m <= 0.0) ||
                       (cons.mean_kind == MeanKind::at_least && cons.m >= 0.0);
    if (empty) {
      throw DomainError("moment constraints: empty set (E[X²] <= B < m² with the mean pinned at m)");
    }
  }
}

namespace {

// The dual over the unit disk. With z = x - m and u = z / sqrt(B') the
// substitution λ₁ = a / sqrt(B'), λ₂ = (1 + b) / (2B') turns the log argument
// into w(u) = (1 - b)/2 + a u + (1 + b) u²/2, and the nonnegativity of the
// quadratic into a² + b² <= 1. A nonnegative raw mean multiplier adds the
// half-plane a >= s (1 + b).
struct DiskProblem {
  std::vector<double> u;
  bool halfplane = false;
  double s = 0.0;
};

struct DiskSolution {
  double a = 0.0;
  double b = -1.0;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

double disk_objective(const std::vector<double>& u, double a, double b) {
  CompensatedSum acc;
  for (double ui : u) {
    const double w = 0.5 * (1.0 - b) + a * ui + 0.5 * (1.0 + b) * ui * ui;
    if (!(w > 0.0)) return -kInf;
    acc.add(std::log(w));
  }
  return acc.value() / static_cast<double>(u.size());
}

DiskSolution solve_disk(const DiskProblem& pr, double tol) {
  constexpr int kMaxIter = 500;
  const auto& u = pr.u;
  const double n = static_cast<double>(u.size());
  const double mc = pr.halfplane ? 2.0 : 1.0;
  const double s = pr.s;

  // Start strictly inside: the disk centre, or for the half-plane a point
  // halfway between the chord through (0,-1) and the far arc.
  Eigen::Vector2d v(0.0, 0.0);
  if (pr.halfplane) {
    const double q = 1.0 + s * s;
    const double rq = std::sqrt(q);
    const double sagitta = 1.0 - std::abs(s) / rq;
    v << s / q + 0.5 * sagitta / rq, -s * s / q - 0.5 * sagitta * s / rq;
  }

  auto slack_disk = [](const Eigen::Vector2d& p) {
    const double r = std::hypot(p(0), p(1));
    return (1.0 - r) * (1.0 + r);
  };
  auto slack_half = [&](const Eigen::Vector2d& p) { return p(0) - s * (1.0 + p(1)); };

  auto barrier = [&](const Eigen::Vector2d& p, double mu) {
    const double d = slack_disk(p);
    if (!(d > 0.0)) return -kInf;
    double val = mu * std::log(d);
    if (pr.halfplane) {
      const double h = slack_half(p);
      if (!(h > 0.0)) return -kInf;
      val += mu * std::log(h);
    }
    const double obj = disk_objective(u, p(0), p(1));
    return obj == -kInf ? -kInf : obj + val;
  };

  int iterations = 0;
  double mu = 0.1;
  const Eigen::Vector2d hdir(1.0, -s);
  while (true) {
    for (int inner = 0; inner < 100; ++inner) {
      Eigen::Vector2d grad = Eigen::Vector2d::Zero();
      Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
      for (double ui : u) {
        const double w = 0.5 * (1.0 - v(1)) + v(0) * ui + 0.5 * (1.0 + v(1)) * ui * ui;
        const Eigen::Vector2d gw(ui, 0.5 * (ui * ui - 1.0));
        grad += gw / w;
        hess -= gw * gw.transpose() / (w * w);
      }
      grad /= n;
      hess /= n;
      const double d = slack_disk(v);
      grad -= mu * 2.0 * v / d;
      hess -= mu * (2.0 / d * Eigen::Matrix2d::Identity() + 4.0 * v * v.transpose() / (d * d));
      if (pr.halfplane) {
        const double h = slack_half(v);
        grad += mu * hdir / h;
        hess -= mu * hdir * hdir.transpose() / (h * h);
      }
      const Eigen::Vector2d step = -hess.ldlt().solve(grad);
      const double decrement = grad.dot(step);
      if (!std::isfinite(decrement)) throw NumericError("kinf_dual: Newton system is singular");
      if (decrement <= 0.02 * tol) break;
      if (++iterations > kMaxIter) {
        throw NumericError("kinf_dual: no convergence in " + std::to_string(kMaxIter) +
                           " Newton steps");
      }
      const double f0 = barrier(v, mu);
      double t = 1.0;
      while (t > 1e-20) {
        const Eigen::Vector2d cand = v + t * step;
        const double f1 = barrier(cand, mu);
        if (f1 >= f0 + 0.25 * t * decrement) break;
        t *= 0.5;
      }
      if (t <= 1e-20) break;  // no further progress possible in floating point
      v += t * step;
    }
    if (mc * mu <= tol) break;
    mu *= 0.1;
  }

  DiskSolution out;
  out.iterations = iterations;
  out.residual = mc * mu;
  const double val = disk_objective(u, v(0), v(1));
  if (val > 0.0) {
    out.a = v(0);
    out.b = v(1);
    out.value = val;
  }
  return out;
}

// sup over λ in [0, 1/B] of (1/n) Σ log(1 + λ (x_i² - B)): the raw at_most case
// where m >= sqrt(B) makes the mean constraint redundant.
DualCertificate second_moment_only(std::span<const double> x, double B) {
  const double n = static_cast<double>(x.size());
  auto deriv = [&](double lam) {
    CompensatedSum acc;
    for (double xi : x) {
      const double g = xi * xi - B;
      acc.add(g / (1.0 + lam * g));
    }
    return acc.value() / n;
  };
  auto value = [&](double lam) {
    CompensatedSum acc;
    for (double xi : x) acc.add(std::log1p(lam * (xi * xi - B)));
    return acc.value() / n;
  };
  DualCertificate c;
  if (deriv(0.0) <= 0.0) return c;
  const double hi = (1.0 - 1e-15) / B;
  double lam = hi;
  if (deriv(hi) < 0.0) lam = bisect(deriv, 0.0, hi, 1e-16 / B).root;
  c.lambda2 = lam;
  c.value = std::max(0.0, value(lam));
  c.residual = 0.0;
  return c;
}

}  // namespace

bool certificate_in_lambda(double lambda1, double lambda2, const MomentConstraints& cons,
                           double rel_tol) {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2)) return false;
  if (lambda2 < 0.0) return false;
  const double bp = cons.centered_bound();
  if (lambda2 == 0.0) {
    if (lambda1 != 0.0) return false;
  } else {
    const double rhs = 4.0 * lambda2 * (1.0 - lambda2 * bp);
    const double scale = 4.0 * lambda2 * (1.0 + lambda2 * std::abs(bp));
    if (lambda1 * lambda1 > rhs + rel_tol * scale) return false;
  }
  const double raw_mean = cons.centering == Centering::raw ? lambda1 - 2.0 * cons.m * lambda2
                                                           : lambda1;
  const double mscale = rel_tol * (std::abs(lambda1) + std::abs(2.0 * cons.m * lambda2));
  if (cons.mean_kind == MeanKind::at_most && raw_mean < -mscale) return false;
  if (cons.mean_kind == MeanKind::at_least && raw_mean > mscale) return false;
  return true;
}

double dual_objective(std::span<const double> sample, const MomentConstraints& cons,
                      double lambda1, double lambda2) {
  const double bp = cons.centered_bound();
  CompensatedSum acc;
  for (double x : sample) {
    const double z = x - cons.m;
    const double w = 1.0 + lambda1 * z + lambda2 * (z * z - bp);
    if (!(w > 0.0)) return -kInf;
    acc.add(std::log(w));
  }
  return acc.value() / static_cast<double>(sample.size());
}

DualCertificate kinf_dual(std::span<const double> sample, const MomentConstraints& cons,
                          double tol) {
  validate(cons);
  if (sample.empty()) throw DomainError("kinf_dual: empty sample");
  if (!(tol > 0.0)) throw DomainError("kinf_dual: tol must be > 0");
  for (double x : sample) {
    if (!std::isfinite(x)) throw DomainError("kinf_dual: sample contains a non-finite value");
  }

  // at_least is at_most for the negated data.
  const bool negate = cons.mean_kind == MeanKind::at_least;
  const double m = negate ? -cons.m : cons.m;
  std::vector<double> x(sample.begin(), sample.end());
  if (negate) {
    for (double& xi : x) xi = -xi;
  }
  const bool equal = cons.mean_kind == MeanKind::equal;
  const bool raw = cons.centering == Centering::raw;
  const double bp = cons.centered_bound();

  DualCertificate cert;
  if (raw && !equal && bp <= 0.0 && m > 0.0) {
    cert = second_moment_only(x, cons.B);
    cert.lambda1 = 2.0 * m * cert.lambda2;
  } else if (bp <= 0.0) {
    // Only the point mass at m is allowed.
    const bool all_m = std::all_of(x.begin(), x.end(), [m](double xi) { return xi == m; });
    cert.value = all_m ? 0.0 : kInf;
  } else {
    const double scale = std::sqrt(bp);
    DiskProblem pr;
    pr.u.reserve(x.size());
    for (double xi : x) pr.u.push_back((xi - m) / scale);
    pr.halfplane = !equal;
    pr.s = raw ? m / scale : 0.0;
    const DiskSolution sol = solve_disk(pr, tol);
    cert.lambda1 = sol.a / scale;
    cert.lambda2 = (1.0 + sol.b) / (2.0 * bp);
    cert.value = sol.value;
    cert.residual = sol.residual;
    cert.iterations = sol.iterations;
  }
  if (negate) cert.lambda1 = -cert.lambda1;
  cert.feasible = certificate_in_lambda(cert.lambda1, cert.lambda2, cons, 1e-9);
  return cert;
}

DualCertificate kinf_dual(const Sample& sample, const MomentConstraints& cons, double tol) {
  return kinf_dual(std::span<const double>(sample.values), cons, tol);
}

namespace {

// A strictly feasible starting F on the grid: a two-point (or one-point)
// distribution minimising E[g2] at a chosen level of E[g1], mixed with a small
// uniform component so that every atom is positive. Returns an empty vector
// when the relaxed constraints have no interior on the grid.
std::vector<double> strict_start(const std::vector<double>& g1, const std::vector<double>& g2,
                                 MeanKind kind) {
  const std::size_t N = g1.size();
  CompensatedSum su1;
  double g1_span = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    su1.add(g1[j]);
    g1_span = std::max(g1_span, std::abs(g1[j]));
  }
  const double u1 = su1.value() / static_cast<double>(N);

  for (double eps = 0.25; eps > 1e-14; eps *= 0.25) {
    const double tau = kind == MeanKind::equal ? 0.0 : 1e-3 * eps * (1.0 + g1_span);
    const double base = -eps * u1 / (1.0 - eps);
    const double level = kind == MeanKind::at_most   ? base - tau
                         : kind == MeanKind::at_least ? base + tau
                                                      : base;
    // Lowest E[g2] over point masses and pairs meeting the mean requirement.
    double best = kInf;
    std::size_t bj = N;
    std::size_t bk = N;
    double btheta = 1.0;
    for (std::size_t j = 0; j < N; ++j) {
      const bool ok = (kind == MeanKind::at_most && g1[j] <= level) ||
                      (kind == MeanKind::at_least && g1[j] >= level) || g1[j] == level;
      if (ok && g2[j] < best) {
        best = g2[j];
        bj = j;
        bk = j;
        btheta = 1.0;
      }
    }
    for (std::size_t j = 0; j < N; ++j) {
      if (!(g1[j] < level)) continue;
      for (std::size_t k = 0; k < N; ++k) {
        if (!(g1[k] > level)) continue;
        const double theta = (g1[k] - level) / (g1[k] - g1[j]);
        const double v = theta * g2[j] + (1.0 - theta) * g2[k];
        if (v < best) {
          best = v;
          bj = j;
          bk = k;
          btheta = theta;
        }
      }
    }
    if (bj == N) continue;
    std::vector<double> f(N, eps / static_cast<double>(N));
    f[bj] += (1.0 - eps) * btheta;
    f[bk] += (1.0 - eps) * (1.0 - btheta);
    CompensatedSum e1;
    CompensatedSum e2;
    for (std::size_t j = 0; j < N; ++j) {
      e1.add(f[j] * g1[j]);
      e2.add(f[j] * g2[j]);
    }
    const bool mean_ok = kind == MeanKind::at_most    ? e1.value() < 0.0
                         : kind == MeanKind::at_least ? e1.value() > 0.0
                                                      : true;
    if (mean_ok && e2.value() < 0.0) return f;
  }
  return {};
}

}  // namespace

PrimalOracleResult kinf_primal_oracle(std::span<const double> sample,
                                      const MomentConstraints& cons,
                                      std::span<const double> grid) {
  validate(cons);
  if (sample.empty()) throw DomainError("kinf_primal_oracle: empty sample");

  PrimalOracleResult res;
  res.grid.assign(grid.begin(), grid.end());
  res.grid.insert(res.grid.end(), sample.begin(), sample.end());
  std::sort(res.grid.begin(), res.grid.end());
  res.grid.erase(std::unique(res.grid.begin(), res.grid.end()), res.grid.end());
  const std::size_t N = res.grid.size();

  std::vector<double> p(N, 0.0);
  for (double x : sample) {
    const auto it = std::lower_bound(res.grid.begin(), res.grid.end(), x);
    p[static_cast<std::size_t>(it - res.grid.begin())] += 1.0 / static_cast<double>(sample.size());
  }

  const double eta = 1e-13 * (1.0 + cons.B);
  const MeanKind kind = cons.mean_kind;
  const bool has_s1 = kind != MeanKind::equal;
  // Mean row uses g1 = x - m ∓ η; the slack sign puts the inequality into
  // equality form Σ f g1 + sign·s1 = 0.
  const double sign1 = kind == MeanKind::at_most ? 1.0 : -1.0;
  std::vector<double> g1(N);
  std::vector<double> g2(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double x = res.grid[j];
    g1[j] = x - cons.m - (kind == MeanKind::at_most ? eta : (kind == MeanKind::at_least ? -eta : 0.0));
    const double y = cons.centering == Centering::about_m ? x - cons.m : x;
    g2[j] = y * y - cons.B - eta;
  }
  const std::vector<double> f0 = strict_start(g1, g2, kind);
  if (f0.empty()) {
    res.grid_feasible = false;
    res.value = kInf;
    res.weights.assign(N, 0.0);
    return res;
  }

  // Variables: f (N), then s1 (if present), then s2.
  const std::size_t nv = N + (has_s1 ? 2 : 1);
  const std::size_t i_s1 = N;
  const std::size_t i_s2 = has_s1 ? N + 1 : N;
  auto row = [&](int r, std::size_t k) -> double {
    if (k < N) return r == 0 ? 1.0 : (r == 1 ? g1[k] : g2[k]);
    if (k == i_s2) return r == 2 ? 1.0 : 0.0;
    return r == 1 ? sign1 : 0.0;  // s1
  };
  auto primal_residual = [&](const std::vector<double>& z) {
    CompensatedSum r0, r1, r2;
    r0.add(-1.0);
    for (std::size_t j = 0; j < N; ++j) {
      r0.add(z[j]);
      r1.add(z[j] * g1[j]);
      r2.add(z[j] * g2[j]);
    }
    if (has_s1) r1.add(sign1 * z[i_s1]);
    r2.add(z[i_s2]);
    return Eigen::Vector3d(r0.value(), r1.value(), r2.value());
  };

  std::vector<double> var(nv);
  std::copy(f0.begin(), f0.end(), var.begin());
  {
    CompensatedSum e1;
    CompensatedSum e2;
    for (std::size_t j = 0; j < N; ++j) {
      e1.add(f0[j] * g1[j]);
      e2.add(f0[j] * g2[j]);
    }
    if (has_s1) var[i_s1] = -sign1 * e1.value();
    var[i_s2] = -e2.value();
  }

  auto weight = [&](std::size_t k, double mu) { return k < N ? p[k] + mu : mu; };
  auto objective = [&](const std::vector<double>& z, double mu) {
    CompensatedSum acc;
    for (std::size_t k = 0; k < nv; ++k) acc.add(-weight(k, mu) * std::log(z[k]));
    return acc.value();
  };

  int iterations = 0;
  constexpr int kMaxIter = 5000;
  const double gap_target = 1e-11;
  constexpr double kMuFloor = 1e-14;
  double mu = 1.0;
  std::vector<double> hinv(nv);
  std::vector<double> grad(nv);
  std::vector<double> step(nv);
  std::vector<double> cand(nv);
  while (true) {
    for (int inner = 0; inner < 100; ++inner) {
      for (std::size_t k = 0; k < nv; ++k) {
        const double w = weight(k, mu);
        grad[k] = -w / var[k];
        hinv[k] = var[k] * var[k] / w;
      }
      // Newton step for the equality-constrained barrier problem; the
      // primal residual term only corrects rounding drift.
      const Eigen::Vector3d rp = primal_residual(var);
      Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
      Eigen::Vector3d rhs = rp;
      for (std::size_t k = 0; k < nv; ++k) {
        const Eigen::Vector3d a(row(0, k), row(1, k), row(2, k));
        S += hinv[k] * a * a.transpose();
        rhs -= hinv[k] * grad[k] * a;
      }
      // Jacobi scaling: inactive slacks put entries near 1/mu on the diagonal.
      Eigen::Vector3d dscale;
      for (int i = 0; i < 3; ++i) dscale(i) = S(i, i) > 0.0 ? 1.0 / std::sqrt(S(i, i)) : 1.0;
      const auto lu = (dscale.asDiagonal() * S * dscale.asDiagonal()).eval().fullPivLu();
      auto solve_s = [&](const Eigen::Vector3d& b) -> Eigen::Vector3d {
        return dscale.asDiagonal() * lu.solve((dscale.asDiagonal() * b).eval());
      };
      const Eigen::Vector3d nu = solve_s(rhs);
      for (std::size_t k = 0; k < N; ++k) {
        const double atnu = row(0, k) * nu(0) + row(1, k) * nu(1) + row(2, k) * nu(2);
        step[k] = -hinv[k] * (grad[k] + atnu);
      }
      // Iterative refinement of A·step = -rp; large 1/H entries of atoms
      // whose mass is fixed by the constraints amplify rounding in nu.
      for (int pass = 0; pass < 2; ++pass) {
        CompensatedSum q0, q1, q2;
        q0.add(-rp(0));
        q1.add(-rp(1));
        q2.add(-rp(2));
        for (std::size_t k = 0; k < nv; ++k) {
          const double sk = k < N ? step[k] : 0.0;
          q0.add(-row(0, k) * sk);
          q1.add(-row(1, k) * sk);
          q2.add(-row(2, k) * sk);
        }
        // Slacks absorb rows 1 and 2 below, so only the f-part matters here
        // when slacks are present.
        Eigen::Vector3d r(q0.value(), has_s1 ? 0.0 : q1.value(), 0.0);
        const Eigen::Vector3d dnu = solve_s(r);
        for (std::size_t k = 0; k < N; ++k) {
          step[k] += hinv[k] * (row(0, k) * dnu(0) + row(1, k) * dnu(1) + row(2, k) * dnu(2));
        }
      }
      // Slack steps come from the constraint rows: an inactive slack has a
      // huge 1/H entry that would amplify rounding in nu.
      CompensatedSum d1;
      CompensatedSum d2;
      d1.add(-rp(1));
      d2.add(-rp(2));
      for (std::size_t k = 0; k < N; ++k) {
        d1.add(-g1[k] * step[k]);
        d2.add(-g2[k] * step[k]);
      }
      if (has_s1) step[i_s1] = sign1 * d1.value();
      step[i_s2] = d2.value();
      double dec = 0.0;
      for (std::size_t k = 0; k < nv; ++k) dec += step[k] * step[k] / hinv[k];
      if (0.5 * dec <= 1e-3 * gap_target) break;
      if (++iterations > kMaxIter) throw NumericError("kinf_primal_oracle: no convergence");
      double t = 1.0;
      for (std::size_t k = 0; k < nv; ++k) {
        if (step[k] < 0.0) t = std::min(t, -0.99 * var[k] / step[k]);
      }
      const double f0v = objective(var, mu);
      while (t > 1e-12) {
        for (std::size_t k = 0; k < nv; ++k) cand[k] = var[k] + t * step[k];
        if (objective(cand, mu) <= f0v - 0.25 * t * dec) break;
        t *= 0.5;
      }
      if (t <= 1e-12) break;  // stalled at rounding level
      var.swap(cand);
    }
    if (static_cast<double>(nv) * mu <= gap_target || mu <= kMuFloor) break;
    mu *= 0.1;
  }

  res.iterations = iterations;
  res.weights.assign(var.begin(), var.begin() + static_cast<std::ptrdiff_t>(N));
  res.constraint_residual = primal_residual(var).lpNorm<Eigen::Infinity>();
  CompensatedSum kl;
  for (std::size_t j = 0; j < N; ++j) {
    if (p[j] > 0.0) kl.add(p[j] * (std::log(p[j]) - std::log(var[j])));
  }
  res.value = std::max(0.0, kl.value());
  return res;
}

PrimalOracleResult kinf_primal_refined(std::span<const double> sample,
                                       const MomentConstraints& cons, double spacing) {
  validate(cons);
  if (sample.empty()) throw DomainError("kinf_primal_refined: empty sample");
  if (!(spacing > 0.0)) throw DomainError("kinf_primal_refined: spacing must be > 0");
  const auto [mn_it, mx_it] = std::minmax_element(sample.begin(), sample.end());
  const double scale = std::sqrt(cons.B);
  const double lo = std::min(*mn_it, cons.m) - 4.0 * scale;
  const double hi = std::max(*mx_it, cons.m) + 4.0 * scale;

  std::vector<double> coarse;
  constexpr int kCoarse = 1001;
  for (int i = 0; i < kCoarse; ++i) coarse.push_back(lo + (hi - lo) * i / (kCoarse - 1));
  // Geometric tails: the extra atom of the optimal F can sit far out when it
  // carries little mass.
  constexpr int kTail = 200;
  for (int i = 1; i <= kTail; ++i) {
    const double d = scale * std::pow(1e4, static_cast<double>(i) / kTail);
    coarse.push_back(lo - d);
    coarse.push_back(hi + d);
  }
  std::sort(coarse.begin(), coarse.end());

  PrimalOracleResult res = kinf_primal_oracle(sample, cons, coarse);
  if (!res.grid_feasible) return res;

  std::vector<double> local;
  for (int pass = 0; pass < 8; ++pass) {
    // Heaviest atom of F that is not a sample point.
    std::size_t best = res.grid.size();
    double best_w = -1.0;
    for (std::size_t j = 0; j < res.grid.size(); ++j) {
      const bool in_sample =
          std::find(sample.begin(), sample.end(), res.grid[j]) != sample.end();
      if (!in_sample && res.weights[j] > best_w) {
        best_w = res.weights[j];
        best = j;
      }
    }
    if (best == res.grid.size()) break;
    const double left = best > 0 ? res.grid[best] - res.grid[best - 1] : 0.0;
    const double right = best + 1 < res.grid.size() ? res.grid[best + 1] - res.grid[best] : 0.0;
    const double gap = std::max(left, right);
    if (gap <= spacing * scale) break;
    const double a = res.grid[best] - 2.0 * left;
    const double b = res.grid[best] + 2.0 * right;
    local.clear();
    constexpr int kLocal = 201;
    for (int i = 0; i < kLocal; ++i) local.push_back(a + (b - a) * i / (kLocal - 1));
    std::vector<double> grid = coarse;
    grid.insert(grid.end(), local.begin(), local.end());
    res = kinf_primal_oracle(sample, cons, grid);
  }
  return res;
}

double concentration_threshold(std::size_t n, double delta) {
  if (n == 0) throw DomainError("concentration_threshold: n must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw DomainError("concentration_threshold: delta must lie in (0, 1]");
  }
  const double dn = static_cast<double>(n);
  return (1.0 + 2.0 * std::log1p(dn) - std::log(delta)) / dn;
}

ConcentrationReport verify_kinf_concentration(const ScenarioDist& dist, std::size_t n,
                                              double delta, std::size_t trials, Seed seed,
                                              unsigned workers) {
  if (trials == 0) throw DomainError("verify_kinf_concentration: trials must be >= 1");
  const Moments mom = moments(dist);
  ConcentrationReport rep;
  rep.trials = trials;
  rep.threshold = concentration_threshold(n, delta);
  std::vector<double> values(trials, 0.0);
  parallel_for(trials, workers, [&](std::size_t t) {
    const Sample s = sample(dist, n, seed, t);
    if (mom.variance > 0.0) {
      const MomentConstraints cons{MeanKind::at_most, mom.mean, mom.variance, Centering::about_m};
      values[t] = kinf_dual(s, cons).value;
    } else {
      const bool all_m = std::all_of(s.values.begin(), s.values.end(),
                                     [&](double x) { return x == mom.mean; });
      values[t] = all_m ? 0.0 : kInf;
    }
  });
  for (double v : values) {
    if (v >= rep.threshold) ++rep.exceed;
    rep.max_value = std::max(rep.max_value, v);
  }
  rep.rate = static_cast<double>(rep.exceed) / static_cast<double>(trials);
  rep.se = std::sqrt(rep.rate * (1.0 - rep.rate) / static_cast<double>(trials));
  return rep;
}

}  // namespace meanlb
