#include "meanlb/divergences.hpp"

#include <algorithm>
#include <cmath>

#include "meanlb/numeric.hpp"

namespace meanlb {

namespace {

const double kLog2 = std::log(2.0);

// Indices (i into a, j into b) of the points the two supports share.
struct Overlap {
  std::vector<std::size_t> ia;
  std::vector<std::size_t> ib;
};

Overlap overlap(const DiscreteDist& a, const DiscreteDist& b) {
  Overlap o;
  const auto pa = a.points();
  const auto pb = b.points();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < pa.size() && j < pb.size()) {
    if (pa[i] < pb[j]) {
      ++i;
    } else if (pb[j] < pa[i]) {
      ++j;
    } else {
      o.ia.push_back(i++);
      o.ib.push_back(j++);
    }
  }
  return o;
}

double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

// Odometer over the n-fold product of a support. `visit` receives the tuple
// of atom indices.
template <class Visit>
void enumerate_product(std::size_t k, std::size_t n, Visit&& visit) {
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    visit(std::span<const std::size_t>(idx));
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == k) idx[pos++] = 0;
    if (pos == n) break;
  }
}

std::size_t checked_power(std::size_t base, std::size_t n) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (r > kMaxEnumeration / base) {
      throw DomainError("verify_change_of_measure: product space exceeds " +
                        std::to_string(kMaxEnumeration) + " outcomes");
    }
    r *= base;
  }
  return r;
}

// Probability of the event (or of its complement) under the n-fold product.
double product_event_probability(const DiscreteDist& d, std::size_t n, const SampleEvent& event,
                                 bool complement) {
  const auto pts = d.points();
  const auto lw = d.log_weights();
  std::vector<double> tuple(n);
  CompensatedSum s;
  enumerate_product(d.size(), n, [&](std::span<const std::size_t> idx) {
    double l = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      tuple[t] = pts[idx[t]];
      l += lw[idx[t]];
    }
    if (event(tuple) != complement) s.add(std::exp(l));
  });
  return std::min(1.0, clamp_nonneg(s.value()));
}

// Log-density ratios log p/q on the support of p; empty when P is not << Q.
std::vector<double> log_ratio_on_p(const DiscreteDist& p, const DiscreteDist& q) {
  const Overlap o = overlap(p, q);
  if (o.ia.size() != p.size()) return {};
  std::vector<double> r(p.size());
  for (std::size_t k = 0; k < o.ia.size(); ++k) {
    r[o.ia[k]] = p.log_weights()[o.ia[k]] - q.log_weights()[o.ib[k]];
  }
  return r;
}

}  // namespace

DivergenceValue kl_discrete(const DiscreteDist& p, const DiscreteDist& q) {
  const std::vector<double> r = log_ratio_on_p(p, q);
  if (r.empty()) return {kInf, true, 0.0};
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) s.add(p.weights()[i] * r[i]);
  return {clamp_nonneg(s.value()), true, 0.0};
}

DivergenceValue renyi_discrete(double alpha, const DiscreteDist& p, const DiscreteDist& q) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("renyi_discrete: alpha must lie in (0, 1)");
  const Overlap o = overlap(p, q);
  if (o.ia.empty()) return {kInf, true, 0.0};
  std::vector<double> terms(o.ia.size());
  for (std::size_t k = 0; k < o.ia.size(); ++k) {
    terms[k] = alpha * p.log_weights()[o.ia[k]] + (1.0 - alpha) * q.log_weights()[o.ib[k]];
  }
  return {clamp_nonneg(-log_sum_exp(terms) / (1.0 - alpha)), true, 0.0};
}

double hellinger_squared_discrete(const DiscreteDist& p, const DiscreteDist& q) {
  // Walk the union of supports.
  const auto pp = p.points();
  const auto qp = q.points();
  std::size_t i = 0;
  std::size_t j = 0;
  CompensatedSum s;
  while (i < pp.size() || j < qp.size()) {
    double a = 0.0;
    double b = 0.0;
    if (j == qp.size() || (i < pp.size() && pp[i] < qp[j])) {
      a = p.weights()[i++];
    } else if (i == pp.size() || qp[j] < pp[i]) {
      b = q.weights()[j++];
    } else {
      a = p.weights()[i++];
      b = q.weights()[j++];
    }
    const double d = std::sqrt(a) - std::sqrt(b);
    s.add(d * d);
  }
  return std::clamp(0.5 * s.value(), 0.0, 1.0);
}

double hellinger_discrete(const DiscreteDist& p, const DiscreteDist& q) {
  return std::sqrt(hellinger_squared_discrete(p, q));
}

ChernoffResult chernoff_discrete(const DiscreteDist& f, const DiscreteDist& g, double tol) {
  if (!(tol > 0.0 && tol < 0.5)) throw DomainError("chernoff_discrete: tol must lie in (0, 1/2)");
  const Overlap o = overlap(f, g);
  if (o.ia.empty()) return {{kInf, true, 0.0}, f, 0.5, false};

  const std::size_t m = o.ia.size();
  std::vector<double> pts(m);
  std::vector<double> lg(m);
  std::vector<double> d(m);  // log g - log f on the common support
  for (std::size_t k = 0; k < m; ++k) {
    pts[k] = f.points()[o.ia[k]];
    lg[k] = g.log_weights()[o.ib[k]];
    d[k] = lg[k] - f.log_weights()[o.ia[k]];
  }

  auto mixture = [&](double alpha) {
    std::vector<double> lw(m);
    for (std::size_t k = 0; k < m; ++k) lw[k] = lg[k] - alpha * d[k];
    return DiscreteDist::from_log_weights(pts, std::move(lw));
  };
  // KL(P_α,F) - KL(P_α,G) = E_{P_α}[log g - log f].
  auto gap = [&](double alpha) {
    const DiscreteDist pa = mixture(alpha);
    CompensatedSum s;
    for (std::size_t k = 0; k < m; ++k) s.add(pa.weights()[k] * d[k]);
    return s.value();
  };
  struct Eval {
    DiscreteDist p;
    double kf;
    double kg;
  };
  auto evaluate = [&](double alpha) {
    DiscreteDist pa = mixture(alpha);
    const double kf = kl_discrete(pa, f).value;
    const double kg = kl_discrete(pa, g).value;
    return Eval{std::move(pa), kf, kg};
  };

  const double lo = tol;
  const double hi = 1.0 - tol;

  constexpr int kChecks = 33;
  bool monotone = true;
  double prev = gap(lo);
  const double scale = 1.0 + std::abs(prev);
  for (int i = 1; i < kChecks; ++i) {
    const double cur = gap(lo + (hi - lo) * i / (kChecks - 1));
    if (cur > prev + 1e-12 * scale) monotone = false;
    prev = cur;
  }

  double alpha = 0.5;
  bool fallback = false;
  if (monotone) {
    const double glo = gap(lo);
    const double ghi = gap(hi);
    if (glo > 0.0 && ghi < 0.0) {
      alpha = bisect(gap, lo, hi, 0.0, 200).root;
    } else {
      const Eval a = evaluate(lo);
      const Eval b = evaluate(hi);
      alpha = std::max(a.kf, a.kg) <= std::max(b.kf, b.kg) ? lo : hi;
    }
  } else {
    fallback = true;
    auto obj = [&](double a) {
      const Eval e = evaluate(a);
      return std::max(e.kf, e.kg);
    };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = obj(x1);
    double f2 = obj(x2);
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - invphi * (b - a);
        f1 = obj(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + invphi * (b - a);
        f2 = obj(x2);
      }
    }
    alpha = 0.5 * (a + b);
  }

  Eval best = evaluate(alpha);
  const double value = std::max(best.kf, best.kg);
  return {{value, false, std::abs(best.kf - best.kg)}, std::move(best.p), alpha, fallback};
}

double renyi_half_gaussian(double mu1, double s1, double mu2, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw DomainError("renyi_half_gaussian: scales must be > 0");
  const double v = s1 * s1 + s2 * s2;
  const double delta = mu1 - mu2;
  return -std::log(2.0 * s1 * s2 / v) + delta * delta / (2.0 * v);
}

double kl_laplace_shift(double delta, double b) {
  if (!(b > 0.0)) throw DomainError("kl_laplace_shift: b must be > 0");
  const double r = std::abs(delta) / b;
  // e^{-r} + r - 1 without cancellation for small r.
  return std::expm1(-r) + r;
}

DataProcessingReport verify_data_processing(const DiscreteDist& p, const DiscreteDist& q,
                                            const PointEvent& event, double tol) {
  DataProcessingReport rep;
  CompensatedSum pe;
  CompensatedSum qe;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (event(p.points()[i])) pe.add(p.weights()[i]);
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (event(q.points()[i])) qe.add(q.weights()[i]);
  }
  rep.p_event = std::clamp(pe.value(), 0.0, 1.0);
  rep.q_event = std::clamp(qe.value(), 0.0, 1.0);
  rep.kl = kl_discrete(p, q).value;
  const double term = rep.p_event == 0.0 ? 0.0 : -rep.p_event * std::log(rep.q_event);
  rep.kl_rhs = term - kLog2;
  rep.kl_slack = std::isinf(rep.kl) ? kInf : rep.kl - rep.kl_rhs;
  rep.holds = rep.kl >= rep.kl_rhs - tol;

  const double worst = std::max(rep.p_event, 1.0 - rep.q_event);
  rep.min_renyi_slack = kInf;
  for (int k = 1; k <= 9; ++k) {
    const double a = 0.1 * k;
    const double lhs = (1.0 - a) * renyi_discrete(a, p, q).value;
    const double rhs = std::min(a, 1.0 - a) * -std::log(worst) - kLog2;
    rep.alphas.push_back(a);
    rep.renyi_lhs.push_back(lhs);
    rep.renyi_rhs.push_back(rhs);
    if (!std::isinf(lhs)) rep.min_renyi_slack = std::min(rep.min_renyi_slack, lhs - rhs);
    rep.holds = rep.holds && lhs >= rhs - tol;
  }
  return rep;
}

ChangeOfMeasureReport verify_change_of_measure(const DiscreteDist& p, const DiscreteDist& f,
                                               const DiscreteDist& g, std::size_t n,
                                               const SampleEvent& event, double beta,
                                               double tol) {
  if (n == 0) throw DomainError("verify_change_of_measure: n must be >= 1");
  if (!(beta > 0.0)) throw DomainError("verify_change_of_measure: beta must be > 0");
  const std::size_t np = checked_power(p.size(), n);
  const std::size_t nf = checked_power(f.size(), n);
  const std::size_t ng = checked_power(g.size(), n);

  ChangeOfMeasureReport rep;
  rep.outcomes = np + nf + ng;
  rep.f_event = product_event_probability(f, n, event, false);
  rep.g_complement = product_event_probability(g, n, event, true);
  rep.kl_pf = kl_discrete(p, f).value;
  rep.kl_pg = kl_discrete(p, g).value;

  const std::vector<double> rf = log_ratio_on_p(p, f);
  const std::vector<double> rg = log_ratio_on_p(p, g);
  if (rf.empty() || rg.empty()) {
    // The log-likelihood ratio is undefined; the inequality is vacuous.
    rep.kl_product_pf = rf.empty() ? kInf : n * rep.kl_pf;
    rep.kl_product_pg = rg.empty() ? kInf : n * rep.kl_pg;
    rep.lhs = kInf;
    rep.rhs = 1.0;
    rep.slack = kInf;
    return rep;
  }

  const double dn = static_cast<double>(n);
  CompensatedSum dev_f;
  CompensatedSum dev_g;
  CompensatedSum prod_f;
  CompensatedSum prod_g;
  const auto lw = p.log_weights();
  enumerate_product(p.size(), n, [&](std::span<const std::size_t> idx) {
    double l = 0.0;
    double sf = 0.0;
    double sg = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      l += lw[idx[t]];
      sf += rf[idx[t]];
      sg += rg[idx[t]];
    }
    const double w = std::exp(l);
    prod_f.add(w * sf);
    prod_g.add(w * sg);
    if (sf / dn - rep.kl_pf > beta) dev_f.add(w);
    if (sg / dn - rep.kl_pg > beta) dev_g.add(w);
  });
  rep.kl_product_pf = clamp_nonneg(prod_f.value());
  rep.kl_product_pg = clamp_nonneg(prod_g.value());

  const double worst = std::max(rep.f_event, rep.g_complement);
  rep.lhs = 2.0 * worst * std::exp(dn * std::max(rep.kl_pf, rep.kl_pg) + dn * beta);
  rep.rhs = 1.0 - dev_f.value() - dev_g.value();
  rep.slack = rep.lhs - rep.rhs;
  rep.holds = rep.lhs >= rep.rhs - tol;
  return rep;
}

}  // namespace meanlb
