#include "meanlb/estimator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "meanlb/kinf.hpp"
#include "meanlb/numeric.hpp"

namespace meanlb {

double y_schedule(std::size_t n, double delta) {
  if (n == 0) throw DomainError("y_schedule: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("y_schedule: delta must lie in (0,1)");
  const double nn = static_cast<double>(n);
  const double l = std::log(2.0) + 1.0 + 2.0 * std::log(nn + 1.0) - std::log(delta);
  return 0.5 * std::expm1(2.0 * l / nn);
}

namespace {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // population variance
};

MeanVar mean_var(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s.add(v);
  const double m = s.value() / static_cast<double>(x.size());
  CompensatedSum q;
  for (double v : x) q.add((v - m) * (v - m));
  return {m, q.value() / static_cast<double>(x.size())};
}

void check_y(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("estimator: y must be > 0");
}

// dhat_left with an optional early exit: as soon as a candidate value drops
// below `stop_below` that value is returned. The full minimum is then at most
// this value, so comparisons against `stop_below` come out the same.
double dhat_left_impl(std::span<const double> x, double c, double y, int grid_size,
                      double dual_tol, double stop_below) {
  if (x.empty()) throw DomainError("dhat: empty sample");
  check_y(y);
  if (grid_size < 2) throw DomainError("dhat: grid size must be >= 2");
  const MeanVar mv = mean_var(x);
  if (mv.mean <= c - std::sqrt(2.0 * y * mv.var)) return 0.0;

  double best = std::log1p(2.0 * y);  // µ → -∞ limit
  if (best < stop_below) return best;

  const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
  double span = *mx_it - *mn_it;
  if (span <= 0.0) span = std::abs(c - mv.mean);
  const double lo = std::min(*mn_it, c) - 2.0 * span;
  const double width = c - lo;

  auto constraints_at = [&](double mu) {
    const double d = c - mu;
    return MomentConstraints{MeanKind::equal, mu, d * d / (2.0 * y), Centering::about_m};
  };
  auto value_at = [&](double mu) {
    if (!(mu < c)) return kInf;
    return kinf_dual(x, constraints_at(mu), dual_tol).value;
  };

  // The previous grid point's certificate, in scale-free coordinates
  // (a, b) = (λ₁√B', 2B'λ₂ - 1), stays dual feasible at the next µ, so its
  // objective there is a lower bound that lets us skip hopeless points.
  double cert_a = 0.0;
  double cert_b = -1.0;
  int best_i = -1;
  for (int i = 0; i < grid_size; ++i) {
    const double mu = lo + width * static_cast<double>(i) / static_cast<double>(grid_size);
    const MomentConstraints cons = constraints_at(mu);
    const double bp = cons.B;
    if (cert_b > -1.0 || cert_a != 0.0) {
      const double lb =
          dual_objective(x, cons, cert_a / std::sqrt(bp), (1.0 + cert_b) / (2.0 * bp));
      if (lb >= best) continue;
    }
    const DualCertificate cert = kinf_dual(x, cons, dual_tol);
    cert_a = cert.lambda1 * std::sqrt(bp);
    cert_b = 2.0 * bp * cert.lambda2 - 1.0;
    const double v = cert.value;
    if (v < best) {
      best = v;
      best_i = i;
      if (best < stop_below) return best;
    }
  }
  if (best_i < 0) return best;

  const double h = width / static_cast<double>(grid_size);
  const double a = lo + h * (best_i - 1);
  const double b = std::min(lo + h * (best_i + 1), c - 1e-3 * h);
  std::uintmax_t iters = 60;
  const auto r = boost::math::tools::brent_find_minima(value_at, a, b, 24, iters);
  return std::min(best, r.second);
}

double reflect_and_left(std::span<const double> x, double c, double y, int grid_size,
                        double dual_tol, double stop_below) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = 2.0 * c - x[i];
  return dhat_left_impl(r, c, y, grid_size, dual_tol, stop_below);
}

}  // namespace

double dhat_left(std::span<const double> sample, double c, double y, int grid_size,
                 double dual_tol) {
  return dhat_left_impl(sample, c, y, grid_size, dual_tol, -kInf);
}

double dhat_right(std::span<const double> sample, double c, double y, int grid_size,
                  double dual_tol) {
  return reflect_and_left(sample, c, y, grid_size, dual_tol, -kInf);
}

bool minkl_gap_positive(std::span<const double> sample, double c, double y, const MinKL& opts) {
  if (sample.empty()) throw DomainError("minkl_gap_positive: empty sample");
  check_y(y);
  const int G = opts.mu_grid_size;
  const double dl = dhat_left_impl(sample, c, y, G, opts.dual_tol, -kInf);
  if (!(dl > 0.0)) return false;
  return reflect_and_left(sample, c, y, G, opts.dual_tol, dl) < dl;
}

bool minkl_exceeds(std::span<const double> sample, double y, double center, double width,
                   const MinKL& opts) {
  if (!(width > 0.0)) throw DomainError("minkl_exceeds: width must be > 0");
  const MeanVar mv = mean_var(sample);
  if (!(mv.var > 0.0)) return std::abs(mv.mean - center) >= width;
  return minkl_gap_positive(sample, center + width, y, opts) ||
         !minkl_gap_positive(sample, center - width, y, opts);
}

MinKLResult minkl_estimate(std::span<const double> sample, double y, const MinKL& opts) {
  if (sample.empty()) throw DomainError("minkl_estimate: empty sample");
  check_y(y);
  validate(EstimatorSpec{opts});
  const MeanVar mv = mean_var(sample);
  MinKLResult res;
  res.y = y;
  const double half = std::sqrt(2.0 * y * mv.var);
  if (!(half > 0.0)) {
    res.estimate = res.lo = res.hi = mv.mean;
    return res;
  }
  const auto [mn_it, mx_it] = std::minmax_element(sample.begin(), sample.end());
  const double tol = opts.bisect_tol * (1.0 + (*mx_it - *mn_it));
  const int G = opts.mu_grid_size;

  // gap(c) > 0, computed with early exits.
  auto positive = [&](double c) {
    const double dl = dhat_left_impl(sample, c, y, G, opts.dual_tol, -kInf);
    if (!(dl > 0.0)) return false;
    return reflect_and_left(sample, c, y, G, opts.dual_tol, dl) < dl;
  };
  auto full_gap = [&](double c) {
    return dhat_left_impl(sample, c, y, G, opts.dual_tol, -kInf) -
           reflect_and_left(sample, c, y, G, opts.dual_tol, -kInf);
  };

  double lo = mv.mean - half;
  double hi = mv.mean + half;
  res.gap_lo = full_gap(lo);
  res.gap_hi = full_gap(hi);
  if (!(res.gap_lo > 0.0 && res.gap_hi <= 0.0)) {
    const double w = opts.c_grid_span * (hi - lo);
    lo -= w;
    hi += w;
    res.widened = true;
    res.gap_lo = full_gap(lo);
    res.gap_hi = full_gap(hi);
    if (!(res.gap_lo > 0.0 && res.gap_hi <= 0.0)) {
      throw NumericError("minkl_estimate: no sign change of dhat_left - dhat_right");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (positive(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++res.bisections;
  }
  res.lo = lo;
  res.hi = hi;
  res.estimate = 0.5 * (lo + hi);
  return res;
}

double empirical_mean(std::span<const double> sample) {
  if (sample.empty()) throw DomainError("empirical_mean: empty sample");
  return mean_var(sample).mean;
}

double median_of_means(std::span<const double> sample, std::size_t blocks) {
  if (blocks == 0) throw DomainError("median_of_means: blocks must be >= 1");
  if (blocks > sample.size()) throw DomainError("median_of_means: more blocks than points");
  const std::size_t len = sample.size() / blocks;
  std::vector<double> means(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t start = b * len;
    const std::size_t stop = b + 1 == blocks ? sample.size() : start + len;
    means[b] = mean_var(sample.subspan(start, stop - start)).mean;
  }
  std::sort(means.begin(), means.end());
  if (blocks % 2 == 1) return means[blocks / 2];
  return 0.5 * (means[blocks / 2 - 1] + means[blocks / 2]);
}

double trimmed_mean(std::span<const double> sample, double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw DomainError("trimmed_mean: trim fraction must lie in [0, 1/2)");
  }
  if (sample.empty()) throw DomainError("trimmed_mean: empty sample");
  const auto k =
      static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(sample.size())));
  if (2 * k >= sample.size()) throw DomainError("trimmed_mean: nothing left after trimming");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  return mean_var(std::span<const double>(s).subspan(k, s.size() - 2 * k)).mean;
}

void validate(const EstimatorSpec& spec) {
  if (const auto* m = std::get_if<MinKL>(&spec)) {
    if (!(m->y >= 0.0) || !std::isfinite(m->y)) throw DomainError("minkl: y must be >= 0");
    if (m->mu_grid_size < 2) throw DomainError("minkl: mu grid needs at least 2 points");
    if (!(m->bisect_tol > 0.0)) throw DomainError("minkl: tol must be > 0");
    if (!(m->c_grid_span > 0.0)) throw DomainError("minkl: span must be > 0");
    if (!(m->dual_tol > 0.0)) throw DomainError("minkl: dual tol must be > 0");
  } else if (const auto* b = std::get_if<MedianOfMeans>(&spec)) {
    if (b->blocks == 0) throw DomainError("mom: blocks must be >= 1");
  } else if (const auto* t = std::get_if<TrimmedMean>(&spec)) {
    if (!(t->trim_fraction >= 0.0 && t->trim_fraction < 0.5)) {
      throw DomainError("trimmed: fraction must lie in [0, 1/2)");
    }
  }
}

std::string to_string(const EstimatorSpec& spec) {
  if (const auto* m = std::get_if<MinKL>(&spec)) {
    const MinKL def;
    std::vector<std::string> args;
    if (m->y != def.y) args.push_back("y=" + format_double(m->y));
    if (m->mu_grid_size != def.mu_grid_size) args.push_back("mu_grid=" + std::to_string(m->mu_grid_size));
    if (m->bisect_tol != def.bisect_tol) args.push_back("tol=" + format_double(m->bisect_tol));
    if (m->c_grid_span != def.c_grid_span) args.push_back("span=" + format_double(m->c_grid_span));
    if (args.empty()) return "minkl";
    std::string s = "minkl(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i];
    return s + ")";
  }
  if (std::holds_alternative<EmpiricalMean>(spec)) return "mean";
  if (const auto* b = std::get_if<MedianOfMeans>(&spec)) return "mom(" + std::to_string(b->blocks) + ")";
  return "trimmed(" + format_double(std::get<TrimmedMean>(spec).trim_fraction) + ")";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw DomainError("estimator: bad number '" + std::string(s) + "' for " + std::string(what));
  }
  return v;
}

}  // namespace

EstimatorSpec parse_estimator(std::string_view text) {
  text = trim(text);
  std::string_view name = text;
  std::string_view args;
  if (const auto open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') throw DomainError("estimator: missing ')' in '" + std::string(text) + "'");
    name = trim(text.substr(0, open));
    args = trim(text.substr(open + 1, text.size() - open - 2));
  }
  EstimatorSpec spec;
  if (name == "minkl") {
    MinKL m;
    while (!args.empty()) {
      const auto comma = args.find(',');
      const std::string_view item = trim(args.substr(0, comma));
      args = comma == std::string_view::npos ? std::string_view{} : args.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw DomainError("minkl: expected key=value, got '" + std::string(item) + "'");
      const std::string_view key = trim(item.substr(0, eq));
      const double v = parse_number(item.substr(eq + 1), key);
      if (key == "y") {
        m.y = v;
      } else if (key == "mu_grid") {
        if (v != std::floor(v)) throw DomainError("minkl: mu_grid must be an integer");
        m.mu_grid_size = static_cast<int>(v);
      } else if (key == "tol") {
        m.bisect_tol = v;
      } else if (key == "span") {
        m.c_grid_span = v;
      } else {
        throw DomainError("minkl: unknown key '" + std::string(key) + "'");
      }
    }
    spec = m;
  } else if (name == "mean") {
    if (!args.empty()) throw DomainError("mean takes no arguments");
    spec = EmpiricalMean{};
  } else if (name == "mom") {
    const double v = parse_number(args, "mom blocks");
    if (!(v >= 1.0) || v != std::floor(v)) throw DomainError("mom: blocks must be a positive integer");
    spec = MedianOfMeans{static_cast<std::size_t>(v)};
  } else if (name == "trimmed") {
    spec = TrimmedMean{parse_number(args, "trim fraction")};
  } else {
    throw DomainError("unknown estimator '" + std::string(name) + "'");
  }
  validate(spec);
  return spec;
}

double estimate(const EstimatorSpec& spec, std::span<const double> sample, double y_fallback) {
  if (const auto* m = std::get_if<MinKL>(&spec)) {
    const double y = m->y > 0.0 ? m->y : y_fallback;
    return minkl_estimate(sample, y, *m).estimate;
  }
  if (std::holds_alternative<EmpiricalMean>(spec)) return empirical_mean(sample);
  if (const auto* b = std::get_if<MedianOfMeans>(&spec)) return median_of_means(sample, b->blocks);
  return trimmed_mean(sample, std::get<TrimmedMean>(spec).trim_fraction);
}

}  // namespace meanlb
