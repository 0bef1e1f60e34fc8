#include "meanlb/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

#include "meanlb/numeric.hpp"

namespace meanlb {

namespace {

constexpr double kMassTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

DiscreteDist::DiscreteDist(std::vector<Atom> atoms) {
  if (atoms.empty()) throw DomainError("DiscreteDist: no atoms");
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.point)) throw DomainError("DiscreteDist: non-finite point");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw DomainError("DiscreteDist: weights must be finite and strictly positive");
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& l, const Atom& r) { return l.point < r.point; });
  CompensatedSum total;
  for (std::size_t i = 0; i < atoms.size();) {
    CompensatedSum w;
    std::size_t j = i;
    for (; j < atoms.size() && atoms[j].point == atoms[i].point; ++j) w.add(atoms[j].weight);
    points_.push_back(atoms[i].point);
    weights_.push_back(w.value());
    total.add(w.value());
    i = j;
  }
  if (std::abs(total.value() - 1.0) > kMassTol) {
    throw DomainError("DiscreteDist: weights sum to " + format_double(total.value()) +
                      ", expected 1");
  }
  log_weights_.reserve(weights_.size());
  for (double w : weights_) log_weights_.push_back(std::log(w));
}

DiscreteDist DiscreteDist::from_log_weights(std::vector<double> points,
                                            std::vector<double> log_weights) {
  if (points.empty() || points.size() != log_weights.size()) {
    throw DomainError("DiscreteDist::from_log_weights: size mismatch or empty");
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return points[l] < points[r]; });
  DiscreteDist d;
  for (std::size_t k = 0; k < order.size();) {
    std::vector<double> group;
    std::size_t j = k;
    for (; j < order.size() && points[order[j]] == points[order[k]]; ++j) {
      const double lw = log_weights[order[j]];
      if (std::isnan(lw) || lw == kInf) throw DomainError("from_log_weights: bad log-weight");
      if (lw > -kInf) group.push_back(lw);
    }
    if (!group.empty()) {
      if (!std::isfinite(points[order[k]])) throw DomainError("from_log_weights: bad point");
      d.points_.push_back(points[order[k]]);
      d.log_weights_.push_back(log_sum_exp(group));
    }
    k = j;
  }
  if (d.points_.empty()) throw DomainError("from_log_weights: all weights are zero");
  const double lz = log_sum_exp(d.log_weights_);
  for (double& lw : d.log_weights_) lw -= lz;
  for (double lw : d.log_weights_) d.weights_.push_back(std::exp(lw));
  return d;
}

DiscreteDist DiscreteDist::point_mass(double x) { return DiscreteDist({{x, 1.0}}); }

DiscreteDist DiscreteDist::bernoulli(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("bernoulli: a must lie in [0, 1]");
  if (a == 0.0) return point_mass(0.0);
  if (a == 1.0) return point_mass(1.0);
  return DiscreteDist({{0.0, 1.0 - a}, {1.0, a}});
}

double DiscreteDist::mean() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < size(); ++i) s.add(weights_[i] * points_[i]);
  return s.value();
}

double DiscreteDist::variance() const {
  const double m = mean();
  CompensatedSum s;
  for (std::size_t i = 0; i < size(); ++i) {
    const double d = points_[i] - m;
    s.add(weights_[i] * d * d);
  }
  return s.value();
}

double DiscreteDist::central_abs_moment(double p) const {
  const double m = mean();
  CompensatedSum s;
  for (std::size_t i = 0; i < size(); ++i) {
    s.add(weights_[i] * std::pow(std::abs(points_[i] - m), p));
  }
  return s.value();
}

double DiscreteDist::mass_at(double x) const {
  const auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it == points_.end() || *it != x) return 0.0;
  return weights_[static_cast<std::size_t>(it - points_.begin())];
}

DiscreteDist DiscreteDist::reflect(double center) const {
  DiscreteDist d;
  const std::size_t k = size();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = k - 1 - i;
    d.points_.push_back(center == 0.0 ? -points_[j] : 2.0 * center - points_[j]);
    d.weights_.push_back(weights_[j]);
    d.log_weights_.push_back(log_weights_[j]);
  }
  return d;
}

NishiyamaTriple nishiyama_triple(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("nishiyama_triple: y must be > 0");
  const double u = std::sqrt(1.0 + 2.0 * y);
  // F(u) = 1/2 - (1/2) sqrt(2y / (1 + 2y)); the complementary mass is formed
  // directly so that both weights keep full relative precision.
  const double r = std::sqrt(2.0 * y / (1.0 + 2.0 * y));
  const double low = 0.5 * (1.0 - r);
  const double high = 0.5 * (1.0 + r);
  NishiyamaTriple t{u,
                    DiscreteDist({{-u, 0.5}, {u, 0.5}}),
                    DiscreteDist({{-u, high}, {u, low}}),
                    DiscreteDist({{-u, low}, {u, high}})};
  return t;
}

AlphaTriple alpha_triple(double p, double c) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("alpha_triple: p must lie in (0, 1)");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("alpha_triple: c must be > 0");
  return {DiscreteDist::point_mass(0.0), DiscreteDist({{0.0, 1.0 - p}, {-c, p}}),
          DiscreteDist({{0.0, 1.0 - p}, {c, p}})};
}

Gaussian::Gaussian(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("gaussian: need finite mu and sigma > 0");
  }
}

Laplace::Laplace(double mu_, double b_) : mu(mu_), b(b_) {
  if (!std::isfinite(mu) || !(b > 0.0) || !std::isfinite(b)) {
    throw DomainError("laplace: need finite mu and b > 0");
  }
}

HuberContamGaussian::HuberContamGaussian(double eps_, DiscreteDist contaminant_)
    : eps(eps_), contaminant(std::move(contaminant_)) {
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("huber: eps must lie in (0, 1/2)");
}

Moments moments(const ScenarioDist& dist) {
  return std::visit(
      Overloaded{
          [](const Gaussian& g) { return Moments{g.mu, g.sigma * g.sigma}; },
          [](const Laplace& l) { return Moments{l.mu, 2.0 * l.b * l.b}; },
          [](const DiscreteDist& d) { return Moments{d.mean(), d.variance()}; },
          [](const HuberContamGaussian& h) {
            const double mh = h.contaminant.mean();
            const double second_h = h.contaminant.variance() + mh * mh;
            const double mean = h.eps * mh;
            const double second = (1.0 - h.eps) + h.eps * second_h;
            return Moments{mean, second - mean * mean};
          },
      },
      dist);
}

double density(const ScenarioDist& dist, double x) {
  return std::visit(
      Overloaded{
          [x](const Gaussian& g) { return normal_pdf((x - g.mu) / g.sigma) / g.sigma; },
          [x](const Laplace& l) { return std::exp(-std::abs(x - l.mu) / l.b) / (2.0 * l.b); },
          [](const DiscreteDist&) -> double {
            throw DomainError("density: discrete distributions have no density");
          },
          [](const HuberContamGaussian&) -> double {
            throw DomainError("density: contaminated law has an atomic part");
          },
      },
      dist);
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Seed::substream(std::uint64_t trial) const {
  return splitmix64_mix(master ^ splitmix64_mix(trial + 0x9E3779B97F4A7C15ULL));
}

namespace {

// Uniform on the open interval (0, 1) with 53 random bits.
double open_uniform(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

class NormalStream {
 public:
  explicit NormalStream(std::mt19937_64& eng) : eng_(eng) {}
  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = open_uniform(eng_);
    const double u2 = open_uniform(eng_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64& eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

class DiscreteSampler {
 public:
  explicit DiscreteSampler(const DiscreteDist& d) : points_(d.points()) {
    CompensatedSum s;
    for (double w : d.weights()) {
      s.add(w);
      cumulative_.push_back(s.value());
    }
  }
  double draw(std::mt19937_64& eng) const {
    const double u = open_uniform(eng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return points_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

 private:
  std::span<const double> points_;
  std::vector<double> cumulative_;
};

}  // namespace

Sample sample(const ScenarioDist& dist, std::size_t n, Seed seed, std::uint64_t trial) {
  if (n == 0) throw DomainError("sample: n must be >= 1");
  Sample out;
  out.generator = to_literal(dist);
  out.seed = seed.master;
  out.trial = trial;
  out.values.reserve(n);
  std::mt19937_64 eng(seed.substream(trial));
  std::visit(Overloaded{
                 [&](const Gaussian& g) {
                   NormalStream z(eng);
                   for (std::size_t i = 0; i < n; ++i) out.values.push_back(g.mu + g.sigma * z.next());
                 },
                 [&](const Laplace& l) {
                   for (std::size_t i = 0; i < n; ++i) {
                     const double v = open_uniform(eng) - 0.5;
                     const double mag = -l.b * std::log1p(-2.0 * std::abs(v));
                     out.values.push_back(v < 0.0 ? l.mu - mag : l.mu + mag);
                   }
                 },
                 [&](const DiscreteDist& d) {
                   const DiscreteSampler s(d);
                   for (std::size_t i = 0; i < n; ++i) out.values.push_back(s.draw(eng));
                 },
                 [&](const HuberContamGaussian& h) {
                   const DiscreteSampler s(h.contaminant);
                   NormalStream z(eng);
                   for (std::size_t i = 0; i < n; ++i) {
                     const bool corrupt = open_uniform(eng) < h.eps;
                     out.values.push_back(corrupt ? s.draw(eng) : z.next());
                   }
                 },
             },
             dist);
  return out;
}

namespace {

std::string discrete_literal(const DiscreteDist& d) {
  std::string s = "discrete[";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) s += ',';
    s += '(' + format_double(d.points()[i]) + ',' + format_double(d.weights()[i]) + ')';
  }
  return s + ']';
}

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view text) : text_(text) {}

  ScenarioDist parse() {
    ScenarioDist d = distribution();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return d;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw LiteralError("distribution literal: " + msg + " at column " + std::to_string(pos_ + 1),
                       pos_ + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a distribution name");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{}) fail("expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
  }

  // Construction errors are reported at the column where the call started.
  template <class Make>
  auto build(std::size_t column, Make&& make) {
    try {
      return make();
    } catch (const DomainError& e) {
      throw LiteralError(std::string(e.what()) + " at column " + std::to_string(column + 1),
                         column + 1);
    }
  }

  char member_selector() {
    if (!accept(',')) return 'P';
    skip_ws();
    if (pos_ < text_.size() && (text_[pos_] == 'P' || text_[pos_] == 'F' || text_[pos_] == 'G')) {
      return text_[pos_++];
    }
    fail("expected member P, F or G");
  }

  DiscreteDist discrete_body(std::size_t start) {
    expect('[');
    std::vector<Atom> atoms;
    if (!accept(']')) {
      do {
        expect('(');
        const double x = number();
        expect(',');
        const double w = number();
        expect(')');
        atoms.push_back({x, w});
      } while (accept(','));
      expect(']');
    }
    return build(start, [&] { return DiscreteDist(std::move(atoms)); });
  }

  ScenarioDist distribution() {
    skip_ws();
    const std::size_t start = pos_;
    const std::string name = identifier();
    if (name == "discrete") return discrete_body(start);
    expect('(');
    ScenarioDist out = DiscreteDist::point_mass(0.0);
    if (name == "gaussian" || name == "laplace") {
      const double a = number();
      expect(',');
      const double b = number();
      if (name == "gaussian") {
        out = build(start, [&] { return Gaussian(a, b); });
      } else {
        out = build(start, [&] { return Laplace(a, b); });
      }
    } else if (name == "nishiyama") {
      const double y = number();
      const char m = member_selector();
      const auto t = build(start, [&] { return nishiyama_triple(y); });
      out = m == 'P' ? t.p : (m == 'F' ? t.f : t.g);
    } else if (name == "alpha_triple") {
      const double p = number();
      expect(',');
      const double c = number();
      const char m = member_selector();
      const auto t = build(start, [&] { return alpha_triple(p, c); });
      out = m == 'P' ? t.p : (m == 'F' ? t.f : t.g);
    } else if (name == "huber") {
      const double eps = number();
      expect(',');
      skip_ws();
      const std::size_t inner = pos_;
      if (identifier() != "discrete") {
        pos_ = inner;
        fail("huber contaminant must be a discrete[...] literal");
      }
      DiscreteDist h = discrete_body(inner);
      out = build(start, [&] { return HuberContamGaussian(eps, std::move(h)); });
    } else {
      pos_ = start;
      fail("unknown distribution '" + name + "'");
    }
    expect(')');
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_literal(const ScenarioDist& dist) {
  return std::visit(
      Overloaded{
          [](const Gaussian& g) {
            return "gaussian(" + format_double(g.mu) + ',' + format_double(g.sigma) + ')';
          },
          [](const Laplace& l) {
            return "laplace(" + format_double(l.mu) + ',' + format_double(l.b) + ')';
          },
          [](const DiscreteDist& d) { return discrete_literal(d); },
          [](const HuberContamGaussian& h) {
            return "huber(" + format_double(h.eps) + ',' + discrete_literal(h.contaminant) + ')';
          },
      },
      dist);
}

ScenarioDist parse_distribution(std::string_view text) { return LiteralParser(text).parse(); }

}  // namespace meanlb
