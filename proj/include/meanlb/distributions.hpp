#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace meanlb {

struct Atom {
  double point = 0.0;
  double weight = 0.0;
};

/// Finite-support probability distribution in canonical form: points strictly
/// increasing, weights strictly positive and summing to one. Log-weights are
/// kept alongside so that divergences stay accurate for masses that underflow.
class DiscreteDist {
 public:
  /// Sorts, merges duplicate points by summing weights and validates.
  /// Throws DomainError on non-positive or non-finite weights, non-finite
  /// points, an empty atom list, or a total mass off by more than 1e-12.
  explicit DiscreteDist(std::vector<Atom> atoms);

  /// Builds p_i ∝ exp(log_weights[i]); normalisation happens in log space.
  static DiscreteDist from_log_weights(std::vector<double> points,
                                       std::vector<double> log_weights);
  static DiscreteDist point_mass(double x);
  /// Bernoulli(a) on {0, 1}; a in [0, 1] (degenerate ends allowed).
  static DiscreteDist bernoulli(double a);

  std::size_t size() const { return points_.size(); }
  std::span<const double> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> log_weights() const { return log_weights_; }

  double mean() const;
  double variance() const;
  /// E|X - E X|^p.
  double central_abs_moment(double p) const;
  /// Mass at exactly x (0 off support).
  double mass_at(double x) const;
  /// Law of 2c - X.
  DiscreteDist reflect(double center = 0.0) const;

  /// Compares points and weights (log-weights are derived data).
  bool operator==(const DiscreteDist& other) const {
    return points_ == other.points_ && weights_ == other.weights_;
  }

 private:
  DiscreteDist() = default;
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
};

/// Two-point minimisers for the mean/variance testing problem: all three are
/// supported on {-u, u} with u = sqrt(1 + 2y).
struct NishiyamaTriple {
  double u = 0.0;
  DiscreteDist p;
  DiscreteDist f;  // mean -sqrt(2y), variance 1
  DiscreteDist g;  // mean +sqrt(2y), variance 1
};
NishiyamaTriple nishiyama_triple(double y);

/// P = δ0, G = (1-p)δ0 + pδc, F = (1-p)δ0 + pδ(-c).
struct AlphaTriple {
  DiscreteDist p;
  DiscreteDist f;
  DiscreteDist g;
};
AlphaTriple alpha_triple(double p, double c);

struct Gaussian {
  Gaussian(double mu, double sigma);
  double mu;
  double sigma;
  bool operator==(const Gaussian&) const = default;
};

struct Laplace {
  Laplace(double mu, double b);
  double mu;
  double b;
  bool operator==(const Laplace&) const = default;
};

/// (1 - eps) N(0,1) + eps H with H finitely supported.
struct HuberContamGaussian {
  HuberContamGaussian(double eps, DiscreteDist contaminant);
  double eps;
  DiscreteDist contaminant;
  bool operator==(const HuberContamGaussian&) const = default;
};

using ScenarioDist = std::variant<Gaussian, Laplace, DiscreteDist, HuberContamGaussian>;

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments moments(const ScenarioDist& dist);

/// Density of the continuous families (throws for Discrete).
double density(const ScenarioDist& dist, double x);

/// Per-trial seeding. mix(z) is the splitmix64 finaliser
///   z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
///   return z ^ z>>31
/// and substream(t) = mix(master ^ mix(t + 0x9E3779B97F4A7C15)). Each trial
/// stream seeds its own std::mt19937_64, so trials never share state.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t substream(std::uint64_t trial) const;
  bool operator==(const Seed&) const = default;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

struct Sample {
  std::vector<double> values;
  std::string generator;  // distribution literal
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

/// n i.i.d. draws; a pure function of (dist, n, seed, trial).
/// Uniforms are 53-bit doubles from mt19937_64, normals use Box-Muller pairs,
/// Laplace uses the inverse cdf and discrete atoms use the inverse cdf on the
/// cumulative weights.
Sample sample(const ScenarioDist& dist, std::size_t n, Seed seed, std::uint64_t trial);

/// Text literal: gaussian(mu,sigma), laplace(mu,b), discrete[(x,w),...],
/// nishiyama(y[,P|F|G]), alpha_triple(p,c[,P|F|G]), huber(eps, discrete[...]).
std::string to_literal(const ScenarioDist& dist);

/// Parse failure with the 1-based column of the offending character.
class LiteralError : public std::runtime_error {
 public:
  LiteralError(const std::string& msg, std::size_t column)
      : std::runtime_error(msg), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

ScenarioDist parse_distribution(std::string_view text);

}  // namespace meanlb
