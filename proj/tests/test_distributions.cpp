#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "meanlb/distributions.hpp"
#include "meanlb/numeric.hpp"
#include "meanlb/parallel.hpp"

using namespace meanlb;

namespace {

double atom_mean(const DiscreteDist& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += d.points()[i] * d.weights()[i];
  return s;
}
double atom_var(const DiscreteDist& d) {
  const double m = atom_mean(d);
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += (d.points()[i] - m) * (d.points()[i] - m) * d.weights()[i];
  return s;
}

}  // namespace

TEST(DiscreteDist, CanonicalFormSortsAndMerges) {
  const DiscreteDist a({{2.0, 0.25}, {0.0, 0.25}, {2.0, 0.25}, {1.0, 0.25}});
  const DiscreteDist b({{0.0, 0.25}, {1.0, 0.25}, {2.0, 0.5}});
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a.points()[2], 2.0);
  EXPECT_DOUBLE_EQ(a.weights()[2], 0.5);
}

TEST(DiscreteDist, RejectsBadAtoms) {
  EXPECT_THROW(DiscreteDist(std::vector<Atom>{}), DomainError);
  EXPECT_THROW(DiscreteDist({{0.0, 0.5}, {1.0, 0.4}}), DomainError);
  EXPECT_THROW(DiscreteDist({{0.0, 1.5}, {1.0, -0.5}}), DomainError);
  EXPECT_THROW(DiscreteDist({{std::nan(""), 1.0}}), DomainError);
}

TEST(DiscreteDist, LogWeightsSurviveUnderflow) {
  const DiscreteDist d = DiscreteDist::from_log_weights({0.0, 1.0}, {0.0, -800.0});
  EXPECT_EQ(d.size(), 2u);
  EXPECT_NEAR(d.log_weights()[1], -800.0, 1e-9);
}

TEST(Nishiyama, OracleValuesAtHalf) {
  const NishiyamaTriple t = nishiyama_triple(0.5);
  EXPECT_NEAR(t.u, 1.4142135623730951, 1e-15);
  // mpmath: F(u) = 1/2 - sqrt(2y/(1+2y))/2
  EXPECT_NEAR(t.f.mass_at(t.u), 0.14644660940672624, 1e-15);
  EXPECT_NEAR(t.g.mass_at(t.u), 0.85355339059327376, 1e-15);
  EXPECT_DOUBLE_EQ(t.p.mass_at(t.u), 0.5);
}

TEST(Nishiyama, MomentsAcrossY) {
  for (double y : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    const NishiyamaTriple t = nishiyama_triple(y);
    EXPECT_NEAR(atom_mean(t.f), -std::sqrt(2 * y), 1e-10) << y;
    EXPECT_NEAR(atom_mean(t.g), std::sqrt(2 * y), 1e-10) << y;
    EXPECT_NEAR(atom_var(t.f), 1.0, 1e-10) << y;
    EXPECT_NEAR(atom_var(t.g), 1.0, 1e-10) << y;
    EXPECT_NEAR(t.f.mean(), atom_mean(t.f), 1e-12);
    EXPECT_NEAR(t.g.variance(), 1.0, 1e-12);
  }
}

TEST(Nishiyama, DegenerateLimitAndDomain) {
  const NishiyamaTriple t = nishiyama_triple(1e-12);
  EXPECT_NEAR(t.f.mass_at(t.u), 0.5, 1e-6);
  EXPECT_THROW(nishiyama_triple(0.0), DomainError);
  EXPECT_THROW(nishiyama_triple(-1.0), DomainError);
}

TEST(AlphaTriple, MeansAndMoment) {
  const AlphaTriple t = alpha_triple(0.5, 2.0);
  EXPECT_DOUBLE_EQ(t.g.mean(), 1.0);
  EXPECT_DOUBLE_EQ(t.f.mean(), -1.0);
  EXPECT_DOUBLE_EQ(t.p.mean(), 0.0);
  // mpmath oracle for 0.1·0.9·(√0.1 + √0.9)
  const AlphaTriple s = alpha_triple(0.1, 1.0);
  EXPECT_NEAR(s.g.central_abs_moment(1.5), 0.11384199576606166, 1e-14);
  for (double p : {0.05, 0.3, 0.7}) {
    for (double c : {0.5, 3.0}) {
      for (double a : {0.2, 0.5, 0.9}) {
        const AlphaTriple u = alpha_triple(p, c);
        const double expect =
            std::pow(c, 1 + a) * p * (1 - p) * (std::pow(p, a) + std::pow(1 - p, a));
        EXPECT_NEAR(u.g.central_abs_moment(1 + a), expect, 1e-12 * (1 + expect));
      }
    }
  }
  EXPECT_NEAR(alpha_triple(1e-9, 1.0).g.mean(), 0.0, 1e-8);
  EXPECT_THROW(alpha_triple(0.0, 1.0), DomainError);
  EXPECT_THROW(alpha_triple(0.5, 0.0), DomainError);
}

TEST(Moments, ClosedForms) {
  const Moments l = moments(Laplace(3.0, 0.5));
  EXPECT_DOUBLE_EQ(l.mean, 3.0);
  EXPECT_DOUBLE_EQ(l.variance, 0.5);
  const Moments b = moments(DiscreteDist::bernoulli(0.25));
  EXPECT_DOUBLE_EQ(b.mean, 0.25);
  EXPECT_DOUBLE_EQ(b.variance, 0.1875);
  const Moments f = moments(nishiyama_triple(0.5).f);
  EXPECT_NEAR(f.mean, -1.0, 1e-15);
  EXPECT_NEAR(f.variance, 1.0, 1e-15);
  // (1-ε)N(0,1) + ε δ5: mean 0.5, E X² = 0.9 + 2.5
  const Moments h = moments(HuberContamGaussian(0.1, DiscreteDist::point_mass(5.0)));
  EXPECT_NEAR(h.mean, 0.5, 1e-15);
  EXPECT_NEAR(h.variance, 3.4 - 0.25, 1e-14);
}

TEST(Density, IntegratesToOne) {
  for (const ScenarioDist& d : {ScenarioDist(Gaussian(1.0, 2.0)), ScenarioDist(Laplace(-1.0, 0.5))}) {
    double s = 0.0;
    const double h = 1e-3;
    for (double x = -40.0; x < 40.0; x += h) s += density(d, x) * h;
    EXPECT_NEAR(s, 1.0, 1e-4);
  }
  // laws with atoms have no density
  EXPECT_THROW(density(ScenarioDist(DiscreteDist::point_mass(0.0)), 0.0), DomainError);
  EXPECT_THROW(density(ScenarioDist(HuberContamGaussian(0.2, DiscreteDist::point_mass(3.0))), 0.0),
               DomainError);
}

TEST(Sampling, PointMassAndDeterminism) {
  const Sample s = sample(DiscreteDist::point_mass(0.0), 5, Seed{1}, 0);
  EXPECT_EQ(s.values, std::vector<double>(5, 0.0));
  const Sample a = sample(Gaussian(0, 1), 100, Seed{42}, 7);
  const Sample b = sample(Gaussian(0, 1), 100, Seed{42}, 7);
  const Sample c = sample(Gaussian(0, 1), 100, Seed{42}, 8);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.generator, "gaussian(0,1)");
  EXPECT_EQ(a.trial, 7u);
}

TEST(Sampling, GaussianMeanWithinClt) {
  const std::size_t n = 100000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Sample s = sample(Gaussian(0, 1), n, Seed{seed}, 0);
    const double m = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
    EXPECT_LT(std::abs(m), 4.0 / std::sqrt(double(n))) << seed;
  }
}

TEST(Sampling, DiscreteFrequencies) {
  const DiscreteDist d({{-1.0, 0.2}, {0.0, 0.3}, {2.0, 0.5}});
  const Sample s = sample(d, 200000, Seed{3}, 0);
  double c2 = 0;
  for (double x : s.values) c2 += (x == 2.0);
  EXPECT_NEAR(c2 / 200000, 0.5, 4 * std::sqrt(0.25 / 200000));
}

TEST(Sampling, ParallelMatchesSerial) {
  const std::size_t T = 64;
  std::vector<std::vector<double>> serial(T), par(T);
  for (std::size_t t = 0; t < T; ++t) serial[t] = sample(Laplace(0, 1), 50, Seed{9}, t).values;
  parallel_for(T, 4, [&](std::size_t t) { par[t] = sample(Laplace(0, 1), 50, Seed{9}, t).values; });
  EXPECT_EQ(serial, par);
}

TEST(Seed, SplitMixReference) {
  // splitmix64 reference output for state 0 after one increment
  EXPECT_EQ(splitmix64_mix(0x9E3779B97F4A7C15ULL), 0xE220A8397B1DCDAFULL);
  EXPECT_NE(Seed{1}.substream(0), Seed{2}.substream(0));
}

TEST(Literals, RoundTrip) {
  for (const char* s : {"gaussian(0,1)", "laplace(3,0.5)", "discrete[(0,0.5),(1,0.5)]",
                        "huber(0.1,discrete[(5,1)])"}) {
    EXPECT_EQ(to_literal(parse_distribution(s)), s);
  }
  const ScenarioDist f = parse_distribution("nishiyama(0.5,F)");
  EXPECT_EQ(std::get<DiscreteDist>(f), nishiyama_triple(0.5).f);
  EXPECT_EQ(std::get<DiscreteDist>(parse_distribution("alpha_triple(0.1,1,G)")),
            alpha_triple(0.1, 1.0).g);
  EXPECT_EQ(parse_distribution(to_literal(f)), f);
}

TEST(Literals, ErrorsCarryColumns) {
  try {
    parse_distribution("gauss(0,1)");
    FAIL();
  } catch (const LiteralError& e) {
    EXPECT_EQ(e.column(), 1u);
  }
  try {
    parse_distribution("discrete[(0,0.5),(1,0.5)");
    FAIL();
  } catch (const LiteralError& e) {
    EXPECT_GT(e.column(), 20u);
  }
  EXPECT_THROW(parse_distribution("gaussian(0,-1)"), LiteralError);
  EXPECT_THROW(parse_distribution("huber(0.7,discrete[(0,1)])"), LiteralError);
}
