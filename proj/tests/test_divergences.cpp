#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "meanlb/divergences.hpp"
#include "meanlb/numeric.hpp"
#include "test_util.hpp"

using namespace meanlb;
using meanlb::testing::random_discrete;

namespace {
const DiscreteDist B(double a) { return DiscreteDist::bernoulli(a); }
}  // namespace

TEST(KL, Values) {
  EXPECT_EQ(kl_discrete(B(0.3), B(0.3)).value, 0.0);
  EXPECT_NEAR(kl_discrete(B(0.5), B(0.25)).value, 0.14384103622589046, 1e-15);
  EXPECT_TRUE(kl_discrete(B(0.5), B(0.25)).exact);
  EXPECT_EQ(kl_discrete(DiscreteDist::point_mass(1), DiscreteDist::point_mass(0)).value, kInf);
  // absolute continuity fails one way only
  EXPECT_EQ(kl_discrete(B(0.5), B(1.0)).value, kInf);
  EXPECT_NEAR(kl_discrete(B(1.0), B(0.5)).value, std::log(2.0), 1e-15);
}

TEST(Renyi, Values) {
  EXPECT_NEAR(renyi_discrete(0.5, B(0.25), B(0.75)).value, 0.28768207245178093, 1e-15);
  EXPECT_NEAR(renyi_discrete(0.3, B(0.2), B(0.2)).value, 0.0, 1e-15);
  const NishiyamaTriple t = nishiyama_triple(0.5);
  EXPECT_NEAR(renyi_discrete(0.5, t.f, t.g).value, std::log(2.0), 1e-12);
  EXPECT_EQ(renyi_discrete(0.5, DiscreteDist::point_mass(0), DiscreteDist::point_mass(1)).value,
            kInf);
  EXPECT_THROW(renyi_discrete(0.0, B(0.2), B(0.3)), DomainError);
  EXPECT_THROW(renyi_discrete(1.0, B(0.2), B(0.3)), DomainError);
}

TEST(Renyi, HalfIsSymmetric) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const DiscreteDist p = random_discrete(rng, 6), q = random_discrete(rng, 6);
    const double a = renyi_discrete(0.5, p, q).value, b = renyi_discrete(0.5, q, p).value;
    if (std::isinf(a)) {
      EXPECT_TRUE(std::isinf(b));
    } else {
      EXPECT_NEAR(a, b, 1e-13 * (1 + a));
    }
  }
}

TEST(Hellinger, Values) {
  EXPECT_EQ(hellinger_discrete(B(0.4), B(0.4)), 0.0);
  EXPECT_NEAR(hellinger_squared_discrete(B(0.25), B(0.75)), 0.13397459621556135, 1e-15);
  for (double y : {0.01, 0.5, 3.0}) {
    const NishiyamaTriple t = nishiyama_triple(y);
    const double m2 = 2 * y;  // mean-variance set value with σ = 1
    EXPECT_NEAR(hellinger_squared_discrete(t.f, t.g), 1 - std::sqrt(1 - m2 / (m2 + 1)), 1e-12);
  }
}

TEST(Divergences, RandomIdentities) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const DiscreteDist p = random_discrete(rng, 8), q = random_discrete(rng, 8);
    const double d = renyi_discrete(0.5, p, q).value;
    const double h2 = hellinger_squared_discrete(p, q);
    if (std::isinf(d)) {
      EXPECT_NEAR(h2, 1.0, 1e-15);
      continue;
    }
    EXPECT_NEAR(0.5 * d, -std::log1p(-h2), 1e-12);
    EXPECT_GE(kl_discrete(p, q).value, 0.0);
    const ChernoffResult c = chernoff_discrete(p, q);
    EXPECT_LE(d, 2 * c.divergence.value + 2 * c.divergence.residual + 1e-12);
    // Rényi orders are ordered
    EXPECT_LE(renyi_discrete(0.3, p, q).value, renyi_discrete(0.7, p, q).value + 1e-12);
  }
}

TEST(Chernoff, Values) {
  const ChernoffResult same = chernoff_discrete(B(0.3), B(0.3));
  EXPECT_NEAR(same.divergence.value, 0.0, 1e-15);
  const ChernoffResult c = chernoff_discrete(B(0.25), B(0.75));
  EXPECT_NEAR(c.divergence.value, 0.14384103622589046, 1e-9);
  EXPECT_NEAR(c.alpha, 0.5, 1e-8);
  const NishiyamaTriple t = nishiyama_triple(0.5);
  EXPECT_NEAR(2 * chernoff_discrete(t.f, t.g).divergence.value, std::log(2.0), 1e-9);
  EXPECT_EQ(chernoff_discrete(DiscreteDist::point_mass(0), DiscreteDist::point_mass(1))
                .divergence.value,
            kInf);
  EXPECT_THROW(chernoff_discrete(B(0.2), B(0.3), 0.0), DomainError);
}

TEST(Chernoff, OptimalPBalancesBothDivergences) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const DiscreteDist f = random_discrete(rng, 6), g = random_discrete(rng, 6);
    const ChernoffResult c = chernoff_discrete(f, g);
    if (std::isinf(c.divergence.value)) continue;
    const double kf = kl_discrete(c.p_star, f).value, kg = kl_discrete(c.p_star, g).value;
    EXPECT_NEAR(std::max(kf, kg), c.divergence.value, 1e-9 * (1 + c.divergence.value));
    EXPECT_FALSE(c.used_fallback);
    // no mixture does better
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      std::vector<double> pts, lw;
      for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = f.points()[j];
        const double gm = g.mass_at(x);
        if (gm > 0) {
          pts.push_back(x);
          lw.push_back(a * f.log_weights()[j] + (1 - a) * std::log(gm));
        }
      }
      const DiscreteDist pa = DiscreteDist::from_log_weights(pts, lw);
      EXPECT_GE(std::max(kl_discrete(pa, f).value, kl_discrete(pa, g).value),
                c.divergence.value - 1e-9);
    }
  }
}

TEST(Chernoff, ReflectionSymmetricPairs) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const DiscreteDist f = random_discrete(rng, 6, -4.5, 1.0);
    const DiscreteDist g = f.reflect(0.0);
    const ChernoffResult c = chernoff_discrete(f, g);
    const double d = renyi_discrete(0.5, f, g).value;
    if (std::isinf(d)) continue;
    EXPECT_LE(std::abs(2 * c.divergence.value - d), 1e-8 + 2 * c.divergence.residual);
  }
}

TEST(BernoulliTightness, ClosedForm) {
  for (double a : {0.01, 0.1, 0.25, 0.4}) {
    const double closed = std::log(1 / (4 * a)) + std::log(1 / (1 - a));
    EXPECT_NEAR(renyi_discrete(0.5, B(a), B(1 - a)).value, closed, 1e-12);
    EXPECT_NEAR(2 * chernoff_discrete(B(a), B(1 - a)).divergence.value, closed, 1e-9);
    EXPECT_NEAR(chernoff_discrete(B(a), B(1 - a)).divergence.value,
                kl_discrete(B(0.5), B(a)).value, 1e-9);
  }
}

TEST(ClosedForms, GaussianRenyiHalf) {
  EXPECT_NEAR(renyi_half_gaussian(0, 1, 2, 1), 1.0, 1e-15);
  EXPECT_NEAR(renyi_half_gaussian(0.7, 1.3, 0.7, 1.3), 0.0, 1e-15);
  EXPECT_NEAR(renyi_half_gaussian(0, 1, 0, 2), 0.22314355131420976, 1e-15);
  // quadrature oracle: -2 log ∫ sqrt(f g)
  const double m1 = -0.3, s1 = 0.8, m2 = 1.1, s2 = 1.7;
  double bc = 0.0;
  const double h = 1e-3;
  for (double x = -40; x < 40; x += h) {
    bc += std::sqrt(normal_pdf((x - m1) / s1) / s1 * normal_pdf((x - m2) / s2) / s2) * h;
  }
  EXPECT_NEAR(renyi_half_gaussian(m1, s1, m2, s2), -2 * std::log(bc), 1e-9);
  EXPECT_THROW(renyi_half_gaussian(0, 0, 0, 1), DomainError);
}

TEST(ClosedForms, LaplaceShiftKl) {
  EXPECT_EQ(kl_laplace_shift(0, 2.0), 0.0);
  EXPECT_NEAR(kl_laplace_shift(1, 1), 0.36787944117144233, 1e-15);
  EXPECT_NEAR(kl_laplace_shift(2, 1), 1.1353352832366127, 1e-15);
  double prev = 0.0;
  for (double d = 0.1; d < 5; d += 0.1) {
    const double v = kl_laplace_shift(d, 0.7);
    EXPECT_GT(v, prev);
    prev = v;
  }
  // quadrature of ∫ f log(f/g) with f = Laplace(0,1), g = Laplace(1.5,1)
  double s = 0.0;
  const double h = 1e-4;
  for (double x = -40; x < 40; x += h) {
    const double lf = -std::abs(x), lg = -std::abs(x - 1.5);
    s += 0.5 * std::exp(lf) * (lf - lg) * h;
  }
  EXPECT_NEAR(kl_laplace_shift(1.5, 1.0), s, 1e-6);
  EXPECT_THROW(kl_laplace_shift(1.0, 0.0), DomainError);
}

TEST(DataProcessing, Holds) {
  const auto same = verify_data_processing(B(0.3), B(0.3), [](double x) { return x > 0.5; });
  EXPECT_TRUE(same.holds);
  EXPECT_EQ(same.kl, 0.0);
  const auto b = verify_data_processing(B(0.25), B(0.75), [](double x) { return x > 0.5; });
  EXPECT_TRUE(b.holds);
  EXPECT_GE(b.kl_slack, 0.0);
  EXPECT_GE(b.min_renyi_slack, 0.0);
  EXPECT_EQ(b.alphas.size(), 9u);

  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> mask(0, 1023);
  for (int i = 0; i < 200; ++i) {
    const DiscreteDist p = random_discrete(rng, 6), q = random_discrete(rng, 6);
    const int m = mask(rng);
    const auto r = verify_data_processing(p, q, [m](double x) { return (m >> int(x)) & 1; });
    EXPECT_TRUE(r.holds) << i;
  }
}

TEST(ChangeOfMeasure, Holds) {
  const SampleEvent nonneg = [](std::span<const double> xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s >= 0;
  };
  const DiscreteDist b = B(0.3);
  EXPECT_TRUE(verify_change_of_measure(b, b, b, 1, nonneg, 1.0).holds);

  const NishiyamaTriple t = nishiyama_triple(0.5);
  const auto r = verify_change_of_measure(t.p, t.f, t.g, 6, nonneg, 0.1);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.outcomes, 64u * 3);
  EXPECT_NEAR(r.kl_product_pf, 6 * r.kl_pf, 1e-12);
  EXPECT_NEAR(r.kl_product_pg, 6 * r.kl_pg, 1e-12);

  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> nn(1, 5);
  for (int i = 0; i < 50; ++i) {
    const DiscreteDist p = random_discrete(rng, 4), f = random_discrete(rng, 4),
                       g = random_discrete(rng, 4);
    const std::size_t n = std::size_t(nn(rng));
    const double thr = 4.5 * double(n);
    const auto rr = verify_change_of_measure(
        p, f, g, n,
        [thr](std::span<const double> xs) {
          double s = 0;
          for (double x : xs) s += x;
          return s >= thr;
        },
        0.5);
    EXPECT_TRUE(rr.holds) << i;
  }
}

TEST(ChangeOfMeasure, RefusesHugeEnumeration) {
  const DiscreteDist d({{0, 0.1}, {1, 0.1}, {2, 0.1}, {3, 0.1}, {4, 0.1},
                        {5, 0.1}, {6, 0.1}, {7, 0.1}, {8, 0.1}, {9, 0.1}});
  EXPECT_THROW(verify_change_of_measure(d, d, d, 7, [](std::span<const double>) { return true; },
                                        0.5),
               DomainError);
  EXPECT_THROW(verify_change_of_measure(d, d, d, 2, [](std::span<const double>) { return true; },
                                        0.0),
               DomainError);
}
