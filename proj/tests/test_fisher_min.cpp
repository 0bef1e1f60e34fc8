#include <gtest/gtest.h>

#include <cmath>

#include "meanlb/fisher_min.hpp"
#include "meanlb/numeric.hpp"

using namespace meanlb;

// Reference values from tests/oracle/oracle.py.

TEST(Omega, Values) {
  const FisherSolveResult r = solve_omega(0.2);
  EXPECT_NEAR(r.root, 1.7516098770499207, 1e-12);
  EXPECT_NEAR(r.info, 1.5717952500556573, 1e-11);
  EXPECT_LE(std::abs(interval_mass_epsilon(r.root) - 0.2), 1e-12);
  EXPECT_LE(std::abs(r.residual), 1e-12);
  EXPECT_NEAR(r.info, 1.57, 0.01);
}

TEST(Omega, Limits) {
  const FisherSolveResult hi = solve_omega(0.999);
  EXPECT_NEAR(hi.root, 0.04473254545250751, 1e-10);
  EXPECT_LT(hi.info, 0.01);
  // ω approaches π slowly: 0.023 away at ε = 1e-6
  const FisherSolveResult lo = solve_omega(1e-6);
  EXPECT_NEAR(lo.root, 3.1183437039856783, 1e-9);
  EXPECT_NEAR(lo.info, 9.652102536678720, 1e-7);
  EXPECT_GT(solve_omega(1e-9).root, lo.root);
  EXPECT_LT(kPi - solve_omega(1e-12).root, 1e-3);
  EXPECT_THROW(solve_omega(0.0), DomainError);
  EXPECT_THROW(solve_omega(1.0), DomainError);
}

TEST(Omega, EpsilonMapDecreasing) {
  double prev = 1.0;
  for (double w = 1e-6; w < kPi; w += 0.01) {
    const double e = interval_mass_epsilon(w);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Huber, Values) {
  const FisherSolveResult r = solve_huber_k(0.2);
  EXPECT_NEAR(r.root, 0.86159211241582881, 1e-12);
  EXPECT_NEAR(r.info, 0.39840382661564654, 1e-12);
  EXPECT_LE(std::abs(huber_k_lhs(r.root) - 0.2 / 0.8), 1e-12);
  EXPECT_NEAR(r.info, 0.40, 0.01);
  EXPECT_NEAR(huber_least_favorable_info(0.2), 0.48887038962690321, 1e-12);
  EXPECT_THROW(solve_huber_k(0.5), DomainError);
  EXPECT_THROW(solve_huber_k(0.0), DomainError);
}

TEST(Huber, VanishingCorruption) {
  // the display as written tends to 0.9898 at ε = 1e-8; Huber's (1-ε)(2Φ(k)-1) tends to 1
  const FisherSolveResult r = solve_huber_k(1e-8);
  EXPECT_NEAR(r.root, 5.135180976521222, 1e-9);
  EXPECT_NEAR(r.info, 0.98975177954914931, 1e-9);
  EXPECT_NEAR(huber_least_favorable_info(1e-8), 0.99999970812735584, 1e-9);
}

TEST(Huber, InformationBelowOneAndOmegaAboveOne) {
  for (double e = 0.01; e < 0.49; e += 0.01) {
    EXPECT_LT(solve_huber_k(e).info, 1.0) << e;
    EXPECT_LT(huber_least_favorable_info(e), 1.0) << e;
  }
  // I₁ exceeds 1 on the small-ε side of the sweep
  EXPECT_GT(solve_omega(0.2).info, 1.0);
}

TEST(Huber, DensityIntegratesAndMatchesQuadrature) {
  for (double e : {0.05, 0.2, 0.4}) {
    const double k = solve_huber_k(e).root;
    const FisherNumericResult q = fisher_numeric(
        [&](double x) { return huber_least_favorable_density(x, e, k); },
        [&](double x) { return huber_least_favorable_derivative(x, e, k); }, -kInf, kInf);
    EXPECT_NEAR(q.mass, 1.0, 1e-10);
    EXPECT_NEAR(q.info, huber_least_favorable_info(e), 1e-8);
  }
}

TEST(FisherNumeric, Oracles) {
  const FisherNumericResult n = fisher_numeric([](double x) { return normal_pdf(x); },
                                               [](double x) { return -x * normal_pdf(x); }, -12, 12);
  EXPECT_NEAR(n.info, 1.0, 1e-6);
  for (double s : {0.5, 2.0}) {
    const FisherNumericResult g = fisher_numeric(
        [s](double x) { return normal_pdf(x / s) / s; },
        [s](double x) { return -x / (s * s) * normal_pdf(x / s) / s; }, -12 * s, 12 * s);
    EXPECT_NEAR(g.info, 1 / (s * s), 1e-6);
  }
  // cos² density on [-1, 1]: information π²
  const FisherNumericResult c = fisher_numeric(
      [](double x) { return std::pow(std::cos(kPi * x / 2), 2); },
      [](double x) { return -kPi / 2 * std::sin(kPi * x); }, -1, 1);
  EXPECT_NEAR(c.info, kPi * kPi, 1e-4);
  // the same shape on a unit interval, as a density, has information 4π²
  const FisherNumericResult u = fisher_numeric(
      [](double x) { return 2 * std::pow(std::cos(kPi * (x - 0.5)), 2); },
      [](double x) { return -2 * kPi * std::sin(2 * kPi * (x - 0.5)); }, 0, 1);
  EXPECT_NEAR(u.info, 4 * kPi * kPi, 1e-4);
}

TEST(FisherNumeric, TranslationInvariant) {
  auto info_at = [](double t) {
    return fisher_numeric([t](double x) { return normal_pdf(x - t); },
                          [t](double x) { return -(x - t) * normal_pdf(x - t); }, t - 12, t + 12)
        .info;
  };
  EXPECT_NEAR(info_at(0.0), info_at(7.3), 1e-9);
}

TEST(FisherNumeric, RejectsUnnormalised) {
  EXPECT_THROW(fisher_numeric([](double x) { return 2 * normal_pdf(x); },
                              [](double x) { return -2 * x * normal_pdf(x); }, -12, 12),
               DomainError);
  EXPECT_THROW(fisher_numeric([](double) { return 1.0; }, [](double) { return 0.0; }, 1, 0),
               DomainError);
}

TEST(Sweep, ShapeAndOrdering) {
  const auto rows = fisher_sweep();
  ASSERT_EQ(rows.size(), 97u);
  EXPECT_NEAR(rows.front().epsilon, 0.01, 1e-15);
  EXPECT_NEAR(rows.back().epsilon, 0.49, 1e-15);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].epsilon, rows[i - 1].epsilon);
    EXPECT_LT(rows[i].I1, rows[i - 1].I1);
    EXPECT_GT(rows[i].k, 0.0);
    EXPECT_LT(rows[i].I2_huber, rows[i - 1].I2_huber);
  }
}
