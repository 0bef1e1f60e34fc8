#pragma once

#include <random>
#include <vector>

#include "meanlb/distributions.hpp"

namespace meanlb::testing {

/// Random distribution on at most `max_atoms` points drawn from {0, ..., 9}
/// (so two draws usually share support). Weights are uniform(0.05, 1) before
/// normalisation.
inline DiscreteDist random_discrete(std::mt19937_64& rng, int max_atoms, double lo = 0.0,
                                    double step = 1.0) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_int_distribution<int> point(0, 9);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  const int k = count(rng);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    atoms.push_back({lo + step * point(rng), w(rng)});
    total += atoms.back().weight;
  }
  for (auto& a : atoms) a.weight /= total;
  return DiscreteDist(std::move(atoms));
}

}  // namespace meanlb::testing
