#include "meanlb/numeric.hpp"

#include <algorithm>
#include <charconv>

namespace meanlb {

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -kInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  CompensatedSum s;
  for (double x : xs) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace meanlb
