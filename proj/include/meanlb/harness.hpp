#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "meanlb/bounds.hpp"
#include "meanlb/distributions.hpp"
#include "meanlb/estimator.hpp"

namespace meanlb {

/// Invalid configuration text, with 1-based line and column.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The lower-bound curve printed next to each threshold. Literals:
/// gaussian, laplace, finite_variance_1, finite_variance_2, moment_alpha(α),
/// log_lipschitz(L), fisher(I), bounded_support(a,b), semi_bounded(var).
struct BoundSpec {
  BoundClass cls = BoundClass::finite_variance_1;
  double p1 = 0.0;
  double p2 = 0.0;
  bool operator==(const BoundSpec&) const = default;
};
std::string to_string(const BoundSpec& b);
BoundSpec parse_bound_spec(std::string_view text);

struct ExperimentConfig {
  ScenarioDist distribution = Gaussian(0.0, 1.0);
  std::vector<EstimatorSpec> estimators;
  std::size_t n = 0;
  std::vector<double> deltas;  // strictly decreasing, in (0,1)
  std::size_t trials = 0;      // >= 100
  Seed seed;
  std::string output;          // empty: standard output
  BoundSpec bound;
  bool operator==(const ExperimentConfig&) const;
};

/// Line-oriented `key = value` text; '#' starts a comment. Keys:
/// distribution, estimators (comma separated), n, deltas (comma separated),
/// trials, seed, output (optional), bound (optional). Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);
/// Canonical text; parse_config(to_text(c)) == c.
std::string to_text(const ExperimentConfig& config);
/// Throws ConfigError (line 0) for violated invariants.
void validate(const ExperimentConfig& config);

/// Threshold whose exceedance is counted: sqrt(2σ² y) with y the estimator's
/// own y or y_schedule(n, δ) for min-KL, sqrt(2σ² log(2/δ)/n) otherwise.
double estimator_threshold(const EstimatorSpec& spec, std::size_t n, double delta,
                           double variance);
/// Lower-bound curve in width units: sqrt(2σ² y) for y-valued bounds, ε as is,
/// η/sqrt(n) for per-sqrt(n) bounds; the Laplace class reports its δ floor.
double bound_value(const BoundSpec& bound, std::size_t n, double delta, double variance);

/// Whether the estimator's output depends on δ (min-KL with the schedule).
bool depends_on_delta(const EstimatorSpec& spec);

struct DeviationRecord {
  std::size_t estimator = 0;  // index into config.estimators
  std::size_t trial = 0;
  std::vector<double> estimate;    // per δ (identical entries if δ-independent)
  std::vector<double> abs_error;   // per δ
  std::vector<double> threshold;   // per δ
  std::vector<bool> exceeded;      // abs_error >= threshold and abs_error > 0
};

/// All trials, sorted by (estimator, trial). Trial t draws
/// sample(distribution, n, seed, t); the result does not depend on workers.
std::vector<DeviationRecord> run_trials(const ExperimentConfig& config, unsigned workers = 0);

struct ExperimentRow {
  std::string estimator;
  std::size_t n = 0;
  double delta = 0.0;
  std::size_t trials = 0;
  double exceed_rate = 0.0;
  double se = 0.0;  // sqrt(r(1-r)/T)
  double threshold = 0.0;
  std::string bound_class;
  double bound_value = 0.0;
  std::uint64_t seed = 0;
};

std::vector<ExperimentRow> summarize(const ExperimentConfig& config,
                                     const std::vector<DeviationRecord>& records);
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, unsigned workers = 0);

/// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string csv_field(const std::string& s);

/// `# meanlb-csv v1` then: estimator,n,delta,trials,exceed_rate,se,threshold,
/// bound_class,bound_value,seed. Doubles use the shortest round-trip form.
std::string to_csv(const std::vector<ExperimentRow>& rows);
std::string to_text(const std::vector<ExperimentRow>& rows);

struct QuantileRow {
  std::string estimator;
  std::optional<double> delta;  // set for δ-dependent estimators only
  double q = 0.0;
  double quantile = 0.0;
};

/// Nearest-rank quantiles of |error|: the ceil(q·T)-th smallest value.
double nearest_rank(std::vector<double> values, double q);
std::vector<QuantileRow> quantile_curve(const ExperimentConfig& config,
                                        const std::vector<double>& qs, unsigned workers = 0);
std::vector<QuantileRow> quantile_curve(const ExperimentConfig& config,
                                        const std::vector<DeviationRecord>& records,
                                        const std::vector<double>& qs);
/// `# meanlb-csv v1` then: estimator,delta,q,quantile (delta empty when unused).
std::string to_csv(const std::vector<QuantileRow>& rows);

/// Whole-file read and write; IoError on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace meanlb
