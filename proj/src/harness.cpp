#include "meanlb/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "meanlb/numeric.hpp"
#include "meanlb/parallel.hpp"

namespace meanlb {

ConfigError::ConfigError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? msg
                                   : "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Trimmed view plus the number of characters dropped on the left.
std::pair<std::string_view, std::size_t> trim_with_offset(std::string_view s) {
  std::size_t left = 0;
  while (left < s.size() && is_space(s[left])) ++left;
  std::size_t right = s.size();
  while (right > left && is_space(s[right - 1])) --right;
  return {s.substr(left, right - left), left};
}

// Splits at commas outside brackets; each piece carries its offset in `s`.
std::vector<std::pair<std::string_view, std::size_t>> split_top_level(std::string_view s) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      const auto [piece, off] = trim_with_offset(s.substr(start, i - start));
      out.emplace_back(piece, start + off);
      start = i + 1;
    } else if (s[i] == '(' || s[i] == '[') {
      ++depth;
    } else if (s[i] == ')' || s[i] == ']') {
      --depth;
    }
  }
  return out;
}

template <class T>
bool parse_exact(std::string_view s, T& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

std::string to_string(const BoundSpec& b) {
  const std::string name = to_string(b.cls);
  switch (b.cls) {
    case BoundClass::moment_alpha:
    case BoundClass::log_lipschitz:
    case BoundClass::fisher:
    case BoundClass::semi_bounded:
      return name + "(" + format_double(b.p1) + ")";
    case BoundClass::bounded_support:
      return name + "(" + format_double(b.p1) + "," + format_double(b.p2) + ")";
    default:
      return name;
  }
}

BoundSpec parse_bound_spec(std::string_view text) {
  text = trim_with_offset(text).first;
  std::string_view name = text;
  std::vector<double> args;
  if (const auto open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') throw DomainError("bound: missing ')'");
    name = trim_with_offset(text.substr(0, open)).first;
    for (const auto& [piece, off] : split_top_level(text.substr(open + 1, text.size() - open - 2))) {
      double v = 0.0;
      if (!parse_exact(piece, v)) throw DomainError("bound: bad number '" + std::string(piece) + "'");
      args.push_back(v);
    }
  }
  BoundSpec b;
  b.cls = parse_bound_class(name);
  std::size_t want = 0;
  switch (b.cls) {
    case BoundClass::moment_alpha:
    case BoundClass::log_lipschitz:
    case BoundClass::fisher:
    case BoundClass::semi_bounded:
      want = 1;
      break;
    case BoundClass::bounded_support:
      want = 2;
      break;
    default:
      break;
  }
  if (args.size() != want) {
    throw DomainError("bound: " + std::string(name) + " takes " + std::to_string(want) + " argument(s)");
  }
  if (want >= 1) b.p1 = args[0];
  if (want == 2) b.p2 = args[1];
  // Domain checks through the calculators themselves.
  bound_value(b, 1, 0.01, 1.0);
  return b;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return distribution == o.distribution && estimators == o.estimators && n == o.n &&
         deltas == o.deltas && trials == o.trials && seed == o.seed && output == o.output &&
         bound == o.bound;
}

void validate(const ExperimentConfig& c) {
  if (c.estimators.empty()) throw ConfigError("no estimators", 0, 0);
  if (c.n == 0) throw ConfigError("n must be >= 1", 0, 0);
  if (c.trials < 100) throw ConfigError("trials must be >= 100", 0, 0);
  if (c.deltas.empty()) throw ConfigError("no deltas", 0, 0);
  for (std::size_t i = 0; i < c.deltas.size(); ++i) {
    if (!(c.deltas[i] > 0.0 && c.deltas[i] < 1.0)) throw ConfigError("deltas must lie in (0,1)", 0, 0);
    if (i > 0 && !(c.deltas[i] < c.deltas[i - 1])) {
      throw ConfigError("deltas must be strictly decreasing", 0, 0);
    }
  }
  for (const auto& e : c.estimators) {
    validate(e);
    if (const auto* b = std::get_if<MedianOfMeans>(&e); b && b->blocks > c.n) {
      throw ConfigError("mom blocks exceed n", 0, 0);
    }
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto [body, body_off] = trim_with_offset(line);
    if (body.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no, body_off + 1);
    const auto [key, key_off] = trim_with_offset(line.substr(0, eq));
    const auto [value, voff] = trim_with_offset(line.substr(eq + 1));
    const std::size_t key_col = key_off + 1;
    const std::size_t val_col = eq + 1 + voff + 1;
    const std::string k(key);
    if (k.empty()) throw ConfigError("missing key", line_no, key_col);
    if (seen.count(k)) throw ConfigError("duplicate key '" + k + "'", line_no, key_col);
    seen[k] = line_no;
    if (value.empty()) throw ConfigError("missing value for '" + k + "'", line_no, val_col);
    try {
      if (k == "distribution") {
        try {
          c.distribution = parse_distribution(value);
        } catch (const LiteralError& e) {
          std::string msg = e.what();
          if (const auto at = msg.rfind(" at column "); at != std::string::npos) msg.resize(at);
          throw ConfigError(msg, line_no, val_col + e.column() - 1);
        }
      } else if (k == "estimators") {
        c.estimators.clear();
        for (const auto& [piece, off] : split_top_level(value)) {
          try {
            c.estimators.push_back(parse_estimator(piece));
          } catch (const DomainError& e) {
            throw ConfigError(e.what(), line_no, val_col + off);
          }
        }
      } else if (k == "n" || k == "trials") {
        std::size_t v = 0;
        if (!parse_exact(value, v)) throw ConfigError("expected a nonnegative integer", line_no, val_col);
        (k == "n" ? c.n : c.trials) = v;
      } else if (k == "seed") {
        if (!parse_exact(value, c.seed.master)) throw ConfigError("expected a 64-bit unsigned seed", line_no, val_col);
      } else if (k == "deltas") {
        c.deltas.clear();
        for (const auto& [piece, off] : split_top_level(value)) {
          double v = 0.0;
          if (!parse_exact(piece, v)) throw ConfigError("bad delta '" + std::string(piece) + "'", line_no, val_col + off);
          c.deltas.push_back(v);
        }
      } else if (k == "output") {
        c.output = std::string(value);
      } else if (k == "bound") {
        try {
          c.bound = parse_bound_spec(value);
        } catch (const DomainError& e) {
          throw ConfigError(e.what(), line_no, val_col);
        }
      } else {
        throw ConfigError("unknown key '" + k + "'", line_no, key_col);
      }
    } catch (const DomainError& e) {
      throw ConfigError(e.what(), line_no, val_col);
    }
    if (eol == text.size()) break;
  }
  for (const char* req : {"distribution", "estimators", "n", "deltas", "trials", "seed"}) {
    if (!seen.count(req)) throw ConfigError(std::string("missing key '") + req + "'", 0, 0);
  }
  validate(c);
  return c;
}

std::string to_text(const ExperimentConfig& c) {
  std::string s;
  s += "distribution = " + to_literal(c.distribution) + "\n";
  s += "estimators = ";
  for (std::size_t i = 0; i < c.estimators.size(); ++i) s += (i ? ", " : "") + to_string(c.estimators[i]);
  s += "\nn = " + std::to_string(c.n) + "\n";
  s += "deltas = ";
  for (std::size_t i = 0; i < c.deltas.size(); ++i) s += (i ? ", " : "") + format_double(c.deltas[i]);
  s += "\ntrials = " + std::to_string(c.trials) + "\n";
  s += "seed = " + std::to_string(c.seed.master) + "\n";
  s += "bound = " + to_string(c.bound) + "\n";
  if (!c.output.empty()) s += "output = " + c.output + "\n";
  return s;
}

bool depends_on_delta(const EstimatorSpec& spec) {
  const auto* m = std::get_if<MinKL>(&spec);
  return m && m->y == 0.0;
}

double estimator_threshold(const EstimatorSpec& spec, std::size_t n, double delta,
                           double variance) {
  if (const auto* m = std::get_if<MinKL>(&spec)) {
    const double y = m->y > 0.0 ? m->y : y_schedule(n, delta);
    return std::sqrt(2.0 * variance * y);
  }
  return std::sqrt(2.0 * variance * std::log(2.0 / delta) / static_cast<double>(n));
}

double bound_value(const BoundSpec& b, std::size_t n, double delta, double variance) {
  BoundQuery q;
  q.cls = b.cls;
  q.n = n;
  q.delta = delta;
  q.alpha = b.p1;
  q.L = b.p1;
  q.I = b.p1;
  q.a = b.p1;
  q.b = b.p2;
  q.variance = b.p1;
  const BoundResult r = compute_bound(q);
  switch (r.kind) {
    case BoundKind::variance_y: return std::sqrt(2.0 * variance * r.value);
    case BoundKind::width: return r.value;
    case BoundKind::width_sqrt_n: return r.value / std::sqrt(static_cast<double>(n));
    case BoundKind::delta_floor: return r.value;
  }
  return r.value;
}

std::vector<DeviationRecord> run_trials(const ExperimentConfig& c, unsigned workers) {
  validate(c);
  const Moments mom = moments(c.distribution);
  const std::size_t E = c.estimators.size();
  const std::size_t D = c.deltas.size();
  std::vector<DeviationRecord> records(E * c.trials);
  std::vector<std::vector<double>> thresholds(E, std::vector<double>(D));
  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t d = 0; d < D; ++d) {
      thresholds[e][d] = estimator_threshold(c.estimators[e], c.n, c.deltas[d], mom.variance);
    }
  }
  parallel_for(c.trials, workers, [&](std::size_t t) {
    const Sample s = sample(c.distribution, c.n, c.seed, t);
    for (std::size_t e = 0; e < E; ++e) {
      DeviationRecord& r = records[e * c.trials + t];
      r.estimator = e;
      r.trial = t;
      r.estimate.resize(D);
      r.abs_error.resize(D);
      r.exceeded.resize(D);
      r.threshold = thresholds[e];
      const EstimatorSpec& spec = c.estimators[e];
      const bool per_delta = depends_on_delta(spec);
      for (std::size_t d = 0; d < D; ++d) {
        if (per_delta || d == 0) {
          r.estimate[d] = estimate(spec, s.values, per_delta ? y_schedule(c.n, c.deltas[d]) : 0.0);
        } else {
          r.estimate[d] = r.estimate[0];
        }
        r.abs_error[d] = std::abs(r.estimate[d] - mom.mean);
        // a zero threshold (degenerate law) is only exceeded by a nonzero error
        r.exceeded[d] = r.abs_error[d] >= r.threshold[d] && r.abs_error[d] > 0.0;
      }
    }
  });
  return records;
}

std::vector<ExperimentRow> summarize(const ExperimentConfig& c,
                                     const std::vector<DeviationRecord>& records) {
  const Moments mom = moments(c.distribution);
  std::vector<ExperimentRow> rows;
  for (std::size_t e = 0; e < c.estimators.size(); ++e) {
    for (std::size_t d = 0; d < c.deltas.size(); ++d) {
      std::size_t exceed = 0;
      std::size_t total = 0;
      for (const auto& r : records) {
        if (r.estimator != e) continue;
        ++total;
        if (r.exceeded[d]) ++exceed;
      }
      ExperimentRow row;
      row.estimator = to_string(c.estimators[e]);
      row.n = c.n;
      row.delta = c.deltas[d];
      row.trials = total;
      row.exceed_rate = total ? static_cast<double>(exceed) / static_cast<double>(total) : 0.0;
      row.se = total ? std::sqrt(row.exceed_rate * (1.0 - row.exceed_rate) / static_cast<double>(total)) : 0.0;
      row.threshold = estimator_threshold(c.estimators[e], c.n, c.deltas[d], mom.variance);
      row.bound_class = to_string(c.bound);
      row.bound_value = bound_value(c.bound, c.n, c.deltas[d], mom.variance);
      row.seed = c.seed.master;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, unsigned workers) {
  return summarize(config, run_trials(config, workers));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string to_csv(const std::vector<ExperimentRow>& rows) {
  std::string s = "# meanlb-csv v1\n";
  s += "estimator,n,delta,trials,exceed_rate,se,threshold,bound_class,bound_value,seed\n";
  for (const auto& r : rows) {
    s += csv_field(r.estimator) + "," + std::to_string(r.n) + "," + format_double(r.delta) + "," +
         std::to_string(r.trials) + "," + format_double(r.exceed_rate) + "," + format_double(r.se) +
         "," + format_double(r.threshold) + "," + csv_field(r.bound_class) + "," +
         format_double(r.bound_value) + "," + std::to_string(r.seed) + "\n";
  }
  return s;
}

std::string to_text(const std::vector<ExperimentRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "estimator" << std::right << std::setw(8) << "n"
     << std::setw(12) << "delta" << std::setw(9) << "trials" << std::setw(13) << "exceed"
     << std::setw(13) << "se" << std::setw(13) << "threshold" << std::setw(13) << "bound" << "\n";
  os << std::setprecision(6);
  for (const auto& r : rows) {
    os << std::left << std::setw(22) << r.estimator << std::right << std::setw(8) << r.n
       << std::setw(12) << r.delta << std::setw(9) << r.trials << std::setw(13) << r.exceed_rate
       << std::setw(13) << r.se << std::setw(13) << r.threshold << std::setw(13) << r.bound_value
       << "\n";
  }
  if (!rows.empty()) os << "bound class: " << rows.front().bound_class << ", seed " << rows.front().seed << "\n";
  return os.str();
}

double nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("nearest_rank: no values");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("nearest_rank: q must lie in (0,1)");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<QuantileRow> quantile_curve(const ExperimentConfig& c,
                                        const std::vector<DeviationRecord>& records,
                                        const std::vector<double>& qs) {
  for (double q : qs) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile_curve: levels must lie in (0,1)");
  }
  std::vector<QuantileRow> rows;
  for (std::size_t e = 0; e < c.estimators.size(); ++e) {
    const bool per_delta = depends_on_delta(c.estimators[e]);
    const std::size_t nd = per_delta ? c.deltas.size() : 1;
    for (std::size_t d = 0; d < nd; ++d) {
      std::vector<double> errs;
      for (const auto& r : records) {
        if (r.estimator == e) errs.push_back(r.abs_error[d]);
      }
      std::sort(errs.begin(), errs.end());
      for (double q : qs) {
        QuantileRow row;
        row.estimator = to_string(c.estimators[e]);
        if (per_delta) row.delta = c.deltas[d];
        row.q = q;
        row.quantile = nearest_rank(errs, q);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<QuantileRow> quantile_curve(const ExperimentConfig& config,
                                        const std::vector<double>& qs, unsigned workers) {
  return quantile_curve(config, run_trials(config, workers), qs);
}

std::string to_csv(const std::vector<QuantileRow>& rows) {
  std::string s = "# meanlb-csv v1\nestimator,delta,q,quantile\n";
  for (const auto& r : rows) {
    s += csv_field(r.estimator) + "," + (r.delta ? format_double(*r.delta) : std::string()) + "," +
         format_double(r.q) + "," + format_double(r.quantile) + "\n";
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

}  // namespace meanlb
