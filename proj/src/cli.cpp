#include "meanlb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "meanlb/bounds.hpp"
#include "meanlb/divergences.hpp"
#include "meanlb/estimator.hpp"
#include "meanlb/fisher_min.hpp"
#include "meanlb/harness.hpp"
#include "meanlb/kinf.hpp"
#include "meanlb/numeric.hpp"

namespace meanlb {

namespace {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string render(const Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    os << "# meanlb-csv v1\n";
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << csv_field(row[j]);
      os << '\n';
    }
    return os.str();
  }
  if (t.rows.size() == 1) {
    std::size_t w = 0;
    for (const auto& c : t.columns) w = std::max(w, c.size());
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      os << std::left << std::setw(static_cast<int>(w + 2)) << (t.columns[j] + ":") << t.rows[0][j]
         << '\n';
    }
    return os.str();
  }
  std::vector<std::size_t> w(t.columns.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = t.columns[j].size();
    for (const auto& row : t.rows) w[j] = std::max(w[j], row[j].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
      os << std::left << std::setw(static_cast<int>(w[j] + 2)) << cells[j];
    }
    if (!cells.empty()) os << cells.back();
    os << '\n';
  };
  line(t.columns);
  for (const auto& row : t.rows) line(row);
  return os.str();
}

std::string fd(double x) { return format_double(x); }
std::string fb(bool b) { return b ? "true" : "false"; }

double parse_number(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(what + ": expected a number, got '" + std::string(s) + "'", 0, 0);
  }
  return v;
}

// delta=LO:HI:logsteps=K
void parse_sweep(const std::string& text, double& lo, double& hi, int& steps) {
  const std::string bad = "--sweep: expected delta=LO:HI:logsteps=K";
  if (text.rfind("delta=", 0) != 0) throw ConfigError(bad, 0, 0);
  std::vector<std::string> parts;
  std::stringstream ss(text.substr(6));
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3 || parts[2].rfind("logsteps=", 0) != 0) throw ConfigError(bad, 0, 0);
  lo = parse_number(parts[0], "--sweep");
  hi = parse_number(parts[1], "--sweep");
  const double k = parse_number(parts[2].substr(9), "--sweep");
  if (!(k >= 1.0 && k <= 1e6 && k == std::floor(k))) throw ConfigError(bad, 0, 0);
  steps = static_cast<int>(k);
}

struct Common {
  std::string output = "text";
};

void add_output(CLI::App* sub, Common& c) {
  sub->add_option("--output", c.output, "Output format")
      ->check(CLI::IsMember({"csv", "text"}))
      ->capture_default_str();
}

// ---------------------------------------------------------------- bound

struct BoundArgs : Common {
  std::string cls;
  std::size_t n = 1;
  double delta = 0.05;
  BoundQuery q;
  std::string sweep;
};

Table run_bound(BoundArgs& a) {
  a.q.cls = parse_bound_class(a.cls);
  a.q.n = a.n;
  a.q.delta = a.delta;
  std::vector<SweepRow> rows;
  if (a.sweep.empty()) {
    rows.push_back({a.q, compute_bound(a.q)});
  } else {
    double lo = 0.0, hi = 0.0;
    int steps = 0;
    parse_sweep(a.sweep, lo, hi, steps);
    rows = sweep_delta(a.q, lo, hi, steps);
  }
  Table t;
  t.columns = {"class", "n", "delta", "value", "kind", "residual"};
  if (a.sweep.empty()) {
    t.columns.push_back("feasible");
    t.columns.push_back("clamped");
  }
  for (const auto& r : rows) {
    std::vector<std::string> row = {to_string(r.query.cls), std::to_string(r.query.n),
                                    fd(r.query.delta),      fd(r.result.value),
                                    to_string(r.result.kind), fd(r.result.residual)};
    if (a.sweep.empty()) {
      row.push_back(fb(r.result.feasible));
      row.push_back(fb(r.result.clamped));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------- div

struct DivArgs : Common {
  std::string kind;
  std::string p;
  std::string q;
  double alpha = 0.5;
};

Table run_div(const DivArgs& a) {
  const ScenarioDist p = parse_distribution(a.p);
  const ScenarioDist q = parse_distribution(a.q);
  Table t;
  t.columns = {"kind", "alpha", "value", "residual", "exact"};
  auto emit = [&](double alpha, const DivergenceValue& v) {
    t.rows.push_back({a.kind, fd(alpha), fd(v.value), fd(v.residual), fb(v.exact)});
  };
  const auto* pd = std::get_if<DiscreteDist>(&p);
  const auto* qd = std::get_if<DiscreteDist>(&q);
  if (pd && qd) {
    if (a.kind == "kl") {
      emit(1.0, kl_discrete(*pd, *qd));
    } else if (a.kind == "renyi") {
      emit(a.alpha, renyi_discrete(a.alpha, *pd, *qd));
    } else if (a.kind == "hellinger") {
      emit(0.5, {hellinger_discrete(*pd, *qd), true, 0.0});
    } else {
      const ChernoffResult c = chernoff_discrete(*pd, *qd);
      emit(c.alpha, c.divergence);
    }
    return t;
  }
  const auto* pg = std::get_if<Gaussian>(&p);
  const auto* qg = std::get_if<Gaussian>(&q);
  if (pg && qg && (a.kind == "renyi" || a.kind == "hellinger")) {
    if (a.kind == "renyi" && a.alpha != 0.5) {
      throw ConfigError("div: Gaussian pairs support renyi at alpha = 0.5 only", 0, 0);
    }
    const double d = renyi_half_gaussian(pg->mu, pg->sigma, qg->mu, qg->sigma);
    // H² = 1 - exp(-D½/2)
    if (a.kind == "renyi") {
      emit(0.5, {d, true, 0.0});
    } else {
      emit(0.5, {std::sqrt(-std::expm1(-0.5 * d)), true, 0.0});
    }
    return t;
  }
  const auto* pl = std::get_if<Laplace>(&p);
  const auto* ql = std::get_if<Laplace>(&q);
  if (pl && ql && a.kind == "kl") {
    if (pl->b != ql->b) throw ConfigError("div: Laplace pairs need equal scales", 0, 0);
    emit(1.0, {kl_laplace_shift(ql->mu - pl->mu, pl->b), true, 0.0});
    return t;
  }
  throw ConfigError("div: unsupported pair for kind '" + a.kind +
                        "' (discrete pairs, Gaussian renyi/hellinger, Laplace kl)",
                    0, 0);
}

// ---------------------------------------------------------------- kinf

struct KinfArgs : Common {
  std::string sample;
  std::optional<double> at_most, at_least, equal;
  double B = 1.0;
  std::string centering = "about_m";
  double tol = 1e-9;
  bool oracle = false;
};

Table run_kinf(const KinfArgs& a) {
  const int given = int(a.at_most.has_value()) + int(a.at_least.has_value()) + int(a.equal.has_value());
  if (given != 1) {
    throw ConfigError("kinf: give exactly one of --mean-at-most, --mean-at-least, --mean-equal", 0, 0);
  }
  MomentConstraints cons;
  if (a.at_most) {
    cons.mean_kind = MeanKind::at_most;
    cons.m = *a.at_most;
  } else if (a.at_least) {
    cons.mean_kind = MeanKind::at_least;
    cons.m = *a.at_least;
  } else {
    cons.mean_kind = MeanKind::equal;
    cons.m = *a.equal;
  }
  cons.B = a.B;
  cons.centering = a.centering == "raw" ? Centering::raw : Centering::about_m;
  const std::vector<double> xs = read_sample_file(a.sample);
  const DualCertificate d = kinf_dual(xs, cons, a.tol);
  Table t;
  t.columns = {"n", "value", "lambda1", "lambda2", "residual", "iterations"};
  t.rows.push_back({std::to_string(xs.size()), fd(d.value), fd(d.lambda1), fd(d.lambda2),
                    fd(d.residual), std::to_string(d.iterations)});
  if (a.oracle) {
    const PrimalOracleResult p = kinf_primal_refined(xs, cons);
    t.columns.push_back("primal");
    t.columns.push_back("primal_grid_feasible");
    t.rows[0].push_back(fd(p.value));
    t.rows[0].push_back(fb(p.grid_feasible));
  }
  return t;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs : Common {
  std::string spec = "minkl";
  std::optional<std::size_t> n;
  std::optional<double> delta;
  std::optional<double> y;
  std::string sample;
};

Table run_estimate(const EstimateArgs& a) {
  const EstimatorSpec spec = parse_estimator(a.spec);
  std::vector<double> xs = read_sample_file(a.sample);
  if (a.n) {
    if (*a.n == 0 || *a.n > xs.size()) {
      throw ConfigError("estimate: --n must lie in [1, " + std::to_string(xs.size()) + "]", 0, 0);
    }
    xs.resize(*a.n);
  }
  if (xs.empty()) throw ConfigError("estimate: empty sample", 0, 0);
  Table t;
  if (const auto* m = std::get_if<MinKL>(&spec)) {
    double y = m->y;
    if (y == 0.0 && a.y) y = *a.y;
    if (y == 0.0) {
      if (!a.delta) throw ConfigError("estimate: minkl needs --delta or a y value", 0, 0);
      y = y_schedule(xs.size(), *a.delta);
    }
    const MinKLResult r = minkl_estimate(xs, y, *m);
    t.columns = {"spec", "n", "delta", "y", "estimate", "lo", "hi", "gap_lo", "gap_hi",
                 "bisections", "widened"};
    t.rows.push_back({to_string(spec), std::to_string(xs.size()), a.delta ? fd(*a.delta) : "",
                      fd(r.y), fd(r.estimate), fd(r.lo), fd(r.hi), fd(r.gap_lo), fd(r.gap_hi),
                      std::to_string(r.bisections), fb(r.widened)});
  } else {
    t.columns = {"spec", "n", "estimate"};
    t.rows.push_back({to_string(spec), std::to_string(xs.size()), fd(estimate(spec, xs))});
  }
  return t;
}

// ---------------------------------------------------------------- fisher

struct FisherArgs : Common {
  std::string family;
  std::optional<double> eps;
  double variance = 1.0;
  double a = 0.0;
  double b = 1.0;
  bool sweep = false;
};

Table run_fisher(const FisherArgs& f) {
  Table t;
  if (f.sweep) {
    t.columns = {"epsilon", "omega", "I1", "k", "I2", "I2_huber"};
    for (const auto& r : fisher_sweep()) {
      t.rows.push_back({fd(r.epsilon), fd(r.omega), fd(r.I1), fd(r.k), fd(r.I2), fd(r.I2_huber)});
    }
    return t;
  }
  if (f.family.empty()) throw ConfigError("fisher: --family or --sweep is required", 0, 0);
  t.columns = {"family", "epsilon", "root", "info", "residual", "check"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto need_eps = [&]() {
    if (!f.eps) throw ConfigError("fisher: --eps is required for family " + f.family, 0, 0);
    return *f.eps;
  };
  if (f.family == "interval_mass") {
    const FisherSolveResult r = solve_omega(need_eps());
    t.rows.push_back({f.family, fd(r.epsilon), fd(r.root), fd(r.info), fd(r.residual), fd(nan)});
  } else if (f.family == "huber") {
    const double eps = need_eps();
    const FisherSolveResult r = solve_huber_k(eps);
    const double k = r.root;
    const FisherNumericResult q = fisher_numeric(
        [&](double x) { return huber_least_favorable_density(x, eps, k); },
        [&](double x) { return huber_least_favorable_derivative(x, eps, k); }, -kInf, kInf);
    t.rows.push_back({f.family, fd(r.epsilon), fd(k), fd(r.info), fd(r.residual), fd(q.info)});
  } else if (f.family == "gaussian") {
    if (!(f.variance > 0.0)) throw DomainError("fisher: variance must be > 0");
    const double s = std::sqrt(f.variance);
    const FisherNumericResult q = fisher_numeric(
        [&](double x) { return normal_pdf(x / s) / s; },
        [&](double x) { return -x / (s * s) * normal_pdf(x / s) / s; }, -kInf, kInf);
    t.rows.push_back({f.family, fd(nan), fd(nan), fd(1.0 / f.variance), fd(0.0), fd(q.info)});
  } else if (f.family == "bounded") {
    if (!(f.a < f.b)) throw DomainError("fisher: need a < b");
    const double w = f.b - f.a;
    // cos² density on [a, b]; the quadrature gives its actual information 4π²/w².
    const FisherNumericResult q = fisher_numeric(
        [&](double x) {
          const double c = std::cos(kPi * (x - 0.5 * (f.a + f.b)) / w);
          return 2.0 / w * c * c;
        },
        [&](double x) {
          const double u = kPi * (x - 0.5 * (f.a + f.b)) / w;
          return -2.0 * kPi / (w * w) * std::sin(2.0 * u);
        },
        f.a, f.b);
    t.rows.push_back({f.family, fd(nan), fd(nan), fd(kPi * kPi / (w * w)), fd(0.0), fd(q.info)});
  } else {
    if (!(f.variance > 0.0)) throw DomainError("fisher: variance must be > 0");
    t.rows.push_back(
        {f.family, fd(nan), fd(nan), fd(semi_bounded_constant() / f.variance), fd(0.0), fd(nan)});
  }
  return t;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs : Common {
  std::string config;
  unsigned workers = 0;
  std::vector<double> quantiles;
};

// Writes to config.output when set, else to `out`.
void run_simulate(const SimulateArgs& s, std::ostream& out) {
  const ExperimentConfig cfg = parse_config(read_file(s.config));
  validate(cfg);
  std::string body;
  if (!s.quantiles.empty()) {
    for (double q : s.quantiles) {
      if (!(q > 0.0 && q < 1.0)) throw ConfigError("simulate: quantiles must lie in (0,1)", 0, 0);
    }
    const auto rows = quantile_curve(cfg, s.quantiles, s.workers);
    if (s.output == "csv") {
      body = to_csv(rows);
    } else {
      Table t;
      t.columns = {"estimator", "delta", "q", "quantile"};
      for (const auto& r : rows) {
        t.rows.push_back({r.estimator, r.delta ? fd(*r.delta) : "-", fd(r.q), fd(r.quantile)});
      }
      body = render(t, "text");
    }
  } else {
    const auto rows = run_experiment(cfg, s.workers);
    body = s.output == "csv" ? to_csv(rows) : to_text(rows);
  }
  if (!cfg.output.empty()) {
    write_file(cfg.output, body);
    return;
  }
  out << body;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs : Common {
  std::string check = "all";
  double y = 0.5;
  std::size_t n = 3;
  double beta = 0.5;
  double delta = 0.1;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
};

enum class Rel { ge, le, eq };

// slack is the margin in the direction of the relation (for eq: -|lhs - rhs|).
void add_row(Table& t, const std::string& check, const std::string& instance, double lhs, Rel rel,
             double rhs, bool holds) {
  const double slack = rel == Rel::ge ? lhs - rhs : rel == Rel::le ? rhs - lhs : 0.0 - std::abs(lhs - rhs);
  const char* r = rel == Rel::ge ? ">=" : rel == Rel::le ? "<=" : "==";
  t.rows.push_back({check, instance, fd(lhs), r, fd(rhs), fd(slack), fb(holds)});
}

Table run_verify(const VerifyArgs& v, bool& all_hold) {
  Table t;
  t.columns = {"check", "instance", "lhs", "relation", "rhs", "slack", "holds"};
  const bool all = v.check == "all";
  const std::string ys = "y=" + fd(v.y);
  if (all || v.check == "data_processing") {
    const NishiyamaTriple tr = nishiyama_triple(v.y);
    const auto r1 = verify_data_processing(tr.f, tr.g, [](double x) { return x < 0.0; });
    add_row(t, "data_processing_kl", "nishiyama F,G " + ys, r1.kl, Rel::ge, r1.kl_rhs, r1.holds);
    add_row(t, "data_processing_renyi", "nishiyama F,G " + ys, r1.min_renyi_slack, Rel::ge, 0.0,
            r1.holds);
    const auto r2 = verify_data_processing(DiscreteDist::bernoulli(0.05),
                                           DiscreteDist::bernoulli(0.95),
                                           [](double x) { return x > 0.5; });
    add_row(t, "data_processing_kl", "bernoulli 0.05,0.95", r2.kl, Rel::ge, r2.kl_rhs, r2.holds);
    add_row(t, "data_processing_renyi", "bernoulli 0.05,0.95", r2.min_renyi_slack, Rel::ge, 0.0,
            r2.holds);
  }
  if (all || v.check == "change_of_measure") {
    const NishiyamaTriple tr = nishiyama_triple(v.y);
    const SampleEvent mean_nonneg = [](std::span<const double> xs) {
      double s = 0.0;
      for (double x : xs) s += x;
      return s >= 0.0;
    };
    const auto r1 = verify_change_of_measure(tr.p, tr.f, tr.g, v.n, mean_nonneg, v.beta);
    const std::string inst = "nishiyama " + ys + " n=" + std::to_string(v.n);
    add_row(t, "change_of_measure", inst, r1.lhs, Rel::ge, r1.rhs, r1.holds);
    add_row(t, "kl_chain_rule", inst, r1.kl_product_pf, Rel::eq,
            static_cast<double>(v.n) * r1.kl_pf,
            std::abs(r1.kl_product_pf - static_cast<double>(v.n) * r1.kl_pf) <=
                1e-9 * (1.0 + r1.kl_product_pf));
    const AlphaTriple at = alpha_triple(0.1, 1.0);
    const auto r2 = verify_change_of_measure(at.p, at.f, at.g, v.n, mean_nonneg, v.beta);
    add_row(t, "change_of_measure", "alpha_triple p=0.1 n=" + std::to_string(v.n), r2.lhs,
            Rel::ge, r2.rhs, r2.holds);
  }
  if (all || v.check == "chernoff") {
    for (double a : {0.01, 0.1, 0.3}) {
      const DiscreteDist f = DiscreteDist::bernoulli(a);
      const DiscreteDist g = DiscreteDist::bernoulli(1.0 - a);
      const double half = renyi_discrete(0.5, f, g).value;
      const double closed = std::log(1.0 / (4.0 * a)) + std::log(1.0 / (1.0 - a));
      add_row(t, "bernoulli_renyi_half", "a=" + fd(a), half, Rel::eq, closed,
              std::abs(half - closed) <= 1e-12 * (1.0 + closed));
      const ChernoffResult c = chernoff_discrete(f, g);
      add_row(t, "renyi_half_vs_chernoff", "a=" + fd(a), 2.0 * c.divergence.value, Rel::eq, half,
              std::abs(2.0 * c.divergence.value - half) <= 1e-8 + 2.0 * c.divergence.residual);
    }
  }
  if (all || v.check == "concentration") {
    const ConcentrationReport r = verify_kinf_concentration(
        Gaussian(0.0, 1.0), 20, v.delta, v.trials, Seed{v.seed});
    const double rhs = v.delta + 3.0 * r.se;
    add_row(t, "kinf_concentration", "gaussian(0,1) n=20 delta=" + fd(v.delta), r.rate, Rel::le,
            rhs, r.rate <= rhs);
  }
  all_hold = std::all_of(t.rows.begin(), t.rows.end(),
                         [](const auto& row) { return row.back() == "true"; });
  return t;
}

}  // namespace

std::vector<double> parse_sample_text(const std::string& text) {
  std::vector<double> xs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool seen_data = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    ++line_no;
    std::string line = text.substr(pos, eol - pos);
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::vector<std::pair<std::size_t, std::string>> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == ',')) ++i;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != ',') ++i;
      if (i > start) tokens.emplace_back(start + 1, line.substr(start, i - start));
    }
    std::vector<double> vals;
    bool header = false;
    for (const auto& [col, tok] : tokens) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        if (!seen_data && xs.empty() && vals.empty()) {
          header = true;
          break;
        }
        throw ConfigError("sample: malformed number '" + tok + "'", line_no, col);
      }
      vals.push_back(v);
    }
    if (!header && !vals.empty()) {
      seen_data = true;
      xs.insert(xs.end(), vals.begin(), vals.end());
    } else if (header) {
      seen_data = true;  // only one header line is allowed
    }
    pos = eol + 1;
  }
  return xs;
}

std::vector<double> read_sample_file(const std::string& path) {
  return parse_sample_text(read_file(path));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-estimation lower bounds, min-KL estimator and verifiers", "meanlb"};
  app.require_subcommand(1);

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Lower bound for a distribution class");
  bound->add_option("--class", ba.cls, "Bound class")->required();
  bound->add_option("--n", ba.n, "Sample size")->check(CLI::PositiveNumber);
  bound->add_option("--delta", ba.delta, "Failure probability");
  bound->add_option("--alpha", ba.q.alpha, "moment_alpha exponent");
  bound->add_option("--L", ba.q.L, "log_lipschitz constant");
  bound->add_option("--I", ba.q.I, "fisher information");
  bound->add_option("--a", ba.q.a, "bounded_support left end");
  bound->add_option("--b", ba.q.b, "bounded_support right end");
  bound->add_option("--variance", ba.q.variance, "semi_bounded variance");
  bound->add_option("--sweep", ba.sweep, "delta=LO:HI:logsteps=K");
  add_output(bound, ba);

  DivArgs da;
  auto* div = app.add_subcommand("div", "Divergence between two distributions");
  div->add_option("--kind", da.kind)->required()->check(
      CLI::IsMember({"kl", "renyi", "hellinger", "chernoff"}));
  div->add_option("--p", da.p, "Distribution literal")->required();
  div->add_option("--q", da.q, "Distribution literal")->required();
  div->add_option("--alpha", da.alpha, "Renyi order");
  add_output(div, da);

  KinfArgs ka;
  auto* kinf = app.add_subcommand("kinf", "Moment-constrained KL projection of a sample");
  kinf->add_option("--sample", ka.sample, "Sample file")->required();
  kinf->add_option("--mean-at-most", ka.at_most);
  kinf->add_option("--mean-at-least", ka.at_least);
  kinf->add_option("--mean-equal", ka.equal);
  kinf->add_option("--second-moment", ka.B, "Second-moment bound B")->required();
  kinf->add_option("--centering", ka.centering)->check(CLI::IsMember({"about_m", "raw"}));
  kinf->add_option("--tol", ka.tol, "Dual tolerance");
  kinf->add_flag("--oracle", ka.oracle, "Also run the brute-force primal");
  add_output(kinf, ka);

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Point estimate of the mean");
  est->add_option("--spec", ea.spec, "Estimator spec");
  est->add_option("--n", ea.n, "Use the first n values");
  est->add_option("--delta", ea.delta, "Confidence level for the y schedule");
  est->add_option("--y", ea.y, "Explicit y for minkl");
  est->add_option("--sample", ea.sample, "Sample file")->required();
  add_output(est, ea);

  FisherArgs fa;
  auto* fisher = app.add_subcommand("fisher", "Minimal Fisher information");
  fisher->add_option("--family", fa.family)->check(
      CLI::IsMember({"interval_mass", "huber", "gaussian", "bounded", "semibounded"}));
  fisher->add_option("--eps", fa.eps);
  fisher->add_option("--variance", fa.variance);
  fisher->add_option("--a", fa.a);
  fisher->add_option("--b", fa.b);
  fisher->add_flag("--sweep", fa.sweep, "97-point epsilon sweep of both informations");
  add_output(fisher, fa);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo deviation experiment");
  sim->add_option("--config", sa.config, "Config file")->required();
  sim->add_option("--workers", sa.workers, "Worker threads (0: all cores)");
  sim->add_option("--quantiles", sa.quantiles, "Emit |error| quantiles instead")->delimiter(',');
  add_output(sim, sa);

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Run the inequality verifiers");
  ver->add_option("--check", va.check)->check(CLI::IsMember(
      {"all", "data_processing", "change_of_measure", "chernoff", "concentration"}));
  ver->add_option("--y", va.y);
  ver->add_option("--n", va.n)->check(CLI::PositiveNumber);
  ver->add_option("--beta", va.beta);
  ver->add_option("--delta", va.delta);
  ver->add_option("--trials", va.trials);
  ver->add_option("--seed", va.seed);
  add_output(ver, va);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*bound) {
      out << render(run_bound(ba), ba.output);
    } else if (*div) {
      out << render(run_div(da), da.output);
    } else if (*kinf) {
      out << render(run_kinf(ka), ka.output);
    } else if (*est) {
      out << render(run_estimate(ea), ea.output);
    } else if (*fisher) {
      out << render(run_fisher(fa), fa.output);
    } else if (*sim) {
      run_simulate(sa, out);
    } else if (*ver) {
      bool ok = true;
      out << render(run_verify(va, ok), va.output);
      if (!ok) {
        err << "meanlb: verification failed\n";
        return kExitNumeric;
      }
    }
  } catch (const IoError& e) {
    err << "meanlb: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "meanlb: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const LiteralError& e) {
    err << "meanlb: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "meanlb: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "meanlb: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace meanlb
