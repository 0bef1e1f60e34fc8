#include <pybind11/pybind11.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include <sstream>

#include "meanlb/bounds.hpp"
#include "meanlb/cli.hpp"
#include "meanlb/distributions.hpp"
#include "meanlb/divergences.hpp"
#include "meanlb/estimator.hpp"
#include "meanlb/fisher_min.hpp"
#include "meanlb/harness.hpp"
#include "meanlb/kinf.hpp"
#include "meanlb/numeric.hpp"

namespace py = pybind11;
using namespace meanlb;

namespace {

DiscreteDist make_discrete(const std::vector<double>& points, const std::vector<double>& weights) {
  if (points.size() != weights.size()) throw DomainError("points and weights differ in length");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < points.size(); ++i) atoms.push_back({points[i], weights[i]});
  return DiscreteDist(std::move(atoms));
}

py::dict divergence_dict(const DivergenceValue& v) {
  py::dict d;
  d["value"] = v.value;
  d["exact"] = v.exact;
  d["residual"] = v.residual;
  return d;
}

MomentConstraints make_constraints(double m, double B, const std::string& kind,
                                   const std::string& centering) {
  MomentConstraints c;
  c.m = m;
  c.B = B;
  if (kind == "at_most") c.mean_kind = MeanKind::at_most;
  else if (kind == "at_least") c.mean_kind = MeanKind::at_least;
  else if (kind == "equal") c.mean_kind = MeanKind::equal;
  else throw DomainError("kind must be at_most, at_least or equal");
  if (centering == "about_m") c.centering = Centering::about_m;
  else if (centering == "raw") c.centering = Centering::raw;
  else throw DomainError("centering must be about_m or raw");
  return c;
}

}  // namespace

PYBIND11_MODULE(meanlb, m) {
  m.doc() = "Mean-estimation lower bounds, the min-KL estimator and their verifiers";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<LiteralError>(m, "LiteralError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<DiscreteDist>(m, "DiscreteDist")
      .def(py::init(&make_discrete), py::arg("points"), py::arg("weights"))
      .def_static("bernoulli", &DiscreteDist::bernoulli, py::arg("a"))
      .def_property_readonly("points", [](const DiscreteDist& d) {
        return std::vector<double>(d.points().begin(), d.points().end());
      })
      .def_property_readonly("weights", [](const DiscreteDist& d) {
        return std::vector<double>(d.weights().begin(), d.weights().end());
      })
      .def("mean", &DiscreteDist::mean)
      .def("variance", &DiscreteDist::variance)
      .def("reflect", &DiscreteDist::reflect, py::arg("center") = 0.0)
      .def("__repr__", [](const DiscreteDist& d) { return to_literal(ScenarioDist(d)); });

  m.def("discrete", [](const std::string& literal) {
    const ScenarioDist d = parse_distribution(literal);
    if (const auto* p = std::get_if<DiscreteDist>(&d)) return *p;
    throw DomainError("not a discrete literal: " + literal);
  }, py::arg("literal"), "DiscreteDist from a discrete, nishiyama or alpha_triple literal");
  m.def("sample", [](const std::string& literal, std::size_t n, std::uint64_t seed,
                     std::uint64_t trial) {
    return sample(parse_distribution(literal), n, Seed{seed}, trial).values;
  }, py::arg("literal"), py::arg("n"), py::arg("seed") = 0, py::arg("trial") = 0);
  m.def("moments", [](const std::string& literal) {
    const Moments mo = moments(parse_distribution(literal));
    return py::make_tuple(mo.mean, mo.variance);
  }, py::arg("literal"));
  m.def("canonical_literal", [](const std::string& literal) {
    return to_literal(parse_distribution(literal));
  }, py::arg("literal"));

  // divergences
  m.def("kl", [](const DiscreteDist& p, const DiscreteDist& q) {
    return divergence_dict(kl_discrete(p, q));
  }, py::arg("p"), py::arg("q"));
  m.def("renyi", [](double a, const DiscreteDist& p, const DiscreteDist& q) {
    return divergence_dict(renyi_discrete(a, p, q));
  }, py::arg("alpha"), py::arg("p"), py::arg("q"));
  m.def("hellinger", &hellinger_discrete, py::arg("p"), py::arg("q"));
  m.def("chernoff", [](const DiscreteDist& f, const DiscreteDist& g, double tol) {
    const ChernoffResult c = chernoff_discrete(f, g, tol);
    py::dict d = divergence_dict(c.divergence);
    d["alpha"] = c.alpha;
    d["p_star"] = c.p_star;
    d["used_fallback"] = c.used_fallback;
    return d;
  }, py::arg("f"), py::arg("g"), py::arg("tol") = 1e-10);
  m.def("renyi_half_gaussian", &renyi_half_gaussian, py::arg("mu1"), py::arg("s1"),
        py::arg("mu2"), py::arg("s2"));
  m.def("kl_laplace_shift", &kl_laplace_shift, py::arg("delta"), py::arg("b"));

  // kinf
  m.def("kinf", [](const std::vector<double>& xs, double mean, double B, const std::string& kind,
                   const std::string& centering, double tol) {
    const DualCertificate c = kinf_dual(xs, make_constraints(mean, B, kind, centering), tol);
    py::dict d;
    d["value"] = c.value;
    d["lambda1"] = c.lambda1;
    d["lambda2"] = c.lambda2;
    d["residual"] = c.residual;
    d["iterations"] = c.iterations;
    return d;
  }, py::arg("sample"), py::arg("mean"), py::arg("second_moment"), py::arg("kind") = "at_most",
     py::arg("centering") = "about_m", py::arg("tol") = 1e-9);
  m.def("kinf_primal", [](const std::vector<double>& xs, double mean, double B,
                          const std::string& kind, const std::string& centering) {
    return kinf_primal_refined(xs, make_constraints(mean, B, kind, centering)).value;
  }, py::arg("sample"), py::arg("mean"), py::arg("second_moment"), py::arg("kind") = "at_most",
     py::arg("centering") = "about_m");
  m.def("concentration_threshold", &concentration_threshold, py::arg("n"), py::arg("delta"));

  // estimator
  m.def("y_schedule", &y_schedule, py::arg("n"), py::arg("delta"));
  m.def("dhat_left", [](const std::vector<double>& xs, double c, double y) {
    return dhat_left(xs, c, y);
  }, py::arg("sample"), py::arg("c"), py::arg("y"));
  m.def("dhat_right", [](const std::vector<double>& xs, double c, double y) {
    return dhat_right(xs, c, y);
  }, py::arg("sample"), py::arg("c"), py::arg("y"));
  m.def("minkl_estimate", [](const std::vector<double>& xs, double y) {
    const MinKLResult r = minkl_estimate(xs, y);
    py::dict d;
    d["estimate"] = r.estimate;
    d["y"] = r.y;
    d["lo"] = r.lo;
    d["hi"] = r.hi;
    d["bisections"] = r.bisections;
    d["widened"] = r.widened;
    return d;
  }, py::arg("sample"), py::arg("y"));
  m.def("estimate", [](const std::string& spec, const std::vector<double>& xs, double y) {
    return estimate(parse_estimator(spec), xs, y);
  }, py::arg("spec"), py::arg("sample"), py::arg("y") = 0.0);

  // bounds
  m.def("bound", [](const std::string& cls, std::size_t n, double delta, double alpha, double L,
                    double I, double a, double b, double variance) {
    BoundQuery q;
    q.cls = parse_bound_class(cls);
    q.n = n;
    q.delta = delta;
    q.alpha = alpha;
    q.L = L;
    q.I = I;
    q.a = a;
    q.b = b;
    q.variance = variance;
    const BoundResult r = compute_bound(q);
    py::dict d;
    d["value"] = r.value;
    d["kind"] = to_string(r.kind);
    d["residual"] = r.residual;
    d["feasible"] = r.feasible;
    d["clamped"] = r.clamped;
    return d;
  }, py::arg("cls"), py::arg("n"), py::arg("delta"), py::arg("alpha") = 0.5, py::arg("L") = 1.0,
     py::arg("I") = 1.0, py::arg("a") = 0.0, py::arg("b") = 1.0, py::arg("variance") = 1.0);
  m.def("laplace_root", &laplace_root);

  // fisher_min
  m.def("solve_omega", [](double eps) {
    const FisherSolveResult r = solve_omega(eps);
    return py::make_tuple(r.root, r.info);
  }, py::arg("eps"));
  m.def("solve_huber_k", [](double eps) {
    const FisherSolveResult r = solve_huber_k(eps);
    return py::make_tuple(r.root, r.info);
  }, py::arg("eps"));
  m.def("huber_least_favorable_info", &huber_least_favorable_info, py::arg("eps"));
  m.def("fisher_numeric", [](const std::function<double(double)>& f,
                             const std::function<double(double)>& df, double lo, double hi) {
    return fisher_numeric(f, df, lo, hi).info;
  }, py::arg("f"), py::arg("df"), py::arg("lo"), py::arg("hi"));

  // harness
  m.def("run_experiment", [](const std::string& config_text, unsigned workers) {
    const ExperimentConfig cfg = parse_config(config_text);
    validate(cfg);
    std::string csv;
    {
      py::gil_scoped_release release;
      csv = to_csv(run_experiment(cfg, workers));
    }
    return csv;
  }, py::arg("config_text"), py::arg("workers") = 0, "CSV table of the experiment");
  m.def("canonical_config", [](const std::string& text) { return to_text(parse_config(text)); },
        py::arg("config_text"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<std::string> argv{"meanlb"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = run_cli(argv, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command-line tool; returns (exit_code, stdout, stderr)");
}
