import math

import pytest

import meanlb as m


def test_nishiyama_renyi_half_is_log_1_plus_2y():
    for y in (1e-3, 0.5, 2.0):
        f = m.discrete(f"nishiyama({y},F)")
        g = m.discrete(f"nishiyama({y},G)")
        assert abs(m.renyi(0.5, f, g)["value"] - math.log1p(2 * y)) < 1e-10


def test_chernoff_is_half_renyi_for_reflected_pair():
    f = m.DiscreteDist([0.0, 1.0, 3.0], [0.2, 0.5, 0.3])
    g = f.reflect(0.0)
    c = m.chernoff(f, g)
    assert abs(2 * c["value"] - m.renyi(0.5, f, g)["value"]) < 1e-8


def test_kl_infinite_without_absolute_continuity():
    p = m.DiscreteDist.bernoulli(0.5)
    q = m.DiscreteDist([0.0], [1.0])
    assert math.isinf(m.kl(p, q)["value"])


def test_bounds_and_roots():
    r = m.bound("finite_variance_2", 100, 1e-6)
    assert r["kind"] == "y"
    assert abs(r["value"] - 0.0597648293151) < 1e-10
    assert abs(m.laplace_root() - 7.4641018049) < 1e-9
    omega, info = m.solve_omega(0.2)
    assert abs(info - 1.5717952500556569) < 1e-10
    k, info2 = m.solve_huber_k(0.2)
    assert abs(k - 0.8615921124158288) < 1e-10
    assert info2 < 1.0


def test_kinf_dual_matches_primal_oracle():
    xs = m.sample("gaussian(0,1)", 8, seed=3)
    d = m.kinf(xs, 0.0, 1.0, kind="equal")
    p = m.kinf_primal(xs, 0.0, 1.0, kind="equal")
    assert d["value"] <= p + 1e-9
    assert p - d["value"] < 1e-5


def test_minkl_estimate_inside_bracket():
    xs = m.sample("gaussian(1,1)", 20, seed=11)
    y = m.y_schedule(20, 0.05)
    r = m.minkl_estimate(xs, y)
    assert r["lo"] <= r["estimate"] <= r["hi"]
    assert abs(r["estimate"] - m.estimate("minkl", xs, y)) < 1e-12


def test_fisher_numeric_standard_normal():
    phi = lambda x: math.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    info = m.fisher_numeric(phi, lambda x: -x * phi(x), -12.0, 12.0)
    assert abs(info - 1.0) < 1e-6


def test_domain_errors_raise_value_error():
    with pytest.raises(ValueError):
        m.y_schedule(0, 0.1)
    with pytest.raises(ValueError):
        m.bound("gaussian", 10, 1.5)
    with pytest.raises(ValueError):
        m.discrete("gaussian(0,1)")


def test_experiment_is_deterministic():
    cfg = "\n".join([
        "distribution = gaussian(0,1)",
        "estimators = mean, mom(3)",
        "n = 30",
        "deltas = 0.1, 0.05",
        "trials = 100",
        "seed = 5",
    ])
    a = m.run_experiment(cfg, workers=1)
    b = m.run_experiment(cfg, workers=3)
    assert a == b
    assert a.startswith("# meanlb-csv v1\n")
    assert m.canonical_config(m.canonical_config(cfg)) == m.canonical_config(cfg)


def test_cli_exit_codes():
    code, out, _ = m.run_cli(["bound", "--class", "gaussian", "--n", "10", "--delta", "0.01",
                              "--output", "csv"])
    assert code == 0 and out.splitlines()[0] == "# meanlb-csv v1"
    assert m.run_cli(["bound", "--class", "nope", "--n", "10"])[0] == 2
    assert m.run_cli(["kinf", "--sample", "/nonexistent/x.csv", "--mean-at-most", "0",
                      "--second-moment", "1"])[0] == 4
