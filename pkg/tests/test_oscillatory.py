"""Endpoint + stationary steepest-descent quadrature for int f e^{i omega x^r}."""

import math

import numpy as np
import pytest
from mpmath import mp

from oscgauss import oscillatory as osc
from oscgauss.errors import AnalyticityBudgetError, NoiseFloorError
from oscgauss.precision import PrecisionContext


def test_amplitude_registry():
    assert set(osc.AMPLITUDE_NAMES) == {"constant", "monomial", "polynomial",
                                        "exp", "cos"}
    assert complex(osc.amplitude("constant")(3.0)) == 1.0
    assert abs(complex(osc.amplitude("monomial", k=3)(2.0)) - 8.0) <= 1e-14
    p = osc.amplitude("polynomial", coeffs=[1, 0, 2])
    assert abs(complex(p(2.0)) - 9.0) <= 1e-14
    e = osc.amplitude("exp", scale=2.0)
    assert abs(complex(e(1.0)) - math.e ** 2) <= 1e-13
    c = osc.amplitude("cos", scale=3.0)
    assert abs(complex(c(1.0)) - math.cos(3.0)) <= 1e-14
    with pytest.raises(ValueError):
        osc.amplitude("sinc")


def test_spec_validation():
    amp = osc.amplitude("constant")
    with pytest.raises(ValueError):
        osc.OscillatoryIntegralSpec(a=0.5, b=1.0, omega=10.0, r=3, amplitude=amp)
    with pytest.raises(ValueError):
        osc.OscillatoryIntegralSpec(a=-1.0, b=1.0, omega=-3.0, r=3, amplitude=amp)
    with pytest.raises(ValueError):
        osc.OscillatoryIntegralSpec(a=-1.0, b=1.0, omega=10.0, r=1, amplitude=amp)


def test_laguerre_rule_closed_forms():
    r1 = osc.laguerre_rule(1)
    assert abs(complex(r1.nodes[0]) - 1.0) <= 1e-14
    assert abs(complex(r1.weights[0]) - 1.0) <= 1e-14
    r2 = osc.laguerre_rule(2)
    nodes = sorted((complex(z).real for z in r2.nodes))
    assert abs(nodes[0] - (2 - math.sqrt(2))) <= 1e-12
    assert abs(nodes[1] - (2 + math.sqrt(2))) <= 1e-12
    pair = sorted(((complex(z).real, complex(w).real)
                   for z, w in zip(r2.nodes, r2.weights)))
    assert abs(pair[0][1] - (2 + math.sqrt(2)) / 4) <= 1e-12
    assert abs(pair[1][1] - (2 - math.sqrt(2)) / 4) <= 1e-12


def test_laguerre_recurrence_closed_forms(ctx30):
    ms = osc.laguerre_moment_sequence(10, ctx30)
    from oscgauss import opq
    rec = opq.build_recurrence(ms, 5)
    for k in range(5):
        assert abs(complex(rec.alpha[k]) - (2 * k + 1)) <= 1e-24
    # beta[j] couples pi_{j+1}: the classical beta_{j+1} = (j+1)^2
    for j in range(4):
        assert abs(complex(rec.beta[j]) - (j + 1) ** 2) <= 1e-24


def test_laguerre_endpoint_monotone_error():
    # int_0^infty e^{-t}/(1+t) dt = e E_1(1)
    with mp.workdps(40):
        target = mp.e * mp.e1(1)
        errs = []
        for n in (2, 4, 8):
            rule = osc.laguerre_rule(n)
            approx = mp.fsum(w / (1 + z) for z, w in
                             zip(rule.nodes, rule.weights))
            errs.append(float(abs(approx - target)))
    assert errs[0] > errs[1] > errs[2]


def test_stationary_rule_n1_closed_form():
    rule = osc.stationary_rule(1, 3, 1.0)
    node = complex(rule.nodes[0])
    weight = complex(rule.weights[0])
    assert abs(node - 0.505468088156089j) <= 1e-12
    assert abs(weight - 1.546685884155980) <= 1e-12


def test_stationary_rule_omega_scaling():
    r1 = osc.stationary_rule(3, 3, 1.0)
    r8 = osc.stationary_rule(3, 3, 8.0)
    for a, b in zip(r1.nodes, r8.nodes):
        assert abs(complex(a) / 2 - complex(b)) <= 1e-13


def test_stationary_rule_exactness_z2():
    # M_2 = 0 for r = 3, so the two-point rule must annihilate z^2
    rule = osc.stationary_rule(2, 3, 1.0)
    acc = sum(complex(w) * complex(z) ** 2
              for z, w in zip(rule.nodes, rule.weights))
    assert abs(acc) <= 1e-14


def test_stationary_rule_r2_node_symmetry():
    rule = osc.stationary_rule(4, 2, 5.0)
    zs = np.array([complex(z) for z in rule.nodes])
    for z in zs:
        assert np.min(np.abs(zs + z)) <= 1e-12


def test_odd_amplitude_gives_imaginary_integral():
    spec = osc.OscillatoryIntegralSpec(a=-1.0, b=1.0, omega=30.0, r=3,
                                       amplitude=osc.amplitude("monomial", k=1))
    val = osc.evaluate(spec, 6, 6)
    assert abs(val.re) <= 1e-12
    assert abs(val.im) > 1e-3


def test_evaluate_matches_oracle_moderate_omega():
    spec = osc.OscillatoryIntegralSpec(a=-1.0, b=1.0, omega=50.0, r=3,
                                       amplitude=osc.amplitude("constant"))
    ctx = PrecisionContext(30)
    rep = osc.evaluate_report(spec, 4, 4, ctx)
    oracle, est = osc.interval_oracle(spec, ctx)
    with ctx.working():
        rel = float(abs(rep["value"] - oracle) / abs(oracle))
    assert rel <= 1e-6
    assert float(est) <= 1e-10


def test_evaluate_report_decomposition(ctx30):
    spec = osc.OscillatoryIntegralSpec(a=-1.0, b=2.0, omega=40.0, r=3,
                                       amplitude=osc.amplitude("exp"))
    rep = osc.evaluate_report(spec, 6, 6, ctx30)
    with ctx30.working():
        recomposed = rep["endpoint_a"] + rep["stationary"] + rep["endpoint_b"]
        assert abs(recomposed - rep["value"]) <= 1e-28
    # refining the rules barely moves the answer: path independence
    rep2 = osc.evaluate_report(spec, 9, 9, ctx30)
    with ctx30.working():
        move = float(abs(rep["value"] - rep2["value"]) / abs(rep2["value"]))
    assert move <= 1e-8


def test_analyticity_budget_enforced():
    amp = osc.Amplitude(lambda z: 1 / (1 + z * z), radius=0.05, name="tight")
    spec = osc.OscillatoryIntegralSpec(a=-1.0, b=1.0, omega=5.0, r=3,
                                       amplitude=amp)
    with pytest.raises(AnalyticityBudgetError):
        osc.evaluate(spec, 4, 4)


def test_convergence_slope_exp_case():
    rep = osc.convergence_report(osc.amplitude("exp"), 2, 3,
                                 list(np.geomspace(10, 1000, 9)))
    assert abs(rep["slope"] - (-5.0 / 3.0)) <= 0.15 * 5.0 / 3.0
    assert rep["expected_slope"] == pytest.approx(-5.0 / 3.0)


def test_convergence_noise_floor_reported():
    with pytest.raises(NoiseFloorError):
        osc.convergence_report(osc.amplitude("constant"), 2, 3,
                               list(np.geomspace(10, 1000, 9)))


def test_convergence_requires_omega_span():
    with pytest.raises(ValueError):
        osc.convergence_report(osc.amplitude("exp"), 2, 3, [10.0, 20.0, 30.0])
