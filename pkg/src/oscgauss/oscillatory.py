"""Steepest-descent evaluation of int_a^b f(x) e^{i omega x^r} dx.

The integral is deformed onto three pieces: descent paths leaving the two
endpoints (handled by Gauss-Laguerre after the substitution that turns the
oscillator into e^{-t}), and the two-ray contour through the stationary
point at the origin (handled by the complex Gaussian rule built from the
pi_n zeros, rescaled by omega^{-1/r}):

    I[f] = F_a + M_omega[f] - F_b.

Along an endpoint path z(t)^r = x^r + i t / omega, so dz/dt = i/(r omega
z^{r-1}) needs no branch choice once z is known.  The module also carries
the measurement harness for the O(omega^{-(2n+1)/r}) error order of the
stationary rule, with an independent two-ray oracle, and an adaptive
real-interval oracle for the full integral at 4x precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import opq
from .errors import (
    AnalyticityBudgetError,
    NoiseFloorError,
    NonconvergenceError,
)
from .precision import ComplexValue, PrecisionContext, ensure_finite

__all__ = [
    "Amplitude",
    "amplitude",
    "AMPLITUDE_NAMES",
    "OscillatoryIntegralSpec",
    "laguerre_moment_sequence",
    "laguerre_rule",
    "stationary_rule",
    "evaluate",
    "evaluate_report",
    "stationary_oracle",
    "interval_oracle",
    "convergence_order",
    "convergence_report",
]


# ---------------------------------------------------------------------------
# Amplitudes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Amplitude:
    """Complex -> complex amplitude with a declared analyticity radius.

    ``radius`` bounds the neighborhood of [a, b] (distance to the segment)
    in which the callback may be evaluated; math.inf marks entire functions.
    """

    fn: object
    radius: float = math.inf
    name: str = "custom"

    def __call__(self, z):
        return self.fn(z)


def _horner(coeffs, z):
    acc = mp.mpmathify(0)
    for c in reversed(list(coeffs)):
        acc = acc * z + mp.mpmathify(c)
    return acc


def amplitude(name: str, **params) -> Amplitude:
    """Named amplitude families usable from the CLI (all entire).

    constant(value=1) | monomial(k=1) | polynomial(coeffs=...) |
    exp(scale=1) | cos(scale=1)
    """
    if name == "constant":
        v = params.get("value", 1)
        return Amplitude(lambda z, v=v: mp.mpmathify(v), name="constant")
    if name == "monomial":
        k = int(params.get("k", 1))
        if k < 0:
            raise ValueError("monomial degree must be >= 0")
        return Amplitude(lambda z, k=k: mp.mpmathify(z) ** k, name=f"monomial:{k}")
    if name == "polynomial":
        coeffs = tuple(params.get("coeffs", (1,)))
        return Amplitude(lambda z, c=coeffs: _horner(c, mp.mpmathify(z)),
                         name="polynomial")
    if name == "exp":
        s = params.get("scale", 1)
        return Amplitude(lambda z, s=s: mp.exp(mp.mpmathify(s) * mp.mpmathify(z)),
                         name=f"exp:{s}")
    if name == "cos":
        s = params.get("scale", 1)
        return Amplitude(lambda z, s=s: mp.cos(mp.mpmathify(s) * mp.mpmathify(z)),
                         name=f"cos:{s}")
    raise ValueError(f"unknown amplitude family {name!r}")


AMPLITUDE_NAMES = ("constant", "monomial", "polynomial", "exp", "cos")


@dataclass(frozen=True)
class OscillatoryIntegralSpec:
    """I[f] = int_a^b f(x) e^{i omega x^r} dx with the stationary point at 0."""

    a: float
    b: float
    omega: float
    r: int
    amplitude: object
    radius: float = math.inf

    def __post_init__(self):
        if not (self.a < 0 < self.b):
            raise ValueError("need a < 0 < b so the stationary point is interior")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if int(self.r) != self.r or self.r < 2:
            raise ValueError("r must be an integer >= 2")
        if isinstance(self.amplitude, Amplitude) and self.radius == math.inf:
            object.__setattr__(self, "radius", self.amplitude.radius)


# ---------------------------------------------------------------------------
# Endpoint rule (Gauss-Laguerre) through the shared moment pipeline
# ---------------------------------------------------------------------------

def laguerre_moment_sequence(k_max: int, ctx: PrecisionContext) -> opq.MomentSequence:
    """Moments of e^{-t} on [0, inf): M_k = k!."""
    with ctx.working():
        vals = tuple(ctx.finalize(mp.factorial(k)) for k in range(k_max + 1))
    return opq.MomentSequence(values=vals, ctx=ctx, r=None, label="laguerre")


def laguerre_rule(n: int, ctx: PrecisionContext | None = None) -> opq.QuadratureRule:
    """n-point Gauss-Laguerre rule for int_0^infty p(t) e^{-t} dt.

    Built by the same moments -> recurrence -> roots -> Vandermonde-weights
    pipeline as the oscillatory rules (the recurrence comes out real:
    alpha_k = 2k+1, beta_k = k^2).  Nodes and weights are checked positive
    and sum(w) = 1 before delivery.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ctx = opq.precision_schedule(n) if ctx is None else ctx
    mom = laguerre_moment_sequence(2 * n, ctx)
    rec = opq.build_recurrence(mom, n)
    roots = opq.zeros(rec)
    weights = opq.gauss_weights(roots, mom)
    with ctx.working():
        tol = mp.mpf(10) ** (-ctx.decimal_digits // 2)
        nodes, ws = [], []
        for z, w in zip(roots, weights):
            if abs(mp.im(z)) > tol or mp.re(z) <= 0 or mp.re(mp.mpmathify(w)) <= 0:
                raise NonconvergenceError(
                    "Laguerre construction produced a non-real node or "
                    "non-positive node/weight")
            nodes.append(ctx.finalize(mp.re(z)))
            ws.append(ctx.finalize(mp.re(mp.mpmathify(w))))
        if abs(mp.fsum(ws) - 1) > tol:
            raise NonconvergenceError("Laguerre weights do not sum to 1")
    return opq.QuadratureRule(nodes=tuple(nodes), weights=tuple(ws), n=n,
                              regime="endpoint", r=None, scale=1)


# ---------------------------------------------------------------------------
# Stationary rule: pi_n zeros rescaled by omega^{-1/r}
# ---------------------------------------------------------------------------

def stationary_rule(n: int, r: int, omega,
                    ctx: PrecisionContext | None = None) -> opq.QuadratureRule:
    """Gaussian rule for h -> int_Gamma h(z) e^{i omega z^r} dz.

    The substitution z -> omega^{-1/r} z maps the functional onto the
    omega = 1 contour, so nodes and weights are both the pi_n data scaled
    by omega^{-1/r}; exactness deg <= 2n-1 transfers verbatim.
    """
    base = opq.build_rule(n, opq.WeightSpec(r=r), ctx)
    ctx = opq.precision_schedule(n) if ctx is None else ctx
    with ctx.working():
        s = mp.power(mp.mpf(omega), -mp.mpf(1) / r)
        nodes = tuple(ctx.finalize(z * s) for z in base.nodes)
        weights = tuple(ctx.finalize(mp.mpmathify(w) * s) for w in base.weights)
        lam = ctx.finalize(1 / s)
    return opq.QuadratureRule(nodes=nodes, weights=weights, n=n,
                              regime="stationary", r=r, scale=lam)


# ---------------------------------------------------------------------------
# Descent paths from the endpoints
# ---------------------------------------------------------------------------

def _descent_z(x, r: int, omega, t):
    """Point of the endpoint descent path: z(t)^r = x^r + i t/omega, z(0) = x."""
    if x > 0:
        return mp.power(mp.mpf(x) ** r + 1j * t / omega, mp.mpf(1) / r)
    sgn = 1 if r % 2 == 0 else -1
    return -mp.power(mp.mpf(-x) ** r + sgn * 1j * t / omega, mp.mpf(1) / r)


def _segment_distance(z, a: float, b: float) -> float:
    x, y = float(mp.re(z)), float(mp.im(z))
    if x < a:
        return math.hypot(x - a, y)
    if x > b:
        return math.hypot(x - b, y)
    return abs(y)


def _check_path_in_region(points, spec: OscillatoryIntegralSpec, label: str):
    if spec.radius == math.inf:
        return
    for t, z in points:
        d = _segment_distance(z, spec.a, spec.b)
        if d > spec.radius:
            raise AnalyticityBudgetError(
                f"{label} descent path leaves the declared analyticity "
                f"neighborhood (distance {d:.3g} > radius {spec.radius:.3g} "
                f"at t = {float(t):.3g}) before the weight truncates")


def _endpoint_contribution(spec: OscillatoryIntegralSpec, x: float,
                           rule: opq.QuadratureRule, ctx: PrecisionContext):
    """F_x = e^{i omega x^r} int_0^inf f(z(t)) z'(t) e^{-t} dt by Laguerre."""
    r, omega, f = spec.r, spec.omega, spec.amplitude
    t_max = ctx.decimal_digits * math.log(10)
    # analyticity audit along the continuous path, then the actual nodes
    audit = [mp.mpf(t) for t in np.geomspace(1e-3, t_max, 96)]
    _check_path_in_region(((t, _descent_z(x, r, omega, t)) for t in audit),
                          spec, f"endpoint {x:g}")
    acc = mp.mpc(0)
    for t, w in zip(rule.nodes, rule.weights):
        if t > t_max:
            continue  # weight below precision: truncated
        z = _descent_z(x, r, omega, t)
        _check_path_in_region([(t, z)], spec, f"endpoint {x:g}")
        dz = 1j / (r * omega * z ** (r - 1))
        acc += w * f(z) * dz
    return mp.exp(1j * mp.mpf(omega) * mp.mpf(x) ** r) * acc


def evaluate_report(spec: OscillatoryIntegralSpec, n_endpoint: int,
                    n_stationary: int, ctx: PrecisionContext | None = None) -> dict:
    """I[f] = F_a + M - F_b with the per-path contributions broken out."""
    ctx = PrecisionContext() if ctx is None else ctx
    lag = laguerre_rule(n_endpoint)
    stat = stationary_rule(n_stationary, spec.r, spec.omega)
    with ctx.working():
        fa = _endpoint_contribution(spec, spec.a, lag, ctx)
        fb = _endpoint_contribution(spec, spec.b, lag, ctx)
        _check_path_in_region([(mp.mpf(0), z) for z in stat.nodes],
                              spec, "stationary")
        m = mp.fsum((w * spec.amplitude(z) for z, w in
                     zip(stat.nodes, stat.weights)), absolute=False)
        total = fa + m - fb
        ensure_finite(total, "evaluate")
        return {
            "value": ctx.finalize(total),
            "endpoint_a": ctx.finalize(fa),
            "endpoint_b": ctx.finalize(-fb),
            "stationary": ctx.finalize(m),
            "n_endpoint": n_endpoint,
            "n_stationary": n_stationary,
        }


def evaluate(spec: OscillatoryIntegralSpec, n_endpoint: int, n_stationary: int,
             ctx: PrecisionContext | None = None) -> ComplexValue:
    ctx = PrecisionContext() if ctx is None else ctx
    return ComplexValue.from_number(
        evaluate_report(spec, n_endpoint, n_stationary, ctx)["value"], ctx)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def stationary_oracle(f, r: int, omega, ctx: PrecisionContext):
    """int_Gamma f(z) e^{i omega z^r} dz by adaptive quadrature on the rays.

    Independent of the Gaussian rule: integrates f(omega^{-1/r) rho e^{i
    theta}} e^{-rho^r} along both rays directly.
    """
    spec = opq.WeightSpec(r=r)
    with ctx.working():
        s = mp.power(mp.mpf(omega), -mp.mpf(1) / r)
        dir_hi, dir_lo = spec.ray_directions()
        pts = [0, 1, 2, mp.inf]
        hi = mp.quad(lambda rho: f(s * rho * dir_hi) * mp.exp(-rho ** r), pts)
        lo = mp.quad(lambda rho: f(s * rho * dir_lo) * mp.exp(-rho ** r), pts)
        return ctx.finalize(s * (dir_hi * hi - dir_lo * lo))


def _phase_breakpoints(spec: OscillatoryIntegralSpec) -> list:
    """Panel boundaries with at most ~one oscillation cycle per panel."""
    cuts = {mp.mpf(spec.a), mp.mpf(0), mp.mpf(spec.b)}
    k = 1
    while True:
        x = (2 * mp.pi * k / spec.omega) ** (mp.mpf(1) / spec.r)
        if x >= max(-spec.a, spec.b):
            break
        if x < spec.b:
            cuts.add(x)
        if -x > spec.a:
            cuts.add(-x)
        k += 1
        if k > 100000:
            raise ValueError("oracle panel count exploded; omega beyond desk scale")
    return sorted(cuts)


def interval_oracle(spec: OscillatoryIntegralSpec,
                    ctx: PrecisionContext | None = None):
    """(value, error_estimate) for I[f] on the real interval at 4x precision.

    Adaptive in two stages: panels no wider than one oscillation cycle,
    integrated by mpmath's quadrature, then the same with every panel halved;
    the difference is the reported error estimate.  Valid at desk scale
    (omega <= 1e4 or so) and fully independent of the descent machinery.
    """
    ctx = PrecisionContext() if ctx is None else ctx
    octx = PrecisionContext(4 * ctx.decimal_digits, ctx.guard_digits)
    f, omega, r = spec.amplitude, spec.omega, spec.r
    with octx.working():
        def g(x):
            return f(x) * mp.expj(mp.mpf(omega) * mp.mpf(x) ** r)
        cuts = _phase_breakpoints(spec)
        coarse = mp.quad(g, cuts)
        fine_cuts = []
        for u, v in zip(cuts[:-1], cuts[1:]):
            fine_cuts += [u, (u + v) / 2]
        fine_cuts.append(cuts[-1])
        fine = mp.quad(g, fine_cuts)
        return octx.finalize(fine), octx.finalize(abs(fine - coarse))


# ---------------------------------------------------------------------------
# Error-order measurement for the stationary rule
# ---------------------------------------------------------------------------

def convergence_report(f, n: int, r: int, omega_list,
                       ctx: PrecisionContext | None = None) -> dict:
    """Fit log|M_rule - M_oracle| against log omega for the stationary piece.

    Points at the oracle's precision floor are excluded (and reported); if
    fewer than three informative points remain the measurement aborts with
    NoiseFloorError.  Expected slope: -(2n+1)/r.
    """
    ctx = PrecisionContext() if ctx is None else ctx
    octx = PrecisionContext(2 * ctx.decimal_digits, ctx.guard_digits)
    omegas = [float(w) for w in omega_list]
    if len(omegas) < 3 or max(omegas) / min(omegas) < 10 ** 1.5:
        raise ValueError("omega_list must span at least 1.5 decades with >= 3 points")
    rule_digits = opq.precision_schedule(n).decimal_digits
    noise_digits = min(octx.decimal_digits, rule_digits) - 8
    errors, floors = [], []
    for w in omegas:
        rule = stationary_rule(n, r, w)
        exact = stationary_oracle(f, r, w, octx)
        with octx.working():
            approx = mp.fsum((wt * f(z) for z, wt in zip(rule.nodes, rule.weights)),
                             absolute=False)
            errors.append(float(abs(approx - exact)))
        floors.append(float(abs(exact)) * 10.0 ** (-noise_digits))
    keep = [i for i, (e, fl) in enumerate(zip(errors, floors)) if e > fl]
    if len(keep) < 3:
        raise NoiseFloorError(
            "stationary-rule errors sit at the oracle precision floor for "
            f"{len(omegas) - len(keep)} of {len(omegas)} frequencies; "
            "no slope can be fitted")
    lx = np.log10(np.array([omegas[i] for i in keep]))
    ly = np.log10(np.array([errors[i] for i in keep]))
    slope, intercept = np.polyfit(lx, ly, 1)
    return {
        "n": n,
        "r": r,
        "omegas": omegas,
        "errors": errors,
        "excluded": [i for i in range(len(omegas)) if i not in keep],
        "slope": float(slope),
        "intercept": float(intercept),
        "expected_slope": -(2 * n + 1) / r,
    }


def convergence_order(f, n: int, r: int, omega_list,
                      ctx: PrecisionContext | None = None) -> float:
    """Fitted slope of the stationary-rule error; see convergence_report."""
    return convergence_report(f, n, r, omega_list, ctx)["slope"]
