"""Strong asymptotics for the cubic-weight polynomials P_n.

Three closed-form approximations, each tied to a region of the plane:

* ``pn_outer``   -- away from the limiting curve: e^{n g(z)} times the
  (1,1) entry of a global parametrix built from the fourth root of the
  Moebius ratio (z - z2)/(z - z1).
* ``pn_band``    -- in a tube around the open arc: a two-term formula in
  the chord branch of the phase, analytic across the arc itself, so a
  single expression is valid on both sides (and on the arc).
* ``pn_airy``    -- in disks around the branch points: Airy functions of
  n^{2/3} f(z), where f is the conformal map straightening the phase
  ((3/2) phi)^{2/3}.  The disk at the left endpoint is handled through
  the reflection symmetry P_n(z) = (-1)^n conj(P_n(-conj z)).

All three can be checked against exact recurrence evaluation at scheduled
precision (``exact_pn``); the observed convergence rate is O(1/n).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
import scipy.special

from . import geometry, opq
from .errors import NonFiniteError, OutsideDiskError, RegionError
from .precision import PrecisionContext
from .scurve import (
    L_CONST,
    PhaseContext,
    SQRT2,
    Z1,
    Z2,
    _require_off_cut,
    g_eval,
    phi2_chord,
)

__all__ = [
    "GlobalParametrix",
    "AiryParametrix",
    "region_classify",
    "pn_outer",
    "pn_band",
    "pn_airy",
    "pn_asymptotic",
    "exact_pn",
    "zero_distribution_report",
    "airy_model_matrix",
    "airy_model_residual",
    "airy_connection_residual",
]

# Derivative of the phase polynomial -z^3 + i z ... wait; this is
# Q'(z2) = -z2^3 + i for Q(z) = -z^4/4 + i z - 3/4, the quartic whose
# square is the quadratic differential.  Its cube root fixes the scale
# and rotation of the conformal map at the right branch point.
QP2 = SQRT2 - 4j
FC = QP2 ** (1.0 / 3.0)          # principal root; arg = -atan(2 sqrt 2)/3

_OMEGA = np.exp(2j * np.pi / 3)


def _q4(w):
    """Principal fourth root."""
    return np.sqrt(np.sqrt(w))


def _cbrt(w):
    """Principal cube root of a complex number (array-safe)."""
    return np.exp(np.log(w) / 3.0)


def _ensure_finite_c(val, what: str) -> complex:
    val = complex(val)
    if not (np.isfinite(val.real) and np.isfinite(val.imag)):
        raise NonFiniteError(f"{what} produced a non-finite value")
    return val


# ---------------------------------------------------------------------------
# Global parametrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GlobalParametrix:
    """beta(z) = ((z - z2)/(z - z1))^{1/4} with its cut moved onto the arc.

    The principal fourth root of the Moebius ratio is discontinuous across
    the chord between the branch points; multiplying by i inside the lens
    (between arc and chord) cancels that jump and leaves a branch cut
    exactly on the arc, with boundary values beta_+ = i beta_-.  beta -> 1
    at infinity.
    """

    phase: PhaseContext
    _pts: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_pts", self.phase.gamma.points_complex())

    def in_lens(self, z: complex) -> bool:
        z = complex(z)
        return (abs(z.real) < SQRT2 and z.imag < 1.0
                and geometry.side_of_polyline(z, self._pts) == 1)

    def beta_eval(self, z: complex, guard: bool = True) -> complex:
        z = complex(z)
        if guard:
            _require_off_cut(z, self.phase.gamma)
        b = complex(_q4((z - Z2) / (z - Z1)))
        if self.in_lens(z):
            b *= 1j
        return _ensure_finite_c(b, "beta_eval")

    def n_matrix(self, z: complex) -> np.ndarray:
        """2x2 parametrix [[n11, n12], [-n12, n11]]; det = n11^2 + n12^2 = 1."""
        b = self.beta_eval(z)
        n11 = (b + 1 / b) / 2
        n12 = (b - 1 / b) / 2j
        return np.array([[n11, n12], [-n12, n11]], dtype=complex)


# ---------------------------------------------------------------------------
# Local (Airy) parametrix at the right branch point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AiryParametrix:
    """Conformal map f with ((3/2) phi2)^2 = f^3 near the right endpoint.

    The square of the chord-branch phase is single valued and analytic on
    the whole disk (squaring removes the half-integer monodromy), so
    f = (z - z2) Q'(z2)^{1/3} ((3/2 phi2)^2 / ((z - z2)^3 Q'(z2)))^{1/3}
    needs only a principal cube root of a ratio that stays close to 1.
    f maps the arc onto the negative reals and its forward extension onto
    the positive reals; f'(z2) = Q'(z2)^{1/3}, |f'(z2)| = 18^{1/6}.
    """

    phase: PhaseContext
    delta: float = 0.5

    def conformal_f(self, z: complex) -> complex:
        z = complex(z)
        dz = z - Z2
        if abs(dz) > self.delta * (1 + 1e-12):
            raise OutsideDiskError(
                f"|z - z2| = {abs(dz):.4f} exceeds the disk radius {self.delta}")
        if abs(dz) <= 1e-9:
            return dz * FC
        psi = 1.5 * complex(phi2_chord(z))
        chi = psi * psi / (dz ** 3 * QP2)
        return _ensure_finite_c(dz * FC * _cbrt(chi), "conformal_f")

    def f_quarter_root(self, z: complex) -> tuple[complex, complex]:
        """(f, f^{1/4}) with the principal fourth root.

        f is real negative exactly on the arc, so the principal root's cut
        falls on the arc with f^{1/4}_+ = i f^{1/4}_-, matching the jump
        orientation of the global parametrix; the combinations
        f^{1/4}/beta and beta/f^{1/4} are continuous across the arc.
        """
        f = self.conformal_f(z)
        return f, complex(_q4(f))

    def boundary_winding(self, radius: float | None = None, samples: int = 720) -> float:
        """Winding number of f around 0 along a circle (1.0 iff injective-consistent)."""
        rad = 0.9 * self.delta if radius is None else radius
        th = np.linspace(-np.pi, np.pi, samples, endpoint=False)
        fv = np.array([self.conformal_f(complex(Z2 + rad * np.exp(1j * t))) for t in th])
        return float(np.sum(np.diff(np.unwrap(np.angle(np.r_[fv, fv[:1]])))) / (2 * np.pi))


# ---------------------------------------------------------------------------
# Region classification and the three formulas
# ---------------------------------------------------------------------------

def region_classify(z: complex, phase: PhaseContext,
                    delta: float = 0.5, tube_width: float = 0.25) -> str:
    """'disk2' | 'disk1' | 'band' | 'outer' (disks take precedence)."""
    z = complex(z)
    if abs(z - Z2) <= delta:
        return "disk2"
    if abs(z - Z1) <= delta:
        return "disk1"
    dist = geometry.nearest_on_polyline(z, phase.gamma.points_complex())[0]
    return "band" if dist <= tube_width else "outer"


def _v_half_minus_l(z: complex, n: int) -> complex:
    v = -1j * z ** 3 / 3
    return n * (v / 2 - L_CONST)


def pn_outer(n: int, z: complex, phase: PhaseContext,
             gp: GlobalParametrix | None = None) -> complex:
    """Leading outer asymptotics e^{n g(z)} (beta + 1/beta)/2."""
    z = complex(z)
    gp = GlobalParametrix(phase) if gp is None else gp
    b = gp.beta_eval(z)
    gv = g_eval(z, phase)
    return _ensure_finite_c(np.exp(n * gv) * (b + 1 / b) / 2, "pn_outer")


def pn_band(n: int, z: complex, phase: PhaseContext,
            tube_width: float = 0.25, strict: bool = True) -> complex:
    """Two-term band formula, one analytic expression on both sides of the arc.

    With H = -phi2_chord (the continuation from above) and
    bt = i ((z - z2)/(z - z1))^{1/4} (the continuation of beta from above),
        P_n ~ e^{n(V/2 - l)} [ e^{-nH} (bt + 1/bt)/2 + e^{nH} (bt - 1/bt)/(2i) ].
    Both ingredients are analytic across the arc inside the tube (the chord
    branch has its cut elsewhere), so the formula needs no side bookkeeping
    and can be evaluated on the arc itself.
    """
    z = complex(z)
    if strict:
        dist = geometry.nearest_on_polyline(z, phase.gamma.points_complex())[0]
        if dist > tube_width:
            raise RegionError(
                f"band formula requested {dist:.3f} from the arc (tube width {tube_width})")
    bt = 1j * complex(_q4((z - Z2) / (z - Z1)))
    n11 = (bt + 1 / bt) / 2
    n12 = (bt - 1 / bt) / 2j
    h = -complex(phi2_chord(z))
    val = np.exp(_v_half_minus_l(z, n)) * (np.exp(-n * h) * n11 + np.exp(n * h) * n12)
    return _ensure_finite_c(val, "pn_band")


def pn_airy(n: int, z: complex, phase: PhaseContext,
            delta: float = 0.5,
            gp: GlobalParametrix | None = None,
            ap: AiryParametrix | None = None) -> complex:
    """Airy-type formula in the endpoint disks.

    In the right disk,
        P_n ~ sqrt(pi) e^{n(V/2 - l)} [ n^{1/6} f^{1/4} beta^{-1} Ai(n^{2/3} f)
                                       - n^{-1/6} f^{-1/4} beta Ai'(n^{2/3} f) ],
    continuous across the arc because f^{1/4} and beta jump by the same
    factor i.  The left disk is evaluated by reflection.
    """
    z = complex(z)
    if abs(z - Z2) <= delta:
        pass
    elif abs(z - Z1) <= delta:
        mirrored = pn_airy(n, -np.conj(z), phase, delta=delta, gp=gp, ap=ap)
        return (-1) ** n * np.conj(mirrored)
    else:
        raise OutsideDiskError(
            f"z = {z:.4f} lies in neither endpoint disk of radius {delta}")
    gp = GlobalParametrix(phase) if gp is None else gp
    ap = AiryParametrix(phase, delta=delta) if ap is None else ap
    f, f14 = ap.f_quarter_root(z)
    b = gp.beta_eval(z, guard=False)
    ai, aip, _, _ = scipy.special.airy(n ** (2.0 / 3.0) * f)
    val = (np.sqrt(np.pi) * np.exp(_v_half_minus_l(z, n))
           * (n ** (1.0 / 6.0) * f14 / b * ai
              - n ** (-1.0 / 6.0) * b / f14 * aip))
    return _ensure_finite_c(val, "pn_airy")


def pn_asymptotic(n: int, z: complex, phase: PhaseContext,
                  delta: float = 0.5, tube_width: float = 0.25) -> tuple[str, complex]:
    """Classify z and evaluate the matching formula; returns (region, value)."""
    region = region_classify(z, phase, delta=delta, tube_width=tube_width)
    if region in ("disk1", "disk2"):
        return region, pn_airy(n, z, phase, delta=delta)
    if region == "band":
        return region, pn_band(n, z, phase, tube_width=tube_width)
    return region, pn_outer(n, z, phase)


# ---------------------------------------------------------------------------
# Exact reference values
# ---------------------------------------------------------------------------

_REC_CACHE: dict[tuple[int, int], opq.RecurrenceCoefficients] = {}


def _recurrence_for(n: int, ctx: PrecisionContext | None = None) -> opq.RecurrenceCoefficients:
    ctx = opq.precision_schedule(n) if ctx is None else ctx
    key = (n, ctx.decimal_digits)
    if key not in _REC_CACHE:
        mom = opq.moment_sequence(opq.WeightSpec(r=3), 2 * n, ctx)
        rec = opq.build_recurrence(mom, n)
        _REC_CACHE[key] = opq.rescale_to_Pn(rec, n, 3)
    return _REC_CACHE[key]


def exact_pn(n: int, z: complex, ctx: PrecisionContext | None = None):
    """P_n(z) by the rescaled three-term recurrence at scheduled precision."""
    return opq.pi_eval(_recurrence_for(n, ctx), complex(z))


def pn_relative_error(n: int, z: complex, phase: PhaseContext,
                      delta: float = 0.5, tube_width: float = 0.25) -> tuple[str, float]:
    """(region, |formula - exact| / |exact|), comparing in high precision.

    When the exact value is astronomically large the comparison switches to
    log-magnitudes plus phases, which stays meaningful past the float range.
    """
    region, approx = pn_asymptotic(n, z, phase, delta=delta, tube_width=tube_width)
    exact = exact_pn(n, z)
    if abs(exact) > 1e300 or abs(exact) < 1e-300:
        la, le = mp.log(mp.mpc(approx)), mp.log(exact)
        diff = la - le
        diff = mp.mpc(mp.re(diff), mp.fmod(mp.im(diff) + mp.pi, 2 * mp.pi) - mp.pi)
        return region, float(abs(mp.expm1(diff)))
    return region, float(abs(mp.mpc(approx) - exact) / abs(exact))


# ---------------------------------------------------------------------------
# Zero distribution diagnostics
# ---------------------------------------------------------------------------

def zero_distribution_report(n: int, phase: PhaseContext,
                             rule: opq.QuadratureRule | None = None) -> dict:
    """How closely the P_n zeros shadow the curve and its measure.

    Returns max distance to the polyline, the Kolmogorov-Smirnov statistic
    of the projected masses against uniform order statistics, and the worst
    mismatch of the zero set under z -> -conj(z).
    """
    if rule is None:
        rule = opq.build_rule(n, opq.WeightSpec(r=3))
    zs = np.array([complex(z) for z in opq.rescale_to_Pn(rule, n, 3).nodes])
    pts = phase.gamma.points_complex()
    cdf = phase.gamma.cdf
    dists, masses = [], []
    for z in zs:
        d, _, k, t, _ = geometry.nearest_on_polyline(complex(z), pts)
        dists.append(d)
        masses.append(cdf[k] + t * (cdf[k + 1] - cdf[k]))
    masses = np.sort(np.array(masses))
    ks = max(max((k + 1) / n - masses[k], masses[k] - k / n) for k in range(n))
    mirror = -np.conj(zs)
    pairing = float(max(np.min(np.abs(zs - m)) for m in mirror))
    return {
        "n": n,
        "max_distance": float(max(dists)),
        "ks_statistic": float(ks),
        "reflection_mismatch": pairing,
        "zeros": [complex(z) for z in zs],
    }


# ---------------------------------------------------------------------------
# Airy model problem: connection identity and matching estimate
# ---------------------------------------------------------------------------

def airy_model_matrix(zeta: complex) -> np.ndarray:
    """sqrt(2 pi) [[y0, -y2], [-i y0', i y2']] with y0 = Ai, y2 = w^2 Ai(w^2 .).

    det = 1 by the Wronskian of the rotated Airy solutions.
    """
    zeta = complex(zeta)
    w = _OMEGA
    ai0, aip0, _, _ = scipy.special.airy(zeta)
    ai2, aip2, _, _ = scipy.special.airy(w ** 2 * zeta)
    y0, y0p = ai0, aip0
    y2, y2p = w ** 2 * ai2, w * aip2          # chain rule: d/dz w^2 Ai(w^2 z)
    return np.sqrt(2 * np.pi) * np.array([[y0, -y2], [-1j * y0p, 1j * y2p]],
                                         dtype=complex)


def airy_model_residual(radius: float = 8.0, samples: int = 25) -> float:
    """max entrywise deviation of A(z) e^{(2/3) z^{3/2} sigma3} from its limit.

    The limit matrix is z^{-sigma3/4} (1/sqrt2) [[1, i], [i, 1]].  The pair
    (y0, y2) solves the model problem in the Stokes sector arg z in
    (-pi/3, pi); the circle is sampled comfortably inside that sector,
    where classical estimates give a deviation O(|z|^{-3/2}).
    """
    worst = 0.0
    for th in np.linspace(-0.7, 2.7, samples):
        zeta = radius * np.exp(1j * th)
        a = airy_model_matrix(zeta)
        e = np.exp((2.0 / 3.0) * zeta ** 1.5)
        b = a @ np.diag([e, 1 / e])
        p, q = zeta ** -0.25, zeta ** 0.25
        pinf_inv = np.array([[q, -1j * p], [-1j * q, p]], dtype=complex) / np.sqrt(2)
        worst = max(worst, float(np.max(np.abs(b @ pinf_inv - np.eye(2)))))
    return worst


def airy_connection_residual(zeta: complex, ctx: PrecisionContext | None = None):
    """|Ai(z) + w Ai(w z) + w^2 Ai(w^2 z)| at precision (identically zero)."""
    ctx = PrecisionContext() if ctx is None else ctx
    with ctx.working():
        z = mp.mpmathify(zeta)
        w = mp.expjpi(mp.mpf(2) / 3)
        total = mp.airyai(z) + w * mp.airyai(w * z) + w ** 2 * mp.airyai(w ** 2 * z)
        return ctx.finalize(abs(total))
