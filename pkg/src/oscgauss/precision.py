"""Extended-precision arithmetic contract and shared special functions.

The rest of the package consumes three things from here: a precision
context (working digits + guard digits, with results rounded back to the
working count), the special functions Gamma / Ai / Ai', and a two-point
branch-aware square root

    R(z)^2 = (z - z1)(z - z2),   R(z)/z -> 1  as  |z| -> oo,

cut along an arbitrary traced polyline from z1 to z2.  The branch is
realised as the product of the two principal square roots times a parity
sign: principal factors jump exactly on the horizontal leftward rays from
z1 and z2, so the union (cut + both rays) is a mod-2 cycle and the sign
of R is the crossing parity of a probe segment from a fixed anchor far
above the cut.

Arbitrary-precision arithmetic is delegated to mpmath; the functions here
add the error contract (pole / non-finite checks, rounding discipline)
that the callers rely on.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import mpmath as mp

from . import geometry
from .errors import NonFiniteError, OnCutError, PoleError

__all__ = [
    "PrecisionContext",
    "ComplexValue",
    "ensure_finite",
    "gamma",
    "airy_ai",
    "airy_ai_prime",
    "branch_sqrt_product",
]


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable working-precision contract.

    decimal_digits : digits every result is rounded to,
    guard_digits   : extra digits carried by all intermediate arithmetic.
    """

    decimal_digits: int = 30
    guard_digits: int = 10

    def __post_init__(self):
        if self.decimal_digits < 30:
            raise ValueError("decimal_digits must be >= 30")
        if self.guard_digits < 10:
            raise ValueError("guard_digits must be >= 10")

    def working(self):
        """Context manager setting mpmath to decimal_digits + guard_digits."""
        return mp.workdps(self.decimal_digits + self.guard_digits)

    def finalize(self, value):
        """Round an mpmath value to decimal_digits."""
        with mp.workdps(self.decimal_digits):
            return +value

    @property
    def eps(self):
        with self.working():
            return mp.mpf(10) ** (-self.decimal_digits)


def _is_finite_number(x) -> bool:
    try:
        if isinstance(x, mp.mpc) or isinstance(x, complex):
            return mp.isfinite(mp.mpmathify(x))
        return mp.isfinite(mp.mpmathify(x))
    except (TypeError, ValueError):
        return False


def ensure_finite(value, context: str = "operation"):
    """Abort with NonFiniteError instead of letting NaN/overflow escape."""
    if not _is_finite_number(value):
        raise NonFiniteError(f"{context} produced a non-finite value: {value!r}")
    return value


@dataclass(frozen=True)
class ComplexValue:
    """Serialization-boundary complex number with finite mpf components.

    Internal code passes mpc / complex around freely; this type pins down
    the decimal-string form used by the file formats.
    """

    re: mp.mpf
    im: mp.mpf

    def __post_init__(self):
        for part in (self.re, self.im):
            if not mp.isfinite(part):
                raise NonFiniteError(f"ComplexValue component not finite: {part!r}")

    @classmethod
    def from_number(cls, z, ctx: PrecisionContext | None = None) -> "ComplexValue":
        z = mp.mpmathify(z)
        re, im = mp.re(z), mp.im(z)
        if ctx is not None:
            re, im = ctx.finalize(re), ctx.finalize(im)
        return cls(re=re, im=im)

    def to_mpc(self) -> mp.mpc:
        return mp.mpc(self.re, self.im)

    def as_strings(self, digits: int) -> tuple[str, str]:
        return (mp.nstr(self.re, digits), mp.nstr(self.im, digits))


def gamma(z, ctx: PrecisionContext):
    """Gamma function with an explicit pole check.

    Raises PoleError for z in {0, -1, -2, ...}; any overflow or NaN from
    the underlying evaluation is converted into NonFiniteError.
    """
    with ctx.working():
        w = mp.mpmathify(z)
        if mp.im(w) == 0 and mp.isint(mp.re(w)) and mp.re(w) <= 0:
            raise PoleError(f"gamma pole at z = {mp.re(w)}")
        val = mp.gamma(w)
        ensure_finite(val, "gamma")
        return ctx.finalize(val)


def airy_ai(z, ctx: PrecisionContext):
    """Airy function Ai(z) (entire; no error states besides non-finite)."""
    with ctx.working():
        val = mp.airyai(mp.mpmathify(z))
        ensure_finite(val, "airy_ai")
        return ctx.finalize(val)


def airy_ai_prime(z, ctx: PrecisionContext):
    """Derivative Ai'(z)."""
    with ctx.working():
        val = mp.airyai(mp.mpmathify(z), derivative=1)
        ensure_finite(val, "airy_ai_prime")
        return ctx.finalize(val)


# ---------------------------------------------------------------------------
# Branch-aware square root of (z - z1)(z - z2)
# ---------------------------------------------------------------------------

def _cut_points(cut) -> "geometry.np.ndarray":
    pts = getattr(cut, "points_complex", None)
    if callable(pts):
        return geometry.as_complex_array(pts())
    return geometry.as_complex_array(cut)


def branch_parity_for_cut(z: complex, cut_pts, z1: complex, z2: complex) -> int:
    """Crossing-parity sign of R at z for the given cut polyline."""
    ymax = float(max(p.imag for p in (complex(z1), complex(z2))))
    ymax = max(ymax, float(cut_pts.imag.max()))
    anchor = complex(0.31711, ymax + 23.77)
    return geometry.branch_parity(complex(z), cut_pts, (complex(z1), complex(z2)), anchor)


def branch_sqrt_product(z, z1, z2, cut, ctx: PrecisionContext | None = None):
    """R(z) with R^2 = (z-z1)(z-z2), R ~ z at infinity, cut along `cut`.

    Parameters
    ----------
    z : point of evaluation (complex or mpmath); must stay farther from the
        cut polyline than the polyline's own resolution (max segment length).
    z1, z2 : branch points (the first/last vertices of the cut).
    cut : polyline from z1 to z2 (sequence of complex, or an object exposing
        points_complex()).
    ctx : optional PrecisionContext; when given, the square roots are taken
        with mpmath at working precision, otherwise in float arithmetic.

    Raises
    ------
    OnCutError : if z is within the cut resolution of the polyline.
    """
    pts = _cut_points(cut)
    zf = complex(z)
    resolution = max(geometry.max_segment_length(pts), 1e-13)
    dist, _, _, _, _ = geometry.nearest_on_polyline(zf, pts)
    if dist <= resolution:
        raise OnCutError(
            f"point {zf} is within cut resolution {resolution:.3g} (distance {dist:.3g})"
        )
    sign = branch_parity_for_cut(zf, pts, complex(z1), complex(z2))
    if ctx is None:
        val = sign * cmath.sqrt(zf - complex(z1)) * cmath.sqrt(zf - complex(z2))
        if not (cmath.isfinite(val)):
            raise NonFiniteError(f"branch_sqrt_product non-finite at {zf}")
        return val
    with ctx.working():
        w = mp.mpmathify(z)
        val = sign * mp.sqrt(w - mp.mpmathify(z1)) * mp.sqrt(w - mp.mpmathify(z2))
        ensure_finite(val, "branch_sqrt_product")
        return ctx.finalize(val)
