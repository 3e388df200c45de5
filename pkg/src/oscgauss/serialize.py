"""Deterministic decimal-string serialization for the CLI file formats.

Every numeric value crosses the process boundary as a decimal string at an
explicit digit count (never a binary float), so extended-precision results
survive the round trip and two runs with the same configuration produce
byte-identical files.  Integers and booleans stay native JSON.
"""

from __future__ import annotations

import json

import mpmath as mp
import numpy as np

from .scurve import CurvePolyline

__all__ = [
    "fmt",
    "fmt_complex",
    "moments_csv",
    "rule_csv",
    "measure_csv",
    "curve_json_dict",
    "curve_from_json_dict",
    "report_json",
]

DEFAULT_DIGITS = 17


def fmt(x, digits: int = DEFAULT_DIGITS) -> str:
    """Decimal string of a real number, deterministic for fixed digits."""
    with mp.workdps(max(digits + 5, 20)):
        v = mp.mpf(float(x)) if isinstance(x, (float, np.floating)) else mp.mpf(x)
        return mp.nstr(v, digits, strip_zeros=True)


def fmt_complex(z, digits: int = DEFAULT_DIGITS) -> tuple[str, str]:
    with mp.workdps(max(digits + 5, 20)):
        z = mp.mpmathify(complex(z)) if isinstance(z, (complex, np.complexfloating)) \
            else mp.mpmathify(z)
        return (mp.nstr(mp.re(z), digits, strip_zeros=True),
                mp.nstr(mp.im(z), digits, strip_zeros=True))


def _jsonable(obj, digits: int):
    """Recursively map numbers to decimal strings (complex to {re, im})."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v, digits) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating, mp.mpc)):
        re, im = fmt_complex(obj, digits)
        return {"re": re, "im": im}
    if isinstance(obj, (float, np.floating, mp.mpf)):
        return fmt(obj, digits)
    return obj


def report_json(obj, digits: int = DEFAULT_DIGITS) -> str:
    """Canonical JSON text: sorted keys, fixed separators, decimal strings."""
    return json.dumps(_jsonable(obj, digits), sort_keys=True,
                      separators=(",", ": "), indent=1) + "\n"


# ---------------------------------------------------------------------------
# CSV tables
# ---------------------------------------------------------------------------

def moments_csv(moment_values, digits: int = DEFAULT_DIGITS) -> str:
    lines = ["k,re,im"]
    for k, m in enumerate(moment_values):
        re, im = fmt_complex(m, digits)
        lines.append(f"{k},{re},{im}")
    return "\n".join(lines) + "\n"


def rule_csv(rule, digits: int = DEFAULT_DIGITS) -> str:
    lines = ["k,node_re,node_im,weight_re,weight_im"]
    for k, (z, w) in enumerate(zip(rule.nodes, rule.weights)):
        zr, zi = fmt_complex(z, digits)
        wr, wi = fmt_complex(w, digits)
        lines.append(f"{k},{zr},{zi},{wr},{wi}")
    return "\n".join(lines) + "\n"


def measure_csv(curve: CurvePolyline, digits: int = DEFAULT_DIGITS) -> str:
    """Rows s, point, density, cdf along an annotated curve."""
    if curve.density is None or curve.cdf is None:
        raise ValueError("curve carries no measure annotation")
    lines = ["s,re,im,density,cdf"]
    pts = curve.points_complex()
    for s, z, d, c in zip(curve.s, pts, curve.density, curve.cdf):
        zr, zi = fmt_complex(z, digits)
        lines.append(f"{fmt(s, digits)},{zr},{zi},{fmt(d, digits)},{fmt(c, digits)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Curve JSON
# ---------------------------------------------------------------------------

def _curve_dict(curve: CurvePolyline, digits: int) -> dict:
    pts = curve.points_complex()
    d = {
        "kind": curve.kind,
        "points_re": [fmt(x, digits) for x in pts.real],
        "points_im": [fmt(x, digits) for x in pts.imag],
        "arclength": [fmt(x, digits) for x in curve.s],
    }
    if curve.density is not None:
        d["density"] = [fmt(x, digits) for x in curve.density]
    if curve.cdf is not None:
        d["cdf"] = [fmt(x, digits) for x in curve.cdf]
        d["total_mass"] = fmt(curve.total_mass, digits)
    return d


def curve_json_dict(curves: dict, digits: int = DEFAULT_DIGITS) -> dict:
    """{"curves": {name: curve-dict}} for any mapping of named polylines."""
    return {"curves": {name: _curve_dict(c, digits) for name, c in curves.items()}}


def curve_from_json_dict(doc: dict, name: str = "gamma") -> CurvePolyline:
    """Rebuild a CurvePolyline from an exported document (floats from strings)."""
    d = doc["curves"][name] if "curves" in doc else doc[name] if name in doc else doc
    pts = np.array([complex(float(a), float(b))
                    for a, b in zip(d["points_re"], d["points_im"])])
    density = np.array([float(x) for x in d["density"]]) if "density" in d else None
    cdf = np.array([float(x) for x in d["cdf"]]) if "cdf" in d else None
    total = float(d["total_mass"]) if "total_mass" in d else float("nan")
    return CurvePolyline(kind=d["kind"], points=pts,
                         s=np.array([float(x) for x in d["arclength"]]),
                         density=density, cdf=cdf, total_mass=total)
