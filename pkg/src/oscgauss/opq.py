"""Moments and non-Hermitian orthogonal polynomials for the weight e^{iz^r}.

The linear functional is integration over the two steepest-descent rays

    arg z = pi/(2r)            (outgoing)
    arg z = pi/(2r) + 2*floor(r/2)*pi/r   (incoming),

traversed from the incoming sector through the origin.  Along both rays
e^{iz^r} = e^{-rho^r}, so every monomial moment has the closed form

    M_k = (Gamma((k+1)/r)/r) * (e^{i(k+1)theta_hi} - e^{i(k+1)theta_lo}).

From the moment table we build the monic orthogonal polynomials pi_n via
a Chebyshev-algorithm recursion on raw moments (the functional is complex
bilinear and only quasi-definite, so every divisor is checked and a
vanishing Hankel determinant is reported, not repaired), find their zeros
by simultaneous Aberth iteration, and solve a Vandermonde system for the
Gaussian weights.  A separate Hankel-determinant linear solve provides an
independent construction used for cross-checks at small degree.

All computations run under a PrecisionContext; the default schedule for
degree n is max(60, 12 + 4n) working digits, doubled (at most twice) if
residual verification fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath as mp

from .errors import (
    DegenerateFunctionalError,
    IllConditionedError,
    NonconvergenceError,
)
from .precision import PrecisionContext, ensure_finite, gamma

__all__ = [
    "WeightSpec",
    "MomentSequence",
    "RecurrenceCoefficients",
    "QuadratureRule",
    "moment",
    "moment_sequence",
    "build_recurrence",
    "pi_eval",
    "monic_coefficients",
    "hankel_monic_coefficients",
    "zeros",
    "gauss_weights",
    "rule_exactness_residual",
    "verify_orthogonality",
    "lambda_n",
    "rescale_to_Pn",
    "precision_schedule",
    "build_rule",
    "symmetrize_roots",
]


@dataclass(frozen=True)
class WeightSpec:
    """Contour data for the weight e^{iz^r}: exponent r and the two ray angles."""

    r: int

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("r must be an integer >= 2")

    @property
    def ray_high(self) -> float:
        """Outgoing ray angle pi/(2r), as a multiple of pi."""
        return 1.0 / (2 * self.r)

    @property
    def ray_low(self) -> float:
        """Incoming ray angle pi/(2r) + 2*floor(r/2)*pi/r, as a multiple of pi."""
        return 1.0 / (2 * self.r) + 2.0 * (self.r // 2) / self.r

    def ray_directions(self):
        """(e^{i theta_hi}, e^{i theta_lo}) at the ambient working precision.

        The float properties round the pi-fraction to double; quadrature
        oracles need the phases exact to working precision.
        """
        hi = mp.mpf(1) / (2 * self.r)
        lo = hi + mp.mpf(2 * (self.r // 2)) / self.r
        return mp.expjpi(hi), mp.expjpi(lo)


@dataclass(frozen=True)
class MomentSequence:
    """Moments M_0..M_kmax of a (quasi-definite) linear functional."""

    values: tuple
    ctx: PrecisionContext
    r: int | None = None
    label: str = "osc"

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """Three-term recurrence pi_{k+1} = (z - alpha_k) pi_k - beta_{k-1} pi_{k-1}."""

    alpha: tuple
    beta: tuple
    n: int
    ctx: PrecisionContext
    symmetry: str | None = None  # 'neg_conj' | 'real' | None


@dataclass(frozen=True)
class QuadratureRule:
    """Gaussian-type rule: nodes, weights, and the regime/scaling metadata."""

    nodes: tuple
    weights: tuple
    n: int
    regime: str  # 'stationary' or 'endpoint'
    r: int | None = None
    scale: object = 1  # node scaling applied relative to the monic pi_n zeros


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def moment(k: int, spec: WeightSpec, ctx: PrecisionContext):
    """Closed-form moment M_k = int_Gamma z^k e^{iz^r} dz.

    The two ray contributions reduce to Gamma((k+1)/r)/r times a difference
    of unit phases at rational multiples of pi, evaluated exactly with
    expjpi so structural cancellations (e.g. M_{3j+2} = 0 for r = 3) hold
    to working precision.
    """
    if k < 0:
        raise ValueError("moment index must be >= 0")
    r = spec.r
    with ctx.working():
        g = gamma(mp.mpf(k + 1) / r, ctx)
        ph_hi = mp.expjpi(mp.mpf(k + 1) * mp.mpf(1) / (2 * r))
        ph_lo = mp.expjpi(mp.mpf(k + 1) * (mp.mpf(1) / (2 * r) + mp.mpf(2 * (r // 2)) / r))
        val = g / r * (ph_hi - ph_lo)
        ensure_finite(val, "moment")
        return ctx.finalize(val)


def moment_sequence(spec: WeightSpec, k_max: int, ctx: PrecisionContext) -> MomentSequence:
    vals = tuple(moment(k, spec, ctx) for k in range(k_max + 1))
    return MomentSequence(values=vals, ctx=ctx, r=spec.r, label="osc")


# ---------------------------------------------------------------------------
# Moment -> recurrence (Chebyshev algorithm on raw moments)
# ---------------------------------------------------------------------------

def build_recurrence(moments: MomentSequence, n: int) -> RecurrenceCoefficients:
    """Recurrence coefficients alpha_0..alpha_{n-1}, beta_0..beta_{n-2}.

    Runs the sigma-recursion of the Chebyshev algorithm on the raw moments.
    sigma_{k,k} is the squared norm <pi_k, pi_k> = Delta_{k+1}/Delta_k; if it
    cancels to working precision the functional is degenerate at that index
    and DegenerateFunctionalError(k+1) is raised.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(moments) < 2 * n:
        raise ValueError(f"need moments through index {2 * n - 1}, have {len(moments) - 1}")
    ctx = moments.ctx
    with ctx.working():
        m = [mp.mpmathify(v) for v in moments.values[: 2 * n]]
        tiny = mp.mpf(10) ** (-(ctx.decimal_digits + ctx.guard_digits // 2))
        if abs(m[0]) <= tiny:
            raise DegenerateFunctionalError(0, "zeroth moment vanishes")
        alpha = [m[1] / m[0]]
        beta: list = []
        width = 2 * n
        prev2 = [mp.mpc(0)] * width          # sigma_{k-2, l}
        prev = list(m)                        # sigma_{k-1, l}, starting at k-1 = 0
        for k in range(1, n):
            cur = [mp.mpc(0)] * width
            scale_kk = mp.mpf(0)
            for l in range(k, width - k):
                t1 = prev[l + 1] if l + 1 < width else mp.mpc(0)
                t2 = alpha[k - 1] * prev[l]
                t3 = (beta[k - 2] * prev2[l]) if k >= 2 else mp.mpc(0)
                cur[l] = t1 - t2 - t3
                if l == k:
                    scale_kk = abs(t1) + abs(t2) + abs(t3)
            if abs(cur[k]) <= tiny * (scale_kk + 1):
                raise DegenerateFunctionalError(
                    k + 1, f"Hankel determinant ratio sigma_{k},{k} cancels to working precision"
                )
            beta.append(ctx.finalize(cur[k] / prev[k - 1]))
            alpha.append(ctx.finalize(cur[k + 1] / cur[k] - prev[k] / prev[k - 1]))
            prev2, prev = prev, cur
        alpha = [ctx.finalize(a) for a in alpha]
        sym = _detect_symmetry(alpha, beta, ctx)
    return RecurrenceCoefficients(alpha=tuple(alpha), beta=tuple(beta), n=n, ctx=ctx, symmetry=sym)


def _detect_symmetry(alpha, beta, ctx) -> str | None:
    """Classify the root-set involution implied by the coefficients."""
    tol = mp.mpf(10) ** (-(ctx.decimal_digits // 2))
    def small(x, ref):
        return abs(x) <= tol * (ref + 1)
    if all(small(mp.re(a), abs(a)) for a in alpha) and all(small(mp.im(b), abs(b)) for b in beta):
        return "neg_conj"
    if all(small(mp.im(a), abs(a)) for a in alpha) and all(small(mp.im(b), abs(b)) for b in beta):
        return "real"
    return None


def pi_eval(coeffs: RecurrenceCoefficients, z):
    """Evaluate monic pi_n(z) by the three-term recurrence."""
    with coeffs.ctx.working():
        if coeffs.n == 0:
            return mp.mpc(1)
        zz = mp.mpmathify(z)
        p_prev, p = mp.mpc(1), zz - coeffs.alpha[0]
        for k in range(1, coeffs.n):
            p, p_prev = (zz - coeffs.alpha[k]) * p - coeffs.beta[k - 1] * p_prev, p
        return p


def monic_coefficients(coeffs: RecurrenceCoefficients) -> list:
    """Ascending coefficient list [c_0, ..., c_{n-1}] of pi_n = z^n + sum c_j z^j."""
    ctx = coeffs.ctx
    with ctx.working():
        p_prev = [mp.mpc(1)]              # pi_0
        p = [-mp.mpmathify(coeffs.alpha[0]), mp.mpc(1)]  # pi_1
        if coeffs.n == 0:
            return []
        for k in range(1, coeffs.n):
            shifted = [mp.mpc(0)] + p
            scaled = [coeffs.alpha[k] * c for c in p] + [mp.mpc(0)]
            prev_pad = [coeffs.beta[k - 1] * c for c in p_prev] + [mp.mpc(0)] * (len(p) + 1 - len(p_prev))
            nxt = [shifted[j] - scaled[j] - prev_pad[j] for j in range(len(shifted))]
            p_prev, p = p, nxt
        return p[:-1]


def hankel_monic_coefficients(moments: MomentSequence, n: int) -> list:
    """Independent monic coefficients from the Hankel linear system.

    Solves sum_j M_{k+j} c_j = -M_{k+n}, k = 0..n-1, by LU at working
    precision.  Meant for cross-validation at small n only.
    """
    ctx = moments.ctx
    if len(moments) < 2 * n:
        raise ValueError("need moments through index 2n-1")
    with ctx.working():
        A = mp.matrix(n, n)
        b = mp.matrix(n, 1)
        for k in range(n):
            for j in range(n):
                A[k, j] = moments[k + j]
            b[k] = -moments[k + n]
        c = mp.lu_solve(A, b)
        return [c[j] for j in range(n)]


# ---------------------------------------------------------------------------
# Zeros (simultaneous Aberth iteration)
# ---------------------------------------------------------------------------

def _horner_with_derivative(coeffs_ascending, z):
    """(p(z), p'(z), local scale) for the monic polynomial with given lower coeffs."""
    p = mp.mpc(1)
    dp = mp.mpc(0)
    for j in range(len(coeffs_ascending) - 1, -1, -1):
        dp = dp * z + p
        p = p * z + coeffs_ascending[j]
    az = abs(z)
    scale = mp.mpf(0)
    acc = mp.mpf(1)
    for j in range(len(coeffs_ascending)):
        scale += abs(coeffs_ascending[j]) * acc
        acc *= az
    scale += acc  # the monic leading term |z|^n
    return p, dp, scale


def symmetrize_roots(roots: list, symmetry: str | None, ctx: PrecisionContext) -> list:
    """Enforce the root-set involution (z -> -conj z, or z -> conj z) by pairing.

    Roots are greedily matched against the reflected multiset; matched pairs
    are replaced by their symmetrized average and self-paired roots are
    projected onto the fixed axis of the involution.
    """
    if symmetry is None or not roots:
        return list(roots)
    with ctx.working():
        if symmetry == "neg_conj":
            invol = lambda w: -mp.conj(w)
        elif symmetry == "real":
            invol = lambda w: mp.conj(w)
        else:
            return list(roots)
        out = [None] * len(roots)
        used = [False] * len(roots)
        order = sorted(range(len(roots)), key=lambda i: (mp.re(roots[i]), mp.im(roots[i])))
        for i in order:
            if used[i]:
                continue
            target = invol(roots[i])
            best, bestd = i, abs(roots[i] - target)
            for j in range(len(roots)):
                if not used[j]:
                    d = abs(roots[j] - target)
                    if d < bestd:
                        best, bestd = j, d
            if best == i:
                fixed = (roots[i] + invol(roots[i])) / 2
                out[i] = fixed
                used[i] = True
            else:
                a = (roots[i] + invol(roots[best])) / 2
                out[i] = a
                out[best] = invol(a)
                used[i] = used[best] = True
        return out


def zeros(coeffs: RecurrenceCoefficients, max_iter: int = 250) -> list:
    """All n zeros of pi_n by Aberth iteration on the monic coefficients.

    Initial guesses sit on a circle of radius |c_0|^{1/n} (with a Fujiwara
    root-bound fallback when c_0 is tiny) around the coefficient centroid
    -c_{n-1}/n.  After convergence the root set's involution symmetry is
    enforced by pairing, and every root must satisfy
    |pi_n(root)| <= 10^{-decimal_digits/2} * (local scale).
    """
    ctx = coeffs.ctx
    n = coeffs.n
    if n == 0:
        return []
    with ctx.working():
        c = monic_coefficients(coeffs)
        center = -c[-1] / n if n >= 1 else mp.mpc(0)
        r0 = abs(c[0]) ** (mp.mpf(1) / n) if abs(c[0]) > 0 else mp.mpf(0)
        fujiwara = 2 * max(abs(c[n - 1 - j]) ** (mp.mpf(1) / (j + 1)) for j in range(n))
        if not (r0 > fujiwara / 100):
            r0 = fujiwara
        zs = [center + r0 * mp.expj(2 * mp.pi * i / n + mp.mpf("0.31007")) for i in range(n)]
        tol = mp.mpf(10) ** (-ctx.decimal_digits)
        # Below this the iteration may stall on the evaluation roundoff floor;
        # treat a non-decreasing plateau there as converged (the residual bar
        # after the loop is the actual acceptance check).
        stall_bar = mp.mpf(10) ** (-(ctx.decimal_digits // 2))
        converged = False
        prev_move = mp.inf
        stalled = 0
        for _ in range(max_iter):
            move = mp.mpf(0)
            new = list(zs)
            for i in range(n):
                p, dp, _ = _horner_with_derivative(c, zs[i])
                if dp == 0:
                    new[i] = zs[i] * (1 + mp.mpf("1e-3")) + mp.mpf("1e-3")
                    move = mp.mpf(1)
                    continue
                nu = p / dp
                s = mp.mpc(0)
                for j in range(n):
                    if j != i:
                        d = zs[i] - zs[j]
                        if d == 0:
                            d = mp.mpf(10) ** (-(ctx.decimal_digits // 2))
                        s += 1 / d
                denom = 1 - nu * s
                delta = nu / denom if denom != 0 else nu
                new[i] = zs[i] - delta
                move = max(move, abs(delta) / (1 + abs(new[i])))
            zs = new
            if move <= tol:
                converged = True
                break
            if move <= stall_bar and move >= prev_move / 2:
                stalled += 1
                if stalled >= 3:
                    converged = True
                    break
            else:
                stalled = 0
            prev_move = move
        if not converged:
            raise NonconvergenceError(
                f"Aberth iteration did not reach {mp.nstr(tol, 3)} in {max_iter} iterations (n={n})"
            )
        zs = symmetrize_roots(zs, coeffs.symmetry, ctx)
        bar = mp.mpf(10) ** (-(ctx.decimal_digits // 2))
        for z in zs:
            p, _, scale = _horner_with_derivative(c, z)
            if not abs(p) <= bar * scale:
                raise NonconvergenceError(
                    f"root residual {mp.nstr(abs(p) / scale, 3)} exceeds 10^(-digits/2) (n={n})"
                )
        return [ctx.finalize(z) for z in zs]


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

def gauss_weights(nodes: Sequence, moments: MomentSequence) -> list:
    """Weights solving the Vandermonde system sum_j w_j z_j^k = M_k, k < n.

    The delivered rule is additionally checked on k = n..2n-1 (Gaussian
    exactness); if those residuals exceed 10^(-decimal_digits/3) the solve
    has lost too many digits and IllConditionedError reports the estimate.
    """
    ctx = moments.ctx
    n = len(nodes)
    if n == 0:
        return []
    with ctx.working():
        zs = [mp.mpmathify(z) for z in nodes]
        for i in range(n):
            for j in range(i + 1, n):
                if zs[i] == zs[j]:
                    raise ValueError("nodes must be pairwise distinct")
        A = mp.matrix(n, n)
        b = mp.matrix(n, 1)
        for k in range(n):
            for j in range(n):
                A[k, j] = zs[j] ** k
            b[k] = moments[k]
        w = mp.lu_solve(A, b)
        weights = [w[j] for j in range(n)]
        hi = min(2 * n - 1, len(moments) - 1)
        resid = rule_exactness_residual(zs, weights, moments, range(0, hi + 1))
        bar = mp.mpf(10) ** (-mp.mpf(ctx.decimal_digits) / 3)
        if not resid <= bar:
            lost = float(ctx.decimal_digits + ctx.guard_digits + mp.log10(resid + mp.mpf(10) ** (-mp.dps)))
            raise IllConditionedError(
                max(lost, 0.0),
                f"exactness residual {mp.nstr(resid, 3)} exceeds 10^(-digits/3); raise precision",
            )
        return [ctx.finalize(x) for x in weights]


def rule_exactness_residual(nodes, weights, moments: MomentSequence, k_range) -> mp.mpf:
    """Max relative residual |sum w z^k - M_k| / scale over k_range."""
    ctx = moments.ctx
    with ctx.working():
        worst = mp.mpf(0)
        for k in k_range:
            acc = mp.mpc(0)
            scale = mp.mpf(0)
            for z, w in zip(nodes, weights):
                t = w * mp.mpmathify(z) ** k
                acc += t
                scale += abs(t)
            scale += abs(moments[k])
            if scale == 0:
                scale = mp.mpf(1)
            worst = max(worst, abs(acc - moments[k]) / scale)
        return worst


# ---------------------------------------------------------------------------
# Independent orthogonality check by ray quadrature
# ---------------------------------------------------------------------------

def verify_orthogonality(coeffs: RecurrenceCoefficients, k: int, spec: WeightSpec,
                         ctx: PrecisionContext) -> mp.mpf:
    """Normalized residual |int_Gamma pi_n(s) s^k e^{is^r} ds| by adaptive quadrature.

    Integrates along the two rays directly (no closed-form moments anywhere),
    normalizing by int |pi_n s^k e^{is^r}| |ds| so the result is a relative
    orthogonality defect.  k = n returns O(1): the norm is nonzero.
    """
    r = spec.r
    with ctx.working():
        dir_hi, dir_lo = spec.ray_directions()

        def along(direction, rho):
            z = rho * direction
            return pi_eval(coeffs, z) * z ** k * mp.exp(-rho ** r)

        cut = max((mp.mpf(coeffs.n + k) / r) ** (mp.mpf(1) / r), mp.mpf(1))
        pts = [0, cut, 2 * cut, mp.inf]
        hi = mp.quad(lambda rho: along(dir_hi, rho), pts)
        lo = mp.quad(lambda rho: along(dir_lo, rho), pts)
        num = abs(dir_hi * hi - dir_lo * lo)
        habs = mp.quad(lambda rho: abs(along(dir_hi, rho)), pts)
        labs = mp.quad(lambda rho: abs(along(dir_lo, rho)), pts)
        den = habs + labs
        return ctx.finalize(num / den)


# ---------------------------------------------------------------------------
# Rescaling pi_n -> P_n and the precision schedule
# ---------------------------------------------------------------------------

def lambda_n(n: int, r: int, ctx: PrecisionContext):
    """Scaling factor (n/r)^(1/r) relating P_n(z) = lambda^{-n} pi_n(lambda z)."""
    with ctx.working():
        return ctx.finalize((mp.mpf(n) / r) ** (mp.mpf(1) / r))


def rescale_to_Pn(obj, n: int, r: int):
    """Rescale zeros / recurrence / rule data from pi_n to P_n (divide by lambda_n).

    Monicity is preserved: alpha scales by 1/lambda, beta by 1/lambda^2,
    nodes by 1/lambda.  Rule weights are left untouched (the scaling is
    recorded in the rule's metadata).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(obj, RecurrenceCoefficients):
        lam = lambda_n(n, r, obj.ctx)
        with obj.ctx.working():
            alpha = tuple(obj.ctx.finalize(a / lam) for a in obj.alpha)
            beta = tuple(obj.ctx.finalize(b / lam ** 2) for b in obj.beta)
        return RecurrenceCoefficients(alpha=alpha, beta=beta, n=obj.n, ctx=obj.ctx,
                                      symmetry=obj.symmetry)
    if isinstance(obj, QuadratureRule):
        ctx = PrecisionContext()
        lam = lambda_n(n, r, ctx)
        nodes = tuple(z / lam for z in obj.nodes)
        return QuadratureRule(nodes=nodes, weights=obj.weights, n=obj.n,
                              regime=obj.regime, r=r, scale=lam)
    # plain sequence of zeros
    ctx = PrecisionContext()
    lam = lambda_n(n, r, ctx)
    return [z / lam for z in obj]


def precision_schedule(n: int) -> PrecisionContext:
    """Working digits for degree n: max(60, 12 + 4n), guard 10."""
    return PrecisionContext(decimal_digits=max(60, 12 + 4 * n), guard_digits=10)


def build_rule(n: int, spec: WeightSpec, ctx: PrecisionContext | None = None) -> QuadratureRule:
    """Full pipeline moments -> recurrence -> zeros -> weights with retries.

    Residual failures (root residuals, weight exactness) double the working
    precision, at most twice.  A degenerate functional aborts immediately
    with its failing index.
    """
    base = precision_schedule(n) if ctx is None else ctx
    last: Exception | None = None
    for attempt in range(3):
        actx = PrecisionContext(base.decimal_digits * (2 ** attempt), base.guard_digits)
        try:
            mom = moment_sequence(spec, 2 * n, actx)
            rec = build_recurrence(mom, n)
            zs = zeros(rec)
            ws = gauss_weights(zs, mom)
            return QuadratureRule(nodes=tuple(zs), weights=tuple(ws), n=n,
                                  regime="stationary", r=spec.r, scale=1)
        except (NonconvergenceError, IllConditionedError) as exc:
            last = exc
            continue
    raise last
