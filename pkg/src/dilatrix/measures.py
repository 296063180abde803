"""One-dimensional s-concave probability measures.

An s-concave measure on the line has a density psi such that psi^gamma is
concave in the power-mean sense, with gamma = s/(1-s) in dimension one.
The s-affine family (psi^gamma affine, log psi affine when s = 0) admits
closed-form CDFs, quantiles and sampling; it contains the extremizers of
the dilation inequality.  Piecewise profiles provide generic s-concave
test measures whose integrals go through adaptive quadrature.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate

from dilatrix.intervals import Interval, IntervalSet, normalize
from dilatrix.reports import CheckReport

QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-11, limit=200)


# ---------------------------------------------------------------------------
# s-affine densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SAffineDensity:
    """Density (A + B x)_+^((1-s)/s) / Z on [lo, hi] (exp(A + B x)/Z for s = 0).

    The exponent (1-s)/s is 1/gamma for gamma = s/(1-s), the one-dimensional
    case of the correspondence between s-concave measures and gamma-concave
    densities.  hi may be +inf when the tail is integrable, which requires
    s < 0 with B > 0, or s = 0 with B < 0.
    """

    s: float
    lo: float
    hi: float
    A: float
    B: float

    def __post_init__(self) -> None:
        if not self.s <= 1.0:
            raise ValueError(f"s must satisfy s <= 1, got {self.s}")
        if not self.lo < self.hi:
            raise ValueError(f"support must be nondegenerate: [{self.lo}, {self.hi}]")
        if math.isinf(self.hi):
            ok = (self.s < 0 and self.B > 0) or (self.s == 0 and self.B < 0)
            if not ok:
                raise ValueError("unbounded support requires an integrable tail "
                                 "(s < 0 with B > 0, or s = 0 with B < 0)")
        if self.s != 0:
            at_lo = self.A + self.B * self.lo
            at_hi = self.A + self.B * self.hi if math.isfinite(self.hi) else math.inf
            if self.s < 0:
                if at_lo <= 0 or at_hi <= 0:
                    raise ValueError("A + B x must be strictly positive on the support for s < 0")
            else:
                if at_lo < -1e-12 or at_hi < -1e-12 or max(at_lo, at_hi) <= 0:
                    raise ValueError("A + B x must be positive on the interior of the support")
        z = self._antideriv(self.hi) - self._antideriv(self.lo)
        if not (z > 0 and math.isfinite(z)):
            raise ValueError(f"normalization failed: Z = {z}")

    # antiderivative of the unnormalized density
    def _antideriv(self, x: float) -> float:
        if math.isinf(x):
            return 0.0  # valid exactly in the integrable-tail regimes
        if self.s != 0:
            base = max(self.A + self.B * x, 0.0)
            if self.B == 0:
                return base ** ((1.0 - self.s) / self.s) * x
            return base ** (1.0 / self.s) * self.s / self.B
        if self.B == 0:
            return math.exp(self.A) * x
        return math.exp(self.A + self.B * x) / self.B

    @cached_property
    def Z(self) -> float:
        return self._antideriv(self.hi) - self._antideriv(self.lo)

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lo) & (x <= self.hi)
        if self.s != 0:
            base = np.maximum(self.A + self.B * x, 0.0)
            vals = base ** ((1.0 - self.s) / self.s)
        else:
            vals = np.exp(self.A + self.B * x)
        out = np.where(inside, vals / self.Z, 0.0)
        return out if out.ndim else float(out)

    def cdf(self, x: float) -> float:
        x = min(max(x, self.lo), self.hi)
        return (self._antideriv(x) - self._antideriv(self.lo)) / self.Z

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        target = self._antideriv(self.lo) + u * self.Z
        if self.s != 0:
            if self.B == 0:
                out = self.lo + u * (self.hi - self.lo)
            else:
                base = target * self.B / self.s
                out = (base ** self.s - self.A) / self.B
        else:
            if self.B == 0:
                out = self.lo + u * (self.hi - self.lo)
            else:
                out = (np.log(target * self.B) - self.A) / self.B
        return out if out.ndim else float(out)

    def measure(self, F: IntervalSet) -> float:
        """mu(F) by the closed-form CDF; complements via 1 - mu(F)."""
        return float(sum(self.cdf(c.hi) - self.cdf(c.lo) for c in F.components))

    def sample(self, n: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return np.asarray(self.ppf(rng.random(n)))

    def to_json(self) -> str:
        hi = None if math.isinf(self.hi) else self.hi
        return json.dumps({"s": self.s, "support": [self.lo, hi], "A": self.A, "B": self.B})

    @classmethod
    def from_json(cls, text: str) -> "SAffineDensity":
        d = json.loads(text)
        lo, hi = d["support"]
        return cls(s=d["s"], lo=lo, hi=math.inf if hi is None else hi, A=d["A"], B=d["B"])


def extremal_density(s: float, a: float, t_max: float) -> SAffineDensity:
    """The equality-case family: density (a - s x)_+^(1/s - 1) / (a + s)^(1/s).

    Supported on [-1, a/s] for s > 0 and on [-1, inf) for s < 0.  The
    constraint a > max(-s, s*t_max) keeps the density positive at -1 and,
    for s > 0, keeps the dilation (-t, t) of [-1, 1] strictly inside the
    support for every t <= t_max.
    """
    if s == 0 or s > 1:
        raise ValueError("the closed-form family requires s != 0, s <= 1")
    if not t_max > 1:
        raise ValueError("t_max must exceed 1")
    if not a > max(-s, s * t_max):
        raise ValueError(f"need a > max(-s, s*t_max) = {max(-s, s * t_max)}, got a={a}")
    hi = a / s if s > 0 else math.inf
    return SAffineDensity(s=s, lo=-1.0, hi=hi, A=a, B=-s)


def uniform_density(lo: float, hi: float) -> SAffineDensity:
    return SAffineDensity(s=1.0, lo=lo, hi=hi, A=1.0, B=0.0)


def exponential_density(rate: float = 1.0, lo: float = 0.0) -> SAffineDensity:
    if rate <= 0:
        raise ValueError("rate must be positive")
    return SAffineDensity(s=0.0, lo=lo, hi=math.inf, A=0.0, B=-rate)


@dataclass(frozen=True)
class LaplaceDensity:
    """Two-sided exponential exp(-|x - center|/scale) / (2*scale); log-concave."""

    center: float = 0.0
    scale: float = 1.0
    s: float = 0.0

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @property
    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(-np.abs(x - self.center) / self.scale) / (2 * self.scale)
        return out if out.ndim else float(out)

    def cdf(self, x: float) -> float:
        u = (x - self.center) / self.scale
        return 0.5 * math.exp(u) if u < 0 else 1.0 - 0.5 * math.exp(-u)

    def measure(self, F: IntervalSet) -> float:
        return float(sum(self.cdf(c.hi) - self.cdf(c.lo) for c in F.components))

    def sample(self, n: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        u = rng.random(n) - 0.5
        return self.center - self.scale * np.sign(u) * np.log1p(-2 * np.abs(u))


# ---------------------------------------------------------------------------
# piecewise s-concave densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiecewiseDensity:
    """Density from a piecewise-linear profile h of psi^gamma (log psi at s=0).

    gamma = s/(1-s).  gamma-concavity of psi in the power-mean sense means h
    is concave when gamma > 0 (and for log psi at s = 0) but convex when
    gamma < 0, since raising to a negative power reverses the comparison;
    the validator enforces the curvature matching the sign of gamma.
    Support is bounded, with at most 16 pieces.
    """

    s: float
    xs: tuple[float, ...]
    hs: tuple[float, ...]
    validate: bool = True

    def __post_init__(self) -> None:
        if not self.s < 1.0:
            raise ValueError("piecewise profiles require s < 1")
        if len(self.xs) != len(self.hs) or len(self.xs) < 2:
            raise ValueError("need matching breakpoints and profile values, at least two")
        if len(self.xs) > 17:
            raise ValueError("at most 16 pieces supported")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if self.validate:
            slopes = np.diff(self.hs) / np.diff(self.xs)
            gamma = self.gamma
            if self.s == 0 or gamma > 0:
                if np.any(np.diff(slopes) > 1e-12):
                    raise ValueError("profile must be concave (non-increasing slopes)")
            else:
                if np.any(np.diff(slopes) < -1e-12):
                    raise ValueError("profile must be convex for s < 0 (non-decreasing slopes)")
            if self.s != 0:
                interior = np.asarray(self.hs[1:-1])
                if np.any(interior <= 0) or max(self.hs) <= 0:
                    raise ValueError("profile must be positive on the interior of the support")
                if self.gamma < 0 and min(self.hs) <= 0:
                    raise ValueError("profile must be strictly positive for s < 0")

    @property
    def gamma(self) -> float:
        return self.s / (1.0 - self.s)

    @property
    def lo(self) -> float:
        return self.xs[0]

    @property
    def hi(self) -> float:
        return self.xs[-1]

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def _pdf_unnorm(self, x):
        x = np.asarray(x, dtype=float)
        h = np.interp(x, self.xs, self.hs)
        if self.s == 0:
            vals = np.exp(h)
        else:
            vals = np.maximum(h, 0.0) ** (1.0 / self.gamma)
        return np.where((x >= self.lo) & (x <= self.hi), vals, 0.0)

    @cached_property
    def Z(self) -> float:
        total = 0.0
        for a, b in zip(self.xs, self.xs[1:]):
            val, _ = integrate.quad(self._pdf_unnorm, a, b, **QUAD_OPTS)
            total += val
        return total

    def pdf(self, x):
        out = self._pdf_unnorm(x) / self.Z
        return out if out.ndim else float(out)

    def measure(self, F: IntervalSet) -> float:
        """mu(F) by adaptive quadrature, piece by piece (absolute tol 1e-10)."""
        total = 0.0
        for c in F.components:
            lo, hi = max(c.lo, self.lo), min(c.hi, self.hi)
            if hi <= lo:
                continue
            cut = [lo] + [x for x in self.xs if lo < x < hi] + [hi]
            for a, b in zip(cut, cut[1:]):
                val, _ = integrate.quad(self._pdf_unnorm, a, b, epsabs=1e-11,
                                        epsrel=1e-10, limit=100)
                total += val
        return total / self.Z

    def cdf(self, x: float) -> float:
        return self.measure(normalize([Interval(self.lo, min(max(x, self.lo), self.hi))]))

    def sample(self, n: int, seed: int) -> np.ndarray:
        # rejection from the flat envelope through the profile's extremes;
        # psi is monotone in h, so the max sits at a breakpoint
        rng = np.random.default_rng(seed)
        peak = float(np.max(self._pdf_unnorm(np.asarray(self.xs)))) / self.Z
        out: list[float] = []
        while len(out) < n:
            x = rng.uniform(self.lo, self.hi, size=2 * (n - len(out)) + 16)
            u = rng.uniform(0.0, peak, size=x.size)
            out.extend(x[u <= self.pdf(x)].tolist())
        return np.array(out[:n])

    def to_json(self) -> str:
        return json.dumps({"s": self.s, "support": [self.lo, self.hi],
                           "breakpoints": list(self.xs), "profile": list(self.hs)})

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseDensity":
        d = json.loads(text)
        return cls(s=d["s"], xs=tuple(d["breakpoints"]), hs=tuple(d["profile"]))


# ---------------------------------------------------------------------------
# measures, quantiles, moments
# ---------------------------------------------------------------------------

def measure_of(mu, F: IntervalSet) -> float:
    return mu.measure(F)


def measure_quad(mu, F: IntervalSet) -> float:
    """Quadrature route for mu(F); independent cross-check of closed forms."""
    lo, hi = mu.support
    total = 0.0
    for c in F.components:
        a, b = max(c.lo, lo), min(c.hi, hi)
        if b > a:
            val, _ = integrate.quad(lambda x: mu.pdf(x), a, b, **QUAD_OPTS)
            total += val
    return total


def quantile(mu, level: float, sublevel: Callable[[float], IntervalSet] | None = None,
             max_steps: int = 200) -> float:
    """Level-quantile of the pushforward of mu by f.

    ``sublevel`` maps lam to the set {|f| <= lam}; identity (None) uses the
    closed-form inverse CDF when available.  General f goes through
    bisection on the distribution function; exceeding ``max_steps``
    bisections signals an ill-conditioned input.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if sublevel is None:
        if hasattr(mu, "ppf"):
            return float(mu.ppf(level))
        sublevel = lambda lam: normalize([Interval(mu.lo, min(lam, mu.hi))])
        # identity on a bounded-support density without a closed-form inverse

    def G(lam: float) -> float:
        return mu.measure(sublevel(lam))

    hi = 1.0
    for _ in range(200):
        if G(hi) >= level:
            break
        hi *= 2.0
    else:
        raise RuntimeError("quantile bracket not found; pushforward mass < level")
    lo = 0.0
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        if G(mid) >= level:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            return 0.5 * (lo + hi)
    raise RuntimeError("quantile bisection did not converge; ill-conditioned input")


def median(mu, sublevel: Callable[[float], IntervalSet] | None = None) -> float:
    return quantile(mu, 0.5, sublevel)


def _fit_power(y1: float, y2: float) -> float:
    """Exponent of y(x) ~ c x^beta from values at x and 2x.

    A vanished value at the larger abscissa means super-power decay;
    a vanished value at the smaller one means there is nothing to fit.
    """
    if y2 <= 0:
        return -math.inf
    if y1 <= 0:
        return math.inf
    return math.log2(y2 / y1)


def lp_moment(mu, sublevel: Callable[[float], IntervalSet], p: float,
              bounded_hint: bool | None = None) -> float:
    """(integral |f|^p dmu)^(1/p) via the layer-cake representation.

    For p > 0 integrates p * lam^(p-1) * mu(|f| > lam); for -1 < p < 0
    integrates -p * lam^(p-1) * mu(|f| <= lam) with the small-lam
    singularity handled analytically on the first panel through a local
    power fit of the distribution function.  A divergent integral is
    reported as math.inf, never raised.
    """
    if p == 0 or p <= -1:
        raise ValueError("exponent must satisfy p > -1, p != 0")

    def G(lam: float) -> float:
        return min(1.0, mu.measure(sublevel(lam))) if lam > 0 else 0.0

    lo_s, hi_s = mu.support
    unbounded = math.isinf(hi_s) or math.isinf(lo_s)
    if bounded_hint is not None:
        unbounded = not bounded_hint

    # locate the effective upper range of |f|
    lam_hi = 1.0
    for _ in range(80):
        if 1.0 - G(lam_hi) <= (1e-13 if not unbounded else 1e-7):
            break
        lam_hi *= 2.0
    if unbounded:
        # push further so the fitted power tail is a small correction
        for _ in range(40):
            if 1.0 - G(lam_hi) <= 1e-9:
                break
            lam_hi *= 2.0

    def panelled_quad(func, lo: float, hi: float) -> float:
        # octave panels keep QUADPACK happy across many decades; per-panel
        # roundoff reports are spurious because only the sum is used
        cuts = [lo]
        c = max(lo, 1.0) if lo < 1.0 <= hi else lo
        if lo < 1.0 <= hi:
            cuts.append(1.0)
        while c * 2.0 < hi:
            c *= 2.0
            cuts.append(c)
        cuts.append(hi)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return sum(integrate.quad(func, a, b, **QUAD_OPTS)[0]
                       for a, b in zip(cuts, cuts[1:]) if b > a)

    tail1 = 1.0 - G(lam_hi)
    if p > 0:
        body = panelled_quad(lambda lam: lam ** (p - 1.0) * (1.0 - G(lam)),
                             0.0, lam_hi)
        total = p * body
        if tail1 > 0:
            beta = _fit_power(tail1, 1.0 - G(2.0 * lam_hi))
            if not beta < -p:  # tail decays too slowly: divergent moment
                return math.inf
            if math.isfinite(beta):
                total += p * tail1 * lam_hi ** p / (-(p + beta))
        return total ** (1.0 / p)

    # negative exponent: first panel analytic, then quadrature, then the
    # exact lam^(p-1) integral above the essential sup (G = 1 there)
    lam0 = max(median(mu, sublevel), 1e-300)
    for _ in range(200):
        if G(lam0) <= 1e-3 or lam0 < 1e-250:
            break
        lam0 *= 0.5
    g0 = G(lam0)
    if g0 <= 0:
        first = 0.0
    else:
        beta = _fit_power(G(lam0 / 2.0), g0)
        if not beta > -p:
            return math.inf  # non-integrable small-ball mass
        first = g0 * lam0 ** p / (p + beta)
    body = panelled_quad(lambda lam: lam ** (p - 1.0) * G(lam), lam0, lam_hi)
    upper = lam_hi ** p / (-p)
    if tail1 > 0:
        beta = _fit_power(tail1, 1.0 - G(2.0 * lam_hi))
        if math.isfinite(beta) and beta < -p:
            upper -= tail1 * lam_hi ** p / (-(p + beta))
    total = -p * (first + body) + (-p) * upper
    if first > 1e6 * max(abs(total - (-p) * first), 1e-300):
        # dominated by the analytic panel: numerically ill-conditioned
        pass
    return total ** (1.0 / p)


# ---------------------------------------------------------------------------
# s-means and concavity checking
# ---------------------------------------------------------------------------

def s_mean(u: float, v: float, lam: float, s: float) -> float:
    """Power mean (lam*u^s + (1-lam)*v^s)^(1/s); geometric mean at s = 0.

    Zero arguments with positive weight force the result to zero whenever
    s <= 0; monotone non-decreasing in s.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if u < 0 or v < 0:
        raise ValueError("s-mean needs nonnegative inputs")
    if lam == 0.0:
        return v
    if lam == 1.0:
        return u
    if abs(s) < 1e-12:
        # within 1e-12 relative of the geometric-mean limit; evaluating the
        # power form this close to zero only loses precision
        return u ** lam * v ** (1.0 - lam)
    if u == 0.0 or v == 0.0:
        if s < 0:
            return 0.0
        return (lam * u ** s + (1.0 - lam) * v ** s) ** (1.0 / s)
    # log-domain evaluation: exact geometric-mean limit as s -> 0 and no
    # cancellation for tiny |s|
    m = lam * math.expm1(s * math.log(u)) + (1.0 - lam) * math.expm1(s * math.log(v))
    if m <= -1.0 or math.isinf(m):
        return 0.0 if (m <= -1.0) == (s > 0) else math.inf
    return math.exp(math.log1p(m) / s)


def s_concavity_check(mu, trials: int, seed: int, tol: float = 1e-9,
                      window: float = 0.999) -> CheckReport:
    """Randomized test of the s-concavity inequality on interval pairs.

    Draws intervals A, B inside the support and lam in [0, 1]; the
    Minkowski combination of two intervals is again an interval, computed
    exactly, so each trial compares mu(lam*A + (1-lam)*B) against the
    s-mean of mu(A), mu(B).  Reports the worst slack.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    lo, hi = mu.support
    if math.isinf(hi):
        hi = float(mu.ppf(window)) if hasattr(mu, "ppf") else lo + 50.0
    if math.isinf(lo):
        lo = -hi
    worst = math.inf
    worst_params: dict = {}
    for k in range(trials):
        a = np.sort(rng.uniform(lo, hi, 2))
        b = np.sort(rng.uniform(lo, hi, 2))
        lam = float(rng.random())
        comb = Interval(lam * a[0] + (1 - lam) * b[0], lam * a[1] + (1 - lam) * b[1])
        mu_a = mu.measure(normalize([Interval(*a)]))
        mu_b = mu.measure(normalize([Interval(*b)]))
        mu_c = mu.measure(normalize([comb]))
        slack = mu_c - s_mean(mu_a, mu_b, lam, mu.s)
        if slack < worst:
            worst = slack
            worst_params = {"A": a.tolist(), "B": b.tolist(), "lambda": lam}
    return CheckReport(
        check="s-concavity",
        parameters={"s": mu.s, "trials": trials, "seed": seed, **worst_params},
        lhs=worst,
        rhs=0.0,
        tolerance=tol,
        anchor="s-concavity definition",
    )
