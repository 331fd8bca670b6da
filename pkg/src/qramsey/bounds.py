"""Closed-form constants, thresholds and tail bounds.

Every evaluator is total on its stated domain: hypotheses that only matter
for the asymptotic statements are reported through ``in_hypothesis`` flags
rather than refused.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb, exp, log, sqrt
from typing import Callable, Sequence

from .hypercore import InputError


@dataclass(frozen=True)
class LemmaConstants:
    r: int
    c_r: float
    d_r: float
    c_prime_r: float | None = None
    d_prime_r: float | None = None
    C_thm3: float | None = None
    D_thm3: float | None = None
    d_prev_unclamped: float | None = None
    d_prev_clamped: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def _lemma2_chain(r: int) -> list[tuple[float, float]]:
    """[(c_1, d_1), ..., (c_r, d_r)] from the partite counting recursion."""
    chain = [(0.25, 0.125)]
    for _ in range(2, r + 1):
        c_prev, d_prev = chain[-1]
        d = d_prev / math.e
        chain.append((c_prev * sqrt(d / 32), d / 16))
    return chain


def lemma_constants(r: int) -> LemmaConstants:
    if r < 1:
        raise InputError("r must be >= 1")
    chain = _lemma2_chain(r)
    c_r, d_r = chain[-1]
    if r == 1:
        return LemmaConstants(1, c_r, d_r)
    c, d_raw = chain[r - 2]
    d = min(d_raw, 8 / r)
    c_prime = c * d / (4 * r ** ((r - 1) / 2) + 1)
    d_prime = d / (r + 1)
    return LemmaConstants(r, c_r, d_r, c_prime, d_prime, c_prime / 2 ** r, d_prime,
                          d_raw, d)


@dataclass(frozen=True)
class BoundValue:
    value: float
    in_hypothesis: bool = True
    note: str = ""


def theorem3_lower_bound(n: int, t: float, p, r: int) -> BoundValue:
    """C min(p, 1-p) t^((r+1)/2) sqrt(ln(n/t))."""
    if t > n:
        raise InputError(f"t={t} exceeds n={n}")
    if t <= 0:
        raise InputError("t must be positive")
    k = lemma_constants(r)
    p = float(Fraction(p))
    val = k.C_thm3 * min(p, 1 - p) * t ** ((r + 1) / 2) * sqrt(log(n / t))
    ok = log(n) / k.D_thm3 <= t and 0 < p < 1
    note = "" if ok else "outside (ln n)/D <= t <= n or p not in (0,1)"
    return BoundValue(val, ok, note)


def rate_function_eval(rho, x) -> float:
    """Bernoulli(rho) large-deviation rate; +inf outside [0, 1]."""
    rho = float(Fraction(rho)) if not isinstance(rho, float) else rho
    x = float(x)
    if not 0 < rho < 1:
        raise InputError("rho must lie in (0,1)")
    if x < 0 or x > 1:
        return math.inf
    if x == 0:
        return -log(1 - rho)
    if x == 1:
        return -log(rho)
    return x * log(x / rho) + (1 - x) * log((1 - x) / (1 - rho))


def density_tail_bound(k: int, r: int, rho, t_deg) -> float:
    """Upper bound on P(avg degree of the random hypergraph on k vertices >= t_deg)."""
    rho_q = Fraction(rho)
    t_q = Fraction(t_deg) if not isinstance(t_deg, float) else t_deg
    if k < r:
        raise InputError("need k >= r")
    top = comb(k - 1, r - 1)
    if t_q < rho_q * top:
        raise InputError("t_deg below the mean degree; no bound claimed")
    if t_q == top:
        # tight endpoint: the bound is exactly rho^C(k,r)
        return float(rho_q ** comb(k, r))
    return exp(-comb(k, r) * rate_function_eval(float(rho_q), float(Fraction(t_q) / top)))


def exact_density_tail(k: int, r: int, rho, t_deg) -> Fraction:
    """P(avg degree >= t_deg) exactly, by summing the edge-count binomial."""
    rho = Fraction(rho)
    N = comb(k, r)
    # avg degree = r e / k
    need = Fraction(t_deg) * k / r
    total = Fraction(0)
    for e in range(N + 1):
        if e >= need:
            total += comb(N, e) * rho ** e * (1 - rho) ** (N - e)
    return total


def sampling_tail_bound(sample_n: int, r: int, eps: float) -> float:
    """exp(-2 eps^2 (n - 2(r-1)) / r^2) for a uniform n-subset."""
    if sample_n <= 2 * (r - 1):
        raise InputError("sample size must exceed 2(r-1)")
    if eps <= 0:
        raise InputError("eps must be positive")
    return exp(-2 * eps ** 2 * (sample_n - 2 * (r - 1)) / r ** 2)


NuFn = Callable[[int], float]


def as_nu_fn(nu) -> NuFn:
    if callable(nu):
        return nu
    val = float(nu)
    return lambda ell: val


def check_nu_fn(nu_fn: NuFn, lo: int, hi: int) -> None:
    prev = None
    for ell in range(lo, hi + 1):
        v = nu_fn(ell)
        if v < 0:
            raise InputError(f"nu({ell}) = {v} is negative")
        if prev is not None and v < prev:
            raise InputError(f"nu is decreasing at {ell}")
        prev = v


def avg_degree_threshold_parts(ell: int, r: int, rho_i, nu_value: float) -> tuple[Fraction, float]:
    """(rational part, irrational part) of the average-degree threshold."""
    top = comb(ell - 1, r - 1)
    return Fraction(rho_i) * top, nu_value * sqrt(r * top * log(ell))


def avg_degree_threshold(ell: int, r: int, rho_i, nu_fn=0.0) -> float:
    """rho_i C(ell-1, r-1) + nu(ell) sqrt(r C(ell-1, r-1) ln ell)."""
    if ell < 2:
        raise InputError("ell must be >= 2")
    nu_fn = as_nu_fn(nu_fn)
    check_nu_fn(nu_fn, 2, ell)
    rat, irr = avg_degree_threshold_parts(ell, r, rho_i, nu_fn(ell))
    return float(rat) + irr


def lower_bound_instance_size(k: int, nu_k: float, eta: float) -> int:
    """floor(k^(nu^2 + 1) / (eta e)); values below 1 are degenerate."""
    if eta <= 1:
        raise InputError("eta must exceed 1")
    if k < 2:
        raise InputError("k must be >= 2")
    return math.floor(k ** (nu_k ** 2 + 1) / (eta * math.e))


@dataclass(frozen=True)
class UpperBoundSize:
    exponent: float
    C: float
    log_size: float
    size: float


def upper_bound_instance_size(k: int, nu: float, eps: float, r: int,
                              rho: Sequence) -> UpperBoundSize:
    """k^(nu^2 C^2 (1+eps) + 2r/(r+1)) with C = max_j 1/(c rho_j)."""
    if eps <= 0:
        raise InputError("eps must be positive")
    c = lemma_constants(r).C_thm3
    # c underflows to 0.0 for large r
    C = max(1 / (c * float(Fraction(x))) if c else math.inf for x in rho)
    expo = (nu ** 2 * C ** 2 * (1 + eps) if nu else 0.0) + 2 * r / (r + 1)
    log_size = expo * log(k)
    size = math.exp(log_size) if log_size < 700 else math.inf
    return UpperBoundSize(expo, C, log_size, size)
