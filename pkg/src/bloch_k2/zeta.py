"""Dedekind zeta values at s = 2 and their transport to s = -1.

The sieve route builds the Dirichlet coefficients a_m (number of ideals of
norm m) from the splitting type of every prime p <= M and sums a_m / m^2.
The error is bounded rigorously: the partial sum is a lower bound for
zeta_F(2), and the truncated Euler product times a bound for the primes
above M is an upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import mpmath
import numba
import numpy as np
import sympy
from mpmath import mpf

from .apnum import PrecisionContext, characters_mod, dirichlet_L2_with_bound
from .nfield import NumberField, cyclotomic_field

_X = sympy.Symbol("x")

DEFAULT_TERMS = 10_000_000
MIN_TERMS = 1000
MAX_TERMS = 200_000_000

# relative slack covering float64 rounding in the sieve sum and the
# log-space Euler product
_FLOAT_SLACK = 1e-12


class TermBudgetError(MemoryError):
    """Requested number of terms is outside the supported range."""


@dataclass(frozen=True)
class ZetaResult:
    value: mpf
    terms_used: int
    tail_bound: mpf
    method: str
    details: Dict = field(default_factory=dict, compare=False)

    def to_json(self, digits: int = 20) -> Dict:
        return {
            "value": mpmath.nstr(self.value, digits),
            "tail_bound": mpmath.nstr(self.tail_bound, 6),
            "terms_used": self.terms_used,
            "method": self.method,
        }


@dataclass(frozen=True)
class TransportFactor:
    """zeta_F(2) = 2^two_exp * pi^pi_exp * |d_F|^(-disc_exp) * rational_factor * |zeta*_F(-1)|."""

    two_exp: int
    pi_exp: int
    disc_exp: Fraction
    rational_factor: Fraction
    order_of_vanishing: int

    def multiplier(self, disc: int, ctx: PrecisionContext | None = None) -> mpf:
        """The number c with zeta_F(2) = c * |zeta*_F(-1)|."""
        ctx = ctx or PrecisionContext()
        with ctx.workdps():
            d = mpf(abs(disc))
            q = self.rational_factor
            return (mpf(2) ** self.two_exp * mpmath.pi ** self.pi_exp
                    * d ** (-mpf(self.disc_exp.numerator) / self.disc_exp.denominator)
                    * mpf(q.numerator) / q.denominator)

    def to_minus1(self, zeta2, disc: int, ctx: PrecisionContext | None = None) -> mpf:
        ctx = ctx or PrecisionContext()
        with ctx.workdps():
            return mpf(zeta2) / self.multiplier(disc, ctx)

    def to_json(self) -> Dict:
        return {
            "two_exp": self.two_exp,
            "pi_exp": self.pi_exp,
            "disc_exp": str(self.disc_exp),
            "rational_factor": str(self.rational_factor),
            "order_of_vanishing": self.order_of_vanishing,
        }


def transport_to_minus1(F: NumberField) -> TransportFactor:
    """Constants relating zeta_F(2) to the leading coefficient at s = -1.

    From Lambda(s) = Lambda(1 - s) with Gamma_R(s) = pi^(-s/2) Gamma(s/2),
    Gamma_C(s) = 2 (2 pi)^(-s) Gamma(s): at s = -1 each real place gives
    |pi^(1/2) Gamma(-1/2)| = 2 pi and each complex place a simple pole of
    Gamma with residue of absolute value 1, so zeta_F vanishes to order r2.
    """
    r1, r2 = F.signature
    return TransportFactor(r1 + 3 * r2, 2 * r1 + 3 * r2, Fraction(3, 2), Fraction(1), r2)


# ---------------------------------------------------------------------------
# splitting types
# ---------------------------------------------------------------------------

def euler_factor_degrees(F: NumberField, p: int) -> List[int]:
    """Residue degrees of the primes above p, one per distinct irreducible
    factor of the defining polynomial mod p (sorted)."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if F.poly_disc % (p * p) == 0 and p not in F.maximality_cert:
        raise ValueError(f"index divisor {p} is not supported")
    fp = sympy.Poly(list(reversed(F.defining_poly)), _X, modulus=p)
    _, factors = fp.factor_list()
    return sorted(int(g.degree()) for g, _ in factors)


def _local_coefficients(degrees: Sequence[int], kmax: int) -> List[int]:
    """Coefficients of prod_i (1 - T^f_i)^-1 up to T^kmax."""
    c = [1] + [0] * kmax
    for f in degrees:
        for k in range(f, kmax + 1):
            c[k] += c[k - f]
    return c


# ---------------------------------------------------------------------------
# compiled kernels
# ---------------------------------------------------------------------------

@numba.njit(cache=True)
def _spf_sieve(n):
    spf = np.zeros(n + 1, dtype=np.int32)
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = i
            if i * i <= n:
                for j in range(i * i, n + 1, i):
                    if spf[j] == 0:
                        spf[j] = i
    return spf


@numba.njit(cache=True)
def _powmod_int(b, e, m):
    r = 1
    b %= m
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


@numba.njit(cache=True)
def _polymulmod(a, b, f, p):
    # a, b of length n (degree < n); f monic of length n + 1
    n = f.shape[0] - 1
    prod = np.zeros(2 * n - 1, dtype=np.int64)
    for i in range(n):
        if a[i] == 0:
            continue
        for j in range(n):
            prod[i + j] = (prod[i + j] + a[i] * b[j]) % p
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k]
        if c != 0:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * f[i]) % p
    return prod[:n].copy()


@numba.njit(cache=True)
def _poly_degree(a):
    for i in range(a.shape[0] - 1, -1, -1):
        if a[i] != 0:
            return i
    return -1


@numba.njit(cache=True)
def _gcd_degree(a, b, p):
    """Degree of gcd(a, b) over F_p; arrays are modified."""
    da = _poly_degree(a)
    db = _poly_degree(b)
    while db >= 0:
        inv = _powmod_int(b[db], p - 2, p)
        while da >= db:
            c = a[da] * inv % p
            for i in range(db + 1):
                a[da - db + i] = (a[da - db + i] - c * b[i]) % p
            da = _poly_degree(a)
            if da < 0:
                break
        a, b = b, a
        da, db = db, da
    return da


@numba.njit(cache=True)
def _count_roots(f, p):
    """Number of distinct roots of monic f (ascending, int64) in F_p."""
    n = f.shape[0] - 1
    if n == 1:
        return 1
    fm = np.empty(n + 1, dtype=np.int64)
    for i in range(n + 1):
        fm[i] = f[i] % p
    # x^p mod f by square and multiply
    r = np.zeros(n, dtype=np.int64)
    r[0] = 1
    base = np.zeros(n, dtype=np.int64)
    base[1] = 1
    e = p
    while e > 0:
        if e & 1:
            r = _polymulmod(r, base, fm, p)
        base = _polymulmod(base, base, fm, p)
        e >>= 1
    g = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        g[i] = r[i]
    g[1] = (g[1] - 1) % p
    if _poly_degree(g) < 0:
        return n
    h = fm.copy()
    return _gcd_degree(h, g, p)


@numba.njit(cache=True)
def _linear_counts(f, spf, n_limit, special):
    """a_p = number of roots mod p for every prime p <= n_limit that is not
    flagged in ``special``; entries for other indices stay 0."""
    out = np.zeros(n_limit + 1, dtype=np.int8)
    for p in range(2, n_limit + 1):
        if spf[p] == p and special[p] == 0:
            out[p] = _count_roots(f, p)
    return out


@numba.njit(cache=True)
def _build_coefficients(spf, a_prime, small_index, small_table):
    n_limit = spf.shape[0] - 1
    a = np.zeros(n_limit + 1, dtype=np.int64)
    a[1] = 1
    for m in range(2, n_limit + 1):
        p = spf[m]
        q = m
        k = 0
        while q % p == 0:
            q //= p
            k += 1
        row = small_index[p]
        if row >= 0:
            loc = small_table[row, k]
        elif k == 1:
            loc = a_prime[p]
        else:
            loc = 0
        a[m] = a[q] * loc
    return a


@numba.njit(cache=True)
def _dirichlet_sum(a):
    # descending order keeps the small terms from being swamped
    s = 0.0
    comp = 0.0
    for m in range(a.shape[0] - 1, 0, -1):
        if a[m] == 0:
            continue
        y = a[m] / (float(m) * float(m)) - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


@numba.njit(cache=True)
def _log_euler_upper(spf, a_prime, special, n):
    """sum over unflagged primes of an upper bound for log L_p(2) given only
    the number r of degree-one primes: the rest have degree >= 2."""
    total = 0.0
    for p in range(2, spf.shape[0]):
        if spf[p] == p and special[p] == 0:
            r = a_prime[p]
            x = 1.0 / (float(p) * float(p))
            total += -r * math.log1p(-x) - 0.5 * (n - r) * math.log1p(-x * x)
    return total


# ---------------------------------------------------------------------------
# sieve route
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _sieve(poly: Tuple[int, ...], disc_primes: Tuple[int, ...], M: int):
    n = len(poly) - 1
    spf = _spf_sieve(M)
    root = math.isqrt(M)
    small = [p for p in sympy.primerange(2, root + 1)]
    small += [p for p in disc_primes if p > root and p <= M]
    special = np.zeros(M + 1, dtype=np.int8)
    small_index = np.full(M + 1, -1, dtype=np.int32)
    kmax = max(1, int(math.log2(M)) + 1)
    table = np.zeros((len(small), kmax + 1), dtype=np.int64)
    log_small = 0.0
    f_sym = sympy.Poly(list(reversed(poly)), _X)
    for row, p in enumerate(small):
        fp = sympy.Poly(f_sym.as_expr(), _X, modulus=p)
        degrees = [int(g.degree()) for g, _ in fp.factor_list()[1]]
        table[row] = _local_coefficients(degrees, kmax)
        special[p] = 1
        small_index[p] = row
        log_small += sum(-math.log1p(-float(p) ** (-2 * d)) for d in degrees)
    f = np.array(poly, dtype=np.int64)
    a_prime = _linear_counts(f, spf, M, special)
    a = _build_coefficients(spf, a_prime, small_index, table)
    partial = _dirichlet_sum(a)
    log_upper = log_small + _log_euler_upper(spf, a_prime, special, n)
    # primes above M: prod (1 - p^-2)^-n <= exp(n sum_{m > M} 1/(m^2 - 1)) <= exp(n / M)
    upper = math.exp(log_upper + n / M)
    return partial, upper


def dedekind_zeta2(F: NumberField, M: int = DEFAULT_TERMS,
                   ctx: PrecisionContext | None = None) -> ZetaResult:
    """zeta_F(2) by summing a_m / m^2 for m <= M with a rigorous error bound."""
    ctx = ctx or PrecisionContext()
    if M < MIN_TERMS:
        raise ValueError(f"terms must be at least {MIN_TERMS}")
    if M > MAX_TERMS:
        raise TermBudgetError(f"terms above {MAX_TERMS} exceed the memory budget")
    disc_primes = tuple(sorted(sympy.factorint(abs(F.poly_disc)))) if F.degree > 1 else ()
    partial, upper = _sieve(tuple(F.defining_poly), disc_primes, int(M))
    slack = _FLOAT_SLACK * upper
    with ctx.workdps():
        value = mpf(partial)
        bound = mpf(max(upper - partial, 0.0) + 2 * slack)
    return ZetaResult(value, int(M), bound, "dirichlet_sieve",
                      {"upper": upper})


# ---------------------------------------------------------------------------
# character route
# ---------------------------------------------------------------------------

def cyclotomic_zeta2(p: int, ctx: PrecisionContext | None = None,
                     parity: str = "all") -> ZetaResult:
    """zeta(2) of Q(zeta_p) as a product of L(chi, 2) over characters mod p.

    Every nontrivial character mod a prime is primitive, and the trivial one
    contributes the full Riemann zeta(2): p is totally ramified with a single
    prime of norm p above it, whose local factor is exactly the one ζ(2)
    carries. ``parity="even"`` gives the maximal real subfield instead.
    """
    if p < 3 or not sympy.isprime(p):
        raise ValueError("p must be an odd prime")
    if parity not in ("all", "even", "odd"):
        raise ValueError("parity must be all, even or odd")
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        factors = []
        for chi in characters_mod(p):
            if parity == "even" and chi.is_odd:
                continue
            if parity == "odd" and not chi.is_odd:
                continue
            if chi.is_trivial:
                factors.append((mpmath.zeta(2), mpf(0)))
                continue
            val, b = dirichlet_L2_with_bound(chi, ctx)
            factors.append((val, b))
        value = mpmath.mpc(1)
        upper = mpf(1)
        lower_abs = mpf(1)
        for val, b in factors:
            value *= val
            upper *= abs(val) + b + ctx.eps
            lower_abs *= abs(val)
        bound = upper - lower_abs
        value = abs(value) if parity != "odd" else value.real
    return ZetaResult(value, 0, bound, "character_product",
                      {"p": p, "parity": parity, "characters": len(factors)})


def real_cyclotomic_zeta2(p: int, ctx: PrecisionContext | None = None) -> ZetaResult:
    return cyclotomic_zeta2(p, ctx, parity="even")


def zeta_minus1(F: NumberField, zeta2: ZetaResult,
                ctx: PrecisionContext | None = None) -> Tuple[mpf, mpf]:
    """|zeta*_F(-1)| and its error bound from a value at s = 2."""
    ctx = ctx or PrecisionContext()
    t = transport_to_minus1(F)
    with ctx.workdps():
        c = t.multiplier(F.disc, ctx)
        return zeta2.value / c, zeta2.tail_bound / c


def cyclotomic_field_zeta2(p: int, M: int, ctx: PrecisionContext | None = None) -> ZetaResult:
    """Sieve value for Q(zeta_p), used as the independent route."""
    return dedekind_zeta2(cyclotomic_field(p), M, ctx)
