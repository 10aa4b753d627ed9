"""Arbitrary-precision special functions: Li2, Bloch-Wigner D, Hurwitz zeta at 2,
and Dirichlet L-values at s = 2.

Numbers are mpmath ``mpf``/``mpc`` objects. Every public function takes a
:class:`PrecisionContext` and evaluates at ``digits + guard`` decimal digits.
"""

from __future__ import annotations

import math
import re
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

import mpmath
from mpmath import mpc, mpf

DEFAULT_DIGITS = 38
DIGITS_ENV_VAR = "BLOCH_K2_DIGITS"

MAX_SERIES_TERMS = 100_000


class PrecisionError(ArithmeticError):
    """A series or transform failed to reach the requested precision."""


@dataclass(frozen=True)
class PrecisionContext:
    digits: int = DEFAULT_DIGITS
    guard: int = 8

    def __post_init__(self):
        if self.digits < 15:
            raise ValueError(f"digits must be >= 15, got {self.digits}")
        if self.guard < 1:
            raise ValueError(f"guard must be positive, got {self.guard}")

    @property
    def working_digits(self) -> int:
        return self.digits + self.guard

    @property
    def eps(self) -> mpf:
        """Target absolute error at working precision."""
        return mpf(10) ** (-self.working_digits)

    @property
    def tolerance(self) -> float:
        """Tolerance for reported values (``10**-digits``)."""
        return 10.0 ** (-self.digits)

    def workdps(self):
        return mpmath.workdps(self.working_digits)

    @classmethod
    def from_env(cls) -> "PrecisionContext":
        raw = os.environ.get(DIGITS_ENV_VAR)
        return cls(int(raw)) if raw else cls()


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"^[+-]?{_NUM}$")
_IMAG_RE = re.compile(rf"^(?P<im>[+-]?(?:{_NUM})?)[ij]$")
_BOTH_RE = re.compile(rf"^(?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?)[ij]$")


def _imag_coeff(text: str) -> mpf:
    if text in ("", "+"):
        return mpf(1)
    if text == "-":
        return mpf(-1)
    return mpf(text)


def _parse_complex(text: str) -> mpc:
    """Parse "a", "bi" or "a+bi" (i or j), keeping decimal strings exact to
    the current precision."""
    t = text.replace(" ", "")
    if _REAL_RE.match(t):
        return mpc(mpf(t), 0)
    m = _IMAG_RE.match(t)
    if m:
        return mpc(0, _imag_coeff(m["im"]))
    m = _BOTH_RE.match(t)
    if m:
        return mpc(mpf(m["re"]), _imag_coeff(m["im"]))
    raise ValueError(f"cannot parse complex number {text!r}")


def to_complex(z, ctx: PrecisionContext | None = None) -> mpc:
    """Coerce numbers, tuples ``(re, im)`` and strings like ``"0.5+0.5i"``."""
    if isinstance(z, tuple):
        return mpc(mpf(z[0]), mpf(z[1]))
    if isinstance(z, str):
        return _parse_complex(z)
    if isinstance(z, Fraction):
        return mpc(mpf(z.numerator) / z.denominator)
    return mpc(z)


# ---------------------------------------------------------------------------
# Dilogarithm
# ---------------------------------------------------------------------------

@dataclass
class Li2Result:
    value: mpc
    on_cut: bool = False


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> Fraction:
    p, q = mpmath.bernfrac(n)
    return Fraction(int(p), int(q))


def _li2_series(z: mpc, eps: mpf) -> mpc:
    """|z| <= 1/2: power series in u = -log(1 - z).

    Li2(z) = sum_{n>=0} B_n u^(n+1) / (n+1)!, with |u| <= log 2 the terms fall
    like (|u|/2pi)^n, about five times fewer than the plain series in z.
    """
    if z == 0:
        return mpc(0)
    u = -mpmath.log(1 - z)
    ratio = abs(u) / (2 * mpmath.pi)
    # B_0 u + B_1 u^2 / 2
    total = u - u * u / 4
    u2 = u * u
    upow = u * u2  # u^(n+1) for n = 2, 4, 6, ...
    fact = mpf(6)  # (n+1)!
    n = 2
    while n < MAX_SERIES_TERMS:
        b = _bernoulli(n)
        total += mpf(b.numerator) / b.denominator * upow / fact
        # |B_m| / (m+1)! <= 4 / (2 pi)^m for the remaining even m
        if 4 * abs(u) * ratio ** (n + 2) / (1 - ratio * ratio) < eps:
            return total
        upow *= u2
        fact *= (n + 2) * (n + 3)
        n += 2
    raise PrecisionError("Li2 series did not converge")


def _li2_log_series(z: mpc, eps: mpf) -> mpc:
    """Expansion in w = log z around z = 1, valid for |w| < 2*pi.

    Li2(e^w) = zeta(2) + w (1 - log(-w)) + sum_{k>=2} zeta(2-k) w^k / k!
    with zeta(-m) = -B_{m+1}/(m+1); only odd m contribute.
    """
    w = mpmath.log(z)
    if w == 0:
        return mpc(mpmath.pi ** 2 / 6)
    total = mpmath.pi ** 2 / 6 + w * (1 - mpmath.log(-w))
    # k = 2: zeta(0) = -1/2
    total += -w * w / 4
    aw = abs(w)
    ratio = aw / (2 * mpmath.pi)
    if ratio >= 1:
        raise PrecisionError("log-series outside its disc of convergence")
    w2 = w * w
    wk = w * w2  # w^k for k = 3, 5, 7, ...
    fact = mpf(6)  # k!
    k = 3
    while k < MAX_SERIES_TERMS:
        # odd k: zeta(2-k) = -B_{k-1}/(k-1); even k >= 4 vanish
        b = _bernoulli(k - 1)
        zeta_val = -mpf(b.numerator) / b.denominator / (k - 1)
        term = zeta_val * wk / fact
        total += term
        # |zeta(1-k)| / k! <= 4 / (2 pi)^k  ->  geometric tail bound
        if 4 * ratio ** (k + 2) / (1 - ratio * ratio) < eps:
            return total
        wk *= w2
        fact *= (k + 1) * (k + 2)
        k += 2
    raise PrecisionError("Li2 log-series did not converge")


def li2(z, ctx: PrecisionContext | None = None) -> Li2Result:
    """Principal dilogarithm Li2(z), continuous on C minus [1, inf).

    Points on the cut (real z > 1) get the limit from Im z -> 0- and
    ``on_cut`` is set.
    """
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        z = to_complex(z)
        eps = ctx.eps / 10
        on_cut = z.imag == 0 and z.real > 1
        return Li2Result(_li2(z, eps), on_cut)


def _li2(z: mpc, eps: mpf) -> mpc:
    if z == 0:
        return mpc(0)
    if z == 1:
        return mpc(mpmath.pi ** 2 / 6)
    r = abs(z)
    if r <= 0.5:
        return _li2_series(z, eps)
    if abs(1 - z) <= 0.5:
        # reflection: Li2(z) = pi^2/6 - log z log(1-z) - Li2(1-z)
        return mpmath.pi ** 2 / 6 - mpmath.log(z) * mpmath.log(1 - z) - _li2_series(1 - z, eps)
    if r >= 2:
        # inversion: Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
        # principal log(-z) reproduces the Im z -> 0- limit on the cut
        if z.imag == 0:
            # 1/z is real and lies in (0, 1/2]: no cut ambiguity
            inner = _li2_series(1 / z, eps)
        else:
            inner = _li2(1 / z, eps)
        return -inner - mpmath.pi ** 2 / 6 - mpmath.log(-z) ** 2 / 2
    return _li2_log_series(z, eps)


def bloch_wigner(z, ctx: PrecisionContext | None = None) -> mpf:
    """D(z) = Im Li2(z) + arg(1 - z) log|z|; zero on the real line."""
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        z = to_complex(z)
        if z.imag == 0:
            return mpf(0)
        if abs(z) > 1:
            # D(1/z) = -D(z); keeps Li2 evaluation in the unit disc
            return -_bloch_wigner_disc(1 / z, ctx.eps / 10)
        return _bloch_wigner_disc(z, ctx.eps / 10)


def _bloch_wigner_disc(z: mpc, eps: mpf) -> mpf:
    return _li2(z, eps).imag + mpmath.arg(1 - z) * mpmath.log(abs(z))


# ---------------------------------------------------------------------------
# Hurwitz zeta at s = 2
# ---------------------------------------------------------------------------

def _em_parameters(dps: int) -> Tuple[int, int]:
    # Choose N, K so |B_{2K+2}| (N+x)^{-2K-3} < 10^-dps, with N >= 1.
    target = dps * math.log(10)
    n_start = max(10, dps)
    for k in range(1, 400):
        b = _bernoulli(2 * k + 2)
        log_b = math.log(abs(b.numerator)) - math.log(b.denominator)
        if log_b - (2 * k + 3) * math.log(n_start) < -target:
            return n_start, k
    raise PrecisionError("could not choose Euler-Maclaurin parameters")


def hurwitz_zeta2_with_bound(x, ctx: PrecisionContext | None = None) -> Tuple[mpf, mpf]:
    """Return (zeta(2, x), remainder bound) via Euler-Maclaurin."""
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        if isinstance(x, Fraction):
            x = mpf(x.numerator) / x.denominator
        x = mpf(x)
        if not 0 < x <= 1:
            raise ValueError(f"hurwitz_zeta2 needs 0 < x <= 1, got {x}")
        big_n, k_max = _em_parameters(ctx.working_digits + 2)
        head = mpmath.fsum((n + x) ** -2 for n in range(big_n))
        a = big_n + x
        tail = 1 / a + 1 / (2 * a * a)
        apow = a ** 3
        for k in range(1, k_max + 1):
            b = _bernoulli(2 * k)
            tail += mpf(b.numerator) / b.denominator / apow
            apow *= a * a
        b_next = _bernoulli(2 * k_max + 2)
        bound = abs(mpf(b_next.numerator) / b_next.denominator) / apow
        return head + tail, bound


def hurwitz_zeta2(x, ctx: PrecisionContext | None = None) -> mpf:
    return hurwitz_zeta2_with_bound(x, ctx)[0]


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------

def _factor(n: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _primitive_root(p: int) -> int:
    phi = p - 1
    primes = list(_factor(phi))
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in primes):
            return g
    raise ValueError(f"no primitive root mod {p}")


def _discrete_log(a: int, g: int, m: int, order: int) -> int:
    x = 1
    for e in range(order):
        if x == a % m:
            return e
        x = x * g % m
    raise ValueError(f"{a} not a power of {g} mod {m}")


@dataclass(frozen=True)
class _Component:
    """A cyclic factor of (Z/q)^x: generator g (mod q) of the given order,
    together with its prime-power modulus used for discrete logs."""

    prime_power: int
    generator: int
    order: int
    # residues are logged modulo prime_power against `local_generator`
    local_generator: int


@lru_cache(maxsize=None)
def unit_group_generators(q: int) -> Tuple[_Component, ...]:
    """Fixed generators of (Z/q)^x, lifted to residues mod q by CRT."""
    if q < 1:
        raise ValueError("modulus must be positive")
    comps: List[_Component] = []
    for p, k in sorted(_factor(q).items()):
        pk = p ** k
        rest = q // pk
        local: List[Tuple[int, int]] = []
        if p == 2:
            if k == 2:
                local.append((pk - 1, 2))
            elif k >= 3:
                local.append((pk - 1, 2))
                local.append((5, pk // 4))
        else:
            g = _primitive_root(p)
            if k > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            local.append((g, pk - pk // p))
        for g_local, order in local:
            # CRT lift: g mod pk, 1 mod rest
            if rest == 1:
                g_full = g_local % q
            else:
                inv = pow(rest, -1, pk)
                g_full = (1 + (g_local - 1) * rest * inv) % q
            comps.append(_Component(pk, g_full, order, g_local))
    return tuple(comps)


def _component_log(a: int, comp: _Component, comps: Tuple[_Component, ...]) -> int:
    pk = comp.prime_power
    if pk % 2 == 0 and pk >= 8:
        # (Z/2^k)^x = <-1> x <5>
        sign_comp = comp.local_generator == pk - 1
        a_local = a % pk
        sign = 0 if a_local % 4 == 1 else 1
        if sign_comp:
            return sign
        a_pos = a_local if sign == 0 else (-a_local) % pk
        return _discrete_log(a_pos, 5, pk, comp.order)
    return _discrete_log(a % pk, comp.local_generator, pk, comp.order)


@dataclass(frozen=True)
class DirichletCharacter:
    """chi(g_i) = exp(2 pi i e_i / ord(g_i)) on the fixed generators of (Z/q)^x."""

    modulus: int
    generator_exponents: Tuple[int, ...]

    def __post_init__(self):
        comps = unit_group_generators(self.modulus)
        if len(comps) != len(self.generator_exponents):
            raise ValueError(
                f"modulus {self.modulus} has {len(comps)} generators, "
                f"got {len(self.generator_exponents)} exponents")
        reduced = tuple(e % c.order for e, c in zip(self.generator_exponents, comps))
        object.__setattr__(self, "generator_exponents", reduced)

    @property
    def generators(self) -> Tuple[int, ...]:
        return tuple(c.generator for c in unit_group_generators(self.modulus))

    @property
    def order(self) -> int:
        out = 1
        for e, c in zip(self.generator_exponents, unit_group_generators(self.modulus)):
            out = math.lcm(out, c.order // math.gcd(e, c.order))
        return out

    def phase(self, a: int) -> Fraction | None:
        """chi(a) as a fraction of a full turn in [0, 1), or None when gcd(a, q) > 1."""
        q = self.modulus
        if math.gcd(a, q) != 1:
            return None
        comps = unit_group_generators(q)
        turn = Fraction(0)
        for e, c in zip(self.generator_exponents, comps):
            turn += Fraction(e * _component_log(a, c, comps), c.order)
        return turn - math.floor(turn)

    def value(self, a: int, ctx: PrecisionContext | None = None) -> mpc:
        ph = self.phase(a)
        if ph is None:
            return mpc(0)
        ctx = ctx or PrecisionContext()
        with ctx.workdps():
            if ph == 0:
                return mpc(1)
            if ph == Fraction(1, 2):
                return mpc(-1)
            return mpmath.expjpi(2 * mpf(ph.numerator) / ph.denominator)

    @property
    def parity(self) -> str:
        if self.modulus <= 2:
            return "even"
        return "even" if self.phase(self.modulus - 1) == 0 else "odd"

    @property
    def is_odd(self) -> bool:
        return self.parity == "odd"

    @property
    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.generator_exponents)

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    @classmethod
    def trivial(cls, q: int = 1) -> "DirichletCharacter":
        return cls(q, tuple(0 for _ in unit_group_generators(q)))


def characters_mod(q: int) -> List[DirichletCharacter]:
    """All characters mod q in a fixed lexicographic order of exponent vectors."""
    comps = unit_group_generators(q)
    out = [()]
    for c in comps:
        out = [v + (e,) for v in out for e in range(c.order)]
    return [DirichletCharacter(q, v) for v in out]


def dirichlet_L2(chi: DirichletCharacter, ctx: PrecisionContext | None = None) -> mpc:
    """L(chi, 2) = q^-2 sum_{a=1}^{q} chi(a) zeta(2, a/q)."""
    return dirichlet_L2_with_bound(chi, ctx)[0]


def dirichlet_L2_with_bound(chi: DirichletCharacter,
                            ctx: PrecisionContext | None = None) -> Tuple[mpc, mpf]:
    ctx = ctx or PrecisionContext()
    q = chi.modulus
    with ctx.workdps():
        total = mpc(0)
        bound = mpf(0)
        for a in range(1, q + 1):
            c = chi.value(a, ctx)
            if c == 0:
                continue
            h, b = hurwitz_zeta2_with_bound(Fraction(a, q), ctx)
            total += c * h
            bound += b
        total /= q * q
        bound /= q * q
        if chi.is_real:
            total = mpc(total.real)
        return total, bound
