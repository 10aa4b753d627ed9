"""Exact arithmetic in number fields Q[x]/(f) and their complex embeddings.

Elements are vectors of ``Fraction`` over the power basis 1, a, ..., a^(n-1).
Embeddings are refined to the requested precision on demand and cached.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import sympy
from mpmath import mpc, mpf

from .apnum import PrecisionContext, PrecisionError
from .lattice import lll

_X = sympy.Symbol("x")


class FieldError(ValueError):
    """Invalid field definition (reducible, non-monic, malformed)."""


class NonMaximalOrderError(FieldError):
    """Z[a] fails Dedekind's criterion at some prime; the field is unsupported."""

    def __init__(self, prime: int):
        super().__init__(f"Z[a] is not maximal at p = {prime}; field discriminant unsupported")
        self.prime = prime


# ---------------------------------------------------------------------------
# polynomial helpers over Q, ascending coefficient lists
# ---------------------------------------------------------------------------

def _trim(p: List[Fraction]) -> List[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmul(a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _psub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _pdivmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, y in enumerate(b):
            a[i + shift] -= c * y
        _trim(a)
    return _trim(q), a


def _preduce(a: Sequence[Fraction], f: Sequence[Fraction]) -> List[Fraction]:
    return _pdivmod(a, f)[1]


def _pinverse_mod(a: Sequence[Fraction], f: Sequence[Fraction]) -> List[Fraction]:
    """Inverse of a modulo f by the extended Euclidean algorithm."""
    r0, r1 = list(f), _trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible")
    c = r0[0]
    return [x / c for x in s0]


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldElement:
    field: "NumberField"
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.field.degree:
            raise ValueError("coordinate vector has wrong length")

    # construction -------------------------------------------------------
    def _new(self, poly: Sequence[Fraction]) -> "FieldElement":
        return self.field.element(_preduce(poly, self.field._fpoly))

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("elements belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.field.element([a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return self.field.element([-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.field.element([a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._new(_pmul(_trim(list(self.coords)), _trim(list(other.coords))))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in number field")
        return self.field.element(_pinverse_mod(self.coords, self.field._fpoly))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other) if isinstance(other, (int, Fraction, FieldElement)) else NotImplemented
        if other is NotImplemented:
            return False
        return self.coords == other.coords

    def __hash__(self):
        return hash((self.field.defining_poly, self.coords))

    def __repr__(self):
        return f"FieldElement({self.to_string()})"

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_one(self) -> bool:
        return self.coords[0] == 1 and all(c == 0 for c in self.coords[1:])

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def substitute(self, image: "FieldElement") -> "FieldElement":
        """Evaluate the coordinate polynomial at ``image`` (a field endomorphism
        when ``image`` is a root of the defining polynomial)."""
        out = image.field.zero()
        for c in reversed(self.coords):
            out = out * image + c
        return out

    def to_string(self, var: str = "a") -> str:
        parts = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and c == 1:
                parts.append(mono)
            elif mono and c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts).replace("+ -", "- ") or "0"

    def to_json(self) -> List:
        return [c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
                for c in self.coords]


# ---------------------------------------------------------------------------
# number fields
# ---------------------------------------------------------------------------

def _poly_discriminant(poly: Sequence[int]) -> int:
    return int(sympy.discriminant(sympy.Poly(list(reversed(poly)), _X)))


def _dedekind_maximal_at(poly: Sequence[int], p: int) -> bool:
    f = sympy.Poly(list(reversed(poly)), _X)
    fp = sympy.Poly(f.as_expr(), _X, modulus=p)
    _, factors = fp.factor_list()
    g = sympy.Poly(1, _X)
    h = sympy.Poly(1, _X)
    for fac, e in factors:
        lift = sympy.Poly(fac.as_expr(), _X)
        g = g * lift
        if e > 1:
            h = h * lift ** (e - 1)
    big_f = (f - g * h)
    coeffs = big_f.all_coeffs()
    if any(int(c) % p for c in coeffs):
        raise ArithmeticError("lifted factorisation is not congruent to f mod p")
    big_f = sympy.Poly([int(c) // p for c in coeffs], _X)
    d = sympy.Poly(big_f.as_expr(), _X, modulus=p)
    d = d.gcd(sympy.Poly(g.as_expr(), _X, modulus=p))
    d = d.gcd(sympy.Poly(h.as_expr(), _X, modulus=p))
    return d.degree() <= 0


def _is_perfect_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass
class NumberField:
    """F = Q[x]/(f) with f monic irreducible; ``defining_poly`` is ascending."""

    defining_poly: Tuple[int, ...]
    degree: int
    signature: Tuple[int, int]
    disc: int
    poly_disc: int
    maximality_cert: Dict[int, str]
    name: str = ""
    _roots_cache: Dict[int, List[mpc]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._fpoly = [Fraction(c) for c in self.defining_poly]

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.defining_poly == other.defining_poly

    def __hash__(self):
        return hash(self.defining_poly)

    # elements -------------------------------------------------------------
    def element(self, coords: Sequence) -> FieldElement:
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            coords = _preduce(coords, self._fpoly)
        coords = coords + [Fraction(0)] * (self.degree - len(coords))
        return FieldElement(self, tuple(coords))

    def rational(self, q) -> FieldElement:
        return self.element([Fraction(q)])

    def zero(self) -> FieldElement:
        return self.element([])

    def one(self) -> FieldElement:
        return self.element([1])

    def gen(self) -> FieldElement:
        return self.element([0, 1])

    @property
    def r1(self) -> int:
        return self.signature[0]

    @property
    def r2(self) -> int:
        return self.signature[1]

    # embeddings -----------------------------------------------------------
    def roots(self, ctx: PrecisionContext | None = None) -> List[mpc]:
        """Ordered embeddings of the generator: real roots ascending, then one
        root per conjugate pair (Im > 0), ascending by imaginary part."""
        ctx = ctx or PrecisionContext()
        dps = ctx.working_digits + 10
        cached = self._roots_cache.get(dps)
        if cached is None:
            cached = _refined_roots(self.defining_poly, self.r1, dps)
            self._roots_cache[dps] = cached
        return cached

    @property
    def embeddings(self) -> List[mpc]:
        return self.roots()

    def complex_embedding_indices(self) -> List[int]:
        return list(range(self.r1, self.r1 + self.r2))

    def eval_embedding(self, x: FieldElement, j: int,
                       ctx: PrecisionContext | None = None) -> mpc:
        ctx = ctx or PrecisionContext()
        roots = self.roots(ctx)
        if not 0 <= j < len(roots):
            raise IndexError(f"embedding index {j} out of range 0..{len(roots) - 1}")
        with mpmath.workdps(ctx.working_digits + 10):
            if x.is_rational():
                c = x.coords[0]
                return mpc(mpf(c.numerator) / c.denominator)
            r = roots[j]
            acc = mpc(0)
            for c in reversed(x.coords):
                acc = acc * r + (mpf(c.numerator) / c.denominator if c else 0)
            if j < self.r1:
                acc = mpc(acc.real, 0)
            return acc

    def norm(self, x: FieldElement) -> Fraction:
        """Exact norm N(x) = Res(f, g) for x = g(a), f monic."""
        g = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(x.coords)],
                       _X, domain="QQ")
        f = sympy.Poly(list(reversed(self.defining_poly)), _X, domain="QQ")
        r = sympy.resultant(f, g) if g.degree() > 0 else g.LC() ** self.degree
        r = sympy.Rational(r)
        return Fraction(int(r.p), int(r.q))

    # roots of unity -------------------------------------------------------
    def root_of_unity_candidates(self) -> List[int]:
        """All m with phi(m) dividing the degree, ascending."""
        n = self.degree
        bound = max(2, 2 * n * n + 2)
        out = []
        for m in range(1, bound + 1):
            if n % int(sympy.totient(m)) == 0:
                out.append(m)
        return out

    def is_root_of_unity(self, x: FieldElement) -> Optional[int]:
        return is_root_of_unity(x)

    def torsion_generator(self, ctx: PrecisionContext | None = None) -> Tuple[FieldElement, int]:
        return _torsion_generator(self, ctx or PrecisionContext())

    def to_json(self) -> Dict:
        return {"poly": list(self.defining_poly)}


def _refined_roots(poly: Sequence[int], r1: int, dps: int) -> List[mpc]:
    n = len(poly) - 1
    approx = np.roots([float(c) for c in reversed(poly)])
    with mpmath.workdps(dps + 10):
        coeffs = [mpf(c) for c in poly]
        dcoeffs = [i * coeffs[i] for i in range(1, n + 1)]

        def horner(cs, z):
            acc = mpc(0)
            for c in reversed(cs):
                acc = acc * z + c
            return acc

        refined = []
        tol = mpf(10) ** (-(dps + 5))
        for z0 in approx:
            z = mpc(complex(z0))
            for _ in range(200):
                step = horner(coeffs, z) / horner(dcoeffs, z)
                z -= step
                if abs(step) < tol * max(1, abs(z)):
                    break
            else:
                raise PrecisionError("Newton refinement of a root did not converge")
            refined.append(z)
        sep = min(abs(a - b) for i, a in enumerate(refined) for b in refined[i + 1:])
        if sep < mpf(10) ** (-(dps // 3)):
            raise PrecisionError("roots are not certified distinct after refinement")
        by_imag = sorted(refined, key=lambda z: abs(z.imag))
        real = sorted((mpc(z.real, 0) for z in by_imag[:r1]), key=lambda z: z.real)
        if r1 and max(abs(z.imag) for z in by_imag[:r1]) > mpf(10) ** (-(dps // 2)):
            raise PrecisionError("real root count disagrees with numerical roots")
        upper = sorted((z for z in by_imag[r1:] if z.imag > 0), key=lambda z: (z.imag, z.real))
        if len(real) + 2 * len(upper) != n:
            raise PrecisionError("could not pair complex roots")
    with mpmath.workdps(dps):
        return [+z for z in real + upper]


def create_field(poly: Sequence[int], disc_override: Optional[int] = None,
                 name: str = "") -> NumberField:
    """Build a number field from an ascending integer coefficient list."""
    poly = tuple(int(c) for c in poly)
    if any(c != int(c) for c in poly):
        raise FieldError("coefficients must be integers")
    if len(poly) < 2:
        raise FieldError("degree must be at least 1")
    if poly[-1] != 1:
        raise FieldError("defining polynomial must be monic")
    sp = sympy.Poly(list(reversed(poly)), _X)
    if not sp.is_irreducible:
        raise FieldError(f"polynomial {sp.as_expr()} is reducible over Q")
    n = len(poly) - 1
    r1 = int(sp.count_roots())
    signature = (r1, (n - r1) // 2)
    pdisc = _poly_discriminant(poly)
    cert: Dict[int, str] = {}
    if disc_override is not None:
        if disc_override == 0 or pdisc % disc_override or not _is_perfect_square(pdisc // disc_override):
            raise FieldError("disc(f) / disc_override must be a perfect square")
        disc = int(disc_override)
        cert[0] = "override"
    else:
        for p, e in sorted(sympy.factorint(abs(pdisc)).items()):
            if e >= 2:
                if not _dedekind_maximal_at(poly, p):
                    raise NonMaximalOrderError(p)
                cert[p] = "dedekind"
        disc = pdisc
    return NumberField(poly, n, signature, disc, pdisc, cert, name)


def field_discriminant(F: NumberField) -> int:
    return F.disc


def element_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    ops = {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op](b)


def eval_embedding(x: FieldElement, j: int, ctx: PrecisionContext | None = None) -> mpc:
    return x.field.eval_embedding(x, j, ctx)


def cyclotomic_poly(m: int) -> List[int]:
    coeffs = sympy.Poly(sympy.cyclotomic_poly(m, _X), _X).all_coeffs()
    return [int(c) for c in reversed(coeffs)]


def cyclotomic_field(p: int) -> NumberField:
    return create_field(cyclotomic_poly(p), name=f"Q(zeta_{p})")


@lru_cache(maxsize=None)
def real_cyclotomic_minpoly(m: int) -> Tuple[int, ...]:
    """Minimal polynomial of 2 cos(2 pi / m) over Q (ascending)."""
    if m < 3:
        raise ValueError("m must be >= 3")
    ks = [k for k in range(1, m) if 2 * k < m and math.gcd(k, m) == 1]
    with mpmath.workdps(30 + 2 * len(ks)):
        coeffs = [mpf(1)]
        for k in ks:
            r = 2 * mpmath.cos(2 * mpmath.pi * k / m)
            new = [mpf(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                new[i + 1] += c
                new[i] -= r * c
            coeffs = new
        out = tuple(int(mpmath.nint(c)) for c in coeffs)
    return out


def real_cyclotomic_field(p: int) -> NumberField:
    return create_field(real_cyclotomic_minpoly(p), name=f"Q(zeta_{p})^+")


def is_root_of_unity(x: FieldElement) -> Optional[int]:
    """Least m with x^m = 1 (certified exactly), or None."""
    if x.is_zero():
        raise ValueError("zero is not a unit")
    F = x.field
    ctx = PrecisionContext(15, 5)
    for j in range(len(F.roots(ctx))):
        if abs(abs(F.eval_embedding(x, j, ctx)) - 1) > 1e-8:
            return None
    for m in F.root_of_unity_candidates():
        if (x ** m).is_one():
            return m
    return None


# ---------------------------------------------------------------------------
# recognising algebraic numbers inside F
# ---------------------------------------------------------------------------

def find_roots_in_field(F: NumberField, poly: Sequence[int],
                        ctx: PrecisionContext | None = None,
                        retries: int = 2) -> List[FieldElement]:
    """Elements of F that are roots of the integer polynomial ``poly``.

    Each numerical root r of ``poly`` is matched against the first embedding
    of F by an LLL search for integer coordinates k with
    k0 * r + sum k_i sigma(a)^i = 0; candidates are accepted only when
    ``poly`` vanishes on them in exact arithmetic.
    """
    ctx = ctx or PrecisionContext()
    target = sympy.Poly(list(reversed(poly)), _X)
    found: List[FieldElement] = []
    digits = ctx.working_digits
    for _ in range(retries + 1):
        local = PrecisionContext(max(15, digits - 8), 8)
        found = _match_roots(F, poly, target, local)
        if found or len(poly) - 1 == 1:
            return found
        digits *= 2
    return found


def _exact_poly_value(poly: Sequence[int], x: FieldElement) -> FieldElement:
    acc = x.field.zero()
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def _match_roots(F, poly, target, ctx) -> List[FieldElement]:
    n = F.degree
    with mpmath.workdps(ctx.working_digits + 10):
        alpha = F.roots(ctx)[0]
        powers = [alpha ** i for i in range(n)]
        num_roots = [mpc(complex(r)) for r in np.roots([float(c) for c in target.all_coeffs()])]
        refined = []
        for r in num_roots:
            z = r
            dt = target.diff(_X)
            for _ in range(200):
                fz = mpc(0)
                for c in target.all_coeffs():
                    fz = fz * z + int(c)
                dz = mpc(0)
                for c in dt.all_coeffs():
                    dz = dz * z + int(c)
                step = fz / dz
                z -= step
                if abs(step) < mpf(10) ** (-(ctx.working_digits + 5)):
                    break
            refined.append(z)
        scale = mpf(10) ** (ctx.working_digits - 12)
        out: List[FieldElement] = []
        for r in refined:
            vec = [r] + powers
            rows = []
            for i, v in enumerate(vec):
                ident = [1 if j == i else 0 for j in range(n + 1)]
                rows.append(ident + [int(mpmath.nint(scale * v.real)),
                                     int(mpmath.nint(scale * v.imag))])
            for row in lll(rows):
                k0, ks = row[0], row[1:n + 1]
                if k0 == 0:
                    continue
                cand = F.element([Fraction(-k, k0) for k in ks])
                if _exact_poly_value(poly, cand).is_zero() and cand not in out:
                    out.append(cand)
    return out


def real_cyclotomic_membership(F: NumberField, m: int,
                               ctx: PrecisionContext | None = None) -> bool:
    """Whether 2 cos(2 pi / m) lies in F."""
    return real_cyclotomic_element(F, m, ctx) is not None


def real_cyclotomic_element(F: NumberField, m: int,
                            ctx: PrecisionContext | None = None) -> Optional[FieldElement]:
    if m < 3:
        raise ValueError("m must be >= 3")
    g = real_cyclotomic_minpoly(m)
    d = len(g) - 1
    if d == 1:
        return F.rational(-g[0])
    if F.degree % d:
        return None
    with mpmath.workdps(60):
        want = 2 * mpmath.cos(2 * mpmath.pi / m)
    for beta in find_roots_in_field(F, g, ctx):
        # any root generates the same field; return the one equal to
        # 2 cos(2 pi / m) under some embedding
        for j in range(len(F.roots())):
            if abs(F.eval_embedding(beta, j) - want) < 1e-20:
                return beta
        return beta
    return None


def _torsion_generator(F: NumberField, ctx: PrecisionContext) -> Tuple[FieldElement, int]:
    cache = getattr(F, "_torsion", None)
    if cache is not None:
        return cache
    best = (-F.one(), 2)
    for m in sorted(F.root_of_unity_candidates(), reverse=True):
        if m <= 2:
            break
        if F.degree % int(sympy.totient(m)):
            continue
        roots = find_roots_in_field(F, cyclotomic_poly(m), ctx)
        if roots:
            zeta = roots[0]
            if m % 2:
                zeta, m = -zeta, 2 * m
            best = (zeta, m)
            break
    F._torsion = best
    return best


def galois_image(x: FieldElement, power: int) -> FieldElement:
    """Apply a -> a^power; an automorphism when F is cyclotomic and
    gcd(power, conductor) = 1."""
    return x.substitute(x.field.gen() ** power)


# ---------------------------------------------------------------------------
# parsing and files
# ---------------------------------------------------------------------------

_SYMBOLS = {name: sympy.Symbol("a") for name in ("a", "alpha", "z", "zeta")}


def parse_element(F: NumberField, text: str) -> FieldElement:
    """Parse a rational expression in the generator, e.g. ``"1/(a-1)"``."""
    expr = sympy.sympify(text.replace("^", "**"), locals=_SYMBOLS)
    a = sympy.Symbol("a")
    extra = expr.free_symbols - {a}
    if extra:
        raise ValueError(f"unknown symbols in element: {sorted(map(str, extra))}")
    num, den = sympy.fraction(sympy.together(expr))

    def to_elem(e) -> FieldElement:
        poly = sympy.Poly(e, a, domain="QQ")
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
        return F.element(coeffs)

    return to_elem(num) / to_elem(den)


def load_field(path) -> NumberField:
    data = json.loads(Path(path).read_text())
    return field_from_json(data)


def field_from_json(data: Dict) -> NumberField:
    if not isinstance(data, dict) or "poly" not in data:
        raise FieldError('field file must be a JSON object with a "poly" key')
    poly = data["poly"]
    if not isinstance(poly, list) or not all(isinstance(c, int) for c in poly):
        raise FieldError('"poly" must be a list of integers')
    return create_field(poly, data.get("disc_override"), data.get("name", ""))
