"""w2(F), dilogarithmic regulators and predictions of #K2(O_F).

Everything here that depends on an unproven statement records it in an
``assumptions`` list; basis elements of B(F) and orders of K2 of subfields
are inputs, never guesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import mpmath
import sympy
from mpmath import mpf

from .apnum import PrecisionContext, bloch_wigner, characters_mod, dirichlet_L2_with_bound
from .bloch import FormalSum, verify_bloch_element, dilog_value
from .nfield import (NumberField, cyclotomic_field, cyclotomic_poly,
                     real_cyclotomic_membership)
from .zeta import (DEFAULT_TERMS, ZetaResult, cyclotomic_zeta2, dedekind_zeta2,
                   transport_to_minus1)

CONSISTENCY_FLOOR = 1e-3
CYCLO_DET_MAX_P = 13

LICHTENBAUM = ("Lichtenbaum formula |zeta*_F(-1)| = R2(F) #K2(O_F) / w2(F) "
               "(conjectural for non-abelian F)")
BASIS = "supplied elements span B(F) modulo torsion"


class UncertifiedElementError(ValueError):
    """A regulator input does not carry a VERIFIED_ZERO boundary certificate."""


class SingularRegulatorError(ArithmeticError):
    """The regulator determinant is indistinguishable from zero."""


# ---------------------------------------------------------------------------
# w2
# ---------------------------------------------------------------------------

def _cyclotomic_prime(F: NumberField) -> Optional[int]:
    n = F.degree
    p = n + 1
    if p >= 3 and sympy.isprime(p) and list(F.defining_poly) == cyclotomic_poly(p):
        return p
    return None


def w2_closed_form(p: int) -> int:
    """w2(Q(zeta_p)) for an odd prime p."""
    return 24 if p == 3 else 24 * p


def w2(F: NumberField, ctx: PrecisionContext | None = None,
       use_closed_form: bool = True) -> int:
    """Largest N such that Gal(F(mu_N)/F) has exponent dividing 2.

    For odd l the group Gal(Q(mu_{l^v})/Q) is cyclic, so the condition is
    that F contains its unique index-2 subfield, the real one, i.e.
    2cos(2pi/l^v) lies in F. For l = 2, F(mu_{2^v}) has exponent 2 over F
    exactly when F contains Q(mu_{2^(v-1)})^+, and v = 3 always works.
    """
    if use_closed_form:
        p = _cyclotomic_prime(F)
        if p is not None:
            return w2_closed_form(p)
    n = F.degree
    total = 1
    for ell in sympy.primerange(2, 2 * n + 2):
        if ell == 2:
            v = 3
            while real_cyclotomic_membership(F, 2 ** v, ctx):
                v += 1
            total *= 2 ** v
            continue
        v = 0
        while real_cyclotomic_membership(F, ell ** (v + 1), ctx):
            v += 1
        total *= ell ** v
    return total


# ---------------------------------------------------------------------------
# regulator
# ---------------------------------------------------------------------------

@dataclass
class RegulatorMatrix:
    entries: List[List[mpf]]
    elements: List[FormalSum]
    det: mpf
    det_over_pi: mpf

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_json(self, digits: int = 20) -> Dict:
        return {
            "entries": [[mpmath.nstr(v, digits) for v in row] for row in self.entries],
            "elements": [x.to_string() for x in self.elements],
            "raw_det": mpmath.nstr(abs(self.det), digits),
            "det_over_pi_r2": mpmath.nstr(self.det_over_pi, digits),
        }


def regulator(F: NumberField, elements: Sequence[FormalSum],
              ctx: PrecisionContext | None = None, certify: bool = True) -> RegulatorMatrix:
    """Matrix D(sigma_i(xi_j)) over the complex embeddings sigma_i."""
    ctx = ctx or PrecisionContext()
    r2 = F.r2
    if len(elements) != r2:
        raise ValueError(f"need exactly r2 = {r2} elements, got {len(elements)}")
    if certify:
        for xi in elements:
            cert = verify_bloch_element(xi, F, ctx)
            if not cert.verified:
                raise UncertifiedElementError(
                    f"{xi.to_string()} is not certified ({cert.status.value})")
    with ctx.workdps():
        entries = [[dilog_value(xi, F, i, ctx) for xi in elements] for i in range(r2)]
        det = mpmath.det(mpmath.matrix(entries)) if r2 else mpf(1)
        return RegulatorMatrix(entries, list(elements), det, abs(det) / mpmath.pi ** r2)


# ---------------------------------------------------------------------------
# K2 prediction
# ---------------------------------------------------------------------------

@dataclass
class K2Report:
    field: NumberField
    w2: int
    zeta2: ZetaResult
    zeta_star_minus1: mpf
    regulator: RegulatorMatrix
    predicted_order: mpf
    nearest_integer: int
    deviation: mpf
    error_budget: mpf
    assumptions: List[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.nearest_integer >= 1 and self.deviation < max(
            mpf(CONSISTENCY_FLOOR), self.error_budget)

    def to_json(self, digits: int = 20) -> Dict:
        t = transport_to_minus1(self.field)
        return {
            "field": self.field.to_json() | {"disc": self.field.disc,
                                             "signature": list(self.field.signature)},
            "w2": self.w2,
            "zeta2": self.zeta2.to_json(digits),
            "transport": t.to_json(),
            "zeta_star_minus1": mpmath.nstr(self.zeta_star_minus1, digits),
            "regulator": self.regulator.to_json(digits),
            "predicted_order": mpmath.nstr(self.predicted_order, digits),
            "nearest_integer": self.nearest_integer,
            "deviation": mpmath.nstr(self.deviation, 6),
            "error_budget": mpmath.nstr(self.error_budget, 6),
            "status": "CONSISTENT" if self.consistent else "INCONSISTENT",
            "assumptions": list(self.assumptions),
        }


def k2_predict(F: NumberField, elements: Sequence[FormalSum],
               ctx: PrecisionContext | None = None, M: int = DEFAULT_TERMS,
               zeta2: Optional[ZetaResult] = None) -> K2Report:
    """Predicted #K2(O_F) = w2(F) |zeta*_F(-1)| / R2(F)."""
    ctx = ctx or PrecisionContext()
    reg = regulator(F, elements, ctx)
    if zeta2 is None:
        zeta2 = dedekind_zeta2(F, M, ctx)
    w = w2(F, ctx)
    t = transport_to_minus1(F)
    with ctx.workdps():
        if reg.det_over_pi < mpf(10) ** (-(ctx.digits // 2)):
            raise SingularRegulatorError("regulator determinant is numerically zero")
        c = t.multiplier(F.disc, ctx)
        zstar = zeta2.value / c
        predicted = w * zstar / reg.det_over_pi
        nearest = int(mpmath.nint(predicted))
        deviation = abs(predicted - nearest)
        # the zeta error dominates; the dilogarithms are good to ~eps
        budget = (w * zeta2.tail_bound / c / reg.det_over_pi
                  + abs(predicted) * F.r2 * ctx.eps * 100)
    return K2Report(F, w, zeta2, zstar, reg, predicted, nearest, deviation, budget,
                    [LICHTENBAUM, BASIS])


# ---------------------------------------------------------------------------
# cyclotomic fields
# ---------------------------------------------------------------------------

def _odd_prime(p: int) -> None:
    if p < 3 or not sympy.isprime(p):
        raise ValueError("p must be an odd prime")


def _row_multipliers(p: int) -> List[int]:
    """Powers s^i, i < (p-1)/2, of the automorphism zeta -> zeta^s, with s = 2
    when those powers represent (Z/p)^x / {+-1}, else a primitive root."""
    half = (p - 1) // 2
    for s in (2, int(sympy.primitive_root(p))):
        reps = [pow(s, i, p) for i in range(half)]
        if len({min(r, p - r) for r in reps}) == half:
            return reps
    raise AssertionError("unreachable: a primitive root always works")


@dataclass
class CyclotomicRegulator:
    p: int
    determinant: mpf
    character_product: mpf
    matrix: List[List[mpf]]

    def to_json(self, digits: int = 30) -> Dict:
        return {
            "p": self.p,
            "determinant_route": mpmath.nstr(self.determinant, digits),
            "character_route": mpmath.nstr(self.character_product, digits),
            "difference": mpmath.nstr(abs(self.determinant - self.character_product), 6),
        }


def cyclotomic_regulator_det(p: int, ctx: PrecisionContext | None = None,
                             max_p: int = CYCLO_DET_MAX_P) -> CyclotomicRegulator:
    """Covolume of the lattice spanned by p[zeta_p^j], two ways.

    (i) pi^-r2 |det(p D(sigma^i(zeta^j)))| with sigma: zeta -> zeta^2;
    (ii) prod over odd chi of |(p / 2pi) sum_a chi(a) D(zeta^a)|.
    """
    _odd_prime(p)
    if p > max_p:
        raise ValueError(f"p = {p} exceeds the configured bound {max_p}")
    ctx = ctx or PrecisionContext()
    half = (p - 1) // 2
    with ctx.workdps():
        dvals = {}
        for a in range(1, p):
            dvals[a] = bloch_wigner(mpmath.expjpi(mpf(2 * a) / p), ctx)
        rows = _row_multipliers(p)
        mat = [[p * dvals[(s * j) % p] for j in range(1, half + 1)] for s in rows]
        det = abs(mpmath.det(mpmath.matrix(mat))) / mpmath.pi ** half
        prod = mpf(1)
        for chi in characters_mod(p):
            if not chi.is_odd:
                continue
            s = mpmath.fsum(chi.value(a, ctx) * dvals[a] for a in range(1, p))
            prod *= abs(p * s / (2 * mpmath.pi))
    return CyclotomicRegulator(p, det, prod, mat)


def cyclotomic_regulator_closed(p: int, ctx: PrecisionContext | None = None) -> mpf:
    """(2pi)^((1-p)/2) p^(3(p-1)/4) prod over odd chi of |L(chi, 2)|."""
    _odd_prime(p)
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        prod = mpf(1)
        for chi in characters_mod(p):
            if chi.is_odd:
                prod *= abs(dirichlet_L2_with_bound(chi, ctx)[0])
        return ((2 * mpmath.pi) ** (mpf(1 - p) / 2)
                * mpf(p) ** (mpf(3 * (p - 1)) / 4) * prod)


@dataclass
class Theorem33Report:
    p: int
    k2_plus: int
    w2: int
    w2_plus: int
    regulator: mpf
    zeta_star_minus1: mpf
    zeta_plus_minus1: mpf
    left: mpf
    right: mpf
    right_from_input: mpf
    implied_order: mpf
    quotient_order: mpf
    birch_tate_plus: mpf
    assumptions: List[str] = field(default_factory=list)

    @property
    def sides_difference(self) -> mpf:
        return abs(self.left - self.right)

    @property
    def input_consistent(self) -> bool:
        return abs(self.birch_tate_plus - self.k2_plus) < CONSISTENCY_FLOOR

    def to_json(self, digits: int = 25) -> Dict:
        s = lambda v: mpmath.nstr(v, digits)
        return {
            "p": self.p,
            "k2_plus": self.k2_plus,
            "w2": self.w2,
            "w2_plus": self.w2_plus,
            "regulator": s(self.regulator),
            "zeta_star_minus1": s(self.zeta_star_minus1),
            "zeta_plus_minus1": s(self.zeta_plus_minus1),
            "left": s(self.left),
            "right": s(self.right),
            "sides_difference": mpmath.nstr(self.sides_difference, 6),
            "right_from_input": s(self.right_from_input),
            "implied_order": s(self.implied_order),
            "quotient_order": s(self.quotient_order),
            "birch_tate_plus": s(self.birch_tate_plus),
            "input_consistent": self.input_consistent,
            "assumptions": list(self.assumptions),
        }


def theorem33_chain(p: int, k2_plus: int, ctx: PrecisionContext | None = None) -> Theorem33Report:
    """Both sides of |zeta*_F(-1)| = 2^((1-p)/2) |zeta_{F+}(-1)| R2(F) for
    F = Q(zeta_p), plus what they imply for #K2(O_F).

    ``left`` comes from the full character product transported to s = -1,
    ``right`` from the even-character product transported on F+ and the
    closed-form regulator. ``right_from_input`` replaces |zeta_{F+}(-1)|
    by k2_plus / w2(F+), and ``quotient_order`` is 2^((1-p)/2) k2_plus.
    """
    _odd_prime(p)
    if k2_plus < 1:
        raise ValueError("k2_plus must be a positive integer")
    ctx = ctx or PrecisionContext()
    half = (p - 1) // 2
    w = w2_closed_form(p)
    # 2cos(2pi/p) lies in F+, so every level that works for F works for F+
    w_plus = w
    with ctx.workdps():
        reg = cyclotomic_regulator_closed(p, ctx)
        z_full = cyclotomic_zeta2(p, ctx).value
        z_plus = cyclotomic_zeta2(p, ctx, parity="even").value
        d_full = mpf(p) ** (p - 2)
        d_plus = mpf(p) ** half / p
        # zeta_F(2) = 2^(3 r2) pi^(3 r2) |d|^(-3/2) |zeta*_F(-1)| with r2 = (p-1)/2
        zstar = z_full * d_full ** mpf(1.5) / (2 * mpmath.pi) ** (3 * half)
        # zeta_{F+}(2) = 2^((p-1)/2) pi^(p-1) |d+|^(-3/2) |zeta_{F+}(-1)|
        zplus = z_plus * d_plus ** mpf(1.5) / (mpf(2) ** half * mpmath.pi ** (p - 1))
        factor = mpf(2) ** (mpf(1 - p) / 2)
        left = zstar
        right = factor * zplus * reg
        right_input = factor * mpf(k2_plus) / w_plus * reg
        implied = w * left / reg
        quotient = factor * k2_plus
        birch_tate = w_plus * zplus
    return Theorem33Report(p, k2_plus, w, w_plus, reg, zstar, zplus, left, right,
                           right_input, implied, quotient, birch_tate,
                           [LICHTENBAUM + " for Q(zeta_p)",
                            "lattice of p[zeta_p^j] has covolume equal to R2(F)",
                            f"#K2(O_F+) = {k2_plus} (supplied)"])


def cyclotomic_basis(p: int) -> List[FormalSum]:
    """p[zeta^j] for j = 1..(p-1)/2 in Q(zeta_p)."""
    F = cyclotomic_field(p)
    a = F.gen()
    return [FormalSum([(p, a ** j)]) for j in range(1, (p - 1) // 2 + 1)]
