"""Formal sums in Z[F], the boundary map into F^x ^ F^x, and certified
kernel membership.

The kernel check expands every a (x) (1 - a) over a multiplicative basis
with exactly verified decompositions and reduces in the exterior square of
the subgroup the support generates. Reduction to zero there is a proof of
membership in ker(boundary); anything else proves nothing.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf

from .apnum import PrecisionContext, PrecisionError, bloch_wigner
from .lattice import integer_relations, inverse_unimodular, saturate, smith_normal_form
from .nfield import FieldElement, NumberField, is_root_of_unity, parse_element

RELATION_EXPONENT_BOUND = 64


class DegenerateInputError(ValueError):
    """A bracket argument would be 0 or 1 (or a denominator vanishes)."""


class MissingDecompositionError(KeyError):
    pass


# ---------------------------------------------------------------------------
# formal sums
# ---------------------------------------------------------------------------

class FormalSum:
    """An integer combination sum n_i [a_i] with a_i not in {0, 1}.

    Terms with equal elements are merged and zero coefficients dropped;
    insertion order of first appearance is kept.
    """

    def __init__(self, terms: Iterable[Tuple[int, FieldElement]] = ()):
        self._terms: Dict[FieldElement, int] = {}
        for c, a in terms:
            self._add(int(c), a)

    def _add(self, c: int, a: FieldElement) -> None:
        if a.is_zero() or a.is_one():
            raise DegenerateInputError(f"bracket argument {a.to_string()} is 0 or 1")
        new = self._terms.get(a, 0) + c
        if new:
            self._terms[a] = new
        else:
            self._terms.pop(a, None)

    @property
    def terms(self) -> List[Tuple[int, FieldElement]]:
        return [(c, a) for a, c in self._terms.items()]

    @property
    def field(self) -> Optional[NumberField]:
        return next(iter(self._terms)).field if self._terms else None

    def __add__(self, other: "FormalSum") -> "FormalSum":
        return FormalSum(self.terms + other.terms)

    def __neg__(self) -> "FormalSum":
        return FormalSum((-c, a) for c, a in self.terms)

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __rmul__(self, k: int) -> "FormalSum":
        return FormalSum((k * c, a) for c, a in self.terms)

    def __eq__(self, other):
        return isinstance(other, FormalSum) and self._terms == other._terms

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def map(self, fn) -> "FormalSum":
        """Apply a field map to every element (e.g. a Galois automorphism)."""
        return FormalSum((c, fn(a)) for c, a in self.terms)

    def __repr__(self):
        return f"FormalSum({self.to_string()})"

    def to_string(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*[{a.to_string()}]" for c, a in self.terms).replace("+ -", "- ")

    def to_json(self) -> List:
        return [[c, a.to_json()] for c, a in self.terms]

    @classmethod
    def single(cls, a: FieldElement, c: int = 1) -> "FormalSum":
        return cls([(c, a)])


_TERM_RE = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*\[([^\]]+)\]")


def parse_formal_sum(F: NumberField, spec) -> FormalSum:
    """Parse ``"4*[a] + 1*[a-1]"`` or JSON ``[[4, [0, 1, 0]], [1, [-1, 1, 0]]]``.

    In the JSON form an element may also be an expression string.
    """
    if isinstance(spec, str):
        text = spec.strip()
        terms = []
        pos = 0
        for m in _TERM_RE.finditer(text):
            between = text[pos:m.start()].strip()
            if between:
                raise ValueError(f"cannot parse formal sum near {between!r}")
            sign = -1 if m.group(1) == "-" else 1
            coeff = int(m.group(2)) if m.group(2) else 1
            terms.append((sign * coeff, parse_element(F, m.group(3))))
            pos = m.end()
        if text[pos:].strip() or not terms:
            raise ValueError(f"cannot parse formal sum {spec!r}")
        return FormalSum(terms)
    terms = []
    for item in spec:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise ValueError(f"formal sum term must be [coeff, element], got {item!r}")
        coeff, elem = item
        if isinstance(elem, str):
            terms.append((int(coeff), parse_element(F, elem)))
        else:
            terms.append((int(coeff), F.element([Fraction(c) for c in elem])))
    return FormalSum(terms)


# ---------------------------------------------------------------------------
# boundary map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WedgePair:
    coeff: int
    left: FieldElement
    right: FieldElement


def boundary(xi: FormalSum, F: NumberField | None = None) -> List[WedgePair]:
    """sum n_i a_i (x) (1 - a_i), unreduced."""
    return [WedgePair(c, a, 1 - a) for c, a in xi.terms]


# ---------------------------------------------------------------------------
# multiplicative bases
# ---------------------------------------------------------------------------

@dataclass
class Decomposition:
    exponents: Tuple[int, ...]
    torsion: int


@dataclass
class MultiplicativeBasis:
    generators: List[FieldElement]
    torsion_gen: FieldElement
    torsion_order: int
    decompositions: Dict[FieldElement, Decomposition]
    relations: List[List[int]] = field(default_factory=list)

    def decompose(self, x: FieldElement) -> Decomposition:
        try:
            return self.decompositions[x]
        except KeyError:
            raise MissingDecompositionError(x.to_string()) from None

    def compose(self, d: Decomposition) -> FieldElement:
        out = self.torsion_gen ** d.torsion
        for g, e in zip(self.generators, d.exponents):
            if e:
                out = out * g ** e
        return out

    def verify(self) -> bool:
        return all(self.compose(d) == x for x, d in self.decompositions.items())


def _torsion_exponent(u: FieldElement, zeta: FieldElement, w: int) -> int:
    power = u.field.one()
    for t in range(w):
        if power == u:
            return t
        power = power * zeta
    raise ArithmeticError(f"{u.to_string()} is not a power of the torsion generator")


def discover_relations(support: Sequence[FieldElement], F: NumberField,
                       ctx: PrecisionContext | None = None,
                       max_retries: int = 2) -> MultiplicativeBasis:
    """Basis of the subgroup generated by ``support`` and the roots of unity of F.

    Integer relations among log-embedding vectors are proposed by LLL and
    admitted only after the product is certified to be a root of unity in
    exact arithmetic.
    """
    ctx = ctx or PrecisionContext()
    uniq: List[FieldElement] = []
    for x in support:
        if x.is_zero():
            raise ValueError("support elements must be nonzero")
        if x not in uniq:
            uniq.append(x)
    zeta, w = F.torsion_generator(ctx)

    torsion_part: Dict[FieldElement, int] = {}
    free: List[FieldElement] = []
    for x in uniq:
        if is_root_of_unity(x) is not None:
            torsion_part[x] = _torsion_exponent(x, zeta, w)
        else:
            free.append(x)

    digits = ctx.working_digits
    relations: List[List[int]] = []
    for attempt in range(max_retries + 1):
        local = PrecisionContext(max(15, digits - 8), 8)
        relations = _find_relations(free, F, local)
        if relations is not None:
            break
        digits *= 2
    else:
        raise PrecisionError("relation search unstable at every precision tried")

    k = len(free)
    if relations:
        sat = saturate(relations, k)
        _, _, q = smith_normal_form(sat)
        rank = len(sat)
    else:
        q = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        rank = 0
    v = inverse_unimodular(q) if k else []
    gens = []
    for j in range(rank, k):
        g = F.one()
        for i in range(k):
            if v[j][i]:
                g = g * free[i] ** v[j][i]
        gens.append(g)
    for j in range(rank):
        rel = F.one()
        for i in range(k):
            if v[j][i]:
                rel = rel * free[i] ** v[j][i]
        if is_root_of_unity(rel) is None:
            raise ArithmeticError("saturated relation failed exact verification")

    decomps: Dict[FieldElement, Decomposition] = {}
    for x, t in torsion_part.items():
        decomps[x] = Decomposition(tuple(0 for _ in gens), t)
    basis = MultiplicativeBasis(gens, zeta, w, decomps, relations)
    for i, x in enumerate(free):
        exps = tuple(q[i][j] for j in range(rank, k))
        rest = x / basis.compose(Decomposition(exps, 0))
        if is_root_of_unity(rest) is None:
            raise ArithmeticError("decomposition residue is not a root of unity")
        decomps[x] = Decomposition(exps, _torsion_exponent(rest, zeta, w))
    return basis


def _find_relations(free, F, ctx) -> Optional[List[List[int]]]:
    """Exactly verified relations, or None if the numerical search looked
    unstable (a candidate failed verification)."""
    if not free:
        return []
    places = range(F.r1 + F.r2)
    with mpmath.workdps(ctx.working_digits):
        logs = [[mpmath.log(abs(F.eval_embedding(x, j, ctx))) for j in places] for x in free]
    cands = integer_relations(logs, scale_digits=ctx.working_digits - 15,
                              max_coeff=RELATION_EXPONENT_BOUND)
    verified = []
    for e in cands:
        prod = F.one()
        for x, k in zip(free, e):
            if k:
                prod = prod * x ** k
        if is_root_of_unity(prod) is None:
            return None
        verified.append(e)
    return verified


# ---------------------------------------------------------------------------
# wedge reduction
# ---------------------------------------------------------------------------

@dataclass
class WedgeVector:
    """Coordinates in the exterior square of <zeta_w> x Z^k.

    ``free_matrix[i][j]`` (i < j) is the coefficient of g_i ^ g_j,
    ``torsion_coeffs[i]`` that of zeta ^ g_i (mod w) and ``torsion_square``
    that of zeta ^ zeta, which has order gcd(w, 1 + w/2).
    """

    free_matrix: List[List[int]]
    torsion_coeffs: List[int]
    torsion_square: int
    torsion_order: int
    reduced: bool = True

    @property
    def square_order(self) -> int:
        w = self.torsion_order
        return math.gcd(w, 1 + w // 2)

    def is_zero(self) -> bool:
        return (all(v == 0 for row in self.free_matrix for v in row)
                and all(t == 0 for t in self.torsion_coeffs)
                and self.torsion_square == 0)

    def free_is_zero(self) -> bool:
        return all(v == 0 for row in self.free_matrix for v in row)

    def to_json(self) -> Dict:
        k = len(self.free_matrix)
        return {
            "free": {f"{i},{j}": self.free_matrix[i][j]
                     for i in range(k) for j in range(i + 1, k) if self.free_matrix[i][j]},
            "torsion": {str(i): t for i, t in enumerate(self.torsion_coeffs) if t},
            "torsion_square": self.torsion_square,
            "torsion_order": self.torsion_order,
        }


def reduce_wedge(pairs: Sequence[WedgePair], basis: MultiplicativeBasis,
                 trace: Optional[List[Dict]] = None) -> WedgeVector:
    """Bilinear expansion over the basis followed by the rewrite rules
    x ^ (-x) = 0, x ^ y = -(y ^ x), g ^ g = g ^ (-1), torsion mod w."""
    k = len(basis.generators)
    w = basis.torsion_order
    half = w // 2
    mat = [[0] * k for _ in range(k)]
    tors = [0] * k
    sq = 0
    for pair in pairs:
        a = basis.decompose(pair.left)
        b = basis.decompose(pair.right)
        c = pair.coeff
        for i, ei in enumerate(a.exponents):
            if not ei:
                continue
            for j, fj in enumerate(b.exponents):
                if not fj:
                    continue
                m = c * ei * fj
                if i < j:
                    mat[i][j] += m
                elif i > j:
                    mat[j][i] -= m
                else:
                    # g^g = g^(-1) = (w/2) g^zeta = -(w/2) zeta^g
                    tors[i] -= m * half
        for i, ei in enumerate(a.exponents):
            # g_i ^ zeta^t = -t zeta ^ g_i
            tors[i] -= c * ei * b.torsion
        for j, fj in enumerate(b.exponents):
            tors[j] += c * a.torsion * fj
        sq += c * a.torsion * b.torsion
        if trace is not None:
            trace.append({"step": "expand", "coeff": c,
                          "left": {"exponents": list(a.exponents), "torsion": a.torsion},
                          "right": {"exponents": list(b.exponents), "torsion": b.torsion}})
    tors = [t % w for t in tors]
    vec = WedgeVector(mat, tors, 0, w)
    vec.torsion_square = sq % vec.square_order
    if trace is not None:
        trace.append({"step": "reduce", "rules": ["antisymmetry", "g^g=g^(-1)",
                                                  f"torsion mod {w}",
                                                  f"zeta^zeta mod {vec.square_order}"],
                      "result": vec.to_json()})
    return vec


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

class CertificateStatus(str, enum.Enum):
    VERIFIED_ZERO = "VERIFIED_ZERO"
    NONZERO_WITNESS = "NONZERO_WITNESS"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class BlochCertificate:
    status: CertificateStatus
    trace: List[Dict]
    basis: Optional[MultiplicativeBasis]
    wedge: Optional[WedgeVector] = None

    @property
    def verified(self) -> bool:
        return self.status is CertificateStatus.VERIFIED_ZERO

    def to_json(self) -> Dict:
        out = {"status": self.status.value, "trace": self.trace}
        if self.basis is not None:
            out["basis"] = {
                "generators": [g.to_json() for g in self.basis.generators],
                "torsion_generator": self.basis.torsion_gen.to_json(),
                "torsion_order": self.basis.torsion_order,
            }
        return out


def _h_generator(xi: FormalSum) -> Optional[str]:
    """Recognise c([a] + [1-a]) and c([a] + [1/a])."""
    terms = xi.terms
    if len(terms) != 2 or terms[0][0] != terms[1][0]:
        return None
    a, b = terms[0][1], terms[1][1]
    if a + b == 1:
        return "[a]+[1-a]"
    if a * b == 1:
        return "[a]+[1/a]"
    return None


def verify_bloch_element(xi: FormalSum, F: NumberField,
                         ctx: PrecisionContext | None = None) -> BlochCertificate:
    """Sound but incomplete certificate that xi lies in ker(boundary)."""
    ctx = ctx or PrecisionContext()
    if xi.is_zero():
        return BlochCertificate(CertificateStatus.VERIFIED_ZERO, [{"step": "empty sum"}], None)
    h = _h_generator(xi)
    if h is not None:
        return BlochCertificate(CertificateStatus.VERIFIED_ZERO,
                                [{"step": "H generator", "form": h}], None)
    pairs = boundary(xi, F)
    support = []
    for p in pairs:
        support += [p.left, p.right]
    basis = discover_relations(support, F, ctx)
    trace: List[Dict] = [{"step": "basis", "generators": len(basis.generators),
                          "torsion_order": basis.torsion_order,
                          "certified": basis.verify()}]
    if not trace[0]["certified"]:
        return BlochCertificate(CertificateStatus.INCONCLUSIVE, trace, basis)
    vec = reduce_wedge(pairs, basis, trace)
    if vec.is_zero():
        status = CertificateStatus.VERIFIED_ZERO
    elif not vec.free_is_zero():
        status = CertificateStatus.NONZERO_WITNESS
    else:
        status = CertificateStatus.INCONCLUSIVE
    return BlochCertificate(status, trace, basis, vec)


def replay_certificate(cert: BlochCertificate, xi: FormalSum) -> bool:
    """Re-check a VERIFIED_ZERO certificate with exact arithmetic."""
    if not cert.verified:
        return False
    if cert.basis is None:
        return xi.is_zero() or _h_generator(xi) is not None
    if not cert.basis.verify():
        return False
    return reduce_wedge(boundary(xi), cert.basis).is_zero()


# ---------------------------------------------------------------------------
# dilogarithm values and identity checks
# ---------------------------------------------------------------------------

def dilog_value(xi: FormalSum, F: NumberField, j: int,
                ctx: PrecisionContext | None = None) -> mpf:
    """sum n_i D(sigma_j(a_i)) at the j-th complex embedding (0-based)."""
    ctx = ctx or PrecisionContext()
    if not 0 <= j < F.r2:
        raise IndexError(f"complex embedding index {j} out of range (r2 = {F.r2})")
    idx = F.r1 + j
    with ctx.workdps():
        return mpmath.fsum(c * bloch_wigner(F.eval_embedding(a, idx, ctx), ctx)
                           for c, a in xi.terms)


def _bracket(x: FieldElement) -> FieldElement:
    if x.is_zero() or x.is_one():
        raise DegenerateInputError(f"bracket argument {x.to_string()} is 0 or 1")
    return x


def _div(a: FieldElement, b: FieldElement) -> FieldElement:
    if b.is_zero():
        raise DegenerateInputError("vanishing denominator")
    return a / b


def five_term(a: FieldElement, b: FieldElement) -> FormalSum:
    """[a] + [b] + [(1-a)/(1-ab)] + [1-ab] + [(1-b)/(1-ab)]."""
    if a.is_zero() or b.is_zero():
        raise DegenerateInputError("a and b must be nonzero")
    ab = a * b
    if ab.is_one():
        raise DegenerateInputError("ab = 1")
    args = [a, b, _div(1 - a, 1 - ab), 1 - ab, _div(1 - b, 1 - ab)]
    return FormalSum((1, _bracket(x)) for x in args)


def identity_22_sides(x: FieldElement, y: FieldElement) -> Tuple[FormalSum, FormalSum]:
    """Both sides of the rewriting of Suslin's generator as a sum of
    H generators (one five-term relation and six two-term relations)."""
    if x.is_zero() or y.is_zero():
        raise DegenerateInputError("x and y must be nonzero")
    xi, yi = x.inverse(), y.inverse()
    q = _div(1 - x, 1 - y)
    q_inv_arg = _div(1 - xi, 1 - yi)
    lhs = FormalSum([
        (1, _bracket(x)), (-1, _bracket(y)), (1, _bracket(y / x)),
        (-1, _bracket(q_inv_arg)), (1, _bracket(q)),
    ])
    groups = [
        (1, five_term(yi, y * xi)),
        (1, FormalSum([(1, _bracket(x)), (1, _bracket(xi))])),
        (1, FormalSum([(1, _bracket(q)), (1, _bracket(_div(1 - y, 1 - x)))])),
        (-1, FormalSum([(1, _bracket(y)), (1, _bracket(yi))])),
        (-1, FormalSum([(1, _bracket(q_inv_arg)), (1, _bracket(_div(1 - yi, 1 - xi)))])),
        (-1, FormalSum([(1, _bracket(1 - xi)), (1, _bracket(xi))])),
        (-1, FormalSum([(1, _bracket(1 - _div(1 - y, 1 - x))), (1, _bracket(_div(1 - y, 1 - x)))])),
    ]
    rhs = FormalSum()
    for sign, g in groups:
        rhs = rhs + sign * g
    return lhs, rhs


def check_identity_22(x: FieldElement, y: FieldElement, F: NumberField | None = None) -> bool:
    lhs, rhs = identity_22_sides(x, y)
    return lhs == rhs


def check_five_term_formal(a: FieldElement, b: FieldElement, F: NumberField,
                           ctx: PrecisionContext | None = None) -> mpf:
    """Largest |D(five-term sum)| over the complex embeddings."""
    if a.is_one() or b.is_one():
        raise DegenerateInputError("a and b must differ from 1")
    xi = five_term(a, b)
    if F.r2 == 0:
        return mpf(0)
    return max(abs(dilog_value(xi, F, j, ctx)) for j in range(F.r2))


def distribution_sum(x: FieldElement, zeta: FieldElement, n: int) -> FormalSum:
    """[x^n] - n sum_j [zeta^j x] for zeta of order n."""
    terms = [(1, x ** n)]
    z = x.field.one()
    for _ in range(n):
        terms.append((-n, z * x))
        z = z * zeta
    return FormalSum(terms)


def load_formal_sums(F: NumberField, data) -> List[FormalSum]:
    """Elements file: a list of formal sums (strings or JSON term lists), or
    an object with an ``elements`` key holding such a list."""
    if isinstance(data, dict):
        data = data.get("elements")
    if not isinstance(data, list):
        raise ValueError("elements file must hold a list of formal sums")
    return [parse_formal_sum(F, item) for item in data]
