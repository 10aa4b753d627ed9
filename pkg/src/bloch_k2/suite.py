"""Runner for the bundled example corpus (``data/corpus.json``)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Optional

import mpmath
from mpmath import mpf

from .apnum import (DirichletCharacter, PrecisionContext, bloch_wigner, characters_mod,
                    dirichlet_L2)
from .bloch import (CertificateStatus, FormalSum, dilog_value, distribution_sum,
                    parse_formal_sum, verify_bloch_element)
from .lichtenbaum import (cyclotomic_regulator_closed, cyclotomic_regulator_det,
                          k2_predict, regulator, theorem33_chain, w2)
from .nfield import (NumberField, cyclotomic_field, field_from_json, galois_image,
                     parse_element)
from .zeta import DEFAULT_TERMS, dedekind_zeta2

SUITE_VERSION = 1


def load_corpus() -> Dict:
    text = resources.files("bloch_k2").joinpath("data/corpus.json").read_text()
    return json.loads(text)


@dataclass
class EntryResult:
    id: str
    kind: str
    passed: bool
    quantities: Dict
    expected: object = None
    abs_diff: Optional[str] = None
    expected_failure: Optional[str] = None

    @property
    def status(self) -> str:
        if self.expected_failure:
            return "XPASS" if self.passed else "XFAIL"
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> Dict:
        out = {"id": self.id, "kind": self.kind, "status": self.status,
               "quantities": self.quantities, "expected": self.expected,
               "abs_diff": self.abs_diff}
        if self.expected_failure:
            out["expected_failure"] = self.expected_failure
        return out


@dataclass
class PaperSuiteResult:
    digits: int
    terms: int
    entries: List[EntryResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """True when every entry passes, ignoring documented expected failures
        that do fail."""
        return all(e.status in ("PASS", "XFAIL") for e in self.entries)

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for e in self.entries:
            out[e.status] = out.get(e.status, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> Dict:
        return {"suite_version": SUITE_VERSION, "digits": self.digits, "terms": self.terms,
                "counts": self.counts(), "entries": [e.to_json() for e in self.entries]}


def _s(x, digits: int = 20) -> str:
    return mpmath.nstr(x, digits)


class _Runner:
    def __init__(self, corpus: Dict, ctx: PrecisionContext, terms: int):
        self.ctx = ctx
        self.terms = terms
        self.field_defs = corpus["fields"]
        self._fields: Dict[str, NumberField] = {}

    def field(self, entry: Dict) -> NumberField:
        if "p" in entry and "field" not in entry:
            return cyclotomic_field(entry["p"])
        key = entry["field"]
        if key not in self._fields:
            data = dict(self.field_defs[key])
            data.setdefault("name", key)
            self._fields[key] = field_from_json(data)
        return self._fields[key]

    def elements(self, entry: Dict, F: NumberField) -> List[FormalSum]:
        if "element" in entry:
            return [parse_formal_sum(F, entry["element"])]
        elems = [parse_formal_sum(F, s) for s in entry["elements"]]
        power = entry.get("galois_power")
        if power:
            # complete the basis with the Galois orbit of the first element
            base = elems[0]
            x = base
            while len(elems) < F.r2:
                x = x.map(lambda t: galois_image(t, power))
                elems.append(x)
        return elems

    # kinds ----------------------------------------------------------------
    def character_identity(self, e: Dict) -> EntryResult:
        ctx = self.ctx
        with ctx.workdps():
            chi3 = next(c for c in characters_mod(3) if not c.is_trivial)
            chi6 = DirichletCharacter(6, chi3.generator_exponents)
            l3 = dirichlet_L2(chi3, ctx).real
            l6 = dirichlet_L2(chi6, ctx).real
            d3 = bloch_wigner(mpmath.expjpi(mpf(2) / 3), ctx)
            d6 = bloch_wigner(mpmath.expjpi(mpf(1) / 3), ctx)
            half_root3 = mpmath.sqrt(3) / 2
            ident = e["identity"]
            if ident == "d_zeta3":
                lhs, rhs = d3, half_root3 * l3
            elif ident == "d_zeta6":
                lhs, rhs = d6, half_root3 * (l6 + l3 / 4)
            elif ident == "l_ratio":
                lhs, rhs = l6 / l3, _frac(e["expected"])
            elif ident == "d_ratio":
                lhs, rhs = d6 / d3, _frac(e["expected"])
            else:
                raise ValueError(f"unknown identity {ident!r}")
            diff = abs(lhs - rhs)
        return EntryResult(e["id"], e["kind"], diff < e["tolerance"],
                           {"lhs": _s(lhs, 35), "rhs": _s(rhs, 35)},
                           e.get("expected", "identity"), _s(diff, 3))

    def certificate(self, e: Dict) -> EntryResult:
        F = self.field(e)
        xi = parse_formal_sum(F, e["element"])
        cert = verify_bloch_element(xi, F, self.ctx)
        want = e["expected"]
        if want == "NOT_VERIFIED":
            ok = cert.status is not CertificateStatus.VERIFIED_ZERO
        else:
            ok = cert.status.value == want
        return EntryResult(e["id"], e["kind"], ok, {"status": cert.status.value}, want)

    def dilog_value(self, e: Dict) -> EntryResult:
        F = self.field(e)
        xi = parse_formal_sum(F, e["element"])
        vals = [dilog_value(xi, F, j, self.ctx) for j in range(F.r2)]
        diff = max(abs(v - _frac(e["expected"])) for v in vals)
        return EntryResult(e["id"], e["kind"], diff < e["tolerance"],
                           {"values": [_s(v, 10) for v in vals]}, e["expected"], _s(diff, 3))

    def distribution(self, e: Dict) -> EntryResult:
        F = self.field(e)
        x = parse_element(F, e["x"])
        xi = distribution_sum(x, F.gen(), e["n"])
        vals = [dilog_value(xi, F, j, self.ctx) for j in range(F.r2)]
        diff = max(abs(v) for v in vals)
        return EntryResult(e["id"], e["kind"], diff < e["tolerance"],
                           {"residuals": [_s(v, 5) for v in vals]}, "0", _s(diff, 3))

    def regulator(self, e: Dict) -> EntryResult:
        F = self.field(e)
        reg = regulator(F, self.elements(e, F), self.ctx)
        value = abs(reg.det)
        diff = abs(value - mpf(e["expected"]))
        return EntryResult(e["id"], e["kind"], diff < e["tolerance"],
                           {"regulator": _s(value)}, e["expected"], _s(diff, 3))

    def zeta2(self, e: Dict) -> EntryResult:
        F = self.field(e)
        z = dedekind_zeta2(F, self.terms, self.ctx)
        diff = abs(z.value - mpf(e["expected"]))
        ok = diff <= z.tail_bound and z.tail_bound < 1e-5
        return EntryResult(e["id"], e["kind"], ok, z.to_json(16), e["expected"], _s(diff, 3))

    def invariants(self, e: Dict) -> EntryResult:
        F = self.field(e)
        ok = F.disc == e["disc"] and list(F.signature) == e["signature"]
        return EntryResult(e["id"], e["kind"], ok,
                           {"disc": F.disc, "signature": list(F.signature)},
                           {"disc": e["disc"], "signature": e["signature"]})

    def w2(self, e: Dict) -> EntryResult:
        F = self.field(e)
        value = w2(F, self.ctx)
        return EntryResult(e["id"], e["kind"], value == e["expected"], {"w2": value},
                           e["expected"])

    def k2(self, e: Dict) -> EntryResult:
        F = self.field(e)
        rep = k2_predict(F, self.elements(e, F), self.ctx, self.terms)
        ok = rep.consistent and rep.nearest_integer == e["expected"]
        q = {"predicted_order": _s(rep.predicted_order, 16),
             "nearest_integer": rep.nearest_integer,
             "deviation": _s(rep.deviation, 3),
             "error_budget": _s(rep.error_budget, 3)}
        return EntryResult(e["id"], e["kind"], ok, q, e["expected"],
                           _s(abs(rep.predicted_order - e["expected"]), 3))

    def cyclo_regulator(self, e: Dict) -> EntryResult:
        r = cyclotomic_regulator_det(e["p"], self.ctx)
        closed = cyclotomic_regulator_closed(e["p"], self.ctx)
        diff = max(abs(r.determinant - closed), abs(r.character_product - closed))
        return EntryResult(e["id"], e["kind"], diff < e["tolerance"],
                           {"determinant": _s(r.determinant, 30),
                            "character_product": _s(r.character_product, 30),
                            "closed_form": _s(closed, 30)},
                           "routes agree", _s(diff, 3))

    def theorem33(self, e: Dict) -> EntryResult:
        rep = theorem33_chain(e["p"], e["k2_plus"], self.ctx)
        diff = abs(rep.left - rep.right_from_input)
        ok = diff < e["tolerance"] and rep.quotient_order == e["expected"]
        q = {"left": _s(rep.left, 25), "right_from_input": _s(rep.right_from_input, 25),
             "right_independent": _s(rep.right, 25),
             "quotient_order": _s(rep.quotient_order, 10),
             "implied_order": _s(rep.implied_order, 25),
             "birch_tate_plus": _s(rep.birch_tate_plus, 25)}
        return EntryResult(e["id"], e["kind"], ok, q, e["expected"], _s(diff, 3))

    def run(self, e: Dict) -> EntryResult:
        handler: Callable[[Dict], EntryResult] = getattr(self, e["kind"])
        res = handler(e)
        res.expected_failure = e.get("expected_failure")
        return res


def _frac(text: str) -> mpf:
    q = Fraction(text)
    return mpf(q.numerator) / q.denominator


def run_suite(ctx: PrecisionContext | None = None, terms: int = DEFAULT_TERMS,
              corpus: Optional[Dict] = None, ids: Optional[List[str]] = None,
              kinds: Optional[List[str]] = None) -> PaperSuiteResult:
    ctx = ctx or PrecisionContext()
    corpus = corpus or load_corpus()
    runner = _Runner(corpus, ctx, terms)
    result = PaperSuiteResult(ctx.digits, terms)
    for entry in corpus["entries"]:
        if ids is not None and entry["id"] not in ids:
            continue
        if kinds is not None and entry["kind"] not in kinds:
            continue
        result.entries.append(runner.run(entry))
    return result
