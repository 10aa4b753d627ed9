"""Command-line interface: ``bloch-k2 <command> [options]``.

Exit codes: 0 success, 2 verification inconclusive, 3 numeric tolerance
failure, 4 input error, 5 unsupported field.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

from . import __version__
from .apnum import (DEFAULT_DIGITS, DIGITS_ENV_VAR, PrecisionContext, PrecisionError, bloch_wigner, li2,
                    to_complex)
from .bloch import CertificateStatus, DegenerateInputError, load_formal_sums, verify_bloch_element
from .lichtenbaum import (SingularRegulatorError, UncertifiedElementError,
                          cyclotomic_regulator_closed, cyclotomic_regulator_det, k2_predict,
                          theorem33_chain, w2)
from .nfield import FieldError, NonMaximalOrderError, field_from_json
from .suite import run_suite
from .zeta import DEFAULT_TERMS, MIN_TERMS, TermBudgetError, dedekind_zeta2

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_TOLERANCE = 3
EXIT_INPUT = 4
EXIT_UNSUPPORTED = 5

COMMANDS = ("dilog", "field-info", "verify-bloch", "zeta2", "k2-predict", "cyclo", "paper-suite")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    digits: int = DEFAULT_DIGITS
    terms: int = DEFAULT_TERMS
    field_path: Optional[Path] = None
    elements_path: Optional[Path] = None
    output_format: str = "json"
    output_path: Optional[Path] = None
    z: Optional[str] = None
    p: Optional[int] = None
    check: str = "regulator"
    k2_plus: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.digits < 15:
            raise InputError("digits must be >= 15")
        if self.terms < MIN_TERMS:
            raise InputError(f"terms must be >= {MIN_TERMS}")
        if self.output_format not in ("json", "text"):
            raise InputError("format must be json or text")

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.digits)


def _need(value, flag: str):
    if value is None:
        raise InputError(f"{flag} is required for this command")
    return value


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})")


def _field(cfg: RunConfig):
    return field_from_json(_read_json(_need(cfg.field_path, "--field")))


def _elements(cfg: RunConfig, F):
    data = _read_json(_need(cfg.elements_path, "--elements"))
    try:
        return load_formal_sums(F, data)
    except (SyntaxError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"could not parse elements: {exc}")


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report)
# ---------------------------------------------------------------------------

def cmd_dilog(cfg: RunConfig) -> Tuple[int, Dict]:
    z = _need(cfg.z, "--z")
    ctx = cfg.ctx
    try:
        with ctx.workdps():
            zc = to_complex(z)
    except ValueError as exc:
        raise InputError(str(exc))
    res = li2(zc, ctx)
    d = bloch_wigner(zc, ctx)
    n = cfg.digits
    return EXIT_OK, {
        "z": z,
        "li2": {"re": mpmath.nstr(res.value.real, n), "im": mpmath.nstr(res.value.imag, n)},
        "on_cut": res.on_cut,
        "bloch_wigner": mpmath.nstr(d, n),
    }


def cmd_field_info(cfg: RunConfig) -> Tuple[int, Dict]:
    F = _field(cfg)
    ctx = cfg.ctx
    zeta, w = F.torsion_generator(ctx)
    emb = []
    for r in F.roots(ctx):
        emb.append({"re": mpmath.nstr(r.real, 20), "im": mpmath.nstr(r.imag, 20)})
    return EXIT_OK, {
        "poly": list(F.defining_poly),
        "degree": F.degree,
        "signature": list(F.signature),
        "disc": F.disc,
        "poly_disc": F.poly_disc,
        "maximality": {str(k): v for k, v in sorted(F.maximality_cert.items())},
        "embeddings": emb,
        "roots_of_unity": w,
        "torsion_generator": zeta.to_string(),
        "w2": w2(F, ctx),
    }


def cmd_verify_bloch(cfg: RunConfig) -> Tuple[int, Dict]:
    F = _field(cfg)
    elems = _elements(cfg, F)
    out = []
    code = EXIT_OK
    for xi in elems:
        cert = verify_bloch_element(xi, F, cfg.ctx)
        out.append({"element": xi.to_string()} | cert.to_json())
        if cert.status is not CertificateStatus.VERIFIED_ZERO:
            code = EXIT_INCONCLUSIVE
    return code, {"field": list(F.defining_poly), "certificates": out}


def cmd_zeta2(cfg: RunConfig) -> Tuple[int, Dict]:
    F = _field(cfg)
    res = dedekind_zeta2(F, cfg.terms, cfg.ctx)
    return EXIT_OK, res.to_json(16)


def cmd_k2_predict(cfg: RunConfig) -> Tuple[int, Dict]:
    F = _field(cfg)
    elems = _elements(cfg, F)
    rep = k2_predict(F, elems, cfg.ctx, cfg.terms)
    return (EXIT_OK if rep.consistent else EXIT_TOLERANCE), rep.to_json()


def cmd_cyclo(cfg: RunConfig) -> Tuple[int, Dict]:
    p = _need(cfg.p, "--p")
    ctx = cfg.ctx
    if cfg.check == "regulator":
        r = cyclotomic_regulator_det(p, ctx)
        closed = cyclotomic_regulator_closed(p, ctx)
        diff = max(abs(r.determinant - closed), abs(r.character_product - closed))
        tol = mpmath.mpf(10) ** (-(ctx.digits - ctx.guard))
        report = r.to_json() | {"closed_form": mpmath.nstr(closed, 30),
                                "max_difference": mpmath.nstr(diff, 6)}
        return (EXIT_OK if diff < tol else EXIT_TOLERANCE), report
    k2_plus = _need(cfg.k2_plus, "--k2-plus")
    rep = theorem33_chain(p, k2_plus, ctx)
    ok = abs(rep.left - rep.right_from_input) < mpmath.mpf(10) ** (-(ctx.digits - ctx.guard))
    return (EXIT_OK if ok else EXIT_TOLERANCE), rep.to_json()


def cmd_paper_suite(cfg: RunConfig) -> Tuple[int, Dict]:
    res = run_suite(cfg.ctx, cfg.terms)
    return (EXIT_OK if res.ok else EXIT_TOLERANCE), res.to_json()


HANDLERS = {
    "dilog": cmd_dilog,
    "field-info": cmd_field_info,
    "verify-bloch": cmd_verify_bloch,
    "zeta2": cmd_zeta2,
    "k2-predict": cmd_k2_predict,
    "cyclo": cmd_cyclo,
    "paper-suite": cmd_paper_suite,
}


def run(cfg: RunConfig) -> Tuple[int, Dict]:
    """Execute a command; errors are mapped to exit codes, never raised."""
    try:
        code, result = HANDLERS[cfg.command](cfg)
    except NonMaximalOrderError as exc:
        code, result = EXIT_UNSUPPORTED, {"error": str(exc)}
    except (InputError, FieldError, DegenerateInputError, UncertifiedElementError,
            TermBudgetError) as exc:
        code, result = EXIT_INPUT, {"error": str(exc)}
    except (PrecisionError, SingularRegulatorError) as exc:
        code, result = EXIT_TOLERANCE, {"error": str(exc)}
    except ValueError as exc:
        code, result = EXIT_INPUT, {"error": str(exc)}
    status = {EXIT_OK: "ok", EXIT_INCONCLUSIVE: "inconclusive", EXIT_TOLERANCE: "tolerance_failure",
              EXIT_INPUT: "input_error", EXIT_UNSUPPORTED: "unsupported_field"}[code]
    return code, {"command": cfg.command, "version": __version__, "status": status,
                  "exit_code": code, "digits": cfg.digits, "result": result}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _flatten(obj, prefix: str = "") -> List[str]:
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            lines += _flatten(v, f"{prefix}{k}.")
        return lines
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        lines = []
        for i, v in enumerate(obj):
            lines += _flatten(v, f"{prefix}{i}.")
        return lines
    return [f"{prefix[:-1]}: {obj}"]


def render(report: Dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    return "\n".join(_flatten(report)) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bloch-k2",
        description="Bloch group certificates, dilogarithm regulators and K2 order predictions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=None,
                        help=f"decimal working precision (default ${DIGITS_ENV_VAR} or {DEFAULT_DIGITS})")
    common.add_argument("--format", dest="output_format", choices=("json", "text"), default="json")
    common.add_argument("--output", type=Path, default=None, help="also write the report here")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dilog", parents=[common], help="Li2(z) and D(z)")
    p.add_argument("--z", required=True, help='complex number, e.g. "0.5+0.5i"')

    p = sub.add_parser("field-info", parents=[common], help="signature, discriminant, embeddings")
    p.add_argument("--field", dest="field_path", type=Path, required=True)

    p = sub.add_parser("verify-bloch", parents=[common], help="boundary certificates")
    p.add_argument("--field", dest="field_path", type=Path, required=True)
    p.add_argument("--elements", dest="elements_path", type=Path, required=True)

    for name, needs_elements in (("zeta2", False), ("k2-predict", True)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--field", dest="field_path", type=Path, required=True)
        if needs_elements:
            p.add_argument("--elements", dest="elements_path", type=Path, required=True)
        p.add_argument("--terms", type=int, default=DEFAULT_TERMS)

    p = sub.add_parser("cyclo", parents=[common], help="cyclotomic regulator checks")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--check", choices=("regulator", "theorem33"), default="regulator")
    p.add_argument("--k2-plus", dest="k2_plus", type=int, default=None)

    p = sub.add_parser("paper-suite", parents=[common], help="run the bundled example corpus")
    p.add_argument("--terms", type=int, default=DEFAULT_TERMS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    digits = args.digits if args.digits is not None else PrecisionContext.from_env().digits
    kwargs = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    kwargs["digits"] = digits
    kwargs["output_path"] = args.output
    return RunConfig(**kwargs)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (InputError, ValueError) as exc:
        print(f"bloch-k2: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, report = run(cfg)
    text = render(report, cfg.output_format)
    sys.stdout.write(text)
    if cfg.output_path is not None:
        cfg.output_path.write_text(text)
    if "error" in report["result"]:
        print(f"bloch-k2: {report['result']['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
