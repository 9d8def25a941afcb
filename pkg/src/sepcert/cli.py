"""Command-line front end.

Every command first builds one JSON-serialisable document; the human
format is rendered from that document. Exit codes: 0 success (including
inconclusive verdicts), 1 a property suite failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .composite import bipartitions, is_ppt, is_ppt_bipartition
from .detectors import run_detectors
from .io import MatrixFormatError, read_matrix
from .modulus import BISECTION_TOL, estimate_modulus, l_constant
from .simplex import gap_coefficients, to_barycentric
from .state import StateValidationError, as_dims, spectrum, validate
from .tables import format_number, table_document
from .thermal import DEFAULT_RESTARTS, Hamiltonian, gibbs, thermal_window
from .verify import SUITES, run_suite

SCHEMA_VERSION = 1
DEFAULT_SEED = 42


class InputError(Exception):
    pass


def parse_dims(text: str):
    parts = text.replace("x", ",").split(",")
    try:
        dims = [int(p) for p in parts if p.strip()]
        return as_dims(dims)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid dims {text!r}: {e}") from None


def _floats(a) -> list:
    return [float(x) for x in a]


def _load_state(args):
    if not args.input:
        raise InputError("an input matrix file is required")
    try:
        dims, m = read_matrix(args.input)
        return validate(m, args.dims or dims)
    except OSError as e:
        raise InputError(f"{args.input}: {e.strerror}") from None
    except (MatrixFormatError, StateValidationError, ValueError) as e:
        raise InputError(f"{args.input}: {e}") from None


def _ppt_section(rho) -> dict:
    if rho.dims.n_factors == 2:
        rep = is_ppt(rho)
        return {"cut": [1], "min_pt_eigenvalue": rep.min_pt_eigenvalue, "is_ppt": rep.is_ppt}
    cuts = []
    for part in bipartitions(rho.dims.n_factors):
        rep = is_ppt_bipartition(rho, part)
        cuts.append({"cut": list(part), "min_pt_eigenvalue": rep.min_pt_eigenvalue,
                     "is_ppt": rep.is_ppt})
    return {"cuts": cuts, "is_ppt": all(c["is_ppt"] for c in cuts)}


# -- commands ---------------------------------------------------------------

def cmd_spec(args) -> tuple:
    rho = _load_state(args)
    lam = spectrum(rho)
    mu, tail = gap_coefficients(lam)
    return {
        "dims": list(rho.dims.factors),
        "spectrum": _floats(lam),
        "barycentric": _floats(to_barycentric(lam)),
        "gap_coefficients": {"mu": _floats(mu), "tail_weight": float(tail)},
        "min_eigenvalue": float(lam[-1]),
    }, 0


def _detect_document(rho) -> dict:
    reports = run_detectors(rho)
    return {
        "dims": list(rho.dims.factors),
        "reports": [r.to_dict() for r in reports],
        "verdict": "certified-separable" if any(r.certified for r in reports) else "inconclusive",
        "ppt": _ppt_section(rho),
    }


def cmd_detect(args) -> tuple:
    return _detect_document(_load_state(args)), 0


def cmd_modulus(args) -> tuple:
    rho = _load_state(args)
    est = estimate_modulus(rho, args.tol or BISECTION_TOL)
    lb = l_constant(rho.dims)
    return {
        "dims": list(rho.dims.factors),
        "modulus": {
            "lower": est.lower,
            "upper": est.upper,
            "value": est.value,
            "exact": est.exact,
            "method": est.method,
            "robustness": est.robustness,
        },
        "L": {"value": lb.value, "provenance": lb.provenance, **format_number(lb.fraction)},
    }, 0


def _beta_from_args(args):
    if args.beta is not None:
        return args.beta
    if args.temperature is not None:
        t = args.temperature
        if t <= 0 and not math.isinf(t):
            raise InputError("temperature must be positive (use inf for beta = 0)")
        return 0.0 if math.isinf(t) else 1.0 / t
    return None


def cmd_thermal(args) -> tuple:
    if not args.input:
        raise InputError("an input Hamiltonian file is required")
    try:
        dims, m = read_matrix(args.input)
        h = Hamiltonian.from_matrix(m, args.dims or dims)
    except OSError as e:
        raise InputError(f"{args.input}: {e.strerror}") from None
    except (MatrixFormatError, ValueError) as e:
        raise InputError(f"{args.input}: {e}") from None
    beta_max = args.beta_max if args.beta_max is not None else 10.0
    if beta_max <= 0:
        raise InputError("--beta-max must be positive")
    window = thermal_window(h, beta_max=beta_max, tol=args.tol or 1e-9,
                            restarts=args.restarts, seed=args.seed)
    doc = {"dims": list(h.dims.factors), "beta_max": beta_max, "window": window.to_dict()}
    beta = _beta_from_args(args)
    if beta is not None:
        doc["state"] = {"beta": beta, **_detect_document(gibbs(h, beta))}
    return doc, 0


def cmd_table(args) -> tuple:
    if args.dims is None:
        raise InputError("table needs --dims")
    return table_document(args.dims), 0


def cmd_verify(args) -> tuple:
    outdir = Path(args.counterexample_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    results = run_suite(args.suite, samples=args.samples, seed=args.seed,
                        counterexample_dir=outdir)
    failed = [r for r in results if not r.passed]
    doc = {
        "suite": args.suite,
        "seed": args.seed,
        "checks": [r.to_dict() for r in results],
        "passed": len(results) - len(failed),
        "failed": len(failed),
    }
    return doc, 1 if failed else 0


COMMANDS = {
    "spec": cmd_spec,
    "detect": cmd_detect,
    "modulus": cmd_modulus,
    "thermal": cmd_thermal,
    "verify": cmd_verify,
    "table": cmd_table,
}


# -- rendering --------------------------------------------------------------

def render_structured(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _is_leaf(v) -> bool:
    if isinstance(v, dict):
        return not v or set(v) == {"fraction", "decimal"}
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    return True


def _scalar(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, dict) and v:
        return v["decimal"] if v["fraction"] is None else f"{v['fraction']} ({v['decimal']})"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def _render(value, indent: int, lines: list):
    pad = "  " * indent
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            if _is_leaf(v):
                lines.append(f"{pad}{k}: {_scalar(v)}")
            else:
                lines.append(f"{pad}{k}:")
                _render(v, indent + 1, lines)
    else:
        for item in value:
            if _is_leaf(item):
                lines.append(f"{pad}- {_scalar(item)}")
            else:
                lines.append(f"{pad}-")
                _render(item, indent + 1, lines)


def render_human(doc: dict) -> str:
    lines = []
    _render({k: v for k, v in doc.items() if k != "schema_version"}, 0, lines)
    return "\n".join(lines) + "\n"


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dims", type=parse_dims, default=None,
                        help="factor dimensions, e.g. 2,3 (overrides the file)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--samples", type=int, default=None,
                        help="samples per check (verify); default per suite")
    common.add_argument("--tol", type=float, default=None, help="bisection tolerance")
    common.add_argument("--beta-max", type=float, default=None)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="sepcert", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("spec", "detect", "modulus"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input", help="matrix JSON file")
    sp = sub.add_parser("thermal", parents=[common])
    sp.add_argument("input", help="Hamiltonian JSON file (same format)")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--beta", type=float, default=None, help="also analyse rho_beta")
    g.add_argument("--temperature", type=float, default=None,
                   help="T = 1/beta; 'inf' means beta = 0")
    sp.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    sp = sub.add_parser("verify", parents=[common])
    sp.add_argument("suite", choices=SUITES + ("all",))
    sp.add_argument("--counterexample-dir", default=".")
    sub.add_parser("table", parents=[common])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.samples is not None and args.samples < 1:
        parser.error("--samples must be >= 1")
    if args.tol is not None and not args.tol > 0:
        parser.error("--tol must be positive")
    try:
        result, code = COMMANDS[args.command](args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    doc = {"schema_version": SCHEMA_VERSION, "command": args.command, "result": result}
    text = render_structured(doc) if args.format == "structured" else render_human(doc)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
