"""Command-line front end.

Each command reads one JSON document (``--input`` or stdin) and writes one
JSON report (``--output`` or stdout).  Errors produce an error document and a
distinct exit code per error class.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import jsonio as jio
from .apcore import bohr_mean, sup_norm_estimate, sup_norm_matrix, wiener_norm
from .errors import ApwError, ConditioningError, ParseError
from .factorization import augment_to_square, canonical_test, factorize, verify_factorization
from .geometry import project
from .toepcorona import corona_parametrize, corona_solve, gram_test, toeplitz_truncate

COMMANDS = ("analyze", "project", "factorize", "augment", "toeplitz", "gram", "corona", "parametrize",
            "verify", "corpus")
DEFAULTS_VERSION = 1
DEFAULTS = {"cutoff": 32, "tail_tol": 1e-12, "grid": 4096, "seed": 0}
# factorization statuses that are reported in full but still signal failure
STATUS_EXIT_CODES = {"unsupported_rank": 4, "not_invertible": 5, "completion_failed": 7}


@dataclass
class CliConfig:
    command: str
    input_path: str | None = None
    output_path: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}")
        unknown = set(self.options) - set(DEFAULTS)
        if unknown:
            raise ParseError(f"unknown options {sorted(unknown)}")


def _check_fields(doc: dict, required: set, optional: set, where: str = "input"):
    allowed = required | optional | {"apw_schema"}
    extra = set(doc) - allowed
    if extra:
        raise ParseError(f"{where}: unknown fields {sorted(extra)}")
    missing = required - set(doc)
    if missing:
        raise ParseError(f"{where}: missing fields {sorted(missing)}")


def _options(doc: dict, flags: dict) -> dict:
    """Flag values win over request values, which win over defaults."""
    opts = dict(DEFAULTS)
    if "cutoff" in doc:
        opts["cutoff"] = jio._int(doc["cutoff"], "cutoff")
    tol = doc.get("tolerances", {})
    if not isinstance(tol, dict) or set(tol) - {"tail_tol", "grid", "seed"}:
        raise ParseError("tolerances: only tail_tol, grid and seed are recognized")
    for k, v in tol.items():
        opts[k] = jio._number(v, f"tolerances.{k}") if k == "tail_tol" else jio._int(v, f"tolerances.{k}")
    opts.update({k: v for k, v in flags.items() if v is not None})
    return opts


def _report_options(opts: dict, *keys) -> dict:
    return {k: opts[k] for k in keys}


# --- commands --------------------------------------------------------------------

def cmd_analyze(doc, opts):
    _check_fields(doc, set(), {"f", "F"})
    if ("f" in doc) == ("F" in doc):
        raise ParseError('analyze needs exactly one of "f" or "F"')
    if "f" in doc:
        f = jio.poly_from_json(doc["f"], "f")
        return {
            "spectrum": [list(c) for c in sorted(f.terms)],
            "wiener_norm": wiener_norm(f),
            "bohr_mean": jio.complex_to_json(bohr_mean(f)),
            "sup_norm_estimate": sup_norm_estimate(f, opts["grid"], opts["seed"]),
            "options": _report_options(opts, "grid", "seed"),
        }
    F = jio.matrix_from_json(doc["F"], "F")
    return {
        "spectrum": [list(c) for c in sorted(F.spectrum())],
        "wiener_norm": F.wiener_norm(),
        "bohr_mean": [[jio.complex_to_json(bohr_mean(e)) for e in row] for row in F.entries],
        "sup_norm_estimate": sup_norm_matrix(F, opts["grid"], opts["seed"]),
        "options": _report_options(opts, "grid", "seed"),
    }


def cmd_project(doc, opts):
    _check_fields(doc, {"mask"}, {"f", "F", "S"})
    S = jio.halfspace_from_json(doc["S"]) if "S" in doc else None
    mask = jio.mask_from_json(doc["mask"], S)
    if "f" in doc:
        return {"result": jio.poly_to_json(project(jio.poly_from_json(doc["f"], "f"), mask))}
    return {"result": jio.matrix_to_json(project(jio.matrix_from_json(doc["F"], "F"), mask))}


def _factorize_doc(doc, opts):
    G = jio.matrix_or_poly_from_json(doc["G"], "G")
    S = jio.halfspace_from_json(doc["S"])
    pivot = jio._int(doc["pivot"], "pivot") if "pivot" in doc else None
    return G, S, factorize(G, S, pivot, opts["tail_tol"])


def _verification_json(v) -> dict:
    opt = lambda x: None if x is None else jio.finite(x)  # noqa: E731
    return {
        "residual": v.residual,
        "plus_mask_ok": v.plus_mask_ok,
        "minus_mask_ok": v.minus_mask_ok,
        "index_order_ok": v.index_order_ok,
        "plus_right_inverse_residual": opt(v.plus_right_inverse_residual),
        "minus_left_inverse_residual": opt(v.minus_left_inverse_residual),
        "violations": list(v.violations),
        "passes": v.passes,
    }


def cmd_factorize(doc, opts):
    _check_fields(doc, {"G", "S"}, {"pivot", "tolerances"})
    G, S, rep = _factorize_doc(doc, opts)
    out = {"status": rep.status, "diagnostics": rep.diagnostics,
           "options": _report_options(opts, "tail_tol")}
    if rep.factorization is not None:
        out["factorization"] = jio.factorization_to_json(rep.factorization)
        out["verification"] = _verification_json(verify_factorization(G, rep.factorization, opts["tail_tol"]))
    if G.m == G.n and rep.status != "unsupported_rank":
        v = canonical_test(G, S)
        out["canonical_test"] = {"verdict": v.verdict, "cutoffs": list(v.cutoffs), "sigma_min": list(v.sigma_min)}
    return out


def cmd_augment(doc, opts):
    _check_fields(doc, {"G", "S"}, {"factorization", "pivot", "tolerances"})
    G = jio.matrix_or_poly_from_json(doc["G"], "G")
    S = jio.halfspace_from_json(doc["S"])
    if "factorization" in doc:
        fact = jio.factorization_from_json(doc["factorization"], S)
    else:
        _, _, rep = _factorize_doc(doc, opts)
        if rep.factorization is None:
            raise _status_error(rep)
        fact = rep.factorization
    F, ff = augment_to_square(G, fact, S)
    return {"F": jio.matrix_to_json(F), "factorization": jio.factorization_to_json(ff),
            "options": _report_options(opts, "tail_tol")}


def _status_error(rep) -> ApwError:
    from .errors import CompletionError, NotInvertibleError, UnsupportedRankError

    cls = {"not_invertible": NotInvertibleError, "unsupported_rank": UnsupportedRankError,
           "completion_failed": CompletionError}[rep.status]
    return cls(rep.diagnostics)


def cmd_toeplitz(doc, opts):
    _check_fields(doc, {"F", "S"}, {"cutoff"})
    F = jio.matrix_or_poly_from_json(doc["F"], "F")
    T = toeplitz_truncate(F, jio.halfspace_from_json(doc["S"]), opts["cutoff"])
    return {"index_set": [list(l.coords) for l in T.index_set], "symbol_shape": list(T.symbol_shape),
            "matrix": jio.dense_to_json(T.matrix), "options": _report_options(opts, "cutoff")}


def _corona_inputs(doc):
    A = jio.matrix_from_json(doc["A"], "A")
    B = jio.matrix_from_json(doc["B"], "B")
    gamma = jio._number(doc["gamma"], "gamma")
    return A, B, gamma, jio.halfspace_from_json(doc["S"])


def cmd_gram(doc, opts):
    _check_fields(doc, {"A", "B", "gamma", "S"}, {"cutoff", "tolerances"})
    A, B, gamma, S = _corona_inputs(doc)
    g = gram_test(A, B, gamma, S, opts["cutoff"], grid=opts["grid"], seed=opts["seed"])
    return {"verdict": g.verdict, "passes": g.passes, "margin": g.margin, "threshold": g.threshold,
            "size": g.size, "note": g.note, "options": _report_options(opts, "cutoff", "grid", "seed")}


def _solution_json(sol) -> dict:
    opt = lambda M: None if M is None else jio.matrix_to_json(M)  # noqa: E731
    return {
        "C": jio.matrix_to_json(sol.C), "D": jio.matrix_to_json(sol.D), "R": jio.matrix_to_json(sol.R),
        "J0": [int(x) for x in np.diag(sol.J0)],
        "theta11": opt(sol.theta11), "theta12": jio.matrix_to_json(sol.theta12),
        "theta21": opt(sol.theta21), "theta22": jio.matrix_to_json(sol.theta22),
        "F0": jio.matrix_to_json(sol.F0), "gamma": sol.gamma,
        "residuals": {k: jio.finite(v) for k, v in sorted(sol.residuals.items())},
    }


def _solve(doc, opts):
    A, B, gamma, S = _corona_inputs(doc)
    return corona_solve(A, B, gamma, S, opts["cutoff"], opts["tail_tol"], opts["grid"], opts["seed"])


def cmd_corona(doc, opts):
    _check_fields(doc, {"A", "B", "gamma", "S"}, {"cutoff", "tolerances"})
    return {"solution": _solution_json(_solve(doc, opts)),
            "options": _report_options(opts, "cutoff", "tail_tol", "grid", "seed")}


def cmd_parametrize(doc, opts):
    _check_fields(doc, {"A", "B", "gamma", "S"}, {"G", "cutoff", "tolerances"})
    sol = _solve(doc, opts)
    G = jio.matrix_from_json(doc["G"], "G") if "G" in doc else None
    par = corona_parametrize(sol, G, opts["tail_tol"])
    return {"F": jio.matrix_to_json(par.F), "gamma": sol.gamma,
            "certificates": {k: jio.finite(v) for k, v in sorted(par.certificates.items())},
            "options": _report_options(opts, "cutoff", "tail_tol", "grid", "seed")}


def cmd_verify(doc, opts):
    _check_fields(doc, {"G", "factorization"}, {"S", "tolerances"})
    G = jio.matrix_or_poly_from_json(doc["G"], "G")
    S = jio.halfspace_from_json(doc["S"]) if "S" in doc else None
    fact = jio.factorization_from_json(doc["factorization"], S)
    return {"verification": _verification_json(verify_factorization(G, fact, opts["tail_tol"])),
            "options": _report_options(opts, "tail_tol")}


HANDLERS: dict[str, Callable] = {
    "analyze": cmd_analyze, "project": cmd_project, "factorize": cmd_factorize, "augment": cmd_augment,
    "toeplitz": cmd_toeplitz, "gram": cmd_gram, "corona": cmd_corona, "parametrize": cmd_parametrize,
    "verify": cmd_verify,
}


def run_command(command: str, doc: dict, flags: dict | None = None) -> tuple[int, dict]:
    """Run one command on a parsed document; returns (exit code, report)."""
    try:
        opts = _options(doc, flags or {})
        report = HANDLERS[command](doc, opts)
        return STATUS_EXIT_CODES.get(report.get("status"), 0), jio.document(command=command, **report)
    except np.linalg.LinAlgError as exc:
        return _error_doc(command, ConditioningError(f"linear algebra failure: {exc}"))
    except ApwError as exc:
        return _error_doc(command, exc)


def _error_doc(command: str, exc: ApwError) -> tuple[int, dict]:
    return exc.exit_code, jio.document(command=command, error={
        "class": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code})


# --- corpus ----------------------------------------------------------------------

def corpus_dir() -> Path:
    return Path(str(resources.files("apwiener") / "corpus"))


def _lookup(report: dict, path: str):
    cur = report
    for part in path.split("."):
        if isinstance(cur, list):
            cur = cur[int(part)]
        elif isinstance(cur, dict) and part in cur:
            cur = cur[part]
        else:
            raise KeyError(path)
    return cur


def _check(value, spec: dict) -> bool:
    if "equals" in spec:
        return value == spec["equals"]
    v = float(value)
    ok = True
    if "max" in spec:
        ok &= v <= spec["max"]
    if "min" in spec:
        ok &= v >= spec["min"]
    if "value" in spec:
        ok &= abs(v - spec["value"]) <= spec.get("tol", 0.0)
    return bool(ok)


def run_corpus(directory: Path | None = None, flags: dict | None = None) -> tuple[int, dict]:
    directory = Path(directory) if directory else corpus_dir()
    results = []
    failed = 0
    for path in sorted(directory.glob("*.json")):
        inst = jio.loads(path.read_text())
        _check_fields(inst, {"name", "command", "input", "expected"}, {"options"}, path.name)
        code, report = run_command(inst["command"], jio.document(**inst["input"]), inst.get("options", {}))
        checks = []
        for key, spec in sorted(inst["expected"].items()):
            try:
                actual = code if key == "exit_code" else _lookup(report, key)
                ok = (actual == spec["equals"]) if key == "exit_code" else _check(actual, spec)
            except (KeyError, IndexError, ValueError, TypeError):
                actual, ok = None, False
            checks.append({"field": key, "expected": spec, "actual": actual, "ok": ok})
        ok = all(c["ok"] for c in checks)
        failed += not ok
        results.append({"name": inst["name"], "file": path.name, "command": inst["command"],
                        "exit_code": code, "ok": ok, "checks": checks})
    summary = jio.document(command="corpus", instances=results, passed=len(results) - failed, failed=failed)
    return (0 if failed == 0 else 1), summary


# --- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="apwiener", description="AP Wiener algebra factorization and corona tools")
    ap.add_argument("command_pos", nargs="?", choices=COMMANDS, metavar="COMMAND", help="command to run")
    ap.add_argument("--command", choices=COMMANDS, help="command to run (alternative to the positional form)")
    ap.add_argument("--input", help="input JSON file (stdin when omitted); for corpus, a directory")
    ap.add_argument("--output", help="output JSON file (stdout when omitted)")
    ap.add_argument("--cutoff", type=int, help=f"truncation cutoff (default {DEFAULTS['cutoff']})")
    ap.add_argument("--tail-tol", type=float, dest="tail_tol", help=f"series tail tolerance (default {DEFAULTS['tail_tol']})")
    ap.add_argument("--grid", type=int, help=f"sample grid size (default {DEFAULTS['grid']})")
    ap.add_argument("--seed", type=int, help=f"grid seed (default {DEFAULTS['seed']})")
    return ap


def run(config: CliConfig) -> tuple[int, dict]:
    flags = dict(config.options)
    if config.command == "corpus":
        return run_corpus(Path(config.input_path) if config.input_path else None, flags)
    try:
        text = Path(config.input_path).read_text() if config.input_path else sys.stdin.read()
        doc = jio.loads(text)
    except OSError as exc:
        return _error_doc(config.command, ParseError(f"cannot read input: {exc}"))
    except ParseError as exc:
        return _error_doc(config.command, exc)
    return run_command(config.command, doc, flags)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command or args.command_pos
    if command is None:
        print("apwiener: a command is required", file=sys.stderr)
        return ParseError.exit_code
    if args.command and args.command_pos and args.command != args.command_pos:
        print("apwiener: conflicting commands", file=sys.stderr)
        return ParseError.exit_code
    options = {k: getattr(args, k) for k in DEFAULTS if getattr(args, k) is not None}
    code, report = run(CliConfig(command, args.input, args.output, options))
    text = jio.dumps(report)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if "error" in report:
        print(f"apwiener: {report['error']['class']}: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
