"""Command line entry point: ``modschur <subcommand> [options]``.

Every subcommand prints one JSON report holding the subcommand, its
parameters, the wall time, a ``status`` and the result fields (also nested
under ``result``).  Exit codes: 0 for a definitive answer, 1 for bad input,
2 when a budget or timeout ran out, 3 when a check was run and failed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from itertools import product
from pathlib import Path

from . import __version__
from .columns_condition import check_columns_condition
from .deuber import check_witness_at, deuber_witness, hj_line_search
from .errors import BudgetExceeded, InputError, SearchTimeout
from .exact_algebra import QQ, Field, _plain, integer_rows, parse_matrix
from .fourier import (
    BohrSet, bohr_bounds_check, bohr_mask, count_monochromatic_triples, regular_pair,
)
from .search import (
    Colouring, ConstraintSystem, Interval, ModularStar, ZMod, export_cnf,
    modular_schur_number, parse_index_list, rado_number, schur_matrix, verify_by_classes,
)

EXIT_OK, EXIT_INPUT, EXIT_LIMIT, EXIT_CHECK_FAILED = 0, 1, 2, 3
MEMBER_LIST_LIMIT = 10_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def _threads(text):
    if text == "auto":
        return text
    return _positive_int(text)


def _field(text):
    try:
        return str(Field.parse(text))
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_matrix(path, field: str | None):
    return parse_matrix(_read(path), Field.parse(field) if field else None)


def _load_integer_matrix(path):
    return integer_rows(parse_matrix(_read(path), QQ))


# -- subcommands -----------------------------------------------------------
# Each returns (status, payload) with status one of the exit codes.


def cmd_cc(args):
    A = _load_matrix(args.matrix, args.field)
    witness = check_columns_condition(A)
    return EXIT_OK, {
        "satisfies": witness is not None,
        "partition": witness.tolist() if witness else None,
        "field": str(A.field),
        "shape": list(A.shape),
    }


def cmd_deuber(args):
    A = _load_matrix(args.matrix, args.field)
    partition = check_columns_condition(A)
    if partition is None:
        return EXIT_OK, {"satisfies": False, "field": str(A.field)}
    w = deuber_witness(A, partition)
    field = A.field
    if field.is_rational or field.modulus ** w.d > args.exhaustive_limit:
        rng = random.Random(args.seed)
        if field.is_rational:
            ts = [tuple(QQ(rng.randint(-50, 50)) / rng.randint(1, 20) for _ in range(w.d))
                  for _ in range(args.samples)]
        else:
            ts = [tuple(rng.randrange(field.modulus) for _ in range(w.d))
                  for _ in range(args.samples)]
        mode = "random"
    else:
        ts = list(product(range(field.modulus), repeat=w.d))
        mode = "exhaustive"
    failures = [t for t in ts if not check_witness_at(A, w, t)]
    passed = not failures
    payload = {
        "satisfies": True,
        "field": str(field),
        "partition": partition.tolist(),
        "merged_partition": w.partition.tolist(),
        "d": w.d,
        "F": [_plain(x) for x in sorted(w.F, key=lambda x: getattr(x, "value", x))],
        "W": w.W.tolist(),
        "column_map": list(w.column_map),
        "F_size": len(w.F),
        "size_bound": w.size_bound,
        "verification": {
            "mode": mode,
            "checked": len(ts),
            "passed": passed,
            "failures": [[_plain(field(x)) for x in t] for t in failures[:5]],
        },
    }
    return (EXIT_OK if passed else EXIT_CHECK_FAILED), payload


def cmd_hj(args):
    text = _read(args.colouring)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith(("#", "ground="))]
    colours = parse_index_list(" ".join(lines))
    line = hj_line_search(args.k, args.dims, colours,
                          budget=args.budget or 10**6)
    if line is None:
        return EXIT_OK, {"found": False}
    return EXIT_OK, {
        "found": True,
        "W": list(line.W),
        "z": list(line.z),
        "colour": line.colour,
        "words": [list(w) for w in line.words],
    }


def _number_payload(res):
    return {
        "value": res.value,
        "certificate": res.certificate.certificate if res.certificate else "",
        "ground": res.certificate.ground.header if res.certificate else None,
        "stats": {
            "witness": res.witness_stats.asdict() if res.witness_stats else None,
            "refutation": res.refutation_stats.asdict() if res.refutation_stats else None,
        },
        "decided": {str(k): v for k, v in sorted(res.decided.items())},
    }


def cmd_rado(args):
    A = _load_integer_matrix(args.matrix)
    res = rado_number(A, args.r, budget=args.budget, timeout=args.timeout, max_n=args.max_n)
    return EXIT_OK, _number_payload(res)


def cmd_schur(args):
    if args.modular:
        res = modular_schur_number(args.a, args.r, max_n=args.max_n,
                                   require_coprime=args.require_coprime,
                                   budget=args.budget, timeout=args.timeout)
        payload = _number_payload(res)
        payload["search_range"] = list(res.search_range)
    else:
        if args.require_coprime:
            raise InputError("--require-coprime only applies with --modular")
        res = rado_number(schur_matrix(args.a), args.r, budget=args.budget,
                          timeout=args.timeout, max_n=args.max_n)
        payload = _number_payload(res)
    return EXIT_OK, payload


def _ground(domain: str, n: int):
    return Interval(n) if domain == "interval" else ModularStar(n + 1)


def cmd_export_cnf(args):
    A = _load_integer_matrix(args.matrix)
    system = ConstraintSystem(A, _ground(args.domain, args.n))
    text = export_cnf(system, args.r, **({"budget": args.budget} if args.budget else {}))
    Path(args.out).write_text(text)
    header = next(ln for ln in text.splitlines() if ln.startswith("p "))
    _, _, nvars, nclauses = header.split()
    return EXIT_OK, {"out": str(args.out), "variables": int(nvars), "clauses": int(nclauses),
                     "system": system.describe()}


def cmd_count(args):
    colouring = Colouring.from_text(_read(args.colouring), ground=ZMod(args.n))
    rep = count_monochromatic_triples(colouring.colours, args.a, args.n, method=args.method)
    return EXIT_OK, {"total": rep.total, "per_class": list(rep.per_class), "method": rep.method}


def cmd_bohr(args):
    freqs = parse_index_list(args.freqs)
    b = BohrSet(args.n, tuple(freqs), args.delta)
    kwargs = {"budget": args.budget} if args.budget else {}
    mask = bohr_mask(b, **kwargs)
    size = int(mask.sum())
    payload = {"size": size, "measure": size / args.n, "frequencies": list(b.freqs)}
    if size <= MEMBER_LIST_LIMIT:
        payload["members"] = [int(x) for x in mask.nonzero()[0]]
    status = EXIT_OK
    if args.double_check:
        bounds = bohr_bounds_check(args.n, freqs, args.delta, **kwargs)
        payload["bounds"] = {
            "lower_bound": bounds.lower_bound, "lower_ok": bounds.lower_ok,
            "doubling_ratio": bounds.doubling_ratio, "doubling_bound": bounds.doubling_bound,
            "doubling_ok": bounds.doubling_ok,
        }
        if not (bounds.lower_ok and bounds.doubling_ok):
            status = EXIT_CHECK_FAILED
    if args.regular_eta is not None:
        pair = regular_pair(args.n, freqs, args.delta, args.regular_eta, **kwargs)
        payload["regular_pair"] = {
            "delta_star": pair.delta_star, "delta_prime": pair.delta_prime, "k": pair.k,
            "sumset_ratio": pair.sumset_ratio,
        }
    return status, payload


def cmd_verify(args):
    A = _load_integer_matrix(args.matrix)
    colouring = Colouring.from_text(_read(args.colouring), r=args.r)
    system = ConstraintSystem(A, colouring.ground)
    bad = verify_by_classes(system, colouring)
    payload = {"valid": not bad, "monochromatic_count": len(bad),
               "examples": [list(x) for x in bad[:5]], "ground": colouring.ground.header,
               "colours_used": len(set(colouring.colours))}
    return (EXIT_OK if not bad else EXIT_CHECK_FAILED), payload


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--budget", type=_positive_int, default=None,
                        help="node cap for searches, element cap for enumerations")
    common.add_argument("--timeout", type=_positive_float, default=None, help="seconds")
    common.add_argument("--threads", type=_threads,
                        default=os.environ.get("RADO_THREADS", "auto"),
                        help="worker cap (default $RADO_THREADS or auto)")
    common.add_argument("--output", choices=("json", "tsv"), default="json")

    parser = _Parser(prog="modschur", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("cc", parents=[common], help="columns condition")
    p.add_argument("--matrix", required=True)
    p.add_argument("--field", type=_field)
    p.set_defaults(func=cmd_cc)

    p = sub.add_parser("deuber", parents=[common], help="Deuber witness W, F")
    p.add_argument("--matrix", required=True)
    p.add_argument("--field", type=_field)
    p.add_argument("--samples", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive-limit", type=_positive_int, default=10**5)
    p.set_defaults(func=cmd_deuber)

    p = sub.add_parser("hj", parents=[common], help="combinatorial line search")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--dims", type=_positive_int, required=True)
    p.add_argument("--colouring", required=True)
    p.set_defaults(func=cmd_hj)

    p = sub.add_parser("rado", parents=[common], help="Rado number of Ax = 0")
    p.add_argument("--matrix", required=True)
    p.add_argument("--r", type=_positive_int, required=True)
    p.add_argument("--max-n", type=_positive_int)
    p.set_defaults(func=cmd_rado)

    p = sub.add_parser("schur", parents=[common], help="Schur numbers f_a(r), h_a(r)")
    p.add_argument("--a", type=_positive_int, default=1)
    p.add_argument("--r", type=_positive_int, required=True)
    p.add_argument("--modular", action="store_true")
    p.add_argument("--max-n", type=_positive_int)
    p.add_argument("--require-coprime", action="store_true")
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("export-cnf", parents=[common], help="DIMACS export")
    p.add_argument("--matrix", required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--r", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--domain", choices=("interval", "modstar"), default="interval",
                   help="modstar colours 1..n with arithmetic mod n+1")
    p.set_defaults(func=cmd_export_cnf)

    p = sub.add_parser("count", parents=[common], help="monochromatic a*x = y - z triples")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--colouring", required=True)
    p.add_argument("--method", choices=("fft", "brute"), default="fft")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bohr", parents=[common], help="Bohr set membership and bounds")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--freqs", required=True, help="comma-separated frequencies")
    p.add_argument("--delta", type=_positive_float, required=True)
    p.add_argument("--double-check", action="store_true")
    p.add_argument("--regular-eta", type=_positive_float)
    p.set_defaults(func=cmd_bohr)

    p = sub.add_parser("verify", parents=[common], help="re-check a colouring certificate")
    p.add_argument("--matrix", required=True)
    p.add_argument("--colouring", required=True)
    p.add_argument("--r", type=_positive_int)
    p.set_defaults(func=cmd_verify)
    return parser


_INTERNAL = {"func", "subcommand"}


def _parameters(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in _INTERNAL}


def argv_from_parameters(subcommand: str, parameters: dict) -> list[str]:
    """Rebuild an argument list that reproduces a report's parameters."""
    argv = [subcommand]
    for key, value in parameters.items():
        flag = "--" + key.replace("_", "-")
        if value is None or value is False:
            continue
        if value is True:
            argv.append(flag)
        else:
            argv += [flag, str(value)]
    return argv


def _emit(report: dict, fmt: str, stream):
    if fmt == "tsv":
        for key, value in report.items():
            if key == "result":
                continue
            text = value if isinstance(value, str) else json.dumps(value)
            stream.write(f"{key}\t{text}\n")
    else:
        stream.write(json.dumps(report) + "\n")


_STATUS = {EXIT_OK: "ok", EXIT_CHECK_FAILED: "check_failed"}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    report = {"subcommand": args.subcommand, "parameters": _parameters(args)}
    start = time.monotonic()
    try:
        code, payload = args.func(args)
        report["status"] = _STATUS[code]
    except SearchTimeout as exc:
        code, payload = EXIT_LIMIT, {"error": str(exc)}
        if exc.outcome is not None:
            payload["stats"] = exc.outcome.stats.asdict()
        report["status"] = "timeout"
    except BudgetExceeded as exc:
        code, payload = EXIT_LIMIT, {"error": str(exc)}
        report["status"] = "budget_exceeded"
    except (InputError, ValueError) as exc:
        code, payload = EXIT_INPUT, {"error": str(exc)}
        report["status"] = "input_error"
    report["wall_time"] = round(time.monotonic() - start, 6)
    report["result"] = payload
    for key, value in payload.items():
        report.setdefault(key, value)
    _emit(report, args.output, stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
