"""Command line front end.

Exit status: 0 on verified success, 1 when a verifier or solver stage
rejects, 2 on usage or file-format errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    InfeasibleModelError, SearchBudgetExceeded, StageError, TrapdoorError, VerificationError,
)
from .fc import Coloring, FcInstance, brute_force_min_coloring, tau4, verify_coloring
from .ilp import IlpAssignment, IlpModel, brute_force_ilp, g2, parse_lp, tau5, verify_assignment, write_lp
from .instances import LabeledSample, generate_sample
from .numtheory import RsaKey, keygen
from .pipeline import OccamParams, occam_sample_size, trapdoor_solve_fc, trapdoor_solve_ilp
from .qubo import BinaryPolynomial, fc_to_hamiltonian, ground_states, to_ising

EXIT_OK, EXIT_REJECTED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_model(path: str) -> IlpModel:
    text = _read(path)
    return parse_lp(text) if path.endswith(".lp") else IlpModel.from_json(text)


def _frac(x) -> str:
    return f"{x.numerator}/{x.denominator}"


# -- subcommands --------------------------------------------------------------

def cmd_keygen(a) -> int:
    _write(a.output, keygen(a.bits, a.seed).to_json())
    return EXIT_OK


def cmd_sample(a) -> int:
    key = RsaKey.from_json(_read(a.key))
    _write(a.output, generate_sample(key, a.m, a.seed).to_json(public=a.public))
    return EXIT_OK


def cmd_reduce(a) -> int:
    if a.target == "fc":
        sample = LabeledSample.from_json(_read(a.sample))
        _write(a.output, tau4(sample.public()).to_json())
    else:
        model = tau5(FcInstance.from_json(_read(a.fc)))
        _write(a.output, write_lp(model) if (a.output or "").endswith(".lp") else model.to_json())
    return EXIT_OK


def cmd_solve(a) -> int:
    try:
        if a.target == "fc":
            P, report = trapdoor_solve_fc(FcInstance.from_json(_read(a.input)))
            text = P.to_json()
        else:
            model = _load_model(a.input)
            A, report = trapdoor_solve_ilp(model)
            text = A.to_json(model)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    _write(a.output, text)
    if a.report:
        _write(a.report, report.to_json())
    return EXIT_OK


def cmd_verify(a) -> int:
    if a.target == "fc":
        F = FcInstance.from_json(_read(a.instance))
        P = Coloring.from_json(_read(a.solution))
        if P.universe != F.universe:
            raise UsageError("coloring and formula use different variable sets")
        verdict = verify_coloring(F, P)
        summary = {"valid": verdict.ok, "k": P.k}
    else:
        model = _load_model(a.instance)
        A = IlpAssignment.from_dict(model, json.loads(_read(a.solution)))
        verdict = verify_assignment(model, A)
        summary = {"valid": verdict.ok, "objective": A.objective(model)}
    if not verdict.ok:
        summary["violation"] = verdict.detail
    print(json.dumps(summary))
    return EXIT_OK if verdict.ok else EXIT_REJECTED


def cmd_oracle(a) -> int:
    try:
        if a.target == "color":
            F = FcInstance.from_json(_read(a.input))
            P = brute_force_min_coloring(F, max_vars=a.budget or 12)
            _write(a.output, P.to_json())
        elif a.target == "ilp":
            model = _load_model(a.input)
            kw = {"budget": a.budget} if a.budget else {}
            A = brute_force_ilp(model, **kw)
            doc = A.to_dict(model)
            if model.source is not None:
                doc["coloring_k"] = g2(A, model).k
            _write(a.output, json.dumps(doc, separators=(",", ":")) + "\n")
        else:
            H = BinaryPolynomial.from_json(_read(a.input))
            e, states = ground_states(H, max_vars=a.budget or 20)
            _write(a.output, json.dumps({"energy": _frac(e), "vars": list(H.names),
                                         "states": [list(s) for s in states]}) + "\n")
    except (SearchBudgetExceeded, InfeasibleModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    return EXIT_OK


def cmd_emit(a) -> int:
    F = FcInstance.from_json(_read(a.fc))
    H = fc_to_hamiltonian(F, a.k, a.weight)
    _write(a.output, (to_ising(H) if a.ising else H).to_json())
    return EXIT_OK


def cmd_occam(a) -> int:
    m = occam_sample_size(OccamParams(a.epsilon, a.delta, a.n, a.alpha, a.beta))
    print(m)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trapdoorfc", description="RSA-trapdoored coloring and ILP instances")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("keygen", help="generate a toy RSA key")
    s.add_argument("--bits", type=int, required=True, help="bits per prime")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_keygen)

    s = sub.add_parser("sample", help="draw a labeled sample")
    s.add_argument("--key", required=True)
    s.add_argument("-m", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--public", action="store_true", help="omit plaintexts")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("reduce", help="sample -> formula coloring -> ILP")
    rs = s.add_subparsers(dest="target", required=True)
    r = rs.add_parser("fc")
    r.add_argument("--sample", required=True)
    r.add_argument("-o", "--output")
    r = rs.add_parser("ilp", help="writes LP text when the output ends in .lp, JSON otherwise")
    r.add_argument("--fc", required=True)
    r.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="trapdoor solve of a formula or model")
    s.add_argument("target", choices=("fc", "ilp"))
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("-o", "--output")
    s.add_argument("--report")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="check a solution against an instance")
    s.add_argument("target", choices=("fc", "ilp"))
    s.add_argument("--instance", required=True)
    s.add_argument("--solution", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", help="exhaustive reference solvers")
    s.add_argument("target", choices=("color", "ilp", "qubo"))
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--budget", type=int, default=None,
                   help="max variables (color, qubo) or search nodes (ilp)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("emit", help="emit a penalty Hamiltonian")
    es = s.add_subparsers(dest="target", required=True)
    e = es.add_parser("qubo")
    e.add_argument("--fc", required=True)
    e.add_argument("-k", type=int, required=True, help="color budget")
    e.add_argument("--weight", type=int, default=None, help="penalty weight (default k + 1)")
    e.add_argument("--ising", action="store_true", help="emit spin coefficients")
    e.add_argument("-o", "--output")
    s.set_defaults(func=cmd_emit)

    s = sub.add_parser("occam", help="Occam sample-size bound")
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=0.0)
    s.set_defaults(func=cmd_occam)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except (UsageError, ValueError, KeyError, TypeError, json.JSONDecodeError, TrapdoorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
