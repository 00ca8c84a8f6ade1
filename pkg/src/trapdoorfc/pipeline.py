"""End-to-end trapdoor solves and the Occam sample-size calculator.

The solver never sees the secret key: it reads the example strings back out
of the formula, factors N, derives d, labels every string itself, and
builds a small consistent automaton whose state traces color the formula.
Each stage is timed, and any failure is re-raised as a ``StageError``
naming the stage.
"""
from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

from .errors import StageError, VerificationError
from .fc import Coloring, FcInstance, infer_strings, tau4, coloring_from_dfa, verify_coloring
from .ilp import (
    IlpAssignment, IlpModel, assignment_from_coloring, reconstruct_fc, tau5, verify_assignment, write_lp,
)
from .instances import LabeledExample, LabeledSample, decode_example, generate_sample
from .numtheory import RsaKey, decrypt_lsb, factor_semiprime, keygen, recover_secret_exponent
from .representations import build_prefix_tree_dfa, minimize_dfa


# -- Occam bound --------------------------------------------------------------

@dataclass(frozen=True)
class OccamParams:
    epsilon: float
    delta: float
    n: int
    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.alpha < 1:
            raise ValueError("alpha must be at least 1")
        if not 0 <= self.beta < 1:
            raise ValueError("beta must lie in [0, 1)")


def occam_sample_size(p: OccamParams) -> int:
    """Sample size with every hidden constant set to 1.

    ``ceil(ln(1/delta)/epsilon + ((n^alpha/epsilon) * log2(n^alpha/epsilon))^(1/(1-beta)))``
    """
    ratio = p.n ** p.alpha / p.epsilon
    first = math.log(1 / p.delta) / p.epsilon
    second = (ratio * math.log2(ratio)) ** (1 / (1 - p.beta))
    return math.ceil(first + second)


# -- reports ------------------------------------------------------------------

TIMING_FIELDS = ("factoring_seconds", "stage_seconds")


@dataclass
class SolveReport:
    instance_digest: str = ""
    N: int | None = None
    e: int | None = None
    p: int | None = None
    q: int | None = None
    num_examples: int | None = None
    prefix_tree_states: int | None = None
    dfa_states: int | None = None
    k: int | None = None
    ilp_objective: int | None = None
    verdicts: dict = field(default_factory=dict)
    factoring_seconds: float = 0.0
    stage_seconds: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.verdicts) and all(self.verdicts.values())

    def to_dict(self, timing: bool = True) -> dict:
        doc = asdict(self)
        for name in ("N", "e", "p", "q"):
            if doc[name] is not None:
                doc[name] = format(doc[name], "x")
        if not timing:
            for name in TIMING_FIELDS:
                doc.pop(name)
        return doc

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=1, sort_keys=True) + "\n"


@contextmanager
def _stage(report: SolveReport, name: str):
    t0 = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    finally:
        report.stage_seconds[name] = report.stage_seconds.get(name, 0.0) + time.perf_counter() - t0


def _require(report: SolveReport, name: str, ok: bool, detail: str):
    report.verdicts[name] = bool(ok)
    if not ok:
        raise VerificationError(detail)


# -- solves -------------------------------------------------------------------

def _solve_fc(F: FcInstance, report: SolveReport) -> Coloring:
    with _stage(report, "infer_strings"):
        strings = infer_strings(F)
        report.num_examples = len(strings)
    with _stage(report, "decode"):
        layout = F.provenance.layout
        decoded = [decode_example(w, layout) for w in strings]
        N, e = decoded[0][1], decoded[0][2]
        if any(d[1:] != (N, e) for d in decoded):
            raise ValueError("examples disagree on (N, e)")
        report.N, report.e = N, e
    with _stage(report, "factor"):
        t0 = time.perf_counter()
        p, q = factor_semiprime(N)
        report.factoring_seconds = time.perf_counter() - t0
        report.p, report.q = p, q
    with _stage(report, "secret_exponent"):
        d = recover_secret_exponent(e, p, q)
    with _stage(report, "label"):
        labels = [decrypt_lsb(ps, N, d) for ps, _, _ in decoded]
    with _stage(report, "verify_labels"):
        # the recovered sample must reduce to exactly the given formula
        rebuilt = tau4(LabeledSample(N, e, layout, tuple(LabeledExample(w, b) for w, b in zip(strings, labels))))
        _require(report, "labels", rebuilt == F, "recovered sample does not reduce to the input formula")
    with _stage(report, "build_dfa"):
        tree = build_prefix_tree_dfa(zip(strings, labels))
        report.prefix_tree_states = tree.num_states
    with _stage(report, "minimize"):
        t = minimize_dfa(tree)
        report.dfa_states = t.num_states
        _require(report, "dfa_consistent", all(t.accepts(w) == bool(b) for w, b in zip(strings, labels)),
                 "minimized automaton disagrees with a recovered label")
    with _stage(report, "color"):
        P = coloring_from_dfa(F, strings, t)
        report.k = P.k
    with _stage(report, "verify_coloring"):
        v = verify_coloring(F, P)
        _require(report, "coloring", v.ok, f"coloring rejected: {v.detail}")
    return P


def trapdoor_solve_fc(F: FcInstance) -> tuple[Coloring, SolveReport]:
    report = SolveReport(instance_digest=F.digest())
    return _solve_fc(F, report), report


def trapdoor_solve_ilp(model: IlpModel) -> tuple[IlpAssignment, SolveReport]:
    report = SolveReport()
    with _stage(report, "reconstruct"):
        F = reconstruct_fc(model)
        report.instance_digest = F.digest()
    P = _solve_fc(F, report)
    with _stage(report, "lift"):
        A = assignment_from_coloring(model, F, P)
        report.ilp_objective = A.objective(model)
    with _stage(report, "verify_assignment"):
        v = verify_assignment(model, A)
        _require(report, "assignment", v.ok, f"assignment rejected: {v.detail}")
        _require(report, "objective", report.ilp_objective == P.k, "objective differs from the coloring size")
    return A, report


# -- reproducible experiment driver ---------------------------------------------

@dataclass
class PipelineRun:
    key: RsaKey
    sample: LabeledSample
    fc: FcInstance
    coloring: Coloring
    fc_report: SolveReport
    model: IlpModel | None = None
    assignment: IlpAssignment | None = None
    ilp_report: SolveReport | None = None

    def artifacts(self, full_model: bool = False) -> dict[str, str]:
        """Serialized outputs, reports without timing fields.

        The ILP model is recorded by digest unless ``full_model`` asks for the
        LP text; at 8-bit primes the text runs to hundreds of megabytes.
        """
        out = {
            "key.json": self.key.to_json(),
            "sample.json": self.sample.to_json(),
            "fc.json": self.fc.to_json(),
            "coloring.json": self.coloring.to_json(),
            "fc_report.json": self.fc_report.to_json(timing=False),
        }
        if self.model is not None:
            out["model.sha256"] = self.model.digest() + "\n"
            if full_model:
                out["model.lp"] = write_lp(self.model)
            out["assignment.json"] = self.assignment.to_json(self.model)
            out["ilp_report.json"] = self.ilp_report.to_json(timing=False)
        return out


def run_pipeline(bits: int, m: int, seed: int, with_ilp: bool = True) -> PipelineRun:
    """keygen -> sample -> FC -> trapdoor solve, then optionally the ILP lift."""
    key = keygen(bits, seed)
    sample = generate_sample(key, m, seed)
    F = tau4(sample.public())
    P, rep = trapdoor_solve_fc(F)
    run = PipelineRun(key, sample, F, P, rep)
    if with_ilp:
        model = tau5(F)
        A, irep = trapdoor_solve_ilp(model)
        run.model, run.assignment, run.ilp_report = model, A, irep
    return run
