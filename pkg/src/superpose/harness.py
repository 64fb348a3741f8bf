"""Monte Carlo verification campaigns, alpha sweeps and derivation replays.

Every trial of a campaign draws from its own random stream ``(seed, trial_index)``
and touches no shared state, so trials can be evaluated in any order or in
separate processes.  Summaries are built from exact partial sums (Shewchuk's
algorithm, as used by :func:`math.fsum`) and max/min, which makes them
independent of evaluation order and partitioning.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Iterable, Iterator

import numpy as np

from . import bounds, generators, linalg
from .bounds import BoundReport, Theorem
from .errors import ConfigInvalid, DegenerateSuperposition, EmptyStream, RelationViolation
from .states import PureState, Relation, SuperpositionInput, classify_relation

DEFAULT_TOLERANCE = 1e-8
DEGENERATE_NORM_SQ = 1e-12
CAMPAIGN_KINDS = ("T1", "T2", "T3", "Weyl")

CSV_FIELDS = (
    "trial_index", "n", "m", "alpha_sq", "theorem", "actual", "lower_sym", "lower_comb",
    "upper_comb", "upper_sym", "rank_r", "norm_sq", "condition", "violation_margin",
)


@dataclass(frozen=True)
class CampaignConfig:
    theorem: str
    trials: int
    dims: tuple[tuple[int, int], ...]
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    alpha_sq_range: tuple[float, float] = (0.0, 1.0)
    emit: str | None = None  # None, "csv" or "jsonl": which record format the caller wants
    # Fault injection exercises the failure path: the tolerance sign is flipped and
    # the report of trial 0 is tampered so that its lower bound exceeds the actual value.
    inject_fault: bool = False

    def __post_init__(self):
        if self.theorem not in CAMPAIGN_KINDS:
            raise ConfigInvalid(f"theorem must be one of {CAMPAIGN_KINDS}, got {self.theorem!r}")
        if self.trials < 1:
            raise ConfigInvalid(f"trials must be >= 1, got {self.trials}")
        if not self.tolerance > 0.0:
            raise ConfigInvalid(f"tolerance must be > 0, got {self.tolerance}")
        dims = tuple((int(n), int(m)) for n, m in self.dims)
        if not dims:
            raise ConfigInvalid("dims must be non-empty")
        for n, m in dims:
            if n < 1 or m < 1:
                raise ConfigInvalid(f"bad dimensions {n}x{m}")
            if self.theorem == "T1" and m < 2:
                raise ConfigInvalid(f"T1 needs m >= 2 on party B, got {n}x{m}")
            if self.theorem in ("T2", "T3") and n * m < 2:
                raise ConfigInvalid(f"{self.theorem} needs n*m >= 2, got {n}x{m}")
        lo, hi = self.alpha_sq_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise ConfigInvalid(f"alpha_sq_range {self.alpha_sq_range} must satisfy 0 <= lo <= hi <= 1")
        if self.emit not in (None, "csv", "jsonl"):
            raise ConfigInvalid(f"emit must be None, 'csv' or 'jsonl', got {self.emit!r}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "alpha_sq_range", (float(lo), float(hi)))

    @property
    def effective_tolerance(self) -> float:
        return -self.tolerance if self.inject_fault else self.tolerance


@dataclass(frozen=True)
class Violation:
    which_bound: str
    margin: float  # > 0: amount by which the inequality failed beyond tolerance


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    dims: tuple[int, int]
    alpha_sq: float
    theorem: str
    report: BoundReport | None = None
    violation: Violation | None = None
    skipped: bool = False  # degenerate superposition: no bounds evaluated
    lower_gap: float = math.nan  # actual - lower_combined (Weyl: smallest lower-chain slack)
    upper_gap: float = math.nan  # upper_combined - actual (Weyl: smallest upper-chain slack)
    condition_failure: bool = False

    def row(self) -> dict:
        """Flat record in the CSV/JSONL schema."""
        rep = self.report
        return {
            "trial_index": self.trial_index,
            "n": self.dims[0],
            "m": self.dims[1],
            "alpha_sq": self.alpha_sq,
            "theorem": self.theorem,
            "actual": rep.actual_concurrence if rep else None,
            "lower_sym": rep.lower_symmetric if rep else None,
            "lower_comb": rep.lower_combined if rep else None,
            "upper_comb": rep.upper_combined if rep else None,
            "upper_sym": rep.upper_symmetric if rep else None,
            "rank_r": rep.rank_r if rep else None,
            "norm_sq": rep.norm_sq if rep else None,
            "condition": rep.condition_flag if rep else None,
            "violation_margin": self.violation.margin if self.violation else None,
        }


class ExactSum:
    """Exactly-rounded running sum whose partials can be merged (Shewchuk)."""

    def __init__(self):
        self.partials: list[float] = []

    def add(self, x: float) -> None:
        i = 0
        for y in self.partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                self.partials[i] = lo
                i += 1
            x = hi
        self.partials[i:] = [x]

    def merge(self, other: "ExactSum") -> None:
        for p in other.partials:
            self.add(p)

    @property
    def value(self) -> float:
        return math.fsum(self.partials)


@dataclass
class CampaignSummary:
    total: int = 0
    violations: int = 0
    skipped: int = 0
    max_violation_margin: float = 0.0
    max_lower_gap: float = -math.inf
    min_upper_gap: float = math.inf
    mean_lower_gap: float = math.nan
    mean_upper_gap: float = math.nan
    nonzero_lower_count: int = 0
    condition_true_count: int = 0
    condition_consistency_failures: int = 0
    runtime: float = field(default=0.0, compare=False)

    def to_dict(self, include_runtime: bool = False) -> dict:
        d = asdict(self)
        if not include_runtime:
            del d["runtime"]
        for k, v in d.items():
            if isinstance(v, float) and not math.isfinite(v):
                d[k] = None
        return d

    def to_json(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_dict(include_runtime), sort_keys=True)


class SummaryBuilder:
    """Order-independent fold of trial records into a :class:`CampaignSummary`."""

    def __init__(self, tolerance: float):
        self.tolerance = tolerance
        self.s = CampaignSummary()
        self._lower = ExactSum()
        self._upper = ExactSum()
        self._gap_count = 0

    def add(self, rec: TrialRecord) -> None:
        s = self.s
        s.total += 1
        if rec.skipped:
            s.skipped += 1
            return
        if rec.violation is not None:
            s.violations += 1
            s.max_violation_margin = max(s.max_violation_margin, rec.violation.margin)
        if not math.isnan(rec.lower_gap):
            s.max_lower_gap = max(s.max_lower_gap, rec.lower_gap)
            s.min_upper_gap = min(s.min_upper_gap, rec.upper_gap)
            self._lower.add(rec.lower_gap)
            self._upper.add(rec.upper_gap)
            self._gap_count += 1
        rep = rec.report
        if rep is not None and rep.condition_flag is not None:
            if rep.lower_combined > self.tolerance:
                s.nonzero_lower_count += 1
            if rep.condition_flag:
                s.condition_true_count += 1
        if rec.condition_failure:
            s.condition_consistency_failures += 1

    def merge(self, other: "SummaryBuilder") -> None:
        a, b = self.s, other.s
        for name in ("total", "violations", "skipped", "nonzero_lower_count",
                     "condition_true_count", "condition_consistency_failures"):
            setattr(a, name, getattr(a, name) + getattr(b, name))
        a.max_violation_margin = max(a.max_violation_margin, b.max_violation_margin)
        a.max_lower_gap = max(a.max_lower_gap, b.max_lower_gap)
        a.min_upper_gap = min(a.min_upper_gap, b.min_upper_gap)
        self._lower.merge(other._lower)
        self._upper.merge(other._upper)
        self._gap_count += other._gap_count

    def summary(self, runtime: float = 0.0) -> CampaignSummary:
        s = replace(self.s, runtime=runtime)
        if self._gap_count:
            s.mean_lower_gap = self._lower.value / self._gap_count
            s.mean_upper_gap = self._upper.value / self._gap_count
        return s


# ---------------------------------------------------------------------------
# trials

_CHAIN_LINKS = (
    ("lower_symmetric<=lower_combined", 0, 1),
    ("lower_combined<=actual", 1, 2),
    ("actual<=upper_combined", 2, 3),
    ("upper_combined<=upper_symmetric", 3, 4),
)


def sandwich_violation(report: BoundReport, tol: float) -> Violation | None:
    """Worst failing link of ``lower_sym <= lower_comb <= actual <= upper_comb <= upper_sym``."""
    chain = report.chain()
    worst = None
    for name, i, j in _CHAIN_LINKS:
        margin = chain[i] - chain[j] - tol
        if margin > 0.0 and (worst is None or margin > worst.margin):
            worst = Violation(name, margin)
    return worst


FAULT_OFFSET = 1.0


def tamper(report: BoundReport) -> BoundReport:
    """Copy of ``report`` whose combined lower bound sits ``FAULT_OFFSET`` above the actual value."""
    return replace(report, lower_combined=report.actual_concurrence + FAULT_OFFSET)


def _bound_trial(cfg: CampaignConfig, index: int, n: int, m: int, tol: float) -> TrialRecord:
    rng = generators.make_rng(cfg.seed, index)
    gcfg = generators.GeneratorConfig(cfg.seed, n, m, cfg.alpha_sq_range)
    theorem = Theorem(cfg.theorem)
    if theorem is Theorem.T1:
        psi, phi = generators.biorthogonal_pair(gcfg, rng)
    elif theorem is Theorem.T2:
        psi, phi = generators.orthogonal_pair(gcfg, rng)
    else:
        psi = generators.haar_state(gcfg, rng)
        phi = generators.haar_state(gcfg, rng)
    alpha, beta = generators.random_amplitudes(gcfg, rng)
    inp = SuperpositionInput(alpha, beta, psi, phi)
    try:
        report = bounds.bounds(inp, theorem)
    except DegenerateSuperposition:
        return TrialRecord(index, (n, m), inp.alpha_sq, cfg.theorem, skipped=True)
    if cfg.inject_fault and index == 0:
        report = tamper(report)
    cond_fail = (report.condition_flag is not None
                 and report.lower_combined > abs(tol) and not report.condition_flag)
    return TrialRecord(
        trial_index=index,
        dims=(n, m),
        alpha_sq=inp.alpha_sq,
        theorem=cfg.theorem,
        report=report,
        violation=sandwich_violation(report, tol),
        lower_gap=report.actual_concurrence - report.lower_combined,
        upper_gap=report.upper_combined - report.actual_concurrence,
        condition_failure=cond_fail,
    )


def _weyl_trial(cfg: CampaignConfig, index: int, n: int, tol: float) -> TrialRecord:
    rng = generators.make_rng(cfg.seed, index)
    h = generators.random_hermitian(rng, n)
    k = generators.random_hermitian(rng, n)
    lh = linalg.eigvals_ascending(h)
    lk = linalg.eigvals_ascending(k)
    lhk = linalg.eigvals_ascending(h + k)
    lower_slack = float(np.min(lhk - (lh + lk[0])))
    if cfg.inject_fault and index == 0:
        lower_slack -= FAULT_OFFSET + float(np.max(np.abs(lhk)))
    upper_slack = float(np.min(lh + lk[-1] - lhk))
    violation = None
    worst = min(lower_slack, upper_slack)
    if -worst - tol > 0.0:
        which = "weyl_lower" if lower_slack <= upper_slack else "weyl_upper"
        violation = Violation(which, -worst - tol)
    return TrialRecord(index, (n, n), math.nan, "Weyl", violation=violation,
                       lower_gap=lower_slack, upper_gap=upper_slack)


def run_trial(cfg: CampaignConfig, index: int) -> TrialRecord:
    """Evaluate trial ``index``; dims cycle through ``cfg.dims``."""
    n, m = cfg.dims[index % len(cfg.dims)]
    tol = cfg.effective_tolerance
    if cfg.theorem == "Weyl":
        return _weyl_trial(cfg, index, n, tol)
    return _bound_trial(cfg, index, n, m, tol)


def iter_trials(cfg: CampaignConfig, start: int = 0, stop: int | None = None) -> Iterator[TrialRecord]:
    stop = cfg.trials if stop is None else min(stop, cfg.trials)
    for i in range(start, stop):
        yield run_trial(cfg, i)


def _run_partition(cfg: CampaignConfig, start: int, stop: int, keep: bool):
    b = SummaryBuilder(abs(cfg.effective_tolerance))
    kept = []
    for rec in iter_trials(cfg, start, stop):
        b.add(rec)
        if keep:
            kept.append(rec)
    return b, kept


def partition_bounds(trials: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, trials))
    edges = [trials * k // parts for k in range(parts + 1)]
    return [(edges[k], edges[k + 1]) for k in range(parts)]


def run_campaign(cfg: CampaignConfig, partitions: int = 1, workers: int = 1,
                 keep_records: bool = False) -> tuple[CampaignSummary, list[TrialRecord]]:
    """Run every trial of ``cfg`` and summarize.

    ``partitions`` splits the trial range into contiguous chunks whose
    summaries are merged; ``workers > 1`` evaluates the chunks in separate
    processes.  The summary does not depend on either.  Records are returned
    (ordered by trial index) only when ``keep_records`` is true.
    """
    t0 = time.perf_counter()
    chunks = partition_bounds(cfg.trials, partitions)
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_partition, [cfg] * len(chunks),
                                  [c[0] for c in chunks], [c[1] for c in chunks],
                                  [keep_records] * len(chunks)))
    else:
        results = [_run_partition(cfg, a, b, keep_records) for a, b in chunks]
    total = SummaryBuilder(abs(cfg.effective_tolerance))
    records: list[TrialRecord] = []
    for builder, kept in results:
        total.merge(builder)
        records.extend(kept)
    return total.summary(time.perf_counter() - t0), records


def tightness_report(records: Iterable[TrialRecord], tolerance: float = DEFAULT_TOLERANCE) -> CampaignSummary:
    """Summarize an existing record stream (e.g. several merged partitions)."""
    b = SummaryBuilder(tolerance)
    for rec in records:
        b.add(rec)
    if b.s.total == 0:
        raise EmptyStream("no records to summarize")
    return b.summary()


# ---------------------------------------------------------------------------
# record output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for rec in records:
        row = rec.row()
        w.writerow([_fmt(row[k]) for k in CSV_FIELDS])
    return buf.getvalue()


def records_to_jsonl(records: Iterable[TrialRecord]) -> str:
    lines = []
    for rec in records:
        row = rec.row()
        if isinstance(row["alpha_sq"], float) and math.isnan(row["alpha_sq"]):
            row["alpha_sq"] = None
        lines.append(json.dumps(row))
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepRow:
    alpha_sq: float
    lower_symmetric: float
    lower_combined: float
    actual: float
    upper_combined: float
    upper_symmetric: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))


SWEEP_FIELDS = tuple(f.name for f in fields(SweepRow))


def sweep_alpha(psi: PureState, phi: PureState, steps: int, theorem: str = "auto",
                force: bool = False) -> list[SweepRow]:
    """Bounds on the grid ``|alpha|^2 = k / (steps - 1)``, ``k = 0 .. steps-1``.

    Both amplitudes are real and non-negative.  Grid points where the
    superposition vanishes are omitted.
    """
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    base = SuperpositionInput.padded(1.0, 0.0, psi, phi)
    psi, phi = base.state_psi, base.state_phi
    if theorem == "auto":
        theorem = bounds.auto_theorem(psi, phi)
    theorem = Theorem(theorem)
    rows = []
    for k in range(steps):
        a2 = k / (steps - 1)
        inp = SuperpositionInput(math.sqrt(a2), math.sqrt(1.0 - a2), psi, phi)
        try:
            rep = bounds.bounds(inp, theorem, force=force)
        except DegenerateSuperposition:
            continue
        rows.append(SweepRow(a2, *rep.chain()))
    return rows


# ---------------------------------------------------------------------------
# derivation replays

@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    identity_residual: float
    max_excess: float  # largest (lhs - rhs) over the eigenvalue inequalities
    degenerate: bool = False

    def __bool__(self):
        return self.ok


def _gram(x: np.ndarray) -> np.ndarray:
    return x @ x.conj().T


def _spectra(psi: np.ndarray, phi: np.ndarray, gamma: np.ndarray):
    lp = linalg.eigvals_ascending(_gram(psi), psd=True)
    lf = linalg.eigvals_ascending(_gram(phi), psd=True)
    lg = linalg.eigvals_ascending(_gram(gamma), psd=True)
    return lp, lf, lg


def derivation_replay_t1(psi: PureState, phi: PureState, alpha: complex, beta: complex,
                         tol: float = 1e-10) -> ReplayResult:
    """Biorthogonal case: ``Gamma Gamma^H = |a|^2 Psi Psi^H + |b|^2 Phi Phi^H`` and
    ``|a|^2 lam_i(Psi Psi^H) + |b|^2 lam_1(Phi Phi^H) <= lam_i(Gamma Gamma^H)``."""
    if classify_relation(psi, phi, bounds.PREMISE_TOL).kind is not Relation.BIORTHOGONAL:
        raise RelationViolation("replay needs Psi Phi^H = 0")
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    gamma = alpha * psi.psi + beta * phi.psi
    weighted = a2 * _gram(psi.psi) + b2 * _gram(phi.psi)
    residual = linalg.frobenius_norm(weighted - _gram(gamma))
    lp, lf, lg = _spectra(psi.psi, phi.psi, gamma)
    excess = float(np.max(a2 * lp + b2 * lf[0] - lg))
    return ReplayResult(residual <= tol and excess <= tol, residual, excess)


def derivation_replay_t2(psi: PureState, phi: PureState, alpha: complex, beta: complex,
                         tol: float = 1e-10) -> ReplayResult:
    """Orthogonal case.

    With ``D = |a|^2 Psi Psi^H + |b|^2 Phi Phi^H`` and ``G+- = alpha Psi +- beta Phi``
    checks ``D = (G+ G+^H + G- G-^H) / 2`` and, for every i,
    ``lam_i(G+ G+^H) / 2 + lam_min(G- G-^H) / 2 <= lam_i(D)`` together with
    ``lam_i(D) <= |a|^2 lam_i(Psi Psi^H) + |b|^2 lam_max(Phi Phi^H)`` and its swap.
    """
    if classify_relation(psi, phi, bounds.PREMISE_TOL).kind is Relation.GENERAL:
        raise RelationViolation("replay needs Tr Psi Phi^H = 0")
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    gp = alpha * psi.psi + beta * phi.psi
    gm = alpha * psi.psi - beta * phi.psi
    return _replay_chain(psi.psi, phi.psi, a2, b2, gp, gm, 0.5, 0.5, tol, swap=True)


def _replay_chain(psi, phi, a2, b2, tp, tm, wp, wm, tol, swap=False) -> ReplayResult:
    """Identity ``D = wp tp tp^H + wm tm tm^H`` plus both Weyl links through ``lam_i(D)``."""
    d = a2 * _gram(psi) + b2 * _gram(phi)
    residual = linalg.frobenius_norm(d - wp * _gram(tp) - wm * _gram(tm))
    lp, lf, lt = _spectra(psi, phi, tp)
    lm = linalg.eigvals_ascending(_gram(tm), psd=True)
    ld = linalg.eigvals_ascending(d, psd=True)
    excess = [float(np.max(wp * lt + wm * lm[0] - ld)),
              float(np.max(ld - (a2 * lp + b2 * lf[-1])))]
    if swap:
        excess.append(float(np.max(ld - (a2 * lp[-1] + b2 * lf))))
    worst = max(excess)
    return ReplayResult(residual <= tol and worst <= tol, residual, worst)


def derivation_replay_t3(psi: PureState, phi: PureState, alpha: complex, beta: complex,
                         tol: float = 1e-10) -> ReplayResult:
    """General case with normalized ``G~+- = G+- / ||G+-||``.

    Checks ``D = ||G+||^2/2 G~+ G~+^H + ||G-||^2/2 G~- G~-^H`` for
    ``D = |a|^2 Psi Psi^H + |b|^2 Phi Phi^H`` and, for every i,
    ``||G+||^2/2 lam_i(G~+ G~+^H) + ||G-||^2/2 lam_min(G~- G~-^H) <= lam_i(D)
    <= |a|^2 lam_i(Psi Psi^H) + |b|^2 lam_max(Phi Phi^H)``.
    If either ``||G+-||^2 < 1e-12`` the replay is skipped (``degenerate=True``).
    """
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    gp = alpha * psi.psi + beta * phi.psi
    gm = alpha * psi.psi - beta * phi.psi
    np_sq = linalg.frobenius_norm(gp) ** 2
    nm_sq = linalg.frobenius_norm(gm) ** 2
    if np_sq < DEGENERATE_NORM_SQ or nm_sq < DEGENERATE_NORM_SQ:
        return ReplayResult(True, 0.0, 0.0, degenerate=True)
    tp = gp / math.sqrt(np_sq)
    tm = gm / math.sqrt(nm_sq)
    return _replay_chain(psi.psi, phi.psi, a2, b2, tp, tm, 0.5 * np_sq, 0.5 * nm_sq, tol)
