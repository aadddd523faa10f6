"""Disorder-ensemble statistics: baselines, enhancements, DOC and N sweeps,
and the mirror-plane / transmission-excess diagnostics.

A run is identified by a configuration label (layout name plus an ``-opc``
suffix for symmetric detection), a medium model, the system size, the degree
of control and a seed.  Detector modes are fixed at alpha = 0 and
beta = N//2 (beta = alpha for symmetric runs): the medium ensembles are
statistically isotropic, so the choice only pins reproducibility.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .configurations import (
    MacroPixelMap,
    PhaseMask,
    ShapingConfiguration,
    coincidence_probability,
    mirror_plane_field,
    total_coincidence,
)
from .media import MediumModel, TransmissionMatrix, generate
from .numerics import RngStream, dft, largest_singular_value_sq
from .shaping import (
    OptimizerFailure,
    OptimizerSpec,
    analytic_phases_1ps,
    analytic_phases_2pis,
    analytic_phases_thin_displaced,
    build_kernel,
    optimize,
)

__all__ = [
    "BASELINE_MODES",
    "CONFIG_LABELS",
    "ClusterScore",
    "EnhancementRecord",
    "EnsembleSummary",
    "MirrorDiagnostic",
    "SweepPoint",
    "baseline_probability",
    "default_baseline_mode",
    "low_doc_slope",
    "make_config_label",
    "parse_config_label",
    "phase_cluster_score",
    "run_ensemble",
    "run_mirror_diagnostic",
    "run_realization",
    "sweep_doc",
    "sweep_n",
    "target_modes",
    "transmission_excess",
]

BASELINE_MODES = ("spatial-mean", "analytic-unitary")

CONFIG_LABELS = (
    "1p-s",
    "2p-is",
    "2p-is-opc",
    "2p-is-displaced",
    "2p-is-displaced-opc",
    "2p-ds",
    "2p-ds-opc",
)

# Stream ids of the independent substreams used inside one realization.
_MATRIX_STREAM = 0
_OPTIMIZER_STREAM = 1
_EXCESS_STREAM = 2


def parse_config_label(label: str) -> tuple[str, bool]:
    """Split a configuration label into (layout, symmetric)."""
    if label not in CONFIG_LABELS:
        raise ValueError(f"unknown configuration {label!r}, expected one of {CONFIG_LABELS}")
    if label.endswith("-opc"):
        return label[: -len("-opc")], True
    return label, False


def make_config_label(layout: str, symmetric: bool) -> str:
    label = f"{layout}-opc" if symmetric else layout
    if label not in CONFIG_LABELS:
        raise ValueError(f"no configuration label for layout={layout!r}, symmetric={symmetric}")
    return label


def target_modes(n: int, symmetric: bool) -> tuple[int, int]:
    """Fixed detector pair: alpha = 0, beta = N//2 (or alpha for OPC)."""
    return (0, 0) if symmetric else (0, n // 2)


def default_baseline_mode(kind: str) -> str:
    """Exact analytic baseline for unitary media, spatial mean otherwise."""
    return "analytic-unitary" if kind == "unitary" else "spatial-mean"


def baseline_probability(t: TransmissionMatrix, alpha: int, mode: str) -> float:
    """Pre-optimization reference probability.

    ``"spatial-mean"`` is the mean over beta of P_{alpha,beta} at S = I (the
    S = I chain is F J F); ``"analytic-unitary"`` is the exact unitary value
    1/(2 N^2) and is rejected for non-unitary medium models.
    """
    n = t.n
    if mode == "analytic-unitary":
        if t.model.kind != "unitary":
            raise ValueError(
                f"analytic-unitary baseline is only valid for the unitary model, "
                f"not {t.model.kind!r}"
            )
        return 1.0 / (2.0 * n * n)
    if mode == "spatial-mean":
        v = t.j @ dft(n)[:, alpha]
        return float(np.vdot(v, v).real) / (2.0 * n * n)
    raise ValueError(f"unknown baseline mode {mode!r}, expected one of {BASELINE_MODES}")


@dataclass(frozen=True)
class EnhancementRecord:
    """Per-realization outcome: optimum, baseline, enhancement and bound."""

    config: str
    model: str
    n: int
    doc: float
    realization_id: int
    seed: int
    p_opt: float
    p0: float
    eta: float
    eta_over_n: float
    sigma1_sq: float | None
    converged: bool
    iterations: int
    baseline_mode: str
    # Normalized total coincidence 2N * sum_beta P at the optimal mask;
    # carried for 2p-ds rows only (feeds the N-sweep), not serialized to CSV.
    total_optimized: float | None = None


@dataclass(frozen=True)
class EnsembleSummary:
    config: str
    model: str
    n: int
    doc: float
    realizations: int
    mean_eta_over_n: float
    std_eta_over_n: float
    failed: int = 0


@dataclass(frozen=True)
class SweepPoint:
    sweep_value: float
    summary: EnsembleSummary
    records: tuple[EnhancementRecord, ...] = field(repr=False)
    mean_sigma1_sq: float | None = None
    mean_total_optimized: float | None = None


def _macro_count(n: int, doc: float) -> int:
    m = round(doc * n)
    if not (0.0 < doc <= 1.0) or m < 1 or abs(m - doc * n) > 1e-9:
        raise ValueError(f"doc * n must be a positive integer, got doc={doc}, n={n}")
    return m


def _optimal_mask(
    layout: str,
    t: TransmissionMatrix,
    config: ShapingConfiguration,
    control: MacroPixelMap,
    spec: OptimizerSpec,
    rng: RngStream,
) -> tuple[PhaseMask, bool, int]:
    """Closed form where one exists, numerical optimization otherwise.

    Returns (mask, converged, iterations); closed forms count as converged
    with zero iterations.  On diagonal (thin) media the 2p-ds chain equals the
    2p-is chain mask-for-mask, so its closed form carries over; the displaced
    layout gets the exact chirp solution at full control when the detector
    parity admits one.
    """
    alpha, beta = config.alpha, config.beta
    if layout == "1p-s":
        return analytic_phases_1ps(t, alpha, beta, control), True, 0
    if layout == "2p-is":
        return analytic_phases_2pis(t, alpha, beta, control), True, 0
    thin = t.model.kind == "thin"
    if layout == "2p-ds" and thin:
        return analytic_phases_2pis(t, alpha, beta, control), True, 0
    if layout == "2p-is-displaced" and thin and control.full_control:
        if (t.n % 2 != 0) or ((alpha + beta) % 2 == 0):
            return analytic_phases_thin_displaced(t, alpha, beta), True, 0
    result = optimize(build_kernel(t, config), control, spec, rng)
    return result.mask, result.converged, result.iterations


def _solve_realization(
    config_label: str,
    model: str,
    n: int,
    doc: float,
    spec: OptimizerSpec,
    seed: int,
    realization_id: int,
    baseline: str | None,
):
    layout, symmetric = parse_config_label(config_label)
    alpha, beta = target_modes(n, symmetric)
    control = MacroPixelMap(n, _macro_count(n, doc))
    medium = generate(
        MediumModel(kind=model, n=n, seed=seed, stream_key=(realization_id, _MATRIX_STREAM))
    )
    optimizer_rng = RngStream(seed, _key=(realization_id, _OPTIMIZER_STREAM))
    config = ShapingConfiguration(layout, alpha, beta)
    mask, converged, iterations = _optimal_mask(layout, medium, config, control, spec, optimizer_rng)

    p_opt = coincidence_probability(config, medium, mask)
    baseline_mode = baseline or default_baseline_mode(model)
    p0 = baseline_probability(medium, alpha, baseline_mode)
    eta = p_opt / p0

    sigma1_sq = None
    total_optimized = None
    if layout == "2p-ds":
        sigma1_sq = largest_singular_value_sq(medium.j)
        total_optimized = 2.0 * n * total_coincidence(config, medium, mask)

    record = EnhancementRecord(
        config=config_label,
        model=model,
        n=n,
        doc=control.doc,
        realization_id=realization_id,
        seed=seed,
        p_opt=p_opt,
        p0=p0,
        eta=eta,
        eta_over_n=eta / n,
        sigma1_sq=sigma1_sq,
        converged=converged,
        iterations=iterations,
        baseline_mode=baseline_mode,
        total_optimized=total_optimized,
    )
    return record, mask, medium, config


def run_realization(
    config: str,
    model: str,
    n: int,
    doc: float,
    spec: OptimizerSpec,
    seed: int,
    realization_id: int = 0,
    baseline: str | None = None,
) -> EnhancementRecord:
    """One disorder realization; deterministic in (seed, realization_id)."""
    record, _, _, _ = _solve_realization(
        config, model, n, doc, spec, seed, realization_id, baseline
    )
    return record


def run_ensemble(
    config: str,
    model: str,
    n: int,
    doc: float,
    spec: OptimizerSpec,
    master_seed: int,
    realizations: int,
    threads: int = 1,
    baseline: str | None = None,
) -> tuple[EnsembleSummary, list[EnhancementRecord]]:
    """Independent realizations i = 0..R-1 on disjoint random substreams.

    Results are collected in realization order, so the output is identical
    for any worker-thread count.  Realizations whose optimizer diverged on
    every restart are counted in ``failed`` and omitted from the records.
    """
    if realizations < 1:
        raise ValueError("realizations must be >= 1")

    def one(index: int) -> EnhancementRecord | None:
        try:
            return run_realization(config, model, n, doc, spec, master_seed, index, baseline)
        except OptimizerFailure:
            return None

    indices = range(realizations)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, indices))
    else:
        outcomes = [one(i) for i in indices]

    records = [r for r in outcomes if r is not None]
    failed = realizations - len(records)
    values = np.array([r.eta_over_n for r in records], dtype=float)
    mean = float(values.mean()) if len(values) else math.nan
    std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    summary = EnsembleSummary(
        config=config,
        model=model,
        n=n,
        doc=records[0].doc if records else doc,
        realizations=len(records),
        mean_eta_over_n=mean,
        std_eta_over_n=std,
        failed=failed,
    )
    return summary, records


def sweep_doc(
    config: str,
    model: str,
    n: int,
    doc_list,
    spec: OptimizerSpec,
    seed: int,
    realizations: int,
    threads: int = 1,
    baseline: str | None = None,
) -> list[SweepPoint]:
    """One ensemble per DOC value.

    Realization i reuses the same matrix substream at every DOC, so the
    curves are comparable realization by realization.
    """
    points = []
    for doc in doc_list:
        summary, records = run_ensemble(
            config, model, n, doc, spec, seed, realizations, threads, baseline
        )
        points.append(SweepPoint(sweep_value=summary.doc, summary=summary, records=tuple(records)))
    return points


def sweep_n(
    config: str,
    model: str,
    n_list,
    spec: OptimizerSpec,
    seed: int,
    realizations_per_n: int,
    threads: int = 1,
    baseline: str | None = None,
    doc: float = 1.0,
) -> list[SweepPoint]:
    """One ensemble per system size, with the 2p-ds bound diagnostics.

    For 2p-ds rows each point also carries the ensemble means of sigma_1^2
    and of the normalized total optimized coincidence, which bracket the
    enhancement pre-factor.
    """
    points = []
    for n in n_list:
        summary, records = run_ensemble(
            config, model, int(n), doc, spec, seed, realizations_per_n, threads, baseline
        )
        sigmas = [r.sigma1_sq for r in records if r.sigma1_sq is not None]
        totals = [r.total_optimized for r in records if r.total_optimized is not None]
        points.append(
            SweepPoint(
                sweep_value=float(n),
                summary=summary,
                records=tuple(records),
                mean_sigma1_sq=float(np.mean(sigmas)) if sigmas else None,
                mean_total_optimized=float(np.mean(totals)) if totals else None,
            )
        )
    return points


def low_doc_slope(points: list[SweepPoint], max_doc: float = 0.125) -> float | None:
    """Least-squares slope of mean eta/N versus DOC over points with
    DOC <= max_doc (affine fit; None with fewer than two points)."""
    xs = [p.sweep_value for p in points if p.sweep_value <= max_doc + 1e-12]
    ys = [p.summary.mean_eta_over_n for p in points if p.sweep_value <= max_doc + 1e-12]
    if len(xs) < 2:
        return None
    slope, _ = np.polyfit(np.asarray(xs), np.asarray(ys), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass(frozen=True)
class ClusterScore:
    """Bimodality of a field's phases: 1 for two antipodal clusters, ~0 for
    uniform phases.  The score is |sum_n w_n e^{2i theta_n}| / sum_n w_n with
    intensity weights w_n = |u_n|^2; the unweighted variant averages the bare
    phase factors."""

    score: float
    cluster_centers: tuple[float, float]
    unweighted_score: float


def phase_cluster_score(field: np.ndarray) -> ClusterScore:
    u = np.asarray(field, dtype=np.complex128)
    weights_total = float(np.sum(np.abs(u) ** 2))
    if weights_total == 0.0:
        raise ValueError("cannot score the phases of an all-zero field")
    # |u|^2 e^{2i arg u} = u^2, so the weighted mean collapses to sum(u^2).
    numerator = complex(np.sum(u * u))
    score = abs(numerator) / weights_total
    center = 0.5 * np.angle(numerator)
    nonzero = u[u != 0]
    unit = nonzero / np.abs(nonzero)
    unweighted = abs(complex(np.mean(unit * unit)))
    return ClusterScore(
        score=float(score),
        cluster_centers=(float(center % (2 * np.pi)), float((center + np.pi) % (2 * np.pi))),
        unweighted_score=float(unweighted),
    )


def transmission_excess(
    t: TransmissionMatrix,
    mask: PhaseMask,
    alpha: int,
    samples: int = 1000,
    rng: RngStream | None = None,
) -> float:
    """Peak single-mode rate of a mask over the mean total rate of random
    masks, in the 2p-ds layout.

    Ratios above 1 mean the optimized coincidence rate in one output mode
    exceeds the whole pre-optimization output; this can only happen for lossy
    (Gaussian) media, never for unitary ones.
    """
    if rng is None:
        rng = RngStream(t.model.seed, _key=t.model.stream_key[:-1] + (_EXCESS_STREAM,))
    n = t.n
    f = dft(n)
    v = f[:, alpha]
    peak = float(np.max(np.abs(f @ (mask.phasors() * (t.j @ (mask.phasors() * v)))) ** 2)) / (
        2.0 * n
    )
    totals = np.empty(samples)
    for i in range(samples):
        s = np.exp(1j * rng.uniform_phases(n))
        w = s * (t.j @ (s * v))
        totals[i] = np.vdot(w, w).real / (2.0 * n)
    return peak / float(np.mean(totals))


@dataclass(frozen=True)
class MirrorDiagnostic:
    """One optimized 2p-ds realization with its advanced-wave diagnostics."""

    record: EnhancementRecord
    mask: PhaseMask
    field: np.ndarray
    cluster: ClusterScore
    excess: float | None


def run_mirror_diagnostic(
    config: str,
    model: str,
    n: int,
    doc: float,
    spec: OptimizerSpec,
    seed: int,
    realization_id: int = 0,
    baseline: str | None = None,
    excess_samples: int = 1000,
) -> MirrorDiagnostic:
    """Optimize one 2p-ds realization and compute the mirror-plane field, its
    phase-cluster score, and (for Gaussian media) the transmission excess."""
    layout, _ = parse_config_label(config)
    if layout != "2p-ds":
        raise ValueError(f"the mirror diagnostic is defined for 2p-ds runs, not {config!r}")
    record, mask, medium, shaping_config = _solve_realization(
        config, model, n, doc, spec, seed, realization_id, baseline
    )
    u = mirror_plane_field(medium, mask, shaping_config.alpha)
    cluster = phase_cluster_score(u)
    excess = None
    if model == "gaussian":
        excess_rng = RngStream(seed, _key=(realization_id, _EXCESS_STREAM))
        excess = transmission_excess(
            medium, mask, shaping_config.alpha, samples=excess_samples, rng=excess_rng
        )
    return MirrorDiagnostic(record=record, mask=mask, field=u, cluster=cluster, excess=excess)
