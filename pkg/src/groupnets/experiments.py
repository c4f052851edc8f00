"""Monte-Carlo sweep harness: generate, measure, summarize.

A sweep walks the grid (modality, size, replication) in lexicographic
order, derives one independent random stream per cell by hashing
``(master_seed, modality, size, rep)``, and records every metric as one
CSV row.  Output is a pure function of the configuration: the same
config produces byte-identical CSV whether run serially or on a worker
pool.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import mean, stdev
from typing import Iterable

from .dynamics import (
    ConvergenceError,
    NoiseModel,
    build_consensus_matrix,
    convergence_time,
    markov_report,
    second_eigenvalue_modulus,
    spectral_radius,
)
from .generators import MODALITIES, GenerationError, ModalityParams, generate
from .graphs import structural_summary

__all__ = [
    "SweepConfig",
    "MetricsRecord",
    "SummaryRow",
    "METRIC_FIELDS",
    "CSV_FIELDS",
    "replication_seed",
    "compute_record",
    "run_sweep",
    "summarize",
    "write_records_csv",
    "read_records_csv",
]

METRIC_FIELDS = (
    "avg_shortest_path",
    "avg_degree",
    "density",
    "clustering",
    "lambda_max",
    "rho2",
    "tau_asym",
    "delta_ss",
)

CSV_FIELDS = ("modality", "n_requested", "n_actual", "seed", "group_count") + METRIC_FIELDS


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one Monte-Carlo sweep."""

    sizes: tuple[int, ...]
    replications: int
    modalities: tuple[str, ...] = MODALITIES
    master_seed: int = 0
    params: ModalityParams = field(default_factory=ModalityParams)
    noise: NoiseModel = field(default_factory=NoiseModel)
    heavy_metrics_max_n: int = 600

    def __post_init__(self) -> None:
        if not self.sizes:
            raise ValueError("sizes must be nonempty")
        if list(self.sizes) != sorted(self.sizes):
            raise ValueError("sizes must be sorted ascending")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        unknown = [m for m in self.modalities if m not in MODALITIES]
        if unknown:
            raise ValueError(f"unknown modalities: {unknown}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")

    def to_json_text(self) -> str:
        payload = {
            "sizes": list(self.sizes),
            "replications": self.replications,
            "modalities": list(self.modalities),
            "master_seed": self.master_seed,
            "params": {
                "epsilon": self.params.epsilon,
                "bundle_scale": self.params.bundle_scale,
                "comember_inclusion": self.params.comember_inclusion,
                "branching_pmf": {str(k): v for k, v in self.params.branching_pmf.items()},
            },
            "noise": {"sigma2": self.noise.sigma2},
            "heavy_metrics_max_n": self.heavy_metrics_max_n,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json_text(cls, text: str) -> "SweepConfig":
        payload = json.loads(text)
        params = payload.get("params", {})
        branching = params.get("branching_pmf")
        kwargs = {}
        if "epsilon" in params:
            kwargs["epsilon"] = float(params["epsilon"])
        if "bundle_scale" in params:
            kwargs["bundle_scale"] = float(params["bundle_scale"])
        if params.get("comember_inclusion") is not None:
            kwargs["comember_inclusion"] = float(params["comember_inclusion"])
        if branching:
            kwargs["branching_pmf"] = {int(k): float(v) for k, v in branching.items()}
        noise = payload.get("noise", {})
        sigma2 = noise.get("sigma2", 1.0)
        return cls(
            sizes=tuple(int(s) for s in payload["sizes"]),
            replications=int(payload["replications"]),
            modalities=tuple(payload.get("modalities", MODALITIES)),
            master_seed=int(payload.get("master_seed", 0)),
            params=ModalityParams(**kwargs),
            noise=NoiseModel(sigma2 if isinstance(sigma2, (int, float)) else tuple(sigma2)),
            heavy_metrics_max_n=int(payload.get("heavy_metrics_max_n", 600)),
        )


@dataclass(frozen=True)
class MetricsRecord:
    """One experiment row; metric fields are None when not computed."""

    modality: str
    n_requested: int
    seed: int
    n_actual: int | None = None
    group_count: int | None = None
    avg_shortest_path: float | None = None
    avg_degree: float | None = None
    density: float | None = None
    clustering: float | None = None
    lambda_max: float | None = None
    rho2: float | None = None
    tau_asym: float | None = None
    delta_ss: float | None = None


@dataclass(frozen=True)
class SummaryRow:
    modality: str
    n: int
    metric: str
    mean: float
    std_error: float | None
    ci95: float | None
    count: int


def replication_seed(master_seed: int, modality: str, size: int, rep: int) -> int:
    """Stable 63-bit stream seed for one replication cell."""
    key = f"{master_seed}:{modality}:{size}:{rep}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def compute_record(
    modality: str,
    size: int,
    rep: int,
    cfg: SweepConfig,
) -> MetricsRecord:
    """Generate one graph and measure it; failures yield a bare record."""
    seed = replication_seed(cfg.master_seed, modality, size, rep)
    try:
        mg = generate(modality, size, cfg.params, seed)
        g = mg.graph
        summary = structural_summary(g)
        lam = spectral_radius(g.to_csr())
        sys = build_consensus_matrix(g)
        rho2 = second_eigenvalue_modulus(sys)
        tau = convergence_time(rho2)
        delta = None
        if g.n <= cfg.heavy_metrics_max_n:
            delta = markov_report(sys, cfg.noise).delta_ss
        return MetricsRecord(
            modality=modality,
            n_requested=size,
            seed=seed,
            n_actual=g.n,
            group_count=mg.group_count,
            avg_shortest_path=summary.average_shortest_path,
            avg_degree=summary.average_degree,
            density=summary.density,
            clustering=summary.average_clustering,
            lambda_max=lam,
            rho2=rho2,
            tau_asym=tau,
            delta_ss=delta,
        )
    except (GenerationError, ConvergenceError):
        # keep replication counts honest: record the failure, never resample
        return MetricsRecord(modality=modality, n_requested=size, seed=seed)


def _worker(task: tuple) -> MetricsRecord:
    cfg, modality, size, rep = task
    return compute_record(modality, size, rep, cfg)


def run_sweep(cfg: SweepConfig, workers: int = 1) -> list[MetricsRecord]:
    """All records of the sweep, ordered by (modality, size, rep)."""
    tasks = [
        (cfg, modality, size, rep)
        for modality in sorted(set(cfg.modalities))
        for size in cfg.sizes
        for rep in range(cfg.replications)
    ]
    if workers <= 1:
        return [_worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (4 * workers))
        return list(pool.map(_worker, tasks, chunksize=chunk))


def summarize(records: Iterable[MetricsRecord]) -> list[SummaryRow]:
    """Per (modality, n, metric) mean, standard error and 95% CI half-width."""
    cells: dict[tuple[str, int, str], list[float]] = {}
    order: list[tuple[str, int, str]] = []
    for rec in records:
        for metric in METRIC_FIELDS:
            value = getattr(rec, metric)
            if value is None:
                continue
            key = (rec.modality, rec.n_requested, metric)
            if key not in cells:
                cells[key] = []
                order.append(key)
            cells[key].append(value)
    rows = []
    for key in sorted(order):
        values = cells[key]
        if len(values) >= 2:
            sd = stdev(values)
            se = sd / len(values) ** 0.5
            ci = 1.96 * se
        else:
            se = None
            ci = None
        rows.append(
            SummaryRow(
                modality=key[0],
                n=key[1],
                metric=key[2],
                mean=mean(values),
                std_error=se,
                ci95=ci,
                count=len(values),
            )
        )
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_records_csv(records: Iterable[MetricsRecord], path) -> None:
    """UTF-8, LF line endings, header fixed, missing values empty."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in records:
            writer.writerow([_format_cell(getattr(rec, f)) for f in CSV_FIELDS])


def read_records_csv(path) -> list[MetricsRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_FIELDS:
            raise ValueError(f"unexpected CSV header: {header}")
        records = []
        for row in reader:
            vals = dict(zip(CSV_FIELDS, row))
            records.append(
                MetricsRecord(
                    modality=vals["modality"],
                    n_requested=int(vals["n_requested"]),
                    seed=int(vals["seed"]),
                    n_actual=int(vals["n_actual"]) if vals["n_actual"] else None,
                    group_count=int(vals["group_count"]) if vals["group_count"] else None,
                    **{
                        f: float(vals[f]) if vals[f] else None
                        for f in METRIC_FIELDS
                    },
                )
            )
    return records
