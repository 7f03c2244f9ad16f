"""Seeded experiment campaigns: run, persist, summarize, and compare.

One JSON config drives a whole campaign so every algorithm shares the
same instance and the same derived run seeds (base_seed + run_index).
Result files are plain JSON/CSV written atomically; everything except
timings.json is a pure function of the config, so a rerun reproduces the
directory byte for byte. Wall-clock seconds live in timings.json only
and are never used as a pass or fail signal.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .etpso import MoEtpso
from .gvrp import GvrpInstance, GvrpProblem, generate_instance, read_instance, write_instance
from .metrics import (
    CampaignResult,
    FrontSnapshot,
    averaged_cs,
    averaged_hv,
    campaign_bounds,
)
from .nsga2 import Nsga2
from .pareto import dominates

__all__ = [
    "ALGORITHM_REGISTRY",
    "AlgorithmSpec",
    "CampaignConfig",
    "load_campaign_config",
    "run_campaign",
    "load_campaign",
    "write_metrics",
    "compare_campaign",
]

ALGORITHM_REGISTRY = {"mo-etpso": MoEtpso, "nsga2": Nsga2}

# Controlled by the campaign itself, so per-algorithm blocks may not set them.
_RESERVED_PARAMS = ("seed", "max_iterations")

_GENERATOR_KEYS = ("seed", "d_total", "n_stops", "capacity", "v_min", "v_max")

_LABEL_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-")

MANIFEST_FORMAT = "swarmfront-campaign-1"


@dataclass(frozen=True)
class AlgorithmSpec:
    """One algorithm entry of a campaign: registry name, label, parameters."""

    name: str
    label: str
    params: dict = field(default_factory=dict)

    def build(self, seed: int, max_iterations: int):
        estimator = ALGORITHM_REGISTRY[self.name](**self.params)
        estimator.set_params(seed=seed, max_iterations=max_iterations)
        return estimator

    def resolved_params(self) -> dict:
        """Full parameter block with campaign-controlled keys removed."""
        params = ALGORITHM_REGISTRY[self.name](**self.params).get_params()
        for key in _RESERVED_PARAMS:
            params.pop(key, None)
        return params


@dataclass(frozen=True)
class CampaignConfig:
    """Validated campaign description loaded from a config file."""

    algorithms: tuple[AlgorithmSpec, ...]
    runs: int = 16
    max_iterations: int = 100
    base_seed: int = 0
    instance_path: str | None = None
    instance_params: dict | None = None
    output_dir: str | None = None

    @property
    def run_seeds(self) -> tuple[int, ...]:
        return tuple(self.base_seed + k for k in range(self.runs))

    def resolve_instance(self) -> GvrpInstance:
        if self.instance_path is not None:
            return read_instance(self.instance_path)
        return generate_instance(**self.instance_params)


def _require_keys(mapping: dict, allowed, context: str) -> None:
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigurationError(f"unknown {context} keys: {', '.join(unknown)}")


def _config_int(raw, name: str, minimum: int) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")
    if raw < minimum:
        raise ConfigurationError(f"{name} must be at least {minimum}, got {raw}")
    return raw


def _parse_algorithm(block, index: int) -> AlgorithmSpec:
    if not isinstance(block, dict):
        raise ConfigurationError(f"algorithms[{index}] must be an object")
    _require_keys(block, ("name", "label", "params"), f"algorithms[{index}]")
    name = block.get("name")
    if name not in ALGORITHM_REGISTRY:
        known = ", ".join(sorted(ALGORITHM_REGISTRY))
        raise ConfigurationError(
            f"algorithms[{index}]: unknown algorithm {name!r} (known: {known})"
        )
    label = block.get("label", name)
    if not isinstance(label, str) or not label or not set(label) <= _LABEL_CHARS:
        raise ConfigurationError(
            f"algorithms[{index}]: label must use only letters, digits, '.', '_', '-'"
        )
    params = block.get("params", {})
    if not isinstance(params, dict):
        raise ConfigurationError(f"algorithms[{index}]: params must be an object")
    valid = ALGORITHM_REGISTRY[name]().get_params()
    for key in params:
        if key in _RESERVED_PARAMS:
            raise ConfigurationError(
                f"algorithms[{index}]: {key!r} is set by the campaign, not per algorithm"
            )
        if key not in valid:
            raise ConfigurationError(
                f"algorithms[{index}]: {name} has no parameter {key!r}"
            )
    return AlgorithmSpec(name=name, label=label, params=dict(params))


def load_campaign_config(path) -> CampaignConfig:
    """Parse and validate a campaign config file.

    Relative instance paths resolve against the config file's directory.

    Raises:
        ConfigurationError: On unreadable files, malformed JSON, unknown
            keys or algorithms, duplicate labels, or invalid values.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"config {path} is not valid JSON (line {exc.lineno}, column {exc.colno})"
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a JSON object")
    _require_keys(
        raw,
        ("instance", "algorithms", "runs", "max_iterations", "base_seed", "output_dir"),
        "config",
    )

    if "instance" not in raw:
        raise ConfigurationError("config must declare an instance")
    instance = raw["instance"]
    instance_path: str | None = None
    instance_params: dict | None = None
    if isinstance(instance, str):
        candidate = Path(instance)
        if not candidate.is_absolute():
            candidate = path.parent / candidate
        instance_path = str(candidate)
    elif isinstance(instance, dict):
        _require_keys(instance, _GENERATOR_KEYS, "instance")
        missing = sorted(set(_GENERATOR_KEYS) - set(instance))
        if missing:
            raise ConfigurationError(f"instance is missing keys: {', '.join(missing)}")
        instance_params = dict(instance)
    else:
        raise ConfigurationError("instance must be a file path or a generator object")

    blocks = raw.get("algorithms")
    if not isinstance(blocks, list) or not blocks:
        raise ConfigurationError("algorithms must be a nonempty list")
    algorithms = tuple(_parse_algorithm(block, i) for i, block in enumerate(blocks))
    labels = [spec.label for spec in algorithms]
    if len(set(labels)) != len(labels):
        raise ConfigurationError(f"algorithm labels must be unique, got {labels}")

    output_dir = raw.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigurationError("output_dir must be a string")

    return CampaignConfig(
        algorithms=algorithms,
        runs=_config_int(raw.get("runs", 16), "runs", 1),
        max_iterations=_config_int(raw.get("max_iterations", 100), "max_iterations", 1),
        base_seed=_config_int(raw.get("base_seed", 0), "base_seed", 0),
        instance_path=instance_path,
        instance_params=instance_params,
        output_dir=output_dir,
    )


def _write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_json_atomic(path: Path, payload) -> None:
    _write_text_atomic(path, json.dumps(payload, indent=2, allow_nan=False) + "\n")


def _run_record(spec: AlgorithmSpec, run_index: int, seed: int, estimator) -> dict:
    iterations = []
    for report in estimator.reports_:
        gbest = report.gbest_objectives
        iterations.append(
            {
                "iteration": report.iteration,
                "front": [list(point) for point in report.front.points],
                "front_changed": report.front_changed,
                "evaluations_used": report.evaluations_used,
                "gbest": None if gbest is None else list(gbest),
            }
        )
    final_front = [
        {"objectives": list(objectives), "genome": [float(v) for v in genome]}
        for objectives, genome in estimator.front_members_
    ]
    return {
        "algorithm": spec.name,
        "label": spec.label,
        "run": run_index,
        "seed": seed,
        "evaluations": estimator.evaluations_,
        "iterations": iterations,
        "final_front": final_front,
    }


def run_campaign(config: CampaignConfig, out_dir) -> dict:
    """Execute every (algorithm, seed) pair and persist the result tree.

    Writes instance.json, one runs/<label>/run_<k>.json per completed
    run, manifest.json with every resolved parameter and per-run status,
    and timings.json with wall-clock seconds. A failing run is recorded
    in the manifest and the campaign continues.

    Returns:
        The manifest dict that was written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    instance = config.resolve_instance()
    write_instance(instance, out / "instance.json")
    problem = GvrpProblem(instance)

    run_status = []
    timings: dict[str, list[float]] = {}
    for spec in config.algorithms:
        run_dir = out / "runs" / spec.label
        run_dir.mkdir(parents=True, exist_ok=True)
        timings[spec.label] = []
        for run_index, seed in enumerate(config.run_seeds):
            estimator = spec.build(seed=seed, max_iterations=config.max_iterations)
            started = time.perf_counter()
            status = {
                "algorithm": spec.label,
                "run": run_index,
                "seed": seed,
                "status": "completed",
                "error": None,
                "file": f"runs/{spec.label}/run_{run_index}.json",
            }
            try:
                estimator.fit(problem)
            except Exception as exc:
                status["status"] = "failed"
                status["error"] = str(exc)
                status["file"] = None
            else:
                _write_json_atomic(
                    run_dir / f"run_{run_index}.json",
                    _run_record(spec, run_index, seed, estimator),
                )
            timings[spec.label].append(time.perf_counter() - started)
            run_status.append(status)

    manifest = {
        "format": MANIFEST_FORMAT,
        "instance": {
            "file": "instance.json",
            "d_total": instance.d_total,
            "n_stops": instance.n_stops,
            "capacity": instance.capacity,
            "v_min": instance.v_min,
            "v_max": instance.v_max,
            "initial_load": instance.initial_load,
        },
        "runs": config.runs,
        "max_iterations": config.max_iterations,
        "base_seed": config.base_seed,
        "run_seeds": list(config.run_seeds),
        "algorithms": [
            {
                "name": spec.name,
                "label": spec.label,
                "evaluations_per_iteration": spec.build(
                    seed=0, max_iterations=config.max_iterations
                ).evaluations_per_iteration,
                "params": spec.resolved_params(),
            }
            for spec in config.algorithms
        ],
        "run_status": run_status,
    }
    _write_json_atomic(out / "manifest.json", manifest)
    _write_json_atomic(out / "timings.json", timings)
    return manifest


@dataclass(frozen=True)
class LoadedRun:
    """One completed run's persisted data, parsed back into memory."""

    label: str
    run_index: int
    seed: int
    fronts: tuple[FrontSnapshot, ...]
    front_changed: tuple[bool, ...]
    final_front: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...]
    evaluations: int


@dataclass(frozen=True)
class LoadedCampaign:
    """A result directory parsed back into memory for metrics passes."""

    manifest: dict
    runs: dict[str, tuple[LoadedRun, ...]]
    missing: tuple[str, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(block["label"] for block in self.manifest["algorithms"])

    def require_complete(self) -> None:
        if self.missing:
            listing = "\n  ".join(self.missing)
            raise RuntimeError(f"campaign results are incomplete:\n  {listing}")

    def result_for(self, label: str) -> CampaignResult:
        runs = self.runs[label]
        return CampaignResult(
            fronts=tuple(run.fronts for run in runs),
            front_changed=tuple(run.front_changed for run in runs),
            seeds=tuple(run.seed for run in runs),
        )

    def all_fronts(self):
        for runs in self.runs.values():
            for run in runs:
                yield from run.fronts

    def merged_final_front(self, label: str) -> list[tuple[tuple[float, ...], tuple[float, ...]]]:
        """Non-dominated union of all runs' final fronts for one algorithm."""
        pool: dict[tuple[float, ...], tuple[float, ...]] = {}
        for run in self.runs[label]:
            for objectives, genome in run.final_front:
                pool.setdefault(objectives, genome)
        points = list(pool)
        kept = [
            p for p in points
            if not any(dominates(np.array(q), np.array(p)) for q in points)
        ]
        return [(p, pool[p]) for p in sorted(kept)]


def _parse_run_file(path: Path, label: str) -> LoadedRun:
    data = json.loads(path.read_text(encoding="utf-8"))
    fronts = []
    changed = []
    for step in data["iterations"]:
        fronts.append(FrontSnapshot.from_points(step["front"], step["iteration"]))
        changed.append(bool(step["front_changed"]))
    final = tuple(
        (tuple(float(v) for v in member["objectives"]), tuple(float(v) for v in member["genome"]))
        for member in data["final_front"]
    )
    return LoadedRun(
        label=label,
        run_index=int(data["run"]),
        seed=int(data["seed"]),
        fronts=tuple(fronts),
        front_changed=tuple(changed),
        final_front=final,
        evaluations=int(data["evaluations"]),
    )


def load_campaign(result_dir) -> LoadedCampaign:
    """Parse a result directory written by run_campaign.

    Failed or absent runs are listed in ``missing`` rather than raising,
    so callers can print a diagnostic naming every gap at once.

    Raises:
        RuntimeError: If the manifest itself is absent or unreadable.
    """
    root = Path(result_dir)
    manifest_path = root / "manifest.json"
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise RuntimeError(f"cannot read {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RuntimeError(f"{manifest_path} is not valid JSON: {exc}") from exc
    if manifest.get("format") != MANIFEST_FORMAT:
        raise RuntimeError(
            f"{manifest_path} has format {manifest.get('format')!r}, expected {MANIFEST_FORMAT!r}"
        )

    runs: dict[str, list[LoadedRun]] = {b["label"]: [] for b in manifest["algorithms"]}
    missing = []
    for status in manifest["run_status"]:
        label = status["algorithm"]
        where = f"{label} run {status['run']} (seed {status['seed']})"
        if status["status"] != "completed":
            missing.append(f"{where}: failed: {status['error']}")
            continue
        path = root / status["file"]
        if not path.is_file():
            missing.append(f"{where}: file {status['file']} is missing")
            continue
        runs[label].append(_parse_run_file(path, label))
    return LoadedCampaign(
        manifest=manifest,
        runs={label: tuple(items) for label, items in runs.items()},
        missing=tuple(missing),
    )


def _format_float(value: float) -> str:
    return repr(float(value))


def _series_csv(labels, series_by_label, iteration_count: int) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["iteration", *labels])
    for t in range(iteration_count):
        row = [str(t + 1)]
        row.extend(_format_float(series_by_label[label][t]) for label in labels)
        writer.writerow(row)
    return buffer.getvalue()


def write_metrics(result_dir) -> list[Path]:
    """Compute and write hv.csv, cs.csv, and final_front_<label>.csv.

    Normalization bounds are derived jointly over every front of every
    algorithm, so the hypervolume columns share one scale. The final
    front per algorithm is the non-dominated union over its runs.

    Returns:
        The list of written file paths.

    Raises:
        RuntimeError: If any run is failed or missing (all gaps listed).
    """
    root = Path(result_dir)
    campaign = load_campaign(root)
    campaign.require_complete()
    labels = campaign.labels
    bounds = campaign_bounds(campaign.all_fronts())

    hv_by_label = {}
    cs_by_label = {}
    iteration_count = 0
    for label in labels:
        result = campaign.result_for(label)
        hv_by_label[label] = averaged_hv(result, bounds)
        cs_by_label[label] = averaged_cs(result)
        iteration_count = result.iteration_count

    written = []
    hv_path = root / "hv.csv"
    _write_text_atomic(hv_path, _series_csv(labels, hv_by_label, iteration_count))
    written.append(hv_path)
    cs_path = root / "cs.csv"
    _write_text_atomic(cs_path, _series_csv(labels, cs_by_label, iteration_count))
    written.append(cs_path)

    for label in labels:
        members = campaign.merged_final_front(label)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        genome_length = len(members[0][1]) if members else 0
        writer.writerow(["z1", "z2", *(f"genome_{i}" for i in range(genome_length))])
        for objectives, genome in members:
            writer.writerow([_format_float(v) for v in (*objectives, *genome)])
        path = root / f"final_front_{label}.csv"
        _write_text_atomic(path, buffer.getvalue())
        written.append(path)
    return written


def _not_dominated_fraction(points, rivals) -> float | None:
    """Fraction of ``points`` no rival dominates; None for an empty front."""
    if not points:
        return None
    rival_arrays = [np.array(r) for r in rivals]
    survivors = sum(
        1 for p in points
        if not any(dominates(r, np.array(p)) for r in rival_arrays)
    )
    return survivors / len(points)


def compare_campaign(result_dir) -> tuple[str, dict]:
    """Summarize final-iteration metrics and cross-dominance between algorithms.

    For every algorithm the report holds the final-iteration mean
    hypervolume and mean convergence score; for every pair it holds the
    differences and, per side, the fraction of its merged final front
    that no point of the other side dominates. Writes compare.json.

    Returns:
        (human-readable text, the payload written to compare.json).

    Raises:
        ConfigurationError: If the campaign has fewer than two algorithms.
        RuntimeError: If any run is failed or missing.
    """
    root = Path(result_dir)
    campaign = load_campaign(root)
    campaign.require_complete()
    labels = campaign.labels
    if len(labels) < 2:
        raise ConfigurationError(
            f"compare needs at least two algorithms, the campaign has {len(labels)}"
        )
    bounds = campaign_bounds(campaign.all_fronts())

    summary = {}
    fronts = {}
    for label in labels:
        result = campaign.result_for(label)
        summary[label] = {
            "mean_final_hv": float(averaged_hv(result, bounds)[-1]),
            "mean_final_cs": float(averaged_cs(result)[-1]),
        }
        fronts[label] = [objectives for objectives, _ in campaign.merged_final_front(label)]

    pairs = []
    for i, first in enumerate(labels):
        for second in labels[i + 1:]:
            pairs.append(
                {
                    "first": first,
                    "second": second,
                    "hv_difference": summary[first]["mean_final_hv"] - summary[second]["mean_final_hv"],
                    "cs_difference": summary[first]["mean_final_cs"] - summary[second]["mean_final_cs"],
                    "first_not_dominated_fraction": _not_dominated_fraction(
                        fronts[first], fronts[second]
                    ),
                    "second_not_dominated_fraction": _not_dominated_fraction(
                        fronts[second], fronts[first]
                    ),
                }
            )

    payload = {
        "bounds": {
            "minimum": [float(v) for v in bounds.minimum],
            "maximum": [float(v) for v in bounds.maximum],
        },
        "algorithms": summary,
        "pairs": pairs,
    }
    _write_json_atomic(root / "compare.json", payload)

    lines = ["final-iteration summary (higher is better):"]
    for label in labels:
        stats = summary[label]
        lines.append(
            f"  {label}: mean HV {stats['mean_final_hv']:.6f}, "
            f"mean CS {stats['mean_final_cs']:.4f}"
        )
    for pair in pairs:
        lines.append(f"{pair['first']} vs {pair['second']}:")
        lines.append(f"  HV difference {pair['hv_difference']:+.6f}")
        lines.append(f"  CS difference {pair['cs_difference']:+.4f}")
        for side, key in (
            (pair["first"], "first_not_dominated_fraction"),
            (pair["second"], "second_not_dominated_fraction"),
        ):
            fraction = pair[key]
            shown = "n/a (empty front)" if fraction is None else f"{fraction:.3f}"
            lines.append(f"  fraction of {side} front points left undominated: {shown}")
    return "\n".join(lines), payload
