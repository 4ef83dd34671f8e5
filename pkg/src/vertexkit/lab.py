"""Operator zoo and experiment orchestration.

Ships the worst-case circular-shift isometry, its contraction, and the
hash-perturbed operator with a bounded nonexpansiveness violation, plus a
config-driven runner producing one residual-trace CSV per (algorithm,
operator) cell and a manifest.  Identical config and seed give
byte-identical CSVs regardless of the parallelism degree.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .algorithms import (
    IterationTrace,
    NonFiniteError,
    OperatorSpec,
    parse_algorithm,
    run_algorithm,
    write_trace_csv,
)

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 finalizer; avalanche for seed derivation."""
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Per-cell seed so parallel execution order cannot affect output."""
    return _mix64((master & _MASK) ^ _mix64(index))


def sign_hash(w: np.ndarray, seed: int = 0) -> np.ndarray:
    """Deterministic +-1 vector from the raw bit pattern of w; Hash(0) = 0.

    The input bytes go through blake2b into a 64-bit state, then a
    counter-based splitmix lane per coordinate emits the sign bits.
    Same w and seed always give the same output.
    """
    w = np.ascontiguousarray(w, dtype=np.float64)
    if not w.any():
        return np.zeros_like(w)
    digest = hashlib.blake2b(w.tobytes(), digest_size=8).digest()
    state = int.from_bytes(digest, "little") ^ _mix64(seed)
    idx = np.arange(len(w), dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (np.uint64(state) + (idx + np.uint64(1)) * np.uint64(_GOLDEN)) & np.uint64(_MASK)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return np.where((z >> np.uint64(63)).astype(bool), 1.0, -1.0)


def worst_case_operator(n: int) -> OperatorSpec:
    """Signed circular shift (-x_N, x_1, ..., x_{N-1}); an isometry with
    unique fixed point 0."""
    if n < 1:
        raise ValueError(f"need dimension >= 1, got {n}")

    def apply(x: np.ndarray) -> np.ndarray:
        y = np.roll(x, 1)
        y[0] = -y[0]
        return y

    return OperatorSpec(n, apply, fixed_point=np.zeros(n), label="worst-case")


def contraction(base: OperatorSpec, gamma: float) -> OperatorSpec:
    """gamma * T; keeps the fixed point when it is the origin."""
    if not 0 < gamma <= 1:
        raise ValueError(f"need 0 < gamma <= 1, got {gamma}")
    fixed = base.fixed_point
    if fixed is not None and np.any(fixed != 0) and gamma != 1.0:
        fixed = None  # scaling moves any nonzero fixed point

    def apply(x: np.ndarray) -> np.ndarray:
        return gamma * base.apply(x)

    return OperatorSpec(
        base.dimension,
        apply,
        fixed_point=fixed,
        gamma=gamma * base.gamma,
        delta=base.delta,
        label=f"contraction({gamma})",
    )


def violation_operator(n: int, gamma: float, delta: float, seed: int = 0) -> OperatorSpec:
    """On the doubled space: (gamma T x1, gamma T x2 + delta/(2 sqrt(n)) Hash(x1)).

    For gamma < 1 the squared nonexpansiveness violation is bounded by
    delta^2/(1-gamma^2); Hash(0) = 0 keeps the origin fixed.
    """
    if not 0 < gamma <= 1:
        raise ValueError(f"need 0 < gamma <= 1, got {gamma}")
    if delta < 0:
        raise ValueError(f"need delta >= 0, got {delta}")
    base = worst_case_operator(n)
    amp = delta / (2.0 * np.sqrt(n))

    def apply(x: np.ndarray) -> np.ndarray:
        x1, x2 = x[:n], x[n:]
        return np.concatenate([gamma * base.apply(x1), gamma * base.apply(x2) + amp * sign_hash(x1, seed)])

    return OperatorSpec(
        2 * n,
        apply,
        fixed_point=np.zeros(2 * n),
        gamma=gamma,
        delta=delta,
        label=f"violation(gamma={gamma},delta={delta})",
    )


@dataclass(frozen=True)
class OperatorConfig:
    kind: str  # "worst-case" | "contraction" | "violation"
    gamma: float = 1.0
    delta: float = 0.0

    def build(self, n: int, seed: int) -> OperatorSpec:
        if self.kind == "worst-case":
            return worst_case_operator(n)
        if self.kind == "contraction":
            return contraction(worst_case_operator(n), self.gamma)
        if self.kind == "violation":
            return violation_operator(n, self.gamma, self.delta, seed)
        raise ValueError(f"unknown operator kind {self.kind!r}")

    @property
    def doubled(self) -> bool:
        return self.kind == "violation"

    def slug(self) -> str:
        if self.kind == "worst-case":
            return "worst-case"
        if self.kind == "contraction":
            return f"contraction-{self.gamma}"
        return f"violation-{self.gamma}-{self.delta}"


@dataclass(frozen=True)
class ExperimentConfig:
    """Reproducible experiment description: same config + seed means
    bit-identical CSVs."""

    n: int
    algorithms: tuple[str, ...]
    operators: tuple[OperatorConfig, ...]
    out_dir: str
    y0_rule: str = "auto"  # "auto" | "uniform" | "first-block"
    radius: float = 1.0
    parallelism: int = 1
    seed: int = 0
    record: str = "all"  # "all" | "sparse"

    def to_json(self) -> dict:
        data = asdict(self)
        data["algorithms"] = list(self.algorithms)
        data["operators"] = [asdict(o) for o in self.operators]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        return cls(
            n=int(data["n"]),
            algorithms=tuple(data["algorithms"]),
            operators=tuple(OperatorConfig(**o) for o in data["operators"]),
            out_dir=data["out_dir"],
            y0_rule=data.get("y0_rule", "auto"),
            radius=float(data.get("radius", 1.0)),
            parallelism=int(data.get("parallelism", 1)),
            seed=int(data.get("seed", 0)),
            record=data.get("record", "all"),
        )


def initial_point(cfg: ExperimentConfig, op_cfg: OperatorConfig) -> np.ndarray:
    """-R/sqrt(N) on the leading block: the whole space for plain
    operators, the first half on the doubled violation space."""
    n, r = cfg.n, cfg.radius
    rule = cfg.y0_rule
    if rule == "auto":
        rule = "first-block" if op_cfg.doubled else "uniform"
    lead = -(r / np.sqrt(n)) * np.ones(n)
    if rule == "uniform":
        if op_cfg.doubled:
            raise ValueError("uniform y0 rule does not fit a doubled-space operator")
        return lead
    if rule == "first-block":
        if not op_cfg.doubled:
            return lead
        return np.concatenate([lead, np.zeros(n)])
    raise ValueError(f"unknown y0 rule {rule!r}")


def _sanitize(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-." else "-" for c in label)


@dataclass
class CellResult:
    algorithm: str
    operator: str
    csv: str | None
    status: str
    wall_time_s: float
    final_residual_sq: float | None


def _run_cell(cfg: ExperimentConfig, alg: str, op_cfg: OperatorConfig, index: int) -> CellResult:
    t0 = time.perf_counter()
    out = Path(cfg.out_dir)
    name = f"trace_{_sanitize(alg)}_{_sanitize(op_cfg.slug())}.csv"
    try:
        seed = derive_seed(cfg.seed, index)
        op = op_cfg.build(cfg.n, seed)
        y0 = initial_point(cfg, op_cfg)
        trace = run_algorithm(alg, op, y0, cfg.n, record_all=(cfg.record == "all"))
        write_trace_csv(trace, out / name)
        final = float(trace.final_residual_sq) if trace.records else None
        return CellResult(alg, op_cfg.slug(), name, "ok", time.perf_counter() - t0, final)
    except NonFiniteError as exc:
        return CellResult(alg, op_cfg.slug(), None, f"aborted: {exc}", time.perf_counter() - t0, None)


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run every (algorithm, operator) cell, write CSVs and a manifest.

    Cells run independently (optionally in parallel); per-cell seeds are
    derived from (master seed, cell index), so the parallelism degree
    never changes any output byte.  A non-finite blowup aborts only its
    own cell.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = [(alg, op_cfg) for alg in cfg.algorithms for op_cfg in cfg.operators]
    if cfg.parallelism > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            results = list(
                pool.map(lambda t: _run_cell(cfg, t[1][0], t[1][1], t[0]), enumerate(cells))
            )
    else:
        results = [_run_cell(cfg, alg, op_cfg, i) for i, (alg, op_cfg) in enumerate(cells)]
    manifest = {
        "config": cfg.to_json(),
        "assumptions": ["radius applies to the leading block of y0; R=1 unless configured"],
        "cells": [
            {
                "algorithm": r.algorithm,
                "operator": r.operator,
                "csv": r.csv,
                "status": r.status,
                "wall_time_s": r.wall_time_s,
                "final_residual_sq": r.final_residual_sq,
            }
            for r in results
        ],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
