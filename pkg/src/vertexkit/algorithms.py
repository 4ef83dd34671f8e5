"""Execution engines and closed-form families.

The generic engine replays any step matrix; OHM, Dual-OHM, RDO and FSDM
also have constant-memory recurrences that must reproduce the engine's
trajectory (exactly in rational mode, to 1e-10 relative in floats).
Runtime vectors are float64 numpy arrays; passing object arrays of exact
rationals switches every coefficient to exact arithmetic, which the
equivalence tests rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import Rational, rat
from .diagrams import increasing_path, is_noncrossing
from .gluing import glue_h
from .qcert import HMatrix, is_optimal
from .vertex import NotAVertexError, diagram_from_vertex


class NonFiniteError(ArithmeticError):
    pass


class DimensionMismatchError(ValueError):
    pass


class InvalidScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorSpec:
    """A fixed-point operator with its known structure.

    gamma is the contraction factor (1 = plain nonexpansive) and delta the
    hash amplitude of the violation construction; both are metadata used
    by the lab for bound bookkeeping.
    """

    dimension: int
    apply: Callable[[np.ndarray], np.ndarray]
    fixed_point: np.ndarray | None = None
    gamma: float = 1.0
    delta: float = 0.0
    label: str = "operator"


@dataclass(frozen=True)
class TraceRecord:
    index: int
    residual_sq: float | Rational
    guaranteed: bool
    bound: float | Rational | None


@dataclass(frozen=True)
class IterationTrace:
    label: str
    n: int
    records: tuple[TraceRecord, ...]
    iterates: tuple | None = None  # populated on request for equivalence tests

    @property
    def final_residual_sq(self):
        return self.records[-1].residual_sq

    def residuals(self) -> list:
        return [r.residual_sq for r in self.records]


def _fmt_csv(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, float):
        return repr(x)
    try:
        return repr(float(x)) if isinstance(x, (np.floating,)) else str(x)
    except TypeError:  # pragma: no cover
        return str(x)


def write_trace_csv(trace: IterationTrace, path: str | Path) -> None:
    lines = ["iter,residual_sq,guaranteed,bound"]
    for r in trace.records:
        lines.append(f"{r.index},{_fmt_csv(r.residual_sq)},{int(r.guaranteed)},{_fmt_csv(r.bound)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace_csv(path: str | Path) -> list[dict]:
    rows = []
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    for line in lines[1:]:
        parts = line.split(",")
        rows.append(dict(zip(header, parts)))
    return rows


def _is_exact(y: np.ndarray) -> bool:
    return y.dtype == object


class _Recorder:
    """Collects per-iterate residual records with bounds and flags."""

    def __init__(self, op: OperatorSpec, y0: np.ndarray, record_all: bool, guaranteed):
        self.exact = _is_exact(y0)
        self.record_all = record_all
        self.guaranteed = frozenset() if guaranteed is None else frozenset(guaranteed)
        self.records: list[TraceRecord] = []
        if not self.exact and op.fixed_point is not None:
            diff = y0 - op.fixed_point
            with np.errstate(over="ignore"):
                self.r_sq = float(diff @ diff)
        else:
            self.r_sq = None

    def note(self, k: int, residual: np.ndarray) -> None:
        flagged = k in self.guaranteed
        if not self.record_all and not flagged:
            return
        if self.exact:
            sq = sum((v * v for v in residual), rat(0))
            bound = None
        else:
            with np.errstate(over="ignore"):
                sq = float(residual @ residual)
            bound = 4.0 * self.r_sq / (k + 1) ** 2 if self.r_sq is not None else None
        self.records.append(TraceRecord(k, sq, flagged, bound))


def _check_dims(op: OperatorSpec, y0: np.ndarray) -> None:
    if op.dimension != y0.shape[0] or y0.ndim != 1:
        raise DimensionMismatchError(
            f"operator dimension {op.dimension} vs initial point shape {y0.shape}"
        )


def _check_finite(y: np.ndarray, k: int) -> None:
    if not np.isfinite(y).all():
        raise NonFiniteError(f"non-finite value at iteration {k}")


def run_hmatrix(
    h: HMatrix,
    op: OperatorSpec,
    y0: np.ndarray,
    record_all: bool = True,
    guaranteed: Iterable[int] | None = None,
    label: str | None = None,
    keep_iterates: bool = False,
) -> IterationTrace:
    """Execute the N-1 fixed-step updates that a step matrix defines."""
    y0 = np.asarray(y0)
    _check_dims(op, y0)
    n = h.n
    rec = _Recorder(op, y0, record_all, guaranteed)
    exact = rec.exact
    y = y0
    iterates = [y0] if keep_iterates else None
    if exact:
        coeff_rows = [list(row) for row in h.rows]
        residuals: list[np.ndarray] = []
        for k in range(n - 1):
            t = op.apply(y)
            r = y - t
            rec.note(k, r)
            residuals.append(r)
            step = y
            for j, c in enumerate(coeff_rows[k]):
                if c != 0:
                    step = step - c * residuals[j]
            y = step
            if keep_iterates:
                iterates.append(y)
    else:
        coeff_rows = [np.array([float(v) for v in row]) for row in h.rows]
        residuals_mat = np.empty((max(n - 1, 1), y0.shape[0]))
        for k in range(n - 1):
            t = op.apply(y)
            r = y - t
            rec.note(k, r)
            residuals_mat[k] = r
            with np.errstate(over="ignore", invalid="ignore"):
                y = y - coeff_rows[k] @ residuals_mat[: k + 1]
            _check_finite(y, k)  # overflow surfaces here, not as a warning
            if keep_iterates:
                iterates.append(y)
    if record_all or (n - 1) in rec.guaranteed:
        rec.note(n - 1, y - op.apply(y))
    return IterationTrace(
        label or f"hmatrix(n={n})",
        n,
        tuple(rec.records),
        tuple(iterates) if keep_iterates else None,
    )


def _sc(exact: bool, num: int, den: int = 1):
    return rat(num, den) if exact else num / den


def run_ohm(
    op: OperatorSpec,
    y0: np.ndarray,
    n: int,
    record_all: bool = True,
    guaranteed: Iterable[int] | None = None,
    keep_iterates: bool = False,
) -> IterationTrace:
    """Halpern anchor recurrence y_{k+1} = y0/(k+2) + (k+1)/(k+2) T y_k."""
    y0 = np.asarray(y0)
    _check_dims(op, y0)
    if guaranteed is None:
        guaranteed = range(n)
    rec = _Recorder(op, y0, record_all, guaranteed)
    exact = rec.exact
    y = y0
    iterates = [y0] if keep_iterates else None
    for k in range(n - 1):
        t = op.apply(y)
        rec.note(k, y - t)
        y = _sc(exact, 1, k + 2) * y0 + _sc(exact, k + 1, k + 2) * t
        if not exact:
            _check_finite(y, k)
        if keep_iterates:
            iterates.append(y)
    if record_all or (n - 1) in rec.guaranteed:
        rec.note(n - 1, y - op.apply(y))
    return IterationTrace("ohm", n, tuple(rec.records), tuple(iterates) if keep_iterates else None)


def run_dual_ohm(
    op: OperatorSpec,
    y0: np.ndarray,
    n: int,
    record_all: bool = True,
    guaranteed: Iterable[int] | None = None,
    keep_iterates: bool = False,
) -> IterationTrace:
    """Momentum form y_{k+1} = y_k + (N-k-1)/(N-k) (T y_k - T y_{k-1}),
    with T y_{-1} read as y_0; keeps one previous operator output."""
    y0 = np.asarray(y0)
    _check_dims(op, y0)
    if guaranteed is None:
        guaranteed = (n - 1,)
    rec = _Recorder(op, y0, record_all, guaranteed)
    exact = rec.exact
    y = y0
    prev_t = y0
    iterates = [y0] if keep_iterates else None
    for k in range(n - 1):
        t = op.apply(y)
        rec.note(k, y - t)
        y = y + _sc(exact, n - k - 1, n - k) * (t - prev_t)
        prev_t = t
        if not exact:
            _check_finite(y, k)
        if keep_iterates:
            iterates.append(y)
    if record_all or (n - 1) in rec.guaranteed:
        rec.note(n - 1, y - op.apply(y))
    return IterationTrace(
        "dual-ohm", n, tuple(rec.records), tuple(iterates) if keep_iterates else None
    )


def _normalize_schedule(schedule: int | Sequence[int], n: int) -> list[int]:
    if isinstance(schedule, int):
        if schedule < 1:
            raise InvalidScheduleError(f"period must be >= 1, got {schedule}")
        blocks = []
        while sum(blocks) < n - 1:
            blocks.append(schedule)
        return blocks or [schedule]
    blocks = [int(p) for p in schedule]
    if not blocks or any(p < 1 for p in blocks):
        raise InvalidScheduleError(f"invalid schedule {blocks}")
    if sum(blocks) < n - 1:
        raise InvalidScheduleError(f"schedule {blocks} covers only {sum(blocks)} of {n - 1} steps")
    return blocks


def schedule_boundaries(schedule: int | Sequence[int], n: int) -> list[int]:
    """Partial sums S_k of the block lengths that fall within the horizon."""
    blocks = _normalize_schedule(schedule, n)
    sums, acc = [], 0
    for p in blocks:
        acc += p
        if acc <= n - 1:
            sums.append(acc)
    return sums


def run_rdo(
    op: OperatorSpec,
    y0: np.ndarray,
    schedule: int | Sequence[int],
    n: int,
    record_all: bool = True,
    guaranteed: Iterable[int] | None = None,
    keep_iterates: bool = False,
) -> IterationTrace:
    """Repeated Dual-OHM with a period or an explicit block schedule.

    Three-branch block recurrence; memory is y0, the block-anchor residual
    and the previous operator output.  A schedule longer than the horizon
    simply truncates (the step matrix of a prefix is the prefix of the
    step matrix).
    """
    y0 = np.asarray(y0)
    _check_dims(op, y0)
    blocks = _normalize_schedule(schedule, n)
    if guaranteed is None:
        guaranteed = schedule_boundaries(schedule, n)
    rec = _Recorder(op, y0, record_all, guaranteed)
    exact = rec.exact
    y = y0
    prev_t = y0
    anchor_res = None  # y_{S_k} - T y_{S_k} of the current block
    iterates = [y0] if keep_iterates else None
    block_idx = 0
    s_k = 0  # S_k for the block in progress
    for step in range(n - 1):
        if step == s_k + blocks[block_idx] and step > 0:
            s_k += blocks[block_idx]
            block_idx += 1
        p = blocks[block_idx]
        s_next = s_k + p
        ell = step - s_k
        t = op.apply(y)
        rec.note(step, y - t)
        if ell == 0:
            anchor_res = y - t
            y = y - _sc(exact, p * (s_k + 1), s_next + 1) * anchor_res + _sc(exact, p, s_next + 1) * (y0 - y)
        elif ell == 1:
            y = y + _sc(exact, p - 1, p) * (t - y + _sc(exact, s_k + 1, s_next + 1) * anchor_res)
        else:
            y = y + _sc(exact, p - ell, p - ell + 1) * (t - prev_t)
        prev_t = t
        if not exact:
            _check_finite(y, step)
        if keep_iterates:
            iterates.append(y)
    if record_all or (n - 1) in rec.guaranteed:
        rec.note(n - 1, y - op.apply(y))
    label = f"rdo:{schedule}" if isinstance(schedule, int) else "rdo:" + ",".join(map(str, blocks))
    return IterationTrace(label, n, tuple(rec.records), tuple(iterates) if keep_iterates else None)


@dataclass
class FsdmLedger:
    """Active dyadic checkpoints (t, y_t, g_t); y0 is kept by the runner.

    A checkpoint t opens when iterate t completes (t even) and closes once
    the run passes t + 2^{nu2(t)}, so the live set is the open enclosing
    dyadic blocks: depth stays logarithmic in the iteration count.
    """

    checkpoints: dict = field(default_factory=dict)
    max_depth: int = 0

    def push(self, t: int, y, g) -> None:
        self.checkpoints[t] = (y, g)
        self.max_depth = max(self.max_depth, len(self.checkpoints))

    def free_closed(self, j: int) -> None:
        dead = [t for t in self.checkpoints if t + (t & -t) <= j]
        for t in dead:
            del self.checkpoints[t]

    def y(self, t: int):
        return self.checkpoints[t][0]

    def g(self, t: int):
        return self.checkpoints[t][1]

    @property
    def depth(self) -> int:
        return len(self.checkpoints)


def _nu2(j: int) -> int:
    return (j & -j).bit_length() - 1


def _dyadic_prefix_sums(m: int) -> list[int]:
    """Prefix sums t_1 < t_2 < ... of the binary expansion of m
    (descending powers)."""
    sums, acc = [], 0
    for bit in range(m.bit_length() - 1, -1, -1):
        p = 1 << bit
        if m & p:
            acc += p
            sums.append(acc)
    return sums


def run_fsdm(
    op: OperatorSpec,
    y0: np.ndarray,
    n: int,
    record_all: bool = True,
    guaranteed: Iterable[int] | None = None,
    keep_iterates: bool = False,
    ledger_out: FsdmLedger | None = None,
) -> IterationTrace:
    """Fractal self-dual recurrence with the logarithmic checkpoint ledger.

    y_j = y_{j-1} - 2^nu g_j + (y_{m} - y_{j-1})/2 + sum_r 2^(nu-r) g_{t_{p-r+1}},
    nu = nu2(j), m = j - 2^nu, t_r the dyadic prefix sums of m.  Any horizon
    runs the prefix of the infinite schedule.
    """
    y0 = np.asarray(y0)
    _check_dims(op, y0)
    if guaranteed is None:
        guaranteed = [2**r - 1 for r in range(1, n.bit_length() + 1) if 2**r - 1 <= n - 1]
    rec = _Recorder(op, y0, record_all, guaranteed)
    exact = rec.exact
    ledger = ledger_out if ledger_out is not None else FsdmLedger()
    half = rat(1, 2) if exact else 0.5
    y = y0
    iterates = [y0] if keep_iterates else None
    for j in range(1, n):
        t = op.apply(y)
        r = y - t
        rec.note(j - 1, r)
        g = half * r
        ledger.free_closed(j)
        nu = _nu2(j)
        m = j - (1 << nu)
        ym = y0 if m == 0 else ledger.y(m)
        two_nu = rat(2) ** nu if exact else float(2**nu)
        y_new = y - two_nu * g + half * (ym - y)
        sums = _dyadic_prefix_sums(m)
        p = len(sums)
        for r_i in range(1, p + 1):
            coeff = rat(2) ** (nu - r_i) if exact else 2.0 ** (nu - r_i)
            y_new = y_new + coeff * ledger.g(sums[p - r_i])
        if j % 2 == 0:
            ledger.push(j, y_new, g)
        y = y_new
        if not exact:
            _check_finite(y, j)
        if keep_iterates:
            iterates.append(y)
    if record_all or (n - 1) in rec.guaranteed:
        rec.note(n - 1, y - op.apply(y))
    return IterationTrace("fsdm", n, tuple(rec.records), tuple(iterates) if keep_iterates else None)


def ohm_hmatrix(size: int) -> HMatrix:
    """Step matrix of the anchor method: -j/(k(k+1)) below, k/(k+1) on the
    diagonal."""
    return HMatrix.of(
        [
            [rat(-j, k * (k + 1)) if j < k else rat(k, k + 1) for j in range(1, k + 1)]
            for k in range(1, size + 1)
        ]
    )


def dual_ohm_hmatrix(size: int) -> HMatrix:
    """Anti-diagonal transpose of the anchor method's step matrix."""
    n = size + 1
    return HMatrix.of(
        [
            [
                rat(-(n - k), (n - j) * (n - j + 1)) if j < k else rat(n - k, n - k + 1)
                for j in range(1, k + 1)
            ]
            for k in range(1, size + 1)
        ]
    )


def rdo_hmatrix(schedule: int | Sequence[int], n_blocks: int | None = None) -> HMatrix:
    """Left fold of gluing over Dual-OHM blocks.

    ``rdo_hmatrix(p, n)`` builds the periodic matrix on np+1 nodes;
    passing an explicit block list builds the scheduled variant.  The
    intermediate glue checks are skipped: every fold input is Dual-OHM or
    a previous fold result, optimal by the gluing theorem.
    """
    if isinstance(schedule, int):
        if n_blocks is None or n_blocks < 1:
            raise InvalidScheduleError("periodic rdo_hmatrix needs n_blocks >= 1")
        blocks = [schedule] * n_blocks
    else:
        blocks = [int(p) for p in schedule]
    if not blocks or any(p < 1 for p in blocks):
        raise InvalidScheduleError(f"invalid schedule {blocks}")
    h = dual_ohm_hmatrix(blocks[0])
    for p in blocks[1:]:
        h = glue_h(h, dual_ohm_hmatrix(p - 1), check=False)
    return h


def fsdm_hmatrix(n_power: int) -> HMatrix:
    """Step matrix of the fractal self-dual method on 2^n nodes.

    Recursive block form: top-left and bottom-right copies of the previous
    matrix around a bridging row -a/2 | 2^(n-2) and column -b/2, where b
    is a reversed and a carries the running column sums.
    """
    if n_power < 0:
        raise ValueError(f"need n_power >= 0, got {n_power}")
    if n_power == 0:
        return HMatrix.empty()
    h_rows: list[list] = [[rat(1, 2)]]
    a = [rat(1, 2)]
    for n in range(2, n_power + 1):
        s = 2 ** (n - 1) - 1
        b = list(reversed(a))
        rows = [list(r) for r in h_rows]
        rows.append([rat(-1, 2) * x for x in a] + [rat(2) ** (n - 2)])
        for i in range(1, s + 1):
            rows.append([rat(0)] * s + [rat(-1, 2) * b[i - 1]] + list(h_rows[i - 1]))
        h_rows = rows
        a = [rat(1, 2) * x for x in a] + [rat(2 ** (n - 1) + 1, 4)] + a
    return HMatrix.of(h_rows)


def fsdm_a_vector(n_power: int) -> list[Rational]:
    """Column-sum vector a of the fractal matrix (reversal gives b)."""
    if n_power < 1:
        raise ValueError(f"need n_power >= 1, got {n_power}")
    a = [rat(1, 2)]
    for n in range(2, n_power + 1):
        a = [rat(1, 2) * x for x in a] + [rat(2 ** (n - 1) + 1, 4)] + a
    return a


@dataclass(frozen=True)
class AlgorithmSpec:
    """Parsed form of the CLI algorithm strings."""

    kind: str  # ohm | dual-ohm | rdo | fsdm | hmatrix
    schedule: tuple[int, ...] | int | None = None
    h: HMatrix | None = None
    label: str = ""


def parse_algorithm(spec: str) -> AlgorithmSpec:
    """Parse 'ohm', 'dual-ohm', 'rdo:p', 'rdo:p1,p2,...', 'fsdm' or
    'hmatrix:<file.json>'."""
    if spec == "ohm":
        return AlgorithmSpec("ohm", label=spec)
    if spec == "dual-ohm":
        return AlgorithmSpec("dual-ohm", label=spec)
    if spec == "fsdm":
        return AlgorithmSpec("fsdm", label=spec)
    if spec.startswith("rdo:"):
        parts = spec[4:].split(",")
        if len(parts) == 1:
            return AlgorithmSpec("rdo", schedule=int(parts[0]), label=spec)
        return AlgorithmSpec("rdo", schedule=tuple(int(p) for p in parts), label=spec)
    if spec.startswith("hmatrix:"):
        import json

        path = spec[len("hmatrix:") :]
        h = HMatrix.from_json(json.loads(Path(path).read_text()))
        return AlgorithmSpec("hmatrix", h=h, label=spec)
    raise ValueError(f"unknown algorithm spec {spec!r}")


def guaranteed_trace_indices(spec: AlgorithmSpec | str, n: int) -> tuple[int, ...]:
    """Iterate indices carrying the 4/(k+1)^2 bound for a given algorithm."""
    if isinstance(spec, str):
        spec = parse_algorithm(spec)
    if spec.kind == "ohm":
        return tuple(range(n))
    if spec.kind == "dual-ohm":
        return (n - 1,)
    if spec.kind == "rdo":
        return tuple(schedule_boundaries(spec.schedule, n))
    if spec.kind == "fsdm":
        return tuple(2**r - 1 for r in range(1, n.bit_length() + 1) if 2**r - 1 <= n - 1)
    if spec.kind == "hmatrix":
        h = spec.h
        try:
            d = diagram_from_vertex(h)
            if is_noncrossing(d):
                return tuple(j - 1 for j in increasing_path(d, 1))
        except NotAVertexError:
            pass
        return (n - 1,) if is_optimal(h) else ()
    raise ValueError(f"unknown algorithm kind {spec.kind!r}")


def run_algorithm(
    spec: AlgorithmSpec | str,
    op: OperatorSpec,
    y0: np.ndarray,
    n: int,
    record_all: bool = True,
    keep_iterates: bool = False,
) -> IterationTrace:
    """Dispatch a parsed algorithm spec to its runner with its guarantee set."""
    if isinstance(spec, str):
        spec = parse_algorithm(spec)
    guaranteed = guaranteed_trace_indices(spec, n)
    common = dict(record_all=record_all, guaranteed=guaranteed, keep_iterates=keep_iterates)
    if spec.kind == "ohm":
        return run_ohm(op, y0, n, **common)
    if spec.kind == "dual-ohm":
        return run_dual_ohm(op, y0, n, **common)
    if spec.kind == "rdo":
        return run_rdo(op, y0, spec.schedule, n, **common)
    if spec.kind == "fsdm":
        return run_fsdm(op, y0, n, **common)
    if spec.kind == "hmatrix":
        if spec.h.n != n:
            raise DimensionMismatchError(f"step matrix has horizon {spec.h.n}, requested {n}")
        return run_hmatrix(spec.h, op, y0, label=spec.label, **common)
    raise ValueError(f"unknown algorithm kind {spec.kind!r}")
