"""Coupler-parameter optimization and robustness sweeps.

The objective is the T1 herald probability conditioned on double-pair
emission, measured from a full propagate-and-herald run of the canonical
circuit — never from the closed-form prefactor, so the closed form stays a
test target instead of an input assumption.  Phases are excluded from the
search: they provably change the heralded component only by a global phase.

``maximize`` does a coarse grid scan to locate the basin (the objective
vanishes on every face of the unit cube, so the scan covers the interior)
followed by bounded Nelder-Mead refinement down to the requested tolerance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize

from .circuit import build_transform, canonical_w_circuit
from .elements import two_pair_state
from .errors import GridTooLarge, ParamOutOfRange, PatternMismatch, ValidationError
from .fock import Color, apply_mode_transform, color_pattern
from .herald import Branch, herald

_W_PATTERNS = ("BBR", "BRB", "RBB")

#: Default coarse-grid step of :func:`maximize`.  The objective factorizes
#: into three single-variable terms each with one interior maximum, so a
#: 0.04 scan already brackets the basin; a finer step (e.g. 0.02) can be
#: requested but roughly octuples the scan cost on a single core.
GRID_STEP = 0.04

#: Default coarse-grid bounds; the objective is identically zero whenever
#: any r_i reaches 0 or 1, so the scan needs only the interior.
GRID_BOUNDS = (0.1, 0.9)


def herald_objective(r1: float, r2: float, r3: float) -> float:
    """P(T1 herald | double pair) of the canonical circuit, from simulation."""
    for name, val in (("r1", r1), ("r2", r2), ("r3", r3)):
        if not 0.0 <= float(val) <= 1.0:
            raise ParamOutOfRange(f"{name} must lie in [0, 1], got {val}")
    spec = canonical_w_circuit(float(r1), float(r2), float(r3))
    state = apply_mode_transform(two_pair_state(0), build_transform(spec))
    return herald(state, Branch.T1).probability


class OptimizationResult(NamedTuple):
    r1: float
    r2: float
    r3: float
    value: float


def maximize(
    tol: float = 1e-4,
    *,
    grid_step: float = GRID_STEP,
    grid_bounds: tuple[float, float] = GRID_BOUNDS,
) -> OptimizationResult:
    """Locate the reflectivities maximizing the herald probability.

    A coarse scan with the given step over ``grid_bounds`` (per axis) feeds
    the best cell into Nelder-Mead refinement with simplex tolerance `tol`,
    clamped to the unit cube.  Deterministic: ties resolve to the first grid
    cell in lexicographic order.
    """
    if not tol > 0.0:
        raise ParamOutOfRange(f"tol must be positive, got {tol}")
    if not 0.0 < grid_step < 0.5:
        raise ParamOutOfRange(f"grid_step must lie in (0, 0.5), got {grid_step}")
    lo, hi = (float(grid_bounds[0]), float(grid_bounds[1]))
    if not 0.0 <= lo < hi <= 1.0:
        raise ParamOutOfRange(f"grid bounds must satisfy 0 <= lo < hi <= 1, got {grid_bounds}")
    steps = int(round((hi - lo) / grid_step))
    axis = [lo + k * grid_step for k in range(steps + 1)]
    best_val = -1.0
    best = (axis[0], axis[0], axis[0])
    for r1 in axis:
        for r2 in axis:
            for r3 in axis:
                val = herald_objective(r1, r2, r3)
                if val > best_val:
                    best_val = val
                    best = (r1, r2, r3)

    def negated(x: np.ndarray) -> float:
        xc = np.clip(x, 0.0, 1.0)
        return -herald_objective(float(xc[0]), float(xc[1]), float(xc[2]))

    refined = minimize(
        negated,
        x0=np.array(best),
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * 3,
        options={
            "xatol": float(tol),
            "fatol": 1e-14,
            "maxiter": 2000,
            "initial_simplex": _initial_simplex(best, grid_step),
        },
    )
    candidate = tuple(float(v) for v in np.clip(refined.x, 0.0, 1.0))
    value = herald_objective(*candidate)
    if value < best_val:  # refinement must never lose to the scan
        candidate, value = best, best_val
    return OptimizationResult(candidate[0], candidate[1], candidate[2], value)


def _initial_simplex(center: Sequence[float], scale: float) -> np.ndarray:
    c = np.asarray(center, dtype=float)
    simplex = np.tile(c, (4, 1))
    for k in range(3):
        step = scale if c[k] + scale <= 1.0 else -scale
        simplex[k + 1, k] += step
    return simplex


# ---------------------------------------------------------------------------
# parameter sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian parameter grid and the metric to evaluate on each cell."""

    r1: tuple[float, ...]
    r2: tuple[float, ...]
    r3: tuple[float, ...]
    ad2_extinction: tuple[float, ...] = (0.0,)
    metric: str = "herald_probability"
    cell_cap: int = 10**6

    def __post_init__(self):
        for name in ("r1", "r2", "r3", "ad2_extinction"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ValidationError(f"sweep axis {name} is empty")
            if any(not 0.0 <= v <= 1.0 for v in vals):
                raise ParamOutOfRange(f"sweep axis {name} leaves [0, 1]: {vals}")
            object.__setattr__(self, name, vals)
        if self.metric not in ("herald_probability", "w_fidelity"):
            raise ValidationError(f"unknown sweep metric {self.metric!r}")
        if int(self.cell_cap) < 1:
            raise ValidationError("cell cap must be positive")
        object.__setattr__(self, "cell_cap", int(self.cell_cap))

    @property
    def n_cells(self) -> int:
        return len(self.r1) * len(self.r2) * len(self.r3) * len(self.ad2_extinction)


@dataclass(frozen=True)
class SweepTable:
    """Sweep output: a header and one row per grid cell."""

    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate the metric over the grid, rows in lexicographic cell order."""
    if spec.n_cells > spec.cell_cap:
        raise GridTooLarge(
            f"grid has {spec.n_cells} cells, exceeding the cap of {spec.cell_cap}"
        )
    rows = []
    for r1, r2, r3, eps in itertools.product(
        spec.r1, spec.r2, spec.r3, spec.ad2_extinction
    ):
        circuit = canonical_w_circuit(r1, r2, r3, ad2_extinction=eps)
        state = apply_mode_transform(two_pair_state(0), build_transform(circuit))
        if spec.metric == "herald_probability":
            value = herald(state, Branch.T1).probability
        else:
            value = _w_fidelity_colorblind(state)
        rows.append((r1, r2, r3, eps, float(value)))
    return SweepTable(
        columns=("r1", "r2", "r3", "ad2_extinction", spec.metric),
        rows=tuple(rows),
    )


def _w_fidelity_colorblind(state, *, t1_channel: int = 5) -> float:
    """W fidelity of the T1-conditioned state when the herald detector is
    color-blind (counts photons but not colors).

    With an imperfect router a blue photon can leak to T1; its signal
    partners carry the wrong color pattern and dilute the W overlap, so this
    is the robustness metric for extinction sweeps.  Computed as
    sum_env |<W|psi_env>|^2 / sum_env |psi_env|^2 over the T1-photon color
    environments.
    """
    w_amp = 1.0 / math.sqrt(3.0)
    overlap_by_env: dict[Color, complex] = {}
    norm_sq = 0.0
    for basis, amp in state.items():
        total = sum(n for _, n in basis)
        if total != 4:
            continue
        t1_part, signal_part = basis.split((t1_channel,))
        if len(t1_part) != 1 or t1_part[0][1] != 1:
            continue
        try:
            pattern = color_pattern(signal_part, (2, 3, 4))
        except PatternMismatch:
            continue
        norm_sq += amp.real * amp.real + amp.imag * amp.imag
        if pattern in _W_PATTERNS:
            env = t1_part[0][0].color
            overlap_by_env[env] = overlap_by_env.get(env, 0.0) + w_amp * amp
    if norm_sq <= 0.0:
        return 0.0
    return sum(abs(o) ** 2 for o in overlap_by_env.values()) / norm_sq
