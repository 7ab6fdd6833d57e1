"""Interferometric pair tomography of the heralded three-photon state.

The protocol works entirely inside the three-dimensional two-blue/one-red
span.  After verifying that the counting diagonals are uniform (1/3 each),
each complex off-diagonal of the 3x3 matrix is obtained from a conditioned
pair measurement: detect a blue photon in one signal channel, then
interfere the remaining pair in the mixed color basis

    |+_phi> = (|BR> + e^{i phi} |RB>) / sqrt(2)

at the two phases phi = 0 and phi = pi/2.  Linear inversion of the outcome
frequencies gives the pair coherence rho01, and the three-photon coefficient
follows as (2/3) * rho01 (the conditioned block carries trace 2/3 before
normalization).  Linear inversion is exact on noiseless probabilities;
finite-shot reconstructions may leave the physical cone slightly, which is
reported, never repaired.

Sampling is deterministic: each setting draws from a generator seeded with
``seed XOR fnv1a64(setting label)``, so independent settings decouple and a
whole run is a pure function of (input state, shots, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .density import BASIS_THREE, PairRho, ThreePhotonRho, trace_distance
from .errors import (
    BadProbability,
    DiagonalsNotUniform,
    InvalidRho,
    ParamOutOfRange,
    SettingMismatch,
    ValidationError,
)
from .fock import Color, PureState, reduce_to_channels
from .herald import rho_biseparable, rho_incoherent

#: channel conditioned on Blue -> (remaining pair, block indices, coefficient)
_CONDITION_MAP = {
    2: ((3, 4), (0, 1), "a"),
    3: ((2, 4), (0, 2), "b"),
    4: ((2, 3), (1, 2), "c"),
}

_PHASES = (0.0, math.pi / 2.0)

DEFAULT_DIAG_THRESHOLD = 0.02


def _fnv1a64(label: str) -> int:
    h = 0xCBF29CE484222325
    for byte in label.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def setting_seed(seed: int, label: str) -> int:
    """Per-setting derived seed: ``seed XOR fnv1a64(label)``."""
    return (int(seed) ^ _fnv1a64(label)) & 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class TomoSetting:
    """One interferometric measurement configuration."""

    channel_pair: tuple[int, int]
    phase: float
    conditioned_on: tuple[int, Color] = (2, Color.BLUE)

    def __post_init__(self):
        pair = (int(self.channel_pair[0]), int(self.channel_pair[1]))
        cond = (int(self.conditioned_on[0]), Color(self.conditioned_on[1]))
        if cond[0] in pair:
            raise ValidationError(
                f"conditioning channel {cond[0]} must not belong to the pair {pair}"
            )
        object.__setattr__(self, "channel_pair", pair)
        object.__setattr__(self, "phase", float(self.phase))
        object.__setattr__(self, "conditioned_on", cond)

    @property
    def label(self) -> str:
        i, j = self.channel_pair
        ch, color = self.conditioned_on
        return f"pair={i}{j};cond={color.letter}{ch};phase={self.phase:.6f}"

    def as_json_dict(self) -> dict:
        return {
            "channel_pair": list(self.channel_pair),
            "phase": self.phase,
            "conditioned_on": [self.conditioned_on[0], self.conditioned_on[1].letter],
        }


@dataclass(frozen=True)
class MeasurementRecord:
    """Counts of the two interferometer outcomes for one setting."""

    setting: TomoSetting | None
    n_plus: int
    n_minus: int
    shots: int
    seed: int

    def __post_init__(self):
        if self.n_plus < 0 or self.n_minus < 0:
            raise ValidationError("negative counts")
        if self.n_plus + self.n_minus != self.shots:
            raise ValidationError(
                f"counts {self.n_plus}+{self.n_minus} do not sum to shots {self.shots}"
            )

    @property
    def counts(self) -> tuple[int, int]:
        return (self.n_plus, self.n_minus)

    @property
    def frequency(self) -> float:
        return self.n_plus / self.shots

    def as_json_dict(self) -> dict:
        doc = {
            "n_plus": int(self.n_plus),
            "n_minus": int(self.n_minus),
            "shots": int(self.shots),
            "seed": int(self.seed),
        }
        if self.setting is not None:
            doc["setting"] = self.setting.as_json_dict()
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "MeasurementRecord":
        setting = None
        if "setting" in doc:
            s = doc["setting"]
            setting = TomoSetting(
                tuple(s["channel_pair"]),
                float(s["phase"]),
                (int(s["conditioned_on"][0]), Color.from_letter(s["conditioned_on"][1])),
            )
        return cls(
            setting=setting,
            n_plus=int(doc["n_plus"]),
            n_minus=int(doc["n_minus"]),
            shots=int(doc["shots"]),
            seed=int(doc["seed"]),
        )


# ---------------------------------------------------------------------------
# measurement model
# ---------------------------------------------------------------------------


def setting_probabilities(rho: PairRho, phase: float) -> tuple[float, float]:
    """Outcome probabilities of the phi-interferometer on a pair state.

    ``p_plus = (rho00 + rho11)/2 + Re(e^{i phase} rho01)``; the two outcomes
    sum to the trace (one).
    """
    if not rho.is_physical():
        raise InvalidRho(
            f"pair matrix has eigenvalue {rho.min_eigenvalue():.3g} below tolerance"
        )
    m = rho.matrix
    half = 0.5 * float(np.real(m[0, 0] + m[1, 1]))
    coh = float(np.real(np.exp(1j * float(phase)) * m[0, 1]))
    p_plus = half + coh
    p_minus = half - coh
    return (p_plus, p_minus)


def sample_record(
    probs: tuple[float, float],
    shots: int,
    seed: int,
    setting: TomoSetting | None = None,
) -> MeasurementRecord:
    """Binomial draw of the (+) outcome; deterministic in the seed."""
    p_plus, p_minus = (float(probs[0]), float(probs[1]))
    if abs(p_plus + p_minus - 1.0) > 1e-9:
        raise BadProbability(f"probabilities sum to {p_plus + p_minus:.12g}, not 1")
    if min(p_plus, p_minus) < -1e-9:
        raise BadProbability(f"negative probability in {probs}")
    shots = int(shots)
    if shots < 1:
        raise ParamOutOfRange(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    n_plus = int(rng.binomial(shots, min(1.0, max(0.0, p_plus))))
    return MeasurementRecord(setting, n_plus, shots - n_plus, shots, int(seed))


def reconstruct_offdiagonal(
    rec0: MeasurementRecord, rec90: MeasurementRecord
) -> complex:
    """Pair coherence rho01 from the phase-0 and phase-90 records:
    ``(f0 - 1/2) - i (f90 - 1/2)`` with f the (+) frequency."""
    s0, s90 = rec0.setting, rec90.setting
    if s0 is not None and s90 is not None:
        if s0.channel_pair != s90.channel_pair or s0.conditioned_on != s90.conditioned_on:
            raise SettingMismatch("records measure different conditioned pairs")
        if abs(s0.phase) > 1e-9 or abs(s90.phase - math.pi / 2.0) > 1e-9:
            raise SettingMismatch(
                f"expected phases (0, pi/2), got ({s0.phase}, {s90.phase})"
            )
    return complex(rec0.frequency - 0.5, -(rec90.frequency - 0.5))


def condition_on_blue(rho: ThreePhotonRho, channel: int) -> PairRho:
    """Pair state of the remaining two channels after detecting a blue
    photon in `channel`; the selected 2x2 block renormalized to unit trace."""
    try:
        _, (i, j), _ = _CONDITION_MAP[int(channel)]
    except KeyError:
        raise ParamOutOfRange(f"conditioning channel must be 2, 3 or 4, got {channel}") from None
    block = rho.matrix[np.ix_((i, j), (i, j))]
    tr = float(np.real(np.trace(block)))
    if tr <= 1e-12:
        raise InvalidRho(f"no population with a blue photon in channel {channel}")
    return PairRho(block / tr)


# ---------------------------------------------------------------------------
# full protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientEstimate:
    """One reconstructed off-diagonal with its per-quadrature shot noise."""

    value: complex
    se_re: float
    se_im: float

    def as_json_dict(self) -> dict:
        return {
            "re": float(self.value.real),
            "im": float(self.value.imag),
            "se_re": float(self.se_re),
            "se_im": float(self.se_im),
        }


@dataclass(frozen=True)
class TomographyResult:
    """Everything one tomography run produces."""

    rho: ThreePhotonRho
    coefficients: Mapping[str, CoefficientEstimate]
    diagonal_frequencies: Mapping[str, float]
    records: tuple[MeasurementRecord, ...]
    shots: int | None
    seed: int | None


def _exact_rho(source) -> ThreePhotonRho:
    if isinstance(source, ThreePhotonRho):
        return source
    if isinstance(source, PureState):
        return reduce_to_channels(source, (2, 3, 4))
    raise ValidationError(
        f"tomography source must be a PureState or ThreePhotonRho, got {type(source).__name__}"
    )


def _binomial_se(freq: float, shots: int) -> float:
    return math.sqrt(max(0.0, freq * (1.0 - freq)) / shots)


def run_tomography(
    source,
    shots: int | None = None,
    seed: int = 0,
    *,
    diag_threshold: float = DEFAULT_DIAG_THRESHOLD,
) -> TomographyResult:
    """Run the full conditioned-pair protocol on a heralded state or matrix.

    With ``shots=None`` the exact outcome probabilities are inverted (the
    reconstruction is then exact to rounding); with an integer shot budget
    every setting and the diagonal check are sampled from per-setting seeds
    derived from `seed`.  Counting statistics deviating from the uniform 1/3
    diagonals by more than `diag_threshold` raise
    :class:`~wchip.errors.DiagonalsNotUniform`.
    """
    rho_true = _exact_rho(source)
    if shots is not None:
        shots = int(shots)
        if shots < 1:
            raise ParamOutOfRange(f"shots must be >= 1, got {shots}")

    # --- step 1: verify the counting diagonals -----------------------------
    diag = np.clip(np.real(np.diag(rho_true.matrix)), 0.0, 1.0)
    if shots is None:
        freqs = tuple(float(d) for d in diag)
    else:
        rng = np.random.default_rng(setting_seed(seed, "diagonals"))
        counts = rng.multinomial(shots, diag / diag.sum())
        freqs = tuple(float(c) / shots for c in counts)
    diagonal_frequencies = dict(zip(BASIS_THREE, freqs))
    deviation = max(abs(f - 1.0 / 3.0) for f in freqs)
    if deviation > float(diag_threshold):
        raise DiagonalsNotUniform(
            "counting statistics deviate from uniform thirds by "
            f"{deviation:.4f} (threshold {float(diag_threshold)}); observed "
            + ", ".join(f"{k}={v:.4f}" for k, v in diagonal_frequencies.items())
        )

    # --- step 2: conditioned pair measurements at phases 0 and pi/2 --------
    coefficients: dict[str, CoefficientEstimate] = {}
    records: list[MeasurementRecord] = []
    for channel in (2, 3, 4):
        pair, _, name = _CONDITION_MAP[channel]
        pair_rho = condition_on_blue(rho_true, channel)
        freqs_by_phase: list[float] = []
        ses: list[float] = []
        for phase in _PHASES:
            setting = TomoSetting(pair, phase, (channel, Color.BLUE))
            probs = setting_probabilities(pair_rho, phase)
            if shots is None:
                freqs_by_phase.append(probs[0])
                ses.append(0.0)
            else:
                record = sample_record(
                    probs, shots, setting_seed(seed, setting.label), setting
                )
                records.append(record)
                freqs_by_phase.append(record.frequency)
                ses.append(_binomial_se(record.frequency, shots))
        rho01 = complex(freqs_by_phase[0] - 0.5, -(freqs_by_phase[1] - 0.5))
        coefficients[name] = CoefficientEstimate(
            value=(2.0 / 3.0) * rho01,
            se_re=(2.0 / 3.0) * ses[0],
            se_im=(2.0 / 3.0) * ses[1],
        )

    rho_hat = ThreePhotonRho.from_offdiagonals(
        coefficients["a"].value, coefficients["b"].value, coefficients["c"].value
    )
    return TomographyResult(
        rho=rho_hat,
        coefficients=coefficients,
        diagonal_frequencies=diagonal_frequencies,
        records=tuple(records),
        shots=shots,
        seed=None if shots is None else int(seed),
    )


def reconstruct_rho234(
    source,
    shots: int | None = None,
    seed: int = 0,
    *,
    diag_threshold: float = DEFAULT_DIAG_THRESHOLD,
) -> ThreePhotonRho:
    """The reconstructed three-photon matrix (see :func:`run_tomography`)."""
    return run_tomography(
        source, shots=shots, seed=seed, diag_threshold=diag_threshold
    ).rho


# ---------------------------------------------------------------------------
# discrimination report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscriminationReport:
    """W fidelity and distances to the two indistinguishable-by-counting
    mixtures, plus the consistency verdict."""

    fidelity_w: float
    trace_distance_to_rho_s: float
    trace_distance_to_rho_b: float
    w_consistent: bool
    threshold: float

    def as_json_dict(self) -> dict:
        return {
            "fidelity_W": float(self.fidelity_w),
            "trace_distance_to_rhoS": float(self.trace_distance_to_rho_s),
            "trace_distance_to_rhoB": float(self.trace_distance_to_rho_b),
            "W-consistent": bool(self.w_consistent),
            "threshold": float(self.threshold),
        }


def discriminate(rho: ThreePhotonRho, *, threshold: float = 0.9) -> DiscriminationReport:
    """Compare a reconstructed matrix against the W projector and the two
    counterexample mixtures; flags W-consistency at fidelity > threshold."""
    fid = rho.fidelity_w()
    return DiscriminationReport(
        fidelity_w=fid,
        trace_distance_to_rho_s=trace_distance(rho, rho_incoherent()),
        trace_distance_to_rho_b=trace_distance(rho, rho_biseparable()),
        w_consistent=bool(fid > float(threshold)),
        threshold=float(threshold),
    )
