"""Optical elements as mode transforms, and the pair-source states.

A directional coupler couples the like-colored modes of two channels; an
add-drop ring filter reroutes one color while passing the other; the source
emits color-correlated photon pairs into a single channel.  Every element
produces an exactly unitary :class:`~wchip.fock.ModeTransform` — imperfect
filters mis-route photons, they never absorb them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ChannelCollision, NotUnitary, OrderOutOfRange, ParamOutOfRange
from .fock import Color, FockBasisState, ModeLabel, ModeTransform, PureState

_COUPLER_TOL = 1e-9


@dataclass(frozen=True)
class DirectionalCoupler:
    """Evanescent coupler between two channels: beamsplitter with reflection
    ``r``, transmission ``t`` (``r**2 + t**2 = 1``) and cross phase ``phi``.

    The single-color action on the channel pair ``(a, b)`` is taken as the
    unitary

        ``[[t,  r e^{i phi}], [-r e^{-i phi},  t]]``

    whose driven row (input ``a``) is ``t a + r e^{i phi} b`` — the textbook
    transfer with the phase on the cross term.  The reverse cross term
    carries the conjugate phase and a sign, which is what unitarity requires
    for arbitrary ``phi`` (for ``phi = +-pi/2`` the matrix is symmetric).
    The matrix satisfies exchange symmetry: swapping the two channels equals
    transposing it.
    """

    channels: tuple[int, int]
    r: float
    t: float
    phi: float = 0.0

    def __post_init__(self):
        a, b = (int(self.channels[0]), int(self.channels[1]))
        if a == b:
            raise ChannelCollision(f"coupler needs two distinct channels, got {a}")
        if a < 0 or b < 0:
            raise ParamOutOfRange("channel indices must be non-negative")
        object.__setattr__(self, "channels", (a, b))
        r, t = float(self.r), float(self.t)
        if not (0.0 <= r <= 1.0 and 0.0 <= t <= 1.0):
            raise ParamOutOfRange(f"r and t must lie in [0, 1], got r={r}, t={t}")
        closure = abs(r * r + t * t - 1.0)
        if closure > _COUPLER_TOL:
            raise NotUnitary(f"r**2 + t**2 deviates from 1 by {closure:.3g}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "phi", float(self.phi))

    @classmethod
    def from_reflectivity(
        cls, channels: tuple[int, int], r: float, phi: float = 0.0
    ) -> "DirectionalCoupler":
        r = float(r)
        if not 0.0 <= r <= 1.0:
            raise ParamOutOfRange(f"reflectivity must lie in [0, 1], got {r}")
        return cls(channels, r, math.sqrt(max(0.0, 1.0 - r * r)), phi)


@dataclass(frozen=True)
class AddDropFilter:
    """Ring filter: the resonant color is dropped, the other passes through.

    ``extinction`` is the residual probability that a resonant photon leaks
    to the through port instead of the drop port (0 = ideal router, 1 =
    filter disabled).  The unused reverse direction (drop -> input) is
    completed unitarily; that port is never fed in the circuits built here.
    """

    input_channel: int
    through_channel: int
    drop_channel: int
    resonant_color: Color
    extinction: float = 0.0

    def __post_init__(self):
        chans = (int(self.input_channel), int(self.through_channel), int(self.drop_channel))
        if len(set(chans)) != 3:
            raise ChannelCollision(f"add-drop channels must be distinct, got {chans}")
        if min(chans) < 0:
            raise ParamOutOfRange("channel indices must be non-negative")
        object.__setattr__(self, "input_channel", chans[0])
        object.__setattr__(self, "through_channel", chans[1])
        object.__setattr__(self, "drop_channel", chans[2])
        object.__setattr__(self, "resonant_color", Color(self.resonant_color))
        eps = float(self.extinction)
        if not 0.0 <= eps <= 1.0:
            raise ParamOutOfRange(f"extinction must lie in [0, 1], got {eps}")
        object.__setattr__(self, "extinction", eps)


@dataclass(frozen=True)
class SourceSpec:
    """Pair source in one channel: emits correlated (Blue, Red) photon pairs
    with amplitude ``beta`` per pair, expanded to ``max_order`` pairs."""

    channel: int
    beta: complex
    max_order: int = 2

    def __post_init__(self):
        ch = int(self.channel)
        if ch < 0:
            raise ParamOutOfRange("source channel must be non-negative")
        object.__setattr__(self, "channel", ch)
        beta = complex(self.beta)
        if abs(beta) ** 2 > 1.0:
            raise ParamOutOfRange(f"|beta|**2 must not exceed 1, got {abs(beta)**2:.3g}")
        object.__setattr__(self, "beta", beta)
        order = int(self.max_order)
        if order not in (0, 1, 2):
            raise OrderOutOfRange(f"max_order must be 0, 1 or 2, got {order}")
        object.__setattr__(self, "max_order", order)


# ---------------------------------------------------------------------------
# element -> transform
# ---------------------------------------------------------------------------


def coupler_transform(dc: DirectionalCoupler) -> ModeTransform:
    """Four-mode transform of a coupler: the 2x2 block acts identically on
    the Red and the Blue modes of the two channels."""
    ca, cb = dc.channels
    modes = tuple(sorted(ModeLabel(ch, color) for ch in (ca, cb) for color in Color))
    pos = {m: i for i, m in enumerate(modes)}
    cross = dc.r * cmath.exp(1j * dc.phi)
    mat = np.zeros((4, 4), dtype=complex)
    for color in Color:
        ia, ib = pos[ModeLabel(ca, color)], pos[ModeLabel(cb, color)]
        mat[ia, ia] = dc.t
        mat[ia, ib] = cross
        mat[ib, ia] = -cross.conjugate()
        mat[ib, ib] = dc.t
    return ModeTransform(modes, mat)


def adddrop_transform(ad: AddDropFilter) -> ModeTransform:
    """Six-mode transform of an add-drop filter.

    Resonant color: input -> drop with amplitude sqrt(1 - extinction) and
    input -> through with amplitude sqrt(extinction).  Non-resonant color:
    input -> through with amplitude 1.  The remaining rows permute the idle
    ports so the whole map stays unitary at every extinction.
    """
    chans = (ad.input_channel, ad.through_channel, ad.drop_channel)
    modes = tuple(sorted(ModeLabel(ch, color) for ch in chans for color in Color))
    pos = {m: i for i, m in enumerate(modes)}
    mat = np.zeros((6, 6), dtype=complex)
    leak = math.sqrt(ad.extinction)
    drop = math.sqrt(1.0 - ad.extinction)
    for color in Color:
        i_in = pos[ModeLabel(ad.input_channel, color)]
        i_thr = pos[ModeLabel(ad.through_channel, color)]
        i_drp = pos[ModeLabel(ad.drop_channel, color)]
        if color is ad.resonant_color:
            mat[i_in, i_thr] = leak
            mat[i_in, i_drp] = drop
            mat[i_thr, i_thr] = drop
            mat[i_thr, i_drp] = -leak
            mat[i_drp, i_in] = 1.0
        else:
            mat[i_in, i_thr] = 1.0
            mat[i_thr, i_drp] = 1.0
            mat[i_drp, i_in] = 1.0
    return ModeTransform(modes, mat)


def phase_transform(channel: int, phi: float) -> ModeTransform:
    """Path phase e^{i phi} on both colors of one channel."""
    modes = tuple(sorted(ModeLabel(int(channel), color) for color in Color))
    mat = np.eye(2, dtype=complex) * cmath.exp(1j * float(phi))
    return ModeTransform(modes, mat)


# ---------------------------------------------------------------------------
# source states
# ---------------------------------------------------------------------------


def _pair_basis(channel: int, pairs: int) -> FockBasisState:
    return FockBasisState(
        ((ModeLabel(channel, Color.RED), pairs), (ModeLabel(channel, Color.BLUE), pairs))
    )


def source_state(src: SourceSpec) -> PureState:
    """Emission state of the pair source, truncated at ``max_order`` pairs.

    The expansion weights are (1 - beta**2/2) on vacuum, beta on the single
    pair, and beta**2/2 on the double emission; the double-emission operator
    term has internal amplitude 2 on |2_B, 2_R> from the repeated creation
    operators, leaving a net basis amplitude of beta**2.
    """
    beta = src.beta
    terms: dict[FockBasisState, complex] = {
        FockBasisState.vacuum(): 1.0 - beta * beta / 2.0
    }
    if src.max_order >= 1:
        terms[_pair_basis(src.channel, 1)] = beta
    if src.max_order >= 2:
        terms[_pair_basis(src.channel, 2)] = beta * beta
    return PureState(terms)


def two_pair_state(channel: int) -> PureState:
    """The normalized double-emission component |2_B, 2_R> on one channel.

    Heralding probabilities are conditioned on this event, so propagating it
    directly gives the conditional statistics without carrying beta around.
    """
    return PureState({_pair_basis(int(channel), 2): 1.0})
