"""Sparse second-quantized state algebra for two-color waveguide modes.

A mode is a ``(channel, color)`` pair: an integer waveguide channel carrying
either a Red or a Blue photon (the two signal/idler resonances of the pair
source).  States are sparse complex superpositions of occupation-number basis
vectors, and linear-optical elements act by substituting each input creation
operator with a linear combination of output operators and re-expanding the
resulting polynomial.

Conventions fixed here, relied on everywhere else:

* Basis canonicalization is channel-major with Red before Blue inside a
  channel, so sparse maps have a unique, reproducible key order.
* ``ModeTransform.matrix`` uses the row convention: input operator ``i``
  maps to ``sum_j matrix[i, j] *`` (output operator ``j``).
* Composition ``A.compose(B)`` means "apply A, then B"; applying the
  composed transform equals applying the factors in sequence.
* Amplitudes below ``PRUNE_EPS`` are dropped after every transform to keep
  supports sparse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyState,
    NotUnitary,
    PatternMismatch,
    UnknownMode,
)

#: Amplitudes with magnitude below this are discarded after every transform.
PRUNE_EPS = 1e-14

#: Unitarity violations beyond this raise :class:`NotUnitary`.
UNITARY_TOL = 1e-9

_SQRT_FACT = tuple(math.sqrt(math.factorial(k)) for k in range(33))


# ---------------------------------------------------------------------------
# labels and basis states
# ---------------------------------------------------------------------------


class Color(IntEnum):
    """Photon color: the red- or blue-detuned resonance of the source."""

    RED = 0
    BLUE = 1

    @property
    def letter(self) -> str:
        return "R" if self is Color.RED else "B"

    @classmethod
    def from_letter(cls, letter: str) -> "Color":
        try:
            return {"R": cls.RED, "B": cls.BLUE}[letter.upper()[0]]
        except (KeyError, IndexError):
            raise ValueError(f"unknown color letter {letter!r}") from None

    @property
    def other(self) -> "Color":
        return Color.BLUE if self is Color.RED else Color.RED


class ModeLabel(NamedTuple):
    """One optical mode: a waveguide channel carrying one color.

    The natural tuple order (channel, then color with Red < Blue) is the
    canonical basis order used throughout.
    """

    channel: int
    color: Color

    def __str__(self) -> str:  # e.g. "R0", "B3"
        return f"{self.color.letter}{self.channel}"


class FockBasisState(tuple):
    """Occupation-number basis vector, stored as sorted (mode, count) pairs.

    Zero counts are never stored, so equality is structural and the empty
    tuple is the vacuum.  Instances are immutable and hashable.
    """

    __slots__ = ()

    def __new__(cls, pairs: Iterable[tuple[ModeLabel, int]] = ()):
        acc: dict[ModeLabel, int] = {}
        for mode, count in pairs:
            if not isinstance(mode, ModeLabel):
                mode = ModeLabel(int(mode[0]), Color(mode[1]))
            count = int(count)
            if count < 0:
                raise ValueError(f"negative occupation {count} at {mode}")
            if count:
                acc[mode] = acc.get(mode, 0) + count
        return tuple.__new__(cls, sorted(acc.items()))

    @classmethod
    def _from_sorted(cls, pairs: Sequence[tuple[ModeLabel, int]]) -> "FockBasisState":
        """Trusted constructor: pairs already canonical (sorted, positive)."""
        return tuple.__new__(cls, pairs)

    @classmethod
    def vacuum(cls) -> "FockBasisState":
        return _VACUUM

    @classmethod
    def single(cls, mode: ModeLabel) -> "FockBasisState":
        return tuple.__new__(cls, ((mode, 1),))

    @property
    def total_photons(self) -> int:
        return sum(n for _, n in self)

    def occupation(self, mode: ModeLabel) -> int:
        for m, n in self:
            if m == mode:
                return n
        return 0

    def channel_total(self, channel: int) -> int:
        """Total photon count in a channel, both colors."""
        return sum(n for m, n in self if m.channel == channel)

    def add_photon(self, mode: ModeLabel) -> tuple["FockBasisState", float]:
        """Apply a creation operator: returns (new basis, sqrt(n + 1))."""
        pairs = list(self)
        for i, (m, n) in enumerate(pairs):
            if m == mode:
                pairs[i] = (m, n + 1)
                return tuple.__new__(FockBasisState, pairs), math.sqrt(n + 1)
            if m > mode:
                pairs.insert(i, (mode, 1))
                return tuple.__new__(FockBasisState, pairs), 1.0
        pairs.append((mode, 1))
        return tuple.__new__(FockBasisState, pairs), 1.0

    def split(self, channels: Iterable[int]) -> tuple["FockBasisState", "FockBasisState"]:
        """Partition into (modes on `channels`, everything else)."""
        chans = set(channels)
        kept = [(m, n) for m, n in self if m.channel in chans]
        rest = [(m, n) for m, n in self if m.channel not in chans]
        return FockBasisState._from_sorted(kept), FockBasisState._from_sorted(rest)

    def __repr__(self) -> str:
        if not self:
            return "|vac>"
        inner = ", ".join(f"{n}_{m}" for m, n in self)
        return f"|{inner}>"


_VACUUM = tuple.__new__(FockBasisState, ())


def color_pattern(basis: FockBasisState, channels: Sequence[int]) -> str:
    """Color string (e.g. ``"BBR"``) of a basis term with exactly one photon
    in each of the given channels and nothing anywhere else.

    Raises :class:`PatternMismatch` when the photon content differs.
    """
    if len(basis) != len(channels):
        raise PatternMismatch(
            f"expected one photon in each of channels {tuple(channels)}, got {basis!r}"
        )
    by_channel = {}
    for mode, count in basis:
        if count != 1 or mode.channel in by_channel:
            raise PatternMismatch(
                f"expected one photon in each of channels {tuple(channels)}, got {basis!r}"
            )
        by_channel[mode.channel] = mode.color
    try:
        return "".join(by_channel[ch].letter for ch in channels)
    except KeyError:
        raise PatternMismatch(
            f"expected one photon in each of channels {tuple(channels)}, got {basis!r}"
        ) from None


def basis_from_pattern(pattern: str, channels: Sequence[int]) -> FockBasisState:
    """Inverse of :func:`color_pattern`: one photon per channel, colors from
    the letter string."""
    if len(pattern) != len(channels):
        raise PatternMismatch(f"pattern {pattern!r} does not fit channels {channels}")
    return FockBasisState(
        (ModeLabel(ch, Color.from_letter(letter)), 1)
        for ch, letter in zip(channels, pattern)
    )


# ---------------------------------------------------------------------------
# pure states
# ---------------------------------------------------------------------------


class PureState:
    """Sparse superposition ``weight * sum_b amplitude(b) |b>``.

    ``weight`` is a scalar bookkeeping factor kept outside the amplitude map
    (it carries source-expansion prefactors such as powers of the pair
    amplitude); norms and inner products include it.  Terms with amplitude
    magnitude below :data:`PRUNE_EPS` are dropped at construction.
    """

    __slots__ = ("_terms", "weight")

    def __init__(
        self,
        terms: Mapping[FockBasisState, complex] | Iterable[tuple[FockBasisState, complex]] = (),
        weight: complex = 1.0,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        self._terms: dict[FockBasisState, complex] = {
            b: complex(a) for b, a in items if abs(a) > PRUNE_EPS
        }
        self.weight = complex(weight)

    @classmethod
    def vacuum(cls, weight: complex = 1.0) -> "PureState":
        return cls({_VACUUM: 1.0}, weight)

    @classmethod
    def basis(cls, basis_state: FockBasisState, weight: complex = 1.0) -> "PureState":
        return cls({basis_state: 1.0}, weight)

    @property
    def terms(self) -> Mapping[FockBasisState, complex]:
        """Read-only view of the amplitude map (excludes ``weight``)."""
        return MappingProxyType(self._terms)

    def items(self) -> Iterator[tuple[FockBasisState, complex]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def amplitude(self, basis_state: FockBasisState) -> complex:
        """Amplitude of one basis term, including the scalar weight."""
        return self.weight * self._terms.get(basis_state, 0.0)

    def norm_sq(self) -> float:
        w2 = abs(self.weight) ** 2
        return w2 * sum((a.real * a.real + a.imag * a.imag) for a in self._terms.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def normalized(self) -> "PureState":
        n = self.norm()
        if n <= 0.0:
            raise EmptyState("cannot normalize a zero state")
        phase_weight = self.weight / abs(self.weight) if self.weight != 0 else 1.0
        scale = abs(self.weight) / n
        return PureState({b: a * scale for b, a in self._terms.items()}, phase_weight)

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self._terms, self.weight * factor)

    def __add__(self, other: "PureState") -> "PureState":
        acc = {b: self.weight * a for b, a in self._terms.items()}
        for b, a in other._terms.items():
            acc[b] = acc.get(b, 0.0) + other.weight * a
        return PureState(acc, 1.0)

    def __repr__(self) -> str:
        parts = [f"({a:.4g})*{b!r}" for b, a in sorted(self._terms.items())[:4]]
        more = " + ..." if len(self._terms) > 4 else ""
        return f"PureState(weight={self.weight:.4g}, {' + '.join(parts)}{more})"


def apply_creation(state: PureState, mode: ModeLabel) -> PureState:
    """Act with the creation operator of `mode` on every term.

    Each term with occupation ``n`` at the mode gains occupation ``n + 1``
    and an amplitude factor ``sqrt(n + 1)``; the support size is unchanged.
    """
    out: dict[FockBasisState, complex] = {}
    for basis, amp in state._terms.items():
        new_basis, factor = basis.add_photon(mode)
        out[new_basis] = amp * factor
    return PureState(out, state.weight)


def inner_product(s1: PureState, s2: PureState) -> complex:
    """<s1|s2>, conjugate-linear in the first argument, weights included."""
    left, right = s1._terms, s2._terms
    acc = sum(left[b].conjugate() * right[b] for b in left.keys() & right.keys())
    return s1.weight.conjugate() * s2.weight * acc


# ---------------------------------------------------------------------------
# mode transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModeTransform:
    """Linear map of creation operators over an ordered mode list.

    ``matrix[i, j]`` is the coefficient of output operator ``j`` in the image
    of input operator ``i`` (row convention).  At construction the mode list
    is normalized to canonical order and the matrix permuted to match, so two
    transforms over the same mode set always align entry by entry.

    When ``lossless`` is true the rows must be orthonormal (unitary matrix);
    deviations beyond :data:`UNITARY_TOL` raise :class:`NotUnitary`.
    """

    modes: tuple[ModeLabel, ...]
    matrix: np.ndarray
    lossless: bool = True

    def __post_init__(self):
        modes = tuple(self.modes)
        if len(set(modes)) != len(modes):
            raise DimensionMismatch("duplicate modes in transform mode list")
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch(f"transform matrix must be square, got {mat.shape}")
        if mat.shape[0] != len(modes):
            raise DimensionMismatch(
                f"matrix size {mat.shape[0]} does not match {len(modes)} modes"
            )
        order = sorted(range(len(modes)), key=lambda i: modes[i])
        if order != list(range(len(modes))):
            perm = np.array(order)
            mat = mat[np.ix_(perm, perm)]
            modes = tuple(modes[i] for i in order)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "matrix", mat)
        if self.lossless:
            dev = self.unitarity_deviation()
            if dev > UNITARY_TOL:
                raise NotUnitary(f"lossless transform deviates from unitarity by {dev:.3g}")

    @classmethod
    def identity(cls, modes: Iterable[ModeLabel]) -> "ModeTransform":
        modes = tuple(modes)
        return cls(modes, np.eye(len(modes), dtype=complex))

    def unitarity_deviation(self) -> float:
        m = self.matrix
        gram = m @ m.conj().T
        return float(np.max(np.abs(gram - np.eye(m.shape[0]))))

    @cached_property
    def _mode_pos(self) -> dict[ModeLabel, int]:
        return {m: i for i, m in enumerate(self.modes)}

    @cached_property
    def _sparse_rows(self) -> tuple[tuple[tuple[int, complex], ...], ...]:
        rows = []
        for i in range(len(self.modes)):
            row = self.matrix[i]
            rows.append(
                tuple((j, complex(row[j])) for j in np.flatnonzero(np.abs(row) > PRUNE_EPS))
            )
        return tuple(rows)

    def embedded(self, modes: Iterable[ModeLabel]) -> "ModeTransform":
        """Extend to a superset of modes, acting as identity on the rest."""
        modes = tuple(sorted(modes))
        pos = {m: i for i, m in enumerate(modes)}
        try:
            idx = [pos[m] for m in self.modes]
        except KeyError as missing:
            raise UnknownMode(f"mode {missing} absent from embedding target") from None
        mat = np.eye(len(modes), dtype=complex)
        mat[np.ix_(idx, idx)] = self.matrix
        return ModeTransform(modes, mat, lossless=self.lossless)

    def compose(self, other: "ModeTransform") -> "ModeTransform":
        """Transform equivalent to applying ``self`` first, then ``other``."""
        union = tuple(sorted(set(self.modes) | set(other.modes)))
        a = self.embedded(union) if self.modes != union else self
        b = other.embedded(union) if other.modes != union else other
        return ModeTransform(
            union, a.matrix @ b.matrix, lossless=self.lossless and other.lossless
        )


def apply_mode_transform(state: PureState, transform: ModeTransform) -> PureState:
    """Rewrite every basis term through the transform's operator substitution.

    For each term, every occupied input operator is replaced by its row
    expansion and the polynomial is re-expanded over output occupation
    vectors, with the bosonic sqrt(n!) normalizations applied on both sides.
    Lossless transforms preserve the norm; output amplitudes below
    :data:`PRUNE_EPS` are pruned.

    Raises :class:`UnknownMode` when the state occupies a mode the transform
    does not list.
    """
    mode_pos = transform._mode_pos
    rows = transform._sparse_rows
    modes = transform.modes
    sqf = _SQRT_FACT
    out: dict[FockBasisState, complex] = {}
    for basis, amp in state._terms.items():
        if not basis:
            out[_VACUUM] = out.get(_VACUUM, 0.0) + amp
            continue
        # collect the rows in play and the union of their output supports
        row_list = []
        support: list[int] = []
        seen: set[int] = set()
        denom = 1.0
        for mode, count in basis:
            i = mode_pos.get(mode)
            if i is None:
                raise UnknownMode(f"state occupies mode {mode} absent from transform")
            row = rows[i]
            row_list.append((row, count))
            denom *= sqf[count]
            for j, _ in row:
                if j not in seen:
                    seen.add(j)
                    support.append(j)
        if not support:  # all relevant rows are identically zero (lossy map)
            continue
        support.sort()
        local = {j: p for p, j in enumerate(support)}
        width = len(support)
        poly: dict[tuple[int, ...], complex] = {(0,) * width: amp / denom}
        for row, count in row_list:
            local_row = [(local[j], u) for j, u in row]
            for _ in range(count):
                nxt: dict[tuple[int, ...], complex] = {}
                for key, coeff in poly.items():
                    for p, u in local_row:
                        nk = key[:p] + (key[p] + 1,) + key[p + 1 :]
                        prev = nxt.get(nk)
                        nxt[nk] = coeff * u if prev is None else prev + coeff * u
                poly = nxt
        for key, coeff in poly.items():
            scale = 1.0
            pairs = []
            for p in range(width):
                k = key[p]
                if k:
                    pairs.append((modes[support[p]], k))
                    if k > 1:
                        scale *= sqf[k]
            new_basis = FockBasisState._from_sorted(pairs)
            prev = out.get(new_basis)
            val = coeff * scale
            out[new_basis] = val if prev is None else prev + val
    return PureState(out, state.weight)


# ---------------------------------------------------------------------------
# detection patterns, projection, reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DetectionPattern:
    """Per-channel photon-count constraints for post-selection.

    Each constraint is ``channel -> (count, color)``.  With a color, the
    channel must hold exactly `count` photons of that color and none of the
    other; with ``color=None`` only the total count in the channel is
    constrained.  Channels not mentioned are unconstrained.
    """

    constraints: tuple[tuple[int, int, Color | None], ...]

    def __post_init__(self):
        seen = set()
        norm = []
        for entry in self.constraints:
            ch, count, color = entry
            ch, count = int(ch), int(count)
            if count < 0:
                raise ValueError(f"negative count for channel {ch}")
            if ch in seen:
                raise ValueError(f"duplicate constraint for channel {ch}")
            seen.add(ch)
            norm.append((ch, count, None if color is None else Color(color)))
        object.__setattr__(self, "constraints", tuple(sorted(norm)))

    @classmethod
    def from_mapping(
        cls, mapping: Mapping[int, int | tuple[int, Color | None]]
    ) -> "DetectionPattern":
        """Build from ``{channel: count}`` or ``{channel: (count, color)}``."""
        entries = []
        for ch, value in mapping.items():
            if isinstance(value, tuple):
                count, color = value
            else:
                count, color = value, None
            entries.append((ch, count, color))
        return cls(tuple(entries))

    def matches(self, basis: FockBasisState) -> bool:
        for ch, count, color in self.constraints:
            if color is None:
                if basis.channel_total(ch) != count:
                    return False
            else:
                if basis.occupation(ModeLabel(ch, color)) != count:
                    return False
                if basis.occupation(ModeLabel(ch, color.other)) != 0:
                    return False
        return True


def project(state: PureState, pattern: DetectionPattern) -> tuple[PureState, float]:
    """Post-select on a detection pattern.

    Returns the matching component renormalized to unit norm together with
    its probability ``|component|^2 / |state|^2``; an empty match returns the
    zero state and probability 0.0.  Probabilities over an exhaustive,
    mutually exclusive pattern set sum to one.
    """
    nsq = state.norm_sq()
    if nsq <= 0.0:
        raise EmptyState("cannot project a zero-norm state")
    kept = {b: a for b, a in state._terms.items() if pattern.matches(b)}
    if not kept:
        return PureState({}, 1.0), 0.0
    comp_sq = sum(a.real * a.real + a.imag * a.imag for a in kept.values())
    prob = abs(state.weight) ** 2 * comp_sq / nsq
    scale = 1.0 / math.sqrt(comp_sq)
    return PureState({b: a * scale for b, a in kept.items()}, 1.0), prob


def color_amplitudes(
    state: PureState, channels: Sequence[int]
) -> dict[str, complex]:
    """Amplitudes of a one-photon-per-channel state by color pattern.

    The state must live entirely on the given channels with exactly one
    photon in each; otherwise :class:`PatternMismatch` is raised.  Weights
    are folded into the returned amplitudes.
    """
    channels = tuple(channels)
    out: dict[str, complex] = {}
    for basis, amp in state._terms.items():
        pattern = color_pattern(basis, channels)
        out[pattern] = out.get(pattern, 0.0) + state.weight * amp
    return out


def reduce_to_channels(state: PureState, keep: Iterable[int]):
    """Exact reduced density matrix of the kept channels.

    Channels outside `keep` are traced out.  Every term must hold exactly one
    photon in each kept channel, and the kept-channel color content must lie
    in the mixed-color span of the target matrix type: {BR, RB} for two
    channels (:class:`~wchip.density.PairRho`), {BBR, BRB, RBB} for three
    (:class:`~wchip.density.ThreePhotonRho`).  The result has unit trace.

    Raises :class:`DimensionMismatch` when the photon content does not fit.
    """
    from .density import BASIS_PAIR, BASIS_THREE, PairRho, ThreePhotonRho

    keep = tuple(sorted({int(c) for c in keep}))
    if len(keep) == 2:
        basis_labels, cls = BASIS_PAIR, PairRho
    elif len(keep) == 3:
        basis_labels, cls = BASIS_THREE, ThreePhotonRho
    else:
        raise DimensionMismatch(f"can reduce to 2 or 3 channels, got {len(keep)}")
    nsq = state.norm_sq()
    if nsq <= 0.0:
        raise EmptyState("cannot reduce a zero-norm state")
    index = {p: i for i, p in enumerate(basis_labels)}
    dim = len(basis_labels)
    blocks: dict[FockBasisState, np.ndarray] = {}
    for basis, amp in state._terms.items():
        kept_part, env_part = basis.split(keep)
        try:
            pattern = color_pattern(kept_part, keep)
        except PatternMismatch as exc:
            raise DimensionMismatch(str(exc)) from None
        i = index.get(pattern)
        if i is None:
            raise DimensionMismatch(
                f"color pattern {pattern!r} outside the {'/'.join(basis_labels)} span"
            )
        vec = blocks.get(env_part)
        if vec is None:
            vec = blocks[env_part] = np.zeros(dim, dtype=complex)
        vec[i] += amp
    rho = np.zeros((dim, dim), dtype=complex)
    for vec in blocks.values():
        rho += np.outer(vec, vec.conjugate())
    rho *= abs(state.weight) ** 2 / nsq
    return cls(rho)
