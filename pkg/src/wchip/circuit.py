"""Circuit assembly: element sequences, the canonical W-state device, and
state propagation.

A :class:`CircuitSpec` is a named channel registry plus an ordered list of
elements (order = propagation order) and an optional per-channel path phase
applied after the last element.  The canonical device is the three-coupler,
one-router layout that turns a double pair emitted into channel 0 into a
heralded three-photon W state on channels 2, 3 and 4:

    source (ch 0) -> DC1 taps ch 1 (herald arm)
                  -> DC2 taps ch 2
                  -> crossing moves the through line onto ch 3
                  -> DC3 splits ch 3 / ch 4
    AD2 on ch 1   -> routes Red to T1, Blue to T2 (the herald detectors)

The crossing is an r = 1 coupler: it relabels the through line so the final
splitter's outputs sit on the registered channels 3 and 4.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .elements import (
    AddDropFilter,
    DirectionalCoupler,
    SourceSpec,
    adddrop_transform,
    coupler_transform,
    source_state,
)
from .errors import ParamOutOfRange, ValidationError
from .fock import Color, ModeLabel, ModeTransform, PureState, apply_mode_transform

#: Channel registry of the canonical device; index = position in this tuple.
CANONICAL_CHANNELS = ("0", "1", "2", "3", "4", "T1", "T2")
SOURCE_CHANNEL = 0
HERALD_ARM = 1
SIGNAL_CHANNELS = (2, 3, 4)
T1_CHANNEL = 5
T2_CHANNEL = 6


@dataclass(frozen=True)
class CircuitSpec:
    """Channel registry, ordered element list, and terminal path phases.

    ``phases`` is either empty (all zero) or one phase per registered
    channel, applied to both colors after every element; the canonical device
    keeps them at zero because the interesting phases sit on the coupler
    cross terms.
    """

    channels: tuple[str, ...]
    elements: tuple = ()
    phases: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(str(c) for c in self.channels))
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        self.validate()

    def validate(self) -> None:
        if not self.channels:
            raise ValidationError("channel registry is empty")
        if len(set(self.channels)) != len(self.channels):
            raise ValidationError("channel registry has duplicate names")
        n = len(self.channels)
        for k, el in enumerate(self.elements):
            if isinstance(el, DirectionalCoupler):
                refs = el.channels
            elif isinstance(el, AddDropFilter):
                refs = (el.input_channel, el.through_channel, el.drop_channel)
            else:
                raise ValidationError(f"element {k}: unsupported type {type(el).__name__}")
            bad = [ch for ch in refs if not 0 <= ch < n]
            if bad:
                raise ValidationError(
                    f"element {k} ({type(el).__name__}): unregistered channel(s) {bad}"
                )
        if self.phases and len(self.phases) != n:
            raise ValidationError(
                f"phases must be empty or one per channel ({n}), got {len(self.phases)}"
            )

    def mode_list(self) -> tuple[ModeLabel, ...]:
        return tuple(
            sorted(
                ModeLabel(ch, color)
                for ch in range(len(self.channels))
                for color in Color
            )
        )


def build_transform(spec: CircuitSpec) -> ModeTransform:
    """Ordered product of the element transforms over the full mode set."""
    spec.validate()
    modes = spec.mode_list()
    pos = {m: i for i, m in enumerate(modes)}
    mat = np.eye(len(modes), dtype=complex)
    for el in spec.elements:
        sub = coupler_transform(el) if isinstance(el, DirectionalCoupler) else adddrop_transform(el)
        idx = [pos[m] for m in sub.modes]
        mat[:, idx] = mat[:, idx] @ sub.matrix
    if any(p != 0.0 for p in spec.phases):
        col_phase = np.array(
            [np.exp(1j * spec.phases[m.channel]) for m in modes], dtype=complex
        )
        mat = mat * col_phase[np.newaxis, :]
    return ModeTransform(modes, mat)


def canonical_w_circuit(
    r1: float,
    r2: float,
    r3: float,
    phi1: float = 0.0,
    phi2: float = 0.0,
    phi3: float = 0.0,
    ad2_extinction: float = 0.0,
) -> CircuitSpec:
    """The canonical heralded-W device (see module docstring for the layout).

    Transmissions are derived as t_i = sqrt(1 - r_i**2); the add-drop router
    is resonant for Blue so the Red herald photon passes through to T1.
    """
    for name, val in (("r1", r1), ("r2", r2), ("r3", r3)):
        if not 0.0 <= float(val) <= 1.0:
            raise ParamOutOfRange(f"{name} must lie in [0, 1], got {val}")
    dc = DirectionalCoupler.from_reflectivity
    elements = (
        dc((SOURCE_CHANNEL, HERALD_ARM), float(r1), float(phi1)),
        dc((SOURCE_CHANNEL, 2), float(r2), float(phi2)),
        dc((SOURCE_CHANNEL, 3), 1.0, 0.0),  # waveguide crossing: through line -> ch 3
        dc((3, 4), float(r3), float(phi3)),
        AddDropFilter(
            input_channel=HERALD_ARM,
            through_channel=T1_CHANNEL,
            drop_channel=T2_CHANNEL,
            resonant_color=Color.BLUE,
            extinction=float(ad2_extinction),
        ),
    )
    return CircuitSpec(CANONICAL_CHANNELS, elements)


def propagate(src: SourceSpec, spec: CircuitSpec) -> PureState:
    """Push the source emission through the circuit."""
    return apply_mode_transform(source_state(src), build_transform(spec))


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _encode_complex(z: complex):
    z = complex(z)
    return float(z.real) if z.imag == 0.0 else [float(z.real), float(z.imag)]


def _decode_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValidationError(f"cannot parse complex value {v!r}")


def circuit_to_json_dict(spec: CircuitSpec, source: SourceSpec | None = None) -> dict:
    name = spec.channels
    elements = []
    for el in spec.elements:
        if isinstance(el, DirectionalCoupler):
            elements.append(
                {
                    "type": "coupler",
                    "channels": [name[el.channels[0]], name[el.channels[1]]],
                    "r": el.r,
                    "phi": el.phi,
                }
            )
        else:
            elements.append(
                {
                    "type": "adddrop",
                    "input": name[el.input_channel],
                    "through": name[el.through_channel],
                    "drop": name[el.drop_channel],
                    "resonant_color": "Blue" if el.resonant_color is Color.BLUE else "Red",
                    "extinction": el.extinction,
                }
            )
    doc: dict = {"channels": list(name), "elements": elements}
    if any(p != 0.0 for p in spec.phases):
        doc["phases"] = list(spec.phases)
    if source is not None:
        doc["source"] = {
            "channel": source.channel,
            "beta": _encode_complex(source.beta),
            "max_order": source.max_order,
        }
    return doc


def circuit_from_json_dict(doc: dict) -> tuple[CircuitSpec, SourceSpec | None]:
    try:
        names = [str(c) for c in doc["channels"]]
    except (KeyError, TypeError):
        raise ValidationError("circuit document needs a 'channels' list") from None
    index = {c: i for i, c in enumerate(names)}

    def resolve(label, where: str) -> int:
        key = str(label)
        if key not in index:
            raise ValidationError(f"{where}: unregistered channel {label!r}")
        return index[key]

    elements = []
    for k, entry in enumerate(doc.get("elements", [])):
        where = f"element {k}"
        kind = entry.get("type")
        if kind == "coupler":
            chans = entry.get("channels", [])
            if len(chans) != 2:
                raise ValidationError(f"{where}: coupler needs exactly 2 channels")
            if "r" not in entry:
                raise ValidationError(f"{where}: coupler needs a reflectivity 'r'")
            elements.append(
                DirectionalCoupler.from_reflectivity(
                    (resolve(chans[0], where), resolve(chans[1], where)),
                    float(entry["r"]),
                    float(entry.get("phi", 0.0)),
                )
            )
        elif kind == "adddrop":
            try:
                color = Color.from_letter(str(entry.get("resonant_color", "Blue")))
            except ValueError as exc:
                raise ValidationError(f"{where}: {exc}") from None
            elements.append(
                AddDropFilter(
                    input_channel=resolve(entry.get("input"), where),
                    through_channel=resolve(entry.get("through"), where),
                    drop_channel=resolve(entry.get("drop"), where),
                    resonant_color=color,
                    extinction=float(entry.get("extinction", 0.0)),
                )
            )
        else:
            raise ValidationError(f"{where}: unknown element type {kind!r}")
    phases = tuple(float(p) for p in doc.get("phases", ()))
    spec = CircuitSpec(tuple(names), tuple(elements), phases)
    source = None
    if "source" in doc:
        src = doc["source"]
        source = SourceSpec(
            channel=int(src.get("channel", 0)),
            beta=_decode_complex(src.get("beta", 0.0)),
            max_order=int(src.get("max_order", 2)),
        )
    return spec, source


def save_circuit(path, spec: CircuitSpec, source: SourceSpec | None = None) -> None:
    doc = circuit_to_json_dict(spec, source)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_circuit(path) -> tuple[CircuitSpec, SourceSpec | None]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid circuit JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError("circuit document must be a JSON object")
    return circuit_from_json_dict(doc)
