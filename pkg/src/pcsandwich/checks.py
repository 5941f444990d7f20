"""Find Pauli check pairs (c1, c2) with ``c2 U c1 = U`` by pushing c2 left.

Pushing a Pauli ``p`` left through gate ``g`` replaces ``p g`` with
``g (g^dag p g)``. All Clifford conjugations are table lookups; Rz only
lets I/Z through on its qubit. Pushing c2 through every gate of ``U``
from last to first yields ``c1 = U^dag c2 U``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .circuit import Circuit, Gate
from .pauli import PauliString, enumerate_by_weight, weight

# g^dag P g for one-qubit gates: letter -> signed letter
SINGLE_QUBIT_CONJUGATION = {
    "H": {"X": "+Z", "Y": "-Y", "Z": "+X"},
    "S": {"X": "-Y", "Y": "+X", "Z": "+Z"},
    "Sdg": {"X": "+Y", "Y": "-X", "Z": "+Z"},
    "X": {"X": "+X", "Y": "-Y", "Z": "-Z"},
    "Y": {"X": "-X", "Y": "+Y", "Z": "-Z"},
    "Z": {"X": "-X", "Y": "-Y", "Z": "+Z"},
}

# g^dag P g for two-qubit gates, keyed by (first qubit letter, second qubit letter)
TWO_QUBIT_CONJUGATION = {
    "CNOT": {
        "IX": "+IX", "IY": "+ZY", "IZ": "+ZZ",
        "XI": "+XX", "XX": "+XI", "XY": "+YZ", "XZ": "-YY",
        "YI": "+YX", "YX": "+YI", "YY": "-XZ", "YZ": "+XY",
        "ZI": "+ZI", "ZX": "+ZX", "ZY": "+IY", "ZZ": "+IZ",
    },
    "CZ": {
        "IX": "+ZX", "IY": "+ZY", "IZ": "+IZ",
        "XI": "+XZ", "XX": "+YY", "XY": "-YX", "XZ": "+XI",
        "YI": "+YZ", "YX": "-XY", "YY": "+XX", "YZ": "+YI",
        "ZI": "+ZI", "ZX": "+IX", "ZY": "+IY", "ZZ": "+ZZ",
    },
    "CY": {
        "IX": "+ZX", "IY": "+IY", "IZ": "+ZZ",
        "XI": "+XY", "XX": "-YZ", "XY": "+XI", "XZ": "+YX",
        "YI": "+YY", "YX": "+XZ", "YY": "+YI", "YZ": "-XX",
        "ZI": "+ZI", "ZX": "+IX", "ZY": "+ZY", "ZZ": "+IZ",
    },
}

_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _set_letter(x: int, z: int, qubit: int, letter: str) -> tuple[int, int]:
    xb, zb = _BITS[letter]
    mask = ~(1 << qubit)
    return (x & mask) | (xb << qubit), (z & mask) | (zb << qubit)


def can_continue(gate: Gate, p: PauliString) -> bool:
    if gate.kind != "Rz":
        return True
    return p.letter(gate.qubits[0]) in "IZ"


def push_left(gate: Gate, p: PauliString) -> PauliString:
    """Return ``gate^dag p gate`` via table lookup."""
    if not can_continue(gate, p):
        raise ValueError(f"cannot push {p} through {gate.to_text()}")
    if gate.kind == "Rz":
        return p
    x, z, phase = p.x, p.z, p.phase
    if gate.is_two_qubit:
        a, b = gate.qubits
        key = p.letter(a) + p.letter(b)
        if key == "II":
            return p
        out = TWO_QUBIT_CONJUGATION[gate.kind][key]
        x, z = _set_letter(x, z, a, out[1])
        x, z = _set_letter(x, z, b, out[2])
    else:
        (q,) = gate.qubits
        letter = p.letter(q)
        if letter == "I":
            return p
        out = SINGLE_QUBIT_CONJUGATION[gate.kind][letter]
        x, z = _set_letter(x, z, q, out[1])
    if out[0] == "-":
        phase += 2
    return PauliString(p.n, x, z, phase)


def push_through(u: Circuit, p: PauliString) -> PauliString | None:
    """Push ``p`` through all of ``u`` (last gate first); None if an Rz blocks it."""
    for gate in reversed(u.gates):
        if not can_continue(gate, p):
            return None
        p = push_left(gate, p)
    return p


@dataclass(frozen=True)
class CheckLayer:
    c1: PauliString
    c2: PauliString

    def __post_init__(self):
        if self.c1.n != self.c2.n:
            raise ValueError("c1 and c2 act on different qubit counts")
        if self.c2.phase != 0 or weight(self.c2) == 0:
            raise ValueError(f"c2 must be a +1-phase non-identity string, got {self.c2}")
        if self.c1.phase not in (0, 2):
            raise ValueError(f"c1 must have phase +1 or -1, got {self.c1}")


@dataclass(frozen=True)
class CheckSet:
    """Check layers, innermost (index 0 here, layer 1 in the figures) first."""

    n: int
    layers: tuple[CheckLayer, ...] = field(default_factory=tuple)
    requested: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if any(layer.c2.n != self.n for layer in self.layers):
            raise ValueError("all layers must act on the same qubit count")
        c2s = [layer.c2 for layer in self.layers]
        if len(set(c2s)) != len(c2s):
            raise ValueError("c2 strings must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self) -> Iterator[CheckLayer]:
        return iter(self.layers)

    @property
    def found(self) -> int:
        return len(self.layers)

    @property
    def complete(self) -> bool:
        return self.requested is None or self.found >= self.requested

    def prefix(self, k: int) -> CheckSet:
        return CheckSet(self.n, self.layers[:k], k)


def checks_from_candidates(
    u: Circuit, candidates: Iterable[PauliString], num_layers: int
) -> CheckSet:
    """Scan ``candidates`` in order, keeping the first ``num_layers`` that push through."""
    if num_layers < 0:
        raise ValueError("num_layers must be non-negative")
    layers = []
    for c2 in candidates:
        if len(layers) == num_layers:
            break
        c1 = push_through(u, c2)
        if c1 is not None:
            layers.append(CheckLayer(c1, c2))
    return CheckSet(u.n, tuple(layers), num_layers)


def find_checks(u: Circuit, num_layers: int) -> CheckSet:
    """Lowest-weight-first check search; may return fewer layers than requested."""
    if num_layers < 1:
        raise ValueError("num_layers must be >= 1")
    return checks_from_candidates(u, enumerate_by_weight(u.n), num_layers)


def find_max_weight_checks(u: Circuit, num_layers: int) -> CheckSet:
    return checks_from_candidates(u, enumerate_by_weight(u.n, descending=True), num_layers)


def global_xz_candidates(n: int) -> list[PauliString]:
    """X on every qubit, then Z on every qubit."""
    full = (1 << n) - 1
    return [PauliString(n, x=full), PauliString(n, z=full)]


def generator_candidates(n: int) -> list[PauliString]:
    """X_k, Z_k for each qubit k: 2n weight-one generators of the Pauli group."""
    out = []
    for k in range(n):
        out.append(PauliString.single(n, k, "X"))
        out.append(PauliString.single(n, k, "Z"))
    return out
