"""Gate-list circuits over the Clifford + Rz set and their text format.

Text format::

    # comment
    qubits 3
    h 0
    rz 1 0.78539816339744828
    cx 0 2

Two-qubit gates list the control first. ``cy`` and ``cz`` are accepted so
that instrumented (check-sandwiched) circuits serialize in the same format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .pauli import MAX_DENSE_QUBITS

SINGLE_QUBIT_KINDS = ("X", "Y", "Z", "S", "Sdg", "H", "Rz")
TWO_QUBIT_KINDS = ("CNOT", "CY", "CZ")
KINDS = SINGLE_QUBIT_KINDS + TWO_QUBIT_KINDS

MNEMONICS = {
    "X": "x", "Y": "y", "Z": "z", "S": "s", "Sdg": "sdg", "H": "h",
    "Rz": "rz", "CNOT": "cx", "CY": "cy", "CZ": "cz",
}
_KIND_OF = {m: k for k, m in MNEMONICS.items()}

_SQ2 = 1 / math.sqrt(2)
_FIXED_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "Sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
}


def _controlled(target: np.ndarray) -> np.ndarray:
    # local index = 2 * control_bit + target_bit
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = target
    return m


for _kind, _target in (("CNOT", "X"), ("CY", "Y"), ("CZ", "Z")):
    _FIXED_MATRICES[_kind] = _controlled(_FIXED_MATRICES[_target])


class CircuitParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s), got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} needs distinct qubits, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if (self.angle is not None) != (self.kind == "Rz"):
            raise ValueError("angle must be given for Rz and only for Rz")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    def matrix(self) -> np.ndarray:
        """Local matrix; for two-qubit gates the first listed qubit is the high bit."""
        if self.kind == "Rz":
            half = self.angle / 2
            return np.diag([np.exp(-1j * half), np.exp(1j * half)])
        return _FIXED_MATRICES[self.kind]

    def to_text(self) -> str:
        parts = [MNEMONICS[self.kind], *map(str, self.qubits)]
        if self.angle is not None:
            parts.append(format(self.angle, ".17g"))
        return " ".join(parts)


def x(q): return Gate("X", (q,))
def y(q): return Gate("Y", (q,))
def z(q): return Gate("Z", (q,))
def s(q): return Gate("S", (q,))
def sdg(q): return Gate("Sdg", (q,))
def h(q): return Gate("H", (q,))
def rz(q, angle): return Gate("Rz", (q,), angle)
def cx(c, t): return Gate("CNOT", (c, t))
def cy(c, t): return Gate("CY", (c, t))
def cz(c, t): return Gate("CZ", (c, t))


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n:
                raise ValueError(f"gate {g.to_text()!r} out of range for {self.n} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def then(self, gates: Iterable[Gate]) -> Circuit:
        return Circuit(self.n, self.gates + tuple(gates))

    def to_text(self) -> str:
        return "\n".join([f"qubits {self.n}", *(g.to_text() for g in self.gates)]) + "\n"


def parse(text: str) -> Circuit:
    n = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].lower()
        if n is None:
            if head != "qubits" or len(tokens) != 2:
                raise CircuitParseError(lineno, "expected 'qubits N' header")
            try:
                n = int(tokens[1])
            except ValueError:
                raise CircuitParseError(lineno, f"bad qubit count {tokens[1]!r}") from None
            if n < 1:
                raise CircuitParseError(lineno, "qubit count must be positive")
            continue
        if head not in _KIND_OF:
            raise CircuitParseError(lineno, f"unknown gate {tokens[0]!r}")
        kind = _KIND_OF[head]
        arity = 2 if kind in TWO_QUBIT_KINDS else 1
        expected = arity + (kind == "Rz")
        if len(tokens) - 1 != expected:
            raise CircuitParseError(lineno, f"{head} takes {expected} argument(s), got {len(tokens) - 1}")
        try:
            qubits = tuple(int(t) for t in tokens[1:1 + arity])
        except ValueError:
            raise CircuitParseError(lineno, f"bad qubit index in {line!r}") from None
        angle = None
        if kind == "Rz":
            try:
                angle = float(tokens[2])
            except ValueError:
                raise CircuitParseError(lineno, f"malformed angle {tokens[2]!r}") from None
            if not math.isfinite(angle):
                raise CircuitParseError(lineno, f"malformed angle {tokens[2]!r}")
        if any(q >= n for q in qubits):
            raise CircuitParseError(lineno, f"qubit out of range for {n} qubits")
        try:
            gates.append(Gate(kind, qubits, angle))
        except ValueError as exc:
            raise CircuitParseError(lineno, str(exc)) from None
    if n is None:
        raise CircuitParseError(0, "missing 'qubits N' header")
    return Circuit(n, tuple(gates))


def embed(gate: Gate, n: int) -> np.ndarray:
    """Full 2**n matrix of ``gate`` built from Kronecker products."""
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense matrices capped at {MAX_DENSE_QUBITS} qubits")
    local = gate.matrix()
    k = len(gate.qubits)
    dim = 1 << k
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for row in range(dim):
        for col in range(dim):
            coeff = local[row, col]
            if coeff == 0:
                continue
            term = np.ones((1, 1), dtype=complex)
            for q in reversed(range(n)):
                if q in gate.qubits:
                    # first listed gate qubit is the high local bit
                    shift = k - 1 - gate.qubits.index(q)
                    op = np.zeros((2, 2), dtype=complex)
                    op[(row >> shift) & 1, (col >> shift) & 1] = 1
                else:
                    op = np.eye(2, dtype=complex)
                term = np.kron(term, op)
            out += coeff * term
    return out


def unitary(c: Circuit) -> np.ndarray:
    """Dense unitary of ``c``; later gates multiply on the left."""
    if c.n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense matrices capped at {MAX_DENSE_QUBITS} qubits, got {c.n}")
    u = np.eye(1 << c.n, dtype=complex)
    for g in c.gates:
        u = embed(g, c.n) @ u
    return u
