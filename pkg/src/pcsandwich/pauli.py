"""n-qubit Pauli group arithmetic on X/Z bitmasks.

Qubit ``k`` is bit ``k`` of both masks. A string with masks ``(x, z)`` and
phase ``k`` stands for ``i**k`` times the tensor product of the Hermitian
single-qubit letters, where ``(x, z) = (1, 1)`` is ``Y`` (not ``XZ``).

Text labels put qubit 0 leftmost: ``"-ZYZX"`` is ``-Z_0 Y_1 Z_2 X_3``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

MAX_DENSE_QUBITS = 12

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}
_PHASE_PREFIX = {0: "", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """Immutable element of the n-qubit Pauli group."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("bitmask has bits beyond the qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        label = label.strip()
        body = label.lstrip("+-i")
        prefix = label[: len(label) - len(body)]
        if prefix not in _PREFIX_PHASE:
            raise ValueError(f"bad sign prefix {prefix!r} in {label!r}")
        if not body:
            raise ValueError(f"empty Pauli label {label!r}")
        x = z = 0
        for k, letter in enumerate(body):
            if letter not in _LETTER_BITS:
                raise ValueError(f"bad Pauli letter {letter!r} in {label!r}")
            xb, zb = _LETTER_BITS[letter]
            x |= xb << k
            z |= zb << k
        return cls(len(body), x, z, _PREFIX_PHASE[prefix])

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliString:
        """``letter`` on ``qubit``, identity elsewhere."""
        xb, zb = _LETTER_BITS[letter]
        return cls(n, xb << qubit, zb << qubit)

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> k) & 1 for k in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> k) & 1 for k in range(self.n))

    @property
    def letters(self) -> str:
        return "".join(self.letter(k) for k in range(self.n))

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def support(self) -> int:
        """Bitmask of qubits carrying a non-identity letter."""
        return self.x | self.z

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def with_phase(self, phase: int) -> PauliString:
        return PauliString(self.n, self.x, self.z, phase)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __neg__(self) -> PauliString:
        return self.with_phase(self.phase + 2)


def _check_sizes(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product ``a * b`` including the i-power phase."""
    _check_sizes(a, b)
    x = a.x ^ b.x
    z = a.z ^ b.z
    # Y = i X Z per qubit; moving Z^{z_a} past X^{x_b} costs (-1)^{z_a . x_b}.
    phase = (
        a.phase
        + b.phase
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x & z)
    )
    return PauliString(a.n, x, z, phase)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_sizes(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def weight(p: PauliString) -> int:
    return _popcount(p.support)


def enumerate_by_weight(n: int, *, descending: bool = False) -> Iterator[PauliString]:
    """Yield the 4**n - 1 non-identity +1-phase strings ordered by weight.

    Within a weight class, qubit subsets come in lexicographic order and
    letters vary X < Y < Z, the last qubit of the subset fastest.
    ``descending`` reverses the weight classes only.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    weights = range(n, 0, -1) if descending else range(1, n + 1)
    for w in weights:
        for qubits in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                x = z = 0
                for q, letter in zip(qubits, letters):
                    xb, zb = _LETTER_BITS[letter]
                    x |= xb << q
                    z |= zb << q
                yield PauliString(n, x, z)


def dense_matrix(p: PauliString) -> np.ndarray:
    """2**n x 2**n matrix of ``p``; qubit 0 is the least significant index bit."""
    if p.n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense export capped at {MAX_DENSE_QUBITS} qubits, got {p.n}")
    m = np.ones((1, 1), dtype=complex)
    for k in reversed(range(p.n)):
        m = np.kron(m, PAULI_MATRICES[p.letter(k)])
    return (1j**p.phase) * m


def all_paulis(n: int) -> list[PauliString]:
    """All 4**n +1-phase strings, identity first."""
    return [PauliString.identity(n), *enumerate_by_weight(n)]
