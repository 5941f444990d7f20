"""Signed Kraus channels and the check-induced transformation of error maps.

A check layer with right check ``c2`` turns every Kraus operator ``E`` of
an error map acting between the checks into ``(c2 E c2^dag + E) / 2``,
which removes the Pauli components of ``E`` that anticommute with ``c2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .checks import CheckSet
from .circuit import Circuit, unitary
from .density import DensityMatrix
from .pauli import PauliString, all_paulis, dense_matrix

PRUNE_NORM = 1e-12
MAX_EXPAND_QUBITS = 6


@dataclass(frozen=True)
class KrausChannel:
    """``rho -> sum_i eta_i E_i rho E_i^dag`` with ``eta_i = +/-1``."""

    n: int
    terms: tuple[tuple[int, np.ndarray], ...] = field(default_factory=tuple)

    def __post_init__(self):
        dim = 1 << self.n
        terms = []
        for eta, op in self.terms:
            op = np.asarray(op, dtype=complex)
            if op.shape != (dim, dim):
                raise ValueError(f"Kraus operator of shape {op.shape}, expected {dim}x{dim}")
            if eta not in (1, -1):
                raise ValueError(f"sign must be +1 or -1, got {eta}")
            terms.append((int(eta), op))
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def from_ops(cls, ops: Iterable[np.ndarray], signs: Sequence[int] | None = None) -> KrausChannel:
        ops = [np.asarray(op, dtype=complex) for op in ops]
        if not ops:
            raise ValueError("need at least one Kraus operator")
        signs = [1] * len(ops) if signs is None else list(signs)
        n = int(np.log2(ops[0].shape[0]))
        return cls(n, tuple(zip(signs, ops)))

    @classmethod
    def identity(cls, n: int) -> KrausChannel:
        return cls(n, ((1, np.eye(1 << n, dtype=complex)),))

    @property
    def ops(self) -> list[np.ndarray]:
        return [op for _, op in self.terms]

    @property
    def is_cp(self) -> bool:
        return all(eta == 1 for eta, _ in self.terms)

    def completeness(self) -> np.ndarray:
        """``sum_i eta_i E_i^dag E_i``; the identity for trace-preserving maps."""
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=complex)
        for eta, op in self.terms:
            out += eta * (op.conj().T @ op)
        return out

    def is_trace_preserving(self, tol: float = 1e-10) -> bool:
        return np.allclose(self.completeness(), np.eye(1 << self.n), atol=tol)

    def pruned(self, tol: float = PRUNE_NORM) -> KrausChannel:
        return KrausChannel(self.n, tuple((eta, op) for eta, op in self.terms if np.linalg.norm(op) >= tol))

    def embed_low(self, total_n: int) -> KrausChannel:
        """Act on qubits ``0..n-1`` of a ``total_n``-qubit register."""
        pad = np.eye(1 << (total_n - self.n), dtype=complex)
        return KrausChannel(total_n, tuple((eta, np.kron(pad, op)) for eta, op in self.terms))


def depolarizing_kraus(p: float) -> KrausChannel:
    """Single-qubit depolarizing channel ``(1-p) rho + p I/2`` as Kraus operators."""
    mats = [np.eye(2), dense_matrix(PauliString.from_label("X")),
            dense_matrix(PauliString.from_label("Y")), dense_matrix(PauliString.from_label("Z"))]
    weights = [1 - 3 * p / 4, p / 4, p / 4, p / 4]
    return KrausChannel.from_ops([np.sqrt(w) * m for w, m in zip(weights, mats)])


def apply(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    if ch.n != rho.n:
        raise ValueError(f"channel on {ch.n} qubits, state on {rho.n}")
    out = np.zeros_like(rho.data)
    for eta, op in ch.terms:
        out += eta * (op @ rho.data @ op.conj().T)
    return DensityMatrix(rho.n, out)


def _check_size(ch: KrausChannel, p: PauliString) -> None:
    if ch.n != p.n:
        raise ValueError(f"channel on {ch.n} qubits, check on {p.n}")


def transform_single_layer(ch: KrausChannel, c2: PauliString) -> KrausChannel:
    _check_size(ch, c2)
    c = dense_matrix(c2)
    terms = tuple((eta, (c @ op @ c.conj().T + op) / 2) for eta, op in ch.terms)
    return KrausChannel(ch.n, terms).pruned()


def transform_multilayer(ch: KrausChannel, checks: CheckSet | Iterable[PauliString]) -> KrausChannel:
    """Fold the single-layer transform over the layers, innermost first."""
    c2s = [layer.c2 for layer in checks] if isinstance(checks, CheckSet) else list(checks)
    for c2 in c2s:
        ch = transform_single_layer(ch, c2)
    return ch


def postselect_probability(ch_transformed: KrausChannel, u: Circuit, rho0: DensityMatrix) -> float:
    """Probability of the all-zero ancilla outcome: ``tr(E'(U rho0 U^dag))``."""
    ideal = rho0.evolve(unitary(u))
    return float(np.real(apply(ch_transformed, ideal).trace()))


def mitigated_state(ch_transformed: KrausChannel, u: Circuit, rho0: DensityMatrix) -> DensityMatrix | None:
    """Normalized postselected state predicted by the transformed error map."""
    out = apply(ch_transformed, rho0.evolve(unitary(u)))
    prob = float(np.real(out.trace()))
    if prob < 1e-15:
        return None
    return DensityMatrix(out.n, out.data / prob)


@dataclass(frozen=True)
class PauliExpansion:
    n: int
    coefficients: dict[PauliString, complex]

    def reconstruct(self) -> np.ndarray:
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=complex)
        for p, alpha in self.coefficients.items():
            out += alpha * dense_matrix(p)
        return out

    def nonzero(self, tol: float = 1e-12) -> dict[PauliString, complex]:
        return {p: a for p, a in self.coefficients.items() if abs(a) > tol}


def pauli_expand(e: np.ndarray) -> PauliExpansion:
    """Coefficients ``tr(E sigma_j) / 2**n`` over the +1-phase Pauli strings."""
    e = np.asarray(e, dtype=complex)
    dim = e.shape[0]
    n = dim.bit_length() - 1
    if e.ndim != 2 or e.shape != (dim, dim) or dim != 1 << n or n < 1:
        raise ValueError(f"expected a 2**n x 2**n matrix, got shape {e.shape}")
    if n > MAX_EXPAND_QUBITS:
        raise ValueError(f"Pauli expansion capped at {MAX_EXPAND_QUBITS} qubits")
    # tr(E sigma) = sum_ij E_ij sigma_ji
    coeffs = {p: complex(np.sum(e * dense_matrix(p).T) / dim) for p in all_paulis(n)}
    return PauliExpansion(n, coeffs)


def twirl(ch: KrausChannel, twirl_set: Sequence[PauliString]) -> KrausChannel:
    """``(1/|T|) sum_V V E(V^dag rho V) V^dag`` as an enlarged Kraus list."""
    if not twirl_set:
        raise ValueError("twirl set must be nonempty")
    scale = 1 / np.sqrt(len(twirl_set))
    terms = []
    for v in twirl_set:
        _check_size(ch, v)
        vm = dense_matrix(v)
        for eta, op in ch.terms:
            terms.append((eta, scale * (vm @ op @ vm.conj().T)))
    return KrausChannel(ch.n, tuple(terms))


def pauli_transfer_matrix(ch: KrausChannel) -> np.ndarray:
    """``R_ij = tr(sigma_i E(sigma_j)) / 2**n`` over the +1-phase Pauli strings."""
    paulis = [dense_matrix(p) for p in all_paulis(ch.n)]
    dim = 1 << ch.n
    out = np.zeros((len(paulis), len(paulis)))
    for j, sj in enumerate(paulis):
        image = apply(ch, DensityMatrix(ch.n, sj)).data
        for i, si in enumerate(paulis):
            out[i, j] = np.real(np.trace(si @ image)) / dim
    return out
