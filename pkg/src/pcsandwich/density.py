"""Dense density-matrix simulation with per-gate depolarizing noise.

States are 2**n x 2**n arrays with qubit ``q`` on bit ``q`` of the row and
column index. A gate and its depolarizing event are applied in one in-place
pass over the 2x2 (or 4x4) blocks spanned by the gate's qubits, so no
2**n x 2**n gate matrix is ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Container, Mapping, Sequence

import numba
import numpy as np

from .circuit import Circuit, Gate
from .sandwich import SandwichedCircuit

MAX_QUBITS = 12
ZERO_PROBABILITY = 1e-15
EIGEN_FLOOR = 1e-13


def _dim(n: int) -> int:
    if not 0 <= n <= MAX_QUBITS:
        raise ValueError(f"density matrices are capped at {MAX_QUBITS} qubits, got {n}")
    return 1 << n


@dataclass(frozen=True)
class DensityMatrix:
    n: int
    data: np.ndarray

    def __post_init__(self):
        dim = _dim(self.n)
        if self.data.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix for {self.n} qubits, got {self.data.shape}")

    @classmethod
    def from_array(cls, data) -> DensityMatrix:
        data = np.asarray(data, dtype=complex)
        n = int(np.log2(data.shape[0]))
        if data.ndim != 2 or data.shape[0] != data.shape[1] or 1 << n != data.shape[0]:
            raise ValueError(f"not a square power-of-two matrix: {data.shape}")
        return cls(n, data)

    @classmethod
    def zero_state(cls, n: int) -> DensityMatrix:
        dim = _dim(n)
        data = np.zeros((dim, dim), dtype=complex)
        data[0, 0] = 1
        return cls(n, data)

    @classmethod
    def from_statevector(cls, psi) -> DensityMatrix:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls.from_array(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n: int) -> DensityMatrix:
        dim = _dim(n)
        return cls(n, np.eye(dim, dtype=complex) / dim)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))

    def tensor_high(self, other: DensityMatrix) -> DensityMatrix:
        """``other (x) self``: ``other`` occupies the qubits above this register."""
        return DensityMatrix(self.n + other.n, np.kron(other.data, self.data))

    def evolve(self, u: np.ndarray) -> DensityMatrix:
        return DensityMatrix(self.n, u @ self.data @ u.conj().T)


@dataclass(frozen=True)
class NoiseSpec:
    p1: float
    p2: float | None = None

    def __post_init__(self):
        if self.p2 is None:
            object.__setattr__(self, "p2", 10 * self.p1)
        for name in ("p1", "p2"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name}={value} outside [0, 1]")


NOISELESS = NoiseSpec(0.0, 0.0)


@dataclass(frozen=True)
class PostselectedResult:
    state: DensityMatrix | None  # None when the kept outcome has zero probability
    prob: float

    @property
    def accepted(self) -> bool:
        return self.state is not None


@numba.njit(cache=True, inline="always")
def _spread(k, lo, hi):
    """Insert zero bits at positions ``lo < hi`` into ``k`` (``hi = -1``: only ``lo``)."""
    k = ((k >> lo) << (lo + 1)) | (k & ((1 << lo) - 1))
    if hi >= 0:
        k = ((k >> hi) << (hi + 1)) | (k & ((1 << hi) - 1))
    return k


@numba.njit(cache=True)
def _block2(rho, q, u, p):
    """``B <- U B U^dag`` then ``(1-p) B + p tr(B) I/2`` on every 2x2 block of qubit ``q``."""
    dim = rho.shape[0]
    half = dim // 2
    b = 1 << q
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    c00, c01, c10, c11 = np.conj(u00), np.conj(u01), np.conj(u10), np.conj(u11)
    keep = 1.0 - p
    share = 0.5 * p
    for ki in range(half):
        i0 = _spread(ki, q, -1)
        i1 = i0 | b
        for kj in range(half):
            j0 = _spread(kj, q, -1)
            j1 = j0 | b
            a00 = rho[i0, j0]
            a01 = rho[i0, j1]
            a10 = rho[i1, j0]
            a11 = rho[i1, j1]
            # T = U A
            t00 = u00 * a00 + u01 * a10
            t01 = u00 * a01 + u01 * a11
            t10 = u10 * a00 + u11 * a10
            t11 = u10 * a01 + u11 * a11
            # B = T U^dag
            b00 = t00 * c00 + t01 * c01
            b01 = t00 * c10 + t01 * c11
            b10 = t10 * c00 + t11 * c01
            b11 = t10 * c10 + t11 * c11
            tr = share * (b00 + b11)
            rho[i0, j0] = keep * b00 + tr
            rho[i0, j1] = keep * b01
            rho[i1, j0] = keep * b10
            rho[i1, j1] = keep * b11 + tr


@numba.njit(cache=True)
def _block4(rho, control, target, v, p):
    """Controlled-V conjugation then ``(1-p) B + p tr(B) I/4`` on each 4x4 block.

    With the block split by the control bit, ``B00`` is untouched,
    ``B01 <- B01 V^dag``, ``B10 <- V B10`` and ``B11 <- V B11 V^dag``.
    """
    dim = rho.shape[0]
    quarter = dim // 4
    lo, hi = min(control, target), max(control, target)
    oc = 1 << control
    ot = 1 << target
    v00, v01, v10, v11 = v[0, 0], v[0, 1], v[1, 0], v[1, 1]
    w00, w01, w10, w11 = np.conj(v00), np.conj(v10), np.conj(v01), np.conj(v11)  # V^dag
    keep = 1.0 - p
    share = 0.25 * p
    rows = np.empty(4, dtype=np.int64)
    cols = np.empty(4, dtype=np.int64)
    a = np.empty((4, 4), dtype=np.complex128)
    for ki in range(quarter):
        i = _spread(ki, lo, hi)
        rows[0] = i
        rows[1] = i | ot
        rows[2] = i | oc
        rows[3] = i | oc | ot
        for kj in range(quarter):
            j = _spread(kj, lo, hi)
            cols[0] = j
            cols[1] = j | ot
            cols[2] = j | oc
            cols[3] = j | oc | ot
            for r in range(4):
                for c in range(4):
                    a[r, c] = rho[rows[r], cols[c]]
            # left multiply rows 2,3 by V
            for c in range(4):
                x = a[2, c]
                y = a[3, c]
                a[2, c] = v00 * x + v01 * y
                a[3, c] = v10 * x + v11 * y
            # right multiply columns 2,3 by V^dag
            for r in range(4):
                x = a[r, 2]
                y = a[r, 3]
                a[r, 2] = x * w00 + y * w10
                a[r, 3] = x * w01 + y * w11
            tr = share * (a[0, 0] + a[1, 1] + a[2, 2] + a[3, 3])
            for r in range(4):
                for c in range(4):
                    val = keep * a[r, c]
                    if r == c:
                        val += tr
                    rho[rows[r], cols[c]] = val


def _apply_gate_inplace(rho: np.ndarray, gate: Gate, p: float = 0.0) -> None:
    """``G rho G^dag`` in place, followed by depolarizing ``p`` on the gate's qubits."""
    m = np.ascontiguousarray(gate.matrix(), dtype=complex)
    if gate.is_two_qubit:
        control, target = gate.qubits
        _block4(rho, control, target, np.ascontiguousarray(m[2:, 2:]), float(p))
    else:
        _block2(rho, gate.qubits[0], m, float(p))


def _depolarize_inplace(rho: np.ndarray, qubits: Sequence[int], p: float) -> None:
    """``(1-p) rho + p (I/d (x) Tr_qubits rho)`` in place."""
    if p == 0:
        return
    eye = np.eye(2, dtype=complex)
    if len(qubits) == 1:
        _block2(rho, qubits[0], eye, float(p))
    else:
        _block4(rho, qubits[0], qubits[1], eye, float(p))


def _check_qubits(n: int, qubits: Sequence[int]) -> None:
    if any(q < 0 or q >= n for q in qubits):
        raise ValueError(f"qubits {tuple(qubits)} out of range for {n} qubits")


def apply_gate(rho: DensityMatrix, g: Gate) -> DensityMatrix:
    _check_qubits(rho.n, g.qubits)
    data = rho.data.astype(complex, copy=True)
    _apply_gate_inplace(data, g)
    return DensityMatrix(rho.n, data)


def apply_depolarizing(rho: DensityMatrix, qubits: Sequence[int], p: float) -> DensityMatrix:
    """``(1-p) rho + p (I/d (x) Tr_qubits rho)`` on the listed qubits."""
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    qubits = tuple(qubits)
    _check_qubits(rho.n, qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubit in {qubits}")
    data = rho.data.astype(complex, copy=True)
    _depolarize_inplace(data, qubits, p)
    return DensityMatrix(rho.n, data)


def simulate(
    circ: Circuit | SandwichedCircuit,
    rho0: DensityMatrix,
    noise: NoiseSpec = NOISELESS,
    *,
    noisy_gates: Container[int] | None = None,
    hooks: Mapping[int, Callable[[DensityMatrix], DensityMatrix]] | None = None,
) -> DensityMatrix:
    """Run ``circ`` on ``rho0``; each gate is followed by its depolarizing channel.

    ``noisy_gates`` restricts noise to the given gate indices (default: all).
    ``hooks[i]`` is applied to the state right before gate ``i``; index
    ``len(gates)`` means after the last gate.
    """
    if isinstance(circ, SandwichedCircuit):
        circ = circ.circuit
    n = circ.n
    if n > MAX_QUBITS:
        raise ValueError(f"simulation capped at {MAX_QUBITS} qubits, got {n}")
    if rho0.n != n:
        raise ValueError(f"state has {rho0.n} qubits, circuit has {n}")
    hooks = hooks or {}
    data = np.array(rho0.data, dtype=complex, order="C")
    for i, g in enumerate(circ.gates):
        if i in hooks:
            data = np.array(hooks[i](DensityMatrix(n, data)).data, dtype=complex, order="C")
        p = 0.0
        if noisy_gates is None or i in noisy_gates:
            p = noise.p2 if g.is_two_qubit else noise.p1
        _apply_gate_inplace(data, g, p)
    rho = DensityMatrix(n, data)
    if len(circ.gates) in hooks:
        rho = hooks[len(circ.gates)](rho)
    return rho


def postselect_zeros(rho: DensityMatrix, ancillas: Sequence[int]) -> PostselectedResult:
    """Project ``ancillas`` onto |0>, renormalize, and trace them out."""
    ancillas = tuple(ancillas)
    _check_qubits(rho.n, ancillas)
    n = rho.n
    t = np.ascontiguousarray(rho.data).reshape((2,) * (2 * n))
    index = [slice(None)] * (2 * n)
    for a in ancillas:
        index[n - 1 - a] = 0
        index[2 * n - 1 - a] = 0
    kept_n = n - len(set(ancillas))
    block = t[tuple(index)].reshape(1 << kept_n, 1 << kept_n)
    prob = float(np.real(np.trace(block)))
    if prob < ZERO_PROBABILITY:
        return PostselectedResult(None, max(prob, 0.0))
    return PostselectedResult(DensityMatrix(kept_n, block / prob), prob)


def _is_pure(data: np.ndarray, tol: float = 1e-10) -> bool:
    tr = np.real(np.trace(data))
    return abs(np.real(np.vdot(data, data)) - tr * tr) <= tol


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(a) b sqrt(a)))**2``."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n} qubits")
    for rho in (a, b):
        if np.linalg.eigvalsh(rho.data)[0] < -1e-8:
            raise ValueError("fidelity needs positive semidefinite inputs")
    if _is_pure(a.data) or _is_pure(b.data):
        # F = tr(a b) when either argument is pure
        f = float(np.real(np.sum(a.data * b.data.T)))
    else:
        # sqrt(a) b sqrt(a) and a b share a spectrum, and a b and b a agree,
        # so this form is symmetric; round-off eigenvalues are dropped
        vals = np.real(np.linalg.eigvals(a.data @ b.data))
        f = float(np.sum(np.sqrt(vals[vals > EIGEN_FLOOR])) ** 2)
    return min(max(f, 0.0), 1.0)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    diff = a.data - b.data
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2))))
