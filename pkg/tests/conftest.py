import math

import numpy as np

from pcsandwich.circuit import Circuit, Gate
from pcsandwich.density import DensityMatrix

ONE_QUBIT = ("X", "Y", "Z", "S", "Sdg", "H")
TWO_QUBIT = ("CNOT", "CY", "CZ")


def random_circuit(n, num_gates, rng, *, rz=True):
    """Random circuit over the full gate set (Rz optional)."""
    kinds = ONE_QUBIT + (TWO_QUBIT if n > 1 else ()) + (("Rz",) if rz else ())
    gates = []
    for _ in range(num_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind in TWO_QUBIT:
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(Gate(kind, (int(a), int(b))))
        elif kind == "Rz":
            gates.append(Gate("Rz", (int(rng.integers(n)),), float(rng.uniform(0, 2 * math.pi))))
        else:
            gates.append(Gate(kind, (int(rng.integers(n)),)))
    return Circuit(n, tuple(gates))


def random_pure(n, rng):
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return DensityMatrix.from_statevector(psi / np.linalg.norm(psi))


def random_density(n, rng, rank=None):
    dim = 1 << n
    rank = dim if rank is None else rank
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return DensityMatrix(n, rho / np.trace(rho))


def random_unitary(dim, rng):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_cp_channel_ops(n, num_ops, rng):
    """Kraus operators of a random CPTP map: blocks of a random isometry."""
    dim = 1 << n
    v = random_unitary(dim * num_ops, rng)[:, :dim]
    return [v[k * dim:(k + 1) * dim] for k in range(num_ops)]


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
