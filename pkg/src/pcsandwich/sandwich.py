"""Build the multilayer check-sandwiched circuit.

Layer ``k`` (0-based, innermost first) uses ancilla ``compute_n + k``. Gate
order: H on every ancilla, controlled-c1 from the outermost layer inwards,
U, controlled-c2 from the innermost layer outwards, H on every ancilla.
Keeping all ancillas at 0 postselects the mitigated state.
"""
from __future__ import annotations

from dataclasses import dataclass

from .checks import CheckSet
from .circuit import Circuit, Gate
from .pauli import PauliString

_CONTROLLED_KIND = {"X": "CNOT", "Y": "CY", "Z": "CZ"}


@dataclass(frozen=True)
class SandwichedCircuit:
    compute_n: int
    ancilla_m: int
    gates: tuple[Gate, ...]
    u_span: tuple[int, int]  # [start, stop) of U's gates inside ``gates``

    @property
    def n(self) -> int:
        return self.compute_n + self.ancilla_m

    @property
    def ancillas(self) -> tuple[int, ...]:
        return tuple(range(self.compute_n, self.n))

    @property
    def postselect_mask(self) -> dict[int, int]:
        return {a: 0 for a in self.ancillas}

    @property
    def circuit(self) -> Circuit:
        return Circuit(self.n, self.gates)

    def check_gate_count(self) -> int:
        """Two-qubit gates outside U (the controlled checks)."""
        start, stop = self.u_span
        return sum(1 for i, g in enumerate(self.gates) if g.is_two_qubit and not start <= i < stop)

    def to_text(self) -> str:
        anc = " ".join(map(str, self.ancillas))
        return self.circuit.to_text() + f"# postselect ancillas {anc} on 0\n"


def controlled_pauli_gates(ancilla: int, p: PauliString) -> list[Gate]:
    """Gates realizing ``p (x) |1><1| + I (x) |0><0|`` controlled on ``ancilla``.

    One controlled-X/Y/Z per non-identity letter; a -1 phase becomes a Z on
    the ancilla.
    """
    if p.phase not in (0, 2):
        raise ValueError(f"controlled check needs a +/-1 phase, got {p}")
    gates = []
    for q in range(p.n):
        letter = p.letter(q)
        if letter != "I":
            gates.append(Gate(_CONTROLLED_KIND[letter], (ancilla, q)))
    if p.phase == 2:
        gates.append(Gate("Z", (ancilla,)))
    return gates


def build(u: Circuit, checks: CheckSet) -> SandwichedCircuit:
    if len(checks) == 0:
        raise ValueError("need at least one check layer")
    if checks.n != u.n:
        raise ValueError(f"checks act on {checks.n} qubits, circuit has {u.n}")
    n, m = u.n, len(checks)
    ancillas = [n + k for k in range(m)]
    gates: list[Gate] = [Gate("H", (a,)) for a in ancillas]
    for k in reversed(range(m)):
        gates += controlled_pauli_gates(ancillas[k], checks.layers[k].c1)
    start = len(gates)
    gates += u.gates
    stop = len(gates)
    for k in range(m):
        gates += controlled_pauli_gates(ancillas[k], checks.layers[k].c2)
    gates += [Gate("H", (a,)) for a in ancillas]
    return SandwichedCircuit(n, m, tuple(gates), (start, stop))
