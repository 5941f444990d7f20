"""Random-circuit sweeps of the check-sandwich scheme under depolarizing noise."""
from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np

from .checks import (
    CheckSet,
    checks_from_candidates,
    generator_candidates,
    global_xz_candidates,
)
from .circuit import Circuit, Gate
from .density import DensityMatrix, NoiseSpec, fidelity, postselect_zeros, simulate
from .pauli import enumerate_by_weight
from .sandwich import build

CHECK_POLICIES = ("low_weight_first", "max_weight", "lemma1_pair", "lemma2_generators")
MODES = ("clifford_only", "clifford_plus_rz")
NOISE_SCOPES = ("all", "compute")
PREP_GATES = 20
CLIFFORD_DRAW = ("H", "H", "S", "CNOT")

CSV_COLUMNS = (
    "n", "cnots", "rz", "layers", "p1", "p2", "seed", "circuit_index",
    "f_unmitigated", "f_mitigated", "gain", "postselect_prob", "layers_found",
)


def log_grid(lo_exp: float, hi_exp: float, step: float) -> list[float]:
    """``10**e`` for ``e = lo_exp, lo_exp + step, ...`` up to ``hi_exp``."""
    count = int(round((hi_exp - lo_exp) / step)) + 1
    return [float(10 ** (lo_exp + k * step)) for k in range(count)]


DEFAULT_P1_GRID = [float(p) for p in np.logspace(-5, -1, 13)]
# 0.15-decade spacing from 1e-5 to 1e-2: hits 8.91e-4, 1.26e-3 and 2.51e-3
FINE_P1_GRID = log_grid(-5, -2, 0.15)


@dataclass
class ExperimentConfig:
    compute_n: int
    cnot_counts: list[int]
    rz_count: int = 0
    num_layers: list[int] = field(default_factory=lambda: [1])
    p1_grid: list[float] = field(default_factory=lambda: list(DEFAULT_P1_GRID))
    circuits_per_point: int = 20
    seed: int = 0
    mode: str = "clifford_plus_rz"
    check_policy: str = "low_weight_first"
    noise_scope: str = "all"

    def __post_init__(self):
        if isinstance(self.num_layers, int):
            self.num_layers = [self.num_layers]
        if isinstance(self.cnot_counts, int):
            self.cnot_counts = [self.cnot_counts]
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.check_policy not in CHECK_POLICIES:
            raise ValueError(f"check_policy must be one of {CHECK_POLICIES}, got {self.check_policy!r}")
        if self.noise_scope not in NOISE_SCOPES:
            raise ValueError(f"noise_scope must be one of {NOISE_SCOPES}, got {self.noise_scope!r}")
        if self.mode == "clifford_only" and self.rz_count:
            raise ValueError("clifford_only mode cannot insert Rz gates")
        if any(not 0 <= p <= 0.1 for p in self.p1_grid):
            raise ValueError("p1 grid must lie in [0, 0.1] so that p2 = 10 p1 stays a probability")
        if self.compute_n + max(self.num_layers) > 12:
            raise ValueError("compute qubits plus ancillas exceed the 12-qubit simulation cap")

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class SweepRecord:
    n: int
    cnots: int
    rz: int
    layers: int
    p1: float
    p2: float
    seed: int
    circuit_index: int
    f_unmitigated: float
    f_mitigated: float  # nan when the postselected outcome never occurs
    gain: float
    postselect_prob: float
    layers_found: int

    @property
    def flagged(self) -> bool:
        return math.isnan(self.f_mitigated)

    def sort_key(self):
        return (self.n, self.cnots, self.rz, self.layers, self.p1, self.circuit_index)


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(e) for e in entropy]))


def random_clifford_circuit(n: int, cnot_count: int, seed: int) -> Circuit:
    """Random sequence over {H, S, CNOT} stopped at exactly ``cnot_count`` CNOTs.

    H is drawn twice as often as S or CNOT, which mixes X and Z support
    faster than a uniform draw.
    """
    if n < 2 or cnot_count < 1:
        raise ValueError("need n >= 2 and cnot_count >= 1")
    rng = _rng(seed)
    gates = []
    placed = 0
    while placed < cnot_count:
        kind = CLIFFORD_DRAW[rng.integers(len(CLIFFORD_DRAW))]
        if kind == "CNOT":
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(Gate("CNOT", (int(c), int(t))))
            placed += 1
        else:
            gates.append(Gate(kind, (int(rng.integers(n)),)))
    return Circuit(n, tuple(gates))


def insert_random_rz(c: Circuit, rz_count: int, seed: int) -> Circuit:
    if rz_count < 0:
        raise ValueError("rz_count must be non-negative")
    rng = _rng(seed)
    gates = list(c.gates)
    for _ in range(rz_count):
        pos = int(rng.integers(len(gates) + 1))
        q = int(rng.integers(c.n))
        angle = float(rng.uniform(0, 2 * math.pi))
        gates.insert(pos, Gate("Rz", (q,), angle))
    return Circuit(c.n, tuple(gates))


def random_input_state(n: int, seed: int, num_gates: int = PREP_GATES) -> DensityMatrix:
    """|0...0> after a seeded random {H, S, CNOT} circuit, applied noiselessly."""
    rng = _rng(seed)
    kinds = ("H", "S", "CNOT") if n > 1 else ("H", "S")
    gates = []
    for _ in range(num_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "CNOT":
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(Gate("CNOT", (int(c), int(t))))
        else:
            gates.append(Gate(kind, (int(rng.integers(n)),)))
    return simulate(Circuit(n, tuple(gates)), DensityMatrix.zero_state(n))


def select_checks(u: Circuit, num_layers: int, policy: str = "low_weight_first") -> CheckSet:
    if policy == "low_weight_first":
        candidates: Iterable = enumerate_by_weight(u.n)
    elif policy == "max_weight":
        candidates = enumerate_by_weight(u.n, descending=True)
    elif policy == "lemma1_pair":
        candidates = global_xz_candidates(u.n)
    elif policy == "lemma2_generators":
        candidates = generator_candidates(u.n)
    else:
        raise ValueError(f"unknown check policy {policy!r}")
    return checks_from_candidates(u, candidates, num_layers)


def run_point(
    u: Circuit,
    rho0: DensityMatrix,
    checks: CheckSet,
    p1: float,
    *,
    requested_layers: int | None = None,
    noise_scope: str = "all",
    seed: int = 0,
    circuit_index: int = 0,
    ideal: DensityMatrix | None = None,
    f_unmitigated: float | None = None,
) -> SweepRecord:
    """Unmitigated vs check-sandwiched fidelity of ``u`` at one noise level.

    With ``noise_scope="compute"`` only the gates of ``u`` are noisy inside
    the sandwich; otherwise checks and ancilla Hadamards are noisy too.
    ``ideal`` and ``f_unmitigated`` may be passed in to reuse earlier work.
    """
    noise = NoiseSpec(p1)
    if ideal is None:
        ideal = simulate(u, rho0)
    if f_unmitigated is None:
        f_unmitigated = fidelity(simulate(u, rho0, noise), ideal)
    layers = len(checks) if requested_layers is None else requested_layers
    if len(checks) == 0:
        f_mitigated, prob = f_unmitigated, 1.0
    else:
        sandwich = build(u, checks)
        start, stop = sandwich.u_span
        noisy = range(start, stop) if noise_scope == "compute" else None
        full = rho0.tensor_high(DensityMatrix.zero_state(sandwich.ancilla_m))
        out = simulate(sandwich, full, noise, noisy_gates=noisy)
        result = postselect_zeros(out, sandwich.ancillas)
        prob = result.prob
        f_mitigated = fidelity(result.state, ideal) if result.accepted else math.nan
    return SweepRecord(
        n=u.n,
        cnots=u.count("CNOT"),
        rz=u.count("Rz"),
        layers=layers,
        p1=noise.p1,
        p2=noise.p2,
        seed=seed,
        circuit_index=circuit_index,
        f_unmitigated=f_unmitigated,
        f_mitigated=f_mitigated,
        gain=f_mitigated - f_unmitigated,
        postselect_prob=prob,
        layers_found=len(checks),
    )


def sample_circuit(config: ExperimentConfig, cnots: int, index: int) -> tuple[Circuit, DensityMatrix]:
    """Circuit and input state for one sweep coordinate, seeded from the config."""
    u = random_clifford_circuit(config.compute_n, cnots, seed=_seed(config.seed, cnots, index, 0))
    if config.mode == "clifford_plus_rz":
        u = insert_random_rz(u, config.rz_count, seed=_seed(config.seed, cnots, index, 1))
    rho0 = random_input_state(config.compute_n, seed=_seed(config.seed, cnots, index, 2))
    return u, rho0


def _seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, dtype=np.uint64)[0])


def _circuit_records(config: ExperimentConfig, cnots: int, index: int) -> list[SweepRecord]:
    u, rho0 = sample_circuit(config, cnots, index)
    all_checks = select_checks(u, max(config.num_layers), config.check_policy)
    ideal = simulate(u, rho0)
    records = []
    for p1 in config.p1_grid:
        f_n = fidelity(simulate(u, rho0, NoiseSpec(p1)), ideal)
        for layers in config.num_layers:
            records.append(run_point(
                u, rho0, all_checks.prefix(layers), p1,
                requested_layers=layers,
                noise_scope=config.noise_scope,
                seed=config.seed,
                circuit_index=index,
                ideal=ideal,
                f_unmitigated=f_n,
            ))
    return records


def _circuit_records_star(args):
    return _circuit_records(*args)


def run_sweep(config: ExperimentConfig, workers: int = 1) -> tuple[list[SweepRecord], list[dict]]:
    """Evaluate every (circuit, p1, layer count) point; returns records and per-point means."""
    tasks = [(config, cnots, i) for cnots in config.cnot_counts for i in range(config.circuits_per_point)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_circuit_records_star, tasks))
    else:
        chunks = [_circuit_records(*t) for t in tasks]
    records = sorted((r for chunk in chunks for r in chunk), key=SweepRecord.sort_key)
    return records, summarize(records)


def summarize(records: Sequence[SweepRecord]) -> list[dict]:
    groups: dict[tuple, list[SweepRecord]] = defaultdict(list)
    for r in records:
        groups[(r.n, r.cnots, r.rz, r.layers, r.p1)].append(r)
    summary = []
    for (n, cnots, rz, layers, p1), rs in sorted(groups.items()):
        accepted = [r for r in rs if not r.flagged]
        summary.append({
            "n": n, "cnots": cnots, "rz": rz, "layers": layers, "p1": p1,
            "circuits": len(rs),
            "complete": sum(r.layers_found >= r.layers for r in rs),
            "zero_prob": len(rs) - len(accepted),
            "mean_f_unmitigated": float(np.mean([r.f_unmitigated for r in rs])),
            "mean_f_mitigated": float(np.mean([r.f_mitigated for r in accepted])) if accepted else math.nan,
            "mean_gain": float(np.mean([r.gain for r in accepted])) if accepted else math.nan,
            "mean_postselect_prob": float(np.mean([r.postselect_prob for r in rs])),
        })
    return summary


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        row = asdict(r)
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def summary_to_csv(summary: Sequence[dict]) -> str:
    if not summary:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    keys = list(summary[0])
    writer.writerow(keys)
    for row in summary:
        writer.writerow([_fmt(row[k]) for k in keys])
    return buf.getvalue()


def figure_config(name: str, scale: str = "full", seed: int = 0) -> ExperimentConfig:
    """Sweep settings for the figure replicas; ``scale="small"`` trims samples and grids."""
    small = scale == "small"
    if name == "fig4":
        return ExperimentConfig(
            compute_n=2, cnot_counts=[30], num_layers=[0, 1, 2, 3, 4],
            p1_grid=list(DEFAULT_P1_GRID[::3]) if small else list(DEFAULT_P1_GRID),
            circuits_per_point=1, seed=seed, mode="clifford_only",
            check_policy="lemma2_generators", noise_scope="compute",
        )
    if name == "fig7":
        return ExperimentConfig(
            compute_n=5, cnot_counts=[40] if small else [1, 5, 10, 15, 20, 25, 30, 35, 40],
            rz_count=5, num_layers=[6],
            p1_grid=[FINE_P1_GRID[16]] if small else list(FINE_P1_GRID),
            circuits_per_point=4 if small else 20, seed=seed,
        )
    if name == "fig12":
        return ExperimentConfig(
            compute_n=2, cnot_counts=[16, 64, 256, 1024] if small else [2**k for k in range(11)],
            num_layers=[4], p1_grid=[0.00126], circuits_per_point=10 if small else 50,
            seed=seed, mode="clifford_only", check_policy="lemma2_generators",
        )
    raise ValueError(f"unknown figure {name!r}; expected fig4, fig7 or fig12")
