"""Brute-force state-vector oracle for the CNOT/XOR correspondence.

Builds the chain of two-qubit maximally entangled pairs shared between the
dealer and each player, applies the dealer's local CNOTs followed by the
non-local dealer-player CNOTs, and checks that (a) the resulting state is
the n-party GHZ state on the participants' qubits and (b) its exact
measurement statistics match the classical XOR pipeline.

Qubit order is [a1, b1, a2, b2, ..., a_{n-1}, b_{n-1}] where a_i is the
dealer's half of pair i and b_i the player's; qubit 0 is the most
significant bit of the amplitude index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .simulation import Basis, MatchedRound, apply_xor

MIN_PARTIES = 2
MAX_PARTIES = 8

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_SUPPORT_ATOL = 1e-9


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError("amplitude array length must be 2**n_qubits")

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


@dataclass(frozen=True)
class CorrelationTable:
    """Exact outcome distribution of a subset of qubits in one basis."""

    basis: Basis
    rows: list[tuple[tuple[int, ...], float]]

    def support(self) -> set[tuple[int, ...]]:
        return {bits for bits, p in self.rows if p > _SUPPORT_ATOL}

    def total(self) -> float:
        return sum(p for _, p in self.rows)


@dataclass(frozen=True)
class EquivalenceReport:
    n: int
    basis: Basis
    fidelity: float
    support_match: bool
    counterexample: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "basis": self.basis.value,
            "fidelity": self.fidelity,
            "support_match": self.support_match,
        }
        if self.counterexample is not None:
            out["counterexample"] = list(self.counterexample)
        return out


def _check_party_range(n: int) -> None:
    if not MIN_PARTIES <= n <= MAX_PARTIES:
        raise ValueError(f"participant count must lie in [{MIN_PARTIES}, {MAX_PARTIES}], got {n}")


def build_bell_chain(n: int) -> StateVector:
    """Tensor product of n-1 two-qubit pairs (|00> + |11>)/sqrt(2)."""
    _check_party_range(n)
    pair = np.array([_SQRT_HALF, 0.0, 0.0, _SQRT_HALF], dtype=np.complex128)
    amps = pair
    for _ in range(n - 2):
        amps = np.kron(amps, pair)
    return StateVector(n_qubits=2 * (n - 1), amplitudes=amps)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """CNOT as an amplitude permutation; norm-preserving and self-inverse."""
    nq = state.n_qubits
    if control == target:
        raise ValueError("control and target must differ")
    for idx in (control, target):
        if not 0 <= idx < nq:
            raise IndexError(f"qubit index {idx} out of range for {nq} qubits")
    grid = state.amplitudes.reshape((2,) * nq)
    view = np.moveaxis(grid, (control, target), (0, 1))
    out = view.copy()
    out[1, 0] = view[1, 1]
    out[1, 1] = view[1, 0]
    out = np.moveaxis(out, (0, 1), (control, target))
    return StateVector(n_qubits=nq, amplitudes=out.reshape(-1).copy())


def _apply_hadamard(amplitudes: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    grid = amplitudes.reshape((2,) * n_qubits)
    view = np.moveaxis(grid, qubit, 0)
    out = view.copy()
    out[0] = (view[0] + view[1]) * _SQRT_HALF
    out[1] = (view[0] - view[1]) * _SQRT_HALF
    return np.moveaxis(out, 0, qubit).reshape(-1)


def party_qubits(n: int) -> list[int]:
    """Qubits measured by the n participants: a1 then b1 .. b_{n-1}."""
    return [0] + [2 * i + 1 for i in range(n - 1)]


def ancilla_qubits(n: int) -> list[int]:
    """Dealer qubits a2 .. a_{n-1} left over after the circuit."""
    return [2 * i for i in range(1, n - 1)]


def run_ghz_circuit(n: int, skip_nonlocal: bool = False) -> StateVector:
    """Dealer-local CNOTs then dealer-player CNOTs on the pair chain.

    ``skip_nonlocal`` is a fault-injection hook for negative-control tests;
    it drops the dealer-player gates and must break the correspondence.
    """
    _check_party_range(n)
    state = build_bell_chain(n)
    for i in range(1, n - 1):  # a1 controls each remaining dealer qubit
        state = apply_cnot(state, 0, 2 * i)
    if not skip_nonlocal:
        for i in range(1, n - 1):  # a_i controls the matching player qubit
            state = apply_cnot(state, 2 * i, 2 * i + 1)
    return state


def ghz_reference(n: int) -> StateVector:
    """GHZ state on the participants' qubits, |+> on each leftover dealer qubit."""
    _check_party_range(n)
    nq = 2 * (n - 1)
    amps = np.zeros(2**nq, dtype=np.complex128)
    parties = party_qubits(n)
    spectators = ancilla_qubits(n)
    weight = _SQRT_HALF ** (1 + len(spectators))
    for z in (0, 1):
        for pattern in product((0, 1), repeat=len(spectators)):
            idx = 0
            for q in parties:
                idx |= z << (nq - 1 - q)
            for q, bit in zip(spectators, pattern):
                idx |= bit << (nq - 1 - q)
            amps[idx] = weight
    return StateVector(n_qubits=nq, amplitudes=amps)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.n_qubits != b.n_qubits:
        raise ValueError("states act on different qubit counts")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def measure_statistics(state: StateVector, basis: Basis, qubits: list[int]) -> CorrelationTable:
    """Exact outcome distribution of ``qubits`` in the given basis.

    X-basis readout rotates the measured qubits by a Hadamard first, with
    |+> recorded as bit 0 and |-> as bit 1; unmeasured qubits are traced
    out by summing probabilities.
    """
    amps = state.amplitudes
    if basis is Basis.X:
        for q in qubits:
            amps = _apply_hadamard(amps, state.n_qubits, q)
    probs = np.abs(amps.reshape((2,) * state.n_qubits)) ** 2
    keep = list(qubits)
    drop = [q for q in range(state.n_qubits) if q not in keep]
    if drop:
        probs = np.sum(probs, axis=tuple(drop))
    # Summing drops axes but keeps the survivors in ascending qubit order;
    # permute to the caller's order.
    remaining = [q for q in range(state.n_qubits) if q in keep]
    order = [remaining.index(q) for q in keep]
    probs = np.transpose(probs, axes=order)
    rows = [
        (bits, float(probs[bits]))
        for bits in product((0, 1), repeat=len(keep))
    ]
    return CorrelationTable(basis=basis, rows=rows)


def classical_support(n: int, basis: Basis) -> set[tuple[int, ...]]:
    """Outcome tuples reachable by the noiseless XOR pipeline.

    Noiseless pair distribution makes each player's raw bit equal the
    dealer's raw bit on that link in both bases; the reachable set sweeps
    all 2^(n-1) raw patterns through the XOR step.
    """
    _check_party_range(n)
    reachable = set()
    for pattern in product((0, 1), repeat=n - 1):
        matched = MatchedRound(basis=basis, j=0, dealer_bits=pattern, player_bits=pattern)
        corr = apply_xor(matched)
        reachable.add((corr.dealer_key_bit,) + corr.player_key_bits)
    return reachable


def check_equivalence(n: int, skip_nonlocal: bool = False) -> list[EquivalenceReport]:
    """Compare quantum measurement support against the classical XOR pipeline.

    Returns one report per basis carrying the circuit fidelity against the
    GHZ reference and, on mismatch, the first offending outcome tuple.
    """
    _check_party_range(n)
    state = run_ghz_circuit(n, skip_nonlocal=skip_nonlocal)
    fid = fidelity(state, ghz_reference(n))
    reports = []
    for basis in (Basis.Z, Basis.X):
        table = measure_statistics(state, basis, party_qubits(n))
        quantum = table.support()
        classical = classical_support(n, basis)
        mismatch = sorted(quantum.symmetric_difference(classical))
        reports.append(
            EquivalenceReport(
                n=n,
                basis=basis,
                fidelity=fid,
                support_match=not mismatch,
                counterexample=mismatch[0] if mismatch else None,
            )
        )
    return reports
