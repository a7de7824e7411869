import math
from itertools import product

import numpy as np
import pytest

from pairqss.simulation import Basis
from pairqss.verifier import (
    StateVector,
    ancilla_qubits,
    apply_cnot,
    build_bell_chain,
    check_equivalence,
    classical_support,
    fidelity,
    ghz_reference,
    measure_statistics,
    party_qubits,
    run_ghz_circuit,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)


def basis_state(n_qubits: int, index: int) -> StateVector:
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n_qubits=n_qubits, amplitudes=amps)


class TestBellChain:
    def test_two_parties_is_single_pair(self):
        state = build_bell_chain(2)
        assert state.n_qubits == 2
        np.testing.assert_allclose(
            state.amplitudes, [SQRT_HALF, 0.0, 0.0, SQRT_HALF], atol=1e-12
        )

    def test_three_parties_product_structure(self):
        state = build_bell_chain(3)
        assert state.n_qubits == 4
        nonzero = {i for i, a in enumerate(state.amplitudes) if abs(a) > 1e-12}
        # Index bits are (a1 b1 a2 b2); support is z1 z1 z2 z2.
        expected = set()
        for z1, z2 in product((0, 1), repeat=2):
            expected.add((z1 << 3) | (z1 << 2) | (z2 << 1) | z2)
        assert nonzero == expected
        for i in nonzero:
            assert state.amplitudes[i] == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_normalized(self, n):
        assert build_bell_chain(n).norm() == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n", [1, 9, 0])
    def test_party_range_enforced(self, n):
        with pytest.raises(ValueError):
            build_bell_chain(n)


class TestApplyCnot:
    def test_truth_table_on_basis_states(self):
        # |10> -> |11> with qubit 0 as control.
        state = apply_cnot(basis_state(2, 0b10), 0, 1)
        assert abs(state.amplitudes[0b11]) == pytest.approx(1.0)
        state = apply_cnot(basis_state(2, 0b01), 0, 1)
        assert abs(state.amplitudes[0b01]) == pytest.approx(1.0)

    def test_involution(self):
        state = build_bell_chain(3)
        twice = apply_cnot(apply_cnot(state, 0, 2), 0, 2)
        np.testing.assert_allclose(twice.amplitudes, state.amplitudes, atol=1e-12)

    def test_conjugate_basis_action(self):
        # On |+>|->, the roles invert: the control flips, the target stays.
        plus = np.array([SQRT_HALF, SQRT_HALF], dtype=np.complex128)
        minus = np.array([SQRT_HALF, -SQRT_HALF], dtype=np.complex128)
        state = StateVector(n_qubits=2, amplitudes=np.kron(plus, minus))
        out = apply_cnot(state, 0, 1)
        expected = np.kron(minus, minus)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)

    def test_norm_preserved(self):
        state = build_bell_chain(4)
        out = apply_cnot(state, 0, 3)
        assert out.norm() == pytest.approx(1.0, abs=1e-10)

    def test_index_validation(self):
        state = build_bell_chain(2)
        with pytest.raises(ValueError):
            apply_cnot(state, 1, 1)
        with pytest.raises(IndexError):
            apply_cnot(state, 0, 5)


class TestGhzCircuit:
    def test_two_parties_applies_no_gates(self):
        state = run_ghz_circuit(2)
        np.testing.assert_allclose(state.amplitudes, build_bell_chain(2).amplitudes, atol=1e-12)

    def test_three_parties_matches_reference(self):
        assert fidelity(run_ghz_circuit(3), ghz_reference(3)) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_reference_fidelity_all_sizes(self, n):
        assert fidelity(run_ghz_circuit(n), ghz_reference(n)) >= 1.0 - 1e-10

    def test_reference_structure_n3(self):
        # GHZ on (a1, b1, b2) and |+> on a2.
        ref = ghz_reference(3)
        table = measure_statistics(ref, Basis.Z, [0, 1, 3])
        assert table.support() == {(0, 0, 0), (1, 1, 1)}
        ancilla = measure_statistics(ref, Basis.X, [2])
        assert dict(ancilla.rows)[(0,)] == pytest.approx(1.0, abs=1e-10)


class TestMeasureStatistics:
    def test_ghz_z_outcomes(self):
        table = measure_statistics(run_ghz_circuit(3), Basis.Z, party_qubits(3))
        probs = dict(table.rows)
        assert table.support() == {(0, 0, 0), (1, 1, 1)}
        assert probs[(0, 0, 0)] == pytest.approx(0.5, abs=1e-10)
        assert probs[(1, 1, 1)] == pytest.approx(0.5, abs=1e-10)

    def test_ghz_x_outcomes_even_parity(self):
        table = measure_statistics(run_ghz_circuit(3), Basis.X, party_qubits(3))
        support = table.support()
        assert support == {bits for bits in product((0, 1), repeat=3) if sum(bits) % 2 == 0}
        for bits in support:
            assert dict(table.rows)[bits] == pytest.approx(0.25, abs=1e-10)

    def test_leftover_dealer_qubits_read_plus(self):
        for n in (3, 4, 5):
            state = run_ghz_circuit(n)
            for q in ancilla_qubits(n):
                table = measure_statistics(state, Basis.X, [q])
                assert dict(table.rows)[(0,)] == pytest.approx(1.0, abs=1e-10)

    def test_distribution_is_normalized(self):
        for basis in (Basis.X, Basis.Z):
            table = measure_statistics(run_ghz_circuit(4), basis, party_qubits(4))
            assert table.total() == pytest.approx(1.0, abs=1e-10)
            assert all(p >= -1e-12 for _, p in table.rows)


class TestEquivalence:
    def test_classical_support_three_parties(self):
        assert classical_support(3, Basis.Z) == {(0, 0, 0), (1, 1, 1)}
        assert classical_support(3, Basis.X) == {
            bits for bits in product((0, 1), repeat=3) if sum(bits) % 2 == 0
        }

    @pytest.mark.parametrize("n", range(2, 9))
    def test_supports_match_both_bases(self, n):
        for report in check_equivalence(n):
            assert report.support_match, report
            assert report.fidelity >= 1.0 - 1e-10
            assert report.counterexample is None

    def test_corrupted_circuit_is_detected(self):
        reports = check_equivalence(3, skip_nonlocal=True)
        assert any(not r.support_match for r in reports)
        bad = next(r for r in reports if not r.support_match)
        assert bad.counterexample is not None

    def test_report_serialization(self):
        report = check_equivalence(3)[0]
        data = report.to_dict()
        assert data["n"] == 3
        assert data["basis"] in ("X", "Z")
        assert data["support_match"] is True
