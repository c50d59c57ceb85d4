import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import circuit_by_kron, full_unitary, mps_by_index_sum
from simlearn.qstate import (
    BornDistribution, Gate, LayeredCircuit, MatrixProductState, SampleSet, StateVector,
    apply_gate, bits_of, bond_profile, born, contract, entanglement_entropy, entropy_profile,
    gate_matrix, ghz, index_of, load_bundle, make_target, random_clifford_t_circuit,
    random_mps, sample, save_bundle, simulate,
)
from simlearn.qstate.gates import GATE_MATRICES, ONE_QUBIT, TWO_QUBIT

ALL_KINDS = ONE_QUBIT + TWO_QUBIT


def random_state(n, rng):
    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return StateVector.from_amplitudes(v, normalize=True)


def bell():
    return StateVector.from_amplitudes([1, 0, 0, 1], normalize=True)


# ---- gates -------------------------------------------------------------------

@pytest.mark.parametrize("kind", ALL_KINDS)
def test_gate_matrices_unitary(kind):
    U = gate_matrix(kind)
    assert np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-12)


def test_gate_matrix_values():
    assert np.array_equal(gate_matrix("X"), [[0, 1], [1, 0]])
    assert np.allclose(gate_matrix("T"), np.diag([1, np.exp(1j * np.pi / 4)]))
    swap = gate_matrix("SWAP")
    assert np.allclose(swap @ swap, np.eye(4))
    with pytest.raises(ValueError):
        gate_matrix("CCX")


def test_gate_arity_checked():
    with pytest.raises(ValueError):
        Gate("CNOT", (0,))
    with pytest.raises(ValueError):
        Gate("H", (0, 1))
    with pytest.raises(ValueError):
        Gate("CZ", (2, 2))


def test_hadamard_on_zero():
    out = apply_gate(StateVector.zero(1), Gate("H", (0,)))
    assert np.allclose(out.amplitudes, [2 ** -0.5, 2 ** -0.5])


def test_cnot_makes_bell():
    # (|00> + |10>)/sqrt2 written as |q0 q1>: q0 = 1 is index 1
    psi = StateVector.from_amplitudes([1, 1, 0, 0], normalize=True)
    out = apply_gate(psi, Gate("CNOT", (0, 1)))
    assert np.allclose(out.amplitudes, bell().amplitudes, atol=1e-12)


def test_apply_gate_out_of_range():
    with pytest.raises(ValueError):
        apply_gate(StateVector.zero(2), Gate("X", (2,)))


@pytest.mark.parametrize("seed", range(20))
def test_apply_gate_matches_kron_oracle(seed):
    rng = np.random.default_rng(seed)
    psi = random_state(3, rng)
    kind = ALL_KINDS[rng.integers(len(ALL_KINDS))]
    qubits = tuple(int(q) for q in rng.choice(3, size=2 if kind in TWO_QUBIT else 1, replace=False))
    out = apply_gate(psi, Gate(kind, qubits))
    expected = full_unitary(3, GATE_MATRICES[kind], qubits) @ psi.amplitudes
    assert np.allclose(out.amplitudes, expected, atol=1e-12)
    assert abs(out.norm() - 1) < 1e-12


# ---- circuits ----------------------------------------------------------------

def test_full_scale_circuit_shape():
    c = random_clifford_t_circuit(10, 500, 0, seed=3)
    assert c.depth == 500 and c.t_count == 0
    for layer in c.layers:
        assert sorted(q for g in layer for q in g.qubits) == list(range(10))


def test_fully_reserved_grid_is_all_t():
    c = random_clifford_t_circuit(2, 1, 2, seed=0)
    assert [g.kind for g in c.gates()] == ["T", "T"]


def test_layer_occupancy_audit():
    c = random_clifford_t_circuit(4, 50, 5, seed=7)
    assert c.depth == 50 and c.t_count == 5
    for layer in c.layers:
        touched = [q for g in layer for q in g.qubits]
        assert sorted(touched) == [0, 1, 2, 3]


def test_t_count_too_large():
    with pytest.raises(ValueError):
        random_clifford_t_circuit(2, 3, 7, seed=0)


def test_circuit_determinism():
    a = random_clifford_t_circuit(5, 40, 6, seed=11)
    b = random_clifford_t_circuit(5, 40, 6, seed=11)
    c = random_clifford_t_circuit(5, 40, 6, seed=12)
    assert a == b
    assert a != c


def test_t_positions_uniform_over_grid():
    # each of the 2x3 grid points should host the single T about 1/6 of the time
    hits = np.zeros((3, 2))
    for seed in range(1200):
        c = random_clifford_t_circuit(2, 3, 1, seed)
        for li, layer in enumerate(c.layers):
            for g in layer:
                if g.kind == "T":
                    hits[li, g.qubits[0]] += 1
    assert np.all(np.abs(hits / 1200 - 1 / 6) < 0.05)


def test_circuit_rejects_overlap():
    with pytest.raises(ValueError):
        LayeredCircuit(2, [[Gate("H", (0,)), Gate("CNOT", (0, 1))]])


def test_simulate_empty_and_bell():
    assert np.allclose(simulate(LayeredCircuit(3, [])).amplitudes, StateVector.zero(3).amplitudes)
    c = LayeredCircuit(2, [[Gate("H", (0,))], [Gate("CNOT", (0, 1))]])
    assert np.allclose(simulate(c).amplitudes, bell().amplitudes)


@pytest.mark.parametrize("seed", range(10))
def test_simulate_matches_kron_oracle(seed):
    c = random_clifford_t_circuit(3, 10, seed % 4, seed)
    psi = simulate(c)
    assert np.max(np.abs(psi.amplitudes - circuit_by_kron(c, GATE_MATRICES))) < 1e-10
    assert abs(psi.norm() - 1) < 1e-10


def test_simulate_qubit_guard():
    with pytest.raises(ValueError):
        simulate(LayeredCircuit(15, []))


# ---- MPS ---------------------------------------------------------------------

def test_bond_profile_min_rule():
    mps = random_mps(10, 32, seed=0)
    assert mps.bond_dims == [2, 4, 8, 16, 32, 16, 8, 4, 2]
    assert mps.bond_dim == 32
    assert bond_profile(6, 3) == [2, 3, 3, 3, 2]


@pytest.mark.parametrize("seed", range(5))
def test_contract_matches_index_sum(seed):
    mps = random_mps(3, 2, seed)
    psi = contract(mps)
    assert np.max(np.abs(psi.amplitudes - mps_by_index_sum(mps.tensors))) < 1e-10


def test_canonical_form_isometries():
    mps = random_mps(7, 4, seed=2)
    c = mps.center
    assert c == 3
    for i, A in enumerate(mps.tensors):
        l, d, r = A.shape
        if i < c:
            M = A.reshape(l * d, r)
            assert np.allclose(M.conj().T @ M, np.eye(r), atol=1e-10)
        elif i > c:
            M = A.reshape(l, d * r)
            assert np.allclose(M @ M.conj().T, np.eye(l), atol=1e-10)
    assert abs(contract(mps).norm() - 1) < 1e-8


def test_product_mps_contracts_to_product_state():
    rng = np.random.default_rng(0)
    locals_ = [v / np.linalg.norm(v) for v in rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))]
    mps = MatrixProductState(tuple(v.reshape(1, 2, 1) for v in locals_))
    assert np.allclose(contract(mps).amplitudes, StateVector.product(locals_).amplitudes)


def test_random_mps_determinism_and_real_flag():
    a, b = random_mps(5, 3, seed=4), random_mps(5, 3, seed=4)
    assert all(np.array_equal(x, y) for x, y in zip(a.tensors, b.tensors))
    r = random_mps(5, 3, seed=4, complex_entries=False)
    assert all(np.isrealobj(A) for A in r.tensors)


def test_mps_rejects_bad_boundary():
    with pytest.raises(ValueError):
        MatrixProductState((np.ones((2, 2, 1)),))


# ---- Born / samples ----------------------------------------------------------

def test_born_examples():
    assert np.array_equal(born(StateVector.zero(3)).probs, np.eye(8)[0])
    assert np.allclose(born(bell()).probs, [0.5, 0, 0, 0.5])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2 ** 31))
def test_born_normalized(n, seed):
    p = born(random_state(n, np.random.default_rng(seed))).probs
    assert abs(p.sum() - 1) < 1e-9 and np.all(p >= 0)


def test_sample_delta_and_conservation():
    s = sample(BornDistribution.delta(4, 9), 100, seed=1)
    assert s.counts[9] == 100 and s.total == 100
    s2 = sample(born(random_state(5, np.random.default_rng(2))), 777, seed=3)
    assert s2.total == 777


def test_sample_determinism():
    d = born(random_state(4, np.random.default_rng(0)))
    assert np.array_equal(sample(d, 1000, 5).counts, sample(d, 1000, 5).counts)


def test_uniform_sampling_concentrates():
    # expected TV for 1e5 draws over 1024 cells is about 0.04; allow a margin on each seed
    u = BornDistribution.uniform(10)
    tvs = [0.5 * np.abs(sample(u, 10 ** 5, seed).frequencies().probs - u.probs).sum() for seed in range(10)]
    assert max(tvs) < 0.05


def test_bit_helpers():
    assert list(bits_of(6, 4)) == [0, 1, 1, 0]
    assert index_of([0, 1, 1, 0]) == 6
    s = SampleSet.from_samples(2, [0, 3, 3])
    assert list(s.counts) == [1, 0, 0, 2]
    assert list(s.expand()) == [0, 3, 3]


def test_distribution_validation():
    with pytest.raises(ValueError):
        BornDistribution(1, [0.7, 0.7])
    with pytest.raises(ValueError):
        SampleSet(1, [-1, 3])


# ---- entropy -----------------------------------------------------------------

def test_entropy_bell_and_ghz():
    assert abs(entanglement_entropy(bell(), {0}) - 1) < 1e-9
    assert np.allclose(entropy_profile(ghz(6)), 1, atol=1e-9)


def test_entropy_product_and_chi1():
    rng = np.random.default_rng(1)
    prod = StateVector.product(rng.standard_normal((5, 2)))
    assert np.allclose(entropy_profile(prod), 0, atol=1e-9)
    assert np.allclose(entropy_profile(contract(random_mps(6, 1, seed=3))), 0, atol=1e-9)


def test_entropy_rejects_bad_subsystem():
    with pytest.raises(ValueError):
        entanglement_entropy(bell(), set())
    with pytest.raises(ValueError):
        entanglement_entropy(bell(), {0, 1})


def test_entropy_profile_modes():
    psi = random_state(6, np.random.default_rng(0))
    assert entropy_profile(psi, "contiguous-cuts").shape == (5,)
    sizes = entropy_profile(psi, "subsystem-sizes")
    assert sizes.shape == (3,)
    assert np.allclose(sizes, entropy_profile(psi)[:3])
    with pytest.raises(ValueError):
        entropy_profile(psi, "bogus")


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2 ** 31), st.data())
def test_entropy_bounds_and_complement(n, seed, data):
    psi = random_state(n, np.random.default_rng(seed))
    A = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    S = entanglement_entropy(psi, A)
    assert -1e-12 <= S <= min(len(A), n - len(A)) + 1e-9
    assert abs(S - entanglement_entropy(psi, set(range(n)) - A)) < 1e-9


def test_mps_entropy_bounded_by_log_chi():
    psi = contract(random_mps(8, 2, seed=5))
    assert np.all(entropy_profile(psi) <= 1 + 1e-9)


# ---- bundles -----------------------------------------------------------------

@pytest.mark.parametrize("kind,res", [("mps", 4), ("clifford_t", 3)])
def test_bundle_round_trip(tmp_path, kind, res):
    target = make_target(kind, 5, res, seed=2, depth=20)
    data = sample(target.dist, 500, seed=9)
    path = tmp_path / "b.json"
    save_bundle(path, target, data)
    meta, dist, data2 = load_bundle(path)
    assert np.array_equal(dist.probs, target.dist.probs)
    assert np.array_equal(data2.counts, data.counts)
    assert meta["kind"] == kind and meta["bit_order"] == "little-endian"
    raw = json.loads(path.read_text())
    assert ("chi" in raw) == (kind == "mps") and ("depth" in raw) == (kind == "clifford_t")


def test_bundle_rejects_inconsistent_counts(tmp_path):
    target = make_target("mps", 3, 2, seed=0)
    data = sample(target.dist, 50, seed=0)
    path = tmp_path / "b.json"
    save_bundle(path, target, data)
    raw = json.loads(path.read_text())
    raw["n_s"] = 51
    path.write_text(json.dumps(raw))
    with pytest.raises(ValueError):
        load_bundle(path)
