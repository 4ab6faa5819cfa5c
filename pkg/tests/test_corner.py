import numpy as np
import pytest

from catlattice.corner import (build_schedule, convergence_sweep,
                               corner_steady_state, merge_spaces,
                               project_operator, project_pair)
from catlattice.fock import FockSpace, annihilation_op, number_op, parity_op
from catlattice.lattice import (ModelParams, build_hamiltonian,
                                build_jump_operators, chain, rectangle)
from catlattice.liouville import DensityMatrix, solve_steady_state
from catlattice.observables import (parity_expectation, trace_distance,
                                    von_neumann_entropy)


def test_merge_keeps_most_probable_products():
    rho_a = DensityMatrix(np.diag([0.9, 0.1]).astype(complex))
    rho_b = DensityMatrix(np.diag([0.8, 0.2]).astype(complex))
    basis = merge_spaces(rho_a, rho_b, 2)
    # product weights: 0.72, 0.18, 0.08, 0.02 -> keep (0,0) and (0,1)
    assert basis.m == 2
    assert basis.weights[0] == pytest.approx(0.72)
    assert basis.weights[1] == pytest.approx(0.18)


def test_merge_tie_expansion():
    # degenerate second/third weights: truncating at m=2 must widen to 3
    rho_a = DensityMatrix(np.diag([0.9, 0.1]).astype(complex))
    rho_b = DensityMatrix(np.diag([0.9, 0.1]).astype(complex))
    basis = merge_spaces(rho_a, rho_b, 2)
    assert basis.m == 3
    assert basis.weights[1] == pytest.approx(basis.weights[2])


def test_full_merge_is_exact_projection():
    rng = np.random.default_rng(5)

    def random_rho(d):
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        r = m @ m.conj().T
        return DensityMatrix(r / r.trace())

    rho_a, rho_b = random_rho(3), random_rho(4)
    basis = merge_spaces(rho_a, rho_b, 12)
    assert basis.m == 12
    assert basis.kept_weight == pytest.approx(1.0)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    y = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    # pair projection of X (x) Y must equal the full Kronecker product
    # sandwiched by the explicit kept-product isometry
    pair = project_pair(x, y, basis)
    iso = np.zeros((12, 12), dtype=complex)
    for k in range(basis.m):
        iso[:, k] = np.kron(basis.vecs_a[:, basis.idx_a[k]],
                            basis.vecs_b[:, basis.idx_b[k]])
    ref = iso.conj().T @ np.kron(x, y) @ iso
    assert np.abs(pair - ref).max() < 1e-12


def test_pair_projection_beats_product_of_projections():
    # with a truncated basis, P(X (x) Y) != P(X (x) I) P(I (x) Y); the pair
    # projector is the one that matches the isometry sandwich
    rng = np.random.default_rng(9)
    rho_a = DensityMatrix(np.diag([0.6, 0.3, 0.1]).astype(complex))
    rho_b = DensityMatrix(np.diag([0.7, 0.2, 0.1]).astype(complex))
    basis = merge_spaces(rho_a, rho_b, 4)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    y = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    pair = project_pair(x, y, basis)
    xa = project_operator(x, "A", basis)
    yb = project_operator(y, "B", basis)
    iso = np.zeros((9, basis.m), dtype=complex)
    for k in range(basis.m):
        iso[:, k] = np.kron(basis.vecs_a[:, basis.idx_a[k]],
                            basis.vecs_b[:, basis.idx_b[k]])
    ref = iso.conj().T @ np.kron(x, y) @ iso
    assert np.abs(pair - ref).max() < 1e-12
    assert np.abs(xa @ yb - ref).max() > 1e-3


def test_schedule_shapes():
    sched = build_schedule(rectangle(2, 2), 16, leaf_sites_max=2)
    assert all(r.n_sites <= 2 for r in sched.leaves)
    sched1d = build_schedule(chain(4), 16, leaf_sites_max=2)
    assert len(sched1d.steps) >= 1


def test_corner_full_m_matches_exact_two_site():
    f = FockSpace(3)
    p = ModelParams.resonant(u=40.0, j_hop=20.0, g=1.5)
    geom = chain(2)
    full = f.dim ** 2
    run = corner_steady_state(geom, p, f, full, leaf_sites_max=1)
    h = build_hamiltonian(p, geom, f)
    jumps = build_jump_operators(p, geom, f)
    exact = solve_steady_state(h, jumps)
    pi = parity_op(f, 2)
    d_pi = abs(parity_expectation(run.result.rho, run.parity_op)
               - parity_expectation(exact.rho, pi))
    d_s = abs(von_neumann_entropy(run.result.rho)
              - von_neumann_entropy(exact.rho))
    assert d_pi < 1e-7
    assert d_s < 1e-7


def test_corner_full_m_matches_exact_l_shape_2x2():
    f = FockSpace(1)
    p = ModelParams.resonant(u=10.0, j_hop=5.0, g=0.8)
    geom = rectangle(2, 2)
    run = corner_steady_state(geom, p, f, f.dim ** 4, leaf_sites_max=2)
    h = build_hamiltonian(p, geom, f)
    jumps = build_jump_operators(p, geom, f)
    exact = solve_steady_state(h, jumps)
    pi = parity_op(f, 4)
    d_pi = abs(parity_expectation(run.result.rho, run.parity_op)
               - parity_expectation(exact.rho, pi))
    assert d_pi < 1e-7


def test_convergence_sweep_exact_shortcut():
    f = FockSpace(2)
    p = ModelParams.resonant(u=20.0, j_hop=10.0, g=1.0)
    run, report = convergence_sweep(chain(2), p, f, [f.dim ** 2],
                                    leaf_sites_max=1)
    assert run.converged
    assert report[0]["exact"]


def test_convergence_sweep_flags_unconverged():
    f = FockSpace(2)
    p = ModelParams.resonant(u=20.0, j_hop=10.0, g=1.5)
    run, report = convergence_sweep(chain(3), p, f, [1],
                                    leaf_sites_max=1)
    assert not run.converged
    assert "UNCONVERGED" in run.result.flags


def test_convergence_sweep_rejects_unsorted():
    f = FockSpace(2)
    p = ModelParams.resonant(u=20.0, j_hop=10.0, g=1.0)
    with pytest.raises(ValueError):
        convergence_sweep(chain(2), p, f, [8, 4])


def test_truncated_corner_tracks_exact_three_site():
    f = FockSpace(2)
    p = ModelParams.resonant(u=100.0, j_hop=50.0, g=1.8)
    geom = chain(3)
    run, _ = convergence_sweep(geom, p, f, [6, 12, 18],
                               leaf_sites_max=1)
    h = build_hamiltonian(p, geom, f)
    jumps = build_jump_operators(p, geom, f)
    exact = solve_steady_state(h, jumps)
    pi = parity_op(f, 3)
    d_pi = abs(parity_expectation(run.result.rho, run.parity_op)
               - parity_expectation(exact.rho, pi))
    assert d_pi < 2e-3
