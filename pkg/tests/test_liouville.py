import numpy as np
import pytest
import scipy.sparse as sp

from catlattice.fock import (FockSpace, SparseOperator, annihilation_op,
                             parity_op)
from catlattice.lattice import (ModelParams, build_hamiltonian,
                                build_jump_operators, chain)
from catlattice.liouville import (DensityMatrix, solve_steady_state,
                                  spectral_radius_bound, steady_state_direct,
                                  steady_state_eigen, steady_state_time,
                                  time_evolve, vectorize_lindbladian)
from catlattice.observables import trace_distance


def _random_lindblad(dim, n_jumps, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    H = SparseOperator(sp.csr_matrix(0.5 * (m + m.conj().T)), hermitian=True)
    jumps = []
    for _ in range(n_jumps):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        jumps.append(SparseOperator(sp.csr_matrix(0.4 * g)))
    return H, jumps


def _master_rhs(H, jumps, rho):
    h = H.mat.toarray()
    out = -1j * (h @ rho - rho @ h)
    for j in jumps:
        g = j.mat.toarray()
        gd = g.conj().T
        out += g @ rho @ gd - 0.5 * (gd @ g @ rho + rho @ gd @ g)
    return out


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_vectorization_matches_master_equation(seed):
    # row-major convention: L @ rho.reshape(-1) == vec(master RHS)
    dim = 4
    H, jumps = _random_lindblad(dim, 2, seed)
    liou = vectorize_lindbladian(H, jumps)
    rng = np.random.default_rng(100 + seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    rho /= rho.trace()
    lhs = (liou.sup @ rho.reshape(-1)).reshape(dim, dim)
    rhs = _master_rhs(H, jumps, rho)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_vectorization_preserves_trace():
    H, jumps = _random_lindblad(5, 3, 11)
    liou = vectorize_lindbladian(H, jumps)
    t = np.eye(5, dtype=complex).reshape(-1)
    assert np.abs(t @ liou.sup).max() < 1e-12


def test_driven_cavity_coherent_steady_state():
    # linear drive eps(a + a^dag) with single-photon loss settles into the
    # coherent state alpha = -2i eps / gamma
    f = FockSpace(12)
    eps, gamma = 0.2, 1.0
    a = annihilation_op(f)
    h = eps * (a.mat + a.mat.conj().T)
    H = SparseOperator(sp.csr_matrix(h), hermitian=True)
    jumps = [SparseOperator(np.sqrt(gamma) * a.mat)]
    res = steady_state_direct(vectorize_lindbladian(H, jumps))
    alpha = -2j * eps / gamma
    a_mean = complex((a.mat.toarray() @ res.rho.mat).trace())
    assert abs(a_mean - alpha) < 1e-8
    purity = float(np.real((res.rho.mat @ res.rho.mat).trace()))
    assert purity > 1.0 - 1e-8


def test_direct_eigen_time_agree():
    f = FockSpace(6)
    p = ModelParams(delta=-5.0, u=10.0, g=2.0, j_hop=0.0)
    h = build_hamiltonian(p, chain(1), f)
    jumps = build_jump_operators(p, chain(1), f)
    liou = vectorize_lindbladian(h, jumps)
    r1 = steady_state_direct(liou)
    r2 = steady_state_eigen(liou)
    r3 = steady_state_time(liou, t_final=60.0)
    assert trace_distance(r1.rho, r2.rho) < 1e-8
    assert trace_distance(r1.rho, r3.rho) < 1e-6
    for r in (r1, r2, r3):
        r.rho.validate()


def test_steady_state_residual_and_flags():
    f = FockSpace(5)
    p = ModelParams(delta=0.0, u=4.0, g=1.0, j_hop=0.0)
    h = build_hamiltonian(p, chain(1), f)
    jumps = build_jump_operators(p, chain(1), f)
    res = solve_steady_state(h, jumps)
    assert res.residual < 1e-9
    assert res.method in ("direct-dense", "direct-sparse", "direct")
    assert "HIGH_RESIDUAL" not in res.flags


def test_degenerate_kernel_flagged():
    # pure two-photon loss conserves parity blockwise: the kernel of L is
    # degenerate and eigen must say so instead of silently picking a vector
    f = FockSpace(7)
    a = annihilation_op(f)
    a2 = SparseOperator(a.mat @ a.mat)
    h = SparseOperator(sp.csr_matrix((f.dim, f.dim), dtype=complex),
                       hermitian=True)
    liou = vectorize_lindbladian(h, [a2])
    pi = parity_op(f, 1)
    res = steady_state_eigen(liou, parity=pi)
    assert "DEGENERATE" in res.flags
    res.rho.validate()


def test_eigen_requires_jumps():
    f = FockSpace(3)
    p = ModelParams(delta=1.0, u=2.0, g=0.5, j_hop=0.0)
    h = build_hamiltonian(p, chain(1), f)
    with pytest.raises(ValueError):
        steady_state_eigen(vectorize_lindbladian(h, []))


def test_spectral_radius_bounds_eigenvalues():
    H, jumps = _random_lindblad(4, 2, 3)
    liou = vectorize_lindbladian(H, jumps)
    bound = spectral_radius_bound(liou)
    eigs = np.linalg.eigvals(liou.sup.toarray())
    assert bound >= np.abs(eigs).max()


def test_time_evolve_keeps_trace():
    f = FockSpace(4)
    p = ModelParams(delta=-2.0, u=4.0, g=1.0, j_hop=0.0)
    h = build_hamiltonian(p, chain(1), f)
    jumps = build_jump_operators(p, chain(1), f)
    liou = vectorize_lindbladian(h, jumps)
    rho0 = np.zeros((f.dim, f.dim), dtype=complex)
    rho0[0, 0] = 1.0
    out = time_evolve(DensityMatrix(rho0), liou, t_final=3.0)
    assert abs(out.mat.trace() - 1.0) < 1e-8


def test_time_evolve_rejects_unstable_step():
    f = FockSpace(4)
    p = ModelParams(delta=-2.0, u=4.0, g=1.0, j_hop=0.0)
    h = build_hamiltonian(p, chain(1), f)
    jumps = build_jump_operators(p, chain(1), f)
    liou = vectorize_lindbladian(h, jumps)
    rho0 = np.zeros((f.dim, f.dim), dtype=complex)
    rho0[0, 0] = 1.0
    bad_dt = 3.0 / spectral_radius_bound(liou) * 2.5
    with pytest.raises(ValueError):
        time_evolve(DensityMatrix(rho0), liou, t_final=1.0, dt=bad_dt)


def test_solve_router_methods():
    f = FockSpace(4)
    p = ModelParams(delta=-2.0, u=4.0, g=1.0, j_hop=0.0)
    h = build_hamiltonian(p, chain(1), f)
    jumps = build_jump_operators(p, chain(1), f)
    for method in ("auto", "direct", "eigen", "time"):
        res = solve_steady_state(h, jumps, method=method)
        res.rho.validate()
    with pytest.raises(ValueError):
        solve_steady_state(h, jumps, method="bogus")
