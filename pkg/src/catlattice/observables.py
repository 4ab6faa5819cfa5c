"""Steady-state observables: parity, von Neumann entropy, densities, correlators."""

from dataclasses import dataclass, field

import numpy as np

from .fock import SparseOperator


def _op_mat(op):
    if isinstance(op, SparseOperator):
        return op.mat
    return op


def parity_expectation(rho, pi_op, imag_tol=1e-10):
    """Tr(rho Pi).  The imaginary part must vanish; it is checked, then dropped."""
    mat = rho.mat if hasattr(rho, "mat") else np.asarray(rho)
    P = _op_mat(pi_op)
    if P.shape[0] != mat.shape[0]:
        raise ValueError("operator dimension %d does not match state dimension %d"
                         % (P.shape[0], mat.shape[0]))
    val = complex((P @ mat).trace())
    if abs(val.imag) > imag_tol:
        raise ValueError("parity expectation has imaginary part %g" % val.imag)
    return float(val.real)


def von_neumann_entropy(rho, eig_floor=1e-14):
    """S = -sum lambda log lambda (natural log) over eigenvalues above eig_floor."""
    if hasattr(rho, "eigenvalues"):
        ev = rho.eigenvalues()
    else:
        ev = np.linalg.eigvalsh(np.asarray(rho))
    if ev.min() < -1e-8:
        raise ValueError("state has negative eigenvalue %g" % ev.min())
    ev = ev[ev > eig_floor]
    s = float(-(ev * np.log(ev)).sum())
    return max(s, 0.0)


def expectation(rho, op):
    mat = rho.mat if hasattr(rho, "mat") else np.asarray(rho)
    return complex((_op_mat(op) @ mat).trace())


def site_density(rho, number_ops):
    """Per-site photon density <n_j> for a list of (projected) number operators."""
    out = []
    for nop in number_ops:
        v = expectation(rho, nop)
        out.append(float(v.real))
    return np.array(out)


def correlation(rho, a_ops, j, jp):
    """<a_j^dag a_j'> from the (projected) annihilation operators."""
    aj = _op_mat(a_ops[j])
    ajp = _op_mat(a_ops[jp])
    return expectation(rho, aj.conj().T @ ajp)


def trace_distance(rho_a, rho_b):
    """T(a, b) = ||a - b||_1 / 2 for Hermitian density matrices."""
    ma = rho_a.mat if hasattr(rho_a, "mat") else np.asarray(rho_a)
    mb = rho_b.mat if hasattr(rho_b, "mat") else np.asarray(rho_b)
    ev = np.linalg.eigvalsh(ma - mb)
    return 0.5 * float(np.abs(ev).sum())


@dataclass
class ObservableRecord:
    """One steady-state evaluation, ready for the sweep store."""

    parity: float
    entropy: float
    n_per_site: float
    densities: list = field(default_factory=list)
    correlations: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (-1.0 - 1e-9 <= self.parity <= 1.0 + 1e-9):
            raise ValueError("parity %g outside [-1, 1]" % self.parity)
        if self.entropy < -1e-12:
            raise ValueError("negative entropy %g" % self.entropy)


def record_from_state(rho, pi_op, number_ops, provenance=None, with_densities=True):
    dens = site_density(rho, number_ops) if with_densities else np.array([])
    return ObservableRecord(
        parity=parity_expectation(rho, pi_op),
        entropy=von_neumann_entropy(rho),
        n_per_site=float(dens.mean()) if dens.size else float("nan"),
        densities=list(map(float, dens)),
        provenance=dict(provenance or {}))
