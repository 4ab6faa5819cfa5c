"""Cat-state basis and the reduction of the lattice model to a quantum XY spin model.

Deep in the bistable regime each site is effectively confined to the
two-dimensional manifold spanned by the even and odd cat states

    |C_a^+-> = (|a> +- |-a>) / (2 N+-),   N+- = sqrt(cosh|a|^2 / e^{|a|^2}) etc.

(N+- equal the norms of the even/odd components of the normalized coherent
state).  On that manifold the annihilation operator acts as

    a -> (alpha/2) (B_x sigma_x - i B_y sigma_y),
    B_x = N-/N+ + N+/N-,  B_y = N-/N+ - N+/N-,

and the lattice Hamiltonian, after dropping per-site identity contributions,
becomes the XY model

    H_XY = -(Delta |a|^2 A_-/2) sum_j sigma_j^z
           - (J |a|^2 / 4d) sum_<jj'> [(A_+ + 2) sx sx' + (A_+ - 2) sy sy'],

with A_+- = tanh|a|^2 +- 1/tanh|a|^2.  The identity scalars removed per site
are -Delta|a|^2 (B_x^2+B_y^2)/4 (from -Delta n), (G a*^2 + G* a^2)(B_x^2-B_y^2)/8
(drive) and U|a|^4 (B_x^2-B_y^2)/8 = U|a|^4/2 (Kerr; a^2 has the cats as
eigenstates with eigenvalue a^2, fixing this value unambiguously).

validate_mapping rebuilds everything numerically in the truncated Fock space
and reports the worst entrywise deviation, which is the end-to-end check that
the algebra above is implemented correctly.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import SparseOperator, annihilation_op, number_op, parity_op
from .lattice import build_hamiltonian

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def required_n_max(alpha):
    """Truncation sufficient for cat-state work.

    |a|^2 + 8 sqrt(|a|^2 + 1) puts the coherent tail beyond the cutoff
    near 1e-9; the extra two levels buy the order of magnitude needed for
    matrix elements of a (not just norms) to come out at 1e-10.
    """
    x = abs(alpha) ** 2
    return int(np.ceil(x + 8.0 * np.sqrt(x + 1.0))) + 2


def coherent_vector(alpha, fock):
    """Normalized coherent state |alpha> truncated to the Fock space."""
    n = np.arange(fock.dim)
    alpha = complex(alpha)
    if alpha == 0:
        v = np.zeros(fock.dim, dtype=complex)
        v[0] = 1.0
        return v
    x = abs(alpha) ** 2
    logmag = -0.5 * x + n * np.log(abs(alpha)) - 0.5 * np.cumsum(
        np.concatenate([[0.0], np.log(np.arange(1, fock.dim))]))
    phase = np.exp(1j * n * np.angle(alpha))
    return np.exp(logmag) * phase


@dataclass(frozen=True)
class CatBasis:
    alpha: complex
    n_max: int
    plus: np.ndarray      # |C^+>, unit-normalized
    minus: np.ndarray     # |C^->
    n_plus: float         # norms of the even/odd components of |alpha>
    n_minus: float


def cat_states(alpha, fock, norm_tol=1e-8):
    """Even/odd cat states in the truncated Fock space.

    Raises if the truncation cannot hold the coherent state (norm deficit
    beyond norm_tol); use required_n_max to size the space.
    """
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("cat states are undefined at alpha = 0")
    c = coherent_vector(alpha, fock)
    deficit = abs(1.0 - np.vdot(c, c).real)
    if deficit > norm_tol:
        raise ValueError("Fock truncation insufficient for |alpha|^2 = %.3f: "
                         "norm deficit %.2e (need n_max >= %d)"
                         % (abs(alpha) ** 2, deficit, required_n_max(alpha)))
    even = c.copy()
    even[1::2] = 0.0
    odd = c.copy()
    odd[0::2] = 0.0
    ne = np.linalg.norm(even)
    no = np.linalg.norm(odd)
    if no == 0:
        raise ValueError("odd cat component vanished; increase n_max or alpha")
    return CatBasis(alpha=alpha, n_max=fock.n_max, plus=even / ne,
                    minus=odd / no, n_plus=float(ne), n_minus=float(no))


def annihilation_on_cats(basis):
    """2x2 matrix <C^s| a |C^s'> in the (+, -) ordering."""
    fock_dim = basis.plus.size
    a = annihilation_op(type("F", (), {"dim": fock_dim, "n_max": fock_dim - 1})())
    am = a.mat
    vecs = [basis.plus, basis.minus]
    out = np.array([[np.vdot(vecs[i], am @ vecs[j]) for j in range(2)]
                    for i in range(2)])
    return out


@dataclass(frozen=True)
class SpinModelCoefficients:
    """All scalars of the cat-basis spin model for given alpha and couplings."""

    alpha: complex
    a_plus: float
    a_minus: float
    b_x: float
    b_y: float
    h_z: float      # sigma_z coefficient: H_XY has the term  -h_z * sum sigma_z
    c_xx: float     # sigma_x sigma_x bond coefficient (enters with a minus sign)
    c_yy: float

    @classmethod
    def from_alpha(cls, alpha, delta=0.0, j_hop=0.0, dimensionality=1):
        x = abs(complex(alpha)) ** 2
        t = np.tanh(x)
        a_plus = t + 1.0 / t
        a_minus = t - 1.0 / t
        sq = np.sqrt(t)
        b_x = sq + 1.0 / sq
        b_y = sq - 1.0 / sq
        h_z = delta * x * a_minus / 2.0
        pre = j_hop * x / (4.0 * dimensionality)
        return cls(alpha=complex(alpha), a_plus=a_plus, a_minus=a_minus,
                   b_x=b_x, b_y=b_y, h_z=h_z,
                   c_xx=pre * (a_plus + 2.0), c_yy=pre * (a_plus - 2.0))

    @classmethod
    def from_params(cls, alpha, params, geom):
        return cls.from_alpha(alpha, delta=params.delta, j_hop=params.j_hop,
                              dimensionality=max(geom.dimensionality, 1))

    def identity_scalars(self, params):
        """Per-site identity contributions dropped when forming H_XY.

        detuning: -Delta |a|^2 (B_x^2 + B_y^2) / 4   (the Hamiltonian carries
        -Delta a^dag a, so the scalar inherits the minus sign);
        drive: (G a*^2 + G* a^2)(B_x^2 - B_y^2)/8;
        Kerr:  U |a|^4 (B_x^2 - B_y^2)/8 = U |a|^4 / 2, pinned by the exact
        eigenrelation a^2 |C+-> = a^2 |C+->.
        """
        x = abs(self.alpha) ** 2
        bx2, by2 = self.b_x ** 2, self.b_y ** 2
        g = complex(params.g)
        det = -params.delta * x * (bx2 + by2) / 4.0
        drive = ((g * np.conj(self.alpha) ** 2 + np.conj(g) * self.alpha ** 2)
                 * (bx2 - by2) / 8.0).real
        kerr = params.u * x ** 2 * (bx2 - by2) / 8.0
        return {"detuning": det, "drive": drive, "kerr": kerr,
                "total": det + drive + kerr}


def _embed_pauli(op, site, n):
    m = sp.csr_matrix(op)
    if site > 0:
        m = sp.kron(sp.identity(2 ** site, format="csr"), m, format="csr")
    if n - site - 1 > 0:
        m = sp.kron(m, sp.identity(2 ** (n - site - 1), format="csr"), format="csr")
    return m


def build_xy_hamiltonian(coeffs, geom):
    """H_XY on the lattice, as a Hermitian SparseOperator over N spins."""
    n = geom.n_sites
    if n > 24:
        raise ValueError("2^%d spin dimension is past the cap" % n)
    dim = 2 ** n
    H = sp.csr_matrix((dim, dim), dtype=complex)
    for j in range(n):
        H = H - coeffs.h_z * _embed_pauli(SIGMA_Z, j, n)
    for b in geom.bonds:
        sxsx = _embed_pauli(SIGMA_X, b.i, n) @ _embed_pauli(SIGMA_X, b.j, n)
        sysy = _embed_pauli(SIGMA_Y, b.i, n) @ _embed_pauli(SIGMA_Y, b.j, n)
        H = H - b.weight * (coeffs.c_xx * sxsx + coeffs.c_yy * sysy)
    return SparseOperator(H.tocsr(), hermitian=True)


def cat_isometry(basis, n_sites):
    """Product isometry V mapping N spins into the bosonic space.

    Columns are ordered like the spin tensor basis (site 0 slowest), with the
    per-site order (|C^+>, |C^->)."""
    v1 = np.column_stack([basis.plus, basis.minus])
    v = v1
    for _ in range(n_sites - 1):
        v = np.kron(v, v1)
    return v


def validate_mapping(alpha, params, geom, fock):
    """Worst entrywise deviation between the projected lattice Hamiltonian and
    H_XY plus the predicted identity scalars."""
    basis = cat_states(alpha, fock)
    n = geom.n_sites
    v = cat_isometry(basis, n)
    hb = build_hamiltonian(params, geom, fock).mat
    h_proj = v.conj().T @ (hb @ v)
    coeffs = SpinModelCoefficients.from_params(alpha, params, geom)
    h_xy = build_xy_hamiltonian(coeffs, geom).mat.toarray()
    scalar = coeffs.identity_scalars(params)["total"] * n
    dev = np.abs(h_proj - h_xy - scalar * np.eye(2 ** n)).max()
    return float(dev)


def estimate_alpha(params, fock, alpha_max=None, grid=60, refine_iter=40):
    """Extract alpha from the single-site steady state.

    The dominant parity-even eigenvector of the steady state is matched
    against |C_alpha^+> and |alpha| maximizes the overlap (coarse scan plus
    golden-section refinement).  The phase of alpha is fixed beforehand from
    <a^2> on that eigenvector, since a^2 |C_alpha^+> = alpha^2 |C_alpha^+>
    holds exactly for a cat; a real scan alone would miss drives whose
    steady-state amplitude is complex.  Meaningful in the regime where the
    steady state is a well-formed cat mixture (strong two-photon drive);
    below it the overlap is maximized by alpha -> 0 and the result simply
    reports a near-vacuum state.  Returns complex alpha.
    """
    from .lattice import ModelParams, chain, build_jump_operators
    from .liouville import solve_steady_state

    single = chain(1)
    h = build_hamiltonian(params, single, fock)
    jumps = build_jump_operators(params, single, fock)
    res = solve_steady_state(h, jumps)
    rho = res.rho.mat
    pvec = np.diag(parity_op(fock, 1).mat.toarray()).real
    evals, evecs = np.linalg.eigh(rho)
    best = None
    for k in range(len(evals) - 1, -1, -1):
        v = evecs[:, k]
        if (np.abs(v) ** 2 * pvec).sum() > 0.5:
            best = v
            break
    if best is None:
        raise RuntimeError("no parity-even eigenvector found")
    n = np.arange(fock.dim)
    nbar = float((n * np.abs(best) ** 2).sum())
    # <a^2> on the eigenvector: (a^2 v)[k] = sqrt((k+1)(k+2)) v[k+2]
    a2v = np.zeros_like(best)
    a2v[:-2] = np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) * best[2:]
    a2 = complex(np.vdot(best, a2v))
    phase = 0.5 * np.angle(a2) if abs(a2) > 1e-12 else 0.0
    ray = np.exp(1j * phase)
    if alpha_max is None:
        alpha_max = max(2.0 * np.sqrt(nbar + 0.5), 0.5)

    def overlap(a):
        if a <= 0:
            return 0.0
        c = coherent_vector(a * ray, fock)
        even = c.copy()
        even[1::2] = 0.0
        nrm = np.linalg.norm(even)
        if nrm == 0:
            return 0.0
        return abs(np.vdot(even / nrm, best))

    alphas = np.linspace(1e-3, alpha_max, grid)
    vals = [overlap(a) for a in alphas]
    k = int(np.argmax(vals))
    lo = alphas[max(k - 1, 0)]
    hi = alphas[min(k + 1, grid - 1)]
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - phi * (b - a)
    c2 = a + phi * (b - a)
    f1, f2 = overlap(c1), overlap(c2)
    for _ in range(refine_iter):
        if f1 >= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - phi * (b - a)
            f1 = overlap(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi * (b - a)
            f2 = overlap(c2)
    return 0.5 * (a + b) * ray
