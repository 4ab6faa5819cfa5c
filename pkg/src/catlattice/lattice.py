"""Lattice geometry, model parameters and the full bosonic lattice model.

The Hamiltonian in the frame rotating with the pump is

    H = sum_j [ -Delta n_j + (U/2) a_j^dag2 a_j^2 + (G/2) a_j^dag2 + (G*/2) a_j^2 ]
        - (J/2d) sum_<j,j'> (a_j^dag a_j' + h.c.)

with one- and two-photon losses entering as jump operators sqrt(gamma) a_j and
sqrt(eta) a_j^2.  All energies and rates are expressed in units of gamma.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .fock import SparseOperator, annihilation_op, embed_site_op, _check_cap


@dataclass(frozen=True)
class Bond:
    """Unordered nearest-neighbour pair (i, j) with a hopping weight.

    weight is 2.0 for the doubled bond of an extent-2 periodic axis (the two
    formal bonds between the same pair are stored once, see LatticeGeometry).
    wrap marks a periodic closure bond on an axis of extent >= 3; it is used by
    the corner merge schedule to defer closures until a block spans the axis.
    """

    i: int
    j: int
    weight: float = 1.0
    wrap: bool = False


@dataclass(frozen=True)
class LatticeGeometry:
    """Periodic chain or rectangular torus.

    dimensionality counts the axes of extent >= 2: a 1 x L lattice is stored
    with the label the caller asked for but is physically a ring of L sites,
    so its coordination (and the J/2d normalization) is that of a 1D chain.
    Each site has exactly 2*dimensionality neighbour links, with extent-2 axes
    contributing a single bond of weight 2.
    """

    extents: tuple
    bonds: tuple
    label: str

    @property
    def n_sites(self):
        n = 1
        for e in self.extents:
            n *= e
        return n

    @property
    def dimensionality(self):
        return sum(1 for e in self.extents if e >= 2)


def _axis_bonds(extent):
    """Bond pattern (offset pairs, weight, wrap) along one periodic axis."""
    if extent == 1:
        return []
    if extent == 2:
        return [(0, 1, 2.0, False)]
    out = [(k, k + 1, 1.0, False) for k in range(extent - 1)]
    out.append((extent - 1, 0, 1.0, True))
    return out


def chain(n_sites, label=None):
    """Periodic 1D chain of n_sites."""
    if n_sites < 1:
        raise ValueError("need at least one site")
    bonds = tuple(Bond(i, j, w, wr) for (i, j, w, wr) in _axis_bonds(n_sites))
    return LatticeGeometry((n_sites,), bonds, label or str(n_sites))


def rectangle(lx, ly, label=None):
    """Periodic lx x ly lattice; site index is x * ly + y.

    Degenerate extents collapse: rectangle(1, L) is the L-site ring.
    """
    if lx < 1 or ly < 1:
        raise ValueError("extents must be >= 1")
    label = label or "%dx%d" % (lx, ly)
    if lx == 1:
        g = chain(ly, label=label)
        return LatticeGeometry((1, ly), g.bonds, label)
    if ly == 1:
        g = chain(lx, label=label)
        return LatticeGeometry((lx, 1), g.bonds, label)
    bonds = []
    for y in range(ly):
        for (x1, x2, w, wr) in _axis_bonds(lx):
            bonds.append(Bond(x1 * ly + y, x2 * ly + y, w, wr))
    for x in range(lx):
        for (y1, y2, w, wr) in _axis_bonds(ly):
            bonds.append(Bond(x * ly + y1, x * ly + y2, w, wr))
    return LatticeGeometry((lx, ly), tuple(bonds), label)


def geometry_from_size(size):
    """Accepts an int (1D ring) or a pair [lx, ly] (2D torus)."""
    if isinstance(size, int):
        return chain(size)
    if isinstance(size, str):
        if "x" in size:
            lx, ly = size.split("x")
            return rectangle(int(lx), int(ly), label=size)
        return chain(int(size))
    lx, ly = size
    return rectangle(int(lx), int(ly))


@dataclass(frozen=True)
class ModelParams:
    """All symbols of the driven-dissipative model, in units of gamma.

    delta: detuning Delta, u: Kerr energy U, g: two-photon drive amplitude G
    (complex, real in practice), j_hop: hopping J, gamma/eta: one- and
    two-photon loss rates.
    """

    delta: float
    u: float
    g: complex
    j_hop: float
    gamma: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if self.u < 0:
            raise ValueError("u must be >= 0")

    @classmethod
    def resonant(cls, u, j_hop, g, gamma=1.0):
        """Convention used throughout: Delta = -|J| and eta = gamma."""
        return cls(delta=-abs(j_hop), u=u, g=g, j_hop=j_hop, gamma=gamma, eta=gamma)

    def is_resonant_convention(self, tol=1e-12):
        return (abs(self.delta + abs(self.j_hop)) <= tol
                and abs(self.eta - self.gamma) <= tol)


def build_hamiltonian(params, geom, fock):
    """Assemble the lattice Hamiltonian as a Hermitian SparseOperator."""
    n = geom.n_sites
    d = fock.dim
    _check_cap(d ** n)
    dim = d ** n
    a_site = [embed_site_op(annihilation_op(fock), j, n) for j in range(n)]
    H = sp.csr_matrix((dim, dim), dtype=complex)
    g = complex(params.g)
    for j in range(n):
        a = a_site[j].mat
        ad = a.getH()
        H = H - params.delta * (ad @ a)
        if params.u != 0:
            H = H + 0.5 * params.u * (ad @ ad @ a @ a)
        if g != 0:
            H = H + 0.5 * g * (ad @ ad) + 0.5 * np.conj(g) * (a @ a)
    if params.j_hop != 0 and geom.bonds:
        pre = params.j_hop / (2.0 * geom.dimensionality)
        for b in geom.bonds:
            hop = a_site[b.i].mat.getH() @ a_site[b.j].mat
            H = H - pre * b.weight * (hop + hop.getH())
    return SparseOperator(H.tocsr(), hermitian=True)


def build_jump_operators(params, geom, fock):
    """sqrt(gamma) a_j for every site, then sqrt(eta) a_j^2 if eta > 0."""
    n = geom.n_sites
    a_site = [embed_site_op(annihilation_op(fock), j, n) for j in range(n)]
    jumps = [SparseOperator(np.sqrt(params.gamma) * aj.mat) for aj in a_site]
    if params.eta > 0:
        jumps += [SparseOperator(np.sqrt(params.eta) * (aj.mat @ aj.mat))
                  for aj in a_site]
    return jumps
