"""Corner-space renormalization for lattice steady states.

The method solves small blocks exactly, then repeatedly merges two solved
blocks: the merged space is spanned by the M most probable products of the
blocks' density-matrix eigenvectors, every operator is projected into that
corner, and the merged block is re-solved.  Truncation quality is controlled
by re-running at increasing M (convergence_sweep); corner results are never
reported without their kept-weight and drift diagnostics.

Conventions that matter for correctness:

* Product operators X_A (x) Y_B are projected entrywise,
  <phi_k psi_k| X (x) Y |phi_l psi_l> = X~[ia_k, ia_l] * Y~[ib_k, ib_l];
  projecting the factors separately and multiplying corner matrices is wrong
  once the corner is truncated.  Seam hopping terms and the merged parity go
  through project_pair below for exactly that reason.
* Per-site a_j^2 is projected from the block's a_j^2, never squared after
  projection, so the two-photon jump operators stay faithful.
* Intermediate blocks are open-boundary; a periodic closure bond activates
  only once a block spans the full extent of its axis.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .fock import FockSpace, annihilation_op, embed_site_op, number_op, parity_op
from .lattice import build_hamiltonian, build_jump_operators
from .liouville import (DensityMatrix, SteadyStateResult, vectorize_lindbladian,
                        steady_state_direct)


@dataclass
class CornerBasis:
    """M kept product states |phi_i>_A (x) |psi_j>_B, sorted by weight."""

    m: int
    idx_a: np.ndarray
    idx_b: np.ndarray
    weights: np.ndarray
    vecs_a: np.ndarray
    vecs_b: np.ndarray
    kept_weight: float


def _eig_descending(rho, parity=None, cluster_tol=1e-12):
    """Eigendecomposition of a density matrix, weights descending.

    If a parity operator is supplied, eigenvectors inside degenerate weight
    clusters are rotated to be parity-definite, so truncation never splits a
    Z2 multiplet into parity-mixed halves.
    """
    p, v = np.linalg.eigh(rho)
    p = p[::-1].copy()
    v = v[:, ::-1].copy()
    p[p < 0] = 0.0
    if parity is not None:
        scale = max(p[0], 1e-300)
        start = 0
        while start < len(p):
            stop = start + 1
            while stop < len(p) and abs(p[stop] - p[start]) <= cluster_tol * scale:
                stop += 1
            if stop - start > 1:
                sub = v[:, start:stop]
                pv = sub.conj().T @ (parity @ sub)
                pv = 0.5 * (pv + pv.conj().T)
                _, w = np.linalg.eigh(pv)
                v[:, start:stop] = sub @ w
            start = stop
    return p, v


def merge_spaces(rho_a, rho_b, m, parity_a=None, parity_b=None, tie_rel=1e-10):
    """Select the m most probable product eigenstates of two solved blocks.

    Ties at the cut are kept whole: if the m-th and (m+1)-th weights agree to
    tie_rel (relative), the corner expands to the end of the degenerate run,
    so symmetry multiplets are never cut in half.  m therefore is a lower
    bound on the returned corner dimension.
    """
    if m < 1:
        raise ValueError("corner dimension must be >= 1")
    mat_a = rho_a.mat if isinstance(rho_a, DensityMatrix) else np.asarray(rho_a)
    mat_b = rho_b.mat if isinstance(rho_b, DensityMatrix) else np.asarray(rho_b)
    p, va = _eig_descending(mat_a, parity_a)
    q, vb = _eig_descending(mat_b, parity_b)
    w = np.outer(p, q).reshape(-1)
    order = np.argsort(-w, kind="stable")
    full = w.size
    m = min(m, full)
    cut = m
    if w[order[m - 1]] > 0:
        wcut = w[order[m - 1]]
        while cut < full and abs(w[order[cut]] - wcut) <= tie_rel * wcut:
            cut += 1
    sel = order[:cut]
    nb = mat_b.shape[0]
    idx_a = sel // nb
    idx_b = sel % nb
    total = w.sum()
    kept = float(w[sel].sum() / total) if total > 0 else 1.0
    return CornerBasis(m=cut, idx_a=idx_a, idx_b=idx_b, weights=w[sel],
                       vecs_a=va, vecs_b=vb, kept_weight=kept)


def project_operator(op, side, basis):
    """Project a one-block operator into the corner.

    side is "A" or "B".  The other block contributes an identity factor, so
    entries survive only where the other block's eigenvector index matches.
    """
    mat = op.mat.toarray() if hasattr(op, "mat") and not isinstance(op, np.ndarray) \
        else np.asarray(op.mat if hasattr(op, "mat") else op)
    if side == "A":
        v, idx, other = basis.vecs_a, basis.idx_a, basis.idx_b
    elif side == "B":
        v, idx, other = basis.vecs_b, basis.idx_b, basis.idx_a
    else:
        raise ValueError("side must be 'A' or 'B'")
    if mat.shape[0] != v.shape[0]:
        raise ValueError("operator dimension %d does not match side %s (%d)"
                         % (mat.shape[0], side, v.shape[0]))
    r = v.conj().T @ (mat @ v)
    out = r[np.ix_(idx, idx)] * (other[:, None] == other[None, :])
    return out


def project_pair(op_a, op_b, basis):
    """Project X_A (x) Y_B entrywise (see module docstring)."""
    ma = np.asarray(op_a.mat if hasattr(op_a, "mat") else op_a)
    mb = np.asarray(op_b.mat if hasattr(op_b, "mat") else op_b)
    if hasattr(ma, "toarray"):
        ma = ma.toarray()
    if hasattr(mb, "toarray"):
        mb = mb.toarray()
    ra = basis.vecs_a.conj().T @ (ma @ basis.vecs_a)
    rb = basis.vecs_b.conj().T @ (mb @ basis.vecs_b)
    return ra[np.ix_(basis.idx_a, basis.idx_a)] * rb[np.ix_(basis.idx_b, basis.idx_b)]


# ---------------------------------------------------------------------------
# merge schedule


@dataclass(frozen=True)
class Region:
    """Axis-aligned patch of the torus: offsets and extents on the site grid."""

    x0: int
    y0: int
    nx: int
    ny: int

    @property
    def n_sites(self):
        return self.nx * self.ny

    def sites(self, geom):
        ly = geom.extents[1] if len(geom.extents) == 2 else 1
        out = []
        for x in range(self.x0, self.x0 + self.nx):
            for y in range(self.y0, self.y0 + self.ny):
                out.append(x * ly + y)
        return out

    def shape_key(self, geom):
        lx, ly = _full_extents(geom)
        return (self.nx, self.ny, self.nx == lx, self.ny == ly)


@dataclass(frozen=True)
class MergeStep:
    region_a: Region
    region_b: Region
    region_out: Region
    m: int


@dataclass
class MergeSchedule:
    steps: list
    leaves: list
    m: int


def _full_extents(geom):
    if len(geom.extents) == 1:
        return geom.extents[0], 1
    return geom.extents


def _split(region):
    """Split the longer axis; on ties split y (so 2x2 -> two 2x1 columns,
    matching growth that doubles x before y: 2x2 -> 4x2 -> 4x4)."""
    if region.nx > region.ny:
        h = region.nx // 2
        a = Region(region.x0, region.y0, region.nx - h, region.ny)
        b = Region(region.x0 + region.nx - h, region.y0, h, region.ny)
    else:
        h = region.ny // 2
        a = Region(region.x0, region.y0, region.nx, region.ny - h)
        b = Region(region.x0, region.y0 + region.ny - h, region.nx, h)
    return a, b


def build_schedule(geom, m, leaf_sites_max=2):
    """Recursive bisection of the full lattice down to exactly solvable leaves."""
    lx, ly = _full_extents(geom)
    steps = []
    leaves = []

    def rec(region):
        if region.n_sites <= leaf_sites_max:
            leaves.append(region)
            return
        a, b = _split(region)
        rec(a)
        rec(b)
        steps.append(MergeStep(a, b, region, m))

    rec(Region(0, 0, lx, ly))
    return MergeSchedule(steps=steps, leaves=leaves, m=m)


def _region_bonds(region, geom):
    """Bonds of the full lattice available inside a region.

    Non-wrap bonds need both endpoints inside.  Wrap (periodic closure) bonds
    additionally require the region to span their axis completely, since
    intermediate corner blocks are open-boundary.
    """
    lx, ly = _full_extents(geom)
    sites = set(region.sites(geom))
    spans_x = region.nx == lx
    spans_y = region.ny == ly
    out = []
    for b in geom.bonds:
        if b.i not in sites or b.j not in sites:
            continue
        if b.wrap:
            xi, yi = divmod(b.i, ly)
            xj, yj = divmod(b.j, ly)
            along_x = yi == yj
            if along_x and not spans_x:
                continue
            if not along_x and not spans_y:
                continue
        out.append(b)
    return out


# ---------------------------------------------------------------------------
# block assembly and solving


@dataclass
class Block:
    region: Region
    sites: list
    dim: int
    h: np.ndarray
    a_ops: list
    a2_ops: list
    n_ops: list
    parity: np.ndarray
    rho: np.ndarray = None
    info: dict = field(default_factory=dict)


def _dense_lindblad_superop(h, jumps):
    """Dense Liouvillian with in-place accumulation (kron temporaries only)."""
    m = h.shape[0]
    eye = np.eye(m, dtype=complex)
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for g in jumps:
        gdg = g.conj().T @ g
        sup += np.kron(g, g.conj())
        sup -= 0.5 * np.kron(gdg, eye)
        sup -= 0.5 * np.kron(eye, gdg.T)
    return sup


def _solve_block_dense(h, jumps, parity=None):
    """Steady state of a dense block via the rank-one trace trick.

    (L + w t t^dag) x = w t with t = vec(I) has the steady state as its
    unique solution when the kernel of L is one dimensional.  The residual is
    checked afterwards; parity-odd numerical noise is projected out.
    """
    m = h.shape[0]
    sup = _dense_lindblad_superop(h, jumps)
    t = np.zeros(m * m, dtype=complex)
    t[:: m + 1] = 1.0
    w = max(np.abs(sup).max(), 1.0)
    A = sup + w * np.outer(t, t.conj())
    x = np.linalg.solve(A, w * t)
    rho = x.reshape(m, m)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= rho.trace().real
    residual = float(np.linalg.norm(sup @ rho.reshape(-1)))
    if parity is not None:
        comm = np.abs(rho @ parity - parity @ rho).max()
        if comm > 1e-10:
            rho = 0.5 * (rho + parity @ rho @ parity)
            rho = 0.5 * (rho + rho.conj().T)
            rho /= rho.trace().real
    return rho, residual


def _build_leaf(region, geom, params, fock):
    """Exact block for a leaf region: operators in its own tensor basis."""
    sites = region.sites(geom)
    n = len(sites)
    local = {s: k for k, s in enumerate(sites)}
    d = fock.dim
    dim = d ** n
    a1 = annihilation_op(fock)
    a_ops = [embed_site_op(a1, k, n).mat.toarray() for k in range(n)]
    nop = number_op(fock)
    n_ops = [embed_site_op(nop, k, n).mat.toarray() for k in range(n)]
    a2_ops = [a @ a for a in a_ops]
    par = parity_op(fock, n).mat.toarray()
    h = np.zeros((dim, dim), dtype=complex)
    g = complex(params.g)
    for k in range(n):
        a = a_ops[k]
        ad = a.conj().T
        h += -params.delta * (ad @ a)
        if params.u:
            h += 0.5 * params.u * (ad @ ad @ a @ a)
        if g:
            h += 0.5 * g * (ad @ ad) + 0.5 * np.conj(g) * (a @ a)
    pre = params.j_hop / (2.0 * geom.dimensionality) if geom.dimensionality else 0.0
    for b in _region_bonds(region, geom):
        hop = a_ops[local[b.i]].conj().T @ a_ops[local[b.j]]
        h += -pre * b.weight * (hop + hop.conj().T)
    return Block(region=region, sites=sites, dim=dim, h=h, a_ops=a_ops,
                 a2_ops=a2_ops, n_ops=n_ops, parity=par, info={"leaf": True})


def _jumps_for(block, params):
    out = [np.sqrt(params.gamma) * a for a in block.a_ops]
    if params.eta > 0:
        out += [np.sqrt(params.eta) * a2 for a2 in block.a2_ops]
    return out


def _solve_block(block, params, geom, exact_tol=1e-10):
    """Solve a block's steady state.

    Corner blocks carry dense projected operators, so they always take the
    dense route.  Leaf blocks above the small-dense threshold go through the
    sparse direct solver instead, which is much faster on tensor-product
    structured Liouvillians.
    """
    t0 = time.time()
    if not block.info.get("leaf") or block.dim * block.dim <= 4096:
        rho, res = _solve_block_dense(block.h, _jumps_for(block, params),
                                      parity=block.parity)
    else:
        import scipy.sparse as sp
        from .fock import SparseOperator
        Hs = SparseOperator(sp.csr_matrix(block.h))
        js = [SparseOperator(sp.csr_matrix(j)) for j in _jumps_for(block, params)]
        liou = vectorize_lindbladian(Hs, js)
        result = steady_state_direct(liou, tol=exact_tol)
        rho, res = result.rho.mat, result.residual
        comm = np.abs(rho @ block.parity - block.parity @ rho).max()
        if comm > 1e-10:
            rho = 0.5 * (rho + block.parity @ rho @ block.parity)
            rho = 0.5 * (rho + rho.conj().T)
            rho /= rho.trace().real
    block.rho = rho
    block.info["residual"] = res
    block.info["wall"] = time.time() - t0
    return block


def _merge_blocks(block_a, block_b, region_out, m, geom, params):
    """Corner-merge two solved blocks into the block for region_out."""
    basis = merge_spaces(block_a.rho, block_b.rho, m,
                         parity_a=block_a.parity, parity_b=block_b.parity)
    dim = basis.m
    eye_a = np.eye(block_a.dim)
    eye_b = np.eye(block_b.dim)
    h = project_pair(block_a.h, eye_b, basis) + project_pair(eye_a, block_b.h, basis)
    seam = [b for b in _region_bonds(region_out, geom)]
    inner = {(b.i, b.j) for b in _region_bonds(block_a.region, geom)}
    inner |= {(b.i, b.j) for b in _region_bonds(block_b.region, geom)}
    set_a = set(block_a.sites)
    local_a = {s: k for k, s in enumerate(block_a.sites)}
    local_b = {s: k for k, s in enumerate(block_b.sites)}
    pre = params.j_hop / (2.0 * geom.dimensionality) if geom.dimensionality else 0.0
    for b in seam:
        if (b.i, b.j) in inner:
            continue
        if b.i in set_a:
            sa, sb = b.i, b.j
        else:
            sa, sb = b.j, b.i
        adag_a = block_a.a_ops[local_a[sa]].conj().T
        a_b = block_b.a_ops[local_b[sb]]
        hop = project_pair(adag_a, a_b, basis)
        h += -pre * b.weight * (hop + hop.conj().T)
    a_ops, a2_ops, n_ops = [], [], []
    sites = block_a.sites + block_b.sites
    for k in range(len(block_a.sites)):
        a_ops.append(project_pair(block_a.a_ops[k], eye_b, basis))
        a2_ops.append(project_pair(block_a.a2_ops[k], eye_b, basis))
        n_ops.append(project_pair(block_a.n_ops[k], eye_b, basis))
    for k in range(len(block_b.sites)):
        a_ops.append(project_pair(eye_a, block_b.a_ops[k], basis))
        a2_ops.append(project_pair(eye_a, block_b.a2_ops[k], basis))
        n_ops.append(project_pair(eye_a, block_b.n_ops[k], basis))
    par = project_pair(block_a.parity, block_b.parity, basis)
    return Block(region=region_out, sites=sites, dim=dim, h=h, a_ops=a_ops,
                 a2_ops=a2_ops, n_ops=n_ops, parity=par,
                 info={"kept_weight": basis.kept_weight, "m": dim,
                       "full_dim": block_a.dim * block_b.dim}), basis


@dataclass
class CornerRun:
    """Final corner steady state plus the projected operators to evaluate it."""

    result: SteadyStateResult
    parity_op: np.ndarray
    n_ops: list
    a_ops: list
    steps: list
    converged: bool = True


def corner_steady_state(geom, params, fock, m, schedule=None, leaf_sites_max=2,
                        discard_bound=0.5):
    """Run the corner method on the full lattice.

    m is the target corner dimension per merge (tie expansion may raise it).
    Identical open blocks (same shape and axis completion) are solved once and
    reused.  discard_bound flags runs where a merge dropped more than that
    much probability weight, which signals a hopeless corner size.
    """
    if schedule is None:
        schedule = build_schedule(geom, m, leaf_sites_max=leaf_sites_max)
    cache = {}
    blocks = {}
    steps_info = []
    flags = []
    t0 = time.time()

    def leaf_block(region):
        key = ("leaf", region.shape_key(geom))
        if key not in cache:
            blk = _build_leaf(region, geom, params, fock)
            _solve_block(blk, params, geom)
            cache[key] = blk
        src = cache[key]
        return Block(region=region, sites=region.sites(geom), dim=src.dim,
                     h=src.h, a_ops=src.a_ops, a2_ops=src.a2_ops,
                     n_ops=src.n_ops, parity=src.parity, rho=src.rho,
                     info=dict(src.info))

    for region in schedule.leaves:
        blocks[region] = leaf_block(region)

    final_block = blocks[schedule.leaves[0]] if not schedule.steps else None
    for step in schedule.steps:
        ba = blocks.pop(step.region_a)
        bb = blocks.pop(step.region_b)
        key = ("merge", step.region_a.shape_key(geom), step.region_b.shape_key(geom),
               step.region_out.shape_key(geom), step.m)
        if key in cache:
            src = cache[key]
            merged = Block(region=step.region_out,
                           sites=step.region_out.sites(geom), dim=src.dim,
                           h=src.h, a_ops=src.a_ops, a2_ops=src.a2_ops,
                           n_ops=src.n_ops, parity=src.parity, rho=src.rho,
                           info=dict(src.info))
        else:
            merged, basis = _merge_blocks(ba, bb, step.region_out, step.m,
                                          geom, params)
            if basis.kept_weight < 1.0 - discard_bound:
                flags.append("CORNER_TOO_SMALL")
            _solve_block(merged, params, geom)
            cache[key] = merged
        steps_info.append({
            "shape": (merged.region.nx, merged.region.ny),
            "m": merged.dim,
            "full_dim": merged.info.get("full_dim"),
            "exact": merged.dim == merged.info.get("full_dim"),
            "kept_weight": merged.info.get("kept_weight", 1.0),
            "residual": merged.info.get("residual"),
            "wall": merged.info.get("wall"),
        })
        blocks[step.region_out] = merged
        final_block = merged

    rho = DensityMatrix(final_block.rho, basis="corner")
    result = SteadyStateResult(
        rho=rho, residual=final_block.info.get("residual", 0.0), method="corner",
        wall_time=time.time() - t0, flags=tuple(flags),
        diagnostics={"steps": steps_info, "m": m})
    return CornerRun(result=result, parity_op=final_block.parity,
                     n_ops=final_block.n_ops, a_ops=final_block.a_ops,
                     steps=steps_info)


def convergence_sweep(geom, params, fock, m_list, tol=1e-3, leaf_sites_max=2):
    """Repeat the corner run over ascending m until parity and entropy settle.

    Returns (run, report).  The first run whose parity and entropy both moved
    less than tol from the previous m is returned with converged=True;
    otherwise the largest-m run comes back flagged UNCONVERGED.
    """
    from .observables import parity_expectation, von_neumann_entropy
    if list(m_list) != sorted(m_list):
        raise ValueError("m_list must be ascending")
    report = []
    prev = None
    last_run = None
    for m in m_list:
        run = corner_steady_state(geom, params, fock, m,
                                  leaf_sites_max=leaf_sites_max)
        pi = parity_expectation(run.result.rho, run.parity_op)
        s = von_neumann_entropy(run.result.rho)
        drift = None
        if prev is not None:
            drift = max(abs(pi - prev[0]), abs(s - prev[1]))
        exact = all(st["exact"] for st in run.steps) if run.steps else True
        report.append({"m": m, "m_used": run.result.rho.dim,
                       "parity": pi, "entropy": s, "drift": drift,
                       "exact": exact})
        last_run = run
        if exact or (drift is not None and drift <= tol):
            run.converged = True
            return run, report
        prev = (pi, s)
    last_run.converged = False
    last_run.result = SteadyStateResult(
        rho=last_run.result.rho, residual=last_run.result.residual,
        method="corner", wall_time=last_run.result.wall_time,
        flags=last_run.result.flags + ("UNCONVERGED",),
        diagnostics=last_run.result.diagnostics)
    return last_run, report
