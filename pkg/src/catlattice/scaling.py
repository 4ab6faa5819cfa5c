"""Finite-size scaling of parity curves.

Rescale sweep data with fixed Ising exponents, locate the crossing point
of the rescaled curves, score the quality of the data collapse, and fit
the entropy-peak power law max(S) ~ N^kappa.

Exponents are inputs, never fit parameters.  The 2D lattice uses the
classical 3D Ising pair and the 1D array the classical 2D Ising pair;
the linear size is L = sqrt(N) in 2D and L = N in 1D.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import LSQUnivariateSpline, PchipInterpolator
from scipy.optimize import brentq

# (beta, nu) presets keyed by lattice dimensionality
EXPONENTS_2D = (0.32642, 0.62997)
EXPONENTS_1D = (0.125, 1.0)


def exponents_for_dimension(dim):
    if dim == 1:
        return EXPONENTS_1D
    if dim == 2:
        return EXPONENTS_2D
    raise ValueError("dimensionality must be 1 or 2, got %r" % (dim,))


def parse_size_label(label):
    """Site count encoded in a size label: '2x3' -> 6, '4' -> 4."""
    s = str(label).strip().lower()
    if "x" in s:
        a, b = s.split("x")
        n = int(a) * int(b)
    else:
        n = int(s)
    if n < 1:
        raise ValueError("size label %r has no sites" % (label,))
    return n


@dataclass(frozen=True)
class ScalingRecord:
    size_label: str
    n_sites: int
    g: float
    parity: float
    entropy: float
    converged: bool = True


class ScalingDataset:
    """Parity/entropy curves per lattice size with an exponent set attached.

    Records flagged unconverged are excluded from every fit unless
    include_unconverged is set.
    """

    def __init__(self, records, dimensionality, beta=None, nu=None,
                 include_unconverged=False):
        if dimensionality not in (1, 2):
            raise ValueError("dimensionality must be 1 or 2")
        if (beta is None) != (nu is None):
            raise ValueError("give both beta and nu or neither")
        if beta is None:
            beta, nu = exponents_for_dimension(dimensionality)
        self.records = list(records)
        self.dimensionality = int(dimensionality)
        self.beta = float(beta)
        self.nu = float(nu)
        self.include_unconverged = bool(include_unconverged)

    @classmethod
    def from_rows(cls, rows, dimensionality, beta=None, nu=None,
                  include_unconverged=False):
        """Build from sweep-store rows (dicts with the CSV column names)."""
        recs = []
        for r in rows:
            label = str(r["size"])
            recs.append(ScalingRecord(
                size_label=label,
                n_sites=parse_size_label(label),
                g=float(r["G_over_gamma"]),
                parity=float(r["parity"]),
                entropy=float(r["entropy"]),
                converged=_as_bool(r.get("converged", True)),
            ))
        return cls(recs, dimensionality, beta, nu, include_unconverged)

    def linear_size(self, n_sites):
        if self.dimensionality == 1:
            return float(n_sites)
        return float(np.sqrt(n_sites))

    def active_records(self):
        if self.include_unconverged:
            return list(self.records)
        return [r for r in self.records if r.converged]

    def curves(self):
        """{size_label: (L, G array, parity array, entropy array)} sorted by L.

        G deduplicated (last record wins, so resumed sweeps override).
        """
        groups = {}
        for r in self.active_records():
            groups.setdefault(r.size_label, {})[r.g] = r
        out = {}
        for label, by_g in groups.items():
            gs = np.array(sorted(by_g))
            par = np.array([by_g[g].parity for g in gs])
            ent = np.array([by_g[g].entropy for g in gs])
            n = by_g[gs[0]].n_sites
            out[label] = (self.linear_size(n), gs, par, ent)
        return dict(sorted(out.items(), key=lambda kv: kv[1][0]))


def _as_bool(v):
    if isinstance(v, str):
        return v.strip().lower() in ("1", "true", "yes")
    return bool(v)


@dataclass
class CollapseResult:
    g_c: float
    uncertainty: float
    residual: float | None
    crossings: list          # (label_a, label_b, g) triples
    master_x: np.ndarray
    master_y: np.ndarray
    beta: float
    nu: float
    dimensionality: int

    def to_dict(self):
        return {
            "g_c": self.g_c,
            "uncertainty": self.uncertainty,
            "residual": self.residual,
            "crossings": [
                {"pair": [a, b], "g": g} for a, b, g in self.crossings
            ],
            "master_curve": {
                "x": [float(v) for v in self.master_x],
                "y": [float(v) for v in self.master_y],
            },
            "exponents": {"beta": self.beta, "nu": self.nu},
            "dimensionality": self.dimensionality,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            g_c=d["g_c"],
            uncertainty=d["uncertainty"],
            residual=d["residual"],
            crossings=[(c["pair"][0], c["pair"][1], c["g"])
                       for c in d["crossings"]],
            master_x=np.asarray(d["master_curve"]["x"], dtype=float),
            master_y=np.asarray(d["master_curve"]["y"], dtype=float),
            beta=d["exponents"]["beta"],
            nu=d["exponents"]["nu"],
            dimensionality=d["dimensionality"],
        )


def rescale(ds, g_c):
    """{label: (x, y, L)} with x = (G - G_c) L^{1/nu}, y = Pi L^{beta/nu}.

    Pure arithmetic, no fitting.
    """
    out = {}
    for label, (L, gs, par, _) in ds.curves().items():
        x = (gs - g_c) * L ** (1.0 / ds.nu)
        y = par * L ** (ds.beta / ds.nu)
        out[label] = (x, y, L)
    return out


def rescale_inverse(x, y, L, g_c, beta, nu):
    """Undo rescale: returns (G, parity)."""
    g = np.asarray(x) * L ** (-1.0 / nu) + g_c
    par = np.asarray(y) * L ** (-beta / nu)
    return g, par


def find_crossing(ds, samples=512):
    """Crossing point of the rescaled parity curves.

    Each size's y(G) = Pi(G) L^{beta/nu} is interpolated with a monotone
    cubic; for every size pair the difference is bracketed on a dense grid
    and refined by brentq.  G_c is the median of the pairwise crossings and
    the uncertainty their interquartile range.  Pairs whose curves never
    cross in the common G window are skipped with a warning; if every pair
    is skipped the search fails.
    """
    curves = ds.curves()
    labels = list(curves)
    if len(labels) < 2:
        raise ValueError("need at least 2 sizes to locate a crossing")
    for label, (L, gs, par, _) in curves.items():
        if len(gs) < 4:
            raise ValueError("size %s has %d G-points; need >= 4"
                             % (label, len(gs)))
    interps = {}
    for label, (L, gs, par, _) in curves.items():
        interps[label] = (PchipInterpolator(gs, par * L ** (ds.beta / ds.nu)),
                          gs[0], gs[-1])

    roots = []
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            la, lb = labels[i], labels[j]
            fa, alo, ahi = interps[la]
            fb, blo, bhi = interps[lb]
            lo, hi = max(alo, blo), min(ahi, bhi)
            if hi <= lo:
                warnings.warn("sizes %s/%s share no G window; pair skipped"
                              % (la, lb))
                continue
            grid = np.linspace(lo, hi, samples)
            diff = fa(grid) - fb(grid)
            if np.max(np.abs(diff)) < 1e-12:
                warnings.warn("sizes %s/%s coincide; no unique crossing"
                              % (la, lb))
                continue
            found = False
            for k in range(len(grid) - 1):
                d0, d1 = diff[k], diff[k + 1]
                if d0 == 0.0:
                    roots.append((la, lb, float(grid[k])))
                    found = True
                elif d0 * d1 < 0:
                    g = brentq(lambda t: fa(t) - fb(t), grid[k], grid[k + 1])
                    roots.append((la, lb, float(g)))
                    found = True
            if diff[-1] == 0.0:
                roots.append((la, lb, float(grid[-1])))
                found = True
            if not found:
                warnings.warn("sizes %s/%s never cross in G window [%g, %g]"
                              % (la, lb, lo, hi))
    if not roots:
        raise RuntimeError("no size pair produced a crossing; "
                           "rescaled curves do not intersect")

    values = np.array([g for _, _, g in roots])
    g_c = float(np.median(values))
    q25, q75 = np.percentile(values, [25, 75])
    unc = float(q75 - q25)

    try:
        residual = collapse_quality(ds, g_c)
    except ValueError:
        residual = None

    tabs = rescale(ds, g_c)
    xs = np.concatenate([t[0] for t in tabs.values()])
    ys = np.concatenate([t[1] for t in tabs.values()])
    order = np.argsort(xs)
    return CollapseResult(
        g_c=g_c, uncertainty=unc, residual=residual, crossings=roots,
        master_x=xs[order], master_y=ys[order],
        beta=ds.beta, nu=ds.nu, dimensionality=ds.dimensionality,
    )


def collapse_quality(ds, g_c, n_interior=8):
    """Mean squared deviation from a pooled master spline over y-variance.

    All rescaled points are pooled and fit by one least-squares cubic
    spline with knots at x-quantiles; the normalized residual is zero for
    a perfect collapse and grows as the curves splay apart.  A single-size
    dataset collapses trivially and scores zero.
    """
    tabs = rescale(ds, g_c)
    if len(tabs) == 1:
        warnings.warn("single-size dataset: collapse residual trivially 0")
        return 0.0
    x = np.concatenate([t[0] for t in tabs.values()])
    y = np.concatenate([t[1] for t in tabs.values()])
    if len(x) < 8:
        raise ValueError("need >= 8 pooled points, have %d" % len(x))
    order = np.argsort(x)
    x, y = x[order], y[order]
    # exact-duplicate x would break the spline; average them
    ux, inv, counts = np.unique(x, return_inverse=True, return_counts=True)
    if len(ux) < len(x):
        uy = np.bincount(inv, weights=y) / counts
        x, y = ux, uy
    var = float(np.var(y))
    if var == 0.0:
        return 0.0
    k = 3
    n_knots = min(n_interior, max(len(x) - k - 1, 0))
    while n_knots >= 0:
        if n_knots == 0:
            coeff = np.polyfit(x, y, min(k, len(x) - 1))
            fit = np.polyval(coeff, x)
            break
        qs = (np.arange(n_knots) + 1.0) / (n_knots + 1.0)
        knots = np.unique(np.quantile(x[1:-1], qs))
        try:
            spl = LSQUnivariateSpline(x, y, knots, k=k)
        except ValueError:
            n_knots -= 1
            continue
        fit = spl(x)
        break
    return float(np.mean((y - fit) ** 2) / var)


@dataclass
class EntropyPeakFit:
    kappa: float
    prefactor: float
    r_squared: float
    peaks: dict = field(default_factory=dict)   # label -> (N, S_max, G_peak)
    underdetermined: bool = False

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "peaks": {lbl: {"n_sites": n, "s_max": s, "g_peak": g}
                      for lbl, (n, s, g) in self.peaks.items()},
            "underdetermined": self.underdetermined,
        }


def _quadratic_peak(gs, ss):
    """Peak height and location by a parabola through the top 3 samples.

    Falls back to the raw maximum at a grid edge or if the local fit is
    not concave.
    """
    k = int(np.argmax(ss))
    if k == 0 or k == len(ss) - 1:
        return float(ss[k]), float(gs[k])
    coeff = np.polyfit(gs[k - 1:k + 2], ss[k - 1:k + 2], 2)
    if coeff[0] >= 0:
        return float(ss[k]), float(gs[k])
    g_peak = -coeff[1] / (2.0 * coeff[0])
    if not (gs[k - 1] <= g_peak <= gs[k + 1]):
        return float(ss[k]), float(gs[k])
    return float(np.polyval(coeff, g_peak)), float(g_peak)


def fit_entropy_peak(ds):
    """Power law max(S) ~ N^kappa from per-size entropy maxima.

    Peaks are located by 3-point quadratic interpolation around the
    largest sample (sweep grids are coarse), then log max(S) is fit
    against log N by least squares.  Two sizes determine the line exactly
    and are flagged under-determined; non-monotone peaks simply lower r².
    """
    curves = ds.curves()
    if len(curves) < 2:
        raise ValueError("need >= 2 sizes for a power-law fit")
    peaks = {}
    for label, (L, gs, _, ent) in curves.items():
        n = parse_size_label(label)
        s_max, g_peak = _quadratic_peak(gs, ent)
        if s_max <= 0:
            raise ValueError("size %s has non-positive entropy peak" % label)
        peaks[label] = (n, s_max, g_peak)
    ns = np.array([p[0] for p in peaks.values()], dtype=float)
    ss = np.array([p[1] for p in peaks.values()])
    coeff, res = np.polyfit(np.log(ns), np.log(ss), 1, full=True)[:2]
    kappa = float(coeff[0])
    prefactor = float(np.exp(coeff[1]))
    logs = np.log(ss)
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    ss_res = float(res[0]) if len(res) else 0.0
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-30 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return EntropyPeakFit(kappa=kappa, prefactor=prefactor, r_squared=r2,
                          peaks=peaks, underdetermined=len(curves) == 2)
