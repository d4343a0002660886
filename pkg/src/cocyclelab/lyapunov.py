"""Lyapunov spectra, strip accelerations, regularity tests, and the
derivative of the top exponent for uniformly hyperbolic 2x2 cocycles.

Two engines coexist: an orbit estimator (per-step triangular
re-orthonormalization, batched over orbits) that works for any cocycle, and
an exact engine that computes invariant frames by power iteration whenever
the cocycle is dominated, turning exponents into phase-grid quadratures of
analytic functions.  ``acceleration`` prefers the exact engine and falls
back to orbits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Degenerate, NoAffineWindow, NotDominated, NotUH
from .trigmat import CocycleSpec, FunctionFamily, TrigMatrixMap, as_family

__all__ = [
    "LyapunovReport",
    "AccelResult",
    "lyap_spectrum",
    "lyap_spectrum_batch",
    "acceleration",
    "regularity_classify",
    "lyap_derivative",
    "invariant_frame",
    "sum_top_exponents_exact",
    "top_exponent_exact",
    "uh_sections",
    "expm_traceless_2x2",
    "exp_perturbed_family",
]


# ---------------------------------------------------------------------------
# orbit estimator


def _haar_frame(m, dtype, rng):
    """Generic orthogonal/unitary start frame; identity columns can lock onto
    unsorted invariant directions of block-diagonal test cocycles."""
    g = rng.normal(size=(m, m))
    if np.dtype(dtype).kind == "c":
        g = g + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.real(np.einsum("ii->i", r)))


def _orbit_exponent_means(evalf, alpha, y, n_iter, phases0, m, dtype, q0=None):
    """Batched per-step QR accumulation; returns per-orbit exponent means."""
    phases = np.array(phases0, dtype=float)
    batch = phases.shape
    if q0 is None:
        q0 = _haar_frame(m, dtype, np.random.default_rng(1234))
    q = np.broadcast_to(q0.astype(dtype), batch + (m, m)).copy()
    sums = np.zeros(batch + (m,))
    for _ in range(n_iter):
        a = evalf(phases, y)
        q, r = np.linalg.qr(a @ q)
        d = np.abs(np.einsum("...ii->...i", r))
        if not np.all(np.isfinite(d)) or np.any(d <= 0.0):
            raise Degenerate("singular matrix encountered in orbit product")
        sums += np.log(d)
        phases = phases + alpha
    return sums / n_iter


@dataclass
class LyapunovReport:
    """Per-index exponent estimates with across-orbit spread."""

    exponents: np.ndarray
    stderr: np.ndarray
    per_orbit: np.ndarray
    params: dict

    @property
    def cumulative(self) -> np.ndarray:
        """L^k = L_1 + ... + L_k."""
        return np.cumsum(self.exponents)

    def ordered_within(self, factor: float = 2.0) -> bool:
        """L_1 >= L_2 >= ... within `factor` standard errors."""
        tol = factor * (self.stderr[:-1] + self.stderr[1:])
        return bool(np.all(np.diff(self.exponents) <= tol + 1e-12))

    def symplectic_pair_residual(self) -> float:
        """max_k |L_k + L_{2d+1-k}| (meaningful for Sp/HSp cocycles)."""
        return float(np.max(np.abs(self.exponents + self.exponents[::-1])))


def orbit_exponents(fam, alpha: float, y: float = 0.0, n_iter: int = 10_000,
                    n_orbits: int = 8, seed: int = 0) -> LyapunovReport:
    """Orbit-product exponent estimates for any evaluable matrix family."""
    fam = as_family(fam)
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.0, fam.period, size=n_orbits)
    dtype = fam.eval(np.zeros(1), y).dtype
    per_orbit = _orbit_exponent_means(fam.eval, alpha, y, int(n_iter), x0,
                                      fam.dim, dtype)
    expo = per_orbit.mean(axis=0)
    stderr = (per_orbit.std(axis=0, ddof=1) / np.sqrt(n_orbits)
              if n_orbits > 1 else np.zeros_like(expo))
    return LyapunovReport(
        exponents=expo,
        stderr=stderr,
        per_orbit=per_orbit,
        params={"y": y, "n_iter": int(n_iter), "n_orbits": n_orbits, "seed": seed},
    )


def lyap_spectrum(spec: CocycleSpec, y: float = 0.0, n_iter: int = 10_000,
                  n_orbits: int = 8, seed: int = 0) -> LyapunovReport:
    """Full exponent vector from `n_orbits` random-phase orbit products.

    Each step multiplies by A(x + j alpha + iy) and re-orthonormalizes via a
    QR factorization, accumulating the log of the triangular diagonal.
    """
    if n_iter < 1000:
        raise ValueError("n_iter must be at least 10^3")
    return orbit_exponents(spec.map, spec.freq.alpha, y=y, n_iter=n_iter,
                           n_orbits=n_orbits, seed=seed)


def lyap_spectrum_batch(specs, y: float = 0.0, n_iter: int = 10_000,
                        n_orbits: int = 4, seed: int = 0):
    """Orbit exponents for many same-shaped specs in one fused product loop."""
    if n_iter < 1000:
        raise ValueError("n_iter must be at least 10^3")
    maps = [s.map for s in specs]
    m = maps[0].dim
    per = maps[0].period
    alpha = specs[0].freq.alpha
    assert all(mp.dim == m and mp.period == per for mp in maps)
    assert all(abs(s.freq.alpha - alpha) < 1e-15 for s in specs)
    deg = max(mp.degree for mp in maps)
    n_specs = len(specs)
    coeffs = np.zeros((n_specs, 2 * deg + 1, m, m), dtype=complex)
    for i, mp in enumerate(maps):
        coeffs[i, deg - mp.degree : deg + mp.degree + 1] = mp.coeffs
    ks = np.arange(-deg, deg + 1)
    all_real = all(mp.real_valued for mp in maps) and y == 0.0

    def evalf(phases, yy):
        z = phases[..., None] + 1j * yy
        e = np.exp(2j * np.pi * ks * z / per)  # (S, B, K)
        out = np.einsum("sbk,skij->sbij", e, coeffs)
        return out.real if all_real else out

    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.0, per, size=(n_specs, n_orbits))
    dtype = float if all_real else complex
    per_orbit = _orbit_exponent_means(evalf, alpha, y, int(n_iter), x0, m, dtype)
    reports = []
    for i in range(n_specs):
        po = per_orbit[i]
        expo = po.mean(axis=0)
        stderr = (po.std(axis=0, ddof=1) / np.sqrt(n_orbits)
                  if n_orbits > 1 else np.zeros_like(expo))
        reports.append(LyapunovReport(
            exponents=expo, stderr=stderr, per_orbit=po,
            params={"y": y, "n_iter": int(n_iter), "n_orbits": n_orbits,
                    "seed": seed, "batch_index": i},
        ))
    return reports


# ---------------------------------------------------------------------------
# exact engine under domination


def invariant_frame(fam, alpha, phases, k: int, y: float = 0.0,
                    stable: bool = False, tol: float = 1e-11,
                    n_cap: int = 16384, n_start: int = 64):
    """Top (or bottom) k-dimensional invariant frame at the given phases.

    Power iteration on k-frames with doubling horizons; convergence is
    measured by the largest principal angle between successive rounds.
    Returns (frames, info) where frames has shape (P, m, k).
    """
    fam = as_family(fam)
    phases = np.asarray(phases, dtype=float)
    m = fam.dim
    probe = fam.eval(phases[:1], y)
    dtype = probe.dtype
    f0 = np.broadcast_to(np.eye(m, k, dtype=dtype), (len(phases), m, k)).copy()
    # a fixed generic tilt so coordinate frames are never orthogonal to the target
    tilt = np.linspace(0.1, 0.9, m * k).reshape(m, k)
    f0 += 0.05 * tilt.astype(dtype)

    prev = None
    info = {"converged": False, "n_used": 0, "last_dist": np.inf}
    n = n_start
    while n <= n_cap:
        f = f0.copy()
        if stable:
            for j in range(n - 1, -1, -1):
                a = fam.eval(phases + j * alpha, y)
                f, _ = np.linalg.qr(np.linalg.solve(a, f))
        else:
            for j in range(n, 0, -1):
                a = fam.eval(phases - j * alpha, y)
                f, _ = np.linalg.qr(a @ f)
        if prev is not None:
            # residual of the new frame against the previous span; linear in
            # the principal angles, so no sqrt(eps) floor near convergence
            ov = np.conj(np.swapaxes(prev, -1, -2)) @ f
            resid = f - prev @ ov
            dist = float(np.max(np.linalg.norm(resid, axis=(-2, -1))))
            info["last_dist"] = dist
            if dist < tol:
                info["converged"] = True
                info["n_used"] = n
                return f, info
        prev = f
        n *= 2
    info["n_used"] = n // 2
    return prev, info


def sum_top_exponents_exact(fam, alpha, k: int, y: float = 0.0, grid: int = 256,
                            tol: float = 1e-11, n_cap: int = 16384):
    """L^k as the phase average of the volume expansion on the invariant
    top-k bundle; exact up to frame convergence and quadrature, both
    exponentially small under domination.  Raises NotDominated otherwise.
    """
    fam = as_family(fam)
    xs = (np.arange(grid) + 0.5) * fam.period / grid
    f, info = invariant_frame(fam, alpha, xs, k, y=y, tol=tol, n_cap=n_cap)
    if not info["converged"]:
        raise NotDominated("invariant %d-frame did not converge (dist %.2e)"
                           % (k, info["last_dist"]))
    a = fam.eval(xs, y)
    _, r = np.linalg.qr(a @ f)
    growth = np.sum(np.log(np.abs(np.einsum("...ii->...i", r))), axis=-1)
    return float(np.mean(growth)), info


def top_exponent_exact(fam, alpha, y: float = 0.0, grid: int = 256, **kw) -> float:
    """L_1 for a dominated cocycle (k = 1 volume growth)."""
    val, _ = sum_top_exponents_exact(fam, alpha, 1, y=y, grid=grid, **kw)
    return val


def uh_sections(fam, alpha, grid: int = 512, y: float = 0.0, tol: float = 1e-11,
                n_cap: int = 16384):
    """Unstable and stable unit sections of a UH 2x2 cocycle on a midpoint
    phase grid.  Phases of the sections are arbitrary per point; quantities
    downstream must be gauge free."""
    fam = as_family(fam)
    xs = (np.arange(grid) + 0.5) * fam.period / grid
    u, iu = invariant_frame(fam, alpha, xs, 1, y=y, tol=tol, n_cap=n_cap)
    s, istab = invariant_frame(fam, alpha, xs, 1, y=y, stable=True, tol=tol,
                               n_cap=n_cap)
    if not (iu["converged"] and istab["converged"]):
        raise NotUH("no dominated splitting detected at this strip height")
    return xs, u[..., 0], s[..., 0]


# ---------------------------------------------------------------------------
# acceleration and regularity


@dataclass
class AccelResult:
    omega_raw: float
    omega_snapped: int
    residual: float
    nonquantized: bool
    window: list
    r_squared: float
    engine: str
    k: int

    def astuple(self):
        return self.omega_raw, self.omega_snapped, self.residual


def _lk_at_height(spec, k, y, n_iter, n_orbits, seed, engine):
    fam = spec.map
    alpha = spec.freq.alpha
    if engine in ("auto", "exact"):
        try:
            val, _ = sum_top_exponents_exact(fam, alpha, k, y=y, n_cap=4096)
            return val, "exact"
        except NotDominated:
            if engine == "exact":
                raise
    rep = lyap_spectrum(spec, y=y, n_iter=n_iter, n_orbits=n_orbits, seed=seed)
    return float(rep.cumulative[k - 1]), "orbit"


def acceleration(spec, k: int, y_samples=None, h0: float = 0.05,
                 n_halvings: int = 5, n_iter: int = 20_000, n_orbits: int = 4,
                 seed: int = 0, engine: str = "auto", snap_tol: float = 0.05,
                 r2_min: float = 1.0 - 1e-4) -> AccelResult:
    """Slope of y -> L^k(A(. + iy)) over a verified-affine window, in units
    of 2 pi; snapped to the nearest integer with the snap residual reported.

    The window starts at h0 / 2^j, j = 0..n_halvings, and shrinks from the
    top while the regression R^2 stays below ``r2_min``.
    """
    if y_samples is None:
        ys = [h0 / 2**j for j in range(n_halvings + 1)]
    else:
        ys = sorted((float(v) for v in y_samples), key=abs, reverse=True)
        if len(ys) < 3:
            raise ValueError("need at least 3 strip heights")
    used_engine = None
    vals = []
    for y in ys:
        v, eng = _lk_at_height(spec, k, y, n_iter, n_orbits, seed, engine)
        vals.append(v)
        used_engine = eng if used_engine in (None, eng) else "mixed"

    ys_arr = np.array(ys)
    vals_arr = np.array(vals)
    while True:
        slope, intercept = np.polyfit(ys_arr, vals_arr, 1)
        fit = slope * ys_arr + intercept
        ss_res = float(np.sum((vals_arr - fit) ** 2))
        ss_tot = float(np.sum((vals_arr - vals_arr.mean()) ** 2))
        r2 = 1.0 if ss_tot < 1e-24 else 1.0 - ss_res / ss_tot
        if r2 >= r2_min or len(ys_arr) <= 3:
            break
        ys_arr, vals_arr = ys_arr[1:], vals_arr[1:]  # drop the largest height
    if r2 < r2_min:
        raise NoAffineWindow(
            "no affine window found: best R^2 %.6f over %d heights"
            % (r2, len(ys_arr))
        )

    omega_raw = float(slope / (2 * np.pi))
    snapped = int(round(omega_raw))
    residual = abs(omega_raw - snapped)
    return AccelResult(
        omega_raw=omega_raw,
        omega_snapped=snapped,
        residual=residual,
        nonquantized=residual > snap_tol,
        window=[float(v) for v in ys_arr],
        r_squared=float(r2),
        engine=used_engine or "none",
        k=k,
    )


def regularity_classify(spec, k: int, **accel_kw) -> bool:
    """Symplectic groups: regular iff the snapped acceleration vanishes.
    General linear groups: regular iff the one-sided slopes at +y and -y
    agree (two-sided affinity through 0)."""
    if spec.group.symplectic:
        return acceleration(spec, k, **accel_kw).omega_snapped == 0
    plus = acceleration(spec, k, **accel_kw)
    kw = dict(accel_kw)
    ys = kw.pop("y_samples", None)
    if ys is None:
        h0 = kw.get("h0", 0.05)
        n_h = kw.get("n_halvings", 5)
        ys = [h0 / 2**j for j in range(n_h + 1)]
    minus = acceleration(spec, k, y_samples=[-y for y in ys],
                         **{kk: vv for kk, vv in kw.items()
                            if kk not in ("h0", "n_halvings")})
    snap = kw.get("snap_tol", 0.05)
    return abs(plus.omega_raw - minus.omega_raw) <= 2 * snap


# ---------------------------------------------------------------------------
# derivative of the exponent for UH 2x2 cocycles


def expm_traceless_2x2(w):
    """exp of traceless 2x2 matrices, batched: cosh(mu) I + sinh(mu)/mu W
    with mu^2 = -det W."""
    w = np.asarray(w, dtype=complex)
    w1 = w[..., 0, 0]
    musq = w1 * w1 + w[..., 0, 1] * w[..., 1, 0]
    mu = np.sqrt(musq + 0j)
    small = np.abs(mu) < 1e-6
    ch = np.cosh(mu)
    ratio = np.where(small, 1.0 + musq / 6.0, np.sinh(np.where(small, 1.0, mu))
                     / np.where(small, 1.0, mu))
    eye = np.eye(2, dtype=complex)
    return ch[..., None, None] * eye + ratio[..., None, None] * w


def exp_perturbed_family(base: TrigMatrixMap, w: TrigMatrixMap, t: float):
    """The family x -> A(x) exp(t w(x)); evaluation stays exact."""
    def fn(x, y=0.0):
        a = base.eval(x, y, real=False)
        ww = w.eval(x, y, real=False)
        return a @ expm_traceless_2x2(t * ww)

    return FunctionFamily(fn, dim=base.dim, period=max(base.period, w.period))


def lyap_derivative(spec, w: TrigMatrixMap, grid: int = 512,
                    sections=None) -> float:
    """Directional derivative of the top exponent of a UH SL(2) cocycle
    along A -> A e^{t w} at t = 0.

    The integrand couples the traceless entries of w with quadratic
    expressions in the entries of the splitting conjugacy; the computation
    is invariant under rescaling either section, so pointwise sections with
    arbitrary gauge are sufficient.
    """
    fam = spec.map
    alpha = spec.freq.alpha
    if sections is None:
        xs, u, s = uh_sections(fam, alpha, grid=grid)
    else:
        xs, u, s = sections
    wv = w.eval(xs, real=False)
    tr = np.max(np.abs(wv[..., 0, 0] + wv[..., 1, 1]))
    if tr > 1e-10:
        raise ValueError("w must be traceless")

    a, c = u[..., 0], u[..., 1]
    b, d = s[..., 0], s[..., 1]
    det = a * d - b * c
    if np.min(np.abs(det)) < 1e-12:
        raise Degenerate("splitting sections are not transversal on the grid")
    q1 = (a * d + b * c) / det
    q2 = c * d / det
    q3 = -a * b / det
    integrand = q1 * wv[..., 0, 0] + q2 * wv[..., 0, 1] + q3 * wv[..., 1, 0]
    return float(np.mean(np.real(integrand)))
