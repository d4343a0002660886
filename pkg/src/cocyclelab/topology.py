"""Fibered rotation numbers, topological degree, bundle monodromy signs,
and the diagnostics attached to the half-period flip-conjugation class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlignmentLost, NonzeroDegree, SingularOnGrid
from .trigmat import CocycleSpec, as_family, flip1, symmetry_residual

__all__ = [
    "RotationResult",
    "rotation_number",
    "degree",
    "monodromy_sign",
    "symmetry_diagnostics",
]


def _principal_turns(delta):
    """Wrap angle differences (in turns) to (-1/2, 1/2]."""
    return -((-delta + 0.5) % 1.0 - 0.5)


@dataclass
class RotationResult:
    value: float
    spread: float
    per_start: np.ndarray
    n_iter: int
    n_starts: int
    branch_warnings: int

    def __float__(self):
        return self.value


def rotation_number(spec: CocycleSpec, n_iter: int = 100_000, n_starts: int = 4,
                    seed: int = 0, _skip_degree_check: bool = False) -> RotationResult:
    """Mean angular increment of the projective lift, averaged over starts.

    Requires a degree-zero (homotopic to identity) SL(2,R) cocycle.  The
    per-step increment uses the principal branch on the direction circle;
    steps landing near the half-turn cut are counted in branch_warnings.
    """
    if spec.group.field != "R" or spec.dim != 2:
        raise ValueError("rotation numbers are defined for SL(2,R) cocycles")
    if not _skip_degree_check and degree(spec.map) != 0:
        raise NonzeroDegree("cocycle has nonzero topological degree")

    fam = spec.map
    alpha = spec.freq.alpha
    per = fam.period
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.0, per, size=n_starts)
    t0 = rng.uniform(0.0, 1.0, size=n_starts)

    chunk = int(np.clip(np.sqrt(n_iter), 64, 4096))
    n_chunks = int(np.ceil(n_iter / chunk))
    total = n_chunks * chunk

    # chunk-start phases and a first pass computing chunk transfer products
    starts = x0[:, None] + (np.arange(n_chunks) * chunk) * alpha  # (S, C)
    prod = np.broadcast_to(np.eye(2), (n_starts, n_chunks, 2, 2)).copy()
    for j in range(chunk):
        a = fam.eval(starts + j * alpha)
        prod = a @ prod
        nrm = np.linalg.norm(prod, axis=(-2, -1), keepdims=True)
        prod /= nrm

    # chunk-boundary directions
    v = np.empty((n_starts, n_chunks, 2))
    v[:, 0, 0] = np.cos(2 * np.pi * t0)
    v[:, 0, 1] = np.sin(2 * np.pi * t0)
    for c in range(n_chunks - 1):
        w = prod[:, c] @ v[:, c, :, None]
        v[:, c + 1] = w[..., 0] / np.linalg.norm(w[..., 0], axis=-1, keepdims=True)

    # second pass: accumulate principal-branch angle increments
    angles = np.arctan2(v[..., 1], v[..., 0]) / (2 * np.pi)
    cur = v.copy()
    acc = np.zeros((n_starts, n_chunks))
    warn = 0
    prev_angle = angles
    for j in range(chunk):
        a = fam.eval(starts + j * alpha)
        w = (a @ cur[..., None])[..., 0]
        cur = w / np.linalg.norm(w, axis=-1, keepdims=True)
        ang = np.arctan2(cur[..., 1], cur[..., 0]) / (2 * np.pi)
        d = _principal_turns(ang - prev_angle)
        warn += int(np.sum(np.abs(d) > 0.45))
        acc += d
        prev_angle = ang

    per_start = np.sum(acc, axis=1) / total  # mean increment, turns/iterate
    frac = per_start % 1.0
    # circular mean and spread
    z = np.exp(2j * np.pi * frac)
    value = float((np.angle(np.mean(z)) / (2 * np.pi)) % 1.0)
    spread = float(np.max(np.abs(_principal_turns(frac - frac[:, None]))))
    return RotationResult(
        value=value,
        spread=spread,
        per_start=frac,
        n_iter=total,
        n_starts=n_starts,
        branch_warnings=warn,
    )


def degree(tmap, grid: int = 4096, max_refine: int = 4) -> int:
    """Winding number of the polar-rotation part over one full period.

    The rotation angle of the polar factor of [[a, b], [c, d]] is
    atan2(c - b, a + d); unwrapping uses nearest-branch continuation and the
    grid refines (x2) until every step moves less than a quarter turn.
    """
    fam = as_family(tmap)
    if fam.dim != 2:
        raise ValueError("degree is defined for 2x2 maps")
    g = grid
    for _ in range(max_refine + 1):
        xs = np.arange(g) * fam.period / g
        a = fam.eval(xs, real=False)
        if np.min(np.abs(np.linalg.det(a))) < 1e-9:
            raise SingularOnGrid("map is singular on the evaluation grid")
        if np.max(np.abs(a.imag)) > 1e-9:
            raise ValueError("degree is defined for real 2x2 maps")
        a = a.real
        theta = np.arctan2(a[:, 1, 0] - a[:, 0, 1], a[:, 0, 0] + a[:, 1, 1])
        turns = theta / (2 * np.pi)
        d = _principal_turns(np.diff(np.append(turns, turns[0])))
        if np.max(np.abs(d)) <= 0.25:
            total = float(np.sum(d))
            k = int(round(total))
            if abs(total - k) > 0.01:
                raise AlignmentLost(
                    "winding %.4f is not close to an integer" % total
                )
            return k
        g *= 2
    raise AlignmentLost("angle steps exceed a quarter turn at max refinement")


def monodromy_sign(frames, overlap_min: float = 0.9) -> int:
    """Sign of transporting the wedge line of a real frame family around the
    period: +1 for periodic, -1 for antiperiodic bundles.

    Accepts a FrameGrid or a raw (G, m, k) array of column frames on a grid
    covering one period.  Gauge-independent: each frame enters two adjacent
    overlap determinants, so per-point orthogonal gauges cancel.
    """
    f = getattr(frames, "frames", frames)
    f = np.asarray(f)
    if np.iscomplexobj(f) and np.max(np.abs(f.imag)) > 1e-9:
        raise ValueError("monodromy sign is defined for real bundles")
    f = f.real
    g = f.shape[0]
    negatives = 0
    for j in range(g):
        s = float(np.linalg.det(f[j].T @ f[(j + 1) % g]))
        if abs(s) < overlap_min:
            raise AlignmentLost(
                "wedge overlap %.3f below %.2f at step %d" % (abs(s), overlap_min, j)
            )
        if s < 0:
            negatives += 1
    return -1 if negatives % 2 else 1


def symmetry_diagnostics(spec: CocycleSpec, n_iter: int = 100_000,
                         n_starts: int = 4, seed: int = 0) -> dict:
    """Bundle of the three class checks for SL(2,R) cocycles: doubled
    rotation number near an integer, vanishing degree, and the residual of
    the half-period flip-conjugation relation."""
    if spec.group.field != "R" or spec.dim != 2:
        raise ValueError("diagnostics are defined for SL(2,R) cocycles")
    deg = degree(spec.map)
    out = {
        "degree": deg,
        "class_residual": symmetry_residual(spec.map, "twist_half"),
    }
    if deg == 0:
        rho = rotation_number(spec, n_iter=n_iter, n_starts=n_starts, seed=seed,
                              _skip_degree_check=True)
        two_rho = 2.0 * rho.value
        out["rho"] = rho.value
        out["rho_spread"] = rho.spread
        out["two_rho_int_residual"] = abs(two_rho - round(two_rho))
    else:
        out["rho"] = None
        out["two_rho_int_residual"] = None
    return out
