"""Matrix-valued trigonometric polynomials on the circle or its double cover.

Maps are stored as finite Fourier sums A(x) = sum_k C_k e^{2 pi i k x / period},
so strip evaluation at x + iy is exact for the truncation and every analyticity
statement downstream refers to the stored polynomial itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arithmetic import Frequency
from .errors import BadStrip, GridTooCoarse, GroupViolation

__all__ = [
    "TrigMatrixMap",
    "FunctionFamily",
    "CocycleSpec",
    "GroupTag",
    "J_matrix",
    "flip1",
    "double_flip",
    "nilpotent_shear",
    "cyclic_shift",
    "eval_strip",
    "strip_norm",
    "fit_trig",
    "direct_sum",
    "direct_sum_map",
    "averaging_bound_check",
    "group_residual",
    "symmetry_residual",
]

GROUP_TOL = 1e-8
SYMMETRY_ALIASES = {"scrA": "twist_half", "frakA": "twist_unit"}


# ---------------------------------------------------------------------------
# structure matrices


def J_matrix(two_d: int) -> np.ndarray:
    """Standard symplectic form [[0, -I], [I, 0]] on R^{2d} or C^{2d}."""
    if two_d % 2:
        raise ValueError("symplectic form needs even dimension")
    d = two_d // 2
    j = np.zeros((two_d, two_d))
    j[:d, d:] = -np.eye(d)
    j[d:, :d] = np.eye(d)
    return j


def flip1(n: int) -> np.ndarray:
    """diag(-1, 1, ..., 1) of size n."""
    t = np.eye(n)
    t[0, 0] = -1.0
    return t


def double_flip(two_d: int) -> np.ndarray:
    """diag(flip1(d), flip1(d)): the double-cover deck matrix for chi = 2."""
    d = two_d // 2
    out = np.eye(two_d)
    out[0, 0] = -1.0
    out[d, d] = -1.0
    return out


def nilpotent_shear() -> np.ndarray:
    """The 2x2 nilpotent [[0, 1], [0, 0]]."""
    return np.array([[0.0, 1.0], [0.0, 0.0]])


def cyclic_shift(r: int) -> np.ndarray:
    """r x r permutation sending e_k to e_{k+1} (cyclically)."""
    g = np.zeros((r, r))
    for k in range(r):
        g[(k + 1) % r, k] = 1.0
    return g


# ---------------------------------------------------------------------------
# the map type


@dataclass
class TrigMatrixMap:
    """Finite matrix-valued Fourier sum; ``coeffs[j]`` is C_k with k = j - D."""

    coeffs: np.ndarray
    period: int = 1
    fit_residual: float | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[0] % 2 == 0:
            raise ValueError("coeffs must have shape (2D+1, m, m)")
        if self.period not in (1, 2):
            raise ValueError("period must be 1 or 2")
        self.coeffs = c
        self._real_cache = None

    # -- views ---------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def real_valued(self) -> bool:
        if self._real_cache is None:
            d = self.degree
            self._real_cache = bool(
                np.allclose(self.coeffs[: d + 1], np.conj(self.coeffs[d:][::-1]), atol=1e-12)
            )
        return self._real_cache

    # -- construction ----------------------------------------------------------

    @classmethod
    def constant(cls, mat, period: int = 1) -> "TrigMatrixMap":
        mat = np.asarray(mat, dtype=complex)
        return cls(mat[None, :, :].copy(), period=period)

    @classmethod
    def from_coeff_dict(cls, coeffs: dict, dim: int, period: int = 1):
        """Build from {k: matrix}; missing modes are zero."""
        if coeffs:
            deg = max(abs(int(k)) for k in coeffs)
        else:
            deg = 0
        c = np.zeros((2 * deg + 1, dim, dim), dtype=complex)
        for k, mat in coeffs.items():
            c[deg + int(k)] += np.asarray(mat, dtype=complex)
        return cls(c, period=period)

    @classmethod
    def rotation_loop(cls, winding: int) -> "TrigMatrixMap":
        """x -> rotation by 2 pi * winding * x, as an exact degree-|w| map."""
        k = int(winding)
        if k == 0:
            return cls.constant(np.eye(2))
        # R_t = e^{it} P + e^{-it} Q with P, Q the eigenprojections of J_2
        cp = 0.5 * np.array([[1.0, 1j], [-1j, 1.0]])
        cm = 0.5 * np.array([[1.0, -1j], [1j, 1.0]])
        return cls.from_coeff_dict({k: cp, -k: cm}, dim=2)

    # -- evaluation ------------------------------------------------------------

    def eval(self, x, y: float = 0.0, real=None):
        """Evaluate at x + iy; x may be any array of phases.

        If ``real`` is None the result is returned real exactly when the map
        is real valued and y == 0.
        """
        x = np.asarray(x, dtype=float)
        d = self.degree
        ks = np.arange(-d, d + 1)
        z = x[..., None] + 1j * y
        phases = np.exp(2j * np.pi * ks * z / self.period)
        out = np.tensordot(phases, self.coeffs, axes=([-1], [0]))
        if real is None:
            real = y == 0.0 and self.real_valued
        return out.real if real else out

    def __call__(self, x, y: float = 0.0):
        return self.eval(x, y)

    # -- algebra ----------------------------------------------------------------

    def promoted(self, period: int) -> "TrigMatrixMap":
        """Reindex onto a longer period (1 -> 2 doubles every mode index)."""
        if period == self.period:
            return self
        if self.period != 1 or period != 2:
            raise ValueError("only promotion from period 1 to 2 is supported")
        d = self.degree
        c = np.zeros((4 * d + 1, self.dim, self.dim), dtype=complex)
        c[::2] = self.coeffs
        return TrigMatrixMap(c, period=2)

    def __matmul__(self, other: "TrigMatrixMap") -> "TrigMatrixMap":
        """Pointwise matrix product; coefficients convolve, degrees add."""
        p = max(self.period, other.period)
        a, b = self.promoted(p), other.promoted(p)
        da, db = a.degree, b.degree
        c = np.zeros((2 * (da + db) + 1, a.dim, a.dim), dtype=complex)
        for i in range(2 * da + 1):
            c[i : i + 2 * db + 1] += np.einsum("ij,kjl->kil", a.coeffs[i], b.coeffs)
        return TrigMatrixMap(c, period=p)

    def __add__(self, other: "TrigMatrixMap") -> "TrigMatrixMap":
        p = max(self.period, other.period)
        a, b = self.promoted(p), other.promoted(p)
        d = max(a.degree, b.degree)
        c = np.zeros((2 * d + 1, a.dim, a.dim), dtype=complex)
        c[d - a.degree : d + a.degree + 1] += a.coeffs
        c[d - b.degree : d + b.degree + 1] += b.coeffs
        return TrigMatrixMap(c, period=p)

    def __rmul__(self, scalar) -> "TrigMatrixMap":
        return TrigMatrixMap(complex(scalar) * self.coeffs, period=self.period)

    def shifted(self, delta: float) -> "TrigMatrixMap":
        """The map x -> A(x + delta)."""
        d = self.degree
        ks = np.arange(-d, d + 1)
        ph = np.exp(2j * np.pi * ks * delta / self.period)
        return TrigMatrixMap(ph[:, None, None] * self.coeffs, period=self.period)

    def transposed(self) -> "TrigMatrixMap":
        return TrigMatrixMap(
            np.swapaxes(self.coeffs, 1, 2).copy(), period=self.period
        )

    def trimmed(self, tol: float = 0.0) -> "TrigMatrixMap":
        """Drop leading/trailing modes whose max-abs entry is <= tol."""
        d = self.degree
        mags = np.max(np.abs(self.coeffs), axis=(1, 2))
        keep = d
        while keep > 0 and mags[d - keep] <= tol and mags[d + keep] <= tol:
            keep -= 1
        c = self.coeffs[d - keep : d + keep + 1].copy()
        return TrigMatrixMap(c, period=self.period, fit_residual=self.fit_residual)

    def reduced(self, tol: float = 1e-11) -> "TrigMatrixMap":
        """Collapse a period-2 map that is genuinely 1-periodic (odd modes
        below tol) back to period 1; otherwise return self unchanged."""
        if self.period != 2:
            return self
        d = self.degree
        mags = np.max(np.abs(self.coeffs), axis=(1, 2))
        odd = [j for j in range(2 * d + 1) if (j - d) % 2]
        if odd and max(mags[j] for j in odd) > tol:
            return self
        c = self.coeffs[d % 2 :: 2]
        return TrigMatrixMap(c.copy(), period=1)


@dataclass
class FunctionFamily:
    """Adapter giving arbitrary callables the same eval surface as a trig map."""

    fn: object
    dim: int
    period: int = 1

    def eval(self, x, y: float = 0.0, real=None):
        return self.fn(np.asarray(x, dtype=float), y)

    def __call__(self, x, y: float = 0.0):
        return self.eval(x, y)


def as_family(obj):
    if isinstance(obj, (TrigMatrixMap, FunctionFamily)):
        return obj
    if isinstance(obj, np.ndarray):
        return TrigMatrixMap.constant(obj)
    raise TypeError("expected a TrigMatrixMap, FunctionFamily, or constant matrix")


# ---------------------------------------------------------------------------
# spec-level operations


def eval_strip(tmap: TrigMatrixMap, x: float, y: float) -> np.ndarray:
    """Exact evaluation of the stored polynomial at x + iy."""
    return tmap.eval(np.asarray(x, dtype=float), y, real=False)


def strip_norm(tmap: TrigMatrixMap, h: float) -> float:
    """Coefficient-sum upper bound sum_k ||C_k|| e^{2 pi |k| h / period}.

    Dominates the sup of ||A|| on the closed strip of half-width h.
    """
    if h < 0:
        raise ValueError("strip half-width must be nonnegative")
    d = tmap.degree
    ks = np.abs(np.arange(-d, d + 1))
    opnorms = np.array([np.linalg.norm(c, 2) for c in tmap.coeffs])
    return float(np.sum(opnorms * np.exp(2 * np.pi * ks * h / tmap.period)))


def fit_trig(samples, period: int = 1, tail_tol: float = 0.0, degree=None):
    """Discrete Fourier fit of uniform samples A(j * period / G), j = 0..G-1.

    Grid size must be a power of two and at least 4x the requested degree.
    Coefficients with max-abs entry below ``tail_tol`` are dropped; the
    reconstruction residual on the grid is stored on the returned map.
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 3 or samples.shape[1] != samples.shape[2]:
        raise ValueError("samples must have shape (G, m, m)")
    g = samples.shape[0]
    if g < 4 or (g & (g - 1)) != 0:
        raise GridTooCoarse("grid size %d is not a power of two >= 4" % g)
    if degree is None:
        degree = g // 4
    if g < 4 * degree:
        raise GridTooCoarse("grid size %d < 4 * degree %d" % (g, degree))

    hat = np.fft.fft(samples, axis=0) / g
    m = samples.shape[1]
    c = np.zeros((2 * degree + 1, m, m), dtype=complex)
    c[degree] = hat[0]
    for k in range(1, degree + 1):
        c[degree + k] = hat[k]
        c[degree - k] = hat[g - k]
    mags = np.max(np.abs(c), axis=(1, 2))
    c[mags <= tail_tol] = 0.0

    out = TrigMatrixMap(c, period=period)
    xs = np.arange(g) * period / g
    recon = out.eval(xs, real=False)
    out.fit_residual = float(np.max(np.abs(recon - samples)))
    return out.trimmed(0.0) if tail_tol > 0 else out


def direct_sum(s1, s2, check_group: bool = True) -> np.ndarray:
    """Interleaved embedding Sp(2n1) x Sp(2n2) -> Sp(2n1 + 2n2).

    Works on single matrices or batched arrays (..., 2n, 2n); also valid for
    the Hermitian-symplectic groups.
    """
    s1, s2 = np.asarray(s1), np.asarray(s2)
    n1, n2 = s1.shape[-1] // 2, s2.shape[-1] // 2
    if s1.shape[-1] % 2 or s2.shape[-1] % 2:
        raise ValueError("direct_sum needs even-dimensional blocks")
    if check_group:
        for s, n in ((s1, n1), (s2, n2)):
            flat = s.reshape(-1, 2 * n, 2 * n)
            j = J_matrix(2 * n)
            res = np.max(np.abs(np.conj(np.swapaxes(flat, -1, -2)) @ j @ flat - j))
            if res > GROUP_TOL:
                raise GroupViolation("direct_sum input residual %.3e" % res)
    n = n1 + n2
    batch = np.broadcast_shapes(s1.shape[:-2], s2.shape[:-2])
    out = np.zeros(batch + (2 * n, 2 * n), dtype=np.result_type(s1, s2))
    i1 = list(range(n1)) + list(range(n, n + n1))
    i2 = list(range(n1, n)) + list(range(n + n1, 2 * n))
    out[..., np.ix_(i1, i1)[0], np.ix_(i1, i1)[1]] = s1
    out[..., np.ix_(i2, i2)[0], np.ix_(i2, i2)[1]] = s2
    return out


def diamond_indices(n1: int, n2: int):
    """Index sets (first factor, second factor) of the interleaved embedding."""
    n = n1 + n2
    i1 = list(range(n1)) + list(range(n, n + n1))
    i2 = list(range(n1, n)) + list(range(n + n1, 2 * n))
    return i1, i2


def direct_sum_map(m1: TrigMatrixMap, m2: TrigMatrixMap) -> TrigMatrixMap:
    """Coefficientwise interleaved embedding of two trig maps."""
    p = max(m1.period, m2.period)
    a, b = m1.promoted(p), m2.promoted(p)
    d = max(a.degree, b.degree)
    n1, n2 = a.dim // 2, b.dim // 2
    n = n1 + n2
    c = np.zeros((2 * d + 1, 2 * n, 2 * n), dtype=complex)
    i1, i2 = diamond_indices(n1, n2)
    ca = np.zeros((2 * d + 1, a.dim, a.dim), dtype=complex)
    cb = np.zeros((2 * d + 1, b.dim, b.dim), dtype=complex)
    ca[d - a.degree : d + a.degree + 1] = a.coeffs
    cb[d - b.degree : d + b.degree + 1] = b.coeffs
    c[:, np.ix_(i1, i1)[0], np.ix_(i1, i1)[1]] = ca
    c[:, np.ix_(i2, i2)[0], np.ix_(i2, i2)[1]] = cb
    return TrigMatrixMap(c, period=p)


def averaging_bound_check(phi, freq, h, h_prime, c, q_next, delta_n) -> dict:
    """Compare ||phi - mean|| on the inner strip with the small-divisor shape.

    The bound shape is (1/(h-h')) * exp(-c * q_next * delta_n); the implicit
    constant is unknown, so only the pair and their ratio are reported.
    """
    if h_prime >= h:
        raise BadStrip("need h' < h (got h'=%g, h=%g)" % (h_prime, h))
    if not isinstance(phi, TrigMatrixMap):
        raise TypeError("phi must be a (scalar) TrigMatrixMap")
    d = phi.degree
    centered = TrigMatrixMap(phi.coeffs.copy(), period=phi.period)
    centered.coeffs[d] = 0.0
    lhs = strip_norm(centered, h_prime)
    bound = np.exp(-c * q_next * delta_n) / (h - h_prime)
    return {
        "lhs": float(lhs),
        "bound_shape": float(bound),
        "ratio": float(lhs / bound) if bound > 0 else float("inf"),
        "q_next": int(q_next),
        "delta_n": float(delta_n),
    }


# ---------------------------------------------------------------------------
# groups, symmetry classes, cocycle specs


@dataclass(frozen=True)
class GroupTag:
    family: str  # SL | GL | Sp | HSp
    dim: int
    field: str  # R | C

    @classmethod
    def parse(cls, token: str) -> "GroupTag":
        token = token.strip()
        if token == "SL2R":
            return cls("SL", 2, "R")
        if token == "SL2C":
            return cls("SL", 2, "C")
        if token.startswith("HSp"):
            return cls("HSp", int(token[3:]), "C")
        if token.startswith("Sp") and token.endswith("R"):
            return cls("Sp", int(token[2:-1]), "R")
        if token.startswith("GL") and token.endswith("C"):
            return cls("GL", int(token[2:-1]), "C")
        raise ValueError("unknown group token %r" % token)

    def __str__(self) -> str:
        if self.family == "SL":
            return "SL2" + self.field
        if self.family == "Sp":
            return "Sp%dR" % self.dim
        if self.family == "HSp":
            return "HSp%d" % self.dim
        return "GL%dC" % self.dim

    @property
    def symplectic(self) -> bool:
        return self.family in ("Sp", "HSp") or (
            self.family == "SL" and self.field == "R"
        )


def group_residual(tmap, group: GroupTag, grid: int = 1024) -> float:
    """Sup over a phase grid of the defining-relation residual."""
    fam = as_family(tmap)
    xs = np.arange(grid) * fam.period / grid
    a = fam.eval(xs, real=False)
    if group.family in ("SL", "GL"):
        dets = np.linalg.det(a)
        if group.family == "GL":
            smin = np.min(np.abs(np.linalg.svd(a, compute_uv=False)))
            return 0.0 if smin > 1e-10 else float("inf")
        return float(np.max(np.abs(dets - 1.0)))
    j = J_matrix(group.dim)
    if group.family == "Sp":
        rel = np.swapaxes(a, -1, -2) @ j @ a - j
    else:  # HSp
        rel = np.conj(np.swapaxes(a, -1, -2)) @ j @ a - j
    return float(np.max(np.linalg.norm(rel, axis=(-2, -1))))


def symmetry_residual(tmap, symmetry: str, grid: int = 1024) -> float:
    """Distance of the map from its declared conjugation-twist class."""
    symmetry = SYMMETRY_ALIASES.get(symmetry, symmetry)
    fam = as_family(tmap)
    if symmetry == "none":
        return 0.0
    t = flip1(fam.dim)
    xs = np.arange(grid) * fam.period / grid
    if symmetry == "twist_half":
        if fam.period != 1:
            raise ValueError("twist_half symmetry lives on period-1 maps")
        lhs = fam.eval(xs + 0.5, real=False)
    elif symmetry == "twist_unit":
        if fam.period != 2:
            raise ValueError("twist_unit symmetry lives on period-2 maps")
        lhs = fam.eval(xs + 1.0, real=False)
    else:
        raise ValueError("unknown symmetry %r" % symmetry)
    rhs = np.linalg.inv(t) @ fam.eval(xs, real=False) @ t
    return float(np.max(np.linalg.norm(lhs - rhs, axis=(-2, -1))))


@dataclass
class CocycleSpec:
    """A frequency, a matrix map, and a verified structure-group tag."""

    freq: Frequency
    map: TrigMatrixMap
    group: GroupTag
    symmetry: str = "none"
    group_tol: float = GROUP_TOL

    def __post_init__(self):
        if isinstance(self.group, str):
            self.group = GroupTag.parse(self.group)
        self.symmetry = SYMMETRY_ALIASES.get(self.symmetry, self.symmetry)
        if self.map.dim != self.group.dim:
            raise GroupViolation(
                "map dimension %d != group dimension %d"
                % (self.map.dim, self.group.dim)
            )
        res = group_residual(self.map, self.group)
        if res > self.group_tol:
            raise GroupViolation(
                "group residual %.3e exceeds %.1e" % (res, self.group_tol)
            )
        if self.symmetry != "none":
            sres = symmetry_residual(self.map, self.symmetry)
            if sres > self.group_tol:
                raise GroupViolation(
                    "symmetry residual %.3e exceeds %.1e" % (sres, self.group_tol)
                )

    @property
    def alpha(self) -> float:
        return self.freq.alpha

    @property
    def dim(self) -> int:
        return self.map.dim

    def residuals(self) -> dict:
        out = {"group": group_residual(self.map, self.group)}
        if self.symmetry != "none":
            out["symmetry"] = symmetry_residual(self.map, self.symmetry)
        return out

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        d = self.map.degree
        four = []
        for j, mat in enumerate(self.map.coeffs):
            if np.max(np.abs(mat)) == 0.0 and j != d:
                continue
            four.append(
                {
                    "k": j - d,
                    "re": np.real(mat).tolist(),
                    "im": np.imag(mat).tolist(),
                }
            )
        return {
            "alpha": self.freq.to_json(),
            "group": str(self.group),
            "dim": self.dim,
            "period": self.map.period,
            "fourier": four,
            "symmetry": self.symmetry,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CocycleSpec":
        freq = Frequency.from_json(obj["alpha"])
        dim = int(obj["dim"])
        coeffs = {}
        for item in obj["fourier"]:
            mat = np.asarray(item["re"], dtype=float) + 1j * np.asarray(
                item["im"], dtype=float
            )
            coeffs[int(item["k"])] = mat
        tmap = TrigMatrixMap.from_coeff_dict(
            coeffs, dim=dim, period=int(obj.get("period", 1))
        )
        return cls(
            freq=freq,
            map=tmap,
            group=GroupTag.parse(obj["group"]),
            symmetry=obj.get("symmetry", "none"),
        )
