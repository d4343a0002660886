"""Generators for exact-group trig-polynomial cocycles, loops, and specs.

Loops are built as products of elementary factors (triangular shears,
plane rotations, constant group elements), so group membership is exact to
rounding and every loop carries an exact polynomial inverse.  Probe modules
and tests both draw their instances from here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arithmetic import Frequency
from .trigmat import (
    CocycleSpec,
    GroupTag,
    TrigMatrixMap,
    direct_sum_map,
    fit_trig,
)

__all__ = [
    "LoopPair",
    "random_scalar_trig",
    "shear_loop",
    "unitary_phase_loop",
    "constant_loop",
    "half_rotation_factor",
    "random_sl2_loop",
    "random_sp_loop",
    "random_hsp_loop",
    "random_twist_half_loop",
    "random_twist_unit_loop",
    "hyperbolic_constant",
    "random_sl2r_spec",
    "random_sp4_spec",
    "conjugated_spec",
    "diag_exp_cos_spec",
]


@dataclass
class LoopPair:
    """A loop together with its exact polynomial inverse."""

    fwd: TrigMatrixMap
    inv: TrigMatrixMap

    def __matmul__(self, other: "LoopPair") -> "LoopPair":
        return LoopPair(self.fwd @ other.fwd, other.inv @ self.inv)

    @property
    def dim(self) -> int:
        return self.fwd.dim

    @property
    def period(self) -> int:
        return self.fwd.period

    def diamond(self, other: "LoopPair") -> "LoopPair":
        return LoopPair(
            direct_sum_map(self.fwd, other.fwd),
            direct_sum_map(self.inv, other.inv),
        )


def random_scalar_trig(rng, degree, amp, period=1, parity=None) -> TrigMatrixMap:
    """Random real scalar trig polynomial as a 1x1 map.

    parity='odd' keeps only odd mode indices (antiperiodic under a half-period
    shift on period 1, or a unit shift on period 2); 'even' keeps even ones.
    """
    coeffs = {}
    for k in range(0, degree + 1):
        if parity == "odd" and k % 2 == 0:
            continue
        if parity == "even" and k % 2 == 1:
            continue
        if k == 0:
            coeffs[0] = np.array([[rng.uniform(-amp, amp)]])
        else:
            c = rng.uniform(-amp, amp) + 1j * rng.uniform(-amp, amp)
            coeffs[k] = np.array([[c / 2]])
            coeffs[-k] = np.array([[np.conj(c) / 2]])
    if not coeffs:
        coeffs[0] = np.array([[0.0]])
    return TrigMatrixMap.from_coeff_dict(coeffs, dim=1, period=period)


def _block_from_scalars(entries, n, period):
    """Assemble an n x n map from a dict {(i,j): scalar map}."""
    deg = max(m.degree for m in entries.values())
    per = period
    c = np.zeros((2 * deg + 1, n, n), dtype=complex)
    for (i, j), m in entries.items():
        d = m.degree
        c[deg - d : deg + d + 1, i, j] += m.coeffs[:, 0, 0]
    return TrigMatrixMap(c, period=per)


def random_symmetric_trig(rng, n, degree, amp, period=1, hermitian=False, parity=None):
    """Random symmetric (or Hermitian-valued) n x n trig polynomial."""
    deg = degree
    c = np.zeros((2 * deg + 1, n, n), dtype=complex)
    for k in range(0, deg + 1):
        if parity == "odd" and k % 2 == 0:
            continue
        b = rng.uniform(-amp, amp, size=(n, n)) + (
            1j * rng.uniform(-amp, amp, size=(n, n)) if (hermitian or k > 0) else 0.0
        )
        if hermitian:
            # B(x) Hermitian for real x: B_{-k} = B_k^*
            if k == 0:
                b = (b + b.conj().T) / 2
                c[deg] += b
            else:
                c[deg + k] += b / 2
                c[deg - k] += b.conj().T / 2
        else:
            # B(x) real symmetric: B_k symmetric, B_{-k} = conj(B_k)
            b = (b + b.T) / 2
            if k == 0:
                c[deg] += b.real
            else:
                c[deg + k] += b / 2
                c[deg - k] += np.conj(b) / 2
    return TrigMatrixMap(c, period=period)


def shear_loop(b_map: TrigMatrixMap, upper=True) -> LoopPair:
    """[[I, B], [0, I]] (or its lower transpose); exact in Sp/HSp when B is
    symmetric/Hermitian-valued.  For 2x2 loops pass a 1x1 scalar map."""
    n = b_map.dim
    d = b_map.degree
    c = np.zeros((2 * d + 1, 2 * n, 2 * n), dtype=complex)
    c[d] = np.eye(2 * n)
    ci = c.copy()
    if upper:
        c[:, :n, n:] += b_map.coeffs
        ci[:, :n, n:] -= b_map.coeffs
    else:
        c[:, n:, :n] += b_map.coeffs
        ci[:, n:, :n] -= b_map.coeffs
    return LoopPair(
        TrigMatrixMap(c, period=b_map.period), TrigMatrixMap(ci, period=b_map.period)
    )


def constant_loop(mat) -> LoopPair:
    mat = np.asarray(mat, dtype=complex)
    return LoopPair(TrigMatrixMap.constant(mat), TrigMatrixMap.constant(np.linalg.inv(mat)))


def rotation_factor(winding: int) -> LoopPair:
    """SL(2,R) loop x -> R_{2 pi * winding * x}."""
    return LoopPair(
        TrigMatrixMap.rotation_loop(winding), TrigMatrixMap.rotation_loop(-winding)
    )


def half_rotation_factor() -> LoopPair:
    """Period-2 loop x -> R_{pi x}; satisfies W(x+1) = W(x) * (-I)."""
    cp = 0.5 * np.array([[1.0, 1j], [-1j, 1.0]])
    cm = 0.5 * np.array([[1.0, -1j], [1j, 1.0]])
    fwd = TrigMatrixMap.from_coeff_dict({1: cp, -1: cm}, dim=2, period=2)
    inv = TrigMatrixMap.from_coeff_dict({1: cm, -1: cp}, dim=2, period=2)
    return LoopPair(fwd, inv)


def unitary_phase_loop(windings, period=1) -> LoopPair:
    """diag(e^{2 pi i k_j x}) as an exact unitary loop."""
    n = len(windings)
    deg = max(1, max(abs(int(k)) for k in windings))
    c = np.zeros((2 * deg + 1, n, n), dtype=complex)
    ci = np.zeros_like(c)
    for j, k in enumerate(windings):
        c[deg + int(k), j, j] = 1.0
        ci[deg - int(k), j, j] = 1.0
    return LoopPair(TrigMatrixMap(c, period=period), TrigMatrixMap(ci, period=period))


def _product(factors) -> LoopPair:
    out = factors[0]
    for f in factors[1:]:
        out = out @ f
    return out


def random_sl2_loop(rng, degree=2, amp=0.3, n_factors=2, period=1) -> LoopPair:
    """Near-identity SL(2,R) loop: alternating upper/lower scalar shears."""
    factors = []
    for i in range(n_factors):
        u = random_scalar_trig(rng, degree, amp, period=period)
        factors.append(shear_loop(u, upper=(i % 2 == 0)))
    return _product(factors)


def random_sp_loop(rng, two_d, degree=1, amp=0.2, n_factors=2, twisted=False) -> LoopPair:
    """Near-identity Sp(2d, R) loop from symmetric shears.

    twisted=True right-multiplies by the half-turn rotation in the first
    conjugate plane, producing S(x+1) = S(x) * double_flip (a period-2 loop).
    """
    n = two_d // 2
    factors = []
    for i in range(n_factors):
        b = random_symmetric_trig(rng, n, degree, amp)
        factors.append(shear_loop(b, upper=(i % 2 == 0)))
    loop = _product(factors)
    if twisted:
        half = half_rotation_factor()
        if n > 1:
            half = half.diamond(constant_loop(np.eye(2 * (n - 1))))
        loop = LoopPair(loop.fwd.promoted(2), loop.inv.promoted(2)) @ half
    return loop


def random_hsp_loop(rng, two_d, degree=1, amp=0.2, n_factors=2, phases=None) -> LoopPair:
    """Near-identity HSp(2d) loop: Hermitian shears and unitary phase blocks."""
    n = two_d // 2
    factors = []
    for i in range(n_factors):
        b = random_symmetric_trig(rng, n, degree, amp, hermitian=True)
        factors.append(shear_loop(b, upper=(i % 2 == 0)))
    if phases is not None:
        u = unitary_phase_loop(list(phases) + list(phases))
        factors.append(u)
    return _product(factors)


def random_twist_half_loop(rng, degree=3, amp=0.3, n_factors=2, diag=None) -> LoopPair:
    """SL(2,R) loop in the half-period flip-conjugation class.

    Shear entries carry odd harmonics only, so conjugating by diag(-1,1)
    and shifting by 1/2 reproduces the loop exactly.
    """
    factors = []
    for i in range(n_factors):
        u = random_scalar_trig(rng, degree, amp, period=1, parity="odd")
        factors.append(shear_loop(u, upper=(i % 2 == 0)))
    if diag is not None:
        factors.append(constant_loop(np.diag([diag, 1.0 / diag])))
    return _product(factors)


def random_twist_unit_loop(rng, degree=3, amp=0.3, n_factors=2, diag=None) -> LoopPair:
    """Period-2 SL(2,R) loop with the unit-shift flip-conjugation twist."""
    factors = []
    for i in range(n_factors):
        u = random_scalar_trig(rng, degree, amp, period=2, parity="odd")
        factors.append(shear_loop(u, upper=(i % 2 == 0)))
    if diag is not None:
        factors.append(constant_loop(np.diag([diag, 1.0 / diag])))
    return _product(factors)


def hyperbolic_constant(*expansions) -> np.ndarray:
    """diag(a_1..a_d, 1/a_1..1/a_d): a symplectic hyperbolic constant."""
    a = np.asarray(expansions, dtype=float)
    return np.diag(np.concatenate([a, 1.0 / a]))


def random_sl2r_spec(rng, freq: Frequency, base=None, degree=2, amp=0.25) -> CocycleSpec:
    """Random SL(2,R) spec: (hyperbolic constant) x (near-identity loop)."""
    if base is None:
        lam = rng.uniform(1.5, 2.5)
        base = np.diag([lam, 1.0 / lam])
    loop = random_sl2_loop(rng, degree=degree // 2 or 1, amp=amp, n_factors=2)
    tmap = TrigMatrixMap.constant(base) @ loop.fwd
    return CocycleSpec(freq=freq, map=tmap, group=GroupTag("SL", 2, "R"))


def random_sp4_spec(rng, freq: Frequency, base=None, degree=2, amp=0.25) -> CocycleSpec:
    """Random Sp(4,R) spec: degree <= 2 perturbation of a hyperbolic constant."""
    if base is None:
        a = rng.uniform(1.6, 2.4)
        b = rng.uniform(2.6, 3.4)
        base = hyperbolic_constant(a, b)
    loop = random_sp_loop(rng, 4, degree=1, amp=amp, n_factors=2)
    tmap = TrigMatrixMap.constant(base) @ loop.fwd
    return CocycleSpec(freq=freq, map=tmap, group=GroupTag("Sp", 4, "R"))


def conjugated_spec(freq, inner: TrigMatrixMap, loop: LoopPair, group) -> CocycleSpec:
    """S(x + alpha) * inner(x) * S(x)^{-1} as an exact trig-polynomial spec."""
    alpha = freq.alpha
    tmap = loop.fwd.shifted(alpha) @ inner @ loop.inv
    # a twisted conjugator with a compatibly twisted inner map gives a map
    # that is formally period-2 but genuinely 1-periodic; collapse it
    tmap = tmap.reduced().trimmed(1e-13)
    return CocycleSpec(freq=freq, map=tmap, group=group)


def diag_exp_cos_spec(freq, c, amp=1.0, grid=64, degree=14) -> CocycleSpec:
    """diag(e^{amp cos 2 pi x + c}, e^{-amp cos 2 pi x - c}) fitted to a
    trig polynomial; Fourier tails decay fast enough that the fitted map is
    SL(2,R) well below the group tolerance."""
    xs = np.arange(grid) / grid
    g = amp * np.cos(2 * np.pi * xs) + c
    samples = np.zeros((grid, 2, 2), dtype=complex)
    samples[:, 0, 0] = np.exp(g)
    samples[:, 1, 1] = np.exp(-g)
    tmap = fit_trig(samples, period=1, degree=degree)
    return CocycleSpec(freq=freq, map=tmap, group=GroupTag("SL", 2, "R"))
