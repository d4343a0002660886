import numpy as np
import pytest

from cocyclelab.arithmetic import golden_mean
from cocyclelab.errors import NonzeroDegree, SingularOnGrid
from cocyclelab.sampling import random_sl2_loop, random_twist_half_loop
from cocyclelab.topology import (
    degree,
    monodromy_sign,
    rotation_number,
    symmetry_diagnostics,
)
from cocyclelab.trigmat import CocycleSpec, TrigMatrixMap

FREQ = golden_mean(12)


def _rot_const(theta_turns):
    th = 2 * np.pi * theta_turns
    mat = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    return CocycleSpec(freq=FREQ, map=TrigMatrixMap.constant(mat), group="SL2R")


def test_rotation_number_constant_rotation():
    n = 20_000
    res = rotation_number(_rot_const(0.3), n_iter=n, n_starts=3, seed=1)
    assert abs(res.value - 0.3) < 1.0 / n + 1e-12
    assert res.spread < 5 / np.sqrt(n)


def test_rotation_number_identity():
    res = rotation_number(_rot_const(0.0), n_iter=2_000, n_starts=2)
    assert abs(res.value) < 1e-12 or abs(res.value - 1.0) < 1e-12


def test_rotation_number_rejects_nonzero_degree():
    spec = CocycleSpec(freq=FREQ, map=TrigMatrixMap.rotation_loop(1), group="SL2R")
    with pytest.raises(NonzeroDegree):
        rotation_number(spec, n_iter=2000)


def test_twist_half_member_has_half_integer_doubled_rho():
    rng = np.random.default_rng(4)
    n = 100_000
    loop = random_twist_half_loop(rng, degree=3, amp=0.35, diag=1.2)
    spec = CocycleSpec(freq=FREQ, map=loop.fwd, group="SL2R", symmetry="twist_half")
    res = rotation_number(spec, n_iter=n, n_starts=4, seed=0)
    two = 2 * res.value
    assert abs(two - round(two)) < 10 / np.sqrt(n)


def test_rho_invariant_under_degree_zero_conjugation():
    n = 40_000
    base = _rot_const(0.3)
    rng = np.random.default_rng(8)
    loop = random_sl2_loop(rng, degree=2, amp=0.25)
    conj = loop.fwd.shifted(FREQ.alpha) @ base.map @ loop.inv
    spec = CocycleSpec(freq=FREQ, map=conj, group="SL2R")
    assert degree(loop.fwd) == 0
    res = rotation_number(spec, n_iter=n, n_starts=4, seed=2)
    d = abs(res.value - 0.3)
    assert min(d, 1 - d) < 10 / np.sqrt(n)


@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2, 3])
def test_degree_of_rotation_loops(k):
    assert degree(TrigMatrixMap.rotation_loop(k)) == k


def test_degree_constant_hyperbolic_and_additivity():
    assert degree(TrigMatrixMap.constant(np.diag([2.0, 0.5]))) == 0
    m1 = TrigMatrixMap.rotation_loop(2)
    m2 = TrigMatrixMap.rotation_loop(1)
    assert degree(m1 @ m2) == 3
    rng = np.random.default_rng(3)
    loop = random_sl2_loop(rng, degree=2, amp=0.3)
    assert degree(m1 @ loop.fwd) == 2 + degree(loop.fwd)


def test_degree_singular_grid():
    tmap = TrigMatrixMap.constant(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(SingularOnGrid):
        degree(tmap)


def test_monodromy_sign_antiperiodic_line():
    g = 512
    xs = (np.arange(g) + 0.5) / g
    frames = np.zeros((g, 2, 1))
    frames[:, 0, 0] = np.cos(np.pi * xs)
    frames[:, 1, 0] = np.sin(np.pi * xs)
    assert monodromy_sign(frames) == -1


def test_monodromy_sign_constant_line():
    frames = np.tile(np.array([[1.0], [0.0], [0.0]]), (64, 1, 1))
    assert monodromy_sign(frames) == 1


def test_monodromy_sign_product_rule():
    # 2-dim bundle spanned by one antiperiodic and one periodic vector
    g = 512
    xs = (np.arange(g) + 0.5) / g
    frames = np.zeros((g, 3, 2))
    frames[:, 0, 0] = np.cos(np.pi * xs)
    frames[:, 1, 0] = np.sin(np.pi * xs)
    frames[:, 2, 1] = 1.0
    assert monodromy_sign(frames) == -1


def test_monodromy_sign_gauge_independent():
    g = 256
    xs = (np.arange(g) + 0.5) / g
    frames = np.zeros((g, 2, 1))
    frames[:, 0, 0] = np.cos(np.pi * xs)
    frames[:, 1, 0] = np.sin(np.pi * xs)
    rng = np.random.default_rng(0)
    signs = np.where(rng.uniform(size=g) < 0.5, -1.0, 1.0)
    flipped = frames * signs[:, None, None]
    assert monodromy_sign(flipped) == -1
    # independent of grid density once overlaps are healthy
    assert monodromy_sign(frames[::2][:, :, :]) == -1


def test_symmetry_diagnostics_bundle():
    rng = np.random.default_rng(9)
    loop = random_twist_half_loop(rng, degree=3, amp=0.3, diag=1.1)
    spec = CocycleSpec(freq=FREQ, map=loop.fwd, group="SL2R", symmetry="twist_half")
    rec = symmetry_diagnostics(spec, n_iter=40_000)
    assert rec["degree"] == 0
    assert rec["class_residual"] < 1e-8
    assert rec["two_rho_int_residual"] < 10 / np.sqrt(40_000)

    rot = CocycleSpec(freq=FREQ, map=TrigMatrixMap.rotation_loop(1), group="SL2R")
    rec = symmetry_diagnostics(rot, n_iter=2000)
    assert rec["degree"] == 1
    assert rec["class_residual"] > 0.5
    assert rec["two_rho_int_residual"] is None

    ident = _rot_const(0.0)
    rec = symmetry_diagnostics(ident, n_iter=2000)
    assert rec["degree"] == 0
    assert rec["class_residual"] < 1e-12
    assert rec["two_rho_int_residual"] < 1e-9
