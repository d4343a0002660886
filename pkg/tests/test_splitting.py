import numpy as np
import pytest

from cocyclelab.arithmetic import golden_mean
from cocyclelab.errors import DegenerateForm, GridMismatch, NotDominated
from cocyclelab.lyapunov import regularity_classify
from cocyclelab.sampling import (
    conjugated_spec,
    hyperbolic_constant,
    random_sp_loop,
)
from cocyclelab.splitting import (
    FrameGrid,
    align_frames,
    dominated_detect,
    gauge_to_closure,
    oseledets_bundles,
    subspace_distance,
    symplectic_complement,
    symplectic_orthogonality_check,
)
from cocyclelab.trigmat import (
    CocycleSpec,
    TrigMatrixMap,
    direct_sum_map,
)

FREQ = golden_mean(12)


def _const_spec(mat, group="Sp4R"):
    return CocycleSpec(freq=FREQ, map=TrigMatrixMap.constant(mat), group=group)


def _mixed_diamond_spec():
    """diag(2, 1/2) block diamond a rotation block: 1- but not 2-dominated."""
    block = direct_sum_map(
        TrigMatrixMap.constant(np.diag([2.0, 0.5])), TrigMatrixMap.rotation_loop(1)
    )
    return CocycleSpec(freq=FREQ, map=block, group="Sp4R")


def test_detect_constant_diagonal():
    rep = dominated_detect(_const_spec(np.diag([2.0, 0.5]), "SL2R"), 1)
    assert rep.dominated
    assert rep.rate == pytest.approx(2 * np.log(2), abs=1e-9)


def test_detect_rotation_not_dominated():
    spec = CocycleSpec(freq=FREQ, map=TrigMatrixMap.rotation_loop(1), group="SL2R")
    rep = dominated_detect(spec, 1)
    assert not rep.dominated


def test_detect_mixed_diamond_against_singular_value_oracle():
    spec = _mixed_diamond_spec()
    # oracle: direct singular values of the 40-step product at a few phases
    alpha = FREQ.alpha
    for x0 in (0.13, 0.57):
        prod = np.eye(4)
        for j in range(40):
            prod = spec.map.eval(np.array([x0 + j * alpha]))[0] @ prod
        sv = np.linalg.svd(prod, compute_uv=False)
        assert sv[0] / sv[1] > np.exp(0.5 * 40)  # gap at k=1 grows
        assert sv[1] / sv[2] < 10.0  # no gap at k=2

    assert dominated_detect(spec, 1).dominated
    assert not dominated_detect(spec, 2).dominated


def test_detect_agrees_with_regularity_on_gapped_members():
    members = [
        _const_spec(hyperbolic_constant(2.0, 3.0)),
        _mixed_diamond_spec(),
    ]
    for spec in members:
        for k in (1, 2):
            dom = dominated_detect(spec, k).dominated
            reg = regularity_classify(spec, k)
            # compare only where the exponent gap is resolvable
            from cocyclelab.lyapunov import lyap_spectrum

            rep = lyap_spectrum(spec, n_iter=2000, n_orbits=2, seed=0)
            if rep.exponents[k - 1] - rep.exponents[k] > 0.05:
                assert dom == reg


def test_oseledets_constant_block():
    spec = _const_spec(hyperbolic_constant(2.0, 3.0))
    eu, es, ec = oseledets_bundles(spec, 2, grid=64)
    assert ec is None
    want_u = np.zeros((4, 2))
    want_u[:2, :] = np.eye(2)
    assert float(np.max(subspace_distance(eu.frames, want_u))) < 1e-9
    want_s = np.zeros((4, 2))
    want_s[2:, :] = np.eye(2)
    assert float(np.max(subspace_distance(es.frames, want_s))) < 1e-9
    assert eu.invariance_residual < 1e-6
    assert es.invariance_residual < 1e-6
    assert eu.tau == es.tau == 1


def test_oseledets_diamond_with_center():
    spec = _mixed_diamond_spec()
    eu, es, ec = oseledets_bundles(spec, 1, grid=64)
    # expanding coordinate of the first diamond factor is index 0
    want = np.zeros((4, 1))
    want[0, 0] = 1.0
    assert float(np.max(subspace_distance(eu.frames, want))) < 1e-8
    assert ec is not None and ec.k == 2
    assert ec.invariance_residual < 1e-6
    assert eu.k + es.k + ec.k == 4


def test_oseledets_conjugated_matches_pushed_block():
    rng = np.random.default_rng(5)
    loop = random_sp_loop(rng, 4, degree=1, amp=0.2)
    inner = direct_sum_map(
        TrigMatrixMap.constant(np.diag([2.0, 0.5])), TrigMatrixMap.rotation_loop(1)
    )
    spec = conjugated_spec(FREQ, inner, loop, "Sp4R")
    eu, es, ec = oseledets_bundles(spec, 1, grid=64)
    # oracle: unstable line is the conjugator image of the expanding axis
    e0 = np.zeros((4, 1))
    e0[0, 0] = 1.0
    img = loop.fwd.eval(eu.xs) @ e0
    img = img / np.linalg.norm(img, axis=-2, keepdims=True)
    assert float(np.max(subspace_distance(eu.frames, img))) < 1e-7


def test_oseledets_rejects_non_dominated():
    spec = CocycleSpec(freq=FREQ, map=TrigMatrixMap.rotation_loop(1), group="SL2R")
    with pytest.raises(NotDominated):
        oseledets_bundles(spec, 1, grid=32)


def test_symplectic_orthogonality_of_extracted_bundles():
    spec = _mixed_diamond_spec()
    eu, es, ec = oseledets_bundles(spec, 1, grid=64)
    us = np.concatenate([eu.frames, es.frames], axis=-1)
    q, _ = np.linalg.qr(us)
    eus = FrameGrid(xs=eu.xs, frames=q, period=1)
    assert symplectic_orthogonality_check(ec, eus) < 1e-6
    # isotropy of the unstable bundle
    assert symplectic_orthogonality_check(eu, eu) < 1e-6


def test_symplectic_orthogonality_canonical_vectors():
    frames_a = np.tile(np.eye(4)[:, :1], (8, 1, 1))
    frames_b = np.tile(np.eye(4)[:, 1:2], (8, 1, 1))
    xs = np.arange(8) / 8
    ea = FrameGrid(xs=xs, frames=frames_a, period=1)
    eb = FrameGrid(xs=xs, frames=frames_b, period=1)
    assert symplectic_orthogonality_check(ea, eb) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(GridMismatch):
        symplectic_orthogonality_check(
            ea, FrameGrid(xs=xs + 0.01, frames=frames_b, period=1)
        )


def test_symplectic_complement_canonical_pair():
    xs = np.arange(8) / 8
    frames = np.tile(np.eye(4)[:, [0, 2]], (8, 1, 1))
    e = FrameGrid(xs=xs, frames=frames, period=1)
    comp = symplectic_complement(e)
    want = np.eye(4)[:, [1, 3]]
    assert float(np.max(subspace_distance(comp.frames, want))) < 1e-12
    # involution
    back = symplectic_complement(comp)
    assert float(np.max(subspace_distance(back.frames, frames))) < 1e-8


def test_symplectic_complement_degenerate():
    xs = np.arange(8) / 8
    frames = np.tile(np.eye(4)[:, [0, 1]], (8, 1, 1))  # isotropic plane
    e = FrameGrid(xs=xs, frames=frames, period=1)
    with pytest.raises(DegenerateForm):
        symplectic_complement(e)


def test_complement_of_center_recovers_us_sum():
    spec = _mixed_diamond_spec()
    eu, es, ec = oseledets_bundles(spec, 1, grid=64)
    comp = symplectic_complement(ec)
    us = np.concatenate([eu.frames, es.frames], axis=-1)
    q, _ = np.linalg.qr(us)
    assert float(np.max(subspace_distance(comp.frames, q))) < 1e-6


def test_twisted_conjugation_gives_antiperiodic_bundles():
    rng = np.random.default_rng(11)
    loop = random_sp_loop(rng, 4, degree=1, amp=0.15, twisted=True)
    inner = direct_sum_map(
        TrigMatrixMap.constant(np.diag([2.0, 0.5])),
        TrigMatrixMap.constant(np.diag([1.5, 1 / 1.5])),
    )
    spec = conjugated_spec(FREQ, inner, loop, "Sp4R")
    assert spec.map.period == 1  # genuinely 1-periodic despite the cover twist
    eu, es, ec = oseledets_bundles(spec, 1, grid=128)
    assert eu.tau == es.tau == -1


def test_align_frames_and_closure_distribution():
    g = 128
    xs = (np.arange(g) + 0.5) / g
    frames = np.zeros((g, 2, 1))
    frames[:, 0, 0] = np.cos(np.pi * xs)
    frames[:, 1, 0] = np.sin(np.pi * xs)
    rng = np.random.default_rng(1)
    signs = np.where(rng.uniform(size=g) < 0.5, -1.0, 1.0)
    aligned, overlaps, closure = align_frames(frames * signs[:, None, None])
    assert np.min(overlaps) > 0.99
    assert closure.shape == (1, 1)
    assert closure[0, 0] == pytest.approx(-1.0, abs=1e-10)
    # distribute to the antiperiodic target: closure becomes exactly -1
    target = np.array([[-1.0]])
    ts = xs - xs[0]
    adjusted = gauge_to_closure(aligned, ts, closure, target=target)
    assert adjusted.shape == frames.shape
