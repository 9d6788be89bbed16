import numpy as np
import pytest

from tgeo.errors import NonTimelike, NoSolutionFound, SpacelikeUnsupported
from tgeo.geometry import PairVector, distorted, euclidean, minkowski, sigma, squared_length
from tgeo.solver import (
    SolverConfig,
    existence_counting,
    null_family_residuals,
    scalar_multiply,
    solve_equivalent_null,
    solve_equivalent_timelike,
    solve_skeleton_equivalence,
    vector_sum,
)
from tgeo.vectors import is_antiparallel, is_equivalent, is_parallel

E4 = np.eye(4)


def _axis(s):
    return PairVector(np.zeros(4), [s, 0, 0, 0])


def test_case_one_example():
    fam = solve_equivalent_timelike(distorted(0.01), 1.0, a=0.5, b=0.2, q=(1, 0, 0), case="I")
    assert fam.dof == 2
    assert np.allclose(fam.point, [1.52, 0.4009975124224178, 0, 0], rtol=0, atol=1e-15)
    assert max(abs(r) for r in fam.meta["residuals"]) < 1e-12
    assert fam.meta["alpha0"] == pytest.approx(0.02, abs=1e-15)


def test_case_one_without_distortion_is_a_translate():
    fam = solve_equivalent_timelike(distorted(0.0), 1.0, a=0.5, b=0.2, case="I")
    assert fam.dof == 0 and fam.meta["gamma"] == 0.0
    assert np.allclose(fam.point, [1.5, 0.2, 0, 0])


@pytest.mark.parametrize("q", [(1, 0, 0), (0, 1, 0), (0.3, -0.4, 0.5)])
def test_case_two_coefficients(q):
    s, lam = 1.0, 0.1
    d = lam * lam
    fam = solve_equivalent_timelike(distorted(d), s, q=q, case="II")
    # Same formulas as case I with lambda0 -> sqrt(3/2) lambda0.
    lam2 = np.sqrt(1.5) * lam
    assert fam.meta["alpha0"] == pytest.approx(2 * lam2 ** 2 / s, rel=1e-12)
    assert fam.meta["gamma"] == pytest.approx(2 * lam2 * np.sqrt(1 + lam2 ** 2 / s ** 2), rel=1e-12)
    assert fam.meta["kappa"] == pytest.approx(np.sqrt(6 * (1 + 1.5 * d / s ** 2)), rel=1e-12)
    v2 = PairVector([s, 0, 0, 0], fam.point)
    assert is_equivalent(distorted(d), _axis(s), v2)


@pytest.mark.parametrize("beta", [0.05, 0.1, 0.5])
def test_case_two_small_s_regime(beta):
    lam = 1.0
    s = beta * lam
    fam = solve_equivalent_timelike(distorted(lam ** 2), s, case="II")
    Q0 = np.array(fam.meta["Q0"])
    assert fam.point[0] - Q0[0] == pytest.approx(lam * (beta + 3 / beta), rel=1e-12)
    got = squared_length(distorted(lam ** 2), PairVector(Q0, fam.point))
    assert got == pytest.approx((2 + beta ** 2) * lam ** 2, abs=1e-12)


def test_non_timelike_inputs():
    D = distorted(0.01)
    with pytest.raises(NonTimelike):
        solve_equivalent_timelike(D, 0.0, a=0.5, b=0.2)
    with pytest.raises(NonTimelike):
        solve_equivalent_timelike(D, 1.0, a=0.1, b=2.0)
    with pytest.raises(ValueError):
        solve_equivalent_timelike(minkowski(4), 1.0, a=0, b=0)


@pytest.mark.parametrize("a0", [0.0, 0.7, -0.4, 3.0])
def test_null_family(a0):
    D = distorted(0.01)
    fam = solve_equivalent_null(D, 1.0)
    Q2 = fam.representative(alpha0=a0)
    assert np.array_equal(Q2, [2 + a0, 2 + a0, 0, 0])
    assert sigma(D, np.zeros(4), Q2) == 0.0
    assert np.all(null_family_residuals(D, 1.0, Q2) == 0.0)
    v = PairVector(np.zeros(4), [1, 1, 0, 0])
    assert is_equivalent(D, v, PairVector([1, 1, 0, 0], [2, 2, 0, 0]))


def test_null_candidate_with_transverse_part_rejected():
    r = null_family_residuals(distorted(0.01), 1.0, [2.0, 2.0, 0.3, 0.0])
    assert np.max(np.abs(r)) > 1e-3


def test_existence_counting():
    got = [(r.equations, r.unknowns, r.verdict) for r in map(existence_counting, [1, 2, 3, 4])]
    assert got == [(2, 4, "under"), (6, 8, "under"), (12, 12, "balanced"), (20, 16, "over")]


def test_euclidean_skeleton_unique_translate():
    sk = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0.2, 0.3, 1]])
    fam, rep = solve_skeleton_equivalence(euclidean(3), sk, [5, 5, 5])
    assert rep.numeric_findings["clusters"] == 1
    assert rep.numeric_findings["manifold_dimension"] == 0
    assert np.allclose(fam.points[0], sk + 5, atol=1e-8)


def test_numeric_agrees_with_case_two():
    rng = np.random.default_rng(11)
    for _ in range(10):
        s, lam = rng.uniform(0.5, 2.0), rng.uniform(0.01, 0.2)
        D = distorted(lam ** 2)
        fam, rep = solve_skeleton_equivalence(D, [[0, 0, 0, 0], [s, 0, 0, 0]], [s, 0, 0, 0])
        cf = solve_equivalent_timelike(D, s, case="II")
        local = fam.points[:, 1] - [s, 0, 0, 0]
        assert np.allclose(local[:, 0], s + cf.meta["alpha0"], atol=1e-6)
        assert np.allclose(np.linalg.norm(local[:, 1:], axis=1), cf.meta["gamma"], atol=1e-6)
        assert rep.numeric_findings["manifold_dimension"] == 2


def test_overdetermined_skeleton_has_no_solution():
    sk = np.array([[0, 0, 0, 0], [1, 0.1, 0, 0], [2.1, 0.3, 0.2, 0],
                   [3.3, 0.2, 0.5, 0.1], [4.6, 0.6, 0.4, 0.4]])
    with pytest.raises(NoSolutionFound) as info:
        solve_skeleton_equivalence(distorted(0.01), sk, [0.5, 0.2, 0.1, 0], SolverConfig(max_iter=50))
    assert info.value.report.verdict == "over"


def test_spacelike_skeleton_rejected():
    with pytest.raises(SpacelikeUnsupported):
        solve_skeleton_equivalence(minkowski(4), [[0, 0, 0, 0], [0, 1, 0, 0]], np.zeros(4))


def test_family_representatives_are_equivalent():
    D = distorted(0.01)
    v = PairVector([0.1, 0, 0, 0], [1.3, 0.2, 0.1, 0])
    C = np.array([0.4, -0.3, 0.2, 0.1])
    fam = scalar_multiply(D, v, 1.0, C)
    for X in fam.sample(50, seed=3):
        w = PairVector(C, X)
        assert is_equivalent(D, v, w) and is_equivalent(D, w, v)


def test_case_one_family_shrinks_with_distortion():
    diam = []
    for lam in (1e-2, 1e-3, 1e-4):
        fam = solve_equivalent_timelike(distorted(lam ** 2), 1.0, a=0.5, b=0.2)
        pts = fam.sample(64, seed=0)
        diam.append(np.max(np.linalg.norm(pts[:, None] - pts[None], axis=-1)) / lam)
    assert np.allclose(diam, diam[0], rtol=0.05)


def test_vector_sum_euclidean():
    E3 = euclidean(3)
    v1 = PairVector([0, 0, 0], [1, 0, 0])
    fam = vector_sum(E3, v1, PairVector([0, 0, 0], [0, 2, 0]), [1, 1, 1])
    assert fam.dof == 0 and not fam.order_dependent
    assert np.allclose(fam.point, [2, 3, 1])
    back = vector_sum(E3, v1, v1.reversed(), [1, 1, 1])
    assert np.allclose(back.point, [1, 1, 1])


def test_vector_sum_distorted_has_four_dof():
    D = distorted(0.01)
    fam = vector_sum(D, _axis(1.0), PairVector(np.zeros(4), [2, 0.5, 0, 0]), [0.5, 0.2, 0, 0])
    assert fam.dof == 4 and len(fam.free_parameters) == 2
    assert fam.order_dependent
    assert fam.sample(8, seed=1).shape == (8, 4)


@pytest.mark.parametrize("version", ["A", "B"])
def test_scalar_multiply(version):
    E3 = euclidean(3)
    v = PairVector([0, 0, 0], [1, 2, 0])
    assert np.allclose(scalar_multiply(E3, v, 1.0, [1, 1, 1], version).point, [2, 3, 1])
    assert np.allclose(scalar_multiply(E3, v, 0.0, [1, 1, 1], version).point, [1, 1, 1])
    D = distorted(0.01)
    fam = scalar_multiply(D, _axis(1.0), 2.0, [0.3, 0.1, 0, 0], version)
    assert fam.dof == 2
    for X in fam.sample(20, seed=2):
        w = PairVector([0.3, 0.1, 0, 0], X)
        assert squared_length(D, w) == pytest.approx(4.08, abs=1e-9)
        assert is_parallel(D, _axis(1.0), w)


def test_scalar_multiply_negative_is_antiparallel():
    D = distorted(0.01)
    P0 = np.array([0.3, 0.1, 0, 0])
    fam = scalar_multiply(D, _axis(1.0), -1.0, P0)
    for X in fam.sample(10, seed=4):
        assert is_antiparallel(D, _axis(1.0), PairVector(P0, X))


def test_scalar_multiply_version_b_zero_is_point_vector():
    fam = scalar_multiply(distorted(0.01), _axis(1.0), 0.0, E4[1], "B")
    assert fam.dof == 0 and np.array_equal(fam.point, E4[1])


def test_scalar_multiply_rejects_spacelike():
    with pytest.raises(SpacelikeUnsupported):
        scalar_multiply(minkowski(4), PairVector(np.zeros(4), E4[1]), 2.0, np.zeros(4))
