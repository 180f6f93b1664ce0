import numpy as np
import pytest
from numpy.testing import assert_allclose

from stieltjesmp.lft import BlockGenerator, compose, lft_matrix, lft_pair
from stieltjesmp.matcore import PreconditionError, SingularDenominatorError
from stieltjesmp.respoly import v_poly, w_poly


def _rand_gen(rng, q):
    while True:
        e = rng.normal(size=(2 * q, 2 * q)) + 1j * rng.normal(size=(2 * q, 2 * q))
        try:
            return BlockGenerator.from_matrix(e)
        except PreconditionError:
            continue


def test_generator_block_roundtrip():
    rng = np.random.default_rng(40)
    e = _rand_gen(rng, 2)
    back = BlockGenerator.from_matrix(e.as_matrix())
    assert_allclose(back.b, e.b)
    assert back.q == 2


def test_generator_rejects_rank_deficient_lower_row():
    z = np.zeros((2, 2))
    with pytest.raises(PreconditionError):
        BlockGenerator(np.eye(2), np.eye(2), z, z)


def test_lft_matrix_hand_example():
    # a=b=d=I, c=O: x -> x + I
    e = BlockGenerator(np.eye(2), np.eye(2), np.zeros((2, 2)), np.eye(2))
    assert_allclose(lft_matrix(e, np.diag([1.0, 2.0])), np.diag([2.0, 3.0]))


def test_lft_pair_is_projective():
    rng = np.random.default_rng(41)
    e = _rand_gen(rng, 2)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    r = rng.normal(size=(2, 2)) + np.eye(2) * 3  # invertible right factor
    plain = lft_pair(e, x, np.eye(2))
    scaled = lft_pair(e, x @ r, r)
    assert_allclose(plain, scaled, atol=1e-9)
    assert_allclose(plain, lft_matrix(e, x), atol=1e-12)


def test_compose_three_routes_agree():
    rng = np.random.default_rng(42)
    for q in (1, 2, 3):
        e1 = _rand_gen(rng, q)
        e2 = _rand_gen(rng, q)
        x = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
        rep = compose(e2, e1, x)
        assert rep["product_gap"] <= 1e-9
        assert rep["pushed_gap"] <= 1e-9


def test_compose_with_resolvent_generators():
    # the generator polynomials evaluated at a point are valid LFT inputs
    rng = np.random.default_rng(43)
    a1 = np.diag([1.0, 0.5])
    a2 = np.array([[1.0, 0.2], [0.2, 2.0]])
    z = 0.4 + 1.1j
    e1 = BlockGenerator.from_matrix(v_poly(0.0, a1)(z))
    e2 = BlockGenerator.from_matrix(w_poly(0.0, a2)(z))
    x = rng.normal(size=(2, 2))
    rep = compose(e2, e1, x)
    assert rep["product_gap"] <= 1e-9 and rep["pushed_gap"] <= 1e-9


def test_singular_denominator_reports_stage():
    e_id = BlockGenerator(np.eye(1), np.zeros((1, 1)),
                          np.zeros((1, 1)), np.eye(1))
    # inner denominator c x + d = 0 for x = 0 with c=I, d=O.
    e_bad = BlockGenerator(np.zeros((1, 1)), np.eye(1),
                           np.eye(1), np.zeros((1, 1)))
    with pytest.raises(SingularDenominatorError) as err:
        compose(e_id, e_bad, np.zeros((1, 1)))
    assert err.value.stage == "inner"
    assert err.value.gap == 0.0
