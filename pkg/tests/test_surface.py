import json

import numpy as np
import pytest

from blendkit.errors import InvalidSpec, NonFiniteSample, NotInGrid
from blendkit.projectors import build_projector, eval_dual_basis, project
from blendkit.spec import BlendSpec, dimension, lower_set
from blendkit.surface import (
    BlendedSpace,
    BlendedSurface,
    Rect,
    control_net,
    control_net_csv,
    dual_basis_eval,
    evaluate,
    fit,
)

from oracles import bernstein_direct, random_spec_pairs

UNIT = (0.0, 1.0, 0.0, 1.0)


def random_member(spec, rng, rect):
    """Random polynomial on the lower-set monomials, centred and scaled to the rectangle."""
    coeffs = {ij: rng.normal() for ij in lower_set(spec.m, spec.n).points}
    a, b, c, d = rect
    cx, cy, sx, sy = (a + b) / 2, (c + d) / 2, (b - a) / 2, (d - c) / 2

    def F(x, y):
        X = (np.asarray(x) - cx) / sx
        Y = (np.asarray(y) - cy) / sy
        return sum(w * X**i * Y**j for (i, j), w in coeffs.items())

    return F


def grid21(rect):
    a, b, c, d = rect
    return np.meshgrid(np.linspace(a, b, 21), np.linspace(c, d, 21), indexing="ij")


def test_constant_function_gives_unit_coefficients():
    s = fit(BlendSpec((1, 2, 4), (2, 4, 8)), (0, 3, -1, 1), lambda x, y: 1.0)
    assert all(b == pytest.approx(1.0, abs=1e-12) for b in s.coeffs.values())


def test_xy_coefficients_against_direct_functionals():
    spec = BlendSpec((1, 2), (1, 2))
    s = fit(spec, UNIT, lambda x, y: x * y)
    # b_ij = sum_pq Tinv[i,p] Tinv[j,q] F(x_p, y_q) computed with numpy's dense inverse
    nodes = np.array([0, 0.5, 1])
    T = np.array([[bernstein_direct(2, j, x) for j in range(3)] for x in nodes])
    Tinv = np.linalg.inv(T)
    S = np.outer(nodes, nodes)
    ref = Tinv @ S @ Tinv.T
    assert set(s.coeffs) == set(s.grid.points)
    for (i, j), b in s.coeffs.items():
        assert b == pytest.approx(ref[i, j], abs=1e-14)
        assert b == pytest.approx(i * j / 4, abs=1e-14)


def test_dual_basis_coefficients_are_indicators():
    space = BlendedSpace(BlendSpec((2, 4), (2, 4)))
    for p, q in [(0, 0), (1, 2), (2, 3), (4, 4)]:
        s = space.fit(lambda u, v: space.dual_basis_eval(p, q, u, v))
        for ij, b in s.coeffs.items():
            assert b == pytest.approx(1.0 if ij == (p, q) else 0.0, abs=1e-12)


def test_non_finite_samples_rejected():
    with pytest.raises(NonFiniteSample):
        fit(BlendSpec((1,), (1,)), UNIT, lambda x, y: 1.0 / x)


def test_scalar_only_function_is_accepted():
    import math
    s = fit(BlendSpec((2,), (2,)), UNIT, lambda x, y: math.exp(x) + y)
    assert s(0.5, 0.5) == pytest.approx(math.exp(0.5) + 0.5, abs=1e-2)


def test_tensor_case_is_product_projector():
    spec = BlendSpec((3,), (2,))
    F = lambda x, y: np.exp(x) * np.cos(2 * y) + x * y**3
    s = fit(spec, UNIT, F)
    P = build_projector(spec, "x", 0)
    Q = build_projector(spec, "y", 0)
    X, Y = np.meshgrid(P.context_high.nodes, Q.context_high.nodes, indexing="ij")
    table = np.array([project(Q, row) for row in F(X, Y)])
    C = np.array([project(P, col) for col in table.T]).T
    u, v = 0.3, 0.8
    assert s(u, v) == pytest.approx(eval_dual_basis(P, u) @ C @ eval_dual_basis(Q, v), abs=1e-13)


def test_two_four_three_term_display():
    spec = BlendSpec((2, 4), (2, 4))
    F = lambda x, y: np.sin(3 * x * y) + x**5
    s = fit(spec, UNIT, F)
    b = s.table
    D2 = lambda t: build_projector(spec, "x", 0).dual_basis(t)
    D4 = lambda t: build_projector(spec, "x", 1).dual_basis(t)
    rng = np.random.default_rng(8)
    for u, v in rng.uniform(0, 1, (10, 2)):
        t1 = sum(b[i, 2 * j] * D4(u)[i] * D2(v)[j] for i in range(5) for j in range(3))
        t2 = sum(b[2 * i, j] * D2(u)[i] * D4(v)[j] for i in range(3) for j in range(5))
        t3 = sum(b[2 * i, 2 * j] * D2(u)[i] * D2(v)[j] for i in range(3) for j in range(3))
        assert s(u, v) == pytest.approx(t1 + t2 - t3, abs=1e-13)


@pytest.mark.parametrize("m, n", [((1, 2), (1, 2)), ((2, 4), (2, 4)), ((1, 2, 4), (1, 2, 4)),
                                  ((3, 6, 12), (2, 4, 8)), ((0, 3), (2, 6)), ((4,), (6,))])
def test_reproduces_members(m, n):
    spec = BlendSpec(m, n)
    rect = (-1.0, 2.0, 0.5, 1.5)
    rng = np.random.default_rng(sum(m) + 7 * sum(n))
    space = BlendedSpace(spec, rect)
    X, Y = grid21(rect)
    for _ in range(5):
        F = random_member(spec, rng, rect)
        s = space.fit(F)
        ref = F(X, Y)
        assert np.abs(s(X, Y) - ref).max() <= 1e-8 * np.abs(ref).max()


def test_evaluate_grid_matches_pointwise():
    s = fit(BlendSpec((1, 2, 4), (2, 4, 8)), (0, 2, 0, 1), lambda x, y: np.cos(x + 2 * y))
    us, vs = np.linspace(0, 2, 7), np.linspace(0, 1, 5)
    X, Y = np.meshgrid(us, vs, indexing="ij")
    np.testing.assert_allclose(s.evaluate_grid(us, vs), s(X, Y), atol=1e-13)
    assert isinstance(evaluate(s, 0.1, 0.2), float)


def test_per_term_values_sum_to_value():
    s = fit(BlendSpec((1, 2, 4), (1, 2, 4)), UNIT, lambda x, y: np.exp(x * y))
    terms = s.term_values(0.3, 0.6)
    assert len(terms) == 5
    assert [t[0] for t in terms] == [1, 1, 1, -1, -1]
    assert sum(sign * val for sign, _, _, val in terms) == pytest.approx(s(0.3, 0.6), abs=1e-15)


def test_boolean_sum_consistency_r1():
    spec = BlendSpec((2, 4), (1, 3))
    rect = (0.0, 1.5, -1.0, 1.0)
    F = lambda x, y: np.sin(2 * x * y) + np.exp(y)
    s = fit(spec, rect, F)
    px = [build_projector(spec, "x", k, rect[:2]) for k in (0, 1)]
    py = [build_projector(spec, "y", k, rect[2:]) for k in (0, 1)]

    def PQ(k, l, u, v):
        ys = py[l].context_high.nodes
        g = np.array([py[l](F(x, ys), v) for x in px[k].context_high.nodes])
        return px[k](g, u)

    rng = np.random.default_rng(9)
    for u, v in zip(rng.uniform(0, 1.5, 10), rng.uniform(-1, 1, 10)):
        boolean = PQ(0, 1, u, v) + PQ(1, 0, u, v) - PQ(0, 0, u, v)
        assert s(u, v) == pytest.approx(boolean, abs=1e-12)


def test_tensor_dual_basis_is_bernstein_product():
    space = BlendedSpace(BlendSpec((2,), (3,)))
    val = dual_basis_eval(space, 1, 2, 0.3, 0.6)
    assert val == pytest.approx(bernstein_direct(2, 1, 0.3) * bernstein_direct(3, 2, 0.6), abs=1e-15)


def test_dual_basis_outside_grid():
    space = BlendedSpace(BlendSpec((2, 4), (2, 4)))
    with pytest.raises(NotInGrid):
        space.dual_basis_eval(1, 1, 0.5, 0.5)


@pytest.mark.parametrize("m, n", [((1, 2), (1, 2)), ((2, 4), (2, 4)), ((1, 3), (2, 6))])
def test_dual_basis_partition_of_unity(m, n):
    space = BlendedSpace(BlendSpec(m, n), (0, 1, 2, 3))
    rng = np.random.default_rng(10)
    u = rng.uniform(0, 1, 20)
    v = rng.uniform(2, 3, 20)
    total = sum(space.dual_basis_eval(i, j, u, v) for i, j in space.grid.points)
    np.testing.assert_allclose(total, 1.0, atol=1e-12)


@pytest.mark.parametrize("m, n", [((1, 2), (1, 2)), ((2, 4), (2, 4)), ((1, 2, 4), (2, 4, 8)), ((2,), (3,))])
def test_duality_gram(m, n):
    space = BlendedSpace(BlendSpec(m, n), (0, 1, -1, 1))
    pts = space.grid.sorted_points()
    rows, cols = zip(*pts)
    gram = np.array([
        space.functional_table(space.sample(lambda u, v, p=p: space.dual_basis_eval(*p, u, v)))[rows, cols]
        for p in pts
    ])
    assert np.abs(gram - np.eye(len(pts))).max() <= 1e-7


@pytest.mark.parametrize("m, n", [((1, 2), (1, 2)), ((2, 4), (1, 2)), ((1, 2, 4), (1, 3, 6))])
def test_two_representations_agree(m, n):
    rng = np.random.default_rng(11)
    s = fit(BlendSpec(m, n), (0, 2, 0, 1), lambda x, y: np.exp(-x * y) * np.sin(3 * x))
    u = rng.uniform(0, 2, 50)
    v = rng.uniform(0, 1, 50)
    np.testing.assert_allclose(s(u, v), s.dual_basis_form(u, v), atol=1e-9)


def test_affine_invariance_of_coefficients():
    spec = BlendSpec((1, 2, 4), (2, 4, 8))
    F0 = lambda s, t: np.exp(s) * np.cos(3 * t) + s * t**2
    a, b, c, d = -2.0, 5.0, 1.0, 1.5
    ref = fit(spec, UNIT, F0).coeffs
    moved = fit(spec, (a, b, c, d), lambda x, y: F0((x - a) / (b - a), (y - c) / (d - c))).coeffs
    for ij in ref:
        assert moved[ij] == pytest.approx(ref[ij], abs=1e-10)


def test_control_net_tensor():
    net = control_net(fit(BlendSpec((2,), (2,)), UNIT, lambda x, y: x + y))
    assert len(net) == 9
    assert [(i, j) for i, j, *_ in net] == sorted((i, j) for i in range(3) for j in range(3))
    for i, j, x, y, b in net:
        assert (x, y) == (i / 2, j / 2)
        assert b == pytest.approx(x + y, abs=1e-14)


def test_control_net_two_four_scaled():
    net = control_net(fit(BlendSpec((2, 4), (2, 4)), (1, 3, -1, 0), lambda x, y: x))
    assert len(net) == 21
    assert {(i, j) for i, j, *_ in net} == {(i, j) for i in range(5) for j in range(5)} - {(1, 1), (1, 3), (3, 1), (3, 3)}
    for i, j, x, y, _ in net:
        assert x == pytest.approx(1 + 2 * i / 4) and y == pytest.approx(-1 + j / 4)


def test_control_net_size_random_specs():
    rng = np.random.default_rng(12)
    for _ in range(10):
        m, n = random_spec_pairs(rng, r_max=2, top=12)
        s = fit(BlendSpec(tuple(m), tuple(n)), UNIT, lambda x, y: x - y)
        assert len(control_net(s)) == dimension(m, n)


def test_control_net_csv_format():
    text = control_net_csv(fit(BlendSpec((1,), (1,)), UNIT, lambda x, y: x / 3))
    lines = text.split("\n")
    assert lines[0] == "i,j,x,y,b"
    assert lines[-1] == ""
    assert lines[3] == "1,0,1,0,0.33333333333333331"
    assert "\r" not in text


def test_surface_json_round_trip():
    s = fit(BlendSpec((2, 4), (1, 2)), (0, 1, 0, 2), lambda x, y: np.cos(x * y))
    doc = json.loads(s.dumps())
    assert set(doc) == {"spec", "domain", "coeffs"}
    assert doc["spec"] == {"m": [2, 4], "n": [1, 2]}
    assert doc["domain"] == [0, 1, 0, 2]
    back = BlendedSurface.from_dict(doc)
    assert back(0.37, 1.2) == s(0.37, 1.2)


def test_surface_json_rejects_bad_coefficients():
    s = fit(BlendSpec((1, 2), (1, 2)), UNIT, lambda x, y: x)
    doc = s.to_dict()
    doc["coeffs"] = doc["coeffs"][:-1]
    with pytest.raises(InvalidSpec):
        BlendedSurface.from_dict(doc)
    with pytest.raises(InvalidSpec):
        BlendedSurface.from_dict({"spec": {"m": [1]}, "domain": [0, 1, 0, 1], "coeffs": []})


def test_rect_validation():
    with pytest.raises(ValueError):
        Rect.checked(1, 0, 0, 1)
    with pytest.raises(ValueError):
        BlendedSpace(BlendSpec((1,), (1,)), (0, 1, 0, 0))
