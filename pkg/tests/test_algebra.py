from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ncchern.algebra import (StructureAlgebra, TraceFunctional, amplify,
                             cyclic_group_algebra, ground_field, group_stage,
                             make_matrix_algebra, product, structure_isomorphic_by,
                             trace_form, unitalization, validate_trace)
from ncchern.errors import EmptyProduct, InvalidSize, NotInvertible
from ncchern.lie import SU


def E(A, n, i, j):
    """1-based matrix unit E_ij in Mat_n."""
    return A.basis_element((i - 1) * n + (j - 1))


def matrix_trace(n):
    return TraceFunctional([Fraction(1, n) if i == j else 0 for i in range(n) for j in range(n)])


def test_matrix_units_multiply():
    M2 = make_matrix_algebra(2)
    assert E(M2, 2, 1, 2) * E(M2, 2, 2, 1) == E(M2, 2, 1, 1)
    assert (E(M2, 2, 1, 2) * E(M2, 2, 1, 2)).coords == {}
    assert E(M2, 2, 1, 2).star() == E(M2, 2, 2, 1)
    M1 = make_matrix_algebra(1)
    assert M1.dim == 1 and M1.one() == M1.basis_element(0)
    with pytest.raises(InvalidSize):
        make_matrix_algebra(0)


def test_product_dims_and_unit():
    assert product([make_matrix_algebra(1), make_matrix_algebra(2)]).dim == 5
    P = product([make_matrix_algebra(n) for n in (1, 2, 3)])
    assert P.dim == 14
    # unit = (1, I_2, I_3)
    assert P.one().coords == {0: 1, 1: 1, 4: 1, 5: 1, 9: 1, 13: 1}
    with pytest.raises(EmptyProduct):
        product([])


def test_cyclic_group_algebra():
    C2, C3 = cyclic_group_algebra(2), cyclic_group_algebra(3)
    assert C2.basis_element(1) * C2.basis_element(1) == C2.one()
    assert C3.basis_element(1) * C3.basis_element(2) == C3.basis_element(0)
    assert C3.basis_element(1).star() == C3.basis_element(2)
    assert cyclic_group_algebra(1).dim == 1
    with pytest.raises(InvalidSize):
        cyclic_group_algebra(0)


@pytest.mark.parametrize("G, N, dims", [
    (SU(2), 3, [1, 2, 3]),
    (SU(2), 1, [1]),
    (SU(3), 3, [1, 3, 3]),
])
def test_group_stage_dims_and_center(G, N, dims):
    A = group_stage(G, N)
    assert A.dim == sum(d * d for d in dims)
    assert A.center_dim() == N


@pytest.mark.parametrize("A", [
    make_matrix_algebra(3), product([make_matrix_algebra(1), make_matrix_algebra(2)]),
    cyclic_group_algebra(4), amplify(cyclic_group_algebra(2), 2),
    unitalization(make_matrix_algebra(2)), group_stage(SU(2), 3),
])
def test_constructors_satisfy_invariants(A):
    assert A.invariant_failures() == []
    A.verify()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_normalized_matrix_trace_passes(n):
    rep = validate_trace(make_matrix_algebra(n), matrix_trace(n))
    assert rep.ok and rep.normalized and rep.positive and rep.strictly_positive and rep.ad_invariant


def test_trace_failures():
    M2 = make_matrix_algebra(2)
    zero = validate_trace(M2, TraceFunctional([0] * 4))
    assert not zero.normalized and not zero.strictly_positive
    corner = validate_trace(M2, TraceFunctional([1, 0, 0, 0]))
    assert not corner.ad_invariant
    negative = validate_trace(M2, TraceFunctional([2, 0, 0, -1]))
    assert not negative.positive


def test_regular_trace_of_stage_is_a_trace():
    A = group_stage(SU(2), 3)
    tau = A.regular_trace()
    rep = validate_trace(A, tau)
    assert rep.ad_invariant and rep.normalized


def test_amplify_small_cases():
    assert amplify(ground_field(), 2).dim == 4
    assert amplify(cyclic_group_algebra(3), 2).dim == 12
    Q2 = amplify(ground_field(), 2)
    assert structure_isomorphic_by(Q2, make_matrix_algebra(2), [0, 1, 2, 3])
    with pytest.raises(InvalidSize):
        amplify(ground_field(), 0)


def test_amplify_mat2_is_mat4():
    A, M4 = amplify(make_matrix_algebra(2), 2), make_matrix_algebra(4)
    # E_ij (x) E_ab  ->  E_{(i,a),(j,b)}
    perm = [0] * 16
    for i in range(2):
        for j in range(2):
            for a in range(2):
                for b in range(2):
                    perm[(i * 2 + j) * 4 + a * 2 + b] = (2 * i + a) * 4 + (2 * j + b)
    assert structure_isomorphic_by(A, M4, perm)
    form_a = trace_form(A)
    form_m = trace_form(M4)
    assert all(form_a[p][q] == form_m[perm[p]][perm[q]] for p in range(16) for q in range(16))


def test_unitalization_adds_unit():
    U = unitalization(make_matrix_algebra(2))
    assert U.dim == 5
    x = U.element({0: 3, 1: -1, 4: 2})
    assert U.one() * x == x == x * U.one()


def test_json_round_trip():
    A = product([make_matrix_algebra(2), cyclic_group_algebra(3)])
    B = StructureAlgebra.from_json(A.to_json())
    assert B.to_json() == A.to_json()
    assert B.dim == 7


M2 = make_matrix_algebra(2)


@st.composite
def mat2_elements(draw):
    A = M2
    vals = draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=4, max_size=4))
    return A.element(dict(enumerate(vals)))


@settings(max_examples=50, deadline=None)
@given(mat2_elements(), mat2_elements(), mat2_elements())
def test_star_is_an_antihomomorphism(x, y, z):
    assert (x * y).star() == y.star() * x.star()
    assert (x * y) * z == x * (y * z)


@settings(max_examples=50, deadline=None)
@given(mat2_elements())
def test_inverse(x):
    a, b, c, d = (x.coords.get(i, 0) for i in range(4))
    if a * d - b * c == 0:
        with pytest.raises(NotInvertible):
            x.inverse()
    else:
        xi = x.inverse()
        assert x * xi == x.algebra.one() == xi * x
