from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from oracles import (brute_force_irreps, phi_by_coefficients, so_odd_dim, sp_dim,
                     su_dim_hook_content)
from ncchern.errors import AlgebraMismatch, DomainError, NonSquare
from ncchern.lie import (SO, SU, ChernTable, ExteriorAlgebra, Sp, cartan_matrix,
                         chern_so_odd, chern_su, ext_mul, irrep_dims, is_generating,
                         phi, positive_roots, primitive_degrees, weyl_dimension)


def test_primitive_degrees():
    assert primitive_degrees(SU(2)) == [3]
    assert primitive_degrees(SU(4)) == [3, 5, 7]
    assert primitive_degrees(SO(5)) == [3, 7]
    assert primitive_degrees(Sp(3)) == [3, 7, 11]


@pytest.mark.parametrize("G, count", [(SU(2), 1), (SU(3), 3), (SU(4), 6), (SO(5), 4), (SO(7), 9), (Sp(3), 9)])
def test_positive_root_counts(G, count):
    assert len(positive_roots(cartan_matrix(G))) == count


def test_phi_examples_and_domain():
    assert all(phi(n, 1, q) == 1 for n in range(1, 6) for q in range(1, 6))
    assert phi(3, 2, 2) == 1
    assert phi(3, 3, 2) == 0
    for bad in [(3, 0, 2), (3, 4, 2), (3, 2, 0)]:
        with pytest.raises(DomainError):
            phi(*bad)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 14).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n), st.integers(1, 9))))
def test_phi_matches_coefficient_oracle(args):
    assert phi(*args) == phi_by_coefficients(*args)


def test_su2_dims():
    for N in range(1, 13):
        assert [d for _, d in irrep_dims(SU(2), N)] == list(range(1, N + 1))


def test_su3_contains_adjoint():
    dims = dict(irrep_dims(SU(3), 6))
    assert dims[(1, 1)] == 8
    assert irrep_dims(SO(5), 1) == [((0, 0), 1)]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=4))
def test_su_weyl_matches_hook_content(w):
    assert weyl_dimension(SU(len(w) + 1), w) == su_dim_hook_content(w)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=2, max_size=4))
def test_so_and_sp_weyl_match_orthogonal_formulas(w):
    n = len(w)
    assert weyl_dimension(SO(2 * n + 1), w) == so_odd_dim(w)
    assert weyl_dimension(Sp(n), w) == sp_dim(w)


@pytest.mark.parametrize("G, dim_fn, ok", [
    (SU(3), su_dim_hook_content, lambda w: True),
    (SU(4), su_dim_hook_content, lambda w: True),
    (Sp(2), sp_dim, lambda w: True),
    (Sp(3), sp_dim, lambda w: True),
    # genuine SO(2n+1) representations: the spin label is even
    (SO(5), so_odd_dim, lambda w: w[-1] % 2 == 0),
    (SO(7), so_odd_dim, lambda w: w[-1] % 2 == 0),
])
def test_enumeration_matches_brute_force(G, dim_fn, ok):
    count = 12
    got = irrep_dims(G, count)
    top = got[-1][1]
    # every weight outside the box already has larger dimension
    box = 9
    for i in range(G.rank):
        edge = [0] * G.rank
        edge[i] = box
        assert dim_fn(edge) > top
    assert got == brute_force_irreps(dim_fn, G.rank, box, count, ok)


def test_chern_su_small_tables():
    assert chern_su(1).matrix == ((Fraction(-1),),)
    T = chern_su(2)
    assert T.matrix == ((-1, Fraction(1, 2)), (-1, Fraction(-1, 2)))
    assert is_generating(chern_su(1)) == (True, -1)
    assert is_generating(T) == (True, 1)


def test_chern_su_matches_formula():
    n = 4
    T = chern_su(n)
    for k in range(1, n + 1):
        for i in range(1, n + 1):
            want = Fraction((-1) ** i, factorial(i)) * phi_by_coefficients(n + 1, k, i + 1)
            assert T.matrix[k - 1][i - 1] == want
            assert factorial(i) % want.denominator == 0


def test_chern_so_odd_formula_and_shape():
    n = 3
    T = chern_so_odd(n)
    assert T.shape == (n, n)
    assert T.columns == ("x3", "x7", "x11")
    for k in range(1, n):
        for i in range(1, n + 1):
            want = Fraction(2 * (-1) ** (i - 1), factorial(2 * i - 1)) * phi_by_coefficients(2 * n + 1, k, 2 * i)
            assert T.matrix[k - 1][i - 1] == want
    for i in range(1, n + 1):
        s = sum(phi_by_coefficients(2 * n + 1, k, 2 * i) for k in range(1, n + 1))
        assert T.matrix[-1][i - 1] == Fraction((-1) ** (i - 1), 2 ** (n - 1) * factorial(2 * i - 1)) * s
    assert chern_so_odd(2).matrix == ((2, Fraction(-1, 3)), (2, Fraction(1, 6)))
    with pytest.raises(DomainError):
        chern_so_odd(1)


def test_chern_so_odd_full_lambda_reading_is_not_square():
    T = chern_so_odd(3, lambda_rows="n")
    assert T.shape == (4, 3)
    with pytest.raises(NonSquare):
        is_generating(T)


def test_generating_certification():
    for n in range(1, 9):
        ok, d = is_generating(chern_su(n))
        assert ok and d != 0
    for n in range(2, 6):
        ok, d = is_generating(chern_so_odd(n))
        assert ok and d != 0
    zero = ChernTable(SU(3), ("a", "b"), ("x3", "x5"), ((Fraction(0),) * 2,) * 2)
    assert is_generating(zero) == (False, 0)


def test_chern_csv_and_json():
    csv_text = chern_su(2).to_csv()
    assert csv_text.splitlines() == ["row,x3,x5", "rho1,-1/1,1/2", "rho2,-1/1,-1/2", "det,1/1"]
    assert '"det":"1/1"' in chern_su(2).to_json()


def test_exterior_examples():
    E = ExteriorAlgebra([3, 5])
    x3, x5 = E.generator(0), E.generator(1)
    assert (x3 ^ x3) == E.element({})
    assert (x3 ^ x5) == -1 * (x5 ^ x3)
    assert ext_mul(x3 + x5, x3 - x5) == -2 * (x3 ^ x5)
    assert len(E.basis()) == 4
    with pytest.raises(AlgebraMismatch):
        ext_mul(x3, ExteriorAlgebra([3, 7]).generator(0))


ext3 = ExteriorAlgebra([3, 5, 7])


@st.composite
def ext_elements(draw):
    terms = {}
    for s in ext3.basis():
        c = draw(st.integers(-2, 2))
        if c:
            terms[s] = c
    return ext3.element(terms)


def _degree(s):
    return sum(ext3.degrees[i] for i in s)


@settings(max_examples=60, deadline=None)
@given(ext_elements(), ext_elements(), ext_elements())
def test_exterior_associative(u, v, w):
    assert (u ^ v) ^ w == u ^ (v ^ w)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ext3.basis()), st.sampled_from(ext3.basis()))
def test_exterior_graded_commutative(s, t):
    a, b = ext3.element({s: 1}), ext3.element({t: 1})
    sign = (-1) ** (_degree(s) * _degree(t))
    assert (a ^ b) == sign * (b ^ a)
