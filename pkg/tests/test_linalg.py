from fractions import Fraction

from groupgraph import linalg


def F(x):
    return Fraction(x)


def test_rref_and_rank():
    m = linalg.mat([[1, 2], [2, 4]])
    r, pivots = linalg.rref(m)
    assert pivots == [0]
    assert linalg.rank(m) == 1
    assert linalg.rank(linalg.mat([[1, 0], [0, 1]])) == 2
    assert linalg.rank([]) == 0


def test_kernel_basis():
    # kernel of [1, -2] is spanned by (2, 1)
    basis = linalg.kernel_basis(linalg.mat([[1, -2]]), 2)
    assert len(basis) == 1
    v = basis[0]
    assert v[0] - 2 * v[1] == 0


def test_solve():
    m = linalg.mat([[2, 0], [0, 3]])
    assert linalg.solve(m, [F(4), F(9)], 2) == [F(2), F(3)]
    assert linalg.solve(linalg.mat([[1], [1]]), [F(1), F(2)], 1) is None


def test_in_span():
    assert linalg.in_span([[F(1), F(0)]], [F(3), F(0)])
    assert not linalg.in_span([[F(1), F(0)]], [F(0), F(1)])
    assert linalg.in_span([], [F(0), F(0)])
    assert not linalg.in_span([], [F(1), F(0)])


def test_quotient_map_kills_exactly_the_subspace():
    sub = [[F(1), F(1), F(0)]]
    q = linalg.quotient_map(sub, 3)
    assert len(q) == 2
    assert all(x == 0 for x in linalg.mat_vec(q, sub[0]))
    # composed with the section it is the identity on the quotient
    s = linalg.quotient_section(sub, 3)
    qs = linalg.mat_mul(q, s)
    assert qs == linalg.identity(2)


def test_extend_to_basis_is_deterministic():
    got = linalg.extend_to_basis([[F(1), F(1), F(0)]], 3)
    assert got == [0, 2]  # e0 raises the rank, e1 does not after e0, e2 does


def test_kron_shapes():
    a = linalg.mat([[2]])
    out = linalg.kron(a, (1, 1), linalg.identity(3), (3, 3))
    assert out == linalg.mat([[2, 0, 0], [0, 2, 0], [0, 0, 2]])
    out = linalg.kron([], (0, 1), linalg.identity(2), (2, 2))
    assert out == []


def test_rank_mod_p():
    assert linalg.rank_mod_p([[2, 0], [0, 2]], 2) == 0
    assert linalg.rank_mod_p([[2, 0], [0, 2]], 3) == 2
    assert linalg.rank_mod_p([[1, 1], [1, 1]], 5) == 1


def test_inverse():
    m = linalg.mat([[1, 2], [3, 5]])
    inv = linalg.inverse(m)
    assert linalg.mat_mul(m, inv) == linalg.identity(2)


def test_frac_json_round_trip():
    vals = [F(3), Fraction(1, 2), F(-7)]
    encoded = [linalg.frac_to_json(v) for v in vals]
    assert encoded == [3, "1/2", -7]
    assert [linalg.frac(v) for v in encoded] == vals
