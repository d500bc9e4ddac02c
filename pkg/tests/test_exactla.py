from fractions import Fraction

import pytest

from panache.exactla import (GF, QQ, LinAlgError, Matrix, Subspace, enumerate_subspaces, find_invertible,
                             rref_kernel_image, solve, solve_affine, subspace_ops)


def test_zero_matrix_kernel_and_image():
    _, ker, im = rref_kernel_image(Matrix.zeros(QQ, 2, 3))
    assert ker == Subspace.full(QQ, 3)
    assert im == Subspace.zero(QQ, 2)


def test_identity_kernel_and_image():
    _, ker, im = rref_kernel_image(Matrix.identity(QQ, 3))
    assert ker.dim == 0
    assert im == Subspace.full(QQ, 3)


def test_rank_one_matrix_kernel_and_image():
    _, ker, im = rref_kernel_image(Matrix(QQ, [[1, 2], [2, 4]]))
    assert ker == Subspace.span(QQ, 2, [(-2, 1)])
    assert im == Subspace.span(QQ, 2, [(1, 2)])


def test_solve_identity_and_trivial_systems():
    b = Matrix(QQ, [[1, 2], [3, 4]])
    assert solve(Matrix.identity(QQ, 2), b) == b
    assert solve(Matrix.zeros(QQ, 2, 2), Matrix.zeros(QQ, 2, 1)).is_zero()


def test_solve_scalar_division():
    x = solve(Matrix(QQ, [[2]]), Matrix(QQ, [[3]]))
    assert x[0, 0] == Fraction(3, 2)


def test_solve_inconsistent_returns_none():
    assert solve(Matrix(QQ, [[1], [1]]), Matrix(QQ, [[1], [2]])) is None


def test_subspace_ops_equal_and_complementary():
    u = Subspace.span(QQ, 2, [(1, 0)])
    s, i, c = subspace_ops(u, u)
    assert s == u and i == u and c
    v = Subspace.span(QQ, 2, [(0, 1)])
    s, i, _ = subspace_ops(u, v)
    assert s == Subspace.full(QQ, 2) and i.dim == 0


def test_subspace_membership():
    u = Subspace.span(QQ, 3, [(1, 1, 0)])
    v = Subspace.span(QQ, 3, [(1, 1, 0), (0, 0, 1)])
    assert u.issubspace(v)
    assert subspace_ops(v, u)[2]


def test_prime_field_arithmetic():
    f = GF(3)
    m = Matrix(f, [[1, 2], [2, 1]])
    assert m.rank() == 1
    assert (m @ m) == Matrix(f, [[2, 1], [1, 2]])


def test_parse_and_format_roundtrip():
    m = Matrix(QQ, [[Fraction(1, 2), -3]])
    assert Matrix.from_json(QQ, m.to_json()) == m
    assert m.to_json() == [["1/2", "-3"]]


def test_bad_scalar_rejected():
    with pytest.raises(LinAlgError):
        QQ.parse("x")


def test_non_prime_field_rejected():
    with pytest.raises(LinAlgError):
        GF(4)


def test_field_mismatch_rejected():
    with pytest.raises(LinAlgError):
        Matrix.identity(QQ, 2) + Matrix.identity(GF(2), 2)


def test_enumerate_subspaces_counts_gaussian_binomials():
    # number of subspaces of F_2^3 is 1 + 7 + 7 + 1
    assert sum(1 for _ in enumerate_subspaces(GF(2), 3)) == 16
    assert sum(1 for _ in enumerate_subspaces(GF(3), 2, 1)) == 4


def test_solve_affine_particular_and_kernel():
    part, ker = solve_affine(QQ, 2, [({0: 1, 1: 1}, 2)])
    assert part[0] + part[1] == 2
    assert ker.dim == 1


def test_find_invertible_in_span():
    mats = [Matrix(QQ, [[1, 0], [0, 0]]), Matrix(QQ, [[0, 0], [0, 1]])]
    m, _ = find_invertible(QQ, mats)
    assert m is not None and m.is_invertible()
    assert find_invertible(QQ, mats[:1])[0] is None
