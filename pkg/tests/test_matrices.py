"""Exact matrix layer: rank, kernels, Kronecker products, Jordan types."""

import random

import numpy as np
import pytest

from restrep.fields import field
from restrep.matrices import (FieldMismatch, JordanType, Matrix, NotNilpotent,
                              column_space, intersect_spaces,
                              nilpotent_jordan_type, preimage_space)

FIELDS = [field(2), field(3), field(7), field(2, 2), field(3, 2)]


def test_rank_examples():
    F3 = field(3)
    assert Matrix.zeros(F3, 3).rank() == 0
    assert Matrix.jordan_block(F3, 3).rank() == 2
    assert Matrix.identity(F3, 5).rank() == 5


def test_rank_nullity_on_random_matrices():
    rng = random.Random(11)
    for F in FIELDS:
        for _ in range(25):
            m = Matrix.random(F, rng.randrange(1, 9), rng.randrange(1, 9), rng)
            ns = m.nullspace()
            assert ns.cols + m.rank() == m.cols
            if ns.cols:
                assert (m @ ns).is_zero()
            assert m.rank() == m.transpose().rank()


def test_rank_submultiplicative():
    rng = random.Random(5)
    for F in FIELDS:
        for _ in range(10):
            a = Matrix.random(F, 6, 5, rng)
            b = Matrix.random(F, 5, 7, rng)
            assert (a @ b).rank() <= min(a.rank(), b.rank())


def test_matmul_against_schoolbook():
    rng = random.Random(3)
    for F in FIELDS:
        a = Matrix.random(F, 4, 6, rng)
        b = Matrix.random(F, 6, 3, rng)
        ref = [[0] * 3 for _ in range(4)]
        for i in range(4):
            for j in range(3):
                s = 0
                for k in range(6):
                    s = F.add(s, F.mul(int(a.a[i, k]), int(b.a[k, j])))
                ref[i][j] = s
        assert (a @ b) == Matrix(F, ref)


def test_kron_definition_and_ordering():
    F2 = field(2)
    got = Matrix.jordan_block(F2, 2).kron(Matrix.identity(F2, 2))
    expect = Matrix.zeros(F2, 4, 4)
    expect.a[0, 2] = 1
    expect.a[1, 3] = 1
    assert got == expect
    assert Matrix.identity(F2, 2).kron(Matrix.identity(F2, 3)) == Matrix.identity(F2, 6)


def test_kron_rank_multiplicative():
    rng = random.Random(9)
    for _ in range(50):
        F = FIELDS[rng.randrange(len(FIELDS))]
        a = Matrix.random(F, rng.randrange(1, 5), rng.randrange(1, 5), rng)
        b = Matrix.random(F, rng.randrange(1, 5), rng.randrange(1, 5), rng)
        assert a.kron(b).rank() == a.rank() * b.rank()


def test_kron_associative():
    rng = random.Random(2)
    for F in (field(3), field(2, 2)):
        a, b, c = (Matrix.random(F, 2, 3, rng), Matrix.random(F, 3, 2, rng),
                   Matrix.random(F, 2, 2, rng))
        assert a.kron(b).kron(c) == a.kron(b.kron(c))


def test_kron_mixed_product():
    rng = random.Random(4)
    F = field(5)
    a, b = Matrix.random(F, 3, 3, rng), Matrix.random(F, 2, 2, rng)
    c, d = Matrix.random(F, 3, 3, rng), Matrix.random(F, 2, 2, rng)
    assert (a.kron(b)) @ (c.kron(d)) == (a @ c).kron(b @ d)


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        Matrix.identity(field(2), 2) @ Matrix.identity(field(3), 2)


def test_solve_and_inverse():
    rng = random.Random(8)
    for F in FIELDS:
        m = Matrix.random_invertible(F, 6, rng)
        rhs = Matrix.random(F, 6, 2, rng)
        x = m.solve(rhs)
        assert m @ x == rhs
        assert m @ m.inverse() == Matrix.identity(F, 6)
    # inconsistent system
    F = field(3)
    sing = Matrix.zeros(F, 2, 2)
    rhs = Matrix(F, [[1], [0]])
    assert sing.solve(rhs) is None


def test_nullspace_canonical():
    F = field(5)
    m = Matrix(F, [[1, 2, 3], [2, 4, 6]])
    ns1 = m.nullspace()
    ns2 = m.nullspace()
    assert np.array_equal(ns1.a, ns2.a)
    assert ns1.cols == 2
    assert Matrix.identity(F, 4).nullspace().cols == 0
    assert Matrix.jordan_block(F, 5).nullspace().cols == 1


def test_jordan_type_basics():
    F = field(3)
    assert nilpotent_jordan_type(Matrix.zeros(F, 4)).parts == (1, 1, 1, 1)
    assert nilpotent_jordan_type(Matrix.jordan_block(F, 3)).parts == (3,)
    with pytest.raises(NotNilpotent):
        nilpotent_jordan_type(Matrix.identity(F, 3))


def test_jordan_type_conjugation_invariant():
    # oracle: build a block diagonal with a known partition, conjugate randomly
    rng = random.Random(21)
    for F in (field(2), field(3), field(5, 2)):
        for _ in range(8):
            parts = [rng.randrange(1, 4) for _ in range(rng.randrange(1, 4))]
            n = sum(parts)
            blocks = np.zeros((n, n), dtype=np.int16)
            off = 0
            for s in parts:
                blocks[off:off + s, off:off + s] = Matrix.jordan_block(F, s).a
                off += s
            m = Matrix(F, blocks)
            S = Matrix.random_invertible(F, n, rng)
            conj = S @ m @ S.inverse()
            assert nilpotent_jordan_type(conj) == JordanType(parts)


def test_jordan_from_rank_sequence_example():
    # dim 9 with ranks 5, 1, 0 must give the partition {3, 2, 2, 2}
    F = field(3)
    blocks = np.zeros((9, 9), dtype=np.int16)
    off = 0
    for s in (3, 2, 2, 2):
        blocks[off:off + s, off:off + s] = Matrix.jordan_block(F, s).a
        off += s
    m = Matrix(F, blocks)
    assert m.rank() == 5 and (m @ m).rank() == 1
    assert nilpotent_jordan_type(m).parts == (3, 2, 2, 2)


def test_jordan_type_formatting_and_queries():
    jt = JordanType([2, 2, 3, 1])
    assert str(jt) == "J3+2J2+J1"
    assert jt.dimension == 8
    assert jt.multiplicity(2) == 2
    assert jt.is_free(3) is False
    assert JordanType([3, 3]).is_free(3)
    assert jt.has_part_strictly_between(1, 3)


def test_matrix_json_roundtrip():
    rng = random.Random(6)
    for F in (field(2), field(2, 2), field(3, 2)):
        m = Matrix.random(F, 3, 4, rng)
        again = Matrix.from_json(m.to_json())
        assert again == m
        data = m.to_json()
        assert data["rows"] == 3 and data["cols"] == 4
        assert len(data["entries"]) == 3 and len(data["entries"][0][0]) == F.e


def test_subspace_calculus():
    rng = random.Random(13)
    F = field(2, 2)
    for _ in range(10):
        m = Matrix.random(F, 6, 6, rng)
        img = column_space(m)
        assert img.cols == m.rank()
        pre = preimage_space(m, img)
        assert pre.cols == 6
        z = Matrix.zeros(F, 6, 0)
        assert preimage_space(m, z).cols == m.nullspace().cols
        s = column_space(Matrix.random(F, 6, 3, rng))
        t = column_space(Matrix.random(F, 6, 3, rng))
        cap = intersect_spaces(s, t)
        # intersection is inside both spans
        for c in range(cap.cols):
            v = cap.column(c)
            assert s.hstack(v).rank() == s.cols
            assert t.hstack(v).rank() == t.cols


def test_pow():
    F = field(3)
    n = Matrix.jordan_block(F, 4)
    assert n.pow(0) == Matrix.identity(F, 4)
    assert n.pow(2) == n @ n
    assert n.pow(4).is_zero()
