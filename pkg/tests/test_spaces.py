import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from leviflags.patterns import IndexPattern
from leviflags.spaces import (DUAL_PAIR, LEFT, RIGHT, SELFDUAL_ANTI,
                              SELFDUAL_SYM, Operator, PairingSpec, SpaceSpec,
                              Vector, lambda_embed, operator_apply,
                              operator_bracket, pair, s_embed,
                              validate_pairing)


def std_pair(universe="positive"):
    return SpaceSpec(DUAL_PAIR, universe)


def test_kronecker_pairing():
    spec = std_pair()
    v = Vector.basis(spec, LEFT, 3)
    assert pair(spec, v, Vector.basis(spec, RIGHT, 3)) == 1
    assert pair(spec, v, Vector.basis(spec, RIGHT, 4)) == 0
    x = Vector(spec, LEFT, {1: 2, 5: -1})
    u = Vector(spec, RIGHT, {1: Fraction(1, 2), 5: 3})
    assert pair(spec, x, u) == 1 - 3


def test_hyperbolic_pairing_signs():
    sym = SpaceSpec(SELFDUAL_SYM, "nonzero")
    anti = SpaceSpec(SELFDUAL_ANTI, "nonzero")
    for spec, sgn in ((sym, 1), (anti, -1)):
        a = Vector.basis(spec, LEFT, 2)
        b = Vector.basis(spec, LEFT, -2)
        assert pair(spec, a, b) == 1
        assert pair(spec, b, a) == sgn
        assert pair(spec, a, a) == 0
    # antisymmetric form vanishes on every vector
    x = Vector(anti, LEFT, {1: 2, -1: 5, 3: 1, -3: -7})
    assert pair(anti, x, x) == 0


def test_special_rows():
    # s pairs with every even v*_j
    row = ((IndexPattern.make("positive", 2, residues={0}), Fraction(1)),)
    spec = SpaceSpec(DUAL_PAIR, "positive", left_specials=("s",),
                     pairing=PairingSpec("kronecker", left_rows={"s": row}))
    s = Vector.special_basis(spec, LEFT, "s")
    assert pair(spec, s, Vector.basis(spec, RIGHT, 4)) == 1
    assert pair(spec, s, Vector.basis(spec, RIGHT, 5)) == 0


def test_rank_one_action():
    spec = std_pair()
    op = Operator(spec, [(Vector.basis(spec, LEFT, 1),
                          Vector.basis(spec, RIGHT, 2))])  # v1 (x) v*2
    out = operator_apply(spec, op, Vector.basis(spec, LEFT, 2))
    assert out.key() == Vector.basis(spec, LEFT, 1).key()
    assert operator_apply(spec, op, Vector.basis(spec, LEFT, 3)).is_zero()
    # dual action sends v*1 to -v*2
    out = operator_apply(spec, op, Vector.basis(spec, RIGHT, 1))
    assert out.key() == Vector.basis(spec, RIGHT, 2).scale(-1).key()


def elementary(spec, i, j):
    return Operator(spec, [(Vector.basis(spec, LEFT, i),
                            Vector.basis(spec, RIGHT, j))])


def test_bracket_on_elementaries():
    spec = std_pair()
    probes = [Vector.basis(spec, LEFT, k) for k in range(1, 7)]
    # [E_12, E_23] = E_13
    b = operator_bracket(spec, elementary(spec, 1, 2), elementary(spec, 2, 3))
    want = elementary(spec, 1, 3)
    for p in probes:
        assert operator_apply(spec, b, p).key() == \
            operator_apply(spec, want, p).key()
    # [E_12, E_34] = 0
    b = operator_bracket(spec, elementary(spec, 1, 2), elementary(spec, 3, 4))
    assert b.is_zero_on(probes)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_jacobi(seed):
    rng = random.Random(seed)
    spec = std_pair()

    def rand_op():
        return Operator(spec, [(Vector(spec, LEFT,
                                       {rng.randint(1, 4): rng.randint(-2, 2)
                                        for _ in range(2)}),
                                Vector(spec, RIGHT,
                                       {rng.randint(1, 4): rng.randint(-2, 2)
                                        for _ in range(2)}))])

    a, b, c = rand_op(), rand_op(), rand_op()
    jac = []
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        jac.append(operator_bracket(spec, operator_bracket(spec, x, y), z))
    probes = [Vector.basis(spec, LEFT, k) for k in range(1, 6)]
    for p in probes:
        total = Vector.zero(spec, LEFT)
        for op in jac:
            total = total.add(operator_apply(spec, op, p))
        assert total.is_zero()


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_embeddings_are_form_skew(seed):
    rng = random.Random(seed)
    for kind, embed in ((SELFDUAL_SYM, lambda_embed), (SELFDUAL_ANTI, s_embed)):
        spec = SpaceSpec(kind, "nonzero")

        def rand_vec():
            return Vector(spec, LEFT, {rng.choice([1, -1, 2, -2, 3, -3]):
                                       rng.randint(-2, 2) for _ in range(2)})

        op = embed(spec, Operator(spec, [(rand_vec(), rand_vec())]))
        for _ in range(4):
            x, y = rand_vec(), rand_vec()
            gx = operator_apply(spec, op, x)
            gy = operator_apply(spec, op, y)
            assert pair(spec, gx, y) + pair(spec, x, gy) == 0


def test_embed_rejects_dual_pair():
    spec = std_pair()
    op = elementary(spec, 1, 1)
    with pytest.raises(ValueError):
        lambda_embed(spec, op)
    with pytest.raises(ValueError):
        s_embed(spec, op)


def test_validate_pairing_standard():
    ok, wit = validate_pairing(std_pair(), 10)
    assert ok and not wit
    ok, wit = validate_pairing(SpaceSpec(SELFDUAL_ANTI, "nonzero"), 10)
    assert ok and not wit


def test_validate_pairing_duplicate_special():
    row = ((IndexPattern.make("positive", 2, residues={1}), Fraction(1)),)
    spec = SpaceSpec(DUAL_PAIR, "positive", left_specials=("a", "b"),
                     pairing=PairingSpec("kronecker",
                                         left_rows={"a": row, "b": row}))
    ok, wit = validate_pairing(spec, 10)
    assert not ok
    assert any(w.side == LEFT and w.special for w in wit)
    # the witness a - b really is in the radical
    w = next(w for w in wit if w.special)
    assert sorted(w.special) == ["a", "b"]


def test_validate_pairing_cutoff_precondition():
    row = ((IndexPattern.make("positive", 12, residues={1}), Fraction(1)),)
    spec = SpaceSpec(DUAL_PAIR, "positive", left_specials=("a",),
                     pairing=PairingSpec("kronecker", left_rows={"a": row}))
    with pytest.raises(ValueError):
        validate_pairing(spec, 10)
    ok, _ = validate_pairing(spec, 12)
    assert ok
