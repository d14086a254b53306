import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from leviflags.flags import (GeneralizedFlag, PreconditionViolation,
                             TautCouple, flag_from_chain, is_self_taut,
                             is_semiclosed, is_taut_couple, pair_index,
                             semiclosed_flag_from_chain, stabilizer_contains)
from leviflags.patterns import IndexPattern
from leviflags.sampling import (random_element, random_subspace,
                                random_vector, seed_from_env)
from leviflags.spaces import (DUAL_PAIR, LEFT, RIGHT, SELFDUAL_ANTI,
                              SELFDUAL_SYM, Operator, PairingSpec, SpaceSpec,
                              Vector)
from leviflags.subspaces import (Subspace, TailFamily, closure, equals, perp,
                                 span, subspace_sum)

SEED = seed_from_env()


def std_pair(universe="positive"):
    return SpaceSpec(DUAL_PAIR, universe)


def pat(universe, modulus, residues, threshold=0, **kw):
    return IndexPattern.make(universe, modulus, residues=residues,
                             threshold=threshold, **kw)


def basis_span(spec, side, pattern):
    return span((), (TailFamily(pattern, Vector.zero(spec, side)),),
                spec=spec, side=side)


def two_couple_space():
    row = ((IndexPattern.full("positive"), Fraction(1)),)
    return SpaceSpec(DUAL_PAIR, "positive", left_specials=("v",),
                     pairing=PairingSpec("kronecker", left_rows={"v": row}))


def two_couple_flags():
    """The odd/even splitting of the dual pair with one extra vector v on
    the V side carries exactly two taut couples; build both."""
    spec = two_couple_space()
    odd = pat("positive", 2, {1})
    even = pat("positive", 2, {0})
    x1 = basis_span(spec, LEFT, odd)
    x2 = basis_span(spec, LEFT, even)
    y1 = basis_span(spec, RIGHT, odd)
    y2 = basis_span(spec, RIGHT, even)
    x12 = subspace_sum(x1, x2)
    first = (flag_from_chain([x2, x12]), flag_from_chain([y1]))
    second = (flag_from_chain([x1, x12]), flag_from_chain([y2]))
    return spec, (x1, x2, y1, y2), first, second


def three_parabolic_couple():
    """The flag pair of the two-block parabolic whose summand order puts
    the odd block below the even one."""
    spec = std_pair()
    v1 = Vector.basis(spec, LEFT, 1)
    odd3 = pat("positive", 2, {1}, 2)
    even4 = pat("positive", 2, {0}, 3)
    x1 = span((), (TailFamily(odd3, v1),), spec=spec, side=LEFT)
    x2 = span((), (TailFamily(even4, v1),), spec=spec, side=LEFT)
    cv1 = span([v1], spec=spec, side=LEFT)
    mid1 = subspace_sum(cv1, x1)
    mid2 = subspace_sum(mid1, x2)
    flag_v = flag_from_chain([cv1, mid1, mid2])
    y2 = span((), (TailFamily(even4, Vector.basis(spec, RIGHT, 2)),),
              spec=spec, side=RIGHT)
    cv2s = span([Vector.basis(spec, RIGHT, 2)], spec=spec, side=RIGHT)
    flag_vstar = flag_from_chain([cv2s, subspace_sum(y2, cv2s), perp(cv1)])
    return spec, flag_v, flag_vstar


def selfdual_w_flag(kind):
    """0 < Cv_1 < Cv_1 + W < V where W = span{v_1 + v_i : i != +-1}."""
    spec = SpaceSpec(kind, "nonzero")
    not_unit = IndexPattern.make("nonzero", 1, pos_residues={0},
                                 neg_residues={0}, threshold=1)
    w = span((), (TailFamily(not_unit, Vector.basis(spec, LEFT, 1)),),
             spec=spec, side=LEFT)
    cv1 = span([Vector.basis(spec, LEFT, 1)], spec=spec, side=LEFT)
    return spec, flag_from_chain([cv1, subspace_sum(cv1, w)]), w


def test_flag_from_chain_sorts_and_dedupes():
    spec, F, _ = three_parabolic_couple()
    zero, cv1, mid1, mid2, full = F.members
    shuffled = flag_from_chain([mid2, cv1, mid1, mid1, cv1])
    assert shuffled == F
    assert list(shuffled.positions()) == [1, 2, 3, 4]
    lo, hi = shuffled.pair_at(2)
    assert equals(lo, cv1) and equals(hi, mid1)
    assert len(shuffled.pairs()) == 4


def test_flag_from_chain_empty_and_incomparable():
    spec = std_pair()
    trivial = flag_from_chain([], spec=spec, side=LEFT)
    assert len(trivial.members) == 2
    with pytest.raises(ValueError):
        flag_from_chain([])
    x1 = basis_span(spec, LEFT, pat("positive", 2, {1}))
    x2 = basis_span(spec, LEFT, pat("positive", 2, {0}))
    with pytest.raises(ValueError, match="totally ordered"):
        flag_from_chain([x1, x2])


def test_flag_validation():
    spec = std_pair()
    zero = Subspace.zero(spec, LEFT)
    full = Subspace.full(spec, LEFT)
    odd = basis_span(spec, LEFT, pat("positive", 2, {1}))
    with pytest.raises(ValueError):
        GeneralizedFlag([zero])
    with pytest.raises(ValueError, match="full space"):
        GeneralizedFlag([zero, odd])
    with pytest.raises(ValueError, match="must be 0"):
        GeneralizedFlag([odd, full])
    with pytest.raises(ValueError, match="strictly"):
        GeneralizedFlag([zero, odd, odd, full])
    with pytest.raises(ValueError, match="sides"):
        GeneralizedFlag([zero, Subspace.full(spec, RIGHT)])


def test_semiclosed_construction_inserts_closures():
    spec, F, _ = three_parabolic_couple()
    x1 = F.members[2]  # span{v_odd}: already closed, kept as-is
    nonclosed = span((), (TailFamily(pat("positive", 2, {1}, 2),
                                     Vector.basis(spec, LEFT, 1)),),
                     spec=spec, side=LEFT)
    built = semiclosed_flag_from_chain([Subspace.zero(spec, LEFT), nonclosed])
    assert len(built.members) == 4
    assert equals(built.members[1], nonclosed)
    assert equals(built.members[2], closure(nonclosed))
    assert equals(built.members[2], x1)
    assert is_semiclosed(built)
    # a chain of closed members passes through untouched
    plain = semiclosed_flag_from_chain([x1])
    assert plain == flag_from_chain([x1])


def test_semiclosed_construction_precondition():
    spec, (x1, x2, y1, y2), _, _ = two_couple_flags()
    x12 = subspace_sum(x1, x2)
    # x1 + x2 is not closed; the implicit bottom member 0 is closed, so the
    # closure (here V itself) slots in above it
    ok = semiclosed_flag_from_chain([x12])
    assert len(ok.members) == 3
    assert is_semiclosed(ok)
    with_zero = semiclosed_flag_from_chain([Subspace.zero(spec, LEFT), x12])
    assert ok.key() == with_zero.key()
    # two nonclosed members in a row violate even with a closed member below
    plain = std_pair()
    v1 = Vector.basis(plain, LEFT, 1)
    a = span((), (TailFamily(pat("positive", 2, {1}, 2), v1),),
             spec=plain, side=LEFT)
    b = subspace_sum(a, span((), (TailFamily(pat("positive", 2, {0}, 3), v1),),
                             spec=plain, side=LEFT))
    with pytest.raises(PreconditionViolation):
        semiclosed_flag_from_chain([Subspace.zero(plain, LEFT), a, b])


def test_is_semiclosed_negatives():
    spec, F, _ = three_parabolic_couple()
    x1_shifted = span((), (TailFamily(pat("positive", 2, {1}, 2),
                                      Vector.basis(spec, LEFT, 1)),),
                      spec=spec, side=LEFT)
    assert not is_semiclosed(flag_from_chain([x1_shifted]))
    # closure(X1+X2) = span{v_i : i != 2} misses both chain members
    x2_shifted = span((), (TailFamily(pat("positive", 2, {0}, 3),
                                      Vector.basis(spec, LEFT, 1)),),
                      spec=spec, side=LEFT)
    x12 = subspace_sum(x1_shifted, x2_shifted)
    bigger = subspace_sum(x12, span([Vector.basis(spec, LEFT, 2)],
                                    spec=spec, side=LEFT))
    assert not is_semiclosed(flag_from_chain([x12, bigger]))
    assert is_semiclosed(F)


def test_pair_index_two_couple():
    spec, _, (F1, G1), (F2, G2) = two_couple_flags()
    idx = pair_index(F1, G1)
    assert idx.closed == (1, 2)
    assert idx.wide == (1, 2)
    assert idx.partners == {1: 2, 2: 1}
    lo, hi = idx.partner_pair(1)
    assert equals(lo, G1.members[1]) and hi.is_full()
    idx2 = pair_index(F2, G2)
    assert idx2.closed == (1, 2) and idx2.partners == {1: 2, 2: 1}


def test_pair_index_three_parabolic():
    spec, F, G = three_parabolic_couple()
    idx = pair_index(F, G)
    assert idx.closed == (1, 2, 3, 4)
    assert idx.wide == (2, 3)
    assert idx.partners == {1: 4, 2: 3, 3: 2, 4: 1}


def test_pair_index_requires_semiclosed():
    spec, F, _ = three_parabolic_couple()
    nonclosed = span((), (TailFamily(pat("positive", 2, {1}, 2),
                                     Vector.basis(spec, LEFT, 1)),),
                     spec=spec, side=LEFT)
    with pytest.raises(ValueError, match="semiclosed"):
        pair_index(flag_from_chain([nonclosed]))


def test_tautness_two_couple():
    spec, _, (F1, G1), (F2, G2) = two_couple_flags()
    assert is_taut_couple(F1, G1)
    assert is_taut_couple(F2, G2)
    # crossing the pairs breaks tautness
    assert not is_taut_couple(F1, G2)
    assert not is_taut_couple(F2, G1)
    # a dual flag through span{v*_1} is not stabilized either
    g_bad = flag_from_chain([span([Vector.basis(spec, RIGHT, 1)],
                                  spec=spec, side=RIGHT)])
    assert not is_taut_couple(F1, g_bad)


def test_taut_couple_class():
    spec, F, G = three_parabolic_couple()
    assert is_taut_couple(F, G)
    couple = TautCouple(F, G)
    assert not couple.is_selfdual()
    assert couple.index.wide == (2, 3)
    # argument order is normalized so the V-side flag comes first
    assert TautCouple(G, F) == couple
    assert couple.flag_v.side == LEFT
    assert hash(TautCouple(G, F)) == hash(couple)


def test_taut_couple_rejects_non_taut():
    spec, _, (F1, G1), _ = two_couple_flags()
    g_bad = flag_from_chain([span([Vector.basis(spec, RIGHT, 1)],
                                  spec=spec, side=RIGHT)])
    with pytest.raises(ValueError, match="taut"):
        TautCouple(F1, g_bad)


def test_stabilizer_contains_rank_one():
    spec, _, (F1, G1), _ = two_couple_flags()

    def op(i, j):
        return Operator(spec, [(Vector.basis(spec, LEFT, i),
                                Vector.basis(spec, RIGHT, j))])

    # F1 = (0 < evens < evens+odds < V): v_2 (x) v*_4 keeps both middles
    assert stabilizer_contains(F1, op(2, 4))
    assert stabilizer_contains(F1, op(2, 3))
    # v_1 (x) v*_2 pushes v_2 out of the even block
    assert not stabilizer_contains(F1, op(1, 2))
    # the special vector v is outside every middle member
    special = Operator(spec, [(Vector(spec, LEFT, {}, {"v": Fraction(1)}),
                               Vector.basis(spec, RIGHT, 2))])
    assert not stabilizer_contains(F1, special)
    assert stabilizer_contains(G1, op(2, 4))


def test_stabilizer_matches_parabolic_formula():
    """Rank-one operators x (x) u with x in a successor and u in the perp
    of its predecessor stabilize both flags of a taut couple."""
    spec, F, G = three_parabolic_couple()
    rng = random.Random(SEED)
    for j in F.positions():
        lo, hi = F.pair_at(j)
        for _ in range(3):
            x = random_element(rng, hi)
            u = random_element(rng, perp(lo))
            op = Operator(spec, [(x, u)])
            assert stabilizer_contains(F, op)
            assert stabilizer_contains(G, op)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_stabilizer_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    spec = std_pair(rng.choice(["positive", "integers"]))
    s = random_subspace(rng, spec, LEFT)
    flag = flag_from_chain([s])
    op = Operator(spec, [(random_vector(rng, spec, LEFT, 5),
                          random_vector(rng, spec, RIGHT, 5))
                         for _ in range(rng.randint(1, 2))])
    # probe far past the periodic window, so the sampled check is exact too
    from leviflags.spaces import operator_apply
    from leviflags.subspaces import contains_vector
    probes = list(s.rows)
    for fam in s.families:
        for i in fam.pattern.members_within(40):
            probes.append(Vector.basis(spec, LEFT, i).add(fam.anchor))
    brute = all(contains_vector(s, operator_apply(spec, op, p))
                for p in probes)
    assert stabilizer_contains(flag, op) == brute


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_semiclosed_construction_random_chain(seed):
    rng = random.Random(seed)
    spec = std_pair(rng.choice(["positive", "nonzero", "integers"]))
    s = random_subspace(rng, spec, LEFT)
    built = semiclosed_flag_from_chain([Subspace.zero(spec, LEFT), s])
    assert is_semiclosed(built)
    assert any(equals(m, s) for m in built.members)


@pytest.mark.parametrize("kind", [SELFDUAL_SYM, SELFDUAL_ANTI])
def test_self_taut_example(kind):
    spec, F, w = selfdual_w_flag(kind)
    assert is_semiclosed(F)
    assert is_self_taut(F)
    idx = pair_index(F)
    assert idx.closed == (1,)
    assert idx.wide == ()
    assert idx.partners == {1: 3}
    couple = TautCouple(F)
    assert couple.is_selfdual()
    # middle member Cv_1 + W is exactly the perp of Cv_1
    assert equals(F.members[2], perp(F.members[1]))


def test_side_mismatch_guards():
    spec, F, G = three_parabolic_couple()
    with pytest.raises(ValueError, match="self"):
        is_self_taut(F)
    sd_spec, sd_flag, _ = selfdual_w_flag(SELFDUAL_SYM)
    with pytest.raises(ValueError, match="self"):
        is_taut_couple(sd_flag, sd_flag)
    with pytest.raises(ValueError, match="opposite"):
        is_taut_couple(F, F)
