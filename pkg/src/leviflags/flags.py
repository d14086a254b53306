"""Finite generalized flags, taut couples, and stabilizer membership.

A flag is a finite strictly increasing chain of subspaces running from 0 to
the whole space; consecutive members are its predecessor-successor pairs.
The closed pairs (closed predecessor, plus an isotropic successor on
self-dual spaces) and the wide ones among them (gap dimension above 1) are
what the Levi machinery downstream consumes.

Tautness -- every member's perp stable under the partner flag's stabilizer
-- is decided exactly: a full rank-one block A (x) B maps a subspace W into
itself precisely when B lies in W or A kills W, so stability reduces to
inclusion tests against each member's perp and closure.
"""

import functools
import itertools
from math import lcm

from .patterns import IndexPattern
from .spaces import LEFT, Vector, operator_apply
from .subspaces import (QuotientDim, Subspace, _excluded_bound,
                        _pairing_bound, _row_moduli, closure, contains_vector,
                        equals, includes, is_closed, is_isotropic, perp,
                        quotient_dim)


class PreconditionViolation(Exception):
    """A chain fed to the closure-inserting constructor has a nonclosed
    member that is not the immediate successor of a closed member."""


class GeneralizedFlag:
    """Finite chain 0 = F_0 < F_1 < ... < F_k = full space.

    Members are Subspace values on a single side; strictness of every
    inclusion is verified.  Pair positions are 1-based: position j is the
    pair (members[j-1], members[j]).
    """

    def __init__(self, members):
        members = tuple(members)
        if len(members) < 2:
            raise ValueError("a flag needs at least 0 and the full space")
        spec, side = members[0].spec, members[0].side
        for m in members:
            if m.spec is not spec or m.side != side:
                raise ValueError("flag members from different spaces/sides")
        if not members[0].is_zero():
            raise ValueError("first flag member must be 0")
        if not members[-1].is_full():
            raise ValueError("last flag member must be the full space")
        for a, b in zip(members, members[1:]):
            if not includes(b, a) or equals(a, b):
                raise ValueError("flag members must strictly increase")
        self.spec = spec
        self.side = side
        self.members = members

    def positions(self):
        return range(1, len(self.members))

    def pair_at(self, j):
        return self.members[j - 1], self.members[j]

    def pairs(self):
        return list(zip(self.members, self.members[1:]))

    def key(self):
        return tuple(m.key() for m in self.members)

    def __eq__(self, other):
        return isinstance(other, GeneralizedFlag) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "Flag<%s: %d members>" % (self.side, len(self.members))


def _ordered_chain(subs):
    """Distinct chain members sorted by inclusion; raises if two members
    are incomparable."""
    subs = list(subs)
    for a, b in itertools.combinations(subs, 2):
        if not (includes(a, b) or includes(b, a)):
            raise ValueError("chain is not totally ordered by inclusion")

    def cmp(a, b):
        if equals(a, b):
            return 0
        return 1 if includes(a, b) else -1

    subs.sort(key=functools.cmp_to_key(cmp))
    out = []
    for s in subs:
        if not out or out[-1].key() != s.key():
            out.append(s)
    return out


def flag_from_chain(chain, spec=None, side=None):
    """The flag with the same stabilizer as a finite totally ordered chain:
    the chain itself with 0 and the full space adjoined.

    An empty chain needs spec= and side=.
    """
    subs = list(chain)
    if subs:
        spec, side = subs[0].spec, subs[0].side
    elif spec is None or side is None:
        raise ValueError("empty chain needs spec= and side=")
    members = _ordered_chain(subs)
    if not members or not members[0].is_zero():
        members.insert(0, Subspace.zero(spec, side))
    if not members[-1].is_full():
        members.append(Subspace.full(spec, side))
    return GeneralizedFlag(members)


def semiclosed_flag_from_chain(chain, spec=None, side=None):
    """Insert member closures into a chain, giving the unique semiclosed
    flag with the chain's stabilizer.

    Every nonclosed chain member must sit immediately above a closed chain
    member (so its closure slots in without disturbing the others); raises
    PreconditionViolation otherwise.
    """
    subs = list(chain)
    if subs:
        spec, side = subs[0].spec, subs[0].side
    elif spec is None or side is None:
        raise ValueError("empty chain needs spec= and side=")
    members = _ordered_chain(subs)
    extra = []
    # the implicit bottom member 0 is closed
    prev_closed = True
    for m in members:
        c = closure(m)
        if equals(c, m):
            prev_closed = True
        else:
            if prev_closed is not True:
                raise PreconditionViolation(
                    "nonclosed chain member without a closed immediate "
                    "predecessor: %r" % (m,))
            prev_closed = False
            extra.append(c)
    return flag_from_chain(members + extra, spec=spec, side=side)


def is_semiclosed(flag):
    """closure(F') lands in {F', F''} for every consecutive pair."""
    for lo, hi in flag.pairs():
        c = closure(lo)
        if not (equals(c, lo) or equals(c, hi)):
            return False
    return True


class PairIndex:
    """Pair bookkeeping for a semiclosed flag.

    closed: positions whose predecessor is closed (self-dual spaces also
    require an isotropic successor); wide: the closed positions with gap
    dimension above 1.  partners maps a closed position j to the position
    of its partner pair in the dual flag, located through the identities
    F' = perp(G'') and G' = perp(F'').  For self-dual flags the partner
    pair lives in the same flag.
    """

    def __init__(self, flag, dual, closed, wide, partners):
        self.flag = flag
        self.dual = dual
        self.closed = tuple(closed)
        self.wide = tuple(wide)
        self.partners = dict(partners)

    def pair_at(self, j):
        return self.flag.pair_at(j)

    def partner_pair(self, j):
        return self.dual.pair_at(self.partners[j])

    def __repr__(self):
        return "PairIndex(closed=%r, wide=%r, partners=%r)" % (
            self.closed, self.wide, self.partners)


def pair_index(flag, dual=None):
    """Classify the pairs of a semiclosed flag and, when the dual flag is
    available, match each closed pair with its partner."""
    if not is_semiclosed(flag):
        raise ValueError("pair_index needs a semiclosed flag")
    selfdual = flag.spec.is_selfdual()
    if selfdual:
        if dual is not None and dual is not flag:
            raise ValueError("self-dual flags carry their own partner pairs")
        dual = flag
    elif dual is not None:
        if dual.spec is not flag.spec or dual.side == flag.side:
            raise ValueError("dual flag must be on the opposite side")
        if not is_semiclosed(dual):
            raise ValueError("pair_index needs semiclosed flags")

    closed_pos, wide = [], []
    for j in flag.positions():
        lo, hi = flag.pair_at(j)
        if not is_closed(lo):
            continue
        if selfdual and not is_isotropic(hi):
            continue
        closed_pos.append(j)
        if quotient_dim(lo, hi) != QuotientDim.finite(1):
            wide.append(j)

    partners = {}
    if dual is not None:
        dual_perps = [perp(m) for m in dual.members]
        for j in closed_pos:
            lo, hi = flag.pair_at(j)
            want_lo = perp(hi)
            for b in dual.positions():
                if equals(dual.members[b - 1], want_lo) and \
                        equals(dual_perps[b], lo):
                    partners[j] = b
                    break
    return PairIndex(flag, dual, closed_pos, wide, partners)


def _perps_stable(f, g):
    """Is perp(member) stable under g's stabilizer for every member of f?

    The stabilizer of g is the sum over its pairs (lo, hi) of the blocks
    perp(lo) (x) hi; such a block keeps W = perp(member) inside itself
    exactly when hi lies in W or perp(lo) lies in perp(W) = closure(member).
    """
    g_perps = [perp(m) for m in g.members]
    for m in f.members:
        pw = perp(m)
        cl = perp(pw)
        for b in g.positions():
            if includes(pw, g.members[b]):
                continue
            if includes(cl, g_perps[b - 1]):
                continue
            return False
    return True


def is_taut_couple(flag_v, flag_vstar):
    """Do two semiclosed flags on the two sides of a dual pair stabilize
    each other's member perps?"""
    f, g = flag_v, flag_vstar
    if f.spec.is_selfdual():
        raise ValueError("use is_self_taut on a self-dual space")
    if g.spec is not f.spec or g.side == f.side:
        raise ValueError("a taut couple needs flags on opposite sides")
    if not is_semiclosed(f) or not is_semiclosed(g):
        raise ValueError("taut couples are made of semiclosed flags")
    return _perps_stable(f, g) and _perps_stable(g, f)


def is_self_taut(flag):
    """Self-dual version: every member's perp stable under the flag's own
    stabilizer."""
    if not flag.spec.is_selfdual():
        raise ValueError("is_self_taut needs a self-dual space")
    if not is_semiclosed(flag):
        raise ValueError("self-taut flags are semiclosed")
    return _perps_stable(flag, flag)


def _operator_bound(op):
    b = 0
    for x, u in op.terms:
        for (tag, i), _ in list(x.coords()) + list(u.coords()):
            if tag == "r":
                b = max(b, abs(i))
    return b


def _member_stable(sub, op):
    """T.sub inside sub, decided exactly.

    Beyond a bound covering the member's window, the operator's support,
    and the pairing rows, the image of a tail member v_i + anchor is the
    same vector for every i in a residue class, so one representative per
    class settles the whole tail.
    """
    spec, side = sub.spec, sub.side
    bound = max(sub.window_bound(), _pairing_bound(spec),
                _excluded_bound(spec), _operator_bound(op), 1)
    modulus = lcm(sub.moduli_lcm(), _row_moduli(spec))
    for row in sub.rows:
        if not contains_vector(sub, operator_apply(spec, op, row)):
            return False
    for fam in sub.families:
        reps = list(fam.pattern.members_within(bound))
        tail = fam.pattern.tail_beyond(bound)
        for sign, r in tail.tail_classes(modulus, bound):
            reps.append(IndexPattern.class_rep(sign, r, modulus, bound))
        for i in reps:
            v = Vector.basis(spec, side, i).add(fam.anchor)
            if not contains_vector(sub, operator_apply(spec, op, v)):
                return False
    return True


def stabilizer_contains(flag, op):
    """Does the operator keep every flag member inside itself?"""
    for m in flag.members[1:-1]:
        if not _member_stable(m, op):
            return False
    return True


class TautCouple:
    """A validated taut couple: flags on the two sides of a dual pair with
    mutually stabilized member perps, or a single self-taut flag on a
    self-dual space (flag_vstar=None).

    Construction checks tautness, then requires every closed pair to have
    a partner pair satisfying F' = perp(G'') and G' = perp(F'').
    """

    def __init__(self, flag_v, flag_vstar=None):
        if flag_vstar is None:
            if not flag_v.spec.is_selfdual():
                raise ValueError("one-flag couples need a self-dual space")
            if not is_self_taut(flag_v):
                raise ValueError("flag is not self-taut")
            self.index = pair_index(flag_v)
        else:
            if flag_v.side != LEFT:
                flag_v, flag_vstar = flag_vstar, flag_v
            if not is_taut_couple(flag_v, flag_vstar):
                raise ValueError("flags do not form a taut couple")
            self.index = pair_index(flag_v, flag_vstar)
        self.spec = flag_v.spec
        self.flag_v = flag_v
        self.flag_vstar = flag_vstar
        for j in self.index.closed:
            if j not in self.index.partners:
                raise ValueError("closed pair at position %d has no partner "
                                 "in the dual flag" % j)

    def is_selfdual(self):
        return self.flag_vstar is None

    def key(self):
        return (self.flag_v.key(),
                None if self.flag_vstar is None else self.flag_vstar.key())

    def __eq__(self, other):
        return isinstance(other, TautCouple) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.flag_vstar is None:
            return "TautCouple(self-taut, %d members)" % \
                len(self.flag_v.members)
        return "TautCouple(%d | %d members)" % (
            len(self.flag_v.members), len(self.flag_vstar.members))
