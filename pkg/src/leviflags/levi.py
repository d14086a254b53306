"""Levi data and the Levi-component decision procedures.

A Levi datum is a finite list of summand pairs (X_i, Y_i) spanning
commuting special-linear blocks, plus an optional nondegenerate part W on
self-dual spaces.  This module validates such data, decides whether a
datum is a Levi component of the parabolic attached to a taut couple,
extracts a canonical datum and a locally reductive part from a couple,
computes the socle, and builds the minimal taut couple and the unique
dual completion for an ordered datum.
"""

from math import lcm

from .flags import (TautCouple, is_self_taut, pair_index,
                    semiclosed_flag_from_chain)
from .spaces import LEFT, RIGHT, Vector, pair
from .subspaces import (Subspace, _pairing_bound, _row_moduli,
                        complement_in, equals, includes, intersect,
                        is_isotropic, perp, quotient_dim, subspace_sum)

GL = "gl"
SL = "sl"
SO = "so"
SP = "sp"
KINDS = (GL, SL, SO, SP)


class LeviDatum:
    """kind gl/sl with summands (X_i in V, Y_i in V*), or kind so/sp with
    both parts in V plus an optional wpart W.  Summand labels are 1-based.
    """

    def __init__(self, kind, summands, wpart=None, spec=None):
        if kind not in KINDS:
            raise ValueError("unknown Levi kind %r" % (kind,))
        self.kind = kind
        self.summands = tuple((x, y) for x, y in summands)
        self.wpart = wpart
        for x, y in self.summands:
            spec = spec or x.spec
            if x.spec is not spec or y.spec is not spec:
                raise ValueError("summands from different spaces")
            if x.side != LEFT:
                raise ValueError("X summands live in V")
            want = LEFT if kind in (SO, SP) else RIGHT
            if y.side != want:
                raise ValueError("Y summands live on the wrong side")
        if wpart is not None:
            if kind not in (SO, SP):
                raise ValueError("wpart is for so/sp data only")
            spec = spec or wpart.spec
            if wpart.spec is not spec or wpart.side != LEFT:
                raise ValueError("wpart must be a subspace of V")
        if spec is None:
            raise ValueError("empty datum needs spec=")
        if kind in (SO, SP) and not spec.is_selfdual():
            raise ValueError("so/sp data need a self-dual space")
        if kind in (GL, SL) and spec.is_selfdual():
            raise ValueError("gl/sl data need a dual pair")
        self.spec = spec

    def labels(self):
        return range(1, len(self.summands) + 1)

    def summand(self, label):
        return self.summands[label - 1]

    def key(self):
        return (self.kind, tuple((x.key(), y.key()) for x, y in self.summands),
                None if self.wpart is None else self.wpart.key())

    def __repr__(self):
        w = "" if self.wpart is None else "+W"
        return "LeviDatum(%s, %d summands%s)" % (self.kind,
                                                 len(self.summands), w)


class LeviReport:
    """Validation outcome: a list of failure strings, with witness vector
    pairs for failed orthogonality checks."""

    def __init__(self):
        self.failures = []
        self.witnesses = []

    def ok(self):
        return not self.failures

    def __repr__(self):
        if self.ok():
            return "LeviReport(ok)"
        return "LeviReport(%d failures: %s)" % (len(self.failures),
                                                "; ".join(self.failures))


def _generators_within(sub, bound):
    out = list(sub.rows)
    for fam in sub.families:
        for i in fam.pattern.members_within(bound):
            out.append(Vector.basis(sub.spec, sub.side, i).add(fam.anchor))
    return out


def _pairing_witness(a, b):
    """A generator pair of a, b with nonzero pairing, if any exists.  The
    pairing of tail members is eventually periodic, so searching one period
    past the windows is exhaustive."""
    spec = a.spec
    bound = max(a.window_bound(), b.window_bound(), _pairing_bound(spec), 1)
    reach = bound + lcm(a.moduli_lcm(), b.moduli_lcm(), _row_moduli(spec))
    for x in _generators_within(a, reach):
        for y in _generators_within(b, reach):
            if pair(spec, x, y) != 0:
                return x, y
    return None


def validate_levi(l):
    """Check the Levi-datum invariants; failures are itemized in the
    report rather than raised."""
    report = LeviReport()
    fail = report.failures.append
    for i in l.labels():
        x, y = l.summand(i)
        if not intersect(x, perp(y)).is_zero():
            fail("summand %d: X meets the kernel of the pairing against Y"
                 % i)
        if not intersect(y, perp(x)).is_zero():
            fail("summand %d: Y meets the kernel of the pairing against X"
                 % i)
        qd = quotient_dim(Subspace.zero(l.spec, LEFT), x)
        if qd.is_finite() and qd.value < 2:
            fail("summand %d: dim X = %d < 2" % (i, qd.value))
        if l.kind in (SO, SP):
            if not is_isotropic(x):
                fail("summand %d: X is not isotropic" % i)
            if not is_isotropic(y):
                fail("summand %d: Y is not isotropic" % i)
    for i in l.labels():
        for j in l.labels():
            if i == j:
                continue
            x, _ = l.summand(i)
            _, y = l.summand(j)
            if not includes(perp(y), x):
                w = _pairing_witness(x, y)
                if w is not None:
                    report.witnesses.append(w)
                    fail("summands %d,%d: <X_%d, Y_%d> != 0, witness "
                         "<%r, %r> = %s" % (i, j, i, j, w[0], w[1],
                                            pair(l.spec, w[0], w[1])))
                else:
                    fail("summands %d,%d: <X_%d, Y_%d> != 0" % (i, j, i, j))
    if l.wpart is not None and \
            not intersect(l.wpart, perp(l.wpart)).is_zero():
        fail("W meets its own perp: the form restricted to W is degenerate")
    return report


def _require_valid(l):
    if getattr(l, "_validated", False):
        return
    report = validate_levi(l)
    if not report.ok():
        raise ValueError("invalid Levi datum: %s" % "; ".join(report.failures))
    l._validated = True


def _splits(lo, hi, x):
    """Does x complement lo inside hi?"""
    return intersect(lo, x).is_zero() and equals(subspace_sum(lo, x), hi)


def _match_summands(l, positions, f_pair, g_pair):
    """Bijectively match summands against the given flag positions, where
    f_pair/g_pair give the (lo, hi) pairs that X_i and Y_i must split.
    Returns the label -> position map, or None."""
    kappa = {}
    used = set()
    for i in l.labels():
        x, y = l.summand(i)
        for j in positions:
            if j in used:
                continue
            lo, hi = f_pair(j)
            if not _splits(lo, hi, x):
                continue
            g_lo, g_hi = g_pair(j)
            if not _splits(g_lo, g_hi, y):
                continue
            kappa[i] = j
            used.add(j)
            break
        else:
            return None
    if len(used) != len(positions):
        return None
    return kappa


def is_levi_component(couple, l):
    """Is the datum a Levi component of the parabolic attached to the
    couple?  Returns (bool, certificate) where the certificate maps each
    summand label to the wide pair it complements."""
    if l.kind not in (GL, SL):
        raise ValueError("is_levi_component decides gl/sl data; use "
                         "is_levi_so or is_levi_sp")
    if couple.is_selfdual():
        raise ValueError("gl/sl data need a dual-pair couple")
    if couple.spec is not l.spec:
        raise ValueError("couple and datum from different spaces")
    _require_valid(l)
    idx = couple.index
    if len(l.summands) != len(idx.wide):
        return False, None
    kappa = _match_summands(
        l, idx.wide, couple.flag_v.pair_at,
        lambda j: couple.flag_vstar.pair_at(idx.partners[j]))
    if kappa is None:
        return False, None
    return True, kappa


def induced_order(couple, l):
    """The order the couple's flag imposes on the summands: labels sorted
    by the position of the wide pair each one complements."""
    ok, kappa = is_levi_component(couple, l)
    if not ok:
        raise ValueError("datum is not a Levi component of this couple")
    return tuple(sorted(kappa, key=kappa.get))


def _block_complements(couple, positions):
    """Complements (X_j, Y_j) at the given flag positions with
    cross-block orthogonality <X_j, Y_m> = 0 for j != m.

    For j < m this is automatic from the partner identities, so only the
    X side needs correcting: it is chosen inside the perp of the Y parts
    already taken at lower positions."""
    f, g = couple.flag_v, couple.flag_vstar
    idx = couple.index
    ys = {}
    for j in positions:
        g_lo, g_hi = g.pair_at(idx.partners[j])
        ys[j] = complement_in(g_lo, g_hi)
    xs = {}
    taken = None
    for j in positions:
        lo, hi = f.pair_at(j)
        if taken is None:
            x = complement_in(lo, hi)
        else:
            room = intersect(hi, perp(taken))
            if not equals(subspace_sum(lo, room), hi):
                raise RuntimeError("cross-orthogonalization failed at "
                                   "position %d" % j)
            x = complement_in(intersect(lo, room), room)
        if not _splits(lo, hi, x):
            raise RuntimeError("complement choice failed at position %d" % j)
        xs[j] = x
        taken = ys[j] if taken is None else subspace_sum(taken, ys[j])
    return xs, ys


def levi_from_couple(couple):
    """The canonical Levi datum of the couple's parabolic: complements of
    the wide pairs, cross-orthogonalized."""
    if couple.is_selfdual():
        raise ValueError("levi_from_couple handles dual-pair couples")
    wide = couple.index.wide
    xs, ys = _block_complements(couple, wide)
    datum = LeviDatum(SL, [(xs[j], ys[j]) for j in wide], spec=couple.spec)
    ok, _ = is_levi_component(couple, datum)
    if not ok:
        raise RuntimeError("extracted datum fails the Levi check")
    return datum


class LeviBlock:
    """One block of a locally reductive part: complements at a closed
    pair, tagged with the flag position and finiteness."""

    def __init__(self, position, x, y, infinite):
        self.position = position
        self.x = x
        self.y = y
        self.infinite = infinite

    def __repr__(self):
        tag = "infinite" if self.infinite else "finite"
        return "LeviBlock(position=%d, %s)" % (self.position, tag)


class ReductivePart:
    def __init__(self, blocks):
        self.blocks = tuple(blocks)

    def infinite_blocks(self):
        return [b for b in self.blocks if b.infinite]

    def __repr__(self):
        return "ReductivePart(%d blocks, %d infinite)" % (
            len(self.blocks), len(self.infinite_blocks()))


def reductive_part(couple):
    """A locally reductive part of the couple's parabolic: one block per
    closed pair, not just per wide pair."""
    if couple.is_selfdual():
        raise ValueError("reductive_part handles dual-pair couples")
    idx = couple.index
    xs, ys = _block_complements(couple, idx.closed)
    blocks = []
    for j in idx.closed:
        lo, hi = couple.flag_v.pair_at(j)
        infinite = not quotient_dim(lo, hi).is_finite()
        blocks.append(LeviBlock(j, xs[j], ys[j], infinite))
    return ReductivePart(blocks)


def socle(l):
    """The socle of V as a module over the datum: the sum of the X_i plus
    the perp of the sum of the Y_i (the largest trivial part)."""
    _require_valid(l)
    yside = LEFT if l.kind in (SO, SP) else RIGHT
    xsum = Subspace.zero(l.spec, LEFT)
    ysum = Subspace.zero(l.spec, yside)
    for x, y in l.summands:
        xsum = subspace_sum(xsum, x)
        ysum = subspace_sum(ysum, y)
    return subspace_sum(xsum, perp(ysum))


def _check_order(l, order):
    if sorted(order) != list(l.labels()):
        raise ValueError("order must be a permutation of the summand labels")
    return [l.summand(i) for i in order]


def minimal_taut_couple(l, order):
    """The smallest taut couple realizing the datum under the given
    summand order: the lowest valid choice at every position.

    Builds U_i = ((X_1 + ... + X_i)^perp + Y_i)^perp over the reordered
    summands, then the flag through the members U_i and U_i + X_i and its
    dual through their perps and perp + Y_i, inserting closures."""
    if l.kind not in (GL, SL):
        raise ValueError("minimal_taut_couple handles gl/sl data")
    _require_valid(l)
    ordered = _check_order(l, order)
    xsum = Subspace.zero(l.spec, LEFT)
    v_chain, g_chain = [], []
    for x, y in ordered:
        xsum = subspace_sum(xsum, x)
        u = perp(subspace_sum(perp(xsum), y))
        ux = subspace_sum(u, x)
        v_chain += [u, ux]
        g_chain += [perp(ux), subspace_sum(perp(ux), y)]
    flag_v = semiclosed_flag_from_chain(v_chain, spec=l.spec, side=LEFT)
    flag_g = semiclosed_flag_from_chain(g_chain, spec=l.spec, side=RIGHT)
    return TautCouple(flag_v, flag_g)


def complete_to_taut(flag, l):
    """The unique dual flag completing a maximal semiclosed flag that
    carries the datum's X parts as complements of immediate pairs.

    Preconditions checked: each X_i splits some pair (U_i, U_i + X_i);
    U_i = ((U_i + X_i)^perp + Y_i)^perp; and the flag is maximal, i.e.
    every wide pair is one of the summand pairs."""
    if l.kind not in (GL, SL):
        raise ValueError("complete_to_taut handles gl/sl data")
    if flag.spec is not l.spec or flag.side != LEFT:
        raise ValueError("flag must live in the datum's V")
    _require_valid(l)
    idx = pair_index(flag)
    located = {}
    for i in l.labels():
        x, y = l.summand(i)
        for j in flag.positions():
            if j in located.values():
                continue
            lo, hi = flag.pair_at(j)
            if _splits(lo, hi, x):
                located[i] = j
                break
        else:
            raise ValueError("summand %d is not a complement of any pair"
                             % i)
        lo, hi = flag.pair_at(located[i])
        if not equals(lo, perp(subspace_sum(perp(hi), y))):
            raise ValueError("summand %d fails the defining identity "
                             "U = ((U + X)^perp + Y)^perp" % i)
    if set(idx.wide) != set(located.values()):
        raise ValueError("flag is not maximal: it has wide pairs carrying "
                         "no summand")
    members = [perp(m) for m in flag.members]
    for i in l.labels():
        _, hi = flag.pair_at(located[i])
        members.append(subspace_sum(perp(hi), l.summand(i)[1]))
    return semiclosed_flag_from_chain(members, spec=l.spec, side=RIGHT)


def _selfdual_levi(flag, l, kind):
    if l.kind != kind:
        raise ValueError("datum kind %s does not match the check" % l.kind)
    if flag.spec is not l.spec:
        raise ValueError("flag and datum from different spaces")
    _require_valid(l)
    if not is_self_taut(flag):
        raise ValueError("flag is not self-taut")
    idx = pair_index(flag)
    kappa = _match_summands(
        l, idx.wide, flag.pair_at,
        lambda j: flag.pair_at(idx.partners[j]))
    if kappa is None:
        return False
    iso = Subspace.zero(l.spec, LEFT)
    coiso = Subspace.full(l.spec, LEFT)
    for lo, hi in flag.pairs():
        if is_isotropic(hi):
            iso = hi
        if includes(lo, perp(lo)) and coiso.is_full():
            coiso = lo
    w = l.wpart if l.wpart is not None else Subspace.zero(l.spec, LEFT)
    qd = quotient_dim(iso, coiso)
    if kind == SO and qd.is_finite() and qd.value <= 2:
        return w.is_zero()
    return intersect(iso, w).is_zero() and \
        equals(subspace_sum(iso, w), coiso)


def is_levi_so(flag, l):
    """Is the so-datum a Levi component of the parabolic attached to a
    self-taut flag on an orthogonal space?  The trivial-or-W part must
    span the gap between the largest isotropic successor and the smallest
    coisotropic predecessor, with W = 0 forced when that gap has
    dimension at most 2."""
    from .spaces import SELFDUAL_SYM
    if flag.spec.kind != SELFDUAL_SYM:
        raise ValueError("is_levi_so needs a symmetric self-dual space")
    return _selfdual_levi(flag, l, SO)


def is_levi_sp(flag, l):
    """Symplectic counterpart of is_levi_so: W must always span the gap."""
    from .spaces import SELFDUAL_ANTI
    if flag.spec.kind != SELFDUAL_ANTI:
        raise ValueError("is_levi_sp needs an antisymmetric self-dual space")
    return _selfdual_levi(flag, l, SP)
