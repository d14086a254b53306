"""Finiteness tests and exhaustive enumeration of the taut couples
realizing a Levi datum.

The family of couples with a given datum as Levi component is finite
exactly when, for every subset J of the summands, the gap between the
perp of the left-out Y's and the closure of the chosen X's has dimension
at most 1; it is uncountable otherwise.  Under finiteness each flag
member U_i is squeezed into a gap of dimension at most 1, so it is one of
two endpoint subspaces, and enumeration is a small product search.
"""

from itertools import combinations, permutations, product

from .flags import TautCouple, pair_index, semiclosed_flag_from_chain
from .levi import (GL, SL, LeviDatum, _check_order, _require_valid,
                   complete_to_taut, induced_order, is_levi_component,
                   reductive_part)
from .spaces import LEFT, RIGHT
from .subspaces import (Subspace, closure, equals, includes, perp,
                        quotient_dim, subspace_sum)


class Count:
    """finite(n) or uncountable; an uncountable answer may carry the
    violating summand subset as a witness."""

    def __init__(self, value, witness=None):
        self.value = value
        self.witness = witness

    @staticmethod
    def finite(n):
        return Count(int(n))

    @staticmethod
    def uncountable(witness=None):
        return Count(None, witness)

    def is_finite(self):
        return self.value is not None

    def __eq__(self, other):
        return isinstance(other, Count) and self.value == other.value

    def __hash__(self):
        return hash(("count", self.value))

    def __repr__(self):
        if self.is_finite():
            return "Count.finite(%d)" % self.value
        return "Count.uncountable()"


class InfiniteFamily(Exception):
    """Enumeration was asked for an uncountable family; carries the
    violating summand subset."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__("uncountably many couples: the gap at J = %r "
                         "has dimension > 1" % (witness,))


class NonUniqueRefinement(Exception):
    """A closure gap of dimension > 1 appeared while assembling a flag;
    cannot happen when the finiteness test passed."""


class EnumerationResult:
    """Couples grouped by the summand order their flags induce."""

    def __init__(self, by_order):
        self.by_order = dict(by_order)

    def couples(self):
        out = []
        for order in sorted(self.by_order):
            out.extend((order, c) for c in self.by_order[order])
        return out

    def per_order(self):
        return {order: len(cs) for order, cs in self.by_order.items()}

    def total(self):
        return Count.finite(sum(len(cs) for cs in self.by_order.values()))

    def __repr__(self):
        return "EnumerationResult(%r)" % (self.per_order(),)


def _part_sum(l, labels, part, side):
    out = Subspace.zero(l.spec, side)
    for i in labels:
        out = subspace_sum(out, l.summand(i)[part])
    return out


def _xsum(l, labels):
    return _part_sum(l, labels, 0, LEFT)


def _ysum(l, labels):
    return _part_sum(l, labels, 1, RIGHT)


def finiteness_test(l):
    """Is the family of couples realizing the datum finite?  Returns
    (True, None), or (False, J) with J the first violating subset,
    scanning subsets from largest to smallest (lexicographic within a
    size)."""
    if l.kind not in (GL, SL):
        raise ValueError("finiteness_test handles gl/sl data")
    _require_valid(l)
    labels = list(l.labels())
    for r in range(len(labels), -1, -1):
        for chosen in combinations(labels, r):
            left_out = [i for i in labels if i not in chosen]
            qd = quotient_dim(closure(_xsum(l, chosen)),
                              perp(_ysum(l, left_out)))
            if not qd.is_finite() or qd.value > 1:
                return False, chosen
    return True, None


def _sandwich(l, order, t):
    """The two endpoints squeezing U at step t of the given order."""
    x, y = l.summand(order[t])
    lower = perp(subspace_sum(perp(_xsum(l, order[:t + 1])), y))
    upper = perp(_ysum(l, order[t:]))
    return lower, upper


def _enumerate_finite(l, order):
    """Enumerate couples for one order; finiteness already checked."""
    n = len(order)
    cand = []
    for t in range(n):
        x, y = l.summand(order[t])
        lower, upper = _sandwich(l, order, t)
        options = [lower]
        if not equals(upper, lower):
            options.append(upper)
        good = []
        for u in options:
            ux = subspace_sum(u, x)
            if equals(u, perp(subspace_sum(perp(ux), y))):
                good.append(u)
        cand.append(good)
    found = []
    seen = set()
    for combo in product(*cand):
        ok = True
        for t in range(n - 1):
            grown = subspace_sum(combo[t], l.summand(order[t])[0])
            if not includes(combo[t + 1], grown):
                ok = False
                break
        if not ok:
            continue
        members = []
        for t in range(n):
            members.append(combo[t])
            members.append(subspace_sum(combo[t], l.summand(order[t])[0]))
        flag = semiclosed_flag_from_chain(members, spec=l.spec, side=LEFT)
        if len(pair_index(flag).wide) != n:
            raise NonUniqueRefinement(
                "a closure gap of dimension > 1 appeared in a flag for "
                "order %r" % (order,))
        couple = TautCouple(flag, complete_to_taut(flag, l))
        good, _ = is_levi_component(couple, l)
        assert good, "enumerated couple fails the Levi check"
        assert induced_order(couple, l) == order
        if couple.key() not in seen:
            seen.add(couple.key())
            found.append(couple)
    found.sort(key=lambda c: repr(c.key()))
    return found


def enumerate_couples(l, order):
    """All taut couples realizing the datum with the given induced
    summand order, as an EnumerationResult."""
    if l.kind not in (GL, SL):
        raise ValueError("enumerate_couples handles gl/sl data")
    _require_valid(l)
    order = tuple(order)
    _check_order(l, order)
    ok, witness = finiteness_test(l)
    if not ok:
        raise InfiniteFamily(witness)
    return EnumerationResult({order: _enumerate_finite(l, order)})


def enumerate_all_orders(l):
    """Couples for every summand order, with distinctness across orders
    checked rather than assumed."""
    if l.kind not in (GL, SL):
        raise ValueError("enumerate_all_orders handles gl/sl data")
    _require_valid(l)
    ok, witness = finiteness_test(l)
    if not ok:
        raise InfiniteFamily(witness)
    by_order = {}
    seen = {}
    for order in permutations(l.labels()):
        found = _enumerate_finite(l, order)
        for c in found:
            assert c.key() not in seen, \
                "couple appeared under two orders: %r and %r" % (
                    seen[c.key()], order)
            seen[c.key()] = order
        by_order[order] = found
    return EnumerationResult(by_order)


def count_self_normalizing(l):
    """How many taut couples realize the datum over all summand orders;
    uncountable when the finiteness test fails."""
    if l.kind not in (GL, SL):
        raise ValueError("count_self_normalizing handles gl/sl data")
    _require_valid(l)
    ok, witness = finiteness_test(l)
    if not ok:
        return Count.uncountable(witness)
    return enumerate_all_orders(l).total()


def one_block_analysis(x, y):
    """Couple count for a single summand, by the closed-form criterion:
    finite exactly when both perps have dimension at most 1, and then 1
    or 2 according to whether the perps pair to zero."""
    l = LeviDatum(SL, [(x, y)], spec=x.spec)
    _require_valid(l)
    ok, witness = finiteness_test(l)
    if not ok:
        return Count.uncountable(witness)
    if includes(closure(x), perp(y)):
        return Count.finite(1)
    return Count.finite(2)


def trace_condition_count(couple):
    """How many parabolic subalgebras share the couple's self-normalizing
    stabilizer as normalizer: subalgebras between the traceless and full
    parabolic correspond to subspaces of a space of trace functionals,
    one per infinite block of the reductive part."""
    if couple.is_selfdual():
        raise ValueError("trace conditions live on dual-pair couples")
    k = len(reductive_part(couple).infinite_blocks())
    if k == 0:
        return Count.finite(1)
    if k == 1:
        return Count.finite(2)
    return Count.uncountable()
