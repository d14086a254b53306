"""Eventually periodic sets of basis indices.

A pattern describes which indices i carry a basis vector of a family such as
{v_i : i >= 2} or {v_i : i odd} or {v_i : i <= -1}.  Concretely it is a union
of residue classes mod some modulus, applied beyond a threshold on |i|, plus a
finite set of explicitly added members inside the threshold.  Positive and
negative indices may follow different residue classes, which is what makes
one-sided families over the integers expressible.

Patterns are canonicalized on construction (minimal modulus, minimal
threshold, explicit members exactly the in-threshold ones), so structural
equality is semantic equality.
"""

from dataclasses import dataclass
from math import gcd, lcm

UNIVERSES = ("positive", "nonzero", "integers")


def in_universe(universe, i):
    if universe == "positive":
        return i >= 1
    if universe == "nonzero":
        return i != 0
    if universe == "integers":
        return True
    raise ValueError("unknown universe %r" % (universe,))


def _divisors(m):
    out = [d for d in range(1, m + 1) if m % d == 0]
    return out


def _reduce_residues(residues, m, d):
    """Residues mod d equivalent to `residues` mod m, or None if not d-periodic."""
    small = {r % d for r in residues}
    for a in range(m):
        if ((a % d) in small) != (a in residues):
            return None
    return small


@dataclass(frozen=True)
class IndexPattern:
    universe: str
    modulus: int
    threshold: int
    pos_residues: frozenset
    neg_residues: frozenset
    added: frozenset

    @staticmethod
    def make(universe, modulus=1, residues=None, pos_residues=None,
             neg_residues=None, threshold=0, added=(), removed=()):
        """Build and canonicalize.

        `residues` sets both sides at once (the common, sign-symmetric case);
        `pos_residues`/`neg_residues` override per side.  `added`/`removed`
        adjust finitely many members and may lie anywhere.
        """
        if universe not in UNIVERSES:
            raise ValueError("unknown universe %r" % (universe,))
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        if residues is not None:
            base = frozenset(r % modulus for r in residues)
            pos = set(base)
            neg = set(base)
        else:
            pos, neg = set(), set()
        if pos_residues is not None:
            pos = {r % modulus for r in pos_residues}
        if neg_residues is not None:
            neg = {r % modulus for r in neg_residues}
        if universe == "positive":
            neg = set()
        added = {int(i) for i in added}
        removed = {int(i) for i in removed}
        for i in added:
            if not in_universe(universe, i):
                raise ValueError("added index %d outside universe %s" % (i, universe))

        n0 = threshold
        for i in added | removed:
            n0 = max(n0, abs(i))

        def raw_member(i):
            if not in_universe(universe, i):
                return False
            if i in added:
                return True
            if i in removed or abs(i) <= threshold:
                return False
            return (i % modulus) in (pos if i > 0 else neg)

        # Minimal modulus: smallest divisor under which both residue sets are
        # unions of classes.
        mod = modulus
        rpos, rneg = frozenset(pos), frozenset(neg)
        for d in _divisors(modulus):
            p = _reduce_residues(pos, modulus, d)
            n = _reduce_residues(neg, modulus, d)
            if p is not None and n is not None:
                mod, rpos, rneg = d, frozenset(p), frozenset(n)
                break

        def rule(i):
            if not in_universe(universe, i):
                return False
            return (i % mod) in (rpos if i > 0 else rneg)

        # Minimal threshold: beyond it, membership is exactly the residue rule.
        n_min = 0
        for i in range(-n0, n0 + 1):
            if raw_member(i) != rule(i) and abs(i) > n_min:
                n_min = abs(i)
        new_added = frozenset(i for i in range(-n_min, n_min + 1) if raw_member(i))
        if not rpos and not rneg:
            mod = 1
        return IndexPattern(universe, mod, n_min, rpos, rneg, new_added)

    @staticmethod
    def empty(universe):
        return IndexPattern.make(universe)

    @staticmethod
    def full(universe):
        added = {0} if universe == "integers" else ()
        return IndexPattern.make(universe, 1, residues={0}, added=added)

    def __contains__(self, i):
        if not in_universe(self.universe, i):
            return False
        if abs(i) <= self.threshold:
            return i in self.added
        return (i % self.modulus) in (self.pos_residues if i > 0 else self.neg_residues)

    def is_finite(self):
        return not self.pos_residues and not self.neg_residues

    def is_empty(self):
        return self.is_finite() and not self.added

    def key(self):
        return (self.modulus, self.threshold,
                tuple(sorted(self.pos_residues)), tuple(sorted(self.neg_residues)),
                tuple(sorted(self.added)))

    def _combine(self, other, op):
        if self.universe != other.universe:
            raise ValueError("pattern universes differ")
        m = lcm(self.modulus, other.modulus)
        n = max(self.threshold, other.threshold)
        pos = {r for r in range(m) if op((r % self.modulus) in self.pos_residues,
                                         (r % other.modulus) in other.pos_residues)}
        neg = {r for r in range(m) if op((r % self.modulus) in self.neg_residues,
                                         (r % other.modulus) in other.neg_residues)}
        added = [i for i in range(-n, n + 1)
                 if in_universe(self.universe, i) and op(i in self, i in other)]
        return IndexPattern.make(self.universe, m, pos_residues=pos,
                                 neg_residues=neg, threshold=n, added=added)

    def union(self, other):
        return self._combine(other, lambda a, b: a or b)

    def intersect(self, other):
        return self._combine(other, lambda a, b: a and b)

    def difference(self, other):
        return self._combine(other, lambda a, b: a and not b)

    def complement(self):
        return IndexPattern.full(self.universe).difference(self)

    def negate(self):
        """The mirror pattern {-i : i in self}.  Universe must be symmetric."""
        if self.universe == "positive":
            raise ValueError("cannot negate a positive-universe pattern")
        return IndexPattern.make(
            self.universe, self.modulus,
            pos_residues={(-r) % self.modulus for r in self.neg_residues},
            neg_residues={(-r) % self.modulus for r in self.pos_residues},
            threshold=self.threshold, added={-i for i in self.added})

    def members_within(self, bound):
        """Members with |i| <= bound, in coordinate order (|i| then +, -)."""
        out = []
        for a in range(1, bound + 1):
            for i in (a, -a):
                if i in self:
                    out.append(i)
        if 0 in self:
            out.insert(0, 0)
        return out

    def tail_beyond(self, bound):
        """The part of the pattern with |i| > bound (drops all explicit members)."""
        return IndexPattern.make(self.universe, self.modulus,
                                 pos_residues=self.pos_residues,
                                 neg_residues=self.neg_residues,
                                 threshold=max(bound, self.threshold), added=())

    def tail_classes(self, m, bound):
        """Signed residue classes mod m covering the tail beyond `bound`.

        Requires m to be a multiple of the modulus.  Returns (sign, r) pairs,
        sign in {+1,-1}, r in range(m); class = {i : sign*i > 0, i = r mod m,
        |i| > bound}.
        """
        if m % self.modulus != 0:
            raise ValueError("alignment modulus %d not a multiple of %d"
                             % (m, self.modulus))
        out = []
        for r in range(m):
            if (r % self.modulus) in self.pos_residues:
                out.append((1, r))
            if self.universe != "positive" and (r % self.modulus) in self.neg_residues:
                out.append((-1, r))
        return out

    @staticmethod
    def class_rep(sign, r, m, bound):
        """Smallest-|i| index in the signed class beyond `bound`."""
        i = r if sign > 0 else r - m
        if sign > 0:
            while i <= bound or i <= 0:
                i += m
        else:
            while -i <= bound or i >= 0:
                i -= m
        return i

    def __repr__(self):
        bits = ["%s mod %d" % (sorted(self.pos_residues), self.modulus)]
        if self.neg_residues != self.pos_residues:
            bits.append("neg %s" % (sorted(self.neg_residues),))
        bits.append("from %d" % (self.threshold + 1))
        if self.added:
            bits.append("plus %s" % (sorted(self.added),))
        return "IndexPattern(%s: %s)" % (self.universe, ", ".join(bits))
