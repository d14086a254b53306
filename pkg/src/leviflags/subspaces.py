"""Pattern subspaces and their exact calculus.

A subspace of one side of a paired space is presented by finitely many
generating vectors plus finitely many tail families {v_i + a : i in P} with P
an eventually periodic index pattern and a fixed anchor vector a.  Every such
subspace has a unique fully reduced echelon structure:

  * a pivot coordinate set (the "top" coordinate, in the order specials then
    |i| ascending, of some member) which is itself eventually periodic, and
  * for each pivot p the unique monic element x_p with top p and no other
    support at any pivot.

Far enough out, x_i = v_i + a_c with the anchor a_c depending only on the
residue class of i, so the whole structure is finite data: explicit echelon
rows inside a window, plus one (pattern, anchor) family per eventual class.
Canonicalizing any presentation down to that data is what makes equality,
membership and all the set operations decidable; perp and intersection
reduce to finite linear systems with one extra unknown per far residue class
(the class sum of a solution's far coefficients).
"""

from fractions import Fraction
from math import lcm

from .patterns import IndexPattern
from .spaces import LEFT, RIGHT, Vector, pair

_CANON_ROUNDS = 30


class NonRepresentable(Exception):
    """Kept for API compatibility: no current operation raises it."""


class QuotientDim:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value  # int, or None for infinite

    @staticmethod
    def finite(n):
        return QuotientDim(int(n))

    @staticmethod
    def infinite():
        return QuotientDim(None)

    def is_finite(self):
        return self.value is not None

    def __eq__(self, other):
        return isinstance(other, QuotientDim) and self.value == other.value

    def __hash__(self):
        return hash(("QuotientDim", self.value))

    def __repr__(self):
        return "infinite" if self.value is None else "finite(%d)" % self.value


class TailFamily:
    """The set {v_i + anchor : i in pattern}."""

    __slots__ = ("pattern", "anchor")

    def __init__(self, pattern, anchor):
        self.pattern = pattern
        self.anchor = anchor

    def key(self):
        return (self.pattern.key(), self.anchor.key())

    def __repr__(self):
        return "TailFamily(%r, anchor=%r)" % (self.pattern, self.anchor)


# -- coordinate bookkeeping ---------------------------------------------------

def _key_of(spec, side, coord):
    return spec.coord_key(side, coord)


def _coord_of(spec, side, key):
    if key[0] == 0:
        return ("s", spec.specials(side)[key[1]])
    return ("r", key[1] if key[2] == 0 else -key[1])


def _to_row(spec, side, vec):
    return {_key_of(spec, side, c): v for c, v in vec.coords()}


def _to_vector(spec, side, row):
    reg, sp = {}, {}
    for k, v in row.items():
        tag, val = _coord_of(spec, side, k)
        if tag == "s":
            sp[val] = v
        else:
            reg[val] = v
    return Vector(spec, side, reg, sp)


def _top(row):
    return max(row) if row else None


def _addmul(row, other, c):
    """row += c * other, dropping zeros."""
    for k, v in other.items():
        nv = row.get(k, Fraction(0)) + c * v
        if nv == 0:
            row.pop(k, None)
        else:
            row[k] = nv
    return row


class _Echelon:
    """Sparse last-pivot reduced echelon over the coordinate keys."""

    def __init__(self):
        self.rows = {}  # pivot key -> monic row dict

    def reduce(self, row):
        """Fully reduce: eliminate every support coordinate that is a pivot."""
        row = dict(row)
        while True:
            hit = None
            for k in sorted(row, reverse=True):
                if k in self.rows:
                    hit = k
                    break
            if hit is None:
                return row
            _addmul(row, self.rows[hit], -row[hit])

    def insert(self, row):
        row = self.reduce(row)
        if not row:
            return None
        t = _top(row)
        c = row[t]
        if c != 1:
            row = {k: v / c for k, v in row.items()}
        self.rows[t] = row
        # keep older rows reduced against the new pivot
        for p, r in list(self.rows.items()):
            if p != t and t in r:
                self.rows[p] = _addmul(dict(r), row, -r[t])
        return t

    def pivots(self):
        return set(self.rows)


# -- the subspace itself ------------------------------------------------------

class Subspace:
    """Canonical form; build through span()/Subspace methods, not directly."""

    __slots__ = ("spec", "side", "rows", "families", "_key")

    def __init__(self, spec, side, rows, families, _key):
        self.spec = spec
        self.side = side
        self.rows = rows          # tuple of Vector, ascending pivot
        self.families = families  # tuple of TailFamily, sorted by key
        self._key = _key

    @staticmethod
    def zero(spec, side):
        return _canonicalize(spec, side, [], [])

    @staticmethod
    def full(spec, side):
        gens = [Vector.special_basis(spec, side, s)
                for s in spec.specials(side)]
        fam = TailFamily(spec.full_pattern(), Vector.zero(spec, side))
        return _canonicalize(spec, side, gens, [fam])

    def key(self):
        return self._key

    def is_zero(self):
        return not self.rows and not self.families

    def is_full(self):
        return equals(self, Subspace.full(self.spec, self.side))

    def has_tail(self):
        return bool(self.families)

    def dim(self):
        """Dimension as a QuotientDim (finite iff no tail families)."""
        if self.families:
            return QuotientDim.infinite()
        return QuotientDim.finite(len(self.rows))

    def family_of(self, i):
        for f in self.families:
            if i in f.pattern:
                return f
        return None

    def window_bound(self):
        """Max |i| over explicit structure (rows, anchors, pattern data)."""
        b = 0
        for v in list(self.rows) + [f.anchor for f in self.families]:
            for i in v.regular:
                b = max(b, abs(i))
        for f in self.families:
            b = max(b, f.pattern.threshold,
                    max((abs(i) for i in f.pattern.added), default=0))
        return b

    def moduli_lcm(self):
        m = 1
        for f in self.families:
            m = lcm(m, f.pattern.modulus)
        return m

    def __repr__(self):
        bits = [repr(r) for r in self.rows]
        bits += ["{v[i]%s : i in %r}"
                 % ("" if f.anchor.is_zero() else "+(%r)" % (f.anchor,),
                    f.pattern)
                 for f in self.families]
        return "Subspace<%s>{%s}" % (self.side, "; ".join(bits))


def span(vectors=(), tails=(), spec=None, side=None):
    """Subspace spanned by explicit vectors and tail families.

    Families with finite patterns are rejected (write the members out
    instead); mixing sides is an error.
    """
    vectors = list(vectors)
    tails = list(tails)
    for t in tails:
        if t.pattern.is_finite():
            raise ValueError("finite pattern used as a tail family")
    items = vectors + [t.anchor for t in tails]
    for x in items:
        if spec is None:
            spec, side = x.spec, x.side
        elif x.spec is not spec or x.side != side:
            raise ValueError("vectors from different spaces/sides")
    if spec is None:
        raise ValueError("empty span needs spec= and side=")
    return _canonicalize(spec, side, vectors, tails)


# -- canonicalization ---------------------------------------------------------

def _canonicalize(spec, side, gen_vectors, families):
    gens = [_to_row(spec, side, v) for v in gen_vectors]
    fams = []
    for f in families:
        pat = spec.clip(f.pattern)
        if pat.is_empty():
            continue
        anchor = _to_row(spec, side, f.anchor)
        if pat.is_finite():
            for i in pat.members_within(pat.threshold):
                gens.append(_addmul({_key_of(spec, side, ("r", i)): Fraction(1)},
                                    dict(anchor), Fraction(1)))
            continue
        fams.append((pat, anchor))

    # Each round runs the whole pipeline (split, echelonize, minimize period
    # and threshold, roll absorbed members out of the row part) on the
    # previous round's output; a fixed point of that map is the canonical
    # form, usually reached on the second round.
    prev_key = None
    for _round in range(_CANON_ROUNDS):
        candidate = _canon_round(spec, side, gens, fams)
        if candidate.key() == prev_key:
            return candidate
        prev_key = candidate.key()
        gens = [_to_row(spec, side, r) for r in candidate.rows]
        fams = [(f.pattern, _to_row(spec, side, f.anchor))
                for f in candidate.families]
    raise AssertionError("canonicalization failed to stabilize")


def _canon_round(spec, side, gens, fams):
    gens = [dict(g) for g in gens]

    # presentation bounds
    k0, m0 = 0, 1
    for row in gens + [a for _, a in fams]:
        for key in row:
            if key[0] == 1:
                k0 = max(k0, key[1])
    for pat, _ in fams:
        m0 = lcm(m0, pat.modulus)
        k0 = max(k0, pat.threshold,
                 max((abs(i) for i in pat.added), default=0))

    # split families at k0: explicit members become generators, tails become
    # one anchor per signed class mod m0
    classes = {}
    for pat, anchor in fams:
        for i in pat.members_within(k0):
            gens.append(_addmul({_key_of(spec, side, ("r", i)): Fraction(1)},
                                dict(anchor), Fraction(1)))
        for cls in pat.tail_beyond(k0).tail_classes(m0, k0):
            if cls in classes:
                gens.append(_addmul(dict(anchor), classes[cls], Fraction(-1)))
            else:
                classes[cls] = dict(anchor)

    ech = _Echelon()
    for g in gens:
        ech.insert(g)
    classes = {c: ech.reduce(a) for c, a in classes.items()}

    # minimal eventual period
    mstar = m0
    for d in sorted(_divisors_of(m0)):
        if _is_period(classes, m0, d):
            mstar = d
            break

    # minimal threshold: walk magnitudes down while the periodic structure
    # extends; inside this round the whole window span is in ech, so plain
    # reduction decides membership
    pivots = ech.pivots()
    kstar = k0
    while kstar > 0:
        ok = True
        for i in (kstar, -kstar):
            if not spec.has_index(i):
                continue
            key = _key_of(spec, side, ("r", i))
            cls = (1 if i > 0 else -1, i % m0)
            if cls in classes:
                member = _addmul({key: Fraction(1)}, dict(classes[cls]),
                                 Fraction(1))
                if not member or _top(member) != key or ech.reduce(member):
                    ok = False
                    break
            elif key in pivots:
                ok = False
                break
        if not ok:
            break
        kstar -= 1

    # roll the members now covered by the tails back out of the row part
    new_ech = _Echelon()
    for p in sorted(ech.rows):
        row = dict(ech.rows[p])
        for k in sorted(row, reverse=True):
            if k[0] == 1 and k[1] > kstar and row.get(k):
                i = k[1] if k[2] == 0 else -k[1]
                cls = (1 if i > 0 else -1, i % m0)
                if cls in classes:
                    member = _addmul({k: Fraction(1)}, dict(classes[cls]),
                                     Fraction(1))
                    _addmul(row, member, -row[k])
        new_ech.insert(row)
    classes = {c: new_ech.reduce(a) for c, a in classes.items()}
    return _assemble(spec, side, new_ech, classes, mstar, kstar)


def _divisors_of(m):
    return [d for d in range(1, m + 1) if m % d == 0]


def _is_period(classes, m0, d):
    for sign in (1, -1):
        for r in range(m0):
            a, b = (sign, r), (sign, (r + d) % m0)
            if (a in classes) != (b in classes):
                return False
            if a in classes and classes[a] != classes[b]:
                return False
    return True


def _assemble(spec, side, ech, classes, mstar, kstar):
    groups = {}
    for (sign, r), anchor in sorted(classes.items()):
        akey = tuple(sorted(anchor.items()))
        groups.setdefault(akey, [anchor, set(), set()])
        groups[akey][1 if sign > 0 else 2].add(r)
    fams = []
    for akey, (anchor, pos, neg) in groups.items():
        pat = IndexPattern.make(spec.universe, mstar, pos_residues=pos,
                                neg_residues=neg, threshold=kstar)
        pat = spec.clip(pat)
        if pat.is_empty():
            continue
        fams.append(TailFamily(pat, _to_vector(spec, side, anchor)))
    fams.sort(key=lambda f: f.key())
    rows = tuple(_to_vector(spec, side, ech.rows[p]) for p in sorted(ech.rows))
    key = (side,
           tuple(r.key() for r in rows),
           tuple(f.key() for f in fams))
    return Subspace(spec, side, rows, tuple(fams), key)


# -- membership and comparisons ----------------------------------------------

def _reduce_in(sub, row):
    """Reduce a sparse row by the subspace's full echelon structure."""
    spec, side = sub.spec, sub.side
    ck = ("pivots", sub.key())
    piv = spec._cache.get(ck)
    if piv is None:
        piv = {_key_of(spec, side, _top_coord(r)): _to_row(spec, side, r)
               for r in sub.rows}
        spec._cache[ck] = piv
    row = dict(row)
    while row:
        t = _top(row)
        if t in piv:
            _addmul(row, piv[t], -row[t])
            continue
        if t[0] == 1:
            i = t[1] if t[2] == 0 else -t[1]
            f = sub.family_of(i)
            if f is not None:
                member = _addmul({t: Fraction(1)},
                                 _to_row(spec, side, f.anchor), Fraction(1))
                _addmul(row, member, -row[t])
                continue
        return row
    return row


def _top_coord(vec):
    best, bk = None, None
    for c, _ in vec.coords():
        k = vec.spec.coord_key(vec.side, c)
        if bk is None or k > bk:
            best, bk = c, k
    return best


def contains_vector(sub, vec):
    if vec.side != sub.side or vec.spec is not sub.spec:
        raise ValueError("vector from a different space/side")
    return not _reduce_in(sub, _to_row(sub.spec, sub.side, vec))


def _alignment(*subs):
    m, k = 1, 0
    for s in subs:
        m = lcm(m, s.moduli_lcm())
        k = max(k, s.window_bound())
    return m, k


def includes(big, small):
    """Is small a subset of big?"""
    _check_same(big, small)
    cache = big.spec._cache
    ck = ("includes", big.key(), small.key())
    got = cache.get(ck)
    if got is None:
        got = cache[ck] = _includes(big, small)
    return got


def _includes(big, small):
    for r in small.rows:
        if not contains_vector(big, r):
            return False
    m, k = _alignment(big, small)
    for f in small.families:
        for i in f.pattern.members_within(k):
            v = Vector.basis(big.spec, big.side, i).add(f.anchor)
            if not contains_vector(big, v):
                return False
        for sign, r in f.pattern.tail_beyond(k).tail_classes(m, k):
            rep = IndexPattern.class_rep(sign, r, m, k)
            v = Vector.basis(big.spec, big.side, rep).add(f.anchor)
            if not contains_vector(big, v):
                return False
    return True


def equals(a, b):
    _check_same(a, b)
    return a.key() == b.key()


def _check_same(a, b):
    if a.spec is not b.spec or a.side != b.side:
        raise ValueError("subspaces from different spaces/sides")


def subspace_sum(a, b):
    _check_same(a, b)
    cache = a.spec._cache
    ck = ("sum",) + tuple(sorted((a.key(), b.key())))
    if ck not in cache:
        cache[ck] = _canonicalize(a.spec, a.side,
                                  list(a.rows) + list(b.rows),
                                  list(a.families) + list(b.families))
    return cache[ck]


# -- perp ---------------------------------------------------------------------

def _sparse_kernel(rows, unknowns):
    """Kernel basis of a sparse homogeneous system.

    rows: list of dicts unknown->coeff; unknowns: ordered list.
    Returns a list of dicts unknown->value, one per free unknown.
    """
    ech = {}  # pivot unknown -> row (monic at pivot, no other pivots)
    for row in rows:
        row = {k: v for k, v in row.items() if v != 0}
        while True:
            p = next((u for u in row if u in ech), None)
            if p is None:
                break
            _addmul(row, ech[p], -row[p])
        if row:
            p = next(iter(row))
            c = row[p]
            row = {k: v / c for k, v in row.items()}
            for q, r in list(ech.items()):
                if p in r:
                    ech[q] = _addmul(dict(r), row, -r[p])
            ech[p] = row
    basis = []
    for free in unknowns:
        if free in ech:
            continue
        sol = {free: Fraction(1)}
        for p, r in ech.items():
            c = r.get(free)
            if c:
                sol[p] = -c
        basis.append(sol)
    return basis


def _pairing_bound(spec):
    return spec.pairing.period_bound()


def _excluded_bound(spec):
    return max((abs(i) for i in spec.excluded), default=0)


def _pair_index(spec, i):
    """Index j such that <v_i, v_j> pairs nontrivially regular-to-regular."""
    return i if spec.kind == "dual-pair" else -i


def _eps(spec, i):
    """<v_i, v_{pair_index(i)}>."""
    if spec.kind == "dual-pair":
        return Fraction(1)
    return Fraction(1) if i > 0 else spec.sign()


def _symbolic_pair(spec, known, known_side_is_left, mstar, nstar, sigma_classes):
    """Linear form (dict unknown->coeff) of <known, u> resp. <u, known>.

    The symbolic u has unknowns ('y', t) for opposite-side specials,
    ('u', j) for |j| <= nstar, and ('sig', cls) for the class sums of its far
    coefficients over the classes in sigma_classes.
    """
    out = {}
    uside = spec.opposite(LEFT) if known_side_is_left else LEFT

    def add(unknown, c):
        if c != 0:
            out[unknown] = out.get(unknown, Fraction(0)) + c

    for i, c in known.regular.items():
        j = _pair_index(spec, i)
        e = _eps(spec, i) if known_side_is_left else _eps(spec, j)
        # <v_i, v_j> = eps(i); in the flipped orientation <v_j', v_i> with
        # j' = pair_index(i) gives eps(j')
        add(("u", j), c * e)
        for t in spec.specials(uside):
            if known_side_is_left:
                val = spec.special_regular(RIGHT, t, i)
            else:
                val = spec.special_regular(LEFT, t, i)
            add(("y", t), c * val)
    for s, c in known.special.items():
        for j in range(-nstar, nstar + 1):
            if not spec.has_index(j):
                continue
            if known_side_is_left:
                val = spec.special_regular(LEFT, s, j)
            else:
                val = spec.special_regular(RIGHT, s, j)
            add(("u", j), c * val)
        for cls in sigma_classes:
            rep = IndexPattern.class_rep(cls[0], cls[1], mstar, nstar)
            if known_side_is_left:
                val = spec.special_regular(LEFT, s, rep)
            else:
                val = spec.special_regular(RIGHT, s, rep)
            add(("sig", cls), c * val)
        for t in spec.specials(uside):
            g = spec.special_pair(s, t) if known_side_is_left \
                else spec.special_pair(t, s)
            add(("y", t), c * g)
    return out


def perp(sub):
    """Annihilator on the opposite side (self-dual: in the same space)."""
    spec = sub.spec
    cache = spec._cache
    ck = ("perp", sub.key())
    if ck in cache:
        return cache[ck]

    side = sub.side
    uside = spec.opposite(side)
    known_is_left = (side == LEFT) if not spec.is_selfdual() else True

    mstar = lcm(sub.moduli_lcm(), _row_moduli(spec))
    nstar = max(sub.window_bound(), _pairing_bound(spec),
                _excluded_bound(spec), 1)

    # classify far classes of the u-side: pinned (paired against a family
    # tail of sub) or free (get a sigma unknown)
    pinned = set()
    for f in sub.families:
        for sign, r in f.pattern.tail_beyond(nstar).tail_classes(mstar, nstar):
            rep = IndexPattern.class_rep(sign, r, mstar, nstar)
            j = _pair_index(spec, rep)
            pinned.add((1 if j > 0 else -1, j % mstar))
    sigma_classes = []
    for sign, r in spec.full_pattern().tail_beyond(nstar).tail_classes(mstar, nstar):
        if (sign, r) not in pinned:
            sigma_classes.append((sign, r))

    unknowns = [("y", t) for t in spec.specials(uside)]
    for j in range(1, nstar + 1):
        for jj in (j, -j):
            if spec.has_index(jj):
                unknowns.append(("u", jj))
    if spec.has_index(0):
        unknowns.append(("u", 0))
    unknowns += [("sig", c) for c in sigma_classes]

    rows = []
    for r in sub.rows:
        rows.append(_symbolic_pair(spec, r, known_is_left, mstar, nstar,
                                   sigma_classes))
    for f in sub.families:
        anchor_form = _symbolic_pair(spec, f.anchor, known_is_left, mstar,
                                     nstar, sigma_classes)
        # Far members v_i + anchor: u's coefficient on the paired class is
        # eventually constant, hence zero, leaving one residual equation per
        # class: <anchor, u> plus u's specials against v_i itself.
        for sign, r in f.pattern.tail_beyond(nstar).tail_classes(mstar, nstar):
            rep = IndexPattern.class_rep(sign, r, mstar, nstar)
            row = dict(anchor_form)
            for t in spec.specials(uside):
                val = spec.special_regular(RIGHT if known_is_left else LEFT,
                                           t, rep)
                if val != 0:
                    row[("y", t)] = row.get(("y", t), Fraction(0)) + val
            if row:
                rows.append(row)
        for i in f.pattern.members_within(nstar):
            member = Vector.basis(spec, side, i).add(f.anchor)
            rows.append(_symbolic_pair(spec, member, known_is_left, mstar,
                                       nstar, sigma_classes))

    basis = _sparse_kernel(rows, unknowns)
    gens, fams = _reconstruct(spec, uside, basis, sigma_classes, mstar, nstar)
    result = _canonicalize(spec, uside, gens, fams)
    cache[ck] = result
    return result


def _row_moduli(spec):
    m = 1
    for rows in list(spec.pairing.left_rows.values()) + \
            list(spec.pairing.right_rows.values()):
        for pat, _ in rows:
            m = lcm(m, pat.modulus)
    return m


def _reconstruct(spec, uside, basis, sigma_classes, mstar, nstar):
    gens = []
    for sol in basis:
        reg, sp = {}, {}
        for (kind, which), val in sol.items():
            if kind == "y":
                sp[which] = val
            elif kind == "u":
                reg[which] = val
            else:
                rep = IndexPattern.class_rep(which[0], which[1], mstar, nstar)
                reg[rep] = reg.get(rep, Fraction(0)) + val
        gens.append(Vector(spec, uside, reg, sp))
    fams = []
    for sign, r in sigma_classes:
        rep = IndexPattern.class_rep(sign, r, mstar, nstar)
        pat = IndexPattern.make(spec.universe, mstar,
                                pos_residues={r} if sign > 0 else set(),
                                neg_residues={r} if sign < 0 else set(),
                                threshold=nstar, removed={rep})
        pat = spec.clip(pat)
        if pat.is_empty():
            continue
        anchor = Vector.basis(spec, uside, rep).scale(-1)
        fams.append(TailFamily(pat, anchor))
    return gens, fams


def closure(sub):
    cache = sub.spec._cache
    ck = ("closure", sub.key())
    if ck not in cache:
        cache[ck] = perp(perp(sub))
    return cache[ck]


def is_closed(sub):
    return equals(closure(sub), sub)


# -- intersection -------------------------------------------------------------

def intersect(a, b):
    """Exact intersection.  Always representable (membership in a canonical
    pattern subspace is itself an eventually periodic linear condition)."""
    _check_same(a, b)
    spec, side = a.spec, a.side
    cache = spec._cache
    ck = ("intersect",) + tuple(sorted((a.key(), b.key())))
    if ck in cache:
        return cache[ck]

    mstar = lcm(a.moduli_lcm(), b.moduli_lcm())
    nstar = max(a.window_bound(), b.window_bound(), _excluded_bound(spec), 1)

    # far support of a member of both must sit in classes present on both
    # sides; those classes get sigma unknowns (class sums)
    a_classes = _present_classes(a, mstar, nstar)
    b_classes = _present_classes(b, mstar, nstar)
    joint = [c for c in a_classes if c in b_classes]

    unknowns = [("y", t) for t in spec.specials(side)]
    for j in range(1, nstar + 1):
        for jj in (j, -j):
            if spec.has_index(jj):
                unknowns.append(("u", jj))
    if spec.has_index(0):
        unknowns.append(("u", 0))
    unknowns += [("sig", c) for c in joint]

    rows = []
    for sub, present in ((a, a_classes), (b, b_classes)):
        rows += _membership_rows(sub, mstar, nstar, joint, present)

    basis = _sparse_kernel(rows, unknowns)
    gens = []
    for sol in basis:
        reg, sp = {}, {}
        for (kind, which), val in sol.items():
            if kind == "y":
                sp[which] = val
            elif kind == "u":
                reg[which] = val
            else:
                rep = IndexPattern.class_rep(which[0], which[1], mstar, nstar)
                reg[rep] = reg.get(rep, Fraction(0)) + val
        gens.append(Vector(spec, side, reg, sp))
    fams = []
    for sign, r in joint:
        rep = IndexPattern.class_rep(sign, r, mstar, nstar)
        pat = IndexPattern.make(spec.universe, mstar,
                                pos_residues={r} if sign > 0 else set(),
                                neg_residues={r} if sign < 0 else set(),
                                threshold=nstar, removed={rep})
        pat = spec.clip(pat)
        if pat.is_empty():
            continue
        anchor = Vector.basis(spec, side, rep).scale(-1)
        fams.append(TailFamily(pat, anchor))
    result = _canonicalize(spec, side, gens, fams)
    cache[ck] = result
    return result


def _present_classes(sub, mstar, nstar):
    out = {}
    for f in sub.families:
        for cls in f.pattern.tail_beyond(nstar).tail_classes(mstar, nstar):
            out[cls] = f.anchor
    return out


def _window_pivots(sub, bound):
    """Pivot coordinate keys of the canonical structure within |i| <= bound
    (rows plus explicit tail members)."""
    spec, side = sub.spec, sub.side
    piv = {_key_of(spec, side, _top_coord(r)) for r in sub.rows}
    for f in sub.families:
        for i in f.pattern.members_within(bound):
            piv.add(_key_of(spec, side, ("r", i)))
    return piv


def quotient_dim(small, big):
    """dim big/small; requires small to be contained in big."""
    _check_same(small, big)
    if not includes(big, small):
        raise ValueError("quotient_dim needs the first subspace inside "
                         "the second")
    m, k = _alignment(small, big)
    if set(_present_classes(small, m, k)) != set(_present_classes(big, m, k)):
        return QuotientDim.infinite()
    return QuotientDim.finite(len(_window_pivots(big, k))
                              - len(_window_pivots(small, k)))


def complement_in(small, big):
    """A direct complement C of small inside big (small + C = big,
    small & C = 0), chosen deterministically: the tail families of big whose
    classes are missing from small first, then big's canonical window
    elements at the missing pivots."""
    _check_same(small, big)
    if not includes(big, small):
        raise ValueError("complement_in needs the first subspace inside "
                         "the second")
    spec, side = big.spec, big.side
    m, k = _alignment(small, big)
    s_classes = _present_classes(small, m, k)
    b_classes = _present_classes(big, m, k)
    spiv = _window_pivots(small, k)

    fams = []
    for (sign, r), anchor in sorted(b_classes.items()):
        if (sign, r) in s_classes:
            continue
        pat = IndexPattern.make(spec.universe, m,
                                pos_residues={r} if sign > 0 else set(),
                                neg_residues={r} if sign < 0 else set(),
                                threshold=k)
        pat = spec.clip(pat)
        if not pat.is_empty():
            fams.append(TailFamily(pat, anchor))
    gens = []
    for row in big.rows:
        if _key_of(spec, side, _top_coord(row)) not in spiv:
            gens.append(row)
    for f in big.families:
        for i in f.pattern.members_within(k):
            if _key_of(spec, side, ("r", i)) not in spiv:
                gens.append(Vector.basis(spec, side, i).add(f.anchor))

    comp = _canonicalize(spec, side, gens, fams)
    assert intersect(small, comp).is_zero(), "complement is not independent"
    assert equals(subspace_sum(small, comp), big), "complement does not fill"
    return comp


def is_isotropic(sub):
    """Is sub inside its own perp?  Self-dual spaces only."""
    if not sub.spec.is_selfdual():
        raise ValueError("isotropy needs a self-dual space")
    return includes(perp(sub), sub)


def is_coisotropic(sub):
    if not sub.spec.is_selfdual():
        raise ValueError("coisotropy needs a self-dual space")
    return includes(sub, perp(sub))


def triple_perp(t, x, y):
    """((t + x)^perp + y)^perp.  Requires the pairing between x and y to be
    nondegenerate, which is what makes this operator idempotent-friendly."""
    if not intersect(x, perp(y)).is_zero() or \
            not intersect(y, perp(x)).is_zero():
        raise ValueError("triple_perp needs a nondegenerate pairing "
                         "between the two complements")
    return perp(subspace_sum(perp(subspace_sum(t, x)), y))


def _membership_rows(sub, mstar, nstar, joint, present):
    """Linear conditions saying the symbolic u lies in sub.

    u = specials + window + far coefficients in the joint classes; since
    v_i + anchor_c in sub for far i, u belongs to sub iff (window part minus
    class sums times anchors) lies in sub's windowed span and u's far support
    stays inside sub's present classes (guaranteed: joint classes only).
    """
    spec, side = sub.spec, sub.side
    # windowed span: rows + members up to nstar
    ech = _Echelon()
    for r in sub.rows:
        ech.insert(_to_row(spec, side, r))
    for f in sub.families:
        for i in f.pattern.members_within(nstar):
            member = _addmul({_key_of(spec, side, ("r", i)): Fraction(1)},
                             _to_row(spec, side, f.anchor), Fraction(1))
            ech.insert(member)

    # symbolic residual: coords -> linear form in unknowns
    # start: window coords u_j and specials y_t as themselves, minus
    # sigma_c * anchor_c for joint classes
    sym = {}

    def addsym(key, unknown, c):
        if c == 0:
            return
        form = sym.setdefault(key, {})
        form[unknown] = form.get(unknown, Fraction(0)) + c
        if form[unknown] == 0:
            del form[unknown]
            if not form:
                del sym[key]

    for t in spec.specials(side):
        addsym(_key_of(spec, side, ("s", t)), ("y", t), Fraction(1))
    for j in range(-nstar, nstar + 1):
        if spec.has_index(j):
            addsym(_key_of(spec, side, ("r", j)), ("u", j), Fraction(1))
    # u = window + far coefficients; subtracting the far members v_i+anchor
    # moves -sigma_c * anchor_c into the window, and that difference must lie
    # in the windowed span
    for cls in joint:
        anchor = present[cls]
        arow = _to_row(spec, side, anchor)
        for key, c in arow.items():
            addsym(key, ("sig", cls), -c)

    # reduce the symbolic vector by the echelon: eliminate pivot coords
    for p in sorted(ech.rows, reverse=True):
        form = sym.get(p)
        if not form:
            continue
        prow = ech.rows[p]
        for key, c in prow.items():
            if key == p:
                continue
            for unknown, fcoef in form.items():
                addsym(key, unknown, -c * fcoef)
        del sym[p]

    return [dict(form) for form in sym.values()]
