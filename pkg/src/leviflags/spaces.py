"""Countable-dimensional paired vector spaces.

A space spec describes either a dual pair (V, V*) with a bilinear pairing
V x V* -> Q, or a single self-dual space V with a symmetric or antisymmetric
form V x V -> Q.  Each side has a countable regular basis v_i indexed by a
universe of integers (minus a finite excluded set) together with finitely
many named special vectors whose pairing against the regular basis of the
other side is given by eventually periodic rows.

Vectors are finitely supported combinations of regulars and specials.
Rank-one operators x (x) u span the relevant general linear algebra; the
bracket and the two embeddings into so/sp live here too.
"""

from fractions import Fraction

from .patterns import IndexPattern, in_universe

DUAL_PAIR = "dual-pair"
SELFDUAL_SYM = "selfdual-symmetric"
SELFDUAL_ANTI = "selfdual-antisymmetric"
KINDS = (DUAL_PAIR, SELFDUAL_SYM, SELFDUAL_ANTI)

LEFT = "left"
RIGHT = "right"


class PairingSpec:
    """rule 'kronecker' (<v_i, v*_j> = delta_ij) or 'hyperbolic'
    (<v_i, v_j> = delta_{i,-j} for i > 0, extended by the space's symmetry).

    left_rows[s]  = ((pattern, value), ...) giving <s, v*_j> (or <s, v_j>);
    right_rows[t] = ((pattern, value), ...) giving <v_i, t>  (dual pair only);
    gram[(s, t)]  = <s, t> for specials s, t.  Missing entries are zero.
    """

    def __init__(self, rule, left_rows=None, right_rows=None, gram=None):
        if rule not in ("kronecker", "hyperbolic"):
            raise ValueError("unknown pairing rule %r" % (rule,))
        self.rule = rule
        self.left_rows = dict(left_rows or {})
        self.right_rows = dict(right_rows or {})
        self.gram = {k: Fraction(v) for k, v in (gram or {}).items() if v != 0}

    @staticmethod
    def row_value(rows, j):
        total = Fraction(0)
        for pattern, value in rows:
            if j in pattern:
                total += value
        return total

    def period_bound(self):
        """Max modulus/threshold appearing in any special row."""
        m = n = 1
        for rows in list(self.left_rows.values()) + list(self.right_rows.values()):
            for pattern, _ in rows:
                m = max(m, pattern.modulus)
                n = max(n, pattern.threshold,
                        max((abs(i) for i in pattern.added), default=0))
        return max(m, n)


class SpaceSpec:
    """Identity-based: two specs are interchangeable only if they are the same
    object.  Carries a cache used by the subspace calculus."""

    def __init__(self, kind, universe, left_specials=(), right_specials=(),
                 pairing=None, excluded=(), name=""):
        if kind not in KINDS:
            raise ValueError("unknown kind %r" % (kind,))
        if kind != DUAL_PAIR:
            if universe != "nonzero":
                raise ValueError("self-dual spaces need the nonzero universe")
            if right_specials:
                raise ValueError("self-dual spaces have a single special list")
        self.kind = kind
        self.universe = universe
        self.left_specials = tuple(left_specials)
        self.right_specials = tuple(right_specials)
        self.excluded = frozenset(excluded)
        if pairing is None:
            pairing = PairingSpec(
                "kronecker" if kind == DUAL_PAIR else "hyperbolic")
        if kind == DUAL_PAIR and pairing.rule != "kronecker":
            raise ValueError("dual pairs use the kronecker rule")
        if kind != DUAL_PAIR and pairing.rule != "hyperbolic":
            raise ValueError("self-dual spaces use the hyperbolic rule")
        self.pairing = pairing
        self.name = name
        self._cache = {}
        if kind != DUAL_PAIR:
            sgn = self.sign()
            for (s, t), v in list(pairing.gram.items()):
                w = pairing.gram.get((t, s), Fraction(0))
                if w == 0:
                    pairing.gram[(t, s)] = sgn * v
                elif w != sgn * v:
                    raise ValueError("gram not %s at (%s,%s)"
                                     % (kind.split("-")[1], s, t))

    def sign(self):
        return Fraction(-1 if self.kind == SELFDUAL_ANTI else 1)

    def is_selfdual(self):
        return self.kind != DUAL_PAIR

    def sides(self):
        return (LEFT,) if self.is_selfdual() else (LEFT, RIGHT)

    def opposite(self, side):
        if self.is_selfdual():
            return LEFT
        return RIGHT if side == LEFT else LEFT

    def specials(self, side):
        return self.left_specials if side == LEFT else self.right_specials

    def full_pattern(self):
        added = {0} if self.universe == "integers" else ()
        return IndexPattern.make(self.universe, 1, residues={0}, added=added,
                                 removed=self.excluded)

    def clip(self, pattern):
        """Restrict a pattern to the actual regular index set."""
        return pattern.intersect(self.full_pattern())

    def has_index(self, i):
        return in_universe(self.universe, i) and i not in self.excluded

    def coord_key(self, side, coord):
        """Sort key for coordinates: specials by declaration order, then
        regulars by (|i|, positive before negative)."""
        tag, val = coord
        if tag == "s":
            return (0, self.specials(side).index(val), 0)
        i = val
        return (1, abs(i), 0 if i >= 0 else 1)

    def coords_upto(self, side, bound):
        out = [("s", s) for s in self.specials(side)]
        if self.has_index(0):
            out.append(("r", 0))
        for a in range(1, bound + 1):
            for i in (a, -a):
                if self.has_index(i):
                    out.append(("r", i))
        return out

    # -- the pairing itself -------------------------------------------------

    def regular_pair(self, i, j):
        """<v_i, v*_j> (dual pair) or <v_i, v_j> (self-dual)."""
        if self.kind == DUAL_PAIR:
            return Fraction(1 if i == j else 0)
        if i != -j:
            return Fraction(0)
        return Fraction(1) if i > 0 else self.sign()

    def special_regular(self, side, s, j):
        """<s, v*_j> for a left special, or <v_i, t> with i=j for a right one."""
        if side == LEFT:
            return PairingSpec.row_value(self.pairing.left_rows.get(s, ()), j)
        if self.is_selfdual():
            return self.sign() * PairingSpec.row_value(
                self.pairing.left_rows.get(s, ()), j)
        return PairingSpec.row_value(self.pairing.right_rows.get(s, ()), j)

    def special_pair(self, s, t):
        return self.pairing.gram.get((s, t), Fraction(0))


class Vector:
    """Finitely supported vector on one side of a space."""

    __slots__ = ("spec", "side", "regular", "special")

    def __init__(self, spec, side, regular=None, special=None):
        if side not in (LEFT, RIGHT) or (side == RIGHT and spec.is_selfdual()):
            raise ValueError("bad side %r" % (side,))
        self.spec = spec
        self.side = side
        self.regular = {}
        for i, c in (regular or {}).items():
            c = Fraction(c)
            if c != 0:
                if not spec.has_index(i):
                    raise ValueError("index %d not in the space" % (i,))
                self.regular[i] = c
        self.special = {}
        for s, c in (special or {}).items():
            c = Fraction(c)
            if c != 0:
                if s not in spec.specials(side):
                    raise ValueError("unknown special %r on side %s" % (s, side))
                self.special[s] = c

    @staticmethod
    def basis(spec, side, i):
        return Vector(spec, side, regular={i: 1})

    @staticmethod
    def special_basis(spec, side, s):
        return Vector(spec, side, special={s: 1})

    @staticmethod
    def zero(spec, side):
        return Vector(spec, side)

    def is_zero(self):
        return not self.regular and not self.special

    def add(self, other):
        if other.side != self.side:
            raise ValueError("cannot add across sides")
        reg = dict(self.regular)
        for i, c in other.regular.items():
            reg[i] = reg.get(i, Fraction(0)) + c
        sp = dict(self.special)
        for s, c in other.special.items():
            sp[s] = sp.get(s, Fraction(0)) + c
        return Vector(self.spec, self.side, reg, sp)

    def sub(self, other):
        return self.add(other.scale(-1))

    def scale(self, c):
        c = Fraction(c)
        return Vector(self.spec, self.side,
                      {i: c * v for i, v in self.regular.items()},
                      {s: c * v for s, v in self.special.items()})

    def coords(self):
        """(coord, value) pairs; coord is ('s', name) or ('r', i)."""
        for s, c in self.special.items():
            yield ("s", s), c
        for i, c in self.regular.items():
            yield ("r", i), c

    def get(self, coord):
        tag, val = coord
        if tag == "s":
            return self.special.get(val, Fraction(0))
        return self.regular.get(val, Fraction(0))

    def key(self):
        return (self.side,
                tuple(sorted(self.regular.items())),
                tuple(sorted(self.special.items())))

    def __repr__(self):
        parts = []
        order = sorted(self.coords(),
                       key=lambda cv: self.spec.coord_key(self.side, cv[0]))
        for (tag, val), c in order:
            name = val if tag == "s" else "v[%d]" % val
            if c == 1:
                parts.append("+%s" % name)
            elif c == -1:
                parts.append("-%s" % name)
            else:
                s = str(c)
                parts.append(("%s*%s" if s.startswith("-") else "+%s*%s")
                             % (s, name))
        return "".join(parts).lstrip("+") or "0"


def pair(spec, x, u):
    """The bilinear pairing.  x lives on the left side, u on the right
    (self-dual: both on the single side)."""
    want = LEFT if spec.is_selfdual() else RIGHT
    if x.side != LEFT or u.side != want:
        raise ValueError("pair() wants (left, %s) vectors" % want)
    total = Fraction(0)
    for i, c in x.regular.items():
        if spec.kind == DUAL_PAIR:
            d = u.regular.get(i)
            if d is not None:
                total += c * d
        else:
            d = u.regular.get(-i)
            if d is not None:
                total += c * d * (Fraction(1) if i > 0 else spec.sign())
    for s, c in x.special.items():
        for j, d in u.regular.items():
            total += c * d * spec.special_regular(LEFT, s, j)
    for i, c in x.regular.items():
        for t, d in u.special.items():
            total += c * d * spec.special_regular(RIGHT, t, i)
    for s, c in x.special.items():
        for t, d in u.special.items():
            total += c * d * spec.special_pair(s, t)
    return total


class Operator:
    """Finite sum of rank-one operators x_k (x) u_k with x_k in V and u_k in
    V* (self-dual: both in V)."""

    def __init__(self, spec, terms):
        self.spec = spec
        self.terms = []
        want = LEFT if spec.is_selfdual() else RIGHT
        for x, u in terms:
            if x.side != LEFT or u.side != want:
                raise ValueError("operator terms are (left, %s) pairs" % want)
            if not x.is_zero() and not u.is_zero():
                self.terms.append((x, u))

    def is_zero_on(self, probes):
        return all(operator_apply(self.spec, self, p).is_zero() for p in probes)


def operator_apply(spec, op, vec):
    """Apply the operator: on V, (x (x) u) w = <w, u> x; on V*,
    (x (x) u) phi = -<x, phi> u (the dual action)."""
    if not spec.is_selfdual() and vec.side == RIGHT:
        out = Vector.zero(spec, RIGHT)
        for x, u in op.terms:
            c = pair(spec, x, vec)
            if c != 0:
                out = out.add(u.scale(-c))
        return out
    out = Vector.zero(spec, LEFT)
    for x, u in op.terms:
        c = pair(spec, vec, u)
        if c != 0:
            out = out.add(x.scale(c))
    return out


def operator_bracket(spec, a, b):
    """[a, b] with (x (x) u)(y (x) w) = <y, u> x (x) w."""
    terms = []
    for x, u in a.terms:
        for y, w in b.terms:
            c = pair(spec, y, u)
            if c != 0:
                terms.append((x.scale(c), w))
    for y, w in b.terms:
        for x, u in a.terms:
            c = pair(spec, x, w)
            if c != 0:
                terms.append((y.scale(-c), u))
    return Operator(spec, terms)


def lambda_embed(spec, op):
    """x (x) u  |->  x (x) u - u (x) x, the so(V) skew-symmetrizer."""
    if not spec.is_selfdual():
        raise ValueError("lambda_embed needs a self-dual space")
    terms = []
    for x, u in op.terms:
        terms.append((x, u))
        terms.append((u.scale(-1), x))
    return Operator(spec, terms)


def s_embed(spec, op):
    """x (x) u  |->  x (x) u + u (x) x, the sp(V) symmetrizer."""
    if not spec.is_selfdual():
        raise ValueError("s_embed needs a self-dual space")
    terms = []
    for x, u in op.terms:
        terms.append((x, u))
        terms.append((u, x))
    return Operator(spec, terms)


def validate_pairing(spec, cutoff):
    """Check nondegeneracy of the pairing restricted to the finite window
    |i| <= cutoff plus all specials.

    Requires cutoff to be at least every special row's period and threshold
    (otherwise the window cannot see the rows at all).  A vector of the
    truncated radical is only reported if it still pairs to zero against a
    window twice as large, which weeds out plain boundary artifacts.
    Returns (ok, witnesses); witnesses are vectors spanning the surviving
    radical on either side.
    """
    from .linalg import Matrix, kernel as mat_kernel

    need = spec.pairing.period_bound()
    if cutoff < need:
        raise ValueError("cutoff %d below special row period bound %d"
                         % (cutoff, need))
    left = [_coord_vector(spec, LEFT, c) for c in spec.coords_upto(LEFT, cutoff)]
    rside = spec.opposite(LEFT)
    right = [_coord_vector(spec, rside, c)
             for c in spec.coords_upto(rside, cutoff)]
    g = Matrix([[pair(spec, x, u) for u in right] for x in left])
    witnesses = []
    big = 2 * cutoff + need
    for v in mat_kernel(Matrix([list(col) for col in zip(*g.rows)])) if g.rows else []:
        cand = Vector.zero(spec, LEFT)
        for c, base in zip(v, left):
            if c != 0:
                cand = cand.add(base.scale(c))
        if _pairs_to_zero(spec, cand, rside, big):
            witnesses.append(cand)
    for v in (mat_kernel(g) if g.rows else []):
        cand = Vector.zero(spec, rside)
        for c, base in zip(v, right):
            if c != 0:
                cand = cand.add(base.scale(c))
        if _pairs_to_zero(spec, cand, LEFT, big, flip=True):
            witnesses.append(cand)
    return (not witnesses), witnesses


def _coord_vector(spec, side, coord):
    tag, val = coord
    if tag == "s":
        return Vector.special_basis(spec, side, val)
    return Vector.basis(spec, side, val)


def _pairs_to_zero(spec, cand, probe_side, bound, flip=False):
    for coord in spec.coords_upto(probe_side, bound):
        probe = _coord_vector(spec, probe_side, coord)
        val = pair(spec, probe, cand) if flip else pair(spec, cand, probe)
        if val != 0:
            return False
    return True
