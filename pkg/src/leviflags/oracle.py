"""Finite-truncation oracle: dense recomputation of the subspace calculus.

Every pattern-level operation has a finite shadow at an index cutoff n: the
window spanned by the regular basis vectors with |i| <= n plus all specials.
Inside that shadow everything is textbook dense linear algebra, recomputed
from scratch with the linalg module, so the pattern-level answers can be
cross-checked without sharing any solver code.

Truncation artifacts (vectors that only look orthogonal because the tail got
cut off) necessarily occupy the outer rim of the window: comparisons are
therefore restricted to a guard window of radius n - margin, where the margin
covers one full period of every pattern in play.  Within the guard window the
agreement checks are exact set statements; growing the cutoff grows the
checked window, which is the stabilization evidence a report carries.
"""

from fractions import Fraction
from math import lcm

from .linalg import Matrix, kernel, rref
from .spaces import LEFT, Vector
from .subspaces import (closure, contains_vector, intersect, perp,
                        quotient_dim, subspace_sum)


class TruncatedSpace:
    """The window |i| <= cutoff of a paired space, with its dense gram."""

    def __init__(self, spec, cutoff):
        from .spaces import pair

        need = spec.pairing.period_bound()
        if cutoff < need:
            raise ValueError("cutoff %d below pairing data bound %d"
                             % (cutoff, need))
        self.spec = spec
        self.cutoff = cutoff
        self.left = spec.coords_upto(LEFT, cutoff)
        rside = spec.opposite(LEFT)
        self.right = spec.coords_upto(rside, cutoff)
        self.gram = Matrix([[pair(spec, _coord_vector(spec, LEFT, a),
                                  _coord_vector(spec, rside, b))
                             for b in self.right] for a in self.left])

    def coords(self, side):
        return self.left if side == LEFT else self.right


def _coord_vector(spec, side, coord):
    tag, val = coord
    if tag == "s":
        return Vector.special_basis(spec, side, val)
    return Vector.basis(spec, side, val)


def truncate(spec, cutoff):
    return TruncatedSpace(spec, cutoff)


def _dense(vec, index):
    out = [Fraction(0)] * len(index)
    for coord, c in vec.coords():
        out[index[coord]] = c
    return out


def project_subspace(sub, n):
    """Dense basis of the vectors of sub supported within the cutoff window.

    Exact: family members beyond the window have their top coordinate out
    there too, so no combination involving them folds back inside.  Rows are
    coefficient lists over spec.coords_upto(side, n), echelonized.
    """
    if n < sub.window_bound():
        raise ValueError("cutoff %d below subspace window %d"
                         % (n, sub.window_bound()))
    spec, side = sub.spec, sub.side
    coords = spec.coords_upto(side, n)
    index = {c: k for k, c in enumerate(coords)}
    vecs = [_dense(r, index) for r in sub.rows]
    for f in sub.families:
        for i in f.pattern.members_within(n):
            vecs.append(_dense(Vector.basis(spec, side, i).add(f.anchor),
                               index))
    if not vecs:
        return []
    rank_, e = rref(Matrix(vecs))
    return [row[:] for row in e.rows[:rank_]]


class _DenseSpan:
    """Row space with membership and guarded-dimension queries."""

    def __init__(self, rows):
        rows = [r for r in rows if any(x != 0 for x in r)]
        if rows:
            rank_, e = rref(Matrix(rows))
            self.rows = [row[:] for row in e.rows[:rank_]]
        else:
            self.rows = []
        self.piv = []
        for row in self.rows:
            self.piv.append(next(c for c, x in enumerate(row) if x != 0))

    def dim(self):
        return len(self.rows)

    def contains(self, v):
        v = list(v)
        for row, p in zip(self.rows, self.piv):
            c = v[p]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        return all(x == 0 for x in v)

    def guarded_dim(self, boundary_cols):
        """Dimension of {x in span : x zero on the boundary columns}."""
        if not self.rows or not boundary_cols:
            return len(self.rows)
        mb = [[row[c] for c in boundary_cols] for row in self.rows]
        mt = Matrix([list(col) for col in zip(*mb)])
        return len(kernel(mt))

    def guarded_basis(self, boundary_cols):
        if not self.rows:
            return []
        if not boundary_cols:
            return [row[:] for row in self.rows]
        mb = [[row[c] for c in boundary_cols] for row in self.rows]
        mt = Matrix([list(col) for col in zip(*mb)])
        out = []
        for combo in kernel(mt):
            v = [Fraction(0)] * len(self.rows[0])
            for c, row in zip(combo, self.rows):
                if c:
                    v = [a + c * b for a, b in zip(v, row)]
            out.append(v)
        return out


def _boundary_cols(coords, guard):
    return [k for k, c in enumerate(coords)
            if c[0] == "r" and abs(c[1]) > guard]


def _pairing_moduli(spec):
    m = 1
    for rows in list(spec.pairing.left_rows.values()) + \
            list(spec.pairing.right_rows.values()):
        for pat, _ in rows:
            m = lcm(m, pat.modulus)
    return m


def _pairing_window(spec):
    b = 0
    for rows in list(spec.pairing.left_rows.values()) + \
            list(spec.pairing.right_rows.values()):
        for pat, _ in rows:
            b = max(b, pat.threshold,
                    max((abs(i) for i in pat.added), default=0))
    return b


def _frame(spec, subs):
    """(margin, minimum guard) for a comparison touching these subspaces."""
    m = _pairing_moduli(spec)
    t = max(_pairing_window(spec),
            max((abs(i) for i in spec.excluded), default=0), 1)
    for s in subs:
        m = lcm(m, s.moduli_lcm())
        t = max(t, s.window_bound())
    return m, t


def _guard(spec, subs, n):
    """Guard radius at cutoff n, or None when the cutoff is too small."""
    margin, treq = _frame(spec, subs)
    if n < spec.pairing.period_bound():
        return None
    g = n - margin
    return g if g >= treq else None


def _padded_projection(sub, g, width):
    rows = project_subspace(sub, g)
    return [row + [Fraction(0)] * (width - len(row)) for row in rows]


def _dense_perp(t, known_side, dense_rows):
    """Kernel rows (opposite-side coords) annihilating the dense span."""
    spec = t.spec
    if spec.is_selfdual() or known_side == LEFT:
        ncols = len(t.right)
        mat = [[sum(s[a] * t.gram.rows[a][b] for a in range(len(t.left))
                    if s[a] != 0) for b in range(ncols)]
               for s in dense_rows]
    else:
        ncols = len(t.left)
        mat = [[sum(t.gram.rows[a][b] * s[b] for b in range(len(t.right))
                    if s[b] != 0) for a in range(ncols)]
               for s in dense_rows]
    if not mat:
        out = []
        for k in range(ncols):
            v = [Fraction(0)] * ncols
            v[k] = Fraction(1)
            out.append(v)
        return out
    return kernel(Matrix(mat))


def _entry(cutoff, status, detail):
    return {"cutoff": cutoff, "status": status, "detail": detail}


def _skip(cutoff, why="cutoff below the guard-window minimum"):
    return _entry(cutoff, "skipped", why)


def _perp_entry(sub, result, n):
    spec = sub.spec
    g = _guard(spec, (sub, result), n)
    if g is None:
        return _skip(n)
    t = truncate(spec, n)
    span = _DenseSpan(_dense_perp(t, sub.side, project_subspace(sub, n)))
    ucoords = t.coords(result.side)
    dg = span.guarded_dim(_boundary_cols(ucoords, g))
    proj = _padded_projection(result, g, len(ucoords))
    missing = [p for p in proj if not span.contains(p)]
    agree = dg == len(proj) and not missing
    detail = "guard %d: dense dim %d vs pattern dim %d, %d stray" \
             % (g, dg, len(proj), len(missing))
    return _entry(n, "agree" if agree else "disagree", detail)


def _check_membership(operands, cutoffs):
    sub, vec = operands
    claim = contains_vector(sub, vec)
    entries = []
    for n in cutoffs:
        need = max(sub.window_bound(),
                   max((abs(i) for i in vec.regular), default=0), 1)
        if n < need:
            entries.append(_skip(n))
            continue
        spec, side = sub.spec, sub.side
        index = {c: k for k, c in enumerate(spec.coords_upto(side, n))}
        span = _DenseSpan(project_subspace(sub, n))
        dense = span.contains(_dense(vec, index))
        entries.append(_entry(n, "agree" if dense == claim else "disagree",
                              "claimed %s, dense %s" % (claim, dense)))
    return entries


def _check_perp(operands, cutoffs):
    (sub,) = operands
    result = perp(sub)
    return [_perp_entry(sub, result, n) for n in cutoffs]


def _check_closure(operands, cutoffs):
    (sub,) = operands
    p = perp(sub)
    c = closure(sub)
    entries = []
    for n in cutoffs:
        first = _perp_entry(sub, p, n)
        second = _perp_entry(p, c, n)
        status = "agree"
        if "skipped" in (first["status"], second["status"]):
            status = "skipped"
        elif "disagree" in (first["status"], second["status"]):
            status = "disagree"
        entries.append(_entry(n, status,
                              "%s / %s" % (first["detail"], second["detail"])))
    return entries


def _check_sum(operands, cutoffs):
    a, b = operands
    result = subspace_sum(a, b)
    spec = a.spec
    entries = []
    for n in cutoffs:
        g = _guard(spec, (a, b, result), n)
        if g is None:
            entries.append(_skip(n))
            continue
        span = _DenseSpan(project_subspace(a, n) + project_subspace(b, n))
        coords = spec.coords_upto(a.side, n)
        dg = span.guarded_dim(_boundary_cols(coords, g))
        proj = _padded_projection(result, g, len(coords))
        missing = [p for p in proj if not span.contains(p)]
        agree = dg == len(proj) and not missing
        entries.append(_entry(n, "agree" if agree else "disagree",
                              "guard %d: dense dim %d vs pattern dim %d"
                              % (g, dg, len(proj))))
    return entries


def _check_intersect(operands, cutoffs):
    a, b = operands
    result = intersect(a, b)
    spec = a.spec
    entries = []
    for n in cutoffs:
        g = _guard(spec, (a, b, result), n)
        if g is None:
            entries.append(_skip(n))
            continue
        da = project_subspace(a, n)
        db = project_subspace(b, n)
        stack = da + db
        inter = []
        if da and db:
            combos = kernel(Matrix([list(col) for col in zip(*stack)]))
            for combo in combos:
                v = [Fraction(0)] * len(stack[0])
                for c, row in zip(combo[:len(da)], da):
                    if c:
                        v = [x + c * y for x, y in zip(v, row)]
                inter.append(v)
        span = _DenseSpan(inter)
        coords = spec.coords_upto(a.side, n)
        dg = span.guarded_dim(_boundary_cols(coords, g))
        proj = _padded_projection(result, g, len(coords))
        missing = [p for p in proj if not span.contains(p)]
        agree = dg == len(proj) and not missing
        entries.append(_entry(n, "agree" if agree else "disagree",
                              "guard %d: dense dim %d vs pattern dim %d"
                              % (g, dg, len(proj))))
    return entries


def _check_quotient(operands, cutoffs):
    small, big = operands
    value = quotient_dim(small, big)
    spec = small.spec
    entries = []
    last_diff = None
    for n in cutoffs:
        g = _guard(spec, (small, big), n)
        if g is None:
            entries.append(_skip(n))
            continue
        ds = project_subspace(small, n)
        dbig = _DenseSpan(project_subspace(big, n))
        included = all(dbig.contains(r) for r in ds)
        diff = dbig.dim() - len(ds)
        if value.is_finite():
            agree = included and diff == value.value
            detail = "dense %d vs pattern %r" % (diff, value)
        else:
            grew = last_diff is None or diff > last_diff
            agree = included and grew
            detail = "dense difference %d (infinite claimed)" % diff
            last_diff = diff
        entries.append(_entry(n, "agree" if agree else "disagree", detail))
    return entries


_KIND_CHECKS = {
    "membership": _check_membership,
    "perp": _check_perp,
    "closure": _check_closure,
    "sum": _check_sum,
    "intersect": _check_intersect,
    "quotient_dim": _check_quotient,
}


class OracleReport:
    def __init__(self, kind, entries):
        self.kind = kind
        self.entries = entries
        checked = [e for e in entries if e["status"] != "skipped"]
        self.ok = bool(checked) and all(e["status"] == "agree"
                                        for e in checked)
        self.stabilized = (len(checked) >= 2
                           and all(e["status"] == "agree"
                                   for e in checked[-2:]))

    def as_dict(self):
        return {"kind": self.kind, "ok": self.ok,
                "stabilized": self.stabilized, "entries": self.entries}

    def __repr__(self):
        bits = ", ".join("%d:%s" % (e["cutoff"], e["status"])
                         for e in self.entries)
        return "OracleReport(%s: %s, ok=%s)" % (self.kind, bits, self.ok)


def oracle_check(kind, operands, cutoffs):
    cutoffs = list(cutoffs)
    if cutoffs != sorted(set(cutoffs)):
        raise ValueError("cutoffs must be strictly increasing")
    fn = _KIND_CHECKS.get(kind)
    if fn is None:
        raise ValueError("unknown oracle kind %r" % (kind,))
    return OracleReport(kind, fn(operands, cutoffs))
