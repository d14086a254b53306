"""Seeded random generators for property tests and experiment scripts.

Everything takes an explicit random.Random; the conventional seed comes from
the TOOL_SEED environment variable so runs are reproducible.
"""

import os
import random
from fractions import Fraction

from .patterns import IndexPattern, in_universe
from .spaces import Vector
from .subspaces import TailFamily, span


def seed_from_env(default=20260825):
    return int(os.environ.get("TOOL_SEED", str(default)))


def rng_from_env(offset=0):
    return random.Random(seed_from_env() + offset)


def random_pattern(rng, universe, infinite=True, max_modulus=4,
                   max_threshold=4):
    m = rng.randint(1, max_modulus)
    pos = {r for r in range(m) if rng.random() < 0.5}
    neg = {r for r in range(m) if rng.random() < 0.5}
    if universe == "positive":
        neg = set()
    if infinite and not pos and not neg:
        pos.add(rng.randrange(m))
    thr = rng.randint(0, max_threshold)
    pool = [i for i in range(-thr, thr + 1) if in_universe(universe, i)]
    added = set(rng.sample(pool, min(len(pool), rng.randint(0, 2))))
    return IndexPattern.make(universe, m, pos_residues=pos, neg_residues=neg,
                             threshold=thr, added=added)


def random_vector(rng, spec, side, bound=6, allow_specials=True):
    reg = {}
    for _ in range(rng.randint(0, 3)):
        i = rng.randint(1, bound) * rng.choice(
            (1, -1) if spec.universe != "positive" else (1, 1))
        if spec.has_index(i):
            reg[i] = Fraction(rng.randint(-3, 3))
    sp = {}
    if allow_specials:
        for s in spec.specials(side):
            if rng.random() < 0.3:
                sp[s] = Fraction(rng.randint(-2, 2))
    return Vector(spec, side, reg, sp)


def random_subspace(rng, spec, side, max_rows=3, max_fams=2, bound=6,
                    max_modulus=4, max_threshold=4):
    rows = [random_vector(rng, spec, side, bound)
            for _ in range(rng.randint(0, max_rows))]
    fams = []
    for _ in range(rng.randint(0, max_fams)):
        pat = random_pattern(rng, spec.universe, max_modulus=max_modulus,
                             max_threshold=max_threshold)
        anchor = random_vector(rng, spec, side, bound)
        fams.append(TailFamily(pat, anchor))
    return span(rows, fams, spec=spec, side=side)


def random_element(rng, sub, bound=8, terms=3):
    """A random vector inside `sub`: a small rational combination of its rows
    and of family members with index at most `bound`."""
    pool = list(sub.rows)
    for fam in sub.families:
        for i in fam.pattern.members_within(bound):
            pool.append(Vector.basis(sub.spec, sub.side, i).add(fam.anchor))
    out = Vector.zero(sub.spec, sub.side)
    if not pool:
        return out
    for _ in range(rng.randint(1, terms)):
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        out = out.add(rng.choice(pool).scale(c))
    return out


def random_dual_pattern_pair(rng, spec, bound=5):
    """A pattern subspace X of V and its coordinate partner Y of V*, so the
    pairing between X and Y is nondegenerate by construction."""
    from .spaces import LEFT
    pat = random_pattern(rng, spec.universe)
    other = spec.opposite(LEFT)
    partner = pat if spec.kind == "dual-pair" else pat.negate()
    x = span((), (TailFamily(pat, Vector.zero(spec, LEFT)),),
             spec=spec, side=LEFT)
    y = span((), (TailFamily(partner, Vector.zero(spec, other)),),
             spec=spec, side=other)
    return x, y
