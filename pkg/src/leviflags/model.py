"""A small declarative language for paired spaces and their Levi data.

A model file declares one space (a dual pair or a self-dual space), its
extra basis vectors and pairing rows, and then named subspaces, Levi
data, flags, and summand orders:

    space V dual Vstar indices positive
    special v in V
    pair v . Vstar[j] = 1 for j in all
    subspace X in V = span { V[1] + V[i] for i in 0 mod 1 from 2 }
    subspace Y in Vstar = span { Vstar[i] for i in 0 mod 1 from 2 }
    levi L = sl(X, Y)
    flag F in V = (X)
    order O = (1)

Self-dual spaces are declared "space V selfdual symmetric indices
nonzero" (or antisymmetric), and their Levi data may carry one
nondegenerate part, written so(W) or sp(W) to match the form.

Pattern syntax: residues "mod" m, optionally "from" t (members with
|i| >= t) and "excluding { ... }" for finitely many removals.  A
residue applies to both signs of index; prefix it with "+" or "-" to
restrict to positive or negative indices only.  "all" is the whole
index set.  Line comments start with "#".

The coordinate pairing <v_i, v_j*> (or <v_i, v_j> on self-dual spaces)
is fixed by the space kind; "pair" statements only describe rows of
declared specials and special-by-special gram entries.

Flag members are completed to a semiclosed flag, inserting closures
where needed.  Everything is validated on load; errors carry the line
of the offending statement.
"""

import re
from fractions import Fraction

from .flags import PreconditionViolation, semiclosed_flag_from_chain
from .levi import SL, SO, SP, LeviDatum, validate_levi
from .patterns import IndexPattern, in_universe
from .spaces import (DUAL_PAIR, LEFT, RIGHT, SELFDUAL_ANTI, SELFDUAL_SYM,
                     PairingSpec, SpaceSpec, Vector)
from .subspaces import Subspace, TailFamily, span


class ModelError(Exception):
    """Syntax or semantic error in a model file."""

    def __init__(self, message, line=None, col=None, stmt=None):
        self.message = message
        self.line = line
        self.col = col
        self.stmt = stmt
        if stmt is not None:
            text = "line %d: %s (in %r)" % (line, message, stmt)
        elif line is not None:
            text = "line %d, column %d: %s" % (line, col, message)
        else:
            text = message
        super().__init__(text)


_TOKEN = re.compile(r"[A-Za-z_]\w*|\d+|[-+*/=.,(){}\[\]]|\S")

_KEYWORDS = ("space", "special", "pair", "subspace", "levi", "flag", "order")


def _tokenize(text):
    out = []
    for ln, line in enumerate(text.split("\n"), 1):
        line = line.split("#", 1)[0]
        for m in _TOKEN.finditer(line):
            out.append((m.group(), ln, m.start() + 1))
    return out


class _Parser:
    """Recursive descent over the token list; produces statement dicts."""

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.lines = text.split("\n")
        self.pos = 0

    def _loc(self):
        if self.pos < len(self.tokens):
            _, ln, col = self.tokens[self.pos]
        elif self.tokens:
            _, ln, col = self.tokens[-1]
        else:
            ln, col = 1, 1
        return ln, col

    def fail(self, message):
        ln, col = self._loc()
        raise ModelError(message, ln, col)

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def take(self):
        if self.pos >= len(self.tokens):
            self.fail("unexpected end of input")
        tok = self.tokens[self.pos][0]
        self.pos += 1
        return tok

    def expect(self, want):
        got = self.peek()
        if got != want:
            self.fail("expected %r, found %s" % (
                want, "end of input" if got is None else repr(got)))
        return self.take()

    def name(self, what="a name"):
        got = self.peek()
        if got is None:
            self.fail("expected %s, found end of input" % what)
        if not re.fullmatch(r"[A-Za-z_]\w*", got):
            self.fail("expected %s, found %r" % (what, got))
        return self.take()

    def integer(self):
        got = self.peek()
        sign = 1
        if got == "-":
            self.take()
            sign = -1
            got = self.peek()
        if got is None or not got.isdigit():
            self.fail("expected an integer, found %r" % (got,))
        return sign * int(self.take())

    def rational(self):
        num = self.integer()
        if self.peek() == "/":
            self.take()
            den = self.integer()
            if den == 0:
                self.fail("zero denominator")
            return Fraction(num, den)
        return Fraction(num)

    def statements(self):
        out = []
        while self.peek() is not None:
            ln, _ = self._loc()
            kw = self.peek()
            if kw not in _KEYWORDS:
                self.fail("expected a statement keyword %r, found %r"
                          % (_KEYWORDS, kw))
            stmt = getattr(self, "stmt_" + kw)()
            stmt["line"] = ln
            stmt["text"] = self.lines[ln - 1].split("#", 1)[0].strip()
            out.append(stmt)
        return out

    def stmt_space(self):
        self.expect("space")
        left = self.name("a space name")
        stmt = {"kw": "space", "left": left}
        if self.peek() == "dual":
            self.take()
            stmt["right"] = self.name("the dual space name")
            stmt["kind"] = DUAL_PAIR
        elif self.peek() == "selfdual":
            self.take()
            sym = self.take()
            if sym == "symmetric":
                stmt["kind"] = SELFDUAL_SYM
            elif sym == "antisymmetric":
                stmt["kind"] = SELFDUAL_ANTI
            else:
                self.fail("expected 'symmetric' or 'antisymmetric', found %r"
                          % (sym,))
            stmt["right"] = None
        else:
            self.fail("expected 'dual' or 'selfdual', found %r"
                      % (self.peek(),))
        self.expect("indices")
        rng = self.take()
        if rng not in ("positive", "nonzero", "integers"):
            self.fail("expected an index range "
                      "(positive/nonzero/integers), found %r" % (rng,))
        stmt["universe"] = rng
        return stmt

    def stmt_special(self):
        self.expect("special")
        names = [self.name("a special name")]
        while self.peek() not in ("in", None):
            names.append(self.name("a special name"))
        self.expect("in")
        return {"kw": "special", "names": names,
                "space": self.name("a space name")}

    def term(self):
        n = self.name("a special name or indexed term")
        if self.peek() != "[":
            return ("name", n)
        self.take()
        got = self.peek()
        if got is not None and (got.isdigit() or got == "-"):
            idx = ("int", self.integer())
        else:
            idx = ("var", self.name("an index or index variable"))
        self.expect("]")
        return ("index", n, idx)

    def pattern(self):
        var = self.name("an index variable")
        self.expect("in")
        if self.peek() == "all":
            self.take()
            return {"var": var, "all": True}
        residues = []
        while True:
            sign = None
            if self.peek() in ("+", "-"):
                sign = self.take()
            got = self.peek()
            if got is None or not got.isdigit():
                self.fail("expected a residue, found %r" % (got,))
            residues.append((sign, int(self.take())))
            if self.peek() != ",":
                break
            self.take()
        self.expect("mod")
        got = self.peek()
        if got is None or not got.isdigit():
            self.fail("expected a modulus, found %r" % (got,))
        modulus = int(self.take())
        out = {"var": var, "all": False, "residues": residues,
               "modulus": modulus, "from": None, "excluding": []}
        if self.peek() == "from":
            self.take()
            got = self.peek()
            if got is None or not got.isdigit():
                self.fail("expected a bound after 'from', found %r" % (got,))
            out["from"] = int(self.take())
        if self.peek() == "excluding":
            self.take()
            self.expect("{")
            while self.peek() != "}":
                out["excluding"].append(self.integer())
                if self.peek() == ",":
                    self.take()
            self.expect("}")
        return out

    def stmt_pair(self):
        self.expect("pair")
        left = self.term()
        self.expect(".")
        right = self.term()
        self.expect("=")
        value = self.rational()
        pat = None
        if self.peek() == "for":
            self.take()
            pat = self.pattern()
        return {"kw": "pair", "lterm": left, "rterm": right,
                "value": value, "pattern": pat}

    def vector_terms(self):
        """Signed terms of a vector expression, stopping before 'for' or a
        list delimiter."""
        terms = []
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        while True:
            got = self.peek()
            coeff = Fraction(sign)
            if got is not None and (got.isdigit()):
                coeff = sign * self.rational()
                self.expect("*")
            terms.append((coeff, self.term()))
            if self.peek() == "+":
                self.take()
                sign = 1
            elif self.peek() == "-":
                self.take()
                sign = -1
            else:
                return terms

    def stmt_subspace(self):
        self.expect("subspace")
        name = self.name("a subspace name")
        self.expect("in")
        space = self.name("a space name")
        self.expect("=")
        stmt = {"kw": "subspace", "name": name, "space": space,
                "families": []}
        got = self.peek()
        if got == "0":
            self.take()
            stmt["zero"] = True
            return stmt
        if got != "span":
            stmt["alias"] = self.name("'span', '0', or a name")
            return stmt
        self.expect("span")
        self.expect("{")
        while self.peek() != "}":
            terms = self.vector_terms()
            pat = None
            if self.peek() == "for":
                self.take()
                pat = self.pattern()
            stmt["families"].append({"terms": terms, "pattern": pat})
            if self.peek() == ",":
                self.take()
            elif self.peek() != "}":
                self.fail("expected ',' or '}', found %r" % (self.peek(),))
        self.expect("}")
        return stmt

    def stmt_levi(self):
        self.expect("levi")
        name = self.name("a Levi datum name")
        self.expect("=")
        summands = []
        while True:
            word = self.take()
            if word not in ("sl", "so", "sp"):
                self.fail("expected sl(...), so(...), or sp(...), found %r"
                          % (word,))
            self.expect("(")
            first = self.name("a subspace name")
            if word == "sl":
                self.expect(",")
                second = self.name("a subspace name")
                summands.append(("sl", first, second))
            else:
                summands.append((word, first))
            self.expect(")")
            if self.peek() != "+":
                break
            self.take()
        return {"kw": "levi", "name": name, "summands": summands}

    def stmt_flag(self):
        self.expect("flag")
        name = self.name("a flag name")
        self.expect("in")
        space = self.name("a space name")
        self.expect("=")
        self.expect("(")
        members = [self.name("a subspace name")]
        while self.peek() == ",":
            self.take()
            members.append(self.name("a subspace name"))
        self.expect(")")
        return {"kw": "flag", "name": name, "space": space,
                "members": members}

    def stmt_order(self):
        self.expect("order")
        name = self.name("an order name")
        self.expect("=")
        self.expect("(")
        labels = [self.integer()]
        while self.peek() == ",":
            self.take()
            labels.append(self.integer())
        self.expect(")")
        return {"kw": "order", "name": name, "labels": tuple(labels)}


class Model:
    """A parsed model: the space plus named subspaces, Levi data, flags,
    and orders."""

    def __init__(self, spec, left_name, right_name):
        self.spec = spec
        self.left_name = left_name
        self.right_name = right_name
        self.subspaces = {}
        self.flags = {}
        self.levis = {}
        self.orders = {}
        self._names = {left_name: "space"}
        if right_name is not None:
            self._names[right_name] = "space"

    def side_of(self, space_name):
        if space_name == self.left_name:
            return LEFT
        if space_name == self.right_name:
            return RIGHT
        return None

    def side_name(self, side):
        return self.left_name if side == LEFT else self.right_name


class _Builder:
    """Second pass: statements to a validated Model."""

    def __init__(self, statements):
        self.statements = statements

    def err(self, stmt, message):
        raise ModelError(message, line=stmt["line"], stmt=stmt["text"])

    def build(self):
        spaces = [s for s in self.statements if s["kw"] == "space"]
        if not spaces:
            raise ModelError("no space declaration")
        if len(spaces) > 1:
            self.err(spaces[1], "only one space declaration is allowed")
        head = spaces[0]
        self.universe = head["universe"]
        self.left_name = head["left"]
        self.right_name = head["right"]
        self.kind = head["kind"]
        if self.kind != DUAL_PAIR and self.universe != "nonzero":
            self.err(head, "self-dual spaces need 'indices nonzero'")
        if self.right_name == self.left_name:
            self.err(head, "the two space names coincide")

        left_specials, right_specials = [], []
        for s in self.statements:
            if s["kw"] != "special":
                continue
            if s["space"] == self.left_name:
                target = left_specials
            elif s["space"] == self.right_name:
                target = right_specials
            else:
                self.err(s, "unknown space %r" % (s["space"],))
            for n in s["names"]:
                if n in left_specials or n in right_specials or \
                        n in (self.left_name, self.right_name):
                    self.err(s, "name %r already taken" % (n,))
                target.append(n)
        self.left_specials = tuple(left_specials)
        self.right_specials = tuple(right_specials)

        left_rows, right_rows, gram = {}, {}, {}
        for s in self.statements:
            if s["kw"] == "pair":
                self.pair_stmt(s, left_rows, right_rows, gram)
        rule = "kronecker" if self.kind == DUAL_PAIR else "hyperbolic"
        pairing = PairingSpec(
            rule,
            left_rows={k: tuple(v) for k, v in left_rows.items()},
            right_rows={k: tuple(v) for k, v in right_rows.items()},
            gram=gram)
        try:
            spec = SpaceSpec(self.kind, self.universe,
                             left_specials=self.left_specials,
                             right_specials=self.right_specials,
                             pairing=pairing, name=self.left_name)
        except ValueError as e:
            self.err(head, str(e))
        model = Model(spec, self.left_name, self.right_name)
        for n in self.left_specials + self.right_specials:
            model._names[n] = "special"

        for s in self.statements:
            if s["kw"] in ("space", "special", "pair"):
                continue
            if s["name"] in model._names:
                self.err(s, "name %r already taken" % (s["name"],))
            getattr(self, s["kw"] + "_stmt")(s, model)
            model._names[s["name"]] = s["kw"]
        return model

    # -- pairing rows -------------------------------------------------------

    def _classify_term(self, s, term, expect_side):
        """('special', name) or ('regular', kind) for one side of a pair
        statement, where kind is ('int', i) or ('var', v)."""
        if term[0] == "name":
            n = term[1]
            pool = self.left_specials if expect_side == LEFT \
                else self.right_specials
            if self.kind != DUAL_PAIR:
                pool = self.left_specials
            if n not in pool:
                self.err(s, "%r is not a special of the expected side" % (n,))
            return ("special", n)
        _, space, idx = term
        want = self.left_name if expect_side == LEFT else self.right_name
        if self.kind != DUAL_PAIR:
            want = self.left_name
        if space != want:
            self.err(s, "expected a term in %r, found %r" % (want, space))
        return ("regular", idx)

    def _row_pattern(self, s, idx, pat):
        """The index pattern a pair statement covers for a regular term."""
        if idx[0] == "int":
            if pat is not None:
                self.err(s, "a literal index takes no 'for' clause")
            if not in_universe(self.universe, idx[1]):
                self.err(s, "index %d outside the universe" % (idx[1],))
            return IndexPattern.make(self.universe, 1, added={idx[1]})
        if pat is None:
            self.err(s, "index variable %r needs a 'for' clause" % (idx[1],))
        if pat["var"] != idx[1]:
            self.err(s, "the 'for' clause binds %r, not %r"
                     % (pat["var"], idx[1]))
        return self._pattern(s, pat)

    def pair_stmt(self, s, left_rows, right_rows, gram):
        lt = self._classify_term(s, s["lterm"], LEFT)
        rt = self._classify_term(s, s["rterm"], RIGHT)
        value = s["value"]
        if lt[0] == "special" and rt[0] == "special":
            if s["pattern"] is not None:
                self.err(s, "a pair of specials takes no 'for' clause")
            key = (lt[1], rt[1])
            if key in gram:
                self.err(s, "duplicate gram entry %r" % (key,))
            gram[key] = value
        elif lt[0] == "special":
            pat = self._row_pattern(s, rt[1], s["pattern"])
            left_rows.setdefault(lt[1], []).append((pat, value))
        elif rt[0] == "special":
            pat = self._row_pattern(s, lt[1], s["pattern"])
            if self.kind != DUAL_PAIR:
                # <v_i, s> = sign * <s, v_i> on a self-dual space
                sign = -1 if self.kind == SELFDUAL_ANTI else 1
                left_rows.setdefault(rt[1], []).append((pat, sign * value))
            else:
                right_rows.setdefault(rt[1], []).append((pat, value))
        else:
            self.err(s, "the coordinate pairing is fixed by the space kind")

    # -- patterns and vectors ----------------------------------------------

    def _pattern(self, s, pat):
        if pat["all"]:
            return IndexPattern.full(self.universe)
        pos, neg = set(), set()
        added = set()
        for sign, r in pat["residues"]:
            if sign in (None, "+"):
                pos.add(r % pat["modulus"])
            if sign in (None, "-"):
                if self.universe == "positive" and sign == "-":
                    self.err(s, "no negative indices in this universe")
                neg.add(r % pat["modulus"])
            # a two-sided residue class through 0 contains the index 0;
            # the signed forms do not (0 is neither positive nor negative)
            if sign is None and r % pat["modulus"] == 0 and \
                    self.universe == "integers" and pat["from"] in (None, 0) \
                    and 0 not in pat["excluding"]:
                added.add(0)
        threshold = 0 if pat["from"] is None else max(pat["from"] - 1, 0)
        try:
            return IndexPattern.make(self.universe, pat["modulus"],
                                     pos_residues=pos, neg_residues=neg,
                                     threshold=threshold, added=added,
                                     removed=pat["excluding"])
        except ValueError as e:
            self.err(s, str(e))

    def _atom_vector(self, s, model, side, term, coeff):
        if term[0] == "name":
            n = term[1]
            if n not in model.spec.specials(side):
                self.err(s, "%r is not a special of %r"
                         % (n, model.side_name(side)))
            return Vector.special_basis(model.spec, side, n).scale(coeff)
        _, space, idx = term
        if model.side_of(space) != side:
            self.err(s, "term in %r inside a subspace of %r"
                     % (space, model.side_name(side)))
        if idx[0] != "int":
            self.err(s, "unbound index variable %r" % (idx[1],))
        if not model.spec.has_index(idx[1]):
            self.err(s, "index %d outside the universe" % (idx[1],))
        return Vector.basis(model.spec, side, idx[1]).scale(coeff)

    def _family(self, s, model, side, fam):
        pat = fam["pattern"]
        if pat is None:
            vec = Vector.zero(model.spec, side)
            for coeff, term in fam["terms"]:
                if term[0] == "index" and term[2][0] == "var":
                    self.err(s, "unbound index variable %r" % (term[2][1],))
                vec = vec.add(self._atom_vector(s, model, side, term, coeff))
            return vec, None
        var = pat["var"]
        anchor = Vector.zero(model.spec, side)
        var_terms = 0
        for coeff, term in fam["terms"]:
            if term[0] == "index" and term[2] == ("var", var):
                var_terms += 1
                if coeff != 1:
                    self.err(s, "the family variable must have "
                             "coefficient 1")
                if model.side_of(term[1]) != side:
                    self.err(s, "term in %r inside a subspace of %r"
                             % (term[1], model.side_name(side)))
                continue
            anchor = anchor.add(
                self._atom_vector(s, model, side, term, coeff))
        if var_terms != 1:
            self.err(s, "the family variable must appear exactly once")
        return None, TailFamily(model.spec.clip(self._pattern(s, pat)),
                                anchor)

    # -- declarations -------------------------------------------------------

    def subspace_stmt(self, s, model):
        side = model.side_of(s["space"])
        if side is None:
            self.err(s, "unknown space %r" % (s["space"],))
        if s.get("zero"):
            model.subspaces[s["name"]] = Subspace.zero(model.spec, side)
            return
        if "alias" in s:
            alias = s["alias"]
            if model.side_of(alias) == side:
                model.subspaces[s["name"]] = Subspace.full(model.spec, side)
                return
            src = model.subspaces.get(alias)
            if src is None or src.side != side:
                self.err(s, "%r is not a subspace of %r"
                         % (alias, s["space"]))
            model.subspaces[s["name"]] = src
            return
        vectors, fams = [], []
        for fam in s["families"]:
            vec, tail = self._family(s, model, side, fam)
            if tail is not None:
                fams.append(tail)
            elif not vec.is_zero():
                vectors.append(vec)
        try:
            model.subspaces[s["name"]] = span(vectors, fams,
                                              spec=model.spec, side=side)
        except ValueError as e:
            self.err(s, str(e))

    def _named_subspace(self, s, model, name):
        sub = model.subspaces.get(name)
        if sub is None:
            self.err(s, "unknown subspace %r" % (name,))
        return sub

    def levi_stmt(self, s, model):
        pairs = []
        wpart = None
        for summand in s["summands"]:
            if summand[0] == "sl":
                pairs.append((self._named_subspace(s, model, summand[1]),
                              self._named_subspace(s, model, summand[2])))
                continue
            word, wname = summand
            want = SELFDUAL_SYM if word == "so" else SELFDUAL_ANTI
            if model.spec.kind != want:
                self.err(s, "%s(...) needs a %s space"
                         % (word, want.split("-")[1]))
            if wpart is not None:
                self.err(s, "at most one so/sp part is allowed")
            wpart = self._named_subspace(s, model, wname)
        if model.spec.is_selfdual():
            kind = SO if model.spec.kind == SELFDUAL_SYM else SP
        else:
            kind = SL
            if wpart is not None:
                self.err(s, "so/sp parts need a self-dual space")
        try:
            datum = LeviDatum(kind, pairs, wpart=wpart, spec=model.spec)
        except ValueError as e:
            self.err(s, str(e))
        report = validate_levi(datum)
        if not report.ok():
            self.err(s, "; ".join(report.failures))
        model.levis[s["name"]] = datum

    def flag_stmt(self, s, model):
        side = model.side_of(s["space"])
        if side is None:
            self.err(s, "unknown space %r" % (s["space"],))
        members = []
        for n in s["members"]:
            sub = self._named_subspace(s, model, n)
            if sub.side != side:
                self.err(s, "%r is not a subspace of %r" % (n, s["space"]))
            members.append(sub)
        try:
            model.flags[s["name"]] = semiclosed_flag_from_chain(
                members, spec=model.spec, side=side)
        except (ValueError, PreconditionViolation) as e:
            self.err(s, str(e))

    def order_stmt(self, s, model):
        model.orders[s["name"]] = s["labels"]


def parse_model(text):
    """Parse and validate a model file; raises ModelError."""
    return _Builder(_Parser(text).statements()).build()


# -- canonical printing -----------------------------------------------------


def _format_coeff(c, body):
    if c == 1:
        return "+ " + body
    if c == -1:
        return "- " + body
    s = str(abs(c))
    return ("- " if c < 0 else "+ ") + s + "*" + body


def _join_terms(parts):
    out = " ".join(parts)
    if out.startswith("+ "):
        out = out[2:]
    elif out.startswith("- "):
        out = "-" + out[2:]
    return out


def format_vector(model, vec, extra_first=None):
    """Canonical vector string; extra_first is prepended verbatim (the
    family variable term)."""
    parts = [] if extra_first is None else ["+ " + extra_first]
    order = sorted(vec.coords(),
                   key=lambda cv: vec.spec.coord_key(vec.side, cv[0]))
    name = model.side_name(vec.side)
    for (tag, val), c in order:
        body = val if tag == "s" else "%s[%d]" % (name, val)
        parts.append(_format_coeff(c, body))
    if not parts:
        return "0"
    return _join_terms(parts)


def _zero_bare(pattern):
    """Whether the bare residue-class syntax of this pattern would cover
    the index 0 (the through-0 class, no 'from' bound)."""
    return (pattern.universe == "integers" and pattern.threshold == 0
            and 0 in pattern.pos_residues and 0 in pattern.neg_residues)


def format_pattern(pattern, var):
    """Canonical pattern clause 'i in r, ... mod m [from t]'.  Added
    members print as explicit generators, except the index 0 which the
    bare through-0 class covers; when that class excludes 0, its two
    signed halves print instead."""
    pos = set(pattern.pos_residues)
    neg = set(pattern.neg_residues)
    if pattern.universe == "positive":
        both, ponly, nonly = sorted(pos), [], []
    else:
        both = sorted(pos & neg)
        ponly = sorted(pos - neg)
        nonly = sorted(neg - pos)
        if _zero_bare(pattern) and 0 not in pattern.added:
            both.remove(0)
            ponly = sorted(ponly + [0])
            nonly = sorted(nonly + [0])
    bits = [str(r) for r in both] + ["+%d" % r for r in ponly] + \
        ["-%d" % r for r in nonly]
    out = "%s in %s mod %d" % (var, ", ".join(bits), pattern.modulus)
    if pattern.threshold > 0:
        out += " from %d" % (pattern.threshold + 1)
    return out


def _strip_added(pattern):
    keep = {0} if 0 in pattern.added and _zero_bare(pattern) else ()
    return IndexPattern.make(pattern.universe, pattern.modulus,
                             pos_residues=pattern.pos_residues,
                             neg_residues=pattern.neg_residues,
                             threshold=pattern.threshold, added=keep)


def format_subspace(model, sub):
    """Canonical printed form: '0', the space name, or a span of finite
    generators followed by tail families."""
    if sub.is_zero():
        return "0"
    if sub.is_full():
        return model.side_name(sub.side)
    name = model.side_name(sub.side)
    items = [format_vector(model, row) for row in sub.rows]
    for fam in sub.families:
        for i in sorted(fam.pattern.added):
            if i == 0 and _zero_bare(fam.pattern):
                continue
            items.append(format_vector(
                model, Vector.basis(sub.spec, sub.side, i).add(fam.anchor)))
        body = format_vector(model, fam.anchor,
                             extra_first="%s[%s]" % (name, "i"))
        items.append("%s for %s" % (
            body, format_pattern(_strip_added(fam.pattern), "i")))
    return "span { %s }" % ", ".join(items)


def format_flag(model, flag):
    return [format_subspace(model, m) for m in flag.members]
