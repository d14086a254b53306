"""Command line front end over model files.

    leviflags --model FILE [--format json|text] COMMAND ARGS...

Commands operate on the names declared in the model: perp/closure/dim
and socle report a subspace or a dimension, flag-from-chain and
minimal-couple report chains, taut-check/levi-check report booleans,
enumerate/count/trace-count report couple counts, selfdual-unique runs
the dedicated so/sp uniqueness search, and oracle replays the model
against finite truncations.

Reports print to stdout; the JSON form is byte-deterministic (sorted
keys, fixed seed via the TOOL_SEED environment variable for the oracle
command).  The exit code is nonzero exactly when an error diagnostic
was emitted.
"""

import json
import sys
from itertools import combinations

from .counting import (InfiniteFamily, count_self_normalizing,
                       enumerate_all_orders, enumerate_couples,
                       trace_condition_count)
from .flags import (PreconditionViolation, TautCouple, is_self_taut,
                    is_taut_couple, semiclosed_flag_from_chain)
from .levi import is_levi_component, is_levi_so, is_levi_sp, \
    minimal_taut_couple, socle
from .model import ModelError, format_flag, format_subspace, parse_model
from .oracle import oracle_check
from .sampling import random_element, random_vector, rng_from_env
from .spaces import LEFT, RIGHT, SELFDUAL_SYM, validate_pairing
from .subspaces import (Subspace, closure, equals, includes, intersect,
                        is_isotropic, perp, quotient_dim, subspace_sum)


class CommandError(Exception):
    """Bad command line or bad reference into the model."""


class Report:
    """What a command produced: a result, optional couples, diagnostics."""

    def __init__(self, command):
        self.command = command
        self.kind = None
        self.value = None
        self.extra = {}
        self.couples = []
        self.diagnostics = []

    def note(self, message):
        self.diagnostics.append(message)

    def error(self, message):
        self.diagnostics.append("error: " + message)

    def ok(self):
        return not any(d.startswith("error: ") for d in self.diagnostics)

    def as_dict(self):
        result = {"kind": self.kind, "value": self.value}
        result.update(self.extra)
        return {"command": self.command, "result": result,
                "couples": self.couples, "diagnostics": self.diagnostics}


def _chain_text(members, reverse=False):
    if reverse:
        return " ⊃ ".join(reversed(members))
    return " ⊂ ".join(members)


def format_report(report, fmt):
    """Render a report as bytes; fmt is 'json' or 'text'."""
    if fmt == "json":
        text = json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"
        return text.encode("utf-8")
    lines = ["command %s" % report.command]
    if report.kind is not None:
        value = report.value
        shown = "" if value is None else " %s" % \
            (json.dumps(value) if isinstance(value, bool) else value)
        lines.append("result %s%s" % (report.kind, shown))
    for k in sorted(report.extra):
        lines.append("%s %s" % (k, " ".join(str(x) for x in report.extra[k])))
    for entry in report.couples:
        order = entry["order"]
        head = "couple"
        if order:
            head += " order=(%s)" % ", ".join(str(x) for x in order)
        lines.append(head)
        if entry["flagV"]:
            lines.append("  " + _chain_text(entry["flagV"]))
        if entry["flagVstar"]:
            lines.append("  " + _chain_text(entry["flagVstar"], reverse=True))
    lines.extend(report.diagnostics)
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- argument helpers -------------------------------------------------------


def _options(args, known):
    """Split 'args' into {--opt: value} and positional tokens."""
    opts, positional = {}, []
    i = 0
    while i < len(args):
        a = args[i]
        if a in known:
            if i + 1 >= len(args):
                raise CommandError("%s needs a value" % a)
            opts[a] = args[i + 1]
            i += 2
        elif a.startswith("--"):
            raise CommandError("unknown option %r" % a)
        else:
            positional.append(a)
            i += 1
    return opts, positional

def _subspace(model, name):
    sub = model.subspaces.get(name)
    if sub is None:
        raise CommandError("unknown subspace %r" % name)
    return sub


def _flag(model, name):
    flag = model.flags.get(name)
    if flag is None:
        raise CommandError("unknown flag %r" % name)
    return flag


def _levi(model, opts):
    name = opts.get("--levi")
    if name is None:
        raise CommandError("--levi is required")
    datum = model.levis.get(name)
    if datum is None:
        raise CommandError("unknown Levi datum %r" % name)
    return datum


def _order(model, text, datum):
    if text in model.orders:
        order = model.orders[text]
    else:
        try:
            order = tuple(int(x) for x in text.split(","))
        except ValueError:
            raise CommandError("unknown order %r" % text)
    if sorted(order) != list(datum.labels()):
        raise CommandError("order %r is not a permutation of the summand "
                           "labels %r" % (order, tuple(datum.labels())))
    return order


def _couple(model, opts):
    text = opts.get("--couple")
    if text is None:
        raise CommandError("--couple is required")
    names = text.split(",")
    flags = [_flag(model, n) for n in names]
    if model.spec.is_selfdual():
        if len(flags) != 1:
            raise CommandError("a self-dual space takes a single flag")
        return TautCouple(flags[0])
    if len(flags) != 2:
        raise CommandError("a dual pair takes two flags 'F,G'")
    return TautCouple(flags[0], flags[1])


def _add_couple(report, model, couple, order=()):
    entry = {"order": [int(x) for x in order],
             "flagV": format_flag(model, couple.flag_v)}
    if couple.is_selfdual():
        entry["flagVstar"] = []
    else:
        entry["flagVstar"] = format_flag(model, couple.flag_vstar)
    report.couples.append(entry)


def _add_flag(report, model, flag):
    if flag.side == LEFT:
        report.couples.append({"order": [],
                               "flagV": format_flag(model, flag),
                               "flagVstar": []})
    else:
        report.couples.append({"order": [], "flagV": [],
                               "flagVstar": format_flag(model, flag)})


def _set_count(report, count):
    if count.is_finite():
        report.kind = "finite"
        report.value = count.value
    else:
        report.kind = "uncountable"
        report.value = None
        if count.witness is not None:
            report.extra["witness_J"] = sorted(int(x) for x in count.witness)


# -- commands ---------------------------------------------------------------


def _cmd_perp(model, report, args):
    _, names = _options(args, ())
    if len(names) != 1:
        raise CommandError("perp takes one subspace name")
    report.value = format_subspace(model, perp(_subspace(model, names[0])))
    report.kind = "subspace"


def _cmd_closure(model, report, args):
    _, names = _options(args, ())
    if len(names) != 1:
        raise CommandError("closure takes one subspace name")
    report.value = format_subspace(model, closure(_subspace(model, names[0])))
    report.kind = "subspace"


def _cmd_dim(model, report, args):
    _, names = _options(args, ())
    if len(names) == 1:
        d = _subspace(model, names[0]).dim()
    elif len(names) == 3 and names[1] == "mod":
        big = _subspace(model, names[0])
        small = _subspace(model, names[2])
        if big.side != small.side:
            raise CommandError("the two subspaces live on different sides")
        if not includes(big, small):
            raise CommandError("%r is not included in %r"
                               % (names[2], names[0]))
        d = quotient_dim(small, big)
    else:
        raise CommandError("usage: dim NAME [mod NAME]")
    if d.is_finite():
        report.kind = "finite"
        report.value = d.value
    else:
        report.kind = "uncountable"
        report.value = None
        report.note("the dimension is infinite")


def _cmd_flag_from_chain(model, report, args):
    _, names = _options(args, ())
    if not names:
        raise CommandError("flag-from-chain takes subspace names")
    subs = [_subspace(model, n) for n in names]
    sides = {s.side for s in subs}
    if len(sides) != 1:
        raise CommandError("chain members live on different sides")
    try:
        flag = semiclosed_flag_from_chain(subs)
    except (ValueError, PreconditionViolation) as e:
        raise CommandError(str(e))
    report.kind = "couples"
    report.value = 1
    _add_flag(report, model, flag)


def _cmd_taut_check(model, report, args):
    _, names = _options(args, ())
    if model.spec.is_selfdual():
        if len(names) != 1:
            raise CommandError("a self-dual space takes a single flag")
        report.kind = "bool"
        report.value = is_self_taut(_flag(model, names[0]))
        return
    if len(names) != 2:
        raise CommandError("a dual pair takes two flags")
    report.kind = "bool"
    report.value = is_taut_couple(_flag(model, names[0]),
                                  _flag(model, names[1]))


def _cmd_levi_check(model, report, args):
    opts, extra = _options(args, ("--couple", "--levi"))
    if extra:
        raise CommandError("unexpected arguments %r" % (extra,))
    datum = _levi(model, opts)
    if model.spec.is_selfdual():
        flag = _couple(model, opts).flag_v
        check = is_levi_so if model.spec.kind == SELFDUAL_SYM else is_levi_sp
        try:
            report.value = bool(check(flag, datum))
        except ValueError as e:
            raise CommandError(str(e))
        report.kind = "bool"
        return
    couple = _couple(model, opts)
    ok, kappa = is_levi_component(couple, datum)
    report.kind = "bool"
    report.value = bool(ok)
    if ok:
        report.extra["kappa"] = [kappa[label] for label in datum.labels()]


def _cmd_minimal_couple(model, report, args):
    opts, extra = _options(args, ("--levi", "--order"))
    if extra:
        raise CommandError("unexpected arguments %r" % (extra,))
    datum = _levi(model, opts)
    if "--order" not in opts:
        raise CommandError("--order is required")
    order = _order(model, opts["--order"], datum)
    try:
        couple = minimal_taut_couple(datum, order)
    except ValueError as e:
        raise CommandError(str(e))
    report.kind = "couples"
    report.value = 1
    _add_couple(report, model, couple, order)
    if couple.is_selfdual():
        report.note("self-dual couple: the dual flag mirrors the V-flag")


def _cmd_enumerate(model, report, args):
    opts, extra = _options(args, ("--levi", "--order"))
    if extra:
        raise CommandError("unexpected arguments %r" % (extra,))
    datum = _levi(model, opts)
    try:
        if "--order" in opts:
            order = _order(model, opts["--order"], datum)
            listed = enumerate_couples(datum, order).couples()
        else:
            listed = enumerate_all_orders(datum).couples()
    except InfiniteFamily as e:
        report.kind = "uncountable"
        report.value = None
        report.extra["witness_J"] = sorted(int(x) for x in e.witness)
        return
    except ValueError as e:
        raise CommandError(str(e))
    report.kind = "couples"
    report.value = len(listed)
    for order, couple in listed:
        _add_couple(report, model, couple, order)


def _cmd_count(model, report, args):
    opts, extra = _options(args, ("--levi",))
    if extra:
        raise CommandError("unexpected arguments %r" % (extra,))
    try:
        _set_count(report, count_self_normalizing(_levi(model, opts)))
    except ValueError as e:
        raise CommandError(str(e))


def _cmd_trace_count(model, report, args):
    opts, extra = _options(args, ("--couple",))
    if extra:
        raise CommandError("unexpected arguments %r" % (extra,))
    try:
        _set_count(report, trace_condition_count(_couple(model, opts)))
    except ValueError as e:
        raise CommandError(str(e))


def _cmd_socle(model, report, args):
    opts, extra = _options(args, ("--levi",))
    if extra:
        raise CommandError("unexpected arguments %r" % (extra,))
    try:
        sub = socle(_levi(model, opts))
    except ValueError as e:
        raise CommandError(str(e))
    report.kind = "subspace"
    report.value = format_subspace(model, sub)


def _bounded_subsets(items, cap=8):
    """All subsets when few items, otherwise just the small ones."""
    top = len(items) if len(items) <= cap else 2
    for size in range(top + 1):
        for combo in combinations(range(len(items)), size):
            yield [items[i] for i in combo]


def _cmd_selfdual_unique(model, report, args):
    opts, extra = _options(args, ("--levi",))
    if extra:
        raise CommandError("unexpected arguments %r" % (extra,))
    datum = _levi(model, opts)
    if not model.spec.is_selfdual():
        raise CommandError("selfdual-unique needs a self-dual space")
    if datum.summands or datum.wpart is None:
        raise CommandError("selfdual-unique handles data with a single "
                           "nondegenerate part")
    spec = model.spec
    w = datum.wpart
    core = intersect(closure(w), perp(w))
    pool = {}
    for s in (Subspace.zero(spec, LEFT), Subspace.full(spec, LEFT), w, core):
        pool[s.key()] = s
    # close the candidate pool under perp/closure/sum/intersect (bounded)
    for _ in range(3):
        items = list(pool.values())
        fresh = []
        for s in items:
            fresh.append(perp(s))
            fresh.append(closure(s))
        for a, b in combinations(items, 2):
            fresh.append(subspace_sum(a, b))
            fresh.append(intersect(a, b))
        before = len(pool)
        for s in fresh:
            pool.setdefault(s.key(), s)
            if len(pool) > 40:
                break
        if len(pool) == before or len(pool) > 40:
            break
    check = is_levi_so if spec.kind == SELFDUAL_SYM else is_levi_sp
    members = list(pool.values())
    found = {}
    for u in members:
        # the immediate pair below W must be U subset U+W with U the perp
        # of U+W; candidates come from the pool
        if not is_isotropic(u) or not includes(u, core):
            continue
        uw = subspace_sum(u, w)
        if not equals(u, perp(uw)):
            continue
        below = [s for s in members
                 if not s.is_zero() and not equals(u, s) and includes(u, s)]
        above = [s for s in members
                 if not s.is_full() and not equals(uw, s)
                 and includes(s, uw)]
        for refinement in _bounded_subsets(below + above):
            try:
                flag = semiclosed_flag_from_chain([u, uw] + refinement,
                                                  spec=spec, side=LEFT)
            except (ValueError, PreconditionViolation):
                continue
            if flag.key() in found or not is_self_taut(flag):
                continue
            try:
                if check(flag, datum):
                    found[flag.key()] = flag
            except ValueError:
                continue
    report.kind = "couples"
    report.value = len(found)
    for key in sorted(found, key=repr):
        _add_flag(report, model, found[key])
    if found:
        report.note("self-dual couple: the dual flag mirrors the V-flag")


def _oracle_line(result):
    bits = ["%s@%d" % (e["status"], e["cutoff"]) for e in result.entries]
    if result.stabilized:
        bits.append("stabilized")
    return " ".join(bits)


def _cmd_oracle(model, report, args):
    opts, extra = _options(args, ("--verify", "--cutoffs"))
    if extra:
        raise CommandError("unexpected arguments %r" % (extra,))
    if opts.get("--verify", "all") != "all":
        raise CommandError("only '--verify all' is supported")
    try:
        cutoffs = tuple(int(x) for x in
                        opts.get("--cutoffs", "10,20,40").split(","))
    except ValueError:
        raise CommandError("bad --cutoffs value")
    rng = rng_from_env()
    all_ok, _ = validate_pairing(model.spec, max(cutoffs))
    report.note("pairing nondegenerate up to %d: %s"
                % (max(cutoffs), all_ok))
    named = sorted(model.subspaces.items())
    for name, sub in named:
        probe = random_element(rng, sub).add(
            random_vector(rng, model.spec, sub.side))
        for kind, operands in (("membership", (sub, probe)),
                               ("perp", (sub,)), ("closure", (sub,))):
            res = oracle_check(kind, operands, cutoffs)
            all_ok = all_ok and res.ok
            report.note("%s %s: %s" % (kind, name, _oracle_line(res)))
    by_side = {LEFT: [], RIGHT: []}
    for name, sub in named:
        by_side[sub.side].append((name, sub))
    for side in (LEFT, RIGHT):
        group = by_side[side]
        for (na, a), (nb, b) in zip(group, group[1:]):
            for kind, operands in (("sum", (a, b)),
                                   ("intersect", (a, b)),
                                   ("quotient_dim", (intersect(a, b), a))):
                res = oracle_check(kind, operands, cutoffs)
                all_ok = all_ok and res.ok
                report.note("%s %s,%s: %s" % (kind, na, nb,
                                              _oracle_line(res)))
    report.kind = "bool"
    report.value = bool(all_ok)


_COMMANDS = {
    "perp": _cmd_perp,
    "closure": _cmd_closure,
    "dim": _cmd_dim,
    "flag-from-chain": _cmd_flag_from_chain,
    "taut-check": _cmd_taut_check,
    "levi-check": _cmd_levi_check,
    "minimal-couple": _cmd_minimal_couple,
    "enumerate": _cmd_enumerate,
    "count": _cmd_count,
    "trace-count": _cmd_trace_count,
    "socle": _cmd_socle,
    "selfdual-unique": _cmd_selfdual_unique,
    "oracle": _cmd_oracle,
}


def run_command(model, command, args):
    """Execute one command against a parsed model; returns a Report."""
    report = Report(command)
    handler = _COMMANDS.get(command)
    if handler is None:
        report.error("unknown command %r" % command)
        return report
    try:
        handler(model, report, args)
    except CommandError as e:
        report.error(str(e))
    except ValueError as e:
        report.error(str(e))
    return report


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    fmt = "json"
    model_path = None
    rest = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--model":
            if i + 1 >= len(argv):
                print("error: --model needs a value", file=sys.stderr)
                return 2
            model_path = argv[i + 1]
            i += 2
        elif a == "--format":
            if i + 1 >= len(argv):
                print("error: --format needs a value", file=sys.stderr)
                return 2
            fmt = argv[i + 1]
            i += 2
        else:
            rest.append(a)
            i += 1
    if fmt not in ("json", "text"):
        print("error: --format must be json or text", file=sys.stderr)
        return 2
    if not rest:
        print("error: no command given", file=sys.stderr)
        print(__doc__, file=sys.stderr)
        return 2
    command, args = rest[0], rest[1:]
    report = Report(command)
    if model_path is None:
        report.error("--model is required")
    else:
        try:
            with open(model_path, "r", encoding="utf-8") as fh:
                model = parse_model(fh.read())
        except OSError as e:
            report.error(str(e))
        except ModelError as e:
            report.error(str(e))
        else:
            report = run_command(model, command, args)
    sys.stdout.buffer.write(format_report(report, fmt))
    sys.stdout.buffer.flush()
    return 0 if report.ok() else 1


if __name__ == "__main__":
    sys.exit(main())
