"""Command line interface: ``cyclone <group> <verb> [flags] [payload]``.

Payloads are JSON given inline, through ``--in <path>``, or on stdin
(``-`` forces stdin for verbs whose payload is optional).
Output is JSON with sorted keys (or CSV for tables).  Exit status is 0 on
success, 1 when a verification fails and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import burnside as bs
from . import cyclonic as cy
from . import cyclotomic as ct
from . import dga
from . import mackey as mk
from . import supernat as sn
from . import witt as wt
from .rings import ring_from_tag


class InputError(ValueError):
    def __init__(self, message: str, location: str = ""):
        super().__init__(message)
        self.location = location


class VerificationFailed(Exception):
    def __init__(self, document):
        super().__init__("verification failed")
        self.document = document


# -- payload helpers --------------------------------------------------------------


def _payload(args, required=True):
    text = None
    given = getattr(args, "payload", None)
    if given == "-" or (given is None and required and not getattr(args, "inp", None)
                        and not sys.stdin.isatty()):
        text = sys.stdin.read()
    elif given:
        text = given
    elif getattr(args, "inp", None):
        try:
            with open(args.inp, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(str(exc), "--in") from exc
    if not text or not text.strip():
        if required:
            raise InputError("a JSON payload is required", "payload")
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from exc


def _need(args, name):
    value = getattr(args, name, None)
    if value is None:
        raise InputError(f"--{name} is required", f"--{name}")
    return value


def _ring(args):
    try:
        return ring_from_tag(args.ring or "Z")
    except ValueError as exc:
        raise InputError(str(exc), "--ring") from exc


def _primes(args, default=(2, 3)):
    if not args.primes:
        return tuple(default)
    try:
        primes = tuple(sorted({int(p) for p in args.primes.split(",") if p.strip()}))
    except ValueError as exc:
        raise InputError(f"bad prime list {args.primes!r}", "--primes") from exc
    for p in primes:
        if len(sn.prime_factors(p)) != 1:
            raise InputError(f"{p} is not prime", "--primes")
    return primes


def _pair(doc, what):
    if isinstance(doc, dict) and {"x", "y"} <= doc.keys():
        return doc["x"], doc["y"]
    if isinstance(doc, list) and len(doc) == 2:
        return doc[0], doc[1]
    raise InputError(f"expected a pair of {what}", "payload")


def _witt(doc, ring, level=None, where="payload"):
    if isinstance(doc, dict) and "components" in doc:
        level = int(doc.get("level", level or 0))
        comps = doc["components"]
    else:
        comps = doc
    if not level:
        raise InputError("Witt vector level is unknown; pass --level", where)
    if isinstance(comps, dict):
        comps = {int(k): ring.decode(v) for k, v in comps.items()}
        extra = set(comps) - set(sn.divisors(level))
        if extra:
            raise InputError(f"indices {sorted(extra)} do not divide {level}", where)
    elif isinstance(comps, list):
        comps = [ring.decode(v) for v in comps]
    else:
        raise InputError("Witt components must be a list or a map", where)
    return wt.WittVector(ring, level, comps)


def _orbit_map(doc, N, where):
    try:
        return cy.make_orbit_map(int(doc["src"]), int(doc["tgt"]), doc.get("offset", "0"), N)
    except (KeyError, TypeError) as exc:
        raise InputError("orbit maps need src, tgt and offset", where) from exc


def _burnside_element(doc, level):
    if isinstance(doc, int):
        return bs.BurnsideElement.orbit(level, doc)
    if isinstance(doc, list) and len(doc) == 1 and isinstance(doc[0], int):
        return bs.BurnsideElement.orbit(level, doc[0])
    if isinstance(doc, dict) and "coeffs" in doc:
        return bs.BurnsideElement.from_json({"level": level, **doc})
    if isinstance(doc, dict):
        return bs.BurnsideElement(level, {int(k): int(c) for k, c in doc.items()})
    raise InputError("Burnside elements are orbit levels or coefficient maps", "payload")


def _dga_element(doc, ring):
    if isinstance(doc, str):
        return dga.DgaElement.symbol(dga.parse_symbol(doc), ring)
    if isinstance(doc, dict):
        return dga.DgaElement.from_json(doc, ring)
    raise InputError("DGA elements are symbol strings or symbol maps", "payload")


def _verdict(report_doc):
    if not report_doc.get("pass", False):
        raise VerificationFailed(report_doc)
    return report_doc


# -- verbs --------------------------------------------------------------------------


def supernat_gcd(args):
    a, b = (sn.parse_supernatural(x) for x in args.values)
    return {"result": str(sn.meet(a, b))}


def supernat_lcm(args):
    a, b = (sn.parse_supernatural(x) for x in args.values)
    return {"result": str(sn.join(a, b))}


def supernat_nest(args):
    if len(args.values) != 1:
        raise InputError("nest takes one supernatural number", "arguments")
    n = sn.parse_supernatural(args.values[0])
    return {"nest": sn.nest(n, _need(args, "bound"))}


def _N(args):
    return sn.parse_supernatural(args.N) if args.N else sn.Supernatural.infinity()


def orbit_compose(args):
    doc = _payload(args)
    maps = doc.get("maps") if isinstance(doc, dict) else doc
    if not isinstance(maps, list) or not maps:
        raise InputError("expected a non-empty list of maps", "payload")
    N = _N(args)
    out = _orbit_map(maps[0], N, "maps[0]")
    for i, m in enumerate(maps[1:], 1):
        out = cy.compose_orbit_maps(out, _orbit_map(m, N, f"maps[{i}]"))
    return out.to_json()


def orbit_pullback(args):
    doc = _payload(args)
    N = _N(args)
    f, g = _orbit_map(doc["f"], N, "f"), _orbit_map(doc["g"], N, "g")
    apex, comps = cy.pullback_cospan(f, g)
    return {"count": len(comps),
            "components": [{"level": pr1.source.level, "pr1": pr1.to_json(), "pr2": pr2.to_json()}
                           for pr1, pr2 in comps]}


def orbit_simplex_check(args):
    doc = _payload(args)
    N = _N(args)
    objects = [cy.Orbit(int(m), N) for m in doc["objects"]]
    maps, fillers = {}, {}
    for key, off in doc["maps"].items():
        i, j = (int(x) for x in key.split(","))
        maps[i, j] = cy.make_orbit_map(objects[i].level, objects[j].level, off, N)
    for key, val in doc["fillers"].items():
        fillers[tuple(int(x) for x in key.split(","))] = cy.parse_rational(val)
    rep = cy.check_simplex3(objects, maps, fillers)
    return _verdict({"pass": rep.ok, "failures": [
        {**f, "face": list(f["face"])} for f in rep.failures]})


def burnside_compose(args):
    doc = _payload(args)
    first, second = _pair(doc, "morphisms")
    h = bs.compose_h(bs.HMorphism.from_json(first), bs.HMorphism.from_json(second))
    return h.to_json()


def burnside_mul(args):
    level = _need(args, "level")
    x, y = _pair(_payload(args), "Burnside elements")
    return (_burnside_element(x, level) * _burnside_element(y, level)).to_json()


def burnside_table(args):
    level = _need(args, "level")
    rows = [{"k": k, "l": l, "product": {str(g): c for g, c in prod.items()}}
            for k, l, prod in bs.burnside_table(level)]
    if args.out == "csv":
        return _csv(["k", "l", "coefficient", "orbit"],
                    [[r["k"], r["l"], *next(iter(((c, g) for g, c in r["product"].items())), (0, ""))]
                     for r in rows])
    return {"level": level, "table": rows}


def mackey_validate(args):
    doc = _payload(args)
    data = mk.MackeyData.from_json(doc)
    return _verdict(mk.validate_mackey(data).to_json())


def mackey_eval(args):
    doc = _payload(args)
    if "data" in doc:
        data = mk.MackeyData.from_json(doc["data"])
    else:
        data = mk.burnside_mackey(_need(args, "bound"))
    h = bs.HMorphism.from_json(doc["h"] if "h" in doc else doc)
    return {"matrix": mk.eval_h(data, h).matrix.to_list()}


def mackey_burnside(args):
    return mk.burnside_mackey(_need(args, "bound")).to_json()


def mackey_witt(args):
    return wt.witt_mackey(_ring(args), _need(args, "bound")).to_json()


def witt_binary(op):
    def run(args):
        ring = _ring(args)
        x, y = _pair(_payload(args), "Witt vectors")
        x, y = _witt(x, ring, args.level, "x"), _witt(y, ring, args.level, "y")
        return (wt.witt_add if op == "add" else wt.witt_mul)(x, y).to_json()
    return run


def witt_frob(args):
    ring = _ring(args)
    w = _witt(_payload(args), ring, None)
    return wt.frobenius(w, _need(args, "level")).to_json()


def witt_versch(args):
    ring = _ring(args)
    w = _witt(_payload(args), ring, None)
    return wt.verschiebung(w, _need(args, "level")).to_json()


def witt_restrict(args):
    ring = _ring(args)
    w = _witt(_payload(args), ring, None)
    return wt.restriction(w, _need(args, "level")).to_json()


def witt_ghost(args):
    ring = _ring(args)
    doc = _payload(args)
    if isinstance(doc, dict) and "ghost" in doc:
        level = int(doc.get("level", args.level or 0))
        values = doc["ghost"]
        if isinstance(values, dict):
            values = [ring.decode(values[str(k)]) for k in sn.divisors(level)]
        else:
            values = [ring.decode(v) for v in values]
        return wt.ghost_solve(values, ring, level).to_json()
    w = _witt(doc, ring, args.level)
    g = wt.ghost(w)
    return {"ring": ring.tag, "level": w.level,
            "ghost": {str(k): ring.encode(v) for k, v in g.as_dict().items()}}


def witt_polys(args):
    level = _need(args, "level")
    op = args.op or "sum"
    polys = wt.universal_polys(level, op)
    return {"level": level, "op": op,
            "polys": {str(k): p.ring.encode(p) for k, p in polys.items()}}


def cyclotomic_gfp(args):
    p, n = _need(args, "p"), _need(args, "level")
    base = mk.burnside_mackey() if args.mackey == "burnside" else wt.witt_mackey_rule(_ring(args))
    phi = ct.geometric_fixed_points(base, p)
    q, x = phi.group(n), base.group(n)
    ok = q.is_isomorphic(x)
    return _verdict({"level": n, "p": p, "check": "Phi^p X<n> isomorphic to X<n>",
                     "pass": ok, "group": q.to_json(),
                     "witness": None if ok else {"expected": x.to_json()}})


def _report_entries(report):
    return [{"level": v.get("level", (v.get("pair") or [None])[0]), "check": v.get("check"),
             "pass": False, "witness": {k: val for k, val in v.items() if k not in ("level", "check")}}
            for v in report.violations]


def cyclotomic_verify_witt(args):
    ring = _ring(args)
    bound = args.bound or 36
    c = ct.witt_cyclotomic(ring, _primes(args))
    rep = ct.verify_cyclotomic(c, bound)
    entries = _report_entries(rep)
    for n in sn.divisors(bound):
        for m in sn.divisors(n):
            rho = ct.derived_restrictions(c, m, n)
            if not rho.equals(ct.witt_truncation(ring, m, n)):
                entries.append({"level": n, "check": f"rho {m}|{n} is truncation", "pass": False,
                                "witness": rho.difference(ct.witt_truncation(ring, m, n))})
    return _verdict({"ring": ring.tag, "bound": bound, "primes": list(c.primes),
                     "checked": rep.checked, "pass": not entries, "results": entries})


def cyclotomic_recollement(args):
    p = _need(args, "p")
    doc = _payload(args, required=False)
    if doc is not None:
        data = mk.MackeyData.from_json(doc)
    elif args.mackey == "burnside":
        data = mk.burnside_mackey(_need(args, "bound"))
    else:
        data = wt.witt_mackey(_ring(args), _need(args, "bound"))
    rep = ct.recollement_check(data, p)
    return _verdict({"p": p, "bound": data.bound, "checked": rep.checked, "pass": rep.ok,
                     "results": _report_entries(rep)})


def cyclotomic_restrictions(args):
    ring = _ring(args)
    n = _need(args, "level")
    c = ct.witt_cyclotomic(ring, sorted(set(sn.prime_factors(n))) or (2,))
    return {"ring": ring.tag, "level": n,
            "rho": {f"{m}|{n}": ct.derived_restrictions(c, m, n).matrix.to_list()
                    for m in sn.divisors(n)}}


def cyclotomic_twisted_assoc(args):
    audit = ct.twisted_cell_audit(args.bound or 24)
    return _verdict({**audit, "pass": audit["unique"] and audit["unital"]})


def dga_mul(args):
    ring = _ring(args)
    x, y = _pair(_payload(args), "DGA elements")
    return dga.dga_mul(_dga_element(x, ring), _dga_element(y, ring)).to_json()


def dga_table(args):
    rows = dga.structure_table(_need(args, "bound"))
    if args.out == "csv":
        return _csv(["x", "y", "coefficient", "product"],
                    [[str(x), str(y), c, str(s)] for x, y, c, s in rows])
    return {"bound": args.bound,
            "table": [{"x": str(x), "y": str(y), "coefficient": c, "product": str(s)}
                      for x, y, c, s in rows]}


class _CSV(str):
    pass


def _csv(header, rows) -> _CSV:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return _CSV(buf.getvalue())


VERBS = {
    "supernat": {"gcd": supernat_gcd, "lcm": supernat_lcm, "nest": supernat_nest},
    "orbit": {"compose": orbit_compose, "pullback": orbit_pullback,
              "simplex-check": orbit_simplex_check},
    "burnside": {"compose": burnside_compose, "mul": burnside_mul, "table": burnside_table},
    "mackey": {"validate": mackey_validate, "eval": mackey_eval, "burnside": mackey_burnside,
               "witt": mackey_witt},
    "witt": {"add": witt_binary("add"), "mul": witt_binary("mul"), "frob": witt_frob,
             "versch": witt_versch, "restrict": witt_restrict, "ghost": witt_ghost,
             "polys": witt_polys},
    "cyclotomic": {"gfp": cyclotomic_gfp, "verify-witt": cyclotomic_verify_witt,
                   "recollement": cyclotomic_recollement,
                   "restrictions": cyclotomic_restrictions,
                   "twisted-assoc": cyclotomic_twisted_assoc},
    "dga": {"mul": dga_mul, "table": dga_table},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cyclone", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)
    for group, verbs in VERBS.items():
        gp = groups.add_parser(group)
        sub = gp.add_subparsers(dest="verb", required=True)
        for verb in verbs:
            vp = sub.add_parser(verb)
            if group == "supernat":
                vp.add_argument("values", nargs="*")
            else:
                vp.add_argument("payload", nargs="?")
            vp.add_argument("--ring")
            vp.add_argument("--level", type=int)
            vp.add_argument("--bound", type=int)
            vp.add_argument("--primes")
            vp.add_argument("--p", type=int)
            vp.add_argument("--N")
            vp.add_argument("--op", choices=["sum", "product", "negation"])
            vp.add_argument("--mackey", choices=["witt", "burnside"], default="witt")
            vp.add_argument("--out", choices=["json", "csv"], default="json")
            vp.add_argument("--in", dest="inp")
    return parser


def _emit(doc, stream):
    if isinstance(doc, _CSV):
        stream.write(doc)
    else:
        stream.write(json.dumps(doc, sort_keys=True, default=str) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    handler = VERBS[args.group][args.verb]
    try:
        doc = handler(args)
    except VerificationFailed as exc:
        _emit(exc.document, sys.stdout)
        return 1
    except InputError as exc:
        _emit({"error": str(exc), "location": exc.location}, sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, ArithmeticError, mk.OutOfBound) as exc:
        _emit({"error": f"{type(exc).__name__}: {exc}", "location": f"{args.group} {args.verb}"},
              sys.stderr)
        return 2
    if args.out == "csv" and not isinstance(doc, _CSV):
        _emit({"error": "CSV output is only available for tables", "location": "--out"},
              sys.stderr)
        return 2
    _emit(doc, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
