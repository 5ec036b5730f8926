"""Command-line front end: law suites, certificates, DFAs and the aggregate report.

Exit codes: 0 when every outcome matches the expected table, 1 when a check
fails, 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import copy
import itertools
import json
import os
import sys
from dataclasses import fields

from . import __version__
from . import regex as rx
from .confluence import theorem4_certify
from .gallery import GalleryEntry, checked_functor, gallery
from .laws import CheckConfig, LawReport, condition_suite, laws_bnf
from .quotient import QuotientSpec
from .witnesses import PartialQuotientRefused, RestrictedF, WitnessRefused, wt_check, wt_lift

CONFIG_ENV = "QUOTLAB_CONFIG"
DEFAULT_CONFIG_FILE = "quotlab.cfg"
FAULTABLE = ("fset", "dlist", "cyclist", "fim", "dup-subtype")


class UsageError(Exception):
    pass


# -- configuration ---------------------------------------------------------------

def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys mirror CheckConfig."""
    known = {f.name: f.type for f in fields(CheckConfig)}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            k, sep, v = line.partition("=")
            k = k.strip().replace("-", "_")
            if not sep or k not in known:
                raise UsageError(f"{path}:{n}: expected key = value with key in {sorted(known)}")
            try:
                out[k] = int(v.strip())
            except ValueError:
                raise UsageError(f"{path}:{n}: {k} needs an integer") from None
    return out


def config_path(args) -> str | None:
    if getattr(args, "config", None):
        return args.config
    if os.environ.get(CONFIG_ENV):
        return os.environ[CONFIG_ENV]
    return DEFAULT_CONFIG_FILE if os.path.exists(DEFAULT_CONFIG_FILE) else None


def make_config(args) -> CheckConfig:
    vals = {}
    path = config_path(args)
    if path:
        if not os.path.exists(path):
            raise UsageError(f"config file not found: {path}")
        vals.update(read_config_file(path))
    for flag, key in (("bound", "bound"), ("universe", "universe"), ("depth", "join_depth"), ("seed", "seed")):
        v = getattr(args, flag, None)
        if v is not None:
            vals[key] = v
    try:
        return CheckConfig(**vals)
    except ValueError as e:
        raise UsageError(str(e)) from None


# -- running entries -------------------------------------------------------------

def _drop_last(x):
    return x[:-1] if isinstance(x, tuple) and x else x


def faulty(F):
    """A copy of F whose mapper drops the last list element."""
    G = copy.copy(F)
    G.name = f"{F.name}+fault"
    G.map = lambda fs, x: _drop_last(type(F).map(G, fs, x))
    return G


def _subject(e: GalleryEntry, cfg: CheckConfig, fault: bool):
    """The functor the laws run on, and the one the conditions run on."""
    if not fault:
        return e.construct(cfg), checked_functor(e, cfg)
    raw = faulty(e.raw)
    if not e.is_quotient:
        T = RestrictedF(raw, checked_functor(e, cfg).pred)
        return T, T
    return QuotientSpec(raw, e.equiv, name=f"{e.name}+fault", class_slack=cfg.class_slack), raw


def _cell(rep: LawReport, expected: str, timings: bool) -> dict:
    d = rep.to_json(timings)
    d["expected"] = expected
    return d


def _cert_cell(e: GalleryEntry, cfg: CheckConfig, orientation: str | None, timings: bool) -> dict:
    S = e.system(orientation)
    c = theorem4_certify(S, e.equiv, e.raw, e.generators, cfg, e.cert_bound)
    label = "theorem4" if orientation is None else f"theorem4:{orientation}"
    d = {"law": label, "status": "pass" if c.certified else "fail"}
    if not c.certified:
        d["counterexample"] = {"withheld_at": c.withheld_at, **(c.counterexample or {})}
    d["cases"] = sum(c.cases.values())
    d["millis"] = c.millis if timings else None
    d["expected"] = e.expect(label)
    return d


def run_entry(e: GalleryEntry, cfg: CheckConfig, timings: bool = False, certificates: bool = False,
              fault: bool = False) -> dict:
    checks = []
    try:
        Q, F = _subject(e, cfg, fault)
    except PartialQuotientRefused as err:
        checks.append({"law": "construct", "status": "fail", "counterexample": {"refused": str(err)},
                       "cases": 0, "millis": None, "expected": "pass"})
        return {"name": e.name, "checks": checks}
    for rep in laws_bnf(Q, cfg):
        checks.append(_cell(rep, e.expect(rep.law), timings))
    for rep in condition_suite(e.equiv, F, cfg):
        checks.append(_cell(rep, e.expect(rep.law), timings))
    for w in e.witnesses:
        try:
            rep = wt_check(Q, wt_lift(Q, w, cfg), cfg)
        except WitnessRefused as err:
            rep = err.report
        checks.append(_cell(rep, e.expect(rep.law), timings))
    if certificates and not fault:
        if e.rewrite is not None:
            checks.append(_cert_cell(e, cfg, None, timings))
        for o in sorted(e.orientations):
            checks.append(_cert_cell(e, cfg, o, timings))
    return {"name": e.name, "checks": checks}


def entries_match(entries: list[dict]) -> bool:
    return all(c["status"] == c["expected"] for en in entries for c in en["checks"])


def document(cfg: CheckConfig, entries: list[dict], timings: bool) -> dict:
    return {"version": __version__, "config": {**cfg.as_dict(), "timings": timings}, "entries": entries}


def dump(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve(names) -> list[GalleryEntry]:
    g = gallery()
    bad = [n for n in names if n not in g]
    if bad:
        raise UsageError(f"unknown gallery entry: {', '.join(bad)} (known: {', '.join(g)})")
    return [g[n] for n in names]


def _text_lines(entries: list[dict]) -> str:
    lines = []
    for en in entries:
        for c in en["checks"]:
            mark = "ok" if c["status"] == c["expected"] else "MISMATCH"
            lines.append(f"{en['name']:14} {c['law']:26} {c['status']:18} expected {c['expected']:6} {mark}")
    return "\n".join(lines) + "\n"


def _emit_entries(args, cfg, entries) -> int:
    if args.format == "text":
        text = _text_lines(entries)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        dump(document(cfg, entries, args.timings), args.out)
    return 0 if entries_match(entries) else 1


# -- subcommands -----------------------------------------------------------------

def cmd_laws(args) -> int:
    es = _resolve(args.entries)
    cfg = make_config(args)
    return _emit_entries(args, cfg, [run_entry(e, cfg, args.timings) for e in es])


def cmd_report(args) -> int:
    names = args.entries or list(gallery())
    es = _resolve(names)
    if args.inject_fault and args.inject_fault not in FAULTABLE:
        raise UsageError(f"--inject-fault works on list entries: {', '.join(FAULTABLE)}")
    if args.inject_fault and args.inject_fault not in names:
        raise UsageError(f"--inject-fault {args.inject_fault} is not among the selected entries")
    cfg = make_config(args)
    entries = [run_entry(e, cfg, args.timings, certificates=True, fault=e.name == args.inject_fault)
               for e in es]
    return _emit_entries(args, cfg, entries)


def cmd_confluence(args) -> int:
    (e,) = _resolve([args.entry])
    cfg = make_config(args)
    S = e.system(args.orientation)
    if S is None:
        if args.orientation and e.rewrite is not None:
            raise UsageError(f"{e.name} has no orientation {args.orientation!r} "
                             f"(known: {', '.join(sorted(e.orientations)) or 'none'})")
        raise UsageError(f"{e.name} has no rewrite system registered")
    bound = args.bound if args.bound is not None else e.cert_bound
    c = theorem4_certify(S, e.equiv, e.raw, e.generators, cfg, bound)
    dump(c.to_json(args.timings), args.out)
    return 0 if c.certified else 1


def _letters(alphabet: str) -> tuple:
    try:
        atoms = tuple(rx.letter_atom(ch) for ch in alphabet)
    except rx.RegexSyntaxError as e:
        raise UsageError(f"bad alphabet: {e}") from None
    if len(set(atoms)) != len(atoms) or not atoms:
        raise UsageError("alphabet needs distinct letters")
    return atoms


def cmd_dfa(args) -> int:
    try:
        r = rx.parse(args.pattern)
    except rx.RegexSyntaxError as e:
        raise UsageError(f"parse error: {e}") from None
    sigma = _letters(args.alphabet)
    try:
        d = rx.build_dfa(r, sigma, args.state_limit)
    except rx.StateLimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    check = None
    if args.check is not None:
        check = {"max_length": args.check, "words": 0, "mismatch": None}
        for n in range(args.check + 1):
            for w in itertools.product(sigma, repeat=n):
                check["words"] += 1
                if d.accepts(w) != rx.match_oracle(r, w):
                    check["mismatch"] = "".join(rx.show_atom(a) for a in w) or "e"
                    break
            if check["mismatch"] is not None:
                break
        check["agrees"] = check["mismatch"] is None
    if args.format == "dot":
        text = rx.to_dot(d)
    elif args.format == "json":
        order = sorted(d.states, key=rx.rkey)
        ix = {q: k for k, q in enumerate(order)}
        doc = {"pattern": rx.show(r), "alphabet": args.alphabet, "states": len(d),
               "start": ix[d.start], "accepting": sorted(ix[q] for q in d.accepting),
               "labels": [rx.show(q) for q in order],
               "delta": [[ix[d.delta[(q, a)]] for a in d.alphabet] for q in order]}
        if check is not None:
            doc["check"] = check
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = f"pattern: {rx.show(r)}\nstates: {len(d)}\naccepting: {len(d.accepting)}\n"
        if check is not None:
            verdict = "agrees" if check["agrees"] else f"disagrees on {check['mismatch']}"
            text += f"oracle: {verdict} ({check['words']} words up to length {args.check})\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if check is None or check["agrees"] else 1


# -- argument parsing ------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bound", type=int, help="value size bound (default 3)")
    p.add_argument("--universe", type=int, help="atoms per sort (default 2)")
    p.add_argument("--depth", type=int, help="rewrite join depth (default 4)")
    p.add_argument("--seed", type=int, help="sampling seed (default 0)")
    p.add_argument("--config", help=f"key = value config file (else ${CONFIG_ENV}, else ./{DEFAULT_CONFIG_FILE})")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--timings", action="store_true", help="record wall-clock millis (breaks byte-identity)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quotlab", description="Bounded checks for quotients of bounded natural functors.")
    ap.add_argument("--version", action="version", version=f"quotlab {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("laws", help="functor laws and quotient conditions for gallery entries")
    p.add_argument("entries", nargs="+")
    p.add_argument("--format", choices=("json", "text"), default="json")
    _common(p)
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("confluence", help="bounded confluence certificate for an entry's rewrite system")
    p.add_argument("entry")
    p.add_argument("--orientation", help="alternative rewrite system, e.g. 'removing' for dlist")
    _common(p)
    p.set_defaults(func=cmd_confluence)

    p = sub.add_parser("dfa", help="compile a regex to a derivative DFA")
    p.add_argument("pattern")
    p.add_argument("--alphabet", default="ab")
    p.add_argument("--check", type=int, metavar="N", help="compare with the matcher on all words up to length N")
    p.add_argument("--format", choices=("dot", "json", "text"), default="text")
    p.add_argument("--state-limit", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dfa)

    p = sub.add_parser("report", help="the whole gallery matrix as one JSON document")
    p.add_argument("--entries", nargs="+", metavar="NAME", help="restrict to these entries")
    p.add_argument("--inject-fault", metavar="NAME", help="break the mapper of one list entry (self test)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    _common(p)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"quotlab: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
