"""Command-line front end.

Exit codes: 0 avoided or clean scan, 1 realized or found, 2 method
inapplicable, 3 input or parse error, 4 resource cap hit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import oracle
from .applications import GroupMap, GroupMapParseError, decide_additive, decide_long_abelian, parse_gmap
from .bounds import choose_power, contracting_bounds
from .linalg import intmat, poly
from .linalg.spectral import ModulusOneError, parse_jordan_override, spectral_data
from .report import (CLEAN, EXIT_PARSE_ERROR, FOUND, INAPPLICABLE, RESOURCE_EXCEEDED, DecisionReport, Witness,
                     bounds_entry, exit_code, morphism_entry)
from .templates import DecideConfig, ResourceExceeded, decide, trivial_template
from .words import (MethodInapplicable, MorphismParseError, factors_of_length,
                    fixed_point_prefix, image_factors_of_length, is_primitive, parse_morphism)


class InputError(Exception):
    """Bad command-line input (missing file, unreadable value)."""


# ---------------------------------------------------------------------------
# input resolution

def fixtures_dir() -> Path:
    return Path(str(resources.files("abelfree") / "fixtures"))


def _resolve(ref: str, suffix: str) -> Path:
    p = Path(ref)
    if p.is_file():
        return p
    for cand in (fixtures_dir() / ref, fixtures_dir() / (ref + suffix)):
        if cand.is_file():
            return cand
    raise InputError(f"no such file or fixture: {ref}")


def load_morphism(ref: str) -> tuple:
    """``(morphism, path)`` from a path or a fixture name such as ``h6``."""
    path = _resolve(ref, ".mrf")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from None
    return parse_morphism(text, path.stem), path


def load_gmap(ref: str) -> GroupMap:
    path = _resolve(ref, ".gmap")
    return parse_gmap(path.read_text(encoding="utf-8"), path.stem)


def load_jordan(args, path: Path):
    """Explicit ``--jordan`` file, else a ``.jordan`` file next to the morphism file."""
    if getattr(args, "no_jordan", False):
        return None, None
    jp = Path(args.jordan) if getattr(args, "jordan", None) else path.with_suffix(".jordan")
    if not jp.is_file():
        if getattr(args, "jordan", None):
            raise InputError(f"no such Jordan basis file: {args.jordan}")
        return None, None
    return parse_jordan_override(jp.read_text(encoding="utf-8")), jp


def _morphism_arg(args) -> str:
    ref = args.morphism_opt or args.morphism
    if not ref:
        raise InputError("a morphism is required (positional or --morphism)")
    return ref


def _power(value: str):
    if value == "auto":
        return None
    try:
        v = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("--iterate takes a positive integer or 'auto'") from None
    if v < 1:
        raise argparse.ArgumentTypeError("--iterate must be positive")
    return v


def _config(args, jordan) -> DecideConfig:
    return DecideConfig(power=args.iterate, max_closure=args.max_closure,
                        precision_bits=args.precision_bits, jordan_override=jordan,
                        scan_length=args.scan_length)


# ---------------------------------------------------------------------------
# witnesses

def _realization_witness(real, letters, mode=oracle.ABELIAN, F=None, uniform=False) -> Witness:
    t = real.template
    cuts = [s for s, _ in real.blocks] + [real.blocks[-1][1]]
    return Witness(word=_decode(real.word, letters), letters=list(letters), boundaries=cuts, k=t.k,
                   mode=mode, F=F, uniform=uniform, template=t.describe(letters))


def _decode(word, letters) -> str:
    sep = "" if all(len(a) == 1 for a in letters) else " "
    return sep.join(letters[i] for i in word)


def _block_view(w: Witness) -> str:
    enc = w.encoded()
    parts = []
    b = w.boundaries
    for j in range(len(b) - 1):
        parts.append(_decode(enc[b[j]:b[j + 1]], w.letters))
    pre = _decode(enc[:b[0]], w.letters)
    post = _decode(enc[b[-1]:], w.letters)
    s = "|".join(parts)
    return f"{pre}[{s}]{post}" if (pre or post) else s


# ---------------------------------------------------------------------------
# commands

def cmd_check_abelian(args) -> DecisionReport:
    h, path = load_morphism(_morphism_arg(args))
    jordan, jpath = load_jordan(args, path)
    cfg = _config(args, jordan)
    t0 = time.perf_counter()
    dec = decide(trivial_template(args.k, h.n), h, cfg)
    cert = _decision_certificate(dec, jpath, h)
    rep = DecisionReport("check-abelian", dec.verdict, morphism_entry(h), args.k, cert, timings=dec.timings)
    if dec.witness is not None:
        rep.witness = _realization_witness(dec.witness, h.source.letters)
        cert["witness_chain"] = [_decode(r.word, h.source.letters) for r in dec.witness_chain]
    rep.timings["wall"] = time.perf_counter() - t0
    return rep


def _decision_certificate(dec, jpath, h) -> dict:
    prof = dec.profile
    return {
        "power": prof.power,
        "basis": str(jpath.name) if jpath else "default",
        "bounds": bounds_entry(prof),
        "parents_of_seed": dec.closure.parents_of_seed,
        "closure_size": len(dec.closure.templates),
        "threshold": dec.threshold,
        "max_Delta": max(t.Delta for t in dec.closure.templates),
        "delta": h.max_length,
        "factors_scanned": dec.factors_scanned,
    }


def cmd_check_additive(args) -> DecisionReport:
    h, path = load_morphism(_morphism_arg(args))
    jordan, jpath = load_jordan(args, path)
    letters = h.source.letters
    phi = load_gmap(args.phi) if args.phi else GroupMap.letter_values(letters)
    try:
        F = phi.matrix(letters)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    cfg = _config(args, jordan)
    t0 = time.perf_counter()
    res = decide_additive(h, F, args.k, args.uniform, cfg)
    cert = {"phi": phi.name, "F": res.F, "uniform": args.uniform, "basis": str(jpath.name) if jpath else "default",
            "candidates": len(res.candidates), "candidate_gaps": [list(d) for d in res.candidates],
            "seeds": len(res.seeds)}
    if res.decision is not None:
        c = _decision_certificate(res.decision, jpath, h)
        c.pop("parents_of_seed")
        cert.update(c)
    else:
        cert["prescan"] = True
    rep = DecisionReport("check-additive", res.verdict, morphism_entry(h), args.k, cert, timings=res.timings)
    if res.witness is not None:
        rep.witness = _realization_witness(res.witness, letters, oracle.MODULO, res.F, args.uniform)
    rep.timings["wall"] = time.perf_counter() - t0
    return rep


def cmd_check_long_abelian(args) -> DecisionReport:
    h, path = load_morphism(_morphism_arg(args))
    if not args.outer:
        raise InputError("--outer is required")
    g, _ = load_morphism(args.outer[0])
    jordan, jpath = load_jordan(args, path)
    cfg = _config(args, jordan)
    t0 = time.perf_counter()
    res = decide_long_abelian(h, g, args.k, args.min_period, cfg)
    cert = {"outer": g.name, "outer_iterations": res.iterations, "outer_max_length": res.outer.max_length,
            "basis": str(jpath.name) if jpath else "default",
            "candidates": len(res.candidates),
            "short_periods": list(res.short_periods), "short_factors_checked": res.factors_checked}
    if res.decision is not None:
        c = _decision_certificate(res.decision, jpath, h)
        c.pop("parents_of_seed")
        cert.update(c)
    rep = DecisionReport("check-long-abelian", res.verdict, morphism_entry(h), args.k, cert,
                         reason=res.reason, timings=res.timings)
    rep.morphism["outer"] = morphism_entry(g)
    if res.witness is not None:
        b = list(res.witness.boundaries)
        rep.witness = Witness(word=_decode(res.witness_word, g.target.letters), letters=list(g.target.letters),
                              boundaries=b, k=args.k)
    rep.timings["wall"] = time.perf_counter() - t0
    return rep


def _scan_word(args):
    h, _ = load_morphism(_morphism_arg(args))
    outers = [load_morphism(o)[0] for o in (args.outer or [])]
    N = args.prefix
    # grow the fixed point until every image is long enough
    need = N
    for g in reversed(outers):
        need = -(-need // max(g.min_length, 1)) + 1
    w = fixed_point_prefix(h, need)
    letters = h.source.letters
    for g in outers:
        w = g.apply(w)
        letters = g.target.letters
    w = w[:N]
    if len(w) < N:
        raise InputError("could not generate a prefix of the requested length")
    return w, letters, h, outers


def cmd_scan(args) -> DecisionReport:
    w, letters, h, outers = _scan_word(args)
    t0 = time.perf_counter()
    F = None
    uniform = False
    if args.mode == "abelian":
        wit = oracle.find_abelian_power(w, args.k, args.min_period, args.max_period, n=len(letters))
    elif args.mode == "kabelian":
        wit = oracle.find_kabelian_power(w, args.kab, args.k, args.min_period, args.max_period)
    else:
        phi = load_gmap(args.phi) if args.phi else GroupMap.letter_values(letters)
        F = phi.matrix(letters)
        uniform = args.uniform
        wit = oracle.find_power_mod(w, F, args.k, uniform, args.min_period, args.max_period)
    verdict = CLEAN if wit is None else FOUND
    cert = {"mode": args.mode, "prefix": len(w), "min_period": args.min_period, "max_period": args.max_period,
            "outer": [g.name for g in outers], "window": args.kab if args.mode == "kabelian" else None}
    rep = DecisionReport("scan", verdict, morphism_entry(h), args.k, cert)
    if wit is not None:
        lo, hi = wit.boundaries[0], wit.end
        rep.witness = Witness(word=_decode(w[lo:hi], letters), letters=list(letters),
                              boundaries=[b - lo for b in wit.boundaries], k=args.k, mode=wit.mode,
                              F=F, uniform=uniform, window=wit.window)
        cert["position"] = lo
        cert["period"] = wit.period
    rep.timings["wall"] = time.perf_counter() - t0
    return rep


def cmd_factors(args) -> int:
    h, _ = load_morphism(_morphism_arg(args))
    ok, _ = is_primitive(h)
    if not ok:
        raise MethodInapplicable("factor enumeration requires a primitive morphism")
    if args.outer:
        g, _ = load_morphism(args.outer[0])
        facs = image_factors_of_length(g, h, args.length)
        letters = g.target.letters
    else:
        facs = factors_of_length(h, args.length)
        letters = h.source.letters
    words = sorted(_decode(f, letters) for f in facs)
    if args.json:
        print(json.dumps({"length": args.length, "count": len(words), "factors": None if args.count else words}))
    else:
        print(f"{len(words)} factors of length {args.length}")
        if not args.count:
            for s in words:
                print(s)
    return 0


def cmd_analyze(args) -> int:
    h, path = load_morphism(_morphism_arg(args))
    jordan, jpath = load_jordan(args, path)
    ok, e = is_primitive(h)
    cp = intmat.char_poly(h.matrix)
    out = {"morphism": morphism_entry(h), "primitive": ok, "primitivity_exponent": e,
           "char_poly": [str(c) for c in cp], "factors": [], "eigenvalues": [], "bounds": {}}
    for f, mult in poly.factor_over_q(cp):
        out["factors"].append({"poly_low_first": [str(c) for c in f], "multiplicity": mult})
    try:
        sd = spectral_data(h.matrix, precision_bits=args.precision_bits, jordan_override=jordan)
    except ModulusOneError as exc:
        sd = None
        out["unresolved"] = str(exc)
    if sd is not None:
        for s in sd.summary():
            lam = s["eigenvalue"]
            out["eigenvalues"].append({"value": [lam.real, lam.imag], "block_size": s["size"],
                                       "modulus": list(s["modulus"]), "class": s["class"], "degree": s["degree"]})
        out["basis"] = str(jpath.name) if jpath else "default"
        if ok and h.is_endomorphism:
            powers = args.iterate or [2]
            for l in powers:
                prof = choose_power(h, sd) if l is None else contracting_bounds(h, sd, l)
                out["bounds"][str(prof.power)] = bounds_entry(prof)
    if args.json:
        print(json.dumps(out, indent=2))
        return 0
    letters = h.source.letters
    print(f"morphism {h.name}: " + ", ".join(f"{a} -> {h.image_str(i)}" for i, a in enumerate(letters)))
    print(f"primitive: {ok}" + (f" (exponent {e})" if ok else ""))
    print("characteristic polynomial (highest degree first): " + " ".join(str(c) for c in cp))
    for f in out["factors"]:
        print(f"  factor {' '.join(reversed(f['poly_low_first']))}  multiplicity {f['multiplicity']}")
    if sd is None:
        print("eigenvalues: " + out["unresolved"])
        return 2
    print("eigenvalues:")
    for ev in out["eigenvalues"]:
        re, im = ev["value"]
        lo, hi = ev["modulus"]
        print(f"  {re:+.6f}{im:+.6f}i  block {ev['block_size']}  |λ| in [{lo:.6f}, {hi:.6f}]  {ev['class']}")
    print(f"basis: {out['basis']}")
    for l, b in out["bounds"].items():
        print(f"contracting bounds for power {l}:")
        if not b:
            print("  (no contracting eigenvalues)")
        for i, e in b.items():
            re, im = e["eigenvalue"]
            print(f"  index {i}  λ≈{re:+.5f}{im:+.5f}i  factor bound {float(Fraction(e['factor_bound'])):.6f}"
                  f"  r* = {_short(e)}")
    return 0


# ---------------------------------------------------------------------------
# printing and dispatch

def _print_report(rep: DecisionReport, as_json: bool) -> None:
    if as_json:
        print(rep.to_json())
        return
    c = rep.certificate
    print(f"{rep.command}: {rep.verdict}")
    if rep.reason:
        print(f"  reason: {rep.reason}")
    for key in ("power", "basis", "candidates", "parents_of_seed", "closure_size", "threshold", "max_Delta",
                "factors_scanned", "short_periods", "short_factors_checked", "prefix", "mode", "period",
                "position"):
        if c.get(key) is not None:
            print(f"  {key}: {c[key]}")
    if c.get("bounds"):
        print("  bounds r*: " + ", ".join(_short(e) for e in c["bounds"].values()))
    if rep.witness is not None:
        w = rep.witness
        print(f"  witness: {_block_view(w)}" + (f"  realizing {w.template}" if w.template else ""))
        print(f"  witness rechecked by oracle: {w.check()}")
    if "wall" in rep.timings:
        print(f"  time: {rep.timings['wall']:.2f}s")


def _short(e: dict) -> str:
    """An exact small rational as is, otherwise its decimal value."""
    return e["rstar"] if len(e["rstar"]) <= 12 else f"{e['rstar_float']:.6f}"


def _common(p, decision=True):
    p.add_argument("morphism", nargs="?", help="morphism file or fixture name")
    p.add_argument("--morphism", dest="morphism_opt", help="morphism file or fixture name")
    p.add_argument("--json", action="store_true", help="print the full report as JSON")
    if decision:
        p.add_argument("--k", type=int, default=2, help="order of the power")
        p.add_argument("--iterate", type=_power, default=None,
                       help="power l of the morphism used for the bounds, or 'auto' (default)")
        p.add_argument("--max-closure", type=int, default=10_000_000)
        p.add_argument("--precision-bits", type=int, default=128)
        p.add_argument("--scan-length", type=int, default=None,
                       help="also scan every factor up to this length")
        p.add_argument("--jordan", help="Jordan basis file for the rational eigenvalues")
        p.add_argument("--no-jordan", action="store_true", help="ignore any fixture Jordan basis")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abelfree", description="Decide abelian power avoidance in morphic words.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-abelian", help="abelian k-th powers in the fixed point language")
    _common(p)

    p = sub.add_parser("check-additive", help="k-th powers modulo a group map")
    _common(p)
    p.add_argument("--phi", help="group map file or fixture (default: letters as integers)")
    p.add_argument("--uniform", action="store_true", help="require equal block lengths")

    p = sub.add_parser("check-long-abelian", help="long abelian powers in g(h^ω)")
    _common(p)
    p.add_argument("--outer", action="append", help="outer morphism g")
    p.add_argument("--min-period", type=int, default=1)

    p = sub.add_parser("scan", help="brute-force scan of a prefix")
    _common(p, decision=False)
    p.add_argument("--outer", action="append", help="outer morphisms, applied in the given order")
    p.add_argument("--mode", choices=["abelian", "additive", "kabelian"], default="abelian")
    p.add_argument("--prefix", type=int, default=10_000)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--kab", type=int, default=2, help="window of k-abelian equivalence")
    p.add_argument("--min-period", type=int, default=1)
    p.add_argument("--max-period", type=int, default=None)
    p.add_argument("--phi")
    p.add_argument("--uniform", action="store_true")

    p = sub.add_parser("factors", help="list factors of a given length")
    _common(p, decision=False)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--outer", action="append")
    p.add_argument("--count", action="store_true", help="print only the count")

    p = sub.add_parser("analyze", help="primitivity, spectrum and contracting bounds")
    _common(p, decision=False)
    p.add_argument("--iterate", type=_power, action="append", help="bound power (repeatable, or 'auto')")
    p.add_argument("--precision-bits", type=int, default=128)
    p.add_argument("--jordan")
    p.add_argument("--no-jordan", action="store_true")
    return ap


COMMANDS = {
    "check-abelian": cmd_check_abelian,
    "check-additive": cmd_check_additive,
    "check-long-abelian": cmd_check_long_abelian,
    "scan": cmd_scan,
}


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE_ERROR if exc.code else 0
    as_json = getattr(args, "json", False)
    rep = None
    try:
        if args.command == "factors":
            return cmd_factors(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        rep = COMMANDS[args.command](args)
    except (InputError, MorphismParseError, GroupMapParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except (MethodInapplicable, ModulusOneError) as exc:
        rep = _failure(args, INAPPLICABLE, str(exc))
    except (ResourceExceeded, ResourceWarning, MemoryError) as exc:
        rep = _failure(args, RESOURCE_EXCEEDED, str(exc) or type(exc).__name__)
    if rep is None:
        return exit_code(INAPPLICABLE)
    _print_report(rep, as_json)
    return exit_code(rep.verdict)


def _failure(args, verdict, reason):
    if args.command in ("factors", "analyze"):
        print(f"{verdict}: {reason}", file=sys.stderr)
        return None
    return DecisionReport(args.command, verdict, {}, getattr(args, "k", 0) or 0, {}, reason=reason)


def main() -> None:
    sys.exit(run())
