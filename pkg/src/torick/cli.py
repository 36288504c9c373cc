"""Command-line entry point.

Reads one JSON fan file, runs a command and prints either readable text
or (with ``--json``) the structured report.  Exit status: 0 success,
1 mathematical rejection, 2 resource limit, 3 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import signal
import sys
import threading
import time
from dataclasses import dataclass
from typing import Any, Sequence

from . import bundles, fan as fanmod, ktheory
from .errors import (
    InputError,
    InvalidFan,
    MathematicalRejection,
    ParseError,
    ResourceLimit,
    SchemaError,
)
from .fan import Beta, Fan, FullTorus, StackyFan, Subgroup, TrivialGroup
from .lattice import FgAbelianGroup, IntMatrix, SublatticeSpec, gcd_all
from .laurent.engine import DEFAULT_STEP_BUDGET, Budget
from .laurent.groebner import INFINITE
from .laurent.presentation import RingPresentation

COMMANDS = ("validate", "analyze", "reduce", "k0", "kt0", "wps", "tor", "basis", "order", "bundle")

EXIT_OK, EXIT_REJECTED, EXIT_RESOURCE, EXIT_INPUT = 0, 1, 2, 3


# -- input ------------------------------------------------------------------


@dataclass(frozen=True)
class FanFile:
    """A validated input document; ray indices are 0-based here."""

    lattice_rank: int
    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]
    group: Any
    bundle: bundles.CoefficientRingSpec | None = None
    weights: tuple[int, ...] | None = None

    @property
    def fan(self) -> Fan:
        return Fan.make(self.lattice_rank, self.rays, self.max_cones)

    @property
    def stacky_fan(self) -> StackyFan:
        return StackyFan(self.fan, self.group)


class _Float(float):
    pass


def _reject_constant(name):
    raise ParseError(f"{name} is not allowed")


def _int(value, field: str, minimum: int | None = None) -> int:
    # bool is an int subclass; floats are tagged by the decoder
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(field, f"expected an integer, got {json.dumps(value)}")
    if minimum is not None and value < minimum:
        raise SchemaError(field, f"must be at least {minimum}")
    return value


def _list(value, field: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(field, "expected a list")
    return value


def _int_rows(value, field: str, width: int | None) -> list[tuple[int, ...]]:
    rows = []
    for i, row in enumerate(_list(value, field)):
        f = f"{field}[{i}]"
        row = tuple(_int(x, f"{f}[{j}]") for j, x in enumerate(_list(row, f)))
        if width is not None and len(row) != width:
            raise SchemaError(f, f"expected {width} entries, got {len(row)}")
        rows.append(row)
    return rows


def _check_keys(obj: dict, field: str, allowed: Sequence[str]) -> None:
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise SchemaError(f"{field}.{extra[0]}" if field else extra[0], "unknown field")


def _group(obj, n: int):
    if not isinstance(obj, dict):
        raise SchemaError("group", "expected an object")
    kind = obj.get("kind")
    if kind == "trivial":
        _check_keys(obj, "group", ["kind"])
        return TrivialGroup()
    if kind == "full_torus":
        _check_keys(obj, "group", ["kind"])
        return FullTorus()
    if kind == "subgroup":
        _check_keys(obj, "group", ["kind", "generators"])
        if "generators" not in obj:
            raise SchemaError("group.generators", "missing")
        rows = _int_rows(obj["generators"], "group.generators", n)
        return Subgroup(SublatticeSpec.from_rows(n, rows))
    if kind == "beta":
        _check_keys(obj, "group", ["kind", "beta", "target"])
        for key in ("beta", "target"):
            if key not in obj:
                raise SchemaError(f"group.{key}", "missing")
        target = obj["target"]
        if not isinstance(target, dict):
            raise SchemaError("group.target", "expected an object")
        _check_keys(target, "group.target", ["free_rank", "torsion"])
        r = _int(target.get("free_rank", 0), "group.target.free_rank", 0)
        tors = [_int(d, f"group.target.torsion[{i}]", 2)
                for i, d in enumerate(_list(target.get("torsion", []), "group.target.torsion"))]
        for i, (a, b) in enumerate(zip(tors, tors[1:])):
            if b % a:
                raise SchemaError(f"group.target.torsion[{i + 1}]",
                                  "torsion must be a divisibility chain")
        rows = _int_rows(obj["beta"], "group.beta", n)
        if len(rows) != r + len(tors):
            raise SchemaError("group.beta",
                              f"expected {r + len(tors)} rows (one per target generator), got {len(rows)}")
        return Beta(IntMatrix.from_rows(rows, n), FgAbelianGroup(r, tuple(tors)))
    raise SchemaError("group.kind", f"unknown kind {json.dumps(kind)}")


def _bundle(obj) -> bundles.CoefficientRingSpec:
    if not isinstance(obj, dict):
        raise SchemaError("bundle", "expected an object")
    _check_keys(obj, "bundle", ["base_vars", "units"])
    names = _list(obj.get("base_vars", []), "bundle.base_vars")
    for i, v in enumerate(names):
        if not isinstance(v, str) or not v.isidentifier():
            raise SchemaError(f"bundle.base_vars[{i}]", "expected a variable name")
    if len(set(names)) != len(names):
        raise SchemaError("bundle.base_vars", "duplicate names")
    units = []
    for i, u in enumerate(_list(obj.get("units", []), "bundle.units")):
        if not isinstance(u, str):
            raise SchemaError(f"bundle.units[{i}]", "expected a string such as \"-u1\"")
        try:
            units.append(bundles.parse_unit(u, names))
        except ValueError as e:
            raise SchemaError(f"bundle.units[{i}]", str(e)) from None
    return bundles.CoefficientRingSpec(tuple(names), tuple(units))


def parse(text: str) -> FanFile:
    """Parse and validate a fan file.  Validation is syntactic: the fan itself is checked later."""
    try:
        doc = json.loads(text, parse_float=_Float, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict):
        raise SchemaError("document", "expected a JSON object")
    _check_keys(doc, "", ["lattice_rank", "rays", "max_cones", "group", "bundle", "weights"])
    for key in ("lattice_rank", "rays", "max_cones", "group"):
        if key not in doc:
            raise SchemaError(key, "missing")
    n = _int(doc["lattice_rank"], "lattice_rank", 0)
    rays = _int_rows(doc["rays"], "rays", n)
    for i, r in enumerate(rays):
        if not any(r):
            raise SchemaError(f"rays[{i}]", "zero ray")
        if gcd_all(r) != 1:
            raise SchemaError(f"rays[{i}]", "ray not primitive")
    cones = []
    for i, c in enumerate(_int_rows(doc["max_cones"], "max_cones", None)):
        for j, k in enumerate(c):
            if not 1 <= k <= len(rays):
                raise SchemaError(f"max_cones[{i}][{j}]", f"ray index {k} outside 1..{len(rays)}")
        if len(set(c)) != len(c):
            raise SchemaError(f"max_cones[{i}]", "repeated ray index")
        cones.append(tuple(sorted(k - 1 for k in c)))
    group = _group(doc["group"], n)
    bundle = _bundle(doc["bundle"]) if doc.get("bundle") is not None else None
    weights = None
    if doc.get("weights") is not None:
        weights = tuple(_int(q, f"weights[{i}]", 1)
                        for i, q in enumerate(_list(doc["weights"], "weights")))
        if not weights:
            raise SchemaError("weights", "empty")
    return FanFile(n, tuple(rays), tuple(cones), group, bundle, weights)


def parse_weights(text: str) -> tuple[int, ...]:
    try:
        q = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise SchemaError("--weights", f"expected comma-separated integers, got {text!r}") from None
    if not q or any(x < 1 for x in q):
        raise SchemaError("--weights", "weights must be positive")
    return q


# -- report -----------------------------------------------------------------


@dataclass
class Context:
    budget: Budget
    seed: int
    smax: int
    weights: tuple[int, ...] | None


class Outcome:
    """Collects the payload, verification results and readable lines of one run."""

    def __init__(self):
        self.result: dict = {}
        self.verification: dict = {}
        self.lines: list[str] = []

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def presentation(self, key: str, p: RingPresentation, ctx: Context, title: str) -> None:
        self.result[key] = p.to_json()
        self.verification[f"{key}_round_trip"] = round_trip(p, ctx.budget)
        self.say(f"{title}:")
        self.say(p.format())


def round_trip(p: RingPresentation, budget: Budget | None = None) -> bool:
    """Emit, re-read and compare the ideals."""
    back = RingPresentation.from_json(json.loads(json.dumps(p.to_json())))
    return back.variables == p.variables and back.same_ideal(p, budget)


def _rank_json(x):
    return "INFINITE" if x == INFINITE else x


def _require_valid_fan(ff: FanFile) -> fanmod.ValidationReport:
    rep = fanmod.validate_fan(ff.fan)
    if not rep.ok:
        raise InvalidFan("; ".join(f"{x.kind}: {x.detail}" for x in rep.failures))
    return rep


# -- commands ---------------------------------------------------------------


def cmd_validate(ff: FanFile, ctx: Context, out: Outcome) -> None:
    rep = fanmod.validate_fan(ff.fan)
    out.result["validation"] = rep.to_json()
    out.say("valid fan" if rep.ok else "not a fan")
    for x in rep.failures:
        out.say(f"  {x.kind}: {x.detail}")
    for note in rep.notes:
        out.say(f"  note: {note}")
    if not rep.ok:
        raise InvalidFan(f"{len(rep.failures)} validation failure(s)")


def cmd_analyze(ff: FanFile, ctx: Context, out: Outcome) -> None:
    _require_valid_fan(ff)
    f = ff.fan
    smooth, complete = fanmod.is_smooth(f), fanmod.is_complete(f)
    nonfaces = fanmod.minimal_nonfaces(f)
    g = ff.group
    if isinstance(g, Beta) and g.target.torsion:
        G = fanmod.character_group_direct(ff.stacky_fan)
    else:
        G = ff.stacky_fan.character_group()
    simplicial = all(f.is_simplicial_cone(c) for c in f.max_cones)
    out.result.update({
        "rays": f.nrays,
        "max_cones": len(f.max_cones),
        "simplicial": simplicial,
        "smooth": smooth,
        "complete": complete,
        "minimal_nonfaces": [[i + 1 for i in s] for s in nonfaces],
        "group_kind": g.kind,
        "character_group": str(G),
        "expected_k0_rank": len(f.max_cones) * G.order if G.order is not None else None,
    })
    out.say(f"{f.nrays} rays, {len(f.max_cones)} maximal cones in Z^{f.lattice_rank}")
    out.say(f"simplicial: {simplicial}, smooth: {smooth}, complete: {complete}")
    out.say("minimal non-faces: " + ", ".join("{" + ",".join(str(i + 1) for i in s) + "}"
                                             for s in nonfaces))
    out.say(f"group: {g.kind}, character group {G}")


def cmd_reduce(ff: FanFile, ctx: Context, out: Outcome) -> None:
    if not isinstance(ff.group, Beta):
        raise SchemaError("group.kind", "reduce needs a beta group section")
    _require_valid_fan(ff)
    red = fanmod.stacky_reduction(ff.stacky_fan)
    out.result["reduction"] = red.to_json()
    direct = fanmod.character_group_direct(ff.stacky_fan)
    out.verification["group_matches_direct"] = direct == red.group
    out.verification["reduced_fan_valid"] = fanmod.validate_fan(red.stacky_fan.fan).ok
    out.say(f"added {red.s} ray(s); beta' = {red.beta_prime.tolist()}")
    out.say(f"M' basis: {out.result['reduction']['M_prime']}")
    out.say(f"character group of G_beta: {red.group}")


def cmd_k0(ff: FanFile, ctx: Context, out: Outcome) -> None:
    _require_valid_fan(ff)
    sf = ff.stacky_fan
    p = ktheory.k0_presentation(sf)
    out.presentation("presentation", p, ctx, "K_0")
    qr = p.quotient_report(ctx.budget)
    expected = ktheory.expected_rank(_reduced_for_rank(sf))
    out.result["quotient"] = qr.to_json()
    out.result["expected_rank"] = expected
    simple, _ = ktheory.simplify(p)
    out.presentation("simplified", simple, ctx, "after eliminating unit binomials")
    out.verification["simplified_rank_agrees"] = (
        simple.quotient_report(ctx.budget).z_rank == qr.z_rank)
    if expected is not None:
        out.verification["rank_law"] = qr.z_rank == expected
    alt = ktheory.regenerated_k0(sf, random.Random(ctx.seed))
    out.verification["character_basis_independent"] = alt.same_ideal(p, ctx.budget)
    out.say(f"Z-rank {_rank_json(qr.z_rank)}, additive group {qr.group}")


def _reduced_for_rank(sf: StackyFan) -> StackyFan:
    g = sf.group
    if isinstance(g, Beta) and g.target.torsion:
        return fanmod.stacky_reduction(sf).stacky_fan
    return sf


def cmd_kt0(ff: FanFile, ctx: Context, out: Outcome) -> None:
    _require_valid_fan(ff)
    p = ktheory.kt0(ff.fan)
    out.presentation("presentation", p, ctx, "K_0 of the quotient by the full torus")
    out.say("a module over R(T) = Z[M]; its Z-rank is infinite")


def cmd_wps(ff: FanFile | None, ctx: Context, out: Outcome) -> None:
    q = ctx.weights or (ff.weights if ff is not None else None)
    if q is None:
        raise SchemaError("weights", "give --weights or a weights field")
    p = ktheory.wps_presentation(q)
    out.result["weights"] = list(q)
    out.presentation("presentation", p, ctx, f"K_*(P{tuple(q)})")
    qr = p.quotient_report(ctx.budget)
    out.result["quotient"] = qr.to_json()
    out.verification["rank_is_weight_sum"] = qr.z_rank == sum(q)
    stack, coarse = ktheory.wps_coarse_presentations(q)
    out.presentation("cover_stack", stack, ctx, "K_* of the cyclic cover stack")
    out.presentation("coarse_rational", coarse, ctx, "rational G_* of the coarse space")
    out.say(f"Z-rank {_rank_json(qr.z_rank)} (weights sum to {sum(q)})")


def cmd_tor(ff: FanFile, ctx: Context, out: Outcome) -> None:
    _require_valid_fan(ff)
    sf = _reduced_for_rank(ff.stacky_fan)
    rep = ktheory.edge_and_tor(sf, ctx.smax, ctx.budget)
    out.result.update(rep.to_json())
    out.verification["edge_isomorphism"] = rep.edge_isomorphism
    out.verification["higher_tor_vanishes"] = rep.degenerate
    for s in range(rep.s_max + 1):
        d = rep.tor.degree(s)
        out.say(f"Tor_{s} = {d.group}")
    out.say(f"route: {rep.tor.route}; Tor_0 matches K_0: {rep.edge_isomorphism}")
    for w in rep.tor.warnings:
        out.say(f"warning: {w}")


def cmd_basis(ff: FanFile, ctx: Context, out: Outcome) -> None:
    _require_valid_fan(ff)
    sf = _reduced_for_rank(ff.stacky_fan)
    cb = ktheory.cell_basis(sf, budget=ctx.budget)
    names = ktheory.ray_names(sf.fan.nrays)
    out.result.update(cb.to_json(names))
    out.verification["unimodular"] = cb.report.passed
    out.say(f"cell basis ({cb.report.mode}), determinant {cb.report.determinant}:")
    for c in cb.order.order:
        out.say(f"  cone {sorted(i + 1 for i in sf.fan.max_cones[c])}: {cb.elements[c].format(names)}")


def cmd_order(ff: FanFile, ctx: Context, out: Outcome) -> None:
    _require_valid_fan(ff)
    f = ff.fan
    so = fanmod.shelling_order(f, ctx.budget)
    out.result.update(so.to_json())
    bad = fanmod.shelling_violations(f, so)
    out.verification["conditions_hold"] = not bad
    if bad:
        out.verification["violations"] = bad
    for p, c in enumerate(so.order):
        out.say(f"{p + 1}. cone {sorted(i + 1 for i in f.max_cones[c])}"
                f"  tau {sorted(i + 1 for i in so.tau[c])}"
                f"  tau' {sorted(i + 1 for i in so.tau_prime[c])}")


def cmd_bundle(ff: FanFile, ctx: Context, out: Outcome) -> None:
    if ff.bundle is None:
        raise SchemaError("bundle", "the bundle command needs a bundle section")
    _require_valid_fan(ff)
    sf = _reduced_for_rank(ff.stacky_fan)
    bp = bundles.sr_algebra(sf.fan, sf.character_sublattice(), ff.bundle)
    out.presentation("presentation", bp.presentation, ctx, "Stanley-Reisner algebra over A")
    rep = bundles.bundle_rank_check(bp, ctx.budget)
    out.result["rank"] = rep.to_json()
    if all(c == 1 for u in ff.bundle.units for _, c in u.items()):
        fiber = bundles.fiber_presentation(bp)
        k0 = ktheory.k0_presentation(sf)
        out.verification["units_to_one_gives_fiber_k0"] = fiber.same_ideal(k0, ctx.budget)
    else:
        out.say("note: a unit has sign -1, so specialising base variables to 1 does not give the fiber")
    if rep.matches is not None:
        out.verification["rank_law"] = rep.matches
    out.say(f"A-free: {rep.a_free}, A-rank {_rank_json(rep.a_rank)}")
    for note in rep.notes:
        out.say(f"note: {note}")


HANDLERS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "reduce": cmd_reduce,
    "k0": cmd_k0,
    "kt0": cmd_kt0,
    "wps": cmd_wps,
    "tor": cmd_tor,
    "basis": cmd_basis,
    "order": cmd_order,
    "bundle": cmd_bundle,
}


# -- driver -----------------------------------------------------------------


def run(command: str, text: str | None, *, seed: int = 0, step_budget: int = DEFAULT_STEP_BUDGET,
        smax: int = 3, weights: tuple[int, ...] | None = None,
        cancel: threading.Event | None = None) -> tuple[int, dict, list[str]]:
    """Run one command on the document ``text``; returns (exit status, report, text lines)."""
    if command not in HANDLERS:
        raise ValueError(f"unknown command {command!r}")
    t0 = time.perf_counter()
    ctx = Context(Budget(step_budget, cancel), seed, smax, weights)
    out = Outcome()
    report: dict = {
        "command": command,
        "flags": {"seed": seed, "step_budget": step_budget, "smax": smax,
                  "weights": list(weights) if weights else None},
        "input_sha256": hashlib.sha256(text.encode()).hexdigest() if text is not None else None,
    }
    status, error = EXIT_OK, None
    try:
        ff = parse(text) if text is not None else None
        if ff is None and command != "wps":
            raise InputError("this command needs an input file")
        HANDLERS[command](ff, ctx, out)
    except InputError as e:
        status, error = EXIT_INPUT, e
    except MathematicalRejection as e:
        status, error = EXIT_REJECTED, e
    except ResourceLimit as e:
        status, error = EXIT_RESOURCE, e
    if status == EXIT_OK and not all(v is True for v in out.verification.values()
                                     if isinstance(v, bool)):
        # a failed self-check is never reported as success
        status = EXIT_REJECTED
        error = MathematicalRejection("verification failed: " + ", ".join(
            k for k, v in out.verification.items() if v is False))
    report["status"] = {EXIT_OK: "ok", EXIT_REJECTED: "rejected", EXIT_RESOURCE: "resource_limit",
                        EXIT_INPUT: "input_error"}[status]
    report["error"] = None if error is None else _error_json(error)
    report["result"] = out.result
    report["verification"] = out.verification
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 3), "steps": ctx.budget.steps}
    lines = list(out.lines)
    if error is not None:
        lines.append(f"error ({type(error).__name__}): {error}")
    for k, v in out.verification.items():
        if isinstance(v, bool):
            lines.append(f"check {k}: {'pass' if v else 'FAIL'}")
    return status, report, lines


def _error_json(e: Exception) -> dict:
    d = {"type": type(e).__name__, "message": str(e)}
    if isinstance(e, ParseError):
        d.update(line=e.line, column=e.column)
    if isinstance(e, SchemaError):
        d["field"] = e.field
    return d


def payload(report: dict) -> dict:
    """The report without its timing section (the deterministic part)."""
    return {k: v for k, v in report.items() if k != "timing"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torick", description="K-theory of toric stacks from fan files.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file", nargs="?", help="JSON fan file ('-' for stdin)")
    ap.add_argument("--json", action="store_true", help="print the structured report")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized self-checks")
    ap.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET,
                    help="maximum reduction steps before giving up")
    ap.add_argument("--smax", type=int, default=3, help="highest Tor degree for 'tor'")
    ap.add_argument("--weights", help="comma-separated weights for 'wps'")
    ap.add_argument("--out", help="also write the JSON report to this path")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    text = None
    try:
        weights = parse_weights(args.weights) if args.weights else None
        if args.file == "-":
            text = sys.stdin.read()
        elif args.file:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    cancel = threading.Event()
    previous = signal.signal(signal.SIGINT, lambda *_: cancel.set())
    try:
        status, report, lines = run(args.command, text, seed=args.seed,
                                    step_budget=args.step_budget, smax=args.smax,
                                    weights=weights, cancel=cancel)
    finally:
        signal.signal(signal.SIGINT, previous)

    dumped = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumped + "\n")
    if args.json:
        print(dumped)
    else:
        print("\n".join(lines))
    return status


if __name__ == "__main__":
    sys.exit(main())
