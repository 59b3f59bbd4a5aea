"""Scenario-driven command line front end.

    flagkit <command> --scenario FILE [--out FILE] [--budget-points N] [--seed N] [--jobs N]

Exit codes: 0 ok, 1 invalid scenario, 2 budget exceeded, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import serialize as ser
from .analysis import DEFAULT_MAX_PAIRS, classify, is_admissible
from .errors import BudgetExceeded, FlagkitError, InvariantViolation
from .flags import enumerate_flags
from .genflag import construct_limit_flag, limit_report, truncate
from .linalg import default_budget
from .stdext import compose_all, dualize, validate

COMMANDS = ("enumerate", "validate", "apply", "compose", "dualize", "classify", "admissible", "limit", "truncate")
EXIT_OK, EXIT_SCENARIO, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3


class ScenarioError(ValueError):
    pass


class Context:
    def __init__(self, scenario: dict, args: argparse.Namespace):
        if not isinstance(scenario, dict):
            raise ScenarioError("scenario must be a JSON object")
        version = scenario.get("schema_version", ser.SCHEMA_VERSION)
        if version != ser.SCHEMA_VERSION:
            raise ScenarioError(f"unsupported scenario schema_version {version!r}")
        self.scenario = scenario
        self.field = ser.field_from_json(scenario["field"]) if "field" in scenario else None
        budgets = scenario.get("budgets", {})
        self.budget = args.budget_points or budgets.get("max_points") or default_budget()
        self.max_pairs = budgets.get("max_pairs", DEFAULT_MAX_PAIRS)
        if self.budget <= 0 or self.max_pairs <= 0:
            raise ScenarioError("budgets must be positive")
        self.seed = args.seed
        self.jobs = max(1, args.jobs)

    def need(self, key: str):
        if key not in self.scenario:
            raise ScenarioError(f"scenario is missing the {key!r} payload")
        return self.scenario[key]


def _apply_chunk(spec, flags):
    return [spec.apply(f) for f in flags]


def _map_apply(spec, flags, jobs: int):
    if jobs == 1 or len(flags) < 2 * jobs:
        return _apply_chunk(spec, flags)
    size = -(-len(flags) // jobs)
    chunks = [flags[i:i + size] for i in range(0, len(flags), size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_apply_chunk, [spec] * len(chunks), chunks))
    return [x for part in parts for x in part]


# -- commands -----------------------------------------------------------------


def cmd_enumerate(ctx: Context):
    v = ser.variety_from_json(ctx.need("variety"), ctx.field)
    pts = list(enumerate_flags(v, ctx.budget))
    res = {"variety": ser.variety_to_json(v), "name": str(v), "count": len(pts),
           "points": [ser.flag_to_json(p) for p in pts]}
    return res, f"{v}: {len(pts)} points"


def cmd_validate(ctx: Context):
    spec = ser.spec_from_json(ctx.need("spec"), ctx.field, check=False)
    rep = validate(spec)
    return rep.to_json(), f"{spec.source} -> {spec.target}: {'valid' if rep.ok else 'invalid'}"


def cmd_apply(ctx: Context):
    spec = ser.spec_from_json(ctx.need("spec"), ctx.field)
    src = spec.source
    if "flags" in ctx.scenario:
        flags = [ser.flag_from_json(x, src.ambient, src.field) for x in ctx.scenario["flags"]]
    else:
        flags = list(enumerate_flags(src, ctx.budget))
        sample = ctx.scenario.get("sample")
        if sample is not None and sample < len(flags):
            rng = random.Random(ctx.seed)
            flags = [flags[i] for i in sorted(rng.sample(range(len(flags)), sample))]
    outs = _map_apply(spec, flags, ctx.jobs)
    res = {"spec": ser.spec_to_json(spec),
           "pairs": [[ser.flag_to_json(a), ser.flag_to_json(b)] for a, b in zip(flags, outs)]}
    return res, f"applied to {len(flags)} flags"


def cmd_compose(ctx: Context):
    specs = [ser.spec_from_json(s, ctx.field) for s in ctx.need("specs")]
    if len(specs) < 2:
        raise ScenarioError("compose needs at least two specs")
    comp = compose_all(specs)
    rep = validate(comp)
    # pointwise check against applying the stages one after another
    mismatches = 0
    for fl in enumerate_flags(specs[0].source, ctx.budget):
        out = fl
        for s in specs:
            out = s.apply(out, check=False)
        if comp.apply(fl, check=False) != out:
            mismatches += 1
    if mismatches:
        raise InvariantViolation(f"composite differs from the sequential apply on {mismatches} flags")
    res = {"variant": comp.variant, "spec": ser.spec_to_json(comp), "validation": rep.to_json(),
           "pointwise_equal": True}
    return res, f"composite is {comp.variant}"


def cmd_dualize(ctx: Context):
    spec = ser.spec_from_json(ctx.need("spec"), ctx.field)
    d = dualize(spec)
    return {"variant": d.variant, "spec": ser.spec_to_json(d)}, f"dual is {d.variant}"


def _table(ctx: Context):
    return ser.table_from_json(ctx.need("table"), ctx.field, ctx.budget)


def cmd_classify(ctx: Context):
    e = _table(ctx)
    c = classify(e, ctx.max_pairs)
    res = ser.classification_to_json(c)
    res["classification"] = c.kind
    tail = f" ({c.reason})" if c.reason else ""
    return res, f"{e.source} -> {e.target}: {c.kind}{tail}"


def cmd_admissible(ctx: Context):
    e = _table(ctx)
    r = is_admissible(e, ctx.max_pairs)
    return r.to_json(), f"{e.source} -> {e.target}: {'admissible' if r.admissible else 'not admissible'}"


def cmd_limit(ctx: Context):
    sys_ = ser.system_from_json(ctx.need("system"), ctx.field)
    res = limit_report(sys_)
    if not res["is_generalized_flag"] or not all(r["match"] for r in res["chain_check"]):
        raise InvariantViolation("limit presentation failed its own checks")
    classes = " < ".join("[" + ",".join(c) + "]" for c in res["presentation"]["classes"])
    return res, f"classes: {classes}"


def cmd_truncate(ctx: Context):
    sys_ = ser.system_from_json(ctx.need("system"), ctx.field)
    n = ctx.need("n")
    g = construct_limit_flag(sys_)
    if not isinstance(n, int) or not 0 <= n <= len(g.basis.labels):
        raise ScenarioError(f"n must be an integer in 0..{len(g.basis.labels)}")
    flag, t = truncate(g, n, sys_.stages[0].field)
    res = {"n": n, "labels": list(g.basis.labels[:n]), "flag": ser.flag_to_json(flag), "type": list(t.dims)}
    return res, f"type {list(t.dims)} in dimension {n}"


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# -- driver -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flagkit", description="Standard extensions of flag varieties.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", help="report path (default: stdout summary only)")
    p.add_argument("--budget-points", type=int, default=None, help="maximum points to enumerate")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled runs")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for batch apply")
    return p


def run(command: str, scenario: dict, args: argparse.Namespace) -> tuple[int, dict, str]:
    try:
        ctx = Context(scenario, args)
        result, summary = HANDLERS[command](ctx)
        return EXIT_OK, ser.report(command, "ok", result), summary
    except BudgetExceeded as exc:
        err = {"type": "budget_exceeded", "message": str(exc)}
        return EXIT_BUDGET, ser.report(command, "error", errors=[err]), f"budget exceeded: {exc}"
    except InvariantViolation as exc:
        err = {"type": "invariant_violation", "message": str(exc)}
        return EXIT_INVARIANT, ser.report(command, "error", errors=[err]), f"invariant violation: {exc}"
    except (ScenarioError, FlagkitError, ValueError, KeyError, TypeError, IndexError) as exc:
        err = {"type": "invalid_scenario", "message": str(exc), "exception": type(exc).__name__}
        violations = getattr(exc, "violations", None)
        if violations:
            err["violations"] = violations
        return EXIT_SCENARIO, ser.report(command, "error", errors=[err]), f"invalid scenario: {exc}"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = json.loads(Path(args.scenario).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        code, rep, summary = EXIT_SCENARIO, ser.report(args.command, "error", errors=[
            {"type": "invalid_scenario", "message": str(exc)}]), f"cannot read scenario: {exc}"
    else:
        if args.budget_points is not None and args.budget_points <= 0:
            code, rep, summary = EXIT_SCENARIO, ser.report(args.command, "error", errors=[
                {"type": "invalid_scenario", "message": "--budget-points must be positive"}]), "bad budget"
        else:
            code, rep, summary = run(args.command, scenario, args)
    if args.out:
        Path(args.out).write_text(ser.dumps(rep))
    print(f"{args.command}: {summary}")
    return code


if __name__ == "__main__":
    sys.exit(main())
