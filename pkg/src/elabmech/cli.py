"""Command-line surface.

Subcommands: ``run`` (play a mechanism on a scenario), ``verify`` (property
checks on a scenario or a batch of generated ones), ``report`` (validated
scenario summary with welfare tables), ``fixtures`` (built-in scenarios).

Exit status: 0 success / all properties hold, 1 property violation,
2 input error, 3 enumeration bound exceeded.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import engine, verify
from .engine import InfeasibleReport, StrategySpaceTooLarge
from .fixtures import FIXTURES, fixture
from .generate import generate_scenario
from .scenario import ParseError, Scenario, ValidationError, load_scenario
from .transfers import KINDS, RSPA, STATIC_VICKREY, Mechanism

PROPERTIES = ("efficiency", "pooled-implementation", "dominance", "stage-bound",
              "budget-balance", "no-deficit", "participation-ex-post",
              "participation-ex-ante", "nonnegative-valuations", "holmstrom")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elabmech",
                                     description="elaboration mechanisms and their verifier")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="play a mechanism once and print the transfers")
    run.add_argument("scenario", help="scenario file path or fixture name")
    run.add_argument("--draw", default=None, help="named nature draw (default: first declared)")
    run.add_argument("--scheme", default=None, choices=KINDS, help="override the scheme kind")
    run.add_argument("--partial", default=None, help="partial game level (default: top)")
    run.add_argument("--strategy", default="truth",
                     help="'truth' or a script file of lines: agent stage report")
    run.add_argument("--report", default=None, help="also write a JSON report to this path")

    ver = sub.add_parser("verify", help="run property checks")
    ver.add_argument("scenario", nargs="?", default=None,
                     help="scenario file path or fixture name")
    ver.add_argument("--generated", type=int, default=None, metavar="N",
                     help="verify N generated scenarios instead of a file")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--procurement", action="store_true",
                     help="generate procurement scenarios (reverse auction scheme)")
    ver.add_argument("--scheme", default=None, choices=KINDS, help="override the scheme kind")
    ver.add_argument("--property", dest="properties", action="append", choices=PROPERTIES,
                     help="property to check (repeatable)")
    ver.add_argument("--expect-fail", dest="expect_fail", action="append", default=[],
                     choices=PROPERTIES, metavar="PROP",
                     help="property whose violation is the expected outcome")
    ver.add_argument("--all", action="store_true", help="run every applicable property")
    ver.add_argument("--bound", type=int, default=10 ** 6,
                     help="enumeration bound per exhaustive query")
    ver.add_argument("--report", default=None, help="write a JSON report to this path")

    rep = sub.add_parser("report", help="validate a scenario and print its summary")
    rep.add_argument("scenario", help="scenario file path or fixture name")
    rep.add_argument("--out", default=None, help="write the JSON summary to this path")

    fix = sub.add_parser("fixtures", help="list built-in fixtures or print one")
    fix.add_argument("name", nargs="?", default=None)
    return parser


def _load(ref: str) -> Scenario:
    if ref in FIXTURES:
        return fixture(ref)
    return load_scenario(ref)


def _apply_scheme(scenario: Scenario, kind: str | None) -> Scenario:
    if kind is None or kind == scenario.scheme.kind:
        return scenario
    scheme = dataclasses.replace(scenario.scheme, kind=kind)
    return dataclasses.replace(scenario, scheme=scheme)


def _script_strategies(path: str, scenario: Scenario):
    script: dict[tuple[str, int], str] = {}
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            agent, stage, report = line.split()
            script[(agent, int(stage))] = report
    def policy_for(agent: str):
        def policy(info: engine.InfoSet) -> str:
            stage = len(info.history) + 1
            return script.get((agent, stage), info.perceived)
        return policy
    return {agent: policy_for(agent) for agent in scenario.agents}


def _fraction_str(x) -> str:
    return str(x)


def cmd_run(args) -> int:
    scenario = _apply_scheme(_load(args.scenario), args.scheme)
    draw = scenario.draw(args.draw)
    partial = args.partial or scenario.lattice.top
    strategies = None
    if args.strategy != "truth":
        strategies = _script_strategies(args.strategy, scenario)
    if scenario.scheme.kind == STATIC_VICKREY:
        transcript = engine.run_single_stage(scenario, draw, partial)
    else:
        transcript = engine.run(scenario, draw, partial, strategies)
    mech = Mechanism(scenario, scenario.scheme)
    report = mech.report(transcript)
    print(f"scenario: {scenario.name}   scheme: {scenario.scheme.kind}   "
          f"partial game: {partial}")
    for stage, (profile, pooled) in enumerate(zip(transcript.stages, transcript.pooled), 1):
        row = "  ".join(f"{a}={t}" for a, t in zip(scenario.agents, profile))
        print(f"stage {stage}: {row}   pooled: {pooled}")
    print(f"stopped after stage {transcript.n_stages}")
    print(f"outcome: {report.outcome}")
    for agent in scenario.agents:
        extra = f"  (adjustment {report.adjustments[agent]})" if report.adjustments[agent] else ""
        print(f"transfer to {agent}: {report.transfers[agent]}{extra}")
    print(f"premium recipient: {report.premium_recipient or 'none'}")
    print(f"operator balance: {report.operator_balance}")
    if args.report:
        payload = {"scenario": scenario.name, "scheme": scenario.scheme.kind,
                   "stages": [list(s) for s in transcript.stages],
                   "pooled": list(transcript.pooled),
                   "stop_stage": transcript.n_stages,
                   "transfers": report.jsonable()}
        with open(args.report, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
    return 0


def applicable_properties(scheme_kind: str) -> tuple[str, ...]:
    if scheme_kind == RSPA:
        return ("pooled-implementation", "stage-bound", "budget-balance",
                "participation-ex-post", "dominance")
    if scheme_kind == STATIC_VICKREY:
        return ("pooled-implementation",)
    return ("efficiency", "pooled-implementation", "stage-bound", "no-deficit",
            "participation-ex-ante", "dominance")


def run_property(scenario: Scenario, prop: str, bound: int) -> verify.VerificationResult:
    scheme = scenario.scheme
    if prop == "efficiency":
        return verify.check_efficiency(scenario)
    if prop == "pooled-implementation":
        return verify.check_pooled_implementation(scenario, scheme)
    if prop == "dominance":
        return verify.check_conditional_dominance(scenario, scheme, bound)
    if prop == "stage-bound":
        return verify.check_stage_bound(scenario)
    if prop == "budget-balance":
        return verify.check_budget(scenario, scheme, "balance", bound)
    if prop == "no-deficit":
        return verify.check_budget(scenario, scheme, "no_deficit", bound)
    if prop == "participation-ex-post":
        return verify.check_participation(scenario, scheme, "ex_post")
    if prop == "participation-ex-ante":
        return verify.check_participation(scenario, scheme, "ex_ante_anticipated")
    if prop == "nonnegative-valuations":
        return verify.check_nonnegative_valuations(scenario)
    if prop == "holmstrom":
        g = verify.find_g(scenario)
        if g is None:
            certificate = verify.holmstrom_certificate(scenario)
            return verify.VerificationResult(
                "holmstrom", False, [verify.Witness(certificate or "infeasible")], 1)
        return verify.check_holmstrom(scenario, g)
    raise ValueError(prop)


def cmd_verify(args) -> int:
    if args.generated is None and args.scenario is None:
        print("verify needs a scenario or --generated N", file=sys.stderr)
        return 2
    if args.generated is not None:
        scenarios = [_apply_scheme(generate_scenario(args.seed, k,
                                                     procurement=args.procurement),
                                   args.scheme)
                     for k in range(args.generated)]
    else:
        scenarios = [_apply_scheme(_load(args.scenario), args.scheme)]
    results = []
    worst = 0
    for scenario in scenarios:
        props = args.properties
        if args.all or not props:
            props = applicable_properties(scenario.scheme.kind)
        for prop in props:
            try:
                result = run_property(scenario, prop, args.bound)
            except StrategySpaceTooLarge as err:
                print(f"{scenario.name}: {prop}: enumeration bound exceeded ({err})")
                return 3
            results.append((scenario.name, result))
            verdict = "holds" if result.holds else "VIOLATED"
            expected = prop in args.expect_fail
            print(f"{scenario.name}: {result.prop}: {verdict} "
                  f"({result.checked} cases)"
                  + (" [expected violation]" if expected and not result.holds else ""))
            for witness in result.witnesses[:3]:
                print(f"  witness: {witness.description}")
            if result.holds == expected:
                worst = max(worst, 1)
    if args.report:
        payload = [{"scenario": name, **result.jsonable()} for name, result in results]
        with open(args.report, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
    return worst


def cmd_report(args) -> int:
    scenario = _load(args.scenario)
    payload = {
        "name": scenario.name,
        "agents": list(scenario.agents),
        "levels": list(scenario.lattice.elements),
        "top": scenario.lattice.top,
        "bottom": scenario.lattice.bottom,
        "scheme": scenario.scheme.kind,
        "outcomes": list(scenario.outcomes.outcomes),
        "types": {f"{agent}@{level}": list(scenario.structure.space(agent, level))
                  for agent in scenario.agents for level in scenario.lattice.elements},
        "welfare": {},
        "draws": {name: {"types": list(d.true_types), "awareness": list(d.awareness)}
                  for name, d in scenario.draws.items()},
    }
    for level in scenario.lattice.elements:
        table = {}
        for profile in scenario.structure.profiles(level):
            table["|".join(profile)] = {
                x0: _fraction_str(scenario.outcomes.welfare(x0, profile))
                for x0 in scenario.outcomes.available[level]}
        payload["welfare"][level] = table
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_fixtures(args) -> int:
    if args.name is None:
        for name in sorted(FIXTURES):
            print(name)
        return 0
    if args.name not in FIXTURES:
        print(f"unknown fixture {args.name!r}", file=sys.stderr)
        return 2
    print(FIXTURES[args.name], end="")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "report":
            return cmd_report(args)
        if args.command == "fixtures":
            return cmd_fixtures(args)
    except StrategySpaceTooLarge as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (ParseError, ValidationError, InfeasibleReport,
            FileNotFoundError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
