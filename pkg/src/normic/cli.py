"""Command-line front end.

Reads a model document (or a named scenario), runs belief/knowledge/
discovery/checking queries, and prints deterministic, canonically ordered
output.  Exit status: 0 success, 1 model error, 2 parse error.
"""

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import dese, modelspec, scenarios
from .core import (FalseDiscoveryError, KnowledgeVariant, StructureError,
                   World, state_key)
from .genprob import (ModelError, SufficiencyRule, believed_states, generate,
                      check_threshold, as_fraction)

PARSE_EXIT = 2
MODEL_EXIT = 1


class CliError(Exception):
    def __init__(self, message, code=MODEL_EXIT):
        super().__init__(message)
        self.code = code


def _read_model(path: str):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc}") from exc
    result = modelspec.parse(text)
    for diag in result.diagnostics:
        print(f"{path}:{diag}", file=sys.stderr)
    if not result.ok:
        raise CliError("model document has errors", PARSE_EXIT)
    return result.document


def _build(document):
    gen = document.generator
    if gen is None:
        return modelspec.build_structure(document), str
    name = gen["name"]
    if name == "geometric":
        depth = int(gen.get("depth", scenarios.default_depth()))
        ps = scenarios.build_flipping(depth=depth,
                                      threshold=document.threshold)
        return ps, int
    raise CliError(f"generator {name!r} is not usable here; "
                   "use the scenario or table commands")


def _parse_world(spec: str, ps, cast):
    if "@" not in spec:
        raise CliError(f"world {spec!r} must look like state@evidence")
    state_token, evidence = spec.split("@", 1)
    try:
        state = cast(state_token)
    except ValueError:
        raise CliError(f"bad state id {state_token!r}") from None
    try:
        return ps.world(state, evidence)
    except ModelError as exc:
        raise CliError(str(exc)) from exc


def _parse_state_set(spec: str, ps, cast):
    spec = spec.strip()
    if not (spec.startswith("{") and spec.endswith("}")):
        raise CliError(f"state set {spec!r} must look like {{a, b, ...}}")
    tokens = [tok.strip() for tok in spec[1:-1].split(",") if tok.strip()]
    upward = False
    if tokens and tokens[-1] in ("...", ".."):
        upward = True
        tokens = tokens[:-1]
    if not tokens:
        raise CliError(f"state set {spec!r} is empty")
    try:
        listed = [cast(tok) for tok in tokens]
    except ValueError:
        raise CliError(f"bad state id in {spec!r}") from None
    members = set(listed)
    if upward:
        if cast is not int:
            raise CliError("an upward tail set needs integer states")
        members.update(s for s in ps.states if s >= listed[-1])
    return members


def _fmt_states(states):
    return " ".join(str(s) for s in states)


def _emit(args, payload: dict, plain: str):
    fmt = getattr(args, "format", "plain")
    if fmt == "json":
        print(json.dumps(payload, default=str, sort_keys=True))
    elif fmt in ("tsv", "csv"):
        writer = csv.writer(sys.stdout,
                            delimiter="\t" if fmt == "tsv" else ",")
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (list, tuple)):
                writer.writerow([key, *value])
            else:
                writer.writerow([key, value])
    else:
        print(plain)


# ---------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------

def cmd_believe(args):
    document = _read_model(args.model)
    if document.generator and document.generator["name"] == "decay":
        model = dese.DecayModel(measuring=document.generator.get("measuring",
                                                                 "log"))
        interval = dese.decay_belief_interval(model, float(document.threshold))
        _emit(args, {"lo": interval.lo, "hi": interval.hi,
                     "closed_lo": interval.closed_lo,
                     "closed_hi": interval.closed_hi},
              f"{'[' if interval.closed_lo else '('}{interval.lo:.9g}, "
              f"{interval.hi:.9g}{']' if interval.closed_hi else ')'}")
        return 0
    ps, cast = _build(document)
    rule = SufficiencyRule(args.rule)
    if args.at:
        world = _parse_world(args.at, ps, cast)
        evidence = world.evidence
    else:
        evidence = _default_evidence(args, ps)
    states = believed_states(ps, evidence, rule)
    _emit(args, {"evidence": evidence, "believed_states": list(states)},
          _fmt_states(states))
    return 0


def _default_evidence(args, ps):
    if len(ps.evidence) == 1:
        return next(iter(ps.evidence))
    raise CliError("--at is required when the model has several bodies "
                   "of evidence")


def cmd_know(args):
    document = _read_model(args.model)
    ps, cast = _build(document)
    variant = KnowledgeVariant(args.variant or document.variant)
    rule = SufficiencyRule(args.rule or document.rule)
    world = _parse_world(args.at, ps, cast)
    ns = generate(ps, rule)
    known = tuple(sorted({v.state for v in ns.epistemic_accessible(world,
                                                                   variant)},
                         key=state_key))
    _emit(args, {"world": f"{world.state}@{world.evidence}",
                 "variant": variant.value, "known_states": list(known)},
          _fmt_states(known))
    return 0


def cmd_discover(args):
    document = _read_model(args.model)
    ps, cast = _build(document)
    rule = SufficiencyRule(args.rule or document.rule)
    world = _parse_world(args.at, ps, cast)
    ns = generate(ps, rule)
    lines = []
    states = believed_states(ps, world.evidence, rule)
    lines.append(f"believe: {_fmt_states(states)}")
    steps = []
    for learn in args.learn:
        p = _parse_state_set(learn, ps, cast)
        try:
            world = ns.discover(world, p)
        except StructureError as exc:
            raise CliError(str(exc)) from exc
        states = believed_states(ps, world.evidence, rule)
        steps.append({"learned": sorted(p, key=state_key),
                      "world": f"{world.state}@{world.evidence}",
                      "believed_states": list(states)})
        lines.append(f"learn {learn} -> believe: {_fmt_states(states)}")
    _emit(args, {"steps": steps}, "\n".join(lines))
    return 0


def cmd_check(args):
    document = _read_model(args.model)
    if document.generator and document.generator["name"] == "racing":
        coins = int(document.generator.get("coins", 10))
        for question in scenarios.RacingQuestion:
            for t in (Fraction(3, 4), Fraction(19, 20)):
                scenarios.racing_summary(question, t, coins=coins)
        print(f"ok: racing engines certified at t=3/4 and t=19/20 "
              f"({coins} coins)")
        return 0
    ps, _ = _build(document)
    rule = SufficiencyRule(args.rule or document.rule)
    ns = generate(ps, rule)
    try:
        ns.validate()
    except StructureError as exc:
        print(f"axioms: FAIL ({exc})")
        return MODEL_EXIT
    print("axioms: ok (preorder, well-foundedness, 5a, 5b)")
    report = check_threshold(ps, rule)
    if not report.holds:
        print(f"threshold: FAIL at {report.witness} "
              f"(mass {report.mass})")
        return MODEL_EXIT
    print(f"threshold: ok (believed mass >= {ps.threshold} everywhere)")
    return 0


def _single_t(args, default):
    if not args.t:
        return default
    if len(args.t) > 1:
        raise CliError("this scenario takes a single --t")
    return args.t[0]


def cmd_scenario(args):
    name = args.name
    if name == "flipping":
        ps = scenarios.build_flipping(depth=args.depth,
                                      threshold=as_fraction(
                                          _single_t(args, "0.99")))
        evidence = f"after{args.tails_seen}"
        rule = SufficiencyRule(args.rule)
        if args.action == "believe" or args.action is None:
            states = believed_states(ps, evidence, rule)
            _emit(args, {"evidence": evidence,
                         "believed_states": list(states)},
                  _fmt_states(states))
            return 0
        if args.action == "know":
            state = args.at if args.at is not None else args.tails_seen + 1
            world = ps.world(int(state), evidence)
            ns = generate(ps, rule)
            variant = KnowledgeVariant(args.variant or "stalnaker")
            known = tuple(sorted(
                {v.state for v in ns.epistemic_accessible(world, variant)},
                key=state_key))
            _emit(args, {"known_states": list(known)}, _fmt_states(known))
            return 0
        if args.action == "discover":
            if args.at is None:
                raise CliError("discover needs --at (the actual state)")
            world = ps.world(int(args.at), evidence)
            ns = generate(ps, rule)
            lines = [f"believe: {_fmt_states(believed_states(ps, world.evidence, rule))}"]
            for learn in args.learn or []:
                p = _parse_state_set(learn, ps, int)
                world = ns.discover(world, p)
                lines.append(f"learn {learn} -> believe: "
                             f"{_fmt_states(believed_states(ps, world.evidence, rule))}")
            print("\n".join(lines))
            return 0
        raise CliError(f"unknown flipping action {args.action!r}")
    if name == "heading":
        report = scenarios.heading_checks()
        print(f"typicality drop after 100 heads: {report.ratio_after}")
        print(f"typicality drop before flipping: {report.ratio_before}")
        for variant in KnowledgeVariant:
            after = report.coincidence_accessible_after[variant]
            before = report.coincidence_accessible_before[variant]
            print(f"{variant.value}: coincidence world accessible "
                  f"before={'yes' if before else 'no'} "
                  f"after={'yes' if after else 'no'}")
        print(f"believed after 100 heads: "
              f"{' '.join(report.believed_after)}")
        return 0
    if name == "racing":
        return cmd_table_racing(args)
    if name == "clock":
        ds = scenarios.build_clock(sigma=args.sigma or 0.1,
                                   threshold=float(
                                       Fraction(_single_t(args, "0.95"))))
        from .density import belief_region
        region = belief_region(ds, "seen")
        a, b = region.interval
        print(f"belief arc: [{a:.9f}, {b:.9f}] (mass {region.mass:.9f})")
        return 0
    if name == "weighing":
        t = _single_t(args, None)
        ds = scenarios.build_weighing(mu=args.mu or 0.0,
                                      sigma=args.sigma or 1.0,
                                      threshold=float(Fraction(t))
                                      if t else None)
        from .density import belief_region
        region = belief_region(ds, "reading")
        a, b = region.interval
        print(f"belief interval: [{a:.9f}, {b:.9f}] (mass {region.mass:.9f})")
        return 0
    if name == "decay":
        model = scenarios.build_decay(measuring=args.measuring)
        interval = dese.decay_belief_interval(
            model, float(Fraction(_single_t(args, "0.95"))))
        lo_b = "[" if interval.closed_lo else "("
        hi_b = "]" if interval.closed_hi else ")"
        print(f"believed time to decay: {lo_b}{interval.lo:.9g}, "
              f"{interval.hi:.9g}{hi_b} years (mass {interval.mass:.9g})")
        return 0
    if name == "lottery":
        ps = scenarios.build_lottery()
        believed = believed_states(ps, "setup", SufficiencyRule(args.rule))
        small_out = "small" not in believed
        print(f"believed winners exclude the small holder: "
              f"{'yes' if small_out else 'no'} (rule {args.rule})")
        return 0
    raise CliError(f"unknown scenario {name!r}")


INF = "inf"


def cmd_table_racing(args):
    thresholds = tuple(as_fraction(t) for t in (args.t or ["3/4", "19/20"]))
    rows = scenarios.racing_table(thresholds, coins=args.coins or 10,
                                  depth=args.depth)
    header = ["question", "most normal", "t", "min tails", "max tails",
              "min trials", "max trials", "same end?"]
    table = [header]
    for row in rows:
        modal = row.modal[0]
        if row.question is scenarios.RacingQuestion.OUTCOME_SHAPE:
            modal_text = scenarios.describe_shape(modal)
        elif len(row.modal) > 1:
            modal_text = " or ".join(str(m) for m in row.modal) + " [tied]"
        else:
            modal_text = str(modal)
        s = row.summary
        table.append([
            row.question.value, modal_text, str(float(row.threshold)),
            str(s.min_tails),
            INF if s.max_tails is None else str(s.max_tails),
            str(s.min_trials),
            INF if s.max_trials is None else str(s.max_trials),
            s.same_end,
        ])
    fmt = getattr(args, "format", "tsv") or "tsv"
    if fmt == "json":
        keys = table[0]
        print(json.dumps([dict(zip(keys, row)) for row in table[1:]],
                         indent=0, sort_keys=True))
    else:
        delimiter = "," if fmt == "csv" else "\t"
        writer = csv.writer(sys.stdout, delimiter=delimiter,
                            lineterminator="\n")
        for row in table:
            writer.writerow(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normic",
        description="Question-relative belief and knowledge from "
                    "probability thresholds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p, default="plain"):
        p.add_argument("--format", choices=("plain", "json", "tsv", "csv"),
                       default=default)

    p = sub.add_parser("believe", help="believed states at a world")
    p.add_argument("model")
    p.add_argument("--at", help="world as state@evidence")
    p.add_argument("--rule", choices=[r.value for r in SufficiencyRule],
                   default="sufficiency")
    add_format(p)
    p.set_defaults(func=cmd_believe)

    p = sub.add_parser("know", help="epistemically possible states")
    p.add_argument("model")
    p.add_argument("--at", required=True)
    p.add_argument("--variant", choices=[v.value for v in KnowledgeVariant])
    p.add_argument("--rule", choices=[r.value for r in SufficiencyRule])
    add_format(p)
    p.set_defaults(func=cmd_know)

    p = sub.add_parser("discover",
                       help="apply discoveries in sequence, printing the "
                            "belief line after each")
    p.add_argument("model")
    p.add_argument("--at", required=True)
    p.add_argument("--learn", action="append", required=True,
                   help="a set literal such as '{2,3,...}'; repeatable")
    p.add_argument("--rule", choices=[r.value for r in SufficiencyRule])
    add_format(p)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("check", help="validate axioms and the threshold "
                                     "guarantee")
    p.add_argument("model")
    p.add_argument("--rule", choices=[r.value for r in SufficiencyRule])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scenario", help="run a built-in case study")
    p.add_argument("name", choices=("flipping", "heading", "racing", "clock",
                                    "weighing", "decay", "lottery"))
    p.add_argument("action", nargs="?",
                   choices=("believe", "know", "discover"))
    p.add_argument("--tails-seen", type=int, default=0)
    p.add_argument("--depth", type=int)
    p.add_argument("--at", type=int)
    p.add_argument("--learn", action="append")
    p.add_argument("--t", action="append")
    p.add_argument("--coins", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--measuring", choices=dese.MEASURINGS, default="log")
    p.add_argument("--variant", choices=[v.value for v in KnowledgeVariant])
    p.add_argument("--rule", choices=[r.value for r in SufficiencyRule],
                   default="sufficiency")
    add_format(p)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("table", help="emit a scenario's summary table")
    p.add_argument("which", choices=("racing",))
    p.add_argument("--t", action="append")
    p.add_argument("--coins", type=int)
    p.add_argument("--depth", type=int)
    add_format(p, default="tsv")
    p.set_defaults(func=cmd_table_racing)

    return parser


_SCENARIO_ACTIONS = ("believe", "know", "discover")
_VALUE_OPTIONS = {"--tails-seen", "--depth", "--at", "--learn", "--t",
                  "--coins", "--sigma", "--mu", "--measuring", "--variant",
                  "--rule", "--format"}


def _hoist_scenario_action(argv):
    """Allow `scenario flipping --tails-seen 2 believe`: move a trailing
    action word next to the scenario name, where argparse expects it."""
    argv = list(argv)
    if len(argv) < 3 or argv[0] != "scenario":
        return argv
    i = 2
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS:
            i += 2
            continue
        if tok.startswith("-"):
            i += 1
            continue
        if tok in _SCENARIO_ACTIONS:
            argv.insert(2, argv.pop(i))
        break
    return argv


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = parser.parse_args(_hoist_scenario_action(argv))
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ModelError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return MODEL_EXIT


if __name__ == "__main__":
    sys.exit(main())
