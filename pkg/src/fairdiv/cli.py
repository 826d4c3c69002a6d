"""Command-line front end.

Subcommands:
  run       execute an allocation algorithm on a generated or loaded
            instance, emit a verifier-embedded report, exit 0 iff the
            requested verifier passes
  scaling   sweep item counts, emit per-run CSV, a summary CSV with the
            fitted logarithmic model, and a rendered figure
  falsify   drive an algorithm with the adaptive adversary and report
            whether it survived or is broken by a realized valuation
  elicit    answer the comparison queries interactively in the terminal
            (resumable; scripted answers supported)
  serve     start the HTTP elicitation service
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .adversary import AdversaryOracle, realize_witness, replay_consistent
from .core import Allocation, Instance, dumps_canonical
from .generators import GENERATORS, make_instance
from .oracle import ExactOracle, TiePolicy
from .registry import REGISTRY, run_algorithm
from .report import (
    doubling_increments,
    measure_scaling,
    render_run_figure,
    render_scaling_figure,
    run_report,
    summarize_scaling,
    write_scaling_csv,
    write_summary_csv,
)
from .session import SessionConfig, SessionStore
from .service import DEFAULT_SESSIONS_DIR
from .verify import MmsInfeasible, is_alpha_mms, is_ef1, is_prop1

TIE_POLICIES = {"first": TiePolicy.FIRST_ARGUMENT, "second": TiePolicy.SECOND_ARGUMENT}


def _parse_verify(spec: str):
    if spec in ("prop1", "ef1"):
        return spec, None
    if spec.startswith("mms="):
        return "mms", Fraction(spec[len("mms="):])
    raise argparse.ArgumentTypeError(f"invalid verifier {spec!r}; use prop1, ef1 or mms=ALPHA")


def _identical_copy(instance: Instance) -> Instance:
    return Instance(n=instance.n, m=instance.m,
                    valuations={i: dict(instance.valuations[0]) for i in range(instance.n)})


def _load_or_generate(args) -> Instance:
    if args.instance:
        try:
            with open(args.instance) as fh:
                instance = Instance.from_json(json.load(fh))
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            raise SystemExit(f"error: malformed instance file: {exc}")
        if instance.valuations is None:
            raise SystemExit("error: instance file carries no valuations to simulate with")
    else:
        instance = make_instance(args.gen, args.n, args.m, args.seed)
    if args.algo in ("prop1-identical", "ef1-identical"):
        instance = _identical_copy(instance)
    return instance


def cmd_run(args) -> int:
    if args.algo not in REGISTRY:
        raise SystemExit(f"error: unknown algorithm {args.algo!r}")
    instance = _load_or_generate(args)
    spec = REGISTRY[args.algo]
    if spec.arity is not None and instance.n != spec.arity:
        raise SystemExit(f"error: {args.algo} requires exactly {spec.arity} agents, "
                         f"got n={instance.n}")
    oracle = ExactOracle(instance, tie_policy=TIE_POLICIES[args.tie_policy])
    outcome = run_algorithm(args.algo, instance.n, range(instance.m), oracle)

    verifier, alpha = args.verify if args.verify else (None, None)
    include_mms = verifier == "mms"
    config = {
        "instance_file": args.instance,
        "gen": None if args.instance else args.gen,
        "n": instance.n,
        "m": instance.m,
        "seed": None if args.instance else args.seed,
        "tie_policy": args.tie_policy,
        "verify": f"mms={alpha}" if verifier == "mms" else verifier,
    }
    try:
        report = run_report(args.algo, instance, outcome, oracle.log, config,
                            alpha=alpha or Fraction(1, 2), include_mms=include_mms)
    except MmsInfeasible as exc:
        raise SystemExit(f"error: {exc} (raise FAIRDIV_BUDGET to enumerate)")

    if verifier is None:
        ok = True
    elif verifier == "prop1":
        ok = all(report["verifiers"]["prop1"].values())
    elif verifier == "ef1":
        ok = all(report["verifiers"]["ef1"].values())
    else:
        ok = all(v is True for v in report["verifiers"]["alpha_mms"].values())

    if args.format == "csv":
        from .report import CSV_COLUMNS

        row = [args.algo, instance.n, instance.m,
               "" if args.instance else args.seed, oracle.log.total,
               str(ok).lower()]
        text = ",".join(CSV_COLUMNS) + "\n" + ",".join(str(v) for v in row)
    else:
        text = dumps_canonical(report)
    if args.out:
        out = Path(args.out)
        out.write_text(text + "\n")
        if args.plot:
            render_run_figure(report, out.with_suffix(".png"))
    else:
        print(text)

    if verifier is None:
        return 0
    print(f"verify {config['verify']}: {'pass' if ok else 'FAIL'}", file=sys.stderr)
    return 0 if ok else 1


def cmd_scaling(args) -> int:
    schedule = [int(tok) for tok in args.m.split(",")]
    rows = measure_scaling(args.algo, args.n, schedule, args.seeds,
                           generator=args.gen, tie_policy=TIE_POLICIES[args.tie_policy],
                           verify=args.check)
    summary = summarize_scaling(rows)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_scaling_csv(rows, out / "scaling_runs.csv")
    write_summary_csv(summary, out / "scaling_summary.csv")
    if args.plot:
        render_scaling_figure(rows, summary, out / "scaling.png", args.algo, args.n)
    for lo, hi, delta in doubling_increments(summary):
        print(f"m {lo} -> {hi}: mean queries +{delta}")
    print(f"wrote {out / 'scaling_runs.csv'}")
    return 0


def cmd_falsify(args) -> int:
    if args.algo not in REGISTRY:
        raise SystemExit(f"error: unknown algorithm {args.algo!r}")
    oracle = AdversaryOracle(args.m, args.n)
    outcome = run_algorithm(args.algo, args.n, range(args.m), oracle)
    state = oracle.state
    witness = realize_witness(state, outcome.allocation.bundles, fairness="prop1")
    if witness is None:
        bound = max(math.log2(args.m / (2 * args.n)), 0)
        print(f"survived: {state.value_queries} value queries "
              f"(>= log2(m/2n) = {bound:.1f} required), |G| = {len(state.g)} <= 2n")
        return 0
    assert replay_consistent(state, witness)
    instance = Instance(n=args.n, m=args.m,
                        valuations={i: dict(witness) for i in range(args.n)})
    flags = is_prop1(instance, Allocation(bundles=outcome.allocation.bundles))
    print("falsified: transcript-consistent valuation found")
    print("valued items:", sorted(g for g, v in witness.items() if v))
    print("is_prop1 per agent:", {i: bool(v) for i, v in flags.items()})
    return 1


def cmd_elicit(args) -> int:
    store = SessionStore(Path(args.sessions_dir))
    if args.resume:
        session_id = args.resume
        if not store.exists(session_id):
            raise SystemExit(f"error: unknown session {session_id!r}")
        config, _ = store.load(session_id)
    else:
        labels = args.labels.split(",") if args.labels else [f"g{i}" for i in range(args.m)]
        config = SessionConfig(args.algo, args.n, tuple(labels))
        try:
            config.validate()
        except ValueError as exc:
            raise SystemExit(f"error: {exc}")
        session_id = store.create(config)
        print(f"session {session_id}")

    scripted = []
    if args.script:
        scripted = [line.strip() for line in Path(args.script).read_text().splitlines()
                    if line.strip()]
    while True:
        outcome = store.step(session_id)
        if outcome.finished:
            alloc = outcome.allocation.to_json()
            print("allocation:")
            for agent, bundle in alloc["bundles"].items():
                names = ", ".join(config.item_labels[g] for g in bundle) or "(nothing)"
                print(f"  agent {agent}: {names}")
            print(f"queries: {sum(outcome.query_counts.values())}")
            return 0
        q = outcome.pending
        xs = ", ".join(config.item_labels[g] for g in q.x) or "(nothing)"
        ys = ", ".join(config.item_labels[g] for g in q.y) or "(nothing)"
        print(f"[{outcome.answered + 1}] agent {q.agent}: which do you prefer?")
        print(f"  x: {xs}")
        print(f"  y: {ys}")
        if scripted:
            choice = scripted.pop(0)
            print(f"answer (scripted): {choice}")
        else:
            try:
                choice = input("answer [x/y]: ").strip().lower()
            except EOFError:
                print(f"\nsession {session_id} saved; resume with --resume {session_id}")
                return 0
        if choice not in ("x", "y"):
            print("please answer x or y")
            continue
        store.append_answer(session_id, choice)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.sessions_dir), host=args.host, port=args.port,
                log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdiv",
                                     description="comparison-query fair division toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an algorithm and verify the result")
    run.add_argument("--algo", required=True, choices=sorted(REGISTRY))
    run.add_argument("--instance", help="instance JSON file (overrides the generator)")
    run.add_argument("--n", type=int, default=3)
    run.add_argument("--m", type=int, default=8)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--gen", choices=sorted(GENERATORS), default="uniform")
    run.add_argument("--tie-policy", choices=sorted(TIE_POLICIES), default="first")
    run.add_argument("--verify", type=_parse_verify, default=None,
                     help="prop1, ef1, or mms=ALPHA (e.g. mms=1/2)")
    run.add_argument("--format", choices=("json", "csv"), default="json",
                     help="full JSON report or one fixed-column CSV row")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--plot", action=argparse.BooleanOptionalAction, default=False,
                     help="render a per-agent figure next to --out")
    run.set_defaults(func=cmd_run)

    scaling = sub.add_parser("scaling", help="query-count scaling experiment")
    scaling.add_argument("--algo", required=True, choices=sorted(REGISTRY))
    scaling.add_argument("--n", type=int, default=3)
    scaling.add_argument("--m", default="64,256,1024,4096",
                         help="strictly increasing comma-separated item counts")
    scaling.add_argument("--seeds", type=int, default=10)
    scaling.add_argument("--gen", choices=sorted(GENERATORS), default="uniform")
    scaling.add_argument("--tie-policy", choices=sorted(TIE_POLICIES), default="first")
    scaling.add_argument("--check", action="store_true",
                         help="also verify each run (slow, caps m)")
    scaling.add_argument("--out", required=True, help="output directory")
    scaling.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
    scaling.set_defaults(func=cmd_scaling)

    falsify = sub.add_parser("falsify", help="run an algorithm against the adversary")
    falsify.add_argument("--algo", required=True, choices=sorted(REGISTRY))
    falsify.add_argument("--n", type=int, default=2)
    falsify.add_argument("--m", type=int, default=64)
    falsify.set_defaults(func=cmd_falsify)

    elicit = sub.add_parser("elicit", help="answer comparison queries in the terminal")
    elicit.add_argument("--algo", choices=sorted(REGISTRY), default="ef1-2")
    elicit.add_argument("--n", type=int, default=2)
    elicit.add_argument("--m", type=int, default=4)
    elicit.add_argument("--labels", help="comma-separated item labels")
    elicit.add_argument("--script", help="file with one x/y answer per line")
    elicit.add_argument("--resume", help="resume an existing session id")
    elicit.add_argument("--sessions-dir", default=DEFAULT_SESSIONS_DIR)
    elicit.set_defaults(func=cmd_elicit)

    serve = sub.add_parser("serve", help="start the HTTP elicitation service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8777)
    serve.add_argument("--sessions-dir", default=DEFAULT_SESSIONS_DIR)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
