"""Command-line entry point: simulate, phase-diagram, infer, fit, normalize.

Exit codes: 0 success, 1 data error, 2 usage error. Every output written to
a file gets a ``<file>.manifest.json`` next to it; output on stdout gets its
manifest on stderr. Set BIGRANK_THREADS to run trials/bootstraps in threads.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fit as fitmod
from . import guesses, io, stability
from .model import DomainError, ModelParams
from .raicr import mle_quality
from .seeding import thread_count
from .simulate import Popularity, Quality, Recency, TrialConfig, run_experiment


def _float_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _prob(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {v}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bigrank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {io.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("-o", "--output", type=Path, help="output CSV (default: stdout)")

    sim = sub.add_parser("simulate", help="Monte-Carlo ranking experiment, one CSV row per (a_worst, checkpoint)")
    sim.add_argument("--policy", choices=("popularity", "recency", "quality"), required=True)
    sim.add_argument("--advantage", type=int, help="head start of the worst answer (popularity only)")
    sim.add_argument("--a-worst", type=_float_list, required=True, help="worst-answer value(s), comma separated")
    sim.add_argument("--p", type=_prob, required=True, help="true position bias")
    sim.add_argument("--r", type=_prob, required=True, help="true random-choice rate")
    sim.add_argument("--assumed-p", type=_prob, help="p assumed by the quality policy (default: --p)")
    sim.add_argument("--assumed-r", type=_prob, help="r assumed by the quality policy (default: --r)")
    sim.add_argument("--votes", type=_positive_int, default=20000)
    sim.add_argument("--checkpoints", type=_int_list, help="vote counts to report (default: --votes)")
    sim.add_argument("--trials", type=_positive_int, default=500)
    sim.add_argument("--seed", type=int, default=0)
    add_output(sim)

    ph = sub.add_parser("phase-diagram", help="stable/unstable grid for popularity ranking")
    ph.add_argument("--p-max", type=float, default=0.5)
    ph.add_argument("--a-max", type=float, default=2.0)
    ph.add_argument("--steps", type=_positive_int, default=100)
    add_output(ph)

    inf = sub.add_parser("infer", help="RAICR quality estimate per ledger row")
    inf.add_argument("ledger", type=Path, help="CSV answer_id,n_t,N_t,n_b,N_b")
    inf.add_argument("--p", type=_prob, required=True)
    inf.add_argument("--r", type=_prob, required=True)
    add_output(inf)

    ft = sub.add_parser("fit", help="fit (p, r) to choice records")
    ft.add_argument("choices", type=Path, help="CSV a_first,a_last,chose_first")
    ft.add_argument("--bootstrap", type=_positive_int, default=1000, help="bootstrap resamples")
    ft.add_argument("--gof", type=_positive_int, default=1000, help="goodness-of-fit synthetic datasets")
    ft.add_argument("--refit-gof", action="store_true", help="refit each goodness-of-fit dataset")
    ft.add_argument("--seed", type=int, default=0)
    ft.add_argument("--log", type=Path, help="JSON-lines log of bootstrap iterations")
    add_output(ft)

    nm = sub.add_parser("normalize", help="log-guess normalization statistics per question")
    nm.add_argument("guesses", type=Path, help="CSV question_id,guess")
    nm.add_argument("--values", type=Path, help="also write question_id,guess,a for cleaned guesses")
    add_output(nm)
    return parser


def _validate(parser: argparse.ArgumentParser, args) -> None:
    if args.command == "simulate":
        if args.advantage is not None and args.policy != "popularity":
            parser.error("--advantage only applies to --policy popularity")
        if args.advantage is not None and args.advantage < 0:
            parser.error("--advantage must be >= 0")
        if (args.assumed_p is not None or args.assumed_r is not None) and args.policy != "quality":
            parser.error("--assumed-p/--assumed-r only apply to --policy quality")
        if any(a == 0.0 for a in args.a_worst):
            parser.error("--a-worst must differ from the best answer (0)")
        if args.checkpoints and (min(args.checkpoints) < 1 or max(args.checkpoints) > args.votes):
            parser.error("--checkpoints must lie in [1, --votes]")
    elif args.command == "phase-diagram":
        if not 0.0 <= args.p_max < 1.0:
            parser.error("--p-max must lie in [0, 1)")
        if not args.a_max >= 0.0:
            parser.error("--a-max must be >= 0")


def cmd_simulate(args) -> tuple[str, dict]:
    true_params = ModelParams(args.p, args.r)
    if args.policy == "popularity":
        policy = Popularity(args.advantage or 0)
    elif args.policy == "recency":
        policy = Recency()
    else:
        assumed = ModelParams(args.p if args.assumed_p is None else args.assumed_p,
                              args.r if args.assumed_r is None else args.assumed_r)
        policy = Quality(assumed)
    checkpoints = sorted(set((args.checkpoints or []) + [args.votes]))
    rows = []
    for a in args.a_worst:
        template = TrialConfig(a, true_params, policy, args.votes, seed=args.seed)
        for est in run_experiment(template, args.trials, checkpoints, n_jobs=thread_count()):
            rows.append((policy.label, a, est.checkpoint, est.prob_best_first, est.ci_low, est.ci_high))
    header = ("policy", "a_worst", "checkpoint", "prob_best_first", "ci_low", "ci_high")
    params = {"policy": policy.label, "a_worst": args.a_worst, "p": args.p, "r": args.r,
              "votes": args.votes, "checkpoints": checkpoints, "trials": args.trials}
    return io.render_csv(rows, header), params


def cmd_phase_diagram(args) -> tuple[str, dict]:
    p_grid = np.linspace(0.0, args.p_max, args.steps)
    a_grid = np.linspace(0.0, args.a_max, args.steps)
    points = stability.phase_diagram(p_grid, a_grid)
    rows = ((pt.p, pt.a_worst, pt.stable) for pt in points)
    params = {"p_max": args.p_max, "a_max": args.a_max, "steps": args.steps}
    return io.render_csv(rows, ("p", "a_worst", "stable")), params


def cmd_infer(args) -> tuple[str, dict]:
    params = ModelParams(args.p, args.r)
    rows = []
    for answer_id, ledger in io.read_ledgers(args.ledger):
        est = mle_quality(ledger, params)
        rows.append((answer_id, est.q_hat, est.rank_first))
    return io.render_csv(rows, ("answer_id", "q_hat", "rank_first")), {"ledger": str(args.ledger), "p": args.p, "r": args.r}


def cmd_fit(args) -> tuple[str, dict]:
    records = io.read_choices(args.choices)
    data = fitmod.ChoiceData.from_records(records)
    n_jobs = thread_count()
    full = fitmod.fit_params(data)
    boot = fitmod.bootstrap_errors(data, args.bootstrap, args.seed, n_jobs)
    lrt = {k: fitmod.likelihood_ratio_test(data, k, full) for k in ("p", "r", "both")}
    gof = fitmod.goodness_of_fit(data, full, args.gof, args.seed, refit=args.refit_gof, n_jobs=n_jobs)
    if args.log:
        lines = (json.dumps({"iteration": i, "p_hat": float(p), "r_hat": float(r), "log_likelihood": float(ll)})
                 for i, (p, r, ll) in enumerate(boot.estimates))
        args.log.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    header = ("n", "p_hat", "r_hat", "log_likelihood", "p_err", "r_err", "lr_p0_pvalue", "lr_r0_pvalue",
              "lr_both_pvalue", "gof_pvalue", "gof_agrees", "degenerate")
    row = (full.n, full.p_hat, full.r_hat, full.log_likelihood, boot.p_err, boot.r_err, lrt["p"].p_value,
           lrt["r"].p_value, lrt["both"].p_value, gof.p_value, gof.agrees, full.degenerate)
    params = {"choices": str(args.choices), "bootstrap": args.bootstrap, "gof": args.gof, "refit_gof": args.refit_gof}
    return io.render_csv([row], header), params


def cmd_normalize(args) -> tuple[str, dict]:
    grouped = guesses.group_by_question(io.read_guesses(args.guesses))
    stat_rows, value_rows = [], []
    for qid, raw in grouped.items():
        sample = guesses.clean_guesses(raw, question_id=qid)
        st = guesses.fit_stats(sample)
        stat_rows.append((qid, st.mean_log, st.std_log, st.n))
        value_rows.extend((qid, g, a) for g, a in zip(sample.guesses, guesses.normalize_sample(sample, st)))
    if args.values:
        args.values.write_text(io.render_csv(value_rows, ("question_id", "guess", "a")), encoding="utf-8")
    return io.render_csv(stat_rows, ("question_id", "mean_log", "std_log", "n")), {"guesses": str(args.guesses)}


COMMANDS = {
    "simulate": cmd_simulate,
    "phase-diagram": cmd_phase_diagram,
    "infer": cmd_infer,
    "fit": cmd_fit,
    "normalize": cmd_normalize,
}

DATA_ERRORS = (io.DataError, DomainError, guesses.InsufficientDataError, guesses.DegenerateSampleError,
               fitmod.InsufficientDataError, fitmod.OptimizerError)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        text, params = COMMANDS[args.command](args)
    except DATA_ERRORS as exc:
        print(f"bigrank {args.command}: error: {exc}", file=sys.stderr)
        return 1

    outputs = [str(p) for p in (args.output, getattr(args, "values", None), getattr(args, "log", None)) if p]
    manifest = io.RunManifest(args.command, params, getattr(args, "seed", None), outputs=outputs)
    if args.output:
        args.output.write_text(text, encoding="utf-8")
        io.manifest_path(args.output).write_text(manifest.to_json(), encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stderr.write(manifest.to_json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
