"""Command-line entry points.

    playmask collect-play --n 10000 --seed 0 --out play.jsonl
    playmask play --seed 0 --out session.jsonl
    playmask train-prior --dataset play.jsonl --rho 0.01 --out prior.ckpt
    playmask train --algo elfp --task medium --dataset play.jsonl --seed 0 \
        --budget 200000 --out metrics.csv
    playmask verify-tabular --trials 100 --max-states 20 --max-actions 6 --seed 0
    playmask run --config experiment.cfg
    playmask sweep-rho --config experiment.cfg --rhos 0 0.001 0.01 0.05
    playmask sweep-datasize --config experiment.cfg --dataset-sizes \
        1000=play1k.jsonl 10000=play10k.jsonl
    playmask sweep-her --config experiment.cfg --ks 0 2 4
    playmask plot --metric success --out chart.svg run1/aggregate.csv ...

The output root for run directories defaults to ./runs and can be moved
with PLAYMASK_OUT_ROOT.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path


def _cmd_collect_play(args) -> int:
    from .play import collect_play, save_dataset

    dataset = collect_play(args.n, args.seed)
    save_dataset(dataset, args.out)
    print(f"wrote {len(dataset)} records to {args.out}")
    return 0


def _cmd_play(args) -> int:
    from .play import interactive_play, save_dataset

    dataset = interactive_play(args.seed)
    save_dataset(dataset, args.out)
    print(f"wrote {len(dataset)} records to {args.out}")
    return 0


def _cmd_train_prior(args) -> int:
    from .nets import save_checkpoint
    from .play import load_dataset
    from .prior import PriorTrainConfig, SelectionOperator, train_prior

    dataset = load_dataset(args.dataset)
    cfg = PriorTrainConfig(
        batch=args.batch, steps=args.steps, lr=args.lr, seed=args.seed
    )
    model = train_prior(dataset, cfg)
    save_checkpoint(
        args.out,
        model.net,
        extra={
            "train_steps": model.train_steps,
            "final_nll": repr(model.final_nll),
            "rho": repr(args.rho),
        },
    )
    print(f"trained prior on {len(dataset)} records; held-out NLL {model.final_nll:.4f}")
    print(f"checkpoint written to {args.out}")
    return 0


def _cmd_train(args) -> int:
    from .agents import default_config, train
    from .harness.run import trained_prior
    from .harness.config import ExperimentConfig
    from .play import load_dataset
    from .prior import SelectionOperator

    selector = prior = dataset = None
    if args.algo in ("elfp", "soft-elfp"):
        exp = ExperimentConfig(algo=args.algo, dataset=args.dataset, rho=args.rho)
        exp.validate()
        prior = trained_prior(exp)
        selector = SelectionOperator(prior, rho=args.rho)
    if args.algo in ("prefill", "dqfd"):
        dataset = load_dataset(args.dataset)
    cfg = default_config(
        args.algo,
        rho=args.rho,
        update_every=args.update_every,
        lr=args.lr,
        initial_explore=args.initial_explore,
        eps_floor=args.eps_floor,
        her_k=args.her_k if args.her_k >= 0 else default_config(args.algo).her_k,
    )
    series = train(
        args.algo,
        args.task,
        cfg,
        seed=args.seed,
        budget=args.budget,
        selector=selector,
        prior=prior,
        dataset=dataset,
    )
    series.to_csv(args.out)
    reached = series.steps_to_success(0.95)
    print(f"metrics written to {args.out}; steps to 0.95 success: {reached}")
    return 0


def _cmd_verify_tabular(args) -> int:
    from .tabular import (
        TheoremResult,
        complexity_sweep,
        optimal_preserving_mask,
        random_mdp,
        sweep_to_csv,
        theorem_check,
    )
    import numpy as np

    rng = np.random.default_rng(args.seed)
    passed = vacuous = failed = 0
    for trial in range(args.trials):
        n_s = int(rng.integers(2, args.max_states + 1))
        n_a = int(rng.integers(2, args.max_actions + 1))
        mdp = random_mdp(int(rng.integers(2**31)), n_s, n_a)
        mask = optimal_preserving_mask(mdp, float(rng.random()), int(rng.integers(2**31)))
        result = theorem_check(mdp, mask)
        if result is TheoremResult.PASS:
            passed += 1
        elif result is TheoremResult.VACUOUS:
            vacuous += 1
        else:
            failed += 1
            print(f"trial {trial}: FAIL ({n_s} states, {n_a} actions)")
    print(f"theorem check: {passed} pass, {vacuous} vacuous, {failed} fail")
    if args.sweep_out:
        rows = complexity_sweep(
            lambda seed: random_mdp(seed, 8, 5, gamma_range=(0.85, 0.9)),
            densities=(0.0, 0.33, 0.66, 1.0),
            gap=0.02,
            seeds=range(5),
            max_steps=150_000,
            check_every=250,
        )
        sweep_to_csv(rows, args.sweep_out)
        print(f"mask-density sweep written to {args.sweep_out}")
    return 0 if failed == 0 else 1


def _cmd_run(args) -> int:
    from .harness import load_config, run

    cfg = load_config(args.config)
    result = run(cfg)
    print(f"run complete: {result.run_dir}")
    for path in result.seed_csvs:
        print(f"  {path}")
    return 0


def _cmd_sweep_rho(args) -> int:
    from .harness import load_config, sweep_rho

    path = sweep_rho(load_config(args.config), [float(r) for r in args.rhos])
    print(f"sweep written to {path}")
    return 0


def _cmd_sweep_datasize(args) -> int:
    from .harness import load_config, sweep_dataset_size

    datasets = {}
    for pair in args.dataset_sizes:
        size, _, path = pair.partition("=")
        datasets[int(size)] = path
    out = sweep_dataset_size(load_config(args.config), datasets)
    print(f"sweep written to {out}")
    return 0


def _cmd_sweep_her(args) -> int:
    from .harness import load_config, sweep_her

    path = sweep_her(load_config(args.config), [int(k) for k in args.ks])
    print(f"sweep written to {path}")
    return 0


def _cmd_plot(args) -> int:
    from .harness import emit_plots

    runs = []
    for spec_ in args.aggregates:
        label, _, path = spec_.rpartition("=")
        if not label:
            label = Path(path).parent.name or Path(path).stem
        runs.append((label, path))
    out = emit_plots(runs, args.out, metric=args.metric)
    print(f"chart written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="playmask", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collect-play", help="scripted play collection")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_collect_play)

    p = sub.add_parser("play", help="interactive play collection")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_play)

    p = sub.add_parser("train-prior", help="fit the behavioral prior")
    p.add_argument("--dataset", required=True)
    p.add_argument("--rho", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--batch", type=int, default=500)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_train_prior)

    p = sub.add_parser("train", help="train one agent for one seed")
    p.add_argument("--algo", required=True,
                   choices=["elfp", "ddqn", "her", "prefill", "dqfd", "soft-elfp"])
    p.add_argument("--task", required=True, choices=["medium", "hard"])
    p.add_argument("--dataset", default="")
    p.add_argument("--rho", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--update-every", type=int, default=3)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--initial-explore", type=int, default=20_000)
    p.add_argument("--eps-floor", type=float, default=0.05)
    p.add_argument("--her-k", type=int, default=-1)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("verify-tabular", help="fuzz the reduced-MDP theorem")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-states", type=int, default=20)
    p.add_argument("--max-actions", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep-out", default="",
                   help="also run a mask-density sweep and write its CSV here")
    p.set_defaults(fn=_cmd_verify_tabular)

    p = sub.add_parser("run", help="multi-seed experiment from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep-rho", help="threshold sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--rhos", nargs="+", required=True)
    p.set_defaults(fn=_cmd_sweep_rho)

    p = sub.add_parser("sweep-datasize", help="dataset-size sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset-sizes", nargs="+", required=True,
                   metavar="SIZE=PATH")
    p.set_defaults(fn=_cmd_sweep_datasize)

    p = sub.add_parser("sweep-her", help="relabeling-ratio sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--ks", nargs="+", required=True)
    p.set_defaults(fn=_cmd_sweep_her)

    p = sub.add_parser("plot", help="render SVG charts from aggregates")
    p.add_argument("aggregates", nargs="+", metavar="[LABEL=]CSV")
    p.add_argument("--metric", default="success",
                   choices=["success", "infeasible", "loss"])
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
