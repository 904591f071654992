"""Command-line frontend.

Subcommands: gen-synth, train, classify, decode, kde-eval, meter,
account. Flags mirror the experiment configuration; a JSON document can
supply defaults via --config (explicit flags win). Exit codes: 0 on
success, 2 on validation errors, 3 on privacy infeasibility. All outputs
are deterministic given the master seed and written atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bitsum as bs
from . import classify as cls
from . import datafiles as df
from . import errors, lsq, privacy, protocol, synth
from .seeds import derive_seed, rng_from

_VALIDATION_ERRORS = (
    errors.FormatError,
    errors.InvalidParam,
    errors.NonUnitInput,
    errors.TagOutOfRange,
    errors.UserCountMismatch,
    errors.EmptyClass,
    errors.InfeasibleSeparation,
    OSError,
)
_PRIVACY_ERRORS = (errors.Infeasible, errors.DegenerateConfig)

_ECHO_HEADER = "kernel,bitsum,eps,eps_label,seed"


def _echo(args, eps=None) -> str:
    kernel = getattr(args, "kernel", "")
    variant = getattr(args, "bitsum", "")
    eps_label = getattr(args, "eps_label", "")
    seed = getattr(args, "seed", "")
    eps_txt = "" if eps is None else df.fmt_float(eps)
    lbl_txt = "" if eps_label == "" else df.fmt_float(eps_label)
    return f"{kernel},{variant},{eps_txt},{lbl_txt},{seed}"


def _write_csv(path, header: str, rows: list):
    df.atomic_write_text(path, "\n".join([header] + rows) + "\n")


def _sibling(path, suffix: str) -> str:
    base, _ = os.path.splitext(os.fspath(path))
    return base + suffix


def _budget(args, eps: float) -> privacy.BudgetSpec | None:
    if args.bitsum == bs.VARIANT_EXACT:
        return None
    delta = 0.0 if args.mode == privacy.MODE_PURE else args.delta
    return privacy.BudgetSpec(eps, delta, args.mode,
                              eps_label=getattr(args, "eps_label", 0.0))


def _resolve_i(args, dim: int) -> int:
    # the default repetition count matches the ambient dimension
    return args.i if args.i is not None else dim


def _bitsum_kwargs(args) -> dict:
    return {
        "p_rr": args.p_rr,
        "three_nb_c": args.three_nb_c,
        "rr_debias": not args.rr_raw,
    }


def cmd_gen_synth(args) -> int:
    rng = np.random.default_rng(args.seed)
    dataset, _ = synth.gen_synthetic(args.classes, args.per_class, args.dim,
                                     args.separation, args.noise, rng)
    comments = [
        f"gen-synth classes={args.classes} per_class={args.per_class} "
        f"dim={args.dim} separation={df.fmt_float(args.separation)} "
        f"noise={df.fmt_float(args.noise)} seed={args.seed}"
    ]
    df.write_dataset(args.out, dataset, comments)
    print(f"wrote {args.out}: n={dataset.n} d={dataset.dim} m={dataset.m}")
    return 0


def _train_once(args, dataset, spec, ident, eps):
    model, _ = cls.train(
        dataset, spec, ident, args.bitsum, args.seed,
        eps_label=args.eps_label, budget=_budget(args, eps),
        message_level=args.message_level, **_bitsum_kwargs(args),
    )
    return model


def cmd_train(args) -> int:
    dataset = df.read_dataset(args.dataset)
    spec = lsq.LsqSpec(args.kernel, dataset.dim)
    ident = _resolve_i(args, dataset.dim)
    eps_list = args.eps if args.bitsum != bs.VARIANT_EXACT else [float("inf")]
    multi = len(eps_list) > 1
    for eps in eps_list:
        model = _train_once(args, dataset, spec, ident, eps)
        out = args.out
        if multi:
            base, ext = os.path.splitext(os.fspath(args.out))
            out = f"{base}_eps{eps:g}{ext}"
        cls.save_classifier(out, model)
        print(f"wrote {out}: m={model.m} I={model.I} bitsum={model.variant}")
    return 0


def cmd_classify(args) -> int:
    model = cls.load_classifier(args.model)
    dataset = df.read_dataset(args.dataset)
    preds = cls.classify_batch(model, dataset.vectors)
    accuracy, confusion = cls.evaluate(model, dataset.vectors, dataset.labels)

    # echo the trained model's configuration, not the (bare) classify flags
    echo = (f"{model.spec.kernel},{model.variant},,"
            f"{df.fmt_float(model.eps_label)},{args.seed}")
    rows = [
        f"{echo},{idx},{int(true) + 1},{int(pred) + 1}"
        for idx, (true, pred) in enumerate(zip(dataset.labels, preds))
    ]
    _write_csv(args.out, _ECHO_HEADER + ",index,true_class,predicted_class", rows)

    metric_rows = [f"{echo},accuracy,{df.fmt_float(accuracy)}"]
    for i in range(model.m):
        for j in range(model.m):
            metric_rows.append(f"{echo},confusion_{i + 1}_{j + 1},{confusion[i, j]}")
    _write_csv(_sibling(args.out, "_metrics.csv"),
               _ECHO_HEADER + ",metric,value", metric_rows)
    print(f"accuracy {accuracy:.6f} over {dataset.n} points")
    return 0


def cmd_decode(args) -> int:
    model = cls.load_classifier(args.model)
    vocab = df.read_vocab(args.vocab)
    classes = range(model.m) if args.cls is None else [args.cls - 1]
    rows = []
    for c in classes:
        ranking = cls.decode_class(model, c, vocab, args.top_k)
        for rank, (term, score) in enumerate(ranking, start=1):
            rows.append(f"{c + 1},{rank},{term},{df.fmt_float(score)}")
    _write_csv(args.out, "class,rank,term,score", rows)
    print(f"wrote {args.out}")
    return 0


def cmd_kde_eval(args) -> int:
    dataset = df.read_dataset(args.dataset)
    spec = lsq.LsqSpec(args.kernel, dataset.dim)
    ident = _resolve_i(args, dataset.dim)
    n = dataset.n
    qrng = rng_from(args.seed, "queries")
    take = qrng.choice(n, size=min(args.queries, n), replace=args.queries > n)
    queries = dataset.vectors[take]

    eps_list = args.eps if args.bitsum != bs.VARIANT_EXACT else [float("inf")]
    all_rows = []
    for eps in eps_list:
        if args.bitsum == bs.VARIANT_EXACT:
            cfg = bs.BitsumConfig(bs.VARIANT_EXACT, n)
        else:
            per = privacy.solve_per_instance(_budget(args, eps), spec.s, ident)
            cfg = bs.BitsumConfig(args.bitsum, n, eps0=per.eps0, delta0=per.delta0,
                                  **_bitsum_kwargs(args))
        report = protocol.empirical_suprmse(
            spec, ident, cfg, dataset.vectors, queries, args.trials,
            derive_seed(args.seed, "kde-eval"))
        bound = protocol.bound_suprmse(spec, ident, bs.rmse_theoretical(cfg), n)
        echo = _echo(args, eps)
        for qi, rmse in enumerate(report.per_query):
            all_rows.append(
                f"{echo},{ident},{qi},{df.fmt_float(rmse)},"
                f"{df.fmt_float(report.max_rmse)},{df.fmt_float(bound)}"
            )
        print(f"eps={eps:g}: empirical_max_rmse={report.max_rmse:.6g} "
              f"theoretical_bound={bound:.6g}")
    _write_csv(args.out, _ECHO_HEADER
               + ",I,query_index,empirical_rmse,empirical_max_rmse,theoretical_bound",
               all_rows)
    return 0


def cmd_meter(args) -> int:
    dataset = df.read_dataset(args.dataset)
    spec = lsq.LsqSpec(args.kernel, dataset.dim)
    ident = _resolve_i(args, dataset.dim)
    n = dataset.n
    eps = args.eps[0] if args.bitsum != bs.VARIANT_EXACT else float("inf")
    if args.bitsum == bs.VARIANT_EXACT:
        cfg = bs.BitsumConfig(bs.VARIANT_EXACT, n)
    else:
        per = privacy.solve_per_instance(_budget(args, eps), spec.s, ident)
        cfg = bs.BitsumConfig(args.bitsum, n, eps0=per.eps0, delta0=per.delta0,
                              **_bitsum_kwargs(args))
    init = protocol.init_protocol(spec, ident, n, cfg,
                                  public_seed=derive_seed(args.seed, "public"))
    _, meter = protocol.run_protocol(init, dataset.vectors,
                                     rng_from(args.seed, "private"),
                                     message_level=True)
    echo = _echo(args, eps)
    rows = [
        f"{echo},{u},{int(count)},{meter.bits_per_message}"
        for u, count in enumerate(meter.per_user_message_counts)
    ]
    _write_csv(args.out, _ECHO_HEADER + ",user_index,messages,bits_per_message", rows)

    metric_rows = [
        f"{echo},bits_per_message,{meter.bits_per_message}",
        f"{echo},total_messages,{meter.total_messages}",
        f"{echo},total_bits,{meter.total_bits}",
        f"{echo},mean_messages_per_user,{df.fmt_float(meter.mean_messages_per_user)}",
    ]
    _write_csv(_sibling(args.out, "_metrics.csv"),
               _ECHO_HEADER + ",metric,value", metric_rows)
    print(f"messages/user mean {meter.mean_messages_per_user:.3f}, "
          f"{meter.bits_per_message} bits/message, total {meter.total_bits} bits")
    return 0


def cmd_account(args) -> int:
    if args.s is not None:
        s = args.s
    elif args.kernel is not None and args.dim is not None:
        s = lsq.LsqSpec(args.kernel, args.dim).s
    else:
        raise errors.InvalidParam("account needs --s or both --kernel and --dim")
    if args.i is None:
        raise errors.InvalidParam("account needs --i")
    for eps in args.eps:
        delta = 0.0 if args.mode == privacy.MODE_PURE else args.delta
        budget = privacy.BudgetSpec(eps, delta, args.mode, eps_label=args.eps_label)
        print(privacy.total_budget_report(budget, s, args.i))
        print()
    return 0


def _add_common(p, dataset=True, bitsum=True, seed=True):
    if dataset:
        p.add_argument("--dataset", required=True, help="dataset file path")
    if bitsum:
        p.add_argument("--kernel", choices=lsq.KERNELS, default=lsq.KERNEL_GAUSSIAN)
        p.add_argument("--bitsum", choices=bs.VARIANTS, default=bs.VARIANT_3NB)
        p.add_argument("--i", type=int, default=None,
                       help="repetitions I (default: the data dimension)")
        p.add_argument("--eps", type=float, nargs="+", default=[1.0],
                       help="target epsilon value(s)")
        p.add_argument("--delta", type=float, default=1e-5)
        p.add_argument("--eps-label", type=float, default=float("inf"),
                       help="label randomized-response epsilon ('inf' disables flips)")
        p.add_argument("--mode", choices=(privacy.MODE_ADVANCED, privacy.MODE_PURE),
                       default=privacy.MODE_ADVANCED)
        p.add_argument("--p-rr", type=float, default=None,
                       help="override the RR flip probability")
        p.add_argument("--three-nb-c", type=float, default=0.2)
        p.add_argument("--rr-raw", action="store_true",
                       help="RR analyzer returns the raw (biased) count")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", required=True, help="output file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shufkde", description=__doc__)
    parser.add_argument("--config", default=None,
                        help="JSON file of flag defaults (explicit flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="generate a spherical-mixture dataset")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--separation", type=float, default=0.0,
                   help="minimum pairwise center angle in radians")
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_synth)

    p = sub.add_parser("train", help="train a per-class KDE classifier")
    _add_common(p)
    p.add_argument("--message-level", action="store_true",
                   help="simulate every envelope through the shuffler")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify a labeled test set")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("decode", help="rank vocabulary terms by class density")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--class", dest="cls", type=int, default=None,
                   help="1-based class to decode (default: all)")
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("kde-eval", help="empirical supRMSE vs the error bound")
    _add_common(p)
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_kde_eval)

    p = sub.add_parser("meter", help="message-level communication accounting")
    _add_common(p)
    p.set_defaults(func=cmd_meter)

    p = sub.add_parser("account", help="print the privacy accounting table")
    p.add_argument("--eps", type=float, nargs="+", required=True)
    p.add_argument("--delta", type=float, default=1e-5)
    p.add_argument("--eps-label", type=float, default=0.0)
    p.add_argument("--mode", choices=(privacy.MODE_ADVANCED, privacy.MODE_PURE),
                   default=privacy.MODE_ADVANCED)
    p.add_argument("--i", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--kernel", choices=lsq.KERNELS, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.set_defaults(func=cmd_account)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list):
    """Load --config JSON as subparser defaults; explicit flags override."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    path = argv[at + 1]
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise errors.FormatError(f"{path}: config must be a JSON object")
    defaults = {key.replace("-", "_"): value for key, value in doc.items()}
    for action in parser._subparsers._group_actions:  # noqa: SLF001
        for sp in action.choices.values():
            known = {a.dest for a in sp._actions}  # noqa: SLF001
            sp.set_defaults(**{k: v for k, v in defaults.items() if k in known})
            for a in sp._actions:  # noqa: SLF001 -- config satisfies "required"
                if a.dest in defaults:
                    a.required = False
    return argv[:at] + argv[at + 2:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except _PRIVACY_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
