"""embed-prep command line: export shufkde-format data files.

Subcommands:
  embed-corpus  embed a 'label<TAB>text' corpus into a dataset file
  embed-vocab   embed a term list (one term per line) into a vocabulary file
  make-sample   write a generated four-topic English corpus and term list
"""

from __future__ import annotations

import argparse
import sys

from .pipeline import EmbedJob, embed_corpus, embed_vocab
from .sample import generate_corpus, topic_terms


def cmd_embed_corpus(args) -> int:
    summary = embed_corpus(EmbedJob(args.corpus, args.encoder, args.out))
    print(f"wrote {args.out}: n={summary['n']} d={summary['d']} m={summary['m']} "
          f"classes={','.join(summary['classes'])}")
    return 0


def cmd_embed_vocab(args) -> int:
    with open(args.terms, "r", encoding="utf-8") as fh:
        terms = [line.strip() for line in fh if line.strip()]
    summary = embed_vocab(terms, args.encoder, args.out)
    print(f"wrote {args.out}: {summary['terms']} terms, d={summary['d']}")
    return 0


def cmd_make_sample(args) -> int:
    labels, sentences = generate_corpus(args.per_topic, args.seed)
    with open(args.out_corpus, "w", encoding="utf-8") as fh:
        for label, sentence in zip(labels, sentences):
            fh.write(f"{label}\t{sentence}\n")
    terms = sorted({t for bank in topic_terms().values() for t in bank})
    with open(args.out_terms, "w", encoding="utf-8") as fh:
        fh.write("\n".join(terms) + "\n")
    print(f"wrote {args.out_corpus} ({len(labels)} records) and "
          f"{args.out_terms} ({len(terms)} terms)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embed-prep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed-corpus")
    p.add_argument("--corpus", required=True, help="label<TAB>text file")
    p.add_argument("--encoder", default="hash:64",
                   help="hash:<d> or sentence-transformers:<model>")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed_corpus)

    p = sub.add_parser("embed-vocab")
    p.add_argument("--terms", required=True, help="one term per line")
    p.add_argument("--encoder", default="hash:64")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed_vocab)

    p = sub.add_parser("make-sample")
    p.add_argument("--per-topic", type=int, default=250)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-corpus", required=True)
    p.add_argument("--out-terms", required=True)
    p.set_defaults(func=cmd_make_sample)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
