"""annotate: plain text in, annotated-sentence JSON Lines out."""

from __future__ import annotations

import argparse
import sys

from sentence_adapter import ModelLoadError, annotate_to_jsonl, load_pipeline


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="annotate",
        description="Annotate plain text into sentence JSON Lines")
    parser.add_argument("--model", default="en_core_web_lg",
                        help="language model name")
    parser.add_argument("--in", dest="infile", default=None,
                        help="input text file (default: stdin)")
    parser.add_argument("--out", dest="outfile", default=None,
                        help="output JSONL file (default: stdout)")
    args = parser.parse_args(argv)
    try:
        nlp = load_pipeline(args.model)
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.infile:
            with open(args.infile, encoding="utf-8") as fh:
                lines = fh.readlines()
        else:
            lines = sys.stdin.readlines()
    except UnicodeDecodeError as exc:
        print(f"error: bad encoding at byte {exc.start}: {exc.reason}",
              file=sys.stderr)
        return 1
    if args.outfile:
        with open(args.outfile, "w", encoding="utf-8") as out:
            n = annotate_to_jsonl(lines, nlp, out)
    else:
        n = annotate_to_jsonl(lines, nlp, sys.stdout)
    print(f"annotated {n} sentences", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
