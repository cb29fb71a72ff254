"""Command line interface.

Subcommands cover the full pipeline: training the token classifier,
parsing annotated sentences, populating and querying a store, extraction
reports and the learning service.  Multi-line outputs are sorted so runs
are reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys

from hedges import alpha
from hedges.alpha import FEATURE_SETS, Forest, TrainParams, train_forest
from hedges.beta import parse_sentence
from hedges.config import Config, load_config
from hedges.coref import coref_sets, resolve_seeds, seed_concepts
from hedges.edges import (
    Atom,
    NotationError,
    TypeViolation,
    parse_notation,
    to_string,
)
from hedges.inference import (
    build_conflict_network,
    detect_factions,
    extract_oie,
    find_claims,
    find_conflicts,
)
from hedges.learning import GeneralizationConfig, mine_patterns
from hedges.patterns import (
    apply_rule,
    load_rules,
    match,
    parse_pattern,
    pattern_to_string,
)
from hedges.store import Store


class CliError(Exception):
    pass


def _common_options(parser: argparse.ArgumentParser):
    parser.add_argument("--store", help="store file path "
                        "(SHG_STORE overrides)")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--features", choices=sorted(FEATURE_SETS),
                        help="feature set name")
    parser.add_argument("--rules", action="append", default=None,
                        help="rule file (repeatable)")
    parser.add_argument("--theta", type=float, help="coreference p threshold")
    parser.add_argument("--theta-prime", type=float,
                        help="coreference degree-ratio threshold")
    parser.add_argument("--port", type=int, help="service port")
    parser.add_argument("--seed", type=int, help="random seed")


def _config_from(args) -> Config:
    overrides = {
        "store": args.store,
        "features": args.features,
        "rules": args.rules,
        "theta": args.theta,
        "theta_prime": args.theta_prime,
        "port": args.port,
        "seed": args.seed,
    }
    return load_config(args.config, overrides)


def _load_store(config: Config, required: bool = True) -> Store:
    if config.store is None:
        if required:
            raise CliError("no store given (use --store or SHG_STORE)")
        return Store()
    try:
        return Store.load(config.store)
    except FileNotFoundError:
        if required:
            raise CliError(f"store not found: {config.store}")
        return Store()


def _read_edges(path: str):
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                edges.append(parse_notation(line))
            except NotationError as exc:
                raise CliError(f"{path}:{lineno}: {exc}") from None
    return edges


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedges",
        description="Typed recursive hyperedge toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-alpha", help="train the token classifier")
    _common_options(p)
    p.add_argument("--data", required=True, help="labeled JSONL corpus")
    p.add_argument("--out", required=True, help="forest output file")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--no-bootstrap", action="store_true")

    p = sub.add_parser("parse", help="annotated sentences to edges")
    _common_options(p)
    p.add_argument("--forest", required=True)
    p.add_argument("--in", dest="infile", required=True,
                   help="annotated-sentence JSONL")

    p = sub.add_parser("add", help="add notation lines to a store")
    _common_options(p)
    p.add_argument("--in", dest="infile", required=True)

    p = sub.add_parser("match", help="match a pattern against the store")
    _common_options(p)
    p.add_argument("--pattern", required=True)
    p.add_argument("--bindings", action="store_true",
                   help="print JSON bindings instead of edges")

    p = sub.add_parser("rules", help="apply rewrite rules to the store")
    _common_options(p)
    p.add_argument("--add", action="store_true",
                   help="store the inferred edges")

    p = sub.add_parser("oie", help="relation tuples from edges")
    _common_options(p)
    p.add_argument("--in", dest="infile", default=None,
                   help="notation lines (default: the store)")

    p = sub.add_parser("claims", help="attributable claims in the store")
    _common_options(p)

    p = sub.add_parser("conflicts", help="expressions of conflict")
    _common_options(p)

    p = sub.add_parser("coref", help="coreference report")
    _common_options(p)
    p.add_argument("--seed-concept", default=None,
                   help="restrict the report to one seed (notation)")
    p.add_argument("--json", action="store_true", help="JSON Lines output")

    p = sub.add_parser("metrics", help="degree metrics for an edge")
    _common_options(p)
    p.add_argument("--edge", required=True)

    p = sub.add_parser("mine", help="frequent generalized patterns")
    _common_options(p)
    p.add_argument("--max-depth", type=int, default=2)
    p.add_argument("--top", type=int, default=50)

    p = sub.add_parser("factions", help="two-faction split of conflicts")
    _common_options(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    _common_options(p)
    p.add_argument("--bind", default=None)

    return parser


def cmd_train_alpha(args, config: Config, out) -> int:
    dataset = alpha.load_jsonl(args.data)
    labeled = [(s, l) for s, l in dataset if l is not None]
    if not labeled:
        raise CliError(f"{args.data}: no labeled sentences")
    fs = FEATURE_SETS[config.features]
    params = TrainParams(n_trees=args.trees, max_depth=args.max_depth,
                         bootstrap=not args.no_bootstrap,
                         seed=config.seed or 0)
    forest = train_forest(labeled, fs, params)
    forest.save(args.out)
    print(f"trained {args.trees} trees on {len(labeled)} sentences "
          f"({sum(len(s.tokens) for s, _ in labeled)} tokens) -> {args.out}",
          file=out)
    return 0


def cmd_parse(args, config: Config, out) -> int:
    forest = Forest.load(args.forest)
    for sentence, _ in alpha.load_jsonl(args.infile):
        edge, aux = parse_sentence(sentence, forest)
        print(to_string(edge), file=out)
        for lemma_edge in aux:
            print("\t" + to_string(lemma_edge), file=out)
    return 0


def cmd_add(args, config: Config, out) -> int:
    if config.store is None:
        raise CliError("no store given (use --store or SHG_STORE)")
    store = _load_store(config, required=False)
    edges = _read_edges(args.infile)
    for edge in edges:
        store.add(edge)
    store.save(config.store)
    print(f"added {len(edges)} edges ({len(store)} total) -> {config.store}",
          file=out)
    return 0


def cmd_match(args, config: Config, out) -> int:
    store = _load_store(config)
    pattern = parse_pattern(args.pattern)
    for edge in sorted(store.edges(), key=to_string):
        bindings = match(edge, pattern)
        if not bindings:
            continue
        if args.bindings:
            for b in bindings:
                payload = {"edge": to_string(edge),
                           "binding": {k: _binding_value(v)
                                       for k, v in b.items()}}
                print(json.dumps(payload, sort_keys=True), file=out)
        else:
            print(to_string(edge), file=out)
    return 0


def _binding_value(value):
    if isinstance(value, tuple):
        return [to_string(v) for v in value]
    return to_string(value)


def cmd_rules(args, config: Config, out) -> int:
    if not config.rules:
        raise CliError("no rule files given (use --rules)")
    store = _load_store(config)
    rules = []
    for path in config.rules:
        rules.extend(load_rules(path))
    inferred = []
    seen = set()
    for edge in store.edges():
        for rule in rules:
            for derived in apply_rule(edge, rule):
                if derived not in seen:
                    seen.add(derived)
                    inferred.append(derived)
    for derived in sorted(inferred, key=to_string):
        print(to_string(derived), file=out)
    if args.add and config.store:
        for derived in inferred:
            store.add(derived)
        store.save(config.store)
    return 0


def cmd_oie(args, config: Config, out) -> int:
    if args.infile:
        edges = _read_edges(args.infile)
        store = None
    else:
        store = _load_store(config)
        edges = list(store.edges())
    lines = []
    for edge in edges:
        for t in extract_oie(edge, store):
            lines.append(t.render())
    for line in sorted(set(lines)):
        print(line, file=out)
    return 0


def cmd_claims(args, config: Config, out) -> int:
    store = _load_store(config)
    for claim in find_claims(store, config.claim_lemmas):
        payload = {
            "actor": to_string(claim.actor),
            "predicate": to_string(claim.predicate),
            "claim": to_string(claim.claim),
            "contexts": [to_string(c) for c in claim.contexts],
            "specifications": [to_string(s) for s in claim.specifications],
            "tense": claim.tense,
            "negated": claim.negated,
        }
        print(json.dumps(payload, sort_keys=True), file=out)
    return 0


def cmd_conflicts(args, config: Config, out) -> int:
    store = _load_store(config)
    for conflict in find_conflicts(store, config.conflict_lemmas):
        payload = {
            "source": to_string(conflict.source),
            "target": to_string(conflict.target),
            "topic": to_string(conflict.topic),
            "trigger": conflict.trigger_root,
        }
        print(json.dumps(payload, sort_keys=True), file=out)
    return 0


def _coref_payload(store, seed, sets, assignment) -> dict:
    return {
        "seed": to_string(seed),
        "sets": [{"members": [to_string(m) for m in s.members],
                  "total_degree": s.total_degree,
                  "p": round(s.p, 6),
                  "label": to_string(s.label)} for s in sets],
        "assigned": to_string(assignment.assigned.label)
        if assignment.assigned else None,
        "p": round(assignment.p, 6),
        "ratio": round(assignment.ratio, 6),
    }


def cmd_coref(args, config: Config, out) -> int:
    store = _load_store(config)
    if args.seed_concept:
        seed = parse_notation(args.seed_concept)
        if not isinstance(seed, Atom):
            raise CliError("--seed-concept must be an atom")
        sets = coref_sets(store, seed)
        from hedges.coref import assign_seed
        reports = [(seed, sets, assign_seed(store, seed, sets, config.theta,
                                            config.theta_prime))]
    else:
        reports = resolve_seeds(store, config.theta, config.theta_prime)
    for seed, sets, assignment in reports:
        if args.json:
            print(json.dumps(_coref_payload(store, seed, sets, assignment),
                             sort_keys=True), file=out)
        else:
            print(f"seed {to_string(seed)}", file=out)
            for s in sets:
                members = ", ".join(to_string(m) for m in s.members)
                print(f"  p={s.p:.3f} degree={s.total_degree} "
                      f"label={to_string(s.label)}: {members}", file=out)
            if assignment.assigned is not None:
                print(f"  assigned -> {to_string(assignment.assigned.label)}",
                      file=out)
            else:
                print(f"  unassigned (p={assignment.p:.3f}, "
                      f"ratio={assignment.ratio:.3f})", file=out)
    return 0


def cmd_metrics(args, config: Config, out) -> int:
    store = _load_store(config)
    edge = parse_notation(args.edge)
    print(f"degree {store.degree(edge)}", file=out)
    print(f"deep-degree {store.deep_degree(edge)}", file=out)
    print(f"neighborhood {len(store.neighborhood(edge))}", file=out)
    return 0


def cmd_mine(args, config: Config, out) -> int:
    store = _load_store(config)
    mining = GeneralizationConfig(max_depth=args.max_depth)
    for pattern, count in mine_patterns(store, mining)[:args.top]:
        print(f"{count}\t{pattern_to_string(pattern)}", file=out)
    return 0


def cmd_factions(args, config: Config, out) -> int:
    store = _load_store(config)
    conflicts = find_conflicts(store, config.conflict_lemmas)
    if not conflicts:
        raise CliError("no conflicts found in the store")
    net = build_conflict_network(conflicts)
    a, b, unassigned = detect_factions(net)
    for name, members in (("A", a), ("B", b), ("unassigned", unassigned)):
        print(f"{name}: {' '.join(sorted(members))}", file=out)
    return 0


def cmd_serve(args, config: Config, out) -> int:
    import uvicorn

    from hedges.service import create_app

    if args.bind:
        config.bind = args.bind
    app = create_app(config)
    print(f"serving on {config.bind}:{config.port}", file=out)
    uvicorn.run(app, host=config.bind, port=config.port, log_level="warning")
    return 0


_COMMANDS = {
    "train-alpha": cmd_train_alpha,
    "parse": cmd_parse,
    "add": cmd_add,
    "match": cmd_match,
    "rules": cmd_rules,
    "oie": cmd_oie,
    "claims": cmd_claims,
    "conflicts": cmd_conflicts,
    "coref": cmd_coref,
    "metrics": cmd_metrics,
    "mine": cmd_mine,
    "factions": cmd_factions,
    "serve": cmd_serve,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from(args)
        return _COMMANDS[args.command](args, config, out)
    except (CliError, NotationError, TypeViolation, ValueError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
