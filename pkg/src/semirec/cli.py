"""Command line front end.

Every report is emitted as deterministic JSON (sorted keys, two-space
indent) and embeds the resolved run configuration, so identical invocations
produce byte-identical output.  The ``kappa`` command prints CSV instead,
one row per word length.

Exit codes: 0 on success, 2 for invalid configuration (bad arguments,
malformed rationals, unknown examples, degenerate weights), 3 for exhausted
resources (word-tree budgets, bit-size caps, iteration caps).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

from .errors import (
    BitCapError,
    BudgetError,
    CoverageError,
    DegenerateProbabilityError,
    NonAffineError,
)
from .geometry import (
    Interval,
    IntervalSet,
    ball,
    format_rational,
    parse_rational,
)

_CONFIG_ERRORS = (
    ValueError,
    KeyError,
    CoverageError,
    NonAffineError,
    DegenerateProbabilityError,
)
_RESOURCE_ERRORS = (BudgetError, BitCapError)


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_set_spec(text: str) -> IntervalSet:
    """Parse a set specification.

    Pieces are separated by ';' and united.  Each piece is either
    ``lo,hi`` (a closed interval; equal endpoints give a point),
    a bracketed interval like ``[1/4,1/2)`` with open/closed ends,
    or ``ball:center:radius[:style]`` with style ``open`` or ``closed``.
    """
    parts = [p.strip() for p in text.split(";") if p.strip()]
    if not parts:
        raise ValueError(f"empty set specification {text!r}")
    acc = IntervalSet.empty()
    for part in parts:
        if part.startswith("ball:"):
            fields = part.split(":")
            if len(fields) not in (3, 4):
                raise ValueError(f"malformed ball specification {part!r}")
            style = fields[3] if len(fields) == 4 else "open"
            piece = ball(parse_rational(fields[1]), parse_rational(fields[2]), style=style)
        elif part[0] in "[(" and part[-1] in ")]":
            lo_closed = part[0] == "["
            hi_closed = part[-1] == "]"
            lo_text, sep, hi_text = part[1:-1].partition(",")
            if not sep:
                raise ValueError(f"malformed interval specification {part!r}")
            piece = IntervalSet.of(
                Interval(
                    parse_rational(lo_text.strip()),
                    parse_rational(hi_text.strip()),
                    lo_closed,
                    hi_closed,
                )
            )
        else:
            lo_text, sep, hi_text = part.partition(",")
            if not sep:
                raise ValueError(
                    f"malformed set piece {part!r}; expected lo,hi or a bracketed interval"
                )
            lo = parse_rational(lo_text.strip())
            hi = parse_rational(hi_text.strip())
            piece = IntervalSet.of(Interval(lo, hi, True, True))
        acc = acc.union(piece)
    return acc


def parse_measure_spec(text: str):
    from .measures import Measure

    if text == "lebesgue":
        return Measure.lebesgue()
    if text.startswith("dirac:"):
        return Measure.dirac(parse_rational(text[len("dirac:") :]))
    if text.startswith("density:"):
        weights = tuple(
            parse_rational(w) for w in text[len("density:") :].split(",") if w
        )
        return Measure.density(weights)
    raise ValueError(
        f"unknown measure {text!r}; expected lebesgue, dirac:POINT, or density:W1,W2,..."
    )


def _parse_probs(text: str | None, d: int) -> tuple[Fraction, ...]:
    if text is None:
        return tuple(Fraction(1, d) for _ in range(d))
    probs = tuple(parse_rational(p.strip()) for p in text.split(","))
    if len(probs) != d:
        raise ValueError(f"expected {d} probabilities, got {len(probs)}")
    return probs


def _parse_params(pairs: Sequence[str] | None) -> dict:
    params: dict[str, Any] = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"malformed parameter {pair!r}; expected key=value")
        key = key.strip()
        value = value.strip()
        if key == "depth":
            params[key] = int(value)
        else:
            params[key] = parse_rational(value)
    return params


def _parse_words(text: str) -> tuple[tuple[int, ...], ...]:
    words = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        words.append(tuple(int(v) for v in chunk.split(",")))
    if not words:
        raise ValueError(f"no words in {text!r}")
    return tuple(words)


def _build(args) -> tuple:
    from .catalogue import build_example

    return build_example(args.example, **_parse_params(getattr(args, "param", None)))


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _series_json(report) -> dict:
    return report.to_json()


# ---------------------------------------------------------------------------
# subcommand runners


def _run_list_examples(args) -> int:
    from .catalogue import list_examples

    _emit({"command": "list-examples", "examples": list_examples()})
    return 0


def _run_classify(args) -> int:
    from .classify import classify_chain_point, classify_map_point, classify_semigroup_point
    from .markov import MarkovChain
    from .semigroup import GeneratorSet

    gens = _build(args)
    x = parse_rational(args.x)
    eps = parse_rational(args.eps)
    branches = tuple(args.branches.split(",")) if args.branches else None
    threshold = parse_rational(args.threshold) if args.threshold else None

    config = {
        "example": args.example,
        "kind": args.kind,
        "x": format_rational(x),
        "eps": format_rational(eps),
        "horizon": args.horizon,
        "mode": args.mode,
    }
    if args.seed is not None:
        config["seed"] = args.seed
    if args.samples is not None:
        config["samples"] = args.samples

    if args.kind == "map":
        T = gens[args.generator - 1]
        config["generator"] = args.generator
        kwargs: dict[str, Any] = {}
        if branches:
            kwargs["branches"] = branches
        if args.grid:
            kwargs["grid"] = args.grid
        if args.mode != "exact":
            raise ValueError("map classification is exact only")
        verdict = classify_map_point(T, x, eps, args.horizon, **kwargs)
    else:
        probs = _parse_probs(args.probs, len(gens))
        config["probs"] = [format_rational(p) for p in probs]
        kwargs = {"mode": args.mode, "budget": args.budget}
        if branches:
            kwargs["branches"] = branches
        if args.grid:
            kwargs["grid"] = args.grid
        if threshold is not None:
            kwargs["threshold"] = threshold
        if args.seed is not None:
            kwargs["seed"] = args.seed
        if args.samples is not None:
            kwargs["samples"] = args.samples
        if args.kind == "chain":
            Q = MarkovChain(tuple(gens), probs)
            verdict = classify_chain_point(Q, x, eps, args.horizon, **kwargs)
        else:
            G = GeneratorSet(tuple(gens))
            verdict = classify_semigroup_point(G, probs, x, eps, args.horizon, **kwargs)

    _emit({"command": "classify", "config": config, "verdict": verdict.to_json()})
    return 0


def _run_series(args) -> int:
    from .markov import MarkovChain
    from .measures import (
        chain_return_sums,
        naive_generator_sums,
        naive_word_sums,
        poincare_partial_sums,
    )

    gens = _build(args)
    m = parse_measure_spec(args.measure)
    target = parse_set_spec(args.set)
    config = {
        "example": args.example,
        "flavor": args.flavor,
        "measure": args.measure,
        "set": target.to_json(),
        "n": args.n,
    }

    if args.flavor == "poincare":
        T = gens[args.generator - 1]
        config["generator"] = args.generator
        report = poincare_partial_sums(T, m, target, args.n)
        payload = {"command": "series", "config": config, "report": _series_json(report)}
    elif args.flavor == "chain-return":
        probs = _parse_probs(args.probs, len(gens))
        config["probs"] = [format_rational(p) for p in probs]
        Q = MarkovChain(tuple(gens), probs)
        report = chain_return_sums(Q, m, target, args.n, budget=args.budget)
        payload = {"command": "series", "config": config, "report": _series_json(report)}
    else:
        if args.sequence:
            sequence = tuple(int(v) for v in args.sequence.split(","))
            config["sequence"] = list(sequence)
            report = naive_word_sums(gens, sequence, m, target, args.n)
            payload = {
                "command": "series",
                "config": config,
                "report": _series_json(report),
            }
        else:
            result = naive_generator_sums(gens, m, target, args.n)
            payload = {
                "command": "series",
                "config": config,
                "per_generator": [_series_json(r) for r in result["per_generator"]],
                "combined": _series_json(result["combined"]),
            }
    _emit(payload)
    return 0


def _run_ulam(args) -> int:
    from .markov import MarkovChain
    from .measures import stationary_components, ulam_matrix

    gens = _build(args)
    probs = _parse_probs(args.probs, len(gens))
    Q = MarkovChain(tuple(gens), probs)
    matrix = ulam_matrix(Q, args.bins)
    components = stationary_components(matrix)
    if args.format == "text":
        print(matrix.to_text())
        for comp in components:
            weights = " ".join(format_rational(w) for w in comp.weights)
            print(f"component bins={list(comp.support)} weights= {weights}")
    else:
        _emit(
            {
                "command": "ulam",
                "config": {
                    "example": args.example,
                    "bins": args.bins,
                    "probs": [format_rational(p) for p in probs],
                },
                "matrix": matrix.to_json(),
                "components": [comp.to_json() for comp in components],
            }
        )
    return 0


def _run_kappa(args) -> int:
    from .semigroup import GeneratorSet, kappa_csv, kappa_sequence

    gens = _build(args)
    G = GeneratorSet(tuple(gens))
    target = parse_set_spec(args.set)
    rows = kappa_sequence(G, parse_rational(args.x), target, args.n, budget=args.budget)
    print(kappa_csv(rows))
    return 0


def _run_r_function(args) -> int:
    from .classify import r_function

    gens = _build(args)
    T = gens[args.generator - 1]
    lo, hi = r_function(T, parse_rational(args.x), args.horizon, parse_rational(args.r_tol))
    _emit(
        {
            "command": "r-function",
            "config": {
                "example": args.example,
                "generator": args.generator,
                "x": args.x,
                "horizon": args.horizon,
                "r_tol": args.r_tol,
            },
            "bracket": {"lo": format_rational(lo), "hi": format_rational(hi)},
        }
    )
    return 0


def _run_rebase(args) -> int:
    from .semigroup import GeneratorSet, rebase_generators

    gens = _build(args)
    probs = _parse_probs(args.probs, len(gens))
    words = _parse_words(args.words)
    G = GeneratorSet(tuple(gens))
    rebased, weights = rebase_generators(G, probs, words)
    _emit(
        {
            "command": "rebase",
            "config": {
                "example": args.example,
                "probs": [format_rational(p) for p in probs],
                "words": [list(w) for w in words],
            },
            "labels": list(rebased.labels),
            "weights": [format_rational(w) for w in weights],
            "pieces": [len(T.pieces) for T in rebased.generators],
        }
    )
    return 0


def _run_lemma_l1(args) -> int:
    from .combinatorics import MultivaluedMap, l1_exhaustive, l1_search

    if args.exhaustive is not None:
        result = l1_exhaustive(args.exhaustive)
        _emit({"command": "lemma-l1", "config": {"exhaustive": args.exhaustive}, **result})
        return 0
    if not args.maps:
        raise ValueError("provide either --exhaustive M or --maps SPEC")
    sets = []
    for chunk in args.maps.split(";"):
        chunk = chunk.strip()
        sets.append(tuple(int(v) for v in chunk.split(",") if v))
    G = MultivaluedMap.from_sets(len(sets), sets)
    w, n = l1_search(G)
    _emit(
        {
            "command": "lemma-l1",
            "config": {"maps": args.maps},
            "witness": w,
            "time": n,
        }
    )
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _add_example_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--example", required=True, help="catalogue entry name")
    p.add_argument(
        "--param",
        action="append",
        metavar="KEY=VALUE",
        help="construction parameter (repeatable), e.g. depth=12 or a=5/4",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semirec",
        description="exact recurrence analysis for finitely generated semigroups of interval maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-examples", help="show the example catalogue")
    p.set_defaults(func=_run_list_examples)

    p = sub.add_parser("classify", help="classify one point's recurrence behavior")
    _add_example_arg(p)
    p.add_argument("--kind", choices=("map", "chain", "semigroup"), default="map")
    p.add_argument("--generator", type=int, default=1, help="1-based index (map kind)")
    p.add_argument("--x", required=True, help="base point, as p/q")
    p.add_argument("--eps", required=True, help="ball radius, as p/q")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--probs", help="comma-separated weights (chain/semigroup)")
    p.add_argument("--threshold", help="uniform-recurrence mass threshold, as p/q")
    p.add_argument("--grid", type=int, help="sample grid size for weak-uniform scans")
    p.add_argument(
        "--branches",
        help="comma-separated subset of recurrent,weak,uniform,weak_uniform",
    )
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--budget", type=int, default=10**6, help="word-tree atom budget")
    p.set_defaults(func=_run_classify)

    p = sub.add_parser("series", help="partial sums of return series")
    series_sub = p.add_subparsers(dest="flavor", required=True)
    for flavor in ("poincare", "chain-return", "naive"):
        q = series_sub.add_parser(flavor)
        _add_example_arg(q)
        q.add_argument("--measure", required=True, help="lebesgue | dirac:P | density:W1,...")
        q.add_argument("--set", required=True, help="target set, e.g. 0,0 or [1/4,1/2)")
        q.add_argument("--n", type=int, required=True, help="horizon")
        if flavor == "poincare":
            q.add_argument("--generator", type=int, default=1)
        if flavor == "chain-return":
            q.add_argument("--probs")
            q.add_argument("--budget", type=int, default=10**6)
        if flavor == "naive":
            q.add_argument(
                "--sequence",
                help="comma-separated 1-based letters, cycled to the horizon",
            )
        q.set_defaults(func=_run_series, flavor=flavor)

    p = sub.add_parser("ulam", help="bin-discretized transition matrix and its components")
    _add_example_arg(p)
    p.add_argument("--bins", type=int, required=True, help="bin count of the form 2^a 3^b")
    p.add_argument("--probs")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=_run_ulam)

    p = sub.add_parser("kappa", help="returning-word fractions as CSV")
    _add_example_arg(p)
    p.add_argument("--x", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=10**6)
    p.set_defaults(func=_run_kappa)

    p = sub.add_parser("r-function", help="bracket the largest self-avoiding ball radius")
    _add_example_arg(p)
    p.add_argument("--generator", type=int, default=1)
    p.add_argument("--x", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--r-tol", required=True, help="bracket width tolerance, as p/q")
    p.set_defaults(func=_run_r_function)

    p = sub.add_parser("rebase", help="replace generators by a finite set of words")
    _add_example_arg(p)
    p.add_argument("--probs")
    p.add_argument(
        "--words",
        required=True,
        help="semicolon-separated words of comma-separated 1-based letters, e.g. 1,2;2,1",
    )
    p.set_defaults(func=_run_rebase)

    p = sub.add_parser("lemma-l1", help="finite multivalued-map recurrence search")
    p.add_argument("--exhaustive", type=int, metavar="M", help="sweep all instances on M elements")
    p.add_argument(
        "--maps",
        help="semicolon-separated image sets, e.g. 2;1,3;3 for G(1)={2}, G(2)={1,3}, G(3)={3}",
    )
    p.set_defaults(func=_run_lemma_l1)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _RESOURCE_ERRORS as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except _CONFIG_ERRORS as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
