"""Command-line front door.

Subcommands cover divisibility queries, equivariant reduction and
completion, chain stabilization, and the hierarchical-model tools.  All
outputs are byte-deterministic for a fixed invocation: exit 0 on success,
2 when an explicit resource cap cut the computation short, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from .core import (
    ParseError,
    Polynomial,
    format_polynomial,
    parse_polynomial,
)
from .divisibility import pi_divides, pi_divides_diagonal
from .gb import (
    CompletionLimits,
    CompletionStatus,
    GeneratorSet,
    equivariant_buchberger,
    reduce as reduce_modulo,
)
from .chains import Chain, TruncatedIdeal, detect_stabilization, orbit_generators, truncation_oracle_check
from .models import (
    ResourceLimitError,
    TableShape,
    design_matrix,
    hierarchical_chain,
    independent_set_instance,
    load_model,
    markov_basis,
    verify_markov_fibers,
)
from . import selftest

__all__ = ["JobConfig", "run", "main"]


@dataclass
class JobConfig:
    subcommand: str
    args: dict = field(default_factory=dict)
    output: Optional[str] = None
    as_json: bool = False
    seed: int = 0


def _emit(config: JobConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _load_generators(path: str, ring_width: Optional[int]) -> GeneratorSet:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        width = int(data.get("ring_width", ring_width or 0))
        texts = data["generators"]
    else:
        width = ring_width or 0
        texts = data
    if ring_width:
        width = ring_width
    if width < 1:
        raise ValueError("ring width missing: pass --ring or put ring_width in the file")
    return GeneratorSet.make(width, [parse_polynomial(t, width) for t in texts])


def _single_monomial(text: str, ring_width: Optional[int]):
    f = parse_polynomial(text, ring_width)
    lead = f.leading
    if f.num_terms() != 1 or lead.coeff != 1:
        raise ValueError(f"expected a single monomial, got {format_polynomial(f)}")
    return lead.mono


def _cmd_divides(config: JobConfig) -> int:
    a = _single_monomial(config.args["a"], config.args.get("ring"))
    b = _single_monomial(config.args["b"], config.args.get("ring"))
    decide = pi_divides_diagonal if config.args["diagonal"] else pi_divides
    witness = decide(a, b)
    if witness is None:
        _emit(config, "NO")
        return 0
    span = max(a.max_col(), a.max_row() if config.args["diagonal"] else 0)
    shown = witness.shift.describe(span) if span else "id"
    _emit(config, f"pi: {shown}; cofactor: {witness.cofactor}")
    return 0


def _cmd_reduce(config: JobConfig) -> int:
    gens = _load_generators(config.args["gens"], config.args.get("ring"))
    f = parse_polynomial(config.args["poly"], gens.ring_width)
    trace = reduce_modulo(f, gens, full=not config.args["head_only"])
    if config.as_json:
        payload = {
            "remainder": format_polynomial(trace.remainder),
            "steps": [
                {
                    "coeff": str(s.coeff),
                    "cofactor": str(s.cofactor),
                    "shift": s.shift.describe(),
                    "generator": s.gen_index,
                }
                for s in trace.steps
            ],
        }
        _emit(config, _dump(payload))
    else:
        _emit(
            config,
            f"remainder: {format_polynomial(trace.remainder)}\nsteps: {len(trace.steps)}",
        )
    return 0


def _cmd_gb(config: JobConfig) -> int:
    gens = _load_generators(config.args["gens"], config.args.get("ring"))
    limits = CompletionLimits(
        max_width=config.args["max_width"],
        max_degree=config.args["max_degree"],
        max_passes=config.args["max_passes"],
    )
    result = equivariant_buchberger(gens, limits)
    payload = {
        "ring_width": gens.ring_width,
        "generators": [format_polynomial(g) for g in gens.gens],
        "status": result.status.value,
        "basis": [format_polynomial(g) for g in result.basis.gens],
    }
    certify_ok = True
    if config.args["certify"]:
        cert = {}
        for n in config.args["certify"]:
            cert[str(n)] = truncation_oracle_check(result.basis, gens, n)
        certify_ok = all(cert.values())
        payload["certificate"] = {"levels": cert, "passed": certify_ok}
    _emit(config, _dump(payload))
    if result.status is CompletionStatus.LIMIT_EXCEEDED:
        return 2
    return 0 if certify_ok else 1


def _cmd_chain_stabilize(config: JobConfig) -> int:
    n_max = config.args["n_max"]
    if config.args.get("gens"):
        gens = _load_generators(config.args["gens"], config.args.get("ring"))
        width = max(g.max_col() for g in gens.gens)

        def provider(n: int) -> TruncatedIdeal:
            seed = TruncatedIdeal.make(
                min(width, n), gens.ring_width, [g for g in gens.gens if g.max_col() <= n]
            )
            return orbit_generators(seed, n)

        chain = Chain(provider, invariance="Pi", name="orbit chain")
    else:
        cx, dims = load_model(config.args["model"])
        growing = [i + 1 for i, d in enumerate(dims) if d is None]
        if len(growing) != 1:
            raise ValueError("chain models need exactly one growing dimension (null or \"n\")")
        chain = hierarchical_chain(cx, dims, growing[0])
    report = detect_stabilization(chain, n_max)
    _emit(config, _dump(report.to_json()))
    return 0


def _cmd_model_matrix(config: JobConfig) -> int:
    cx, dims = load_model(config.args["model"])
    if any(d is None for d in dims):
        raise ValueError("model-matrix needs all dimensions fixed")
    A = design_matrix(cx, TableShape.make(dims))
    lines = [",".join(str(v) for v in row) for row in A.rows]
    _emit(config, "\n".join(lines))
    return 0


def _format_move_table(table: Sequence[int], shape: TableShape) -> str:
    dims = shape.dims
    if len(dims) == 1:
        return "  " + " ".join(f"{v:3d}" for v in table)
    if len(dims) == 2:
        rows = []
        for i in range(dims[0]):
            row = table[i * dims[1] : (i + 1) * dims[1]]
            rows.append("  " + " ".join(f"{v:3d}" for v in row))
        return "\n".join(rows)
    # higher-way tables: one 2-way slice per tail index combination
    block = dims[0] * dims[1]
    tail_shape = TableShape.make(dims[2:])
    chunks = []
    stride = shape.size // block
    for t_idx, tail in enumerate(tail_shape.cells):
        label = ",".join(str(v) for v in tail)
        lines = [f"  slice [:,:,{label}]"]
        for i in range(dims[0]):
            vals = [
                table[shape.index[(i + 1, j + 1) + tail]] for j in range(dims[1])
            ]
            lines.append("    " + " ".join(f"{v:3d}" for v in vals))
        chunks.append("\n".join(lines))
    return "\n".join(chunks)


def _cmd_markov(config: JobConfig) -> int:
    cx, dims = load_model(config.args["model"])
    if any(d is None for d in dims):
        raise ValueError("markov needs all dimensions fixed")
    shape = TableShape.make(dims)
    moves = markov_basis(cx, shape)
    verified = None
    if config.args["verify"]:
        A = design_matrix(cx, shape)
        verified = verify_markov_fibers(A, moves, config.args["sum_bound"])
    if config.as_json:
        payload = {
            "dims": list(shape.dims),
            "facets": [list(f) for f in cx.facets],
            "num_moves": len(moves),
            "num_moves_signed": 2 * len(moves),
            "moves": [list(mv.table) for mv in moves],
        }
        if verified is not None:
            payload["verified"] = verified
            payload["sum_bound"] = config.args["sum_bound"]
        _emit(config, _dump(payload))
    else:
        lines = [f"{2 * len(moves)} moves (counting both signs)"]
        for k, mv in enumerate(moves, start=1):
            lines.append(f"move {k}:")
            lines.append(_format_move_table(mv.table, shape))
        if verified is not None:
            lines.append(
                f"fiber check (sum <= {config.args['sum_bound']}): "
                + ("connected" if verified else "DISCONNECTED")
            )
        _emit(config, "\n".join(lines))
    if verified is False:
        return 1
    return 0


def _cmd_independent_set(config: JobConfig) -> int:
    cx, dims = load_model(config.args["model"])
    T = config.args["T"]
    report = independent_set_instance(cx, T, dims, config.args["n_max"])
    _emit(config, _dump(report.to_json()))
    return 0


def _cmd_check(config: JobConfig) -> int:
    seed = config.seed
    trials = config.args["trials"]
    suites = [
        ("order axioms", lambda: selftest.check_order_axioms(trials, seed)),
        ("divisibility oracle", lambda: selftest.check_divisibility_oracle(trials, seed)),
        ("good sequences", lambda: selftest.check_good_sequences(max(10, trials // 100), 200, seed)),
        ("witness composition", lambda: selftest.check_witness_composition(trials // 5 or 1, seed)),
    ]
    lines = []
    failed = False
    for name, fn in suites:
        bad = fn()
        lines.append(f"{'PASS' if not bad else 'FAIL'} {name}")
        for msg in bad[:5]:
            lines.append(f"  {msg}")
        failed = failed or bool(bad)
    _emit(config, "\n".join(lines))
    return 1 if failed else 0


_COMMANDS = {
    "divides": _cmd_divides,
    "reduce": _cmd_reduce,
    "gb": _cmd_gb,
    "chain-stabilize": _cmd_chain_stabilize,
    "model-matrix": _cmd_model_matrix,
    "markov": _cmd_markov,
    "independent-set": _cmd_independent_set,
    "check": _cmd_check,
}


def run(config: JobConfig) -> int:
    """Dispatch a parsed job; returns the process exit code."""
    try:
        return _COMMANDS[config.subcommand](config)
    except ResourceLimitError as exc:
        sys.stderr.write(f"resource limit: {exc}\n")
        return 2
    except (ParseError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftgb",
        description="Equivariant Groebner bases and Markov bases of hierarchical models",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("divides", help="decide shift-divisibility of two monomials")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--diagonal", action="store_true", help="shift both indices")
    p.add_argument("--ring", type=int, default=None, help="ring width for validation")

    p = sub.add_parser("reduce", help="divide a polynomial by a generator file")
    p.add_argument("--ring", type=int, default=None)
    p.add_argument("--gens", required=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--head-only", action="store_true", help="stop at the first stuck head")
    p.add_argument("--json", action="store_true")
    p.add_argument("--output")

    p = sub.add_parser("gb", help="equivariant completion of a generator file")
    p.add_argument("--ring", type=int, default=None)
    p.add_argument("--gens", required=True)
    p.add_argument("--max-width", type=int, default=8)
    p.add_argument("--max-degree", type=int, default=8)
    p.add_argument("--max-passes", type=int, default=8)
    p.add_argument("--certify", default=None, help="comma-separated truncation levels")
    p.add_argument("--output")

    p = sub.add_parser("chain-stabilize", help="detect stabilization of an ideal chain")
    p.add_argument("--model", default=None, help="model file with one growing dimension")
    p.add_argument("--gens", default=None, help="generator file: use its orbit chain")
    p.add_argument("--orbit", action="store_true", help="with --gens (orbit chain)")
    p.add_argument("--ring", type=int, default=None)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--output")

    p = sub.add_parser("model-matrix", help="print the design matrix as integer CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--output")

    p = sub.add_parser("markov", help="Markov basis of a hierarchical model")
    p.add_argument("--model", required=True)
    p.add_argument("--verify", action="store_true", help="exhaustive fiber connectivity")
    p.add_argument("--sum-bound", type=int, default=4)
    p.add_argument("--json", action="store_true")
    p.add_argument("--output")

    p = sub.add_parser("independent-set", help="diagonal-action stabilization report")
    p.add_argument("--model", required=True)
    p.add_argument("--T", required=True, help="comma-separated vertex list, e.g. 2,4,6")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--output")

    p = sub.add_parser("check", help="run the randomized invariant suites")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--output")

    return parser


def _config_from_args(ns: argparse.Namespace) -> JobConfig:
    args = vars(ns).copy()
    sub = args.pop("subcommand")
    seed = args.pop("seed", 0)
    output = args.pop("output", None)
    as_json = args.pop("json", False)
    if sub == "divides":
        pass
    if sub == "gb" and args.get("certify"):
        args["certify"] = [int(x) for x in str(args["certify"]).split(",") if x]
    elif sub == "gb":
        args["certify"] = []
    if sub == "chain-stabilize":
        if bool(args.get("model")) == bool(args.get("gens")):
            raise ValueError("chain-stabilize needs exactly one of --model or --gens")
    if sub == "independent-set":
        args["T"] = [int(x) for x in str(args["T"]).split(",") if x]
    return JobConfig(subcommand=sub, args=args, output=output, as_json=as_json, seed=seed)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        config = _config_from_args(ns)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
