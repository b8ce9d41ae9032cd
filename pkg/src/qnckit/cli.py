"""Command-line front end: state ingestion, all computations, and
figure-data emission.

State files are JSON objects {"dims": [n_A, n_B], "matrix": [[re, im], ...]}
with the matrix row-major.  Structured results are printed as JSON; surface
data is written as CSV.  Angles are radians.  Exit codes: 0 success, 2
invalid input, 3 numerical contract violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .characteristic import char_surface, schmidt_pure_state, surface_to_csv
from .entanglement import (
    OptimizerConfig,
    entanglement_E,
    entanglement_Es,
    entanglement_result_to_dict,
    entropy_result_to_dict,
)
from .matrix_core import ContractViolation, DensityMatrix, trace_norm
from .steering import (
    cloud_to_csv,
    main_normal_constancy,
    polytope_state,
    steering_cloud,
    steering_surface,
    surface_to_csv as steering_surface_to_csv,
)
from .strength import IntegratorConfig, result_to_dict, strength, strength_directed
from .tomography import (
    conditional_oracle_from_state,
    oracle_from_state,
    reconstruct_bipartite,
    reconstruct_state,
)


class CliInputError(ValueError):
    """Invalid user input (exit code 2)."""


def load_state(path: str) -> DensityMatrix:
    """Parse and validate a state file, naming any violated invariant."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliInputError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliInputError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict) or "dims" not in data or "matrix" not in data:
        raise CliInputError(f"state file {path} must contain 'dims' and 'matrix'")
    dims = data["dims"]
    if (
        not isinstance(dims, list)
        or len(dims) != 2
        or not all(isinstance(d, int) and d > 0 for d in dims)
    ):
        raise CliInputError(f"'dims' must be two positive integers, got {dims!r}")
    n = dims[0] * dims[1]
    entries = data["matrix"]
    if not isinstance(entries, list) or len(entries) != n * n:
        raise CliInputError(f"'matrix' must hold {n * n} [re, im] pairs for dims {dims}")
    try:
        flat = np.array([complex(e[0], e[1]) for e in entries], dtype=np.complex128)
    except (TypeError, IndexError) as exc:
        raise CliInputError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    try:
        return DensityMatrix(flat.reshape(n, n), split=(dims[0], dims[1]))
    except ContractViolation as exc:
        msg = str(exc)
        if "Hermitian" in msg:
            name = "hermiticity"
        elif "trace" in msg:
            name = "trace"
        else:
            name = "positivity"
        raise CliInputError(f"state file {path} violates {name}: {msg}") from exc


def save_state(path: str, rho: DensityMatrix) -> None:
    n_a, n_b = rho.require_split()
    flat = rho.matrix.ravel()
    data = {
        "dims": [n_a, n_b],
        "matrix": [[float(z.real), float(z.imag)] for z in flat],
    }
    with open(path, "w") as fh:
        json.dump(data, fh)
        fh.write("\n")


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _integrator_from_args(args) -> IntegratorConfig:
    if getattr(args, "mc", None) is not None:
        return IntegratorConfig(mode="monte-carlo", samples=args.mc, seed=args.seed)
    if getattr(args, "grid", None) is not None:
        return IntegratorConfig(mode="quadrature", grid=args.grid, seed=args.seed)
    return IntegratorConfig(seed=args.seed)


def _cmd_strength(args) -> int:
    state = load_state(args.state)
    cfg = _integrator_from_args(args)
    if args.direction == "sym":
        res = strength(state, cfg)
    else:
        res = strength_directed(state, args.direction.upper(), cfg)
    _print_json(result_to_dict(res, cfg))
    return 0


def _cmd_charfunc(args) -> int:
    state = load_state(args.state)
    batch = char_surface(state, args.grid, closed=True, as_batch=True)
    with open(args.out, "w") as fh:
        fh.write(surface_to_csv(batch, state.require_split()[0]))
    return 0


def _cmd_steering(args) -> int:
    state = load_state(args.state)
    n_a, n_b = state.require_split()
    if n_b != 2:
        raise CliInputError(f"steering output needs n_B = 2, got {n_b}")
    if n_a == 2:
        surface = steering_surface(state, args.grid)
        text = steering_surface_to_csv(surface)
    else:
        # no 2d surface exists over a >2-dimensional measured side; emit a
        # measure-weighted point cloud of the same column layout instead
        thetas, phis, p, s, r_b = steering_cloud(state, args.grid * args.grid, seed=args.seed)
        text = cloud_to_csv(thetas, phis, p, s, r_b)
    with open(args.out, "w") as fh:
        fh.write(text)
    return 0


def _cmd_separability(args) -> int:
    state = load_state(args.state)
    n_a, n_b = state.require_split()
    if (n_a, n_b) != (2, 2):
        raise CliInputError(f"separability verdict is defined for 2x2 states, got {n_a}x{n_b}")
    surface = steering_surface(state, args.grid)
    verdict = main_normal_constancy(surface, tol=args.tol)
    _print_json(
        {
            "verdict": verdict.verdict,
            "max_normal_deviation": verdict.max_normal_deviation,
            "degenerate_fraction": verdict.degenerate_fraction,
        }
    )
    return 0


def _cmd_entanglement(args) -> int:
    state = load_state(args.state)
    opt = OptimizerConfig(restarts=args.restarts, seed=args.seed, m_max=args.m_max)
    if args.variant == "entropy":
        res = entanglement_Es(state, opt)
        _print_json(entropy_result_to_dict(res))
    else:
        res = entanglement_E(state, optimizer_cfg=opt)
        _print_json(entanglement_result_to_dict(res))
    return 0


def _cmd_reconstruct(args) -> int:
    state = load_state(args.state)
    n_a, n_b = state.require_split()
    if args.bipartite:
        oracle = conditional_oracle_from_state(state)
        rebuilt = reconstruct_bipartite(oracle, n_a, n_b)
    else:
        full = DensityMatrix(state.matrix)
        rebuilt = reconstruct_state(oracle_from_state(full), full.dim)
        rebuilt = DensityMatrix(rebuilt.matrix, split=(n_a, n_b))
    err = trace_norm(rebuilt.matrix - state.matrix)
    if args.out:
        save_state(args.out, rebuilt)
    _print_json({"dims": [n_a, n_b], "trace_norm_error": err, "bipartite": bool(args.bipartite)})
    return 0


def _cmd_example(args) -> int:
    if args.kind == "pure":
        if args.alpha is None:
            raise CliInputError("example pure requires --alpha")
        state = schmidt_pure_state(args.alpha, args.gamma)
    elif args.kind == "classical":
        m = np.zeros((4, 4), dtype=np.complex128)
        m[0, 0] = 0.5
        m[3, 3] = 0.5
        state = DensityMatrix(m, split=(2, 2))
    elif args.kind == "bellmix":
        plus = np.array([1, 0, 0, 1], dtype=np.complex128) / math.sqrt(2)
        minus = np.array([1, 0, 0, -1], dtype=np.complex128) / math.sqrt(2)
        m = 0.5 * (np.outer(plus, plus.conj()) + np.outer(minus, minus.conj()))
        state = DensityMatrix(m, split=(2, 2))
    elif args.kind == "polytope":
        if args.m is None:
            raise CliInputError("example polytope requires --m")
        state = polytope_state(args.m)
    else:  # pragma: no cover - argparse restricts choices
        raise CliInputError(f"unknown example kind {args.kind!r}")
    save_state(args.out, state)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnckit",
        description="Measurement-response strength, entanglement, and steering toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("strength", help="strength functional of a state")
    p.add_argument("--state", required=True)
    p.add_argument("--direction", choices=["ab", "ba", "sym"], default="sym")
    p.add_argument("--grid", type=int, default=None, help="quadrature nodes per parameter")
    p.add_argument("--mc", type=int, default=None, help="Monte-Carlo sample count")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_strength)

    p = sub.add_parser("charfunc", help="characteristic-function surface CSV")
    p.add_argument("--state", required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_charfunc)

    p = sub.add_parser("steering", help="steering surface / point-cloud CSV")
    p.add_argument("--state", required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_steering)

    p = sub.add_parser("separability", help="main-normal constancy verdict")
    p.add_argument("--state", required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_separability)

    p = sub.add_parser("entanglement", help="decomposition-optimized gap")
    p.add_argument("--state", required=True)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--m-max", dest="m_max", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=["g", "entropy"], default="g")
    p.set_defaults(func=_cmd_entanglement)

    p = sub.add_parser("reconstruct", help="simulated-oracle tomography roundtrip")
    p.add_argument("--state", required=True)
    p.add_argument("--bipartite", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("example", help="write canonical state files")
    p.add_argument("kind", choices=["pure", "classical", "bellmix", "polytope"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--out", default="state.json")
    p.set_defaults(func=_cmd_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
