"""Command-line front end: figure data generation, bound checks, roofs, and
state construction.

All commands are deterministic for a fixed ``--seed``; numeric CSV fields
use 12 significant digits so identical runs produce identical bytes.
Errors exit nonzero with a JSON payload on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as qio
from .bounds import (
    bfq_bound,
    check_improved_hr,
    check_improved_rs,
    check_robertson_schrodinger,
    check_weighted_sum,
    eigen_partition_bound_K,
    rs_lower_bound_L,
    spin_length_bound,
    su_d_bound,
)
from .core import (
    DensityMatrix,
    HermitianOperator,
    RandomStateConfig,
    coherent_state,
    make_fock_algebra,
    make_spin_algebra,
    random_density_matrix,
    spin_coherent_polar,
    spin_coherent_state,
    tensor,
    variance,
)
from .entanglement import duan_report, two_spin_report, vxyz_criterion
from .roofs import (
    OptimizerConfig,
    RobertsonSchrodingerBound,
    VarianceSum,
    concave_roof_L,
    optimize_roof,
)
from .states import (
    coherent_mixture,
    planar_squeezed_state,
    singlet_state,
    spin_coherent_mixture,
    spin_squeezed_state,
    two_mode_squeezed_vacuum,
)

CSV_FMT = "{:.12g}"


def _fmt(x) -> str:
    return CSV_FMT.format(float(x))


def _child_seed(seed: int, *indices: int) -> int:
    return int(np.random.SeedSequence([seed, *indices]).generate_state(1)[0])


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text)


def _emit(rows: list[list[str]], header: list[str], args) -> None:
    if args.format == "json":
        payload = [dict(zip(header, row)) for row in rows]
        _write_output(json.dumps(payload, indent=2), args.out)
    else:
        lines = [",".join(header)] + [",".join(row) for row in rows]
        _write_output("\n".join(lines) + "\n", args.out)


# ---------------------------------------------------------------------------
# state and operator mini-format
# ---------------------------------------------------------------------------

def _parse_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    raise ValueError(f"cannot read complex number from {value!r}")


def build_state(spec: dict, cutoff: int):
    """Build a state from the JSON mini-format.

    Either {"matrix": {...}} with an inline serialized state, or
    {"constructor": name, "params": {...}} naming one of the factory
    functions below.
    """
    if "matrix" in spec:
        return qio.state_from_json(spec["matrix"])
    name = spec.get("constructor")
    params = spec.get("params", {})
    if name == "coherent":
        return coherent_state(_parse_complex(params["alpha"]), params.get("cutoff", cutoff))
    if name == "coherent_product":
        c = params.get("cutoff", cutoff)
        return tensor(coherent_state(_parse_complex(params["alpha1"]), c),
                      coherent_state(_parse_complex(params["alpha2"]), c))
    if name == "vacuum":
        return coherent_state(0.0, params.get("cutoff", cutoff))
    if name == "tmsv":
        return two_mode_squeezed_vacuum(params["r"], params.get("cutoff", cutoff))
    if name == "spin_coherent":
        return spin_coherent_state(params["j"], params["c"])
    if name == "spin_coherent_polar":
        return spin_coherent_polar(params["j"], params["theta"], params["phi"])
    if name == "spin_squeezed":
        return spin_squeezed_state(params["j"], params["lam"])
    if name == "planar_squeezed":
        return planar_squeezed_state(params["j"]).state
    if name == "singlet":
        return singlet_state(params["j"])
    if name == "random":
        return random_density_matrix(RandomStateConfig(
            dim=params["dim"], rank=params.get("rank", params["dim"]), seed=params["seed"]))
    if name == "maximally_mixed":
        return DensityMatrix.maximally_mixed(params["dim"])
    if name == "z_polar_mixture":
        spin = make_spin_algebra(params["j"])
        mat = np.zeros((spin.dim, spin.dim), dtype=complex)
        mat[0, 0] = 0.5
        mat[-1, -1] = 0.5
        return DensityMatrix(mat)
    if name == "coherent_mixture":
        entries = [(e[0], *(map(_parse_complex, e[1:]))) for e in params["entries"]]
        return coherent_mixture(entries, params.get("cutoff", cutoff))
    if name == "spin_coherent_mixture":
        return spin_coherent_mixture(params["j"], [(e[0], e[1]) for e in params["entries"]])
    raise ValueError(f"unknown state constructor {name!r}")


def _load_spec(arg: str) -> dict:
    if arg.startswith("@"):
        return json.loads(Path(arg[1:]).read_text())
    return json.loads(arg)


def build_operator(arg: str, dim: int, cutoff: int) -> HermitianOperator:
    """A named spin/quadrature operator sized to the state, or an inline matrix."""
    if arg.startswith("{") or arg.startswith("@"):
        return qio.operator_from_json(_load_spec(arg))
    name = arg.lower()
    if name in ("jx", "jy", "jz"):
        j = (dim - 1) / 2.0
        spin = make_spin_algebra(j)
        return {"jx": spin.jx, "jy": spin.jy, "jz": spin.jz}[name]
    if name in ("x", "p"):
        fock = make_fock_algebra(cutoff)
        if dim != cutoff:
            raise ValueError(
                f"single-mode quadrature for dim {dim} does not match cutoff {cutoff};"
                " two-mode states use x1/x2/p1/p2")
        return fock.x if name == "x" else fock.p
    if name in ("x1", "x2", "p1", "p2"):
        fock = make_fock_algebra(cutoff)
        if dim != cutoff**2:
            raise ValueError(f"two-mode operator needs dim = cutoff^2 = {cutoff ** 2}")
        eye = HermitianOperator(np.eye(cutoff))
        base = fock.x if name[0] == "x" else fock.p
        return tensor(base, eye) if name[1] == "1" else tensor(eye, base)
    raise ValueError(f"unknown operator spec {arg!r}")


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(seed=_child_seed(args.seed, 0xD0),
                           restarts=args.restarts,
                           local_steps=args.local_steps)


# ---------------------------------------------------------------------------
# figure commands
# ---------------------------------------------------------------------------

def cmd_figure_rs(args) -> None:
    """Random qutrits against the plain, eigenvector-partition, and roof bounds."""
    spin = make_spin_algebra(1)
    a, b = spin.jx, spin.jy
    header = ["sample", "lhs_minus_rhs_rs", "lhs_minus_rhs_k", "lhs_minus_rhs_roof"]
    rows = []
    improved_k = 0
    improved_roof = 0
    for i in range(args.samples):
        rho = random_density_matrix(RandomStateConfig(
            dim=3, rank=3, seed=_child_seed(args.seed, 1, i)))
        lhs = variance(rho, a) * variance(rho, b)
        l_val = rs_lower_bound_L(rho, a, b)
        k_val = eigen_partition_bound_K(rho, a, b)
        cfg = OptimizerConfig(seed=_child_seed(args.seed, 2, i),
                              restarts=args.restarts, local_steps=args.local_steps)
        roof = concave_roof_L(rho, a, b, cfg=cfg)
        if k_val > l_val + 1e-6:
            improved_k += 1
        if roof.value > l_val + 1e-6:
            improved_roof += 1
        rows.append([str(i), _fmt(lhs - 0.25 * l_val**2),
                     _fmt(lhs - 0.25 * k_val**2), _fmt(lhs - 0.25 * roof.value**2)])
    rows.append(["summary", str(args.samples), str(improved_k), str(improved_roof)])
    _emit(rows, header, args)


def cmd_figure_planar(args) -> None:
    """Fisher information and its variance-based lower bound for planar squeezing."""
    header = ["j", "fq_jz", "b_fq", "reference_2j"]
    rows = []
    for j in args.j_list:
        res = planar_squeezed_state(j)
        report = bfq_bound(res.state)
        rows.append([_fmt(j), _fmt(report.lhs), _fmt(report.rhs), _fmt(2 * res.j)])
    _emit(rows, header, args)


def cmd_figure_spinsq(args) -> None:
    """Same comparison along a one-axis-squeezing sweep at fixed j."""
    header = ["lambda", "fq_jz", "b_fq", "reference_2j"]
    rows = []
    lam_grid = np.logspace(np.log10(args.lambda_min), np.log10(args.lambda_max),
                           args.lambda_points)
    for lam in lam_grid:
        psi = spin_squeezed_state(args.j, lam)
        report = bfq_bound(psi)
        rows.append([_fmt(lam), _fmt(report.lhs), _fmt(report.rhs), _fmt(2 * args.j)])
    _emit(rows, header, args)


# ---------------------------------------------------------------------------
# check / roof / state-factory
# ---------------------------------------------------------------------------

def cmd_check(args) -> None:
    state = build_state(_load_spec(args.state), args.cutoff)
    name = args.name
    if name == "duan":
        fock = make_fock_algebra(args.cutoff)
        report = duan_report(state, fock)
        payload = {
            "name": "duan",
            "lhs": report.duan_lhs,
            "rhs": report.duan_rhs,
            "slack": report.duan_lhs - report.duan_rhs,
            "violated": report.entangled,
            "meta": {
                "qfi_x_minus": report.qfi_x_minus,
                "qfi_p_plus": report.qfi_p_plus,
                "fisher_pair_slack": report.fisher_pair_slack,
                "fisher_pair_status": report.fisher_pair_status,
                "useful_flags": report.useful_flags,
            },
        }
        _write_output(json.dumps(payload, indent=2), args.out)
        return
    if name == "two-spin":
        report = two_spin_report(state, args.j1, args.j2)
        payload = {
            "name": "two_spin",
            "lhs": report.collective_var_sum,
            "rhs": report.separable_floor,
            "slack": report.collective_var_sum - report.separable_floor,
            "violated": report.entangled,
            "meta": {
                "fq_sum_minus": report.fq_sum_minus,
                "spin_coherent_fisher_cap": report.spin_coherent_fisher_cap,
                "three_axis_lhs": report.three_axis_lhs,
                "three_axis_rhs": report.three_axis_rhs,
                "more_useful_than_spin_coherent": report.more_useful_than_spin_coherent,
            },
        }
        _write_output(json.dumps(payload, indent=2), args.out)
        return
    if name == "vxyz":
        report = vxyz_criterion(state, args.spin, args.parties, cfg=_optimizer_config(args))
    elif name == "bfq":
        report = bfq_bound(state)
    elif name == "sud":
        report = su_d_bound(state)
    elif name == "spin-length":
        report = spin_length_bound(state)
    else:
        a = build_operator(args.op_a, state.dim, args.cutoff)
        b = build_operator(args.op_b, state.dim, args.cutoff)
        if name == "rs":
            report = check_robertson_schrodinger(state, a, b)
        elif name == "improved-rs":
            report = check_improved_rs(state, a, b, cfg=_optimizer_config(args))
        elif name == "improved-hr":
            report = check_improved_hr(state, a, b)
        elif name == "weighted-sum":
            report = check_weighted_sum(state, a, b, args.alpha, args.beta,
                                        cfg=_optimizer_config(args))
        else:
            raise ValueError(f"unknown check name {name!r}")
    _write_output(json.dumps(report.to_dict(), indent=2), args.out)


def cmd_roof(args) -> None:
    state = build_state(_load_spec(args.state), args.cutoff)
    ops = [build_operator(spec, state.dim, args.cutoff) for spec in args.ops]
    if args.functional == "variance-sum":
        functional = VarianceSum(ops)
    elif args.functional == "rs-bound":
        if len(ops) != 2:
            raise ValueError("the rs-bound functional needs exactly two operators")
        functional = RobertsonSchrodingerBound(ops[0], ops[1])
    else:
        raise ValueError(f"unknown functional {args.functional!r}")
    result = optimize_roof(state, functional, args.direction, cfg=_optimizer_config(args))
    _write_output(json.dumps(qio.roof_result_to_json(result), indent=2), args.out)


def cmd_state_factory(args) -> None:
    state = build_state(_load_spec(args.spec), args.cutoff)
    _write_output(json.dumps(qio.state_to_json(state), indent=2), args.out)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
    p.add_argument("--out", default=None, help="output path, '-' or omitted for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--cutoff", type=int, default=40, help="Fock truncation (default 40)")
    p.add_argument("--restarts", type=int, default=8, help="optimizer restarts")
    p.add_argument("--local-steps", type=int, default=600, help="optimizer local steps")


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfiroof",
        description="Fisher-information and variance-roof uncertainty toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure-rs", help="random-qutrit bound comparison data")
    _add_common(p)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_figure_rs)

    p = sub.add_parser("figure-planar", help="planar-squeezed bound sweep over j")
    _add_common(p)
    p.add_argument("--j-list", type=_float_list,
                   default=[0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5])
    p.set_defaults(func=cmd_figure_planar)

    p = sub.add_parser("figure-spinsq", help="one-axis-squeezing sweep at fixed j")
    _add_common(p)
    p.add_argument("--j", type=float, default=50)
    p.add_argument("--lambda-min", type=float, default=1e-2)
    p.add_argument("--lambda-max", type=float, default=1e6)
    p.add_argument("--lambda-points", type=int, default=25)
    p.set_defaults(func=cmd_figure_spinsq)

    p = sub.add_parser("check", help="evaluate a named inequality on a state")
    _add_common(p)
    p.add_argument("name", choices=("rs", "improved-rs", "improved-hr", "weighted-sum",
                                    "bfq", "sud", "spin-length", "duan", "two-spin",
                                    "vxyz"))
    p.add_argument("--state", required=True, help="state spec JSON or @file")
    p.add_argument("--op-a", default="jx")
    p.add_argument("--op-b", default="jy")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--j1", type=float, default=0.5)
    p.add_argument("--j2", type=float, default=0.5)
    p.add_argument("--parties", type=int, default=2)
    p.add_argument("--spin", type=float, default=0.5)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("roof", help="optimize a functional over decompositions")
    _add_common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--ops", nargs="+", required=True, help="operator specs")
    p.add_argument("--direction", choices=("min", "max"), required=True)
    p.add_argument("--functional", choices=("variance-sum", "rs-bound"),
                   default="variance-sum")
    p.set_defaults(func=cmd_roof)

    p = sub.add_parser("state-factory", help="construct and serialize a state")
    _add_common(p)
    p.add_argument("spec", help="state spec JSON or @file")
    p.set_defaults(func=cmd_state_factory)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports all failures
        sys.stderr.write(json.dumps({
            "error": type(exc).__name__,
            "message": str(exc),
        }) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
