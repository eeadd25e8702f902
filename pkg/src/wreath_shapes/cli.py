"""Command line: ``verify``, ``expand``, ``simulate`` and ``shape``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
budget errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .characters import (
    branching_holds,
    multipartitions,
    orthogonality_holds,
    plancherel_mass,
    single_cycle_identity_holds,
    verify_biane,
)
from .dynamics import (
    Ensemble,
    PausingSpec,
    SimulationConfig,
    eigen_check,
    estimate_rescaled_moments,
    initial_cumulants,
    predicted_cumulants,
    reversibility_holds,
    transition_matrix,
)
from .freeprob import gauss_quadrature, markov_inverse
from .jm_asymptotics import compare_bruteforce, main_terms
from .wreath_group import BudgetExceeded, reduced_types_upto

SCHEMA_VERSION = 1
CSV_HEADER = ["t", "zeta", "k", "estimate", "stderr", "predicted", "zscore"]
Z_LIMIT = 3.0


class UsageError(Exception):
    """Invalid arguments or configuration (exit code 2)."""


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _require_degree(n: int) -> None:
    if n < 1:
        raise UsageError("degree must be ≥ 1")


def _require_r(r: int) -> None:
    if r < 1:
        raise UsageError("r must be ≥ 1")


# -- verify ------------------------------------------------------------------


def _verify_biane(args) -> list[dict]:
    checks = []
    for lam in multipartitions(args.n, args.r):
        for k in range(1, args.kmax + 1):
            report = verify_biane(args.n, k, args.r, lam)
            checks.append({"name": f"lambda={lam} k={k}", **report.as_dict()})
    return checks


def _verify_jm(args) -> list[dict]:
    checks = []
    n_small, n_large = args.n, 2 * args.n
    for k in range(1, args.kmax + 1):
        for y in range(args.r):
            small = compare_bruteforce(k, y, args.r, n_small)
            large = compare_bruteforce(k, y, args.r, n_large)
            err_small = {row.conj_type: row.relative_error for row in small.rows}
            for row in large.rows:
                e_small = err_small.get(row.conj_type, math.inf)
                if k == 2:
                    ok = row.relative_error == 0 and e_small == 0
                else:
                    ok = row.relative_error <= 0.65 * e_small
                checks.append(
                    {
                        "name": f"k={k} y={y} class={row.conj_type}",
                        "exact": str(row.exact),
                        "main": str(row.main),
                        f"relative_error_n{n_small}": e_small,
                        f"relative_error_n{n_large}": row.relative_error,
                        "status": "pass" if ok else "fail",
                    }
                )
    return checks


def _verify_eigen(args) -> list[dict]:
    P = transition_matrix(args.n, args.r)
    checks = []
    for rho in reduced_types_upto(args.n, args.r):
        report = eigen_check(args.n, args.r, rho, P)
        checks.append({"name": f"class={rho}", **report.as_dict()})
    return checks


def _verify_stationarity(args) -> list[dict]:
    P = transition_matrix(args.n, args.r)
    mass = [plancherel_mass(lam) for lam in P.states]
    stochastic = all(sum(row) == 1 for row in P.P)
    invariant = all(
        sum(mass[i] * P.P[i][j] for i in range(len(mass))) == mass[j] for j in range(len(mass))
    )
    return [
        {"name": "rows sum to 1", "status": "pass" if stochastic else "fail"},
        {"name": "plancherel total mass 1", "status": "pass" if sum(mass) == 1 else "fail"},
        {"name": "plancherel invariant", "status": "pass" if invariant else "fail"},
        {"name": "plancherel reversible", "status": "pass" if reversibility_holds(P) else "fail"},
    ]


def _verify_characters(args) -> list[dict]:
    n, r = args.n, args.r
    lams = list(multipartitions(n, r))
    single = all(
        single_cycle_identity_holds(lam, k, theta)
        for lam in lams
        for k in range(1, n + 1)
        for theta in range(r)
    )
    return [
        {"name": "orthogonality", "status": "pass" if orthogonality_holds(n, r) else "fail"},
        {"name": "single-cycle identity", "status": "pass" if single else "fail"},
        {
            "name": "branching",
            "status": "pass" if all(branching_holds(lam) for lam in lams) else "fail",
        },
    ]


SUITES = {
    "biane": _verify_biane,
    "jm-expansion": _verify_jm,
    "eigen": _verify_eigen,
    "stationarity": _verify_stationarity,
    "characters": _verify_characters,
}


def run_verify(args) -> int:
    _require_degree(args.n)
    _require_r(args.r)
    if args.kmax < 1:
        raise UsageError("kmax must be ≥ 1")
    checks = SUITES[args.suite](args)
    status = "pass" if all(c["status"] == "pass" for c in checks) else "fail"
    _emit(
        {
            "schema": SCHEMA_VERSION,
            "suite": args.suite,
            "params": {"n": args.n, "r": args.r, "kmax": args.kmax},
            "checks": checks,
            "status": status,
        },
        args.out,
    )
    return 0 if status == "pass" else 1


# -- expand --------------------------------------------------------------------


def run_expand(args) -> int:
    _require_degree(args.n)
    _require_r(args.r)
    if args.k < 1:
        raise UsageError("k must be ≥ 1")
    terms = main_terms(args.k, args.y, args.r, args.n)
    print(f"# main terms of E[J^{args.k} (y={args.y})] in S_{args.n}(Z_{args.r}): {len(terms)}")
    for term in terms:
        print(
            f"sigma={term.shape} labeling={term.labeling} class={term.conj_type} "
            f"coefficient={term.normalized_coefficient(args.n)} (on A_C/|C|, "
            f"{term.prefactor}*n^{term.exponent})"
        )
    if not args.check:
        return 0
    report = compare_bruteforce(args.k, args.y, args.r, args.n)
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(report.to_csv_rows())
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


# -- simulate ------------------------------------------------------------------

DEFAULTS = {
    "n": "100",
    "r": "2",
    "pausing": "exponential",
    "mean": "1",
    "shape": "2",
    "ensemble": "plancherel",
    "t": "0,1",
    "k": "2,3,4",
    "paths": "100",
    "seed": "0",
    "workers": "",
    "out": "",
}


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def build_config(args) -> tuple[SimulationConfig, dict[str, str]]:
    """Merge defaults, the config file and flags (flags win)."""
    values = dict(DEFAULTS)
    if args.config:
        values.update(read_config_file(args.config))
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = str(flag)
    try:
        n, r = int(values["n"]), int(values["r"])
        _require_degree(n)
        _require_r(r)
        paths = int(values["paths"])
        if paths < 1:
            raise UsageError("paths must be ≥ 1")
        pausing = PausingSpec(
            family=values["pausing"], mean=float(values["mean"]), shape=float(values["shape"])
        )
        cfg = SimulationConfig(
            n=n,
            r=r,
            ensemble=Ensemble.parse(values["ensemble"], r),
            times=_floats(values["t"]),
            orders=_ints(values["k"]),
            paths=paths,
            pausing=pausing,
            seed=int(values["seed"]),
            workers=int(values["workers"]) if values["workers"] else None,
        )
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return cfg, values


def _zscore(estimate: float, stderr: float, predicted: float) -> float:
    diff = estimate - predicted
    if stderr > 0:
        return diff / stderr
    return 0.0 if abs(diff) <= 1e-9 * max(1.0, abs(predicted)) else math.copysign(math.inf, diff)


def _fmt(x: float) -> str:
    return format(x, ".12g")


def simulation_records(cfg: SimulationConfig) -> list[dict]:
    K = max(cfg.orders)
    R0 = initial_cumulants(cfg.ensemble, cfg.n, cfg.r, max(K, 2))
    preds = {t: predicted_cumulants(R0, t, cfg.pausing.mean, cfg.r) for t in cfg.times}
    records = []
    for est in estimate_rescaled_moments(cfg):
        predicted = preds[est.t].moments[est.zeta][est.k]
        z = _zscore(est.value, est.stderr, predicted)
        records.append(
            {
                "t": est.t,
                "zeta": est.zeta,
                "k": est.k,
                "estimate": est.value,
                "stderr": est.stderr,
                "predicted": predicted,
                "zscore": z,
                "pass": abs(z) <= Z_LIMIT,
            }
        )
    return records


def records_to_csv(records: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(
            [_fmt(rec["t"]), rec["zeta"], rec["k"]]
            + [_fmt(rec[key]) for key in ("estimate", "stderr", "predicted", "zscore")]
        )
    return buf.getvalue()


def run_simulate(args) -> int:
    cfg, values = build_config(args)
    records = simulation_records(cfg)
    text = records_to_csv(records)
    status = "pass" if all(rec["pass"] for rec in records) else "fail"
    summary = {
        "schema": SCHEMA_VERSION,
        "command": "simulate",
        "seed": cfg.seed,
        "config": {k: v for k, v in values.items() if k not in ("workers", "out")},
        "criterion": f"|zscore| <= {Z_LIMIT:g}",
        "records": [
            {"t": rec["t"], "zeta": rec["zeta"], "k": rec["k"], "pass": rec["pass"]}
            for rec in records
        ],
        "status": status,
    }
    out = values["out"]
    if out:
        Path(out).write_text(text)
        Path(out).with_suffix(".json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        sys.stdout.write(text)
        print(json.dumps(summary, indent=2, sort_keys=True), file=sys.stderr)
    return 0 if status == "pass" else 1


# -- shape -----------------------------------------------------------------


def _largest_quadrature(moments_seq, nodes: int):
    """Gauss rule with at most ``nodes`` points; fewer when the measure has fewer atoms."""
    for m in range(nodes, 0, -1):
        try:
            return gauss_quadrature(moments_seq, m), m
        except ValueError:
            continue
    raise UsageError("moment sequence does not define a probability measure")


def run_shape(args) -> int:
    _require_degree(args.n)
    _require_r(args.r)
    if args.nodes < 1:
        raise UsageError("nodes must be ≥ 1")
    try:
        ensemble = Ensemble.parse(args.ensemble, args.r)
        ensemble.check(args.n, args.r)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    K = 2 * args.nodes
    R0 = initial_cumulants(ensemble, args.n, args.r, K)
    shapes = []
    for t in _floats(args.t):
        pred = predicted_cumulants(R0, t, args.mean, args.r)
        for zeta in range(args.r):
            quad, used = _largest_quadrature(pred.moments[zeta], args.nodes)
            prof = markov_inverse(quad)
            shapes.append(
                {
                    "t": t,
                    "zeta": zeta,
                    "nodes": used,
                    "valleys": [float(x) for x in prof.valleys],
                    "peaks": [float(y) for y in prof.peaks],
                    "atoms": [float(x) for x in quad.atoms],
                    "weights": [float(w) for w in quad.weights],
                }
            )
    _emit({"schema": SCHEMA_VERSION, "command": "shape", "shapes": shapes}, args.out)
    return 0


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wreath-shapes",
        description="Exact JM-moment checks and Res-Ind simulations for S_n(Z_r).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run an exact verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=run_verify)

    p = sub.add_parser("expand", help="print leading terms of a JM moment")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--y", type=int, default=0)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--check", action="store_true", help="append a CSV diff against brute force")
    p.add_argument("--out", help="write the CSV diff here")
    p.set_defaults(func=run_expand)

    p = sub.add_parser("simulate", help="run a Monte Carlo campaign")
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--t", help="comma separated macroscopic times")
    p.add_argument("--k", help="comma separated moment orders")
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mean", type=float)
    p.add_argument("--shape", type=float, help="gamma shape parameter")
    p.add_argument("--pausing", choices=["exponential", "gamma"])
    p.add_argument("--ensemble", help="plancherel, rectangle:PxQ@ZETA, (2,1)|(1) or a mixture")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="CSV path; the JSON summary goes next to it")
    p.set_defaults(func=run_simulate)

    p = sub.add_parser("shape", help="predicted limit profiles via Gauss quadrature")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--t", default="0,1")
    p.add_argument("--mean", type=float, default=1.0)
    p.add_argument("--ensemble", default="plancherel")
    p.add_argument("--nodes", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=run_shape)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
