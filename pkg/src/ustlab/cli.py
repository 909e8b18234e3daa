"""Command-line front end: experiment orchestration and CSV/JSON persistence.

Subcommands: `lerw sample`, `ust kpoints`, `constants`, `lattice-limits`,
`crt sample`, `compare`, `acceptance`.  Outputs are deterministic given
(config, seed) regardless of thread count: samples are produced in fixed
chunks, chunk i drawing from the stream (seed, i), and merged by index.

CSV artifacts start with `# key=value` comment lines echoing the full
configuration and tool version; infinite distances are written as empty
fields.  Exit codes: 0 pass, 1 comparison/acceptance failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .capacity import estimate_constants, lattice_limit_constants
from .crt import rayleigh_cdf, sample_Fk
from .extension import extend, kill_mean_for
from .graphs import GraphFamily, HitSet, parse_graph_spec, walk
from .lerw import ScaleSet, lerw_length_to_target, local_cutpoints, loop_erase
from .rng import substream
from .stats import ComparisonReport, EmpiricalSample, ks_against, ks_statistic, normalize_by_scale
from .wilson import forest_distances, partial_tree

CHUNK = 512
RAYLEIGH_MEDIAN = math.sqrt(2.0 * math.log(2.0))


# configuration plumbing


def read_config(path: str) -> dict:
    """Flat key = value file (TOML-compatible subset)."""
    out: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_")
            val = val.strip()
            if val.startswith(("'", '"')) and val.endswith(val[0]) and len(val) >= 2:
                out[key] = val[1:-1]
            elif val.lower() in ("true", "false"):
                out[key] = val.lower() == "true"
            else:
                try:
                    out[key] = int(val)
                except ValueError:
                    try:
                        out[key] = float(val)
                    except ValueError:
                        out[key] = val
    return out


def apply_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        for key, val in cfg.items():
            if hasattr(args, key) and getattr(args, key) is None:
                setattr(args, key, val)
    return args


def config_echo(args: argparse.Namespace) -> list[str]:
    skip = {"func", "config"}
    lines = [f"# version={__version__}"]
    for key in sorted(vars(args)):
        if key in skip:
            continue
        val = getattr(args, key)
        if val is not None and not callable(val):
            lines.append(f"# {key}={val}")
    lines.append("# inf_encoding=empty field")
    return lines


def write_csv(path: str, header: list[str], columns: list[str], rows) -> None:
    with open(path, "w") as fh:
        for line in header:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fields = []
            for v in row:
                if isinstance(v, float) and math.isinf(v):
                    fields.append("")
                elif isinstance(v, float):
                    fields.append(repr(v))
                else:
                    fields.append(str(v))
            fh.write(",".join(fields) + "\n")


def read_csv(path: str) -> tuple[dict[str, str], list[str], list[list[float]]]:
    """Returns (config header, column names, rows); empty fields become inf."""
    meta: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[float]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, _, v = body.partition("=")
                    meta[k.strip()] = v.strip()
                continue
            if not columns:
                columns = [c.strip() for c in line.split(",")]
                continue
            fields = line.split(",")
            if len(fields) != len(columns):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(columns)} fields, got {len(fields)}"
                )
            try:
                rows.append(
                    [math.inf if f == "" else float(f) for f in fields]
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return meta, columns, rows


# chunked deterministic sampling


def _chunks(n: int) -> list[tuple[int, int]]:
    return [(i, min(CHUNK, n - i * CHUNK)) for i in range(-(-n // CHUNK))]


def run_chunked(worker, common: dict, n_samples: int, seed: int, threads: int):
    tasks = _chunks(n_samples)
    if threads <= 1 or len(tasks) <= 1:
        parts = [worker((common, seed, idx, cnt)) for idx, cnt in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(worker, [(common, seed, idx, cnt) for idx, cnt in tasks])
            )
    return [row for part in parts for row in part]


def _lerw_chunk(payload):
    common, seed, idx, count = payload
    g = parse_graph_spec(common["graph"])
    rng = substream(seed, idx)
    tau = common["tau"]
    kill_mean = common["kill_mean"]
    ext = extend(g, kill_mean) if kill_mean else None
    rows = []
    for _ in range(count):
        x = int(rng.integers(g.num_vertices)) if common["src"] is None else common["src"]
        if common["dst"] is None:
            y = int(rng.integers(g.num_vertices - 1))
            y += y >= x
        else:
            y = common["dst"]
        if ext is not None:
            from .extension import killed_walk

            path = killed_walk(ext, x, {y}, rng)
        else:
            path = walk(g, x, HitSet(frozenset({y})), rng)
        T = len(path.vertices) - 1
        le_len = len(loop_erase(path.vertices).vertices)
        cuts = len(local_cutpoints(path.vertices, tau))
        rows.append((idx, T, le_len, cuts, ""))
    return rows


def _kpoints_chunk(payload):
    common, seed, idx, count = payload
    g = parse_graph_spec(common["graph"])
    ext = extend(g, common["kill_mean"])
    k = common["k"]
    rng = substream(seed, idx)
    rows = []
    for _ in range(count):
        points = rng.choice(g.num_vertices, size=k, replace=False).tolist()
        forest = forest_distances(partial_tree(ext, points, rng))
        row: list = [idx]
        for i in range(k):
            for j in range(i + 1, k):
                row.append(float(forest.distances[i, j]))
        row.append(forest.n_components)
        rows.append(tuple(row))
    return rows


def _crt_chunk(payload):
    common, seed, idx, count = payload
    k = common["k"]
    rng = substream(seed, idx)
    rows = []
    for _ in range(count):
        dm = sample_Fk(k, rng)
        rows.append(tuple(float(dm[i, j]) for i in range(k) for j in range(i + 1, k)))
    return rows


# subcommands


def cmd_lerw_sample(args) -> int:
    g = parse_graph_spec(args.graph)
    seed = args.seed if args.seed is not None else 0
    threads = args.threads if args.threads is not None else os.cpu_count() or 1
    n = args.samples if args.samples is not None else 1000
    kill_mean = None
    if args.kill is not None:
        kill_mean = kill_mean_for(g, args.kill)
    elif args.kill_abs is not None:
        kill_mean = args.kill_abs
    tau = g.mixing_time().tau

    def parse_endpoint(text):
        return None if text in (None, "random") else int(text)

    common = {
        "graph": args.graph,
        "kill_mean": kill_mean,
        "tau": tau,
        "src": parse_endpoint(getattr(args, "from_", None)),
        "dst": parse_endpoint(args.to),
    }
    rows = run_chunked(_lerw_chunk, common, n, seed, threads)
    write_csv(
        args.out,
        config_echo(args) + [f"# tau={tau}"],
        ["task", "T", "le_length", "cutpoint_count", "decomposable"],
        rows,
    )
    return 0


def cmd_ust_kpoints(args) -> int:
    g = parse_graph_spec(args.graph)
    seed = args.seed if args.seed is not None else 0
    threads = args.threads if args.threads is not None else os.cpu_count() or 1
    n = args.samples if args.samples is not None else 1000
    k = args.k if args.k is not None else 2
    if args.kill is not None:
        kill_mean = kill_mean_for(g, args.kill)
    elif args.kill_abs is not None:
        kill_mean = args.kill_abs
    else:
        kill_mean = kill_mean_for(g, 1.0)
    common = {"graph": args.graph, "kill_mean": kill_mean, "k": k}
    rows = run_chunked(_kpoints_chunk, common, n, seed, threads)
    cols = ["task"]
    cols += [f"d_{i}_{j}" for i in range(k) for j in range(i + 1, k)]
    cols.append("components")
    write_csv(args.out, config_echo(args), cols, rows)
    return 0


def cmd_crt_sample(args) -> int:
    seed = args.seed if args.seed is not None else 0
    threads = args.threads if args.threads is not None else os.cpu_count() or 1
    n = args.samples if args.samples is not None else 1000
    k = args.k if args.k is not None else 2
    rows = run_chunked(_crt_chunk, {"k": k}, n, seed, threads)
    cols = [f"d_{i}_{j}" for i in range(k) for j in range(i + 1, k)]
    write_csv(args.out, config_echo(args), cols, rows)
    return 0


def _parse_scales(text: str) -> ScaleSet:
    kv = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        kv[key.strip()] = int(val)
    return ScaleSet(kv["tau"], kv["s"], kv["q"], kv["r"])


def cmd_constants(args) -> int:
    g = parse_graph_spec(args.graph)
    seed = args.seed if args.seed is not None else 0
    n = args.samples if args.samples is not None else 1000
    if args.scales:
        scales = _parse_scales(args.scales)
    else:
        scales = ScaleSet.from_graph(g)
    report = estimate_constants(g, scales, substream(seed), n_samples=n)
    payload = {
        "graph": args.graph,
        "seed": seed,
        "vol": report.vol,
        "scales": {
            "tau": scales.tau,
            "s": scales.s,
            "q": scales.q,
            "r": scales.r,
        },
        "alpha": vars(report.alpha),
        "gamma": vars(report.gamma),
        "beta": vars(report.beta),
        "m": report.m,
        "bound_violations": report.bound_violations,
        "version": __version__,
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_lattice_limits(args) -> int:
    seed = args.seed if args.seed is not None else 0
    n = args.samples if args.samples is not None else 2000
    d = args.d if args.d is not None else 5
    trunc = args.trunc if args.trunc is not None else 10000
    limits = lattice_limit_constants(d, trunc, substream(seed), n_samples=n)
    payload = {
        "d": d,
        "trunc": trunc,
        "samples": n,
        "seed": seed,
        "gamma_inf": vars(limits.gamma_inf),
        "alpha_inf": vars(limits.alpha_inf),
        "gamma_at_half_trunc": limits.gamma_half,
        "alpha_at_half_trunc": limits.alpha_half,
        "version": __version__,
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _distance_columns(columns: list[str]) -> list[int]:
    return [i for i, c in enumerate(columns) if c.startswith("d_") or c in ("T", "le_length")]


def _load_distance_sample(path: str, column: str | None) -> EmpiricalSample:
    _, columns, rows = read_csv(path)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if column is not None:
        if column not in columns:
            raise ValueError(f"{path}: no column {column!r}")
        ci = columns.index(column)
    else:
        cands = _distance_columns(columns)
        if not cands:
            raise ValueError(f"{path}: no distance column found")
        ci = cands[0]
    return EmpiricalSample.from_values([row[ci] for row in rows], label=columns[ci])


def cmd_compare(args) -> int:
    sample = _load_distance_sample(args.dists, args.column)
    if args.normalize == "beta":
        if not args.constants:
            raise ValueError("--normalize beta needs --constants file")
        with open(args.constants) as fh:
            consts = json.load(fh)
        scale = consts["beta"]["value"] * math.sqrt(consts["vol"])
    else:
        med = float(np.median(sample.values))
        if med <= 0:
            raise ValueError("median normalization needs positive median")
        scale = med / RAYLEIGH_MEDIAN
    sample = normalize_by_scale(sample, scale)
    if args.ref == "rayleigh":
        report = ks_against(sample, rayleigh_cdf, threshold=args.threshold)
    else:
        ref = _load_distance_sample(args.ref, args.column)
        ref_sorted = np.sort(ref.values)

        def ref_cdf(x):
            return np.searchsorted(ref_sorted, x, side="right") / ref_sorted.size

        value = ks_statistic(sample.values, ref_cdf)
        passed = None if args.threshold is None else value <= args.threshold
        report = ComparisonReport(
            "KS",
            value,
            sample.n_total,
            int(ref.n_total),
            args.threshold,
            passed,
            sample.inf_fraction,
            ref.inf_fraction,
        )
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 1 if report.passed is False else 0


def cmd_acceptance(args) -> int:
    from .acceptance import run_acceptance

    names = None
    if args.only:
        names = [x.strip().upper() for x in args.only.split(",")]
    results = run_acceptance(
        quick=args.quick, seed=args.seed if args.seed is not None else None, names=names
    )
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ustlab",
        description="Monte Carlo laboratory for LERW, USTs, and CRT distance laws",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--config")
        p.add_argument("--out", required=out_required)

    p_lerw = sub.add_parser("lerw").add_subparsers(dest="sub", required=True)
    p = p_lerw.add_parser("sample", help="sample loop-erased walks")
    p.add_argument("--graph", required=True)
    p.add_argument("--from", dest="from_", default="random")
    p.add_argument("--to", default="random")
    p.add_argument("--kill", type=float)
    p.add_argument("--kill-abs", dest="kill_abs", type=float)
    common(p)
    p.set_defaults(func=cmd_lerw_sample)

    p_ust = sub.add_parser("ust").add_subparsers(dest="sub", required=True)
    p = p_ust.add_parser("kpoints", help="k-point forest distances")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--kill", type=float)
    p.add_argument("--kill-abs", dest="kill_abs", type=float)
    common(p)
    p.set_defaults(func=cmd_ust_kpoints)

    p_crt = sub.add_parser("crt").add_subparsers(dest="sub", required=True)
    p = p_crt.add_parser("sample", help="sample F_k distance matrices")
    p.add_argument("--k", type=int)
    common(p)
    p.set_defaults(func=cmd_crt_sample)

    p = sub.add_parser("constants", help="estimate alpha, gamma, beta, m")
    p.add_argument("--graph", required=True)
    p.add_argument("--scales", help="explicit tau=..,s=..,q=..,r=..")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("lattice-limits", help="full-lattice gamma/alpha limits")
    p.add_argument("--d", type=int)
    p.add_argument("--trunc", type=int)
    common(p)
    p.set_defaults(func=cmd_lattice_limits)

    p = sub.add_parser("compare", help="KS comparison against a reference")
    p.add_argument("--dists", required=True)
    p.add_argument("--ref", required=True, help="'rayleigh' or an F_k CSV path")
    p.add_argument("--normalize", choices=["median", "beta"], default="median")
    p.add_argument("--constants", help="constants.json for beta normalization")
    p.add_argument("--column")
    p.add_argument("--threshold", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("acceptance", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true", help="criteria A1-A5 only")
    p.add_argument("--only", help="comma-separated criteria, e.g. A1,A5")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_acceptance)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = apply_config(args)
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
