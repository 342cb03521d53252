"""Command-line front end for the sector-block simulator.

Five subcommands: `blocks` dumps per-sector matrices as JSON, `lmg-sweep`
runs digitized adiabatic sweeps of the collective XY model and writes one
CSV row per (n, h_z) point, `bench` times selected kernels and fits log-log
exponents, `shadows` runs the snapshot protocols against exactly computed
expectation values, and `verify` executes the dense cross-check suite.

Options may come from flags or from a JSON config file (`--config`); a flag
given on the command line wins over the file.  CSV floats are written with
17 significant digits so values round-trip exactly.  Exit codes: 0 success,
2 configuration error, 3 verification failure, 4 resource guard tripped.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import verify as verify_mod
from .blocks import GENERATOR_KINDS, generator, twirl_operator
from .evolve import CircuitLayer, SchurState, expectation, heisenberg_evolve
from .irreps import WeightVector
from .lmg import (
    LmgParams,
    ScheduleParams,
    aqc_run,
    concurrence,
    order_parameter,
    order_parameter_limit,
    rescaled_concurrence,
    rescaled_concurrence_limit,
    two_qubit_rdm,
)
from . import shadows as shadows_mod

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_RESOURCE = 4

THREADS_ENV = "SCHURSIM_THREADS"

# Channel-matrix solves grow as the cube of C(n+3,3); past this the command
# refuses rather than thrash.  The deep protocol only needs per-sector rows.
SYMMETRIZED_MAX_N = 32
DEEP_MAX_N = 4096

STATE_BUILDERS = {
    "all-plus": SchurState.all_plus,
    "all-zero": SchurState.all_zero,
}


class ConfigError(Exception):
    pass


class ResourceGuard(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_rows(path: str | None, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    if path is None or path == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(buf.getvalue())


def _write_json(path: str | None, payload: dict) -> None:
    if path is None or path == "-":
        json.dump(payload, sys.stdout)
        sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(payload, fh)
            fh.write("\n")


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def _parse_kvec(text: str) -> WeightVector:
    parts = _parse_int_list(text)
    if len(parts) != 3:
        raise ConfigError(f"kvec needs three comma-separated counts, got {text!r}")
    try:
        return WeightVector(*parts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


class Config:
    """Flag values with JSON-file fallback; flags supplied explicitly win."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._file: dict = {}
        path = self._args.get("config")
        if path:
            try:
                with open(path, encoding="utf-8") as fh:
                    self._file = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config file {path}: {exc}") from exc
            if not isinstance(self._file, dict):
                raise ConfigError("config file must hold a JSON object")

    def get(self, key: str, default=None):
        flag = self._args.get(key)
        if flag is not None:
            return flag
        if key in self._file:
            return self._file[key]
        return default

    def require(self, key: str):
        value = self.get(key)
        if value is None:
            raise ConfigError(f"missing required option --{key.replace('_', '-')}")
        return value


def _threads(cfg: Config) -> int:
    raw = cfg.get("threads", os.environ.get(THREADS_ENV, "1"))
    try:
        count = int(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad thread count {raw!r}") from exc
    if count < 1:
        raise ConfigError("thread count must be positive")
    return count


# -- blocks -------------------------------------------------------------------


def cmd_blocks(cfg: Config) -> int:
    n = int(cfg.require("n"))
    kind = cfg.get("kind")
    kvec_text = cfg.get("kvec")
    if (kind is None) == (kvec_text is None):
        raise ConfigError("give exactly one of --kind / --kvec")
    if kind is not None:
        if kind not in GENERATOR_KINDS:
            raise ConfigError(f"unknown kind {kind!r}, know {sorted(GENERATOR_KINDS)}")
        op = generator(kind, n)
        head = {"n": n, "kind": kind}
    else:
        kv = _parse_kvec(str(kvec_text))
        if kv.k > n:
            raise ConfigError(f"weight vector {kv.as_tuple()} exceeds n={n} letters")
        op = twirl_operator(n, kv)
        head = {"n": n, "kvec": list(kv.as_tuple())}

    sectors = op.sectors
    wanted = cfg.get("sectors")
    if wanted is not None:
        keep = set(_parse_int_list(str(wanted)))
        missing = keep - set(sectors)
        if missing:
            raise ConfigError(f"no such sectors: {sorted(missing)}")
        sectors = [m for m in sectors if m in keep]

    blocks = []
    for m in sectors:
        mat = op.block(m)
        blocks.append(
            {
                "m": m,
                "d": mat.shape[0],
                "real": mat.real.tolist(),
                "imag": mat.imag.tolist(),
            }
        )
    _write_json(cfg.get("out"), {**head, "blocks": blocks})
    return EXIT_OK


# -- lmg-sweep ------------------------------------------------------------------


def _hz_grid(cfg: Config) -> list[float]:
    explicit = cfg.get("hz")
    if explicit is not None:
        if isinstance(explicit, str):
            values = [float(tok) for tok in explicit.split(",") if tok.strip()]
        else:
            values = [float(v) for v in explicit]
        if not values:
            raise ConfigError("empty hz grid")
        return values
    lo = float(cfg.get("hz_min", 0.0))
    hi = float(cfg.get("hz_max", 2.0))
    step = float(cfg.get("hz_step", 0.25))
    if step <= 0 or hi < lo:
        raise ConfigError("need hz_step > 0 and hz_max >= hz_min")
    count = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(count)]


def _sweep_point(n: int, j: float, gamma: float, hz: float, cfg: Config) -> list:
    start = time.perf_counter()
    params = LmgParams(j=j, gamma=gamma, hz=hz)
    sched = ScheduleParams.default_for(n)
    if cfg.get("layers") is not None:
        sched = ScheduleParams(total_time=sched.total_time, steps=int(cfg.get("layers")))
    if cfg.get("total_time") is not None:
        sched = ScheduleParams(total_time=float(cfg.get("total_time")), steps=sched.steps)
    state = aqc_run(params, sched, n)
    m_val = order_parameter(state)
    rho = two_qubit_rdm(state)
    c_val = concurrence(rho)
    cr_val = rescaled_concurrence(state)
    wall = time.perf_counter() - start
    return [
        n,
        j,
        gamma,
        hz,
        sched.steps,
        sched.total_time,
        m_val,
        order_parameter_limit(hz),
        c_val,
        cr_val,
        rescaled_concurrence_limit(gamma, hz),
        wall,
    ]


def cmd_lmg_sweep(cfg: Config) -> int:
    ns = _parse_int_list(str(cfg.get("ns", "64,256")))
    if not ns or min(ns) < 2:
        raise ConfigError("need qubit counts >= 2")
    j = float(cfg.get("j", 1.0))
    gamma = float(cfg.get("gamma", 0.5))
    grid = _hz_grid(cfg)
    points = [(n, hz) for n in ns for hz in grid]

    def work(point):
        n, hz = point
        try:
            return _sweep_point(n, j, gamma, hz, cfg)
        except MemoryError:
            print(f"skipping n={n} hz={hz}: out of memory", file=sys.stderr)
            return None

    with ThreadPoolExecutor(max_workers=_threads(cfg)) as pool:
        rows = [r for r in pool.map(work, points) if r is not None]

    header = [
        "n", "J", "gamma", "hz", "L", "T",
        "order_param", "order_param_limit",
        "concurrence", "rescaled_concurrence", "CR_limit",
        "wall_seconds",
    ]
    _write_rows(cfg.get("out"), header, rows)
    return EXIT_OK


# -- bench ----------------------------------------------------------------------


def _bench_aqc(n: int) -> None:
    params = LmgParams(j=1.0, gamma=0.5, hz=0.5)
    state = aqc_run(params, ScheduleParams.default_for(n), n)
    rescaled_concurrence(state)


def _bench_twirl(n: int, kv: WeightVector) -> None:
    twirl_operator(n, kv)


def _bench_layer(n: int) -> None:
    op = generator("sum_zz", n)
    heisenberg_evolve([CircuitLayer(op, 0.3)], generator("sum_z", n))


BENCH_TASKS = {
    "aqc": _bench_aqc,
    "twirl": None,  # needs kvec, handled separately
    "layer": _bench_layer,
}


def cmd_bench(cfg: Config) -> int:
    task = str(cfg.get("task", "twirl"))
    if task not in BENCH_TASKS:
        raise ConfigError(f"unknown task {task!r}, know {sorted(BENCH_TASKS)}")
    default_ns = "64,128,256,512,1024" if task == "twirl" else "64,128,256"
    ns = _parse_int_list(str(cfg.get("ns", default_ns)))
    reps = int(cfg.get("reps", 3))
    if reps < 1 or not ns:
        raise ConfigError("need reps >= 1 and a nonempty ns list")
    kv = _parse_kvec(str(cfg.get("kvec", "1,1,1")))

    rows = []
    medians = []
    for n in ns:
        samples = []
        for _ in range(reps):
            start = time.perf_counter()
            if task == "twirl":
                _bench_twirl(n, kv)
            else:
                BENCH_TASKS[task](n)
            samples.append(time.perf_counter() - start)
        med = float(np.median(samples))
        medians.append(med)
        rows.append([task, n, reps, med])

    if len(ns) >= 2:
        slope = float(np.polyfit(np.log(ns), np.log(medians), 1)[0])
        rows.append([f"{task}-exponent", "", "", slope])
    _write_rows(cfg.get("out"), ["task", "n", "repetitions", "median_seconds"], rows)
    return EXIT_OK


# -- shadows ----------------------------------------------------------------------


def _build_state(label: str, n: int) -> SchurState:
    if label in STATE_BUILDERS:
        return STATE_BUILDERS[label](n)
    if label.startswith("dicke:"):
        return SchurState.dicke(n, int(label.split(":", 1)[1]))
    raise ConfigError(f"unknown state {label!r}; use all-plus, all-zero or dicke:<w>")


def cmd_shadows(cfg: Config) -> int:
    n = int(cfg.require("n"))
    seed = int(cfg.require("seed"))
    count = int(cfg.get("snapshots", 10000))
    protocol = str(cfg.get("protocol", "both"))
    if protocol not in ("symmetrized", "deep", "both"):
        raise ConfigError("protocol must be symmetrized, deep or both")
    if count < 2:
        raise ConfigError("need at least two snapshots")
    state = _build_state(str(cfg.get("state", "all-plus")), n)
    kinds = cfg.get("observables")
    if kinds is None:
        kinds = list(GENERATOR_KINDS)
    else:
        kinds = [k.strip() for k in str(kinds).split(",") if k.strip()]
        unknown = set(kinds) - set(GENERATOR_KINDS)
        if unknown:
            raise ConfigError(f"unknown observables {sorted(unknown)}")

    protocols = ["symmetrized", "deep"] if protocol == "both" else [protocol]
    if "symmetrized" in protocols and n > SYMMETRIZED_MAX_N:
        raise ResourceGuard(f"symmetrized protocol guarded at n <= {SYMMETRIZED_MAX_N}")
    if "deep" in protocols and n > DEEP_MAX_N:
        raise ResourceGuard(f"deep protocol guarded at n <= {DEEP_MAX_N}")

    observables = {k: generator(k, n) for k in kinds}
    rows = []
    for proto in protocols:
        if proto == "symmetrized":
            snaps = shadows_mod.collect_symmetrized(state, count, seed)
            chan = shadows_mod.channel_matrix(n)
            for kind in kinds:
                obs = observables[kind]
                est = shadows_mod.estimate_symmetrized(snaps, obs, chan)
                mean, se = shadows_mod.aggregate_mean(est)
                rows.append(
                    [
                        proto, kind, expectation(state, obs), mean, se,
                        float(np.var(est, ddof=1)),
                        shadows_mod.variance_bound_symmetrized(n, obs),
                        count,
                    ]
                )
        else:
            snaps = shadows_mod.collect_deep(state, count, seed)
            rows_cache = [shadows_mod.register_row(s, n) for s in snaps]
            for kind in kinds:
                obs = observables[kind]
                est = shadows_mod.estimate_deep(snaps, obs, rows=rows_cache)
                mean, se = shadows_mod.aggregate_mean(est)
                rows.append(
                    [
                        proto, kind, expectation(state, obs), mean, se,
                        float(np.var(est, ddof=1)),
                        shadows_mod.variance_bound_deep(n, obs),
                        count,
                    ]
                )

    header = [
        "protocol", "observable", "truth", "estimate", "std_error",
        "empirical_variance", "variance_bound", "n_snapshots",
    ]
    _write_rows(cfg.get("out"), header, rows)
    return EXIT_OK


# -- verify -----------------------------------------------------------------------


def cmd_verify(cfg: Config) -> int:
    ns = _parse_int_list(str(cfg.get("ns", "2,3,4,5,6")))
    if not ns or min(ns) < 2:
        raise ConfigError("need qubit counts >= 2")
    if max(ns) > 8:
        raise ConfigError("dense cross-checks are limited to n <= 8")
    fault = cfg.get("inject_fault")
    if fault is not None and fault not in verify_mod.FAULT_MODES:
        raise ConfigError(f"unknown fault {fault!r}, know {verify_mod.FAULT_MODES}")
    seed = int(cfg.get("seed", 7))

    results = verify_mod.run_suite(ns=tuple(ns), seed=seed, fault=fault)
    payload = verify_mod.report(results)
    _write_json(cfg.get("report"), payload)
    return EXIT_OK if payload["passed"] else EXIT_VERIFY


# -- argument plumbing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schursim",
        description="Sector-block simulator for permutation-symmetric qubit systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--threads", type=int, help=f"worker bound (env {THREADS_ENV})")
        p.add_argument("--out", help="output path ('-' for stdout)")

    p = sub.add_parser("blocks", help="dump per-sector matrices as JSON")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--kind", help=f"one of {sorted(GENERATOR_KINDS)}")
    p.add_argument("--kvec", help="letter counts kx,ky,kz of a symmetrized word")
    p.add_argument("--sectors", help="comma list of sector labels to include")
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("lmg-sweep", help="digitized adiabatic sweep, CSV output")
    common(p)
    p.add_argument("--ns", help="comma list of qubit counts")
    p.add_argument("--j", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--hz", help="explicit comma list of field values")
    p.add_argument("--hz-min", dest="hz_min", type=float)
    p.add_argument("--hz-max", dest="hz_max", type=float)
    p.add_argument("--hz-step", dest="hz_step", type=float)
    p.add_argument("--layers", type=int, help="override default L = 4n")
    p.add_argument("--total-time", dest="total_time", type=float,
                   help="override default T = 10n")
    p.set_defaults(func=cmd_lmg_sweep)

    p = sub.add_parser("bench", help="time kernels and fit log-log exponents")
    common(p)
    p.add_argument("--task", help="aqc, twirl or layer")
    p.add_argument("--ns", help="comma list of qubit counts")
    p.add_argument("--reps", type=int)
    p.add_argument("--kvec", help="weight vector for the twirl task")
    p.add_argument("--seed", type=int, help="accepted for config uniformity")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("shadows", help="snapshot protocols vs exact expectations")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--protocol", help="symmetrized, deep or both")
    p.add_argument("--snapshots", type=int)
    p.add_argument("--observables", help="comma list of generator kinds")
    p.add_argument("--state", help="all-plus, all-zero or dicke:<w>")
    p.add_argument("--seed", type=int, help="required; keys the snapshot streams")
    p.set_defaults(func=cmd_shadows)

    p = sub.add_parser("verify", help="dense cross-check suite, JSON report")
    common(p)
    p.add_argument("--ns", help="comma list of qubit counts (<= 8)")
    p.add_argument("--seed", type=int)
    p.add_argument("--inject-fault", dest="inject_fault",
                   choices=list(verify_mod.FAULT_MODES),
                   help="deliberately corrupt one computation (suite self-test)")
    p.add_argument("--report", help="JSON report path ('-' for stdout)")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(Config(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceGuard as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except MemoryError:
        print("resource guard: out of memory", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
