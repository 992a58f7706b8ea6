"""Command line front end.

Subcommands ``distance``, ``flow``, ``mds``, ``sample`` and ``bench`` each
read a JSON configuration (``--config``) validated against a schema. All
randomness derives from ``--seed`` and results do not depend on
``--threads``.

Exit codes: 0 success, 2 invalid configuration or input file, 3 manifold
mismatch between inputs, 4 numerical failure, 5 divergence.
"""

import argparse
import csv
import io as _io
import json
import logging
import os
import sys
import time

import jsonschema
import numpy as np

from . import io as pcio
from .chsw import ChswConfig, DiscreteMeasure, chsw
from .errors import DescriptorMismatch, HadamardSWError, SchemaError
from .flows import FlowConfig, run_flow
from .manifolds import (
    PROJECTIONS,
    Euclidean,
    Lorentz,
    Mahalanobis,
    Poincare,
    SPDAffineInvariant,
    SPDLogCholesky,
    SPDLogEuclidean,
    SPDOnq,
    make_manifold,
)
from .mds import MdsProblem, mds_fit
from .sampling import sample_gaussian, sample_mixture, sample_spd_log_gaussian, sample_wrapped_normal

logger = logging.getLogger("hadamard_sw")

_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_VECTOR = {"type": "array", "items": {"type": "number"}}
_PROJ = {"enum": list(PROJECTIONS)}
_POS_INT = {"type": "integer", "minimum": 1}
_SEED = {"type": "integer", "minimum": 0}

_SOURCE = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"file": {"type": "string"}},
            "required": ["file"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "sampler": {"const": "gaussian"},
                "n": _POS_INT,
                "mean": _VECTOR,
                "cov": _MATRIX,
                "manifold": {"type": "object"},
            },
            "required": ["sampler", "n", "mean", "cov"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "sampler": {"const": "wrapped_normal"},
                "n": _POS_INT,
                "mean": _VECTOR,
                "cov": _MATRIX,
                "curvature": {"type": "number", "exclusiveMaximum": 0},
            },
            "required": ["sampler", "n", "mean", "cov"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "sampler": {"const": "mixture"},
                "n": _POS_INT,
                "curvature": {"type": "number", "exclusiveMaximum": 0},
                "components": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": {
                            "weight": {"type": "number", "minimum": 0},
                            "mean": _VECTOR,
                            "cov": _MATRIX,
                        },
                        "required": ["weight", "mean", "cov"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["sampler", "n", "components"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "sampler": {"const": "spd_log_gaussian"},
                "n": _POS_INT,
                "base": _MATRIX,
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "metric": {
                    "enum": [
                        "spd_log_euclidean",
                        "spd_onq",
                        "spd_log_cholesky",
                        "spd_affine_invariant",
                    ]
                },
                "p": {"type": "number", "exclusiveMinimum": 0},
                "q": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["sampler", "n", "base", "scale"],
            "additionalProperties": False,
        },
    ]
}

SCHEMAS = {
    "distance": {
        "type": "object",
        "properties": {
            "mu": {"type": "string"},
            "nu": {"type": "string"},
            "p": {"type": "number", "minimum": 1},
            "num_projections": _POS_INT,
            "projection": _PROJ,
            "seed": _SEED,
        },
        "required": ["mu", "nu"],
        "additionalProperties": False,
    },
    "flow": {
        "type": "object",
        "properties": {
            "init": _SOURCE,
            "target": _SOURCE,
            "step_size": {"type": "number", "minimum": 0},
            "num_steps": _POS_INT,
            "num_projections": _POS_INT,
            "projection": _PROJ,
            "eval_every": _POS_INT,
            "eval_projections": _POS_INT,
            "resample_directions": {"type": "boolean"},
            "record_w2": {"type": "boolean"},
            "history": {"type": "string"},
            "snapshot_prefix": {"type": "string"},
            "seed": _SEED,
        },
        "required": ["init", "target"],
        "additionalProperties": False,
    },
    "mds": {
        "type": "object",
        "properties": {
            "delta": {"type": "string"},
            "scale": {"type": "number", "exclusiveMinimum": 0},
            "target_dim": _POS_INT,
            "max_iters": _POS_INT,
            "step_size": {"type": "number", "exclusiveMinimum": 0},
            "embedding": {"type": "string"},
            "init": {"enum": ["spectral", "random"]},
            "seed": _SEED,
        },
        "required": ["delta"],
        "additionalProperties": False,
    },
    "sample": {
        "type": "object",
        "properties": {"source": _SOURCE, "seed": _SEED},
        "required": ["source"],
        "additionalProperties": False,
    },
    "bench": {
        "type": "object",
        "properties": {
            "grid": {
                "type": "object",
                "properties": {
                    "kind": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                    "projection": {"type": "array", "minItems": 1, "items": _PROJ},
                    "n": {"type": "array", "minItems": 1, "items": _POS_INT},
                    "L": {"type": "array", "minItems": 1, "items": _POS_INT},
                    "d": {"type": "array", "minItems": 1, "items": _POS_INT},
                    "p": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 1}},
                },
                "required": ["kind", "projection", "n", "L", "d", "p"],
                "additionalProperties": False,
            },
            "seed": _SEED,
        },
        "required": ["grid"],
        "additionalProperties": False,
    },
}

BENCH_KINDS = {
    "euclidean": Euclidean,
    "mahalanobis": lambda d: Mahalanobis(np.diag(np.arange(1.0, d + 1.0))),
    "lorentz": Lorentz,
    "poincare": Poincare,
    "spd_log_euclidean": SPDLogEuclidean,
    "spd_onq": SPDOnq,
    "spd_log_cholesky": SPDLogCholesky,
    "spd_affine_invariant": SPDAffineInvariant,
}

# stream tags for the generators derived from --seed
_TAG_INIT, _TAG_TARGET, _TAG_SAMPLE, _TAG_BENCH = 11, 12, 13, 14


def _rng(seed, *tags):
    return np.random.default_rng([int(seed), *tags])


def _dump(doc):
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _resolve(base_dir, path):
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def load_source(src, rng, base_dir="."):
    """Build ``(manifold, points, weights)`` from a file reference or a sampler description."""
    if "file" in src:
        return pcio.read_point_cloud(_resolve(base_dir, src["file"]))
    kind = src["sampler"]
    n = src["n"]
    if kind == "gaussian":
        m = make_manifold(src["manifold"]) if "manifold" in src else Euclidean(len(src["mean"]))
        return m, sample_gaussian(src["mean"], src["cov"], n, rng), None
    if kind == "wrapped_normal":
        m = Lorentz(len(src["mean"]) - 1, src.get("curvature", -1.0))
        return m, sample_wrapped_normal(m, src["mean"], src["cov"], n, rng), None
    if kind == "mixture":
        d = len(src["components"][0]["mean"]) - 1
        m = Lorentz(d, src.get("curvature", -1.0))
        comps = [(c["weight"], c["mean"], c["cov"]) for c in src["components"]]
        return m, sample_mixture(m, comps, n, rng), None
    base = np.asarray(src["base"], dtype=float)
    metric = src.get("metric", "spd_log_euclidean")
    d = base.shape[-1]
    if metric == "spd_onq":
        m = SPDOnq(d, src.get("p", 1.0), src.get("q", 1.0))
    else:
        m = make_manifold({"kind": metric, "dim": d * d})
    return m, sample_spd_log_gaussian(base, src["scale"], n, rng), None


def cmd_distance(cfg, seed, threads, base_dir="."):
    m1, x, wx = pcio.read_point_cloud(_resolve(base_dir, cfg["mu"]))
    m2, y, wy = pcio.read_point_cloud(_resolve(base_dir, cfg["nu"]))
    mu = DiscreteMeasure(m1, x, wx)
    nu = DiscreteMeasure(m2, y, wy)
    conf = ChswConfig(
        p=float(cfg.get("p", 2.0)),
        num_projections=int(cfg.get("num_projections", 64)),
        projection=cfg.get("projection", "geodesic"),
        seed=seed,
        threads=threads,
    )
    t0 = time.perf_counter()
    est = chsw(mu, nu, conf)
    wall = (time.perf_counter() - t0) * 1e3
    per = est.per_direction
    doc = {
        "chsw_p": est.value_p,
        "chsw": est.value,
        "L": est.directions_used,
        "p": conf.p,
        "projection": conf.projection,
        "seed": seed,
        "stderr": est.stderr,
        "per_direction_stats": {"mean": float(np.mean(per)), "std": float(np.std(per))},
        "wall_time_ms": wall,
    }
    return _dump(doc)


def cmd_flow(cfg, seed, threads, base_dir="."):
    m, x, _ = load_source(cfg["init"], _rng(seed, _TAG_INIT), base_dir)
    m2, y, wy = load_source(cfg["target"], _rng(seed, _TAG_TARGET), base_dir)
    if m != m2:
        raise DescriptorMismatch(
            f"init and target live on different manifolds: {m.descriptor()} vs {m2.descriptor()}"
        )
    conf = FlowConfig(
        step_size=float(cfg.get("step_size", 0.1)),
        num_steps=int(cfg.get("num_steps", 100)),
        num_projections=int(cfg.get("num_projections", 64)),
        projection=cfg.get("projection", "geodesic"),
        seed=seed,
        eval_every=int(cfg.get("eval_every", 10)),
        eval_projections=cfg.get("eval_projections"),
        resample_directions=bool(cfg.get("resample_directions", True)),
        record_w2=bool(cfg.get("record_w2", len(x) <= 512)),
        threads=threads,
    )
    prefix = cfg.get("snapshot_prefix")

    def snapshot(state):
        if prefix:
            path = _resolve(base_dir, f"{prefix}_{state.step:06d}.txt")
            pcio.write_point_cloud(path, m, state.particles)

    t0 = time.perf_counter()
    state = run_flow(m, x, y, conf, wy, callback=snapshot)
    wall = (time.perf_counter() - t0) * 1e3
    if cfg.get("history"):
        with open(_resolve(base_dir, cfg["history"]), "w", encoding="utf-8") as fh:
            for rec in state.history:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    first, last = state.history[0], state.history[-1]
    summary = {"steps": state.step, "initial_chsw": first["chsw"], "final_chsw": last["chsw"]}
    if "w2_exact" in first:
        summary["initial_w2"] = first["w2_exact"]
        summary["final_w2"] = last["w2_exact"]
    doc = {
        "descriptor": m.descriptor(),
        "history": state.history,
        "summary": summary,
        "wall_time_ms": wall,
    }
    return _dump(doc)


def cmd_mds(cfg, seed, threads, base_dir="."):
    delta = pcio.read_distance_matrix(_resolve(base_dir, cfg["delta"]))
    prob = MdsProblem(
        delta,
        scale=float(cfg.get("scale", 1.0)),
        target_dim=int(cfg.get("target_dim", 2)),
        max_iters=int(cfg.get("max_iters", 5000)),
        step_size=float(cfg.get("step_size", 0.1)),
        seed=seed,
        init=cfg.get("init", "spectral"),
    )
    t0 = time.perf_counter()
    res = mds_fit(prob)
    wall = (time.perf_counter() - t0) * 1e3
    if cfg.get("embedding"):
        pcio.write_point_cloud(_resolve(base_dir, cfg["embedding"]), Lorentz(prob.target_dim), res.points)
    total = float(np.sum(np.triu(prob.delta, 1) ** 2))
    doc = {
        "n": int(delta.shape[0]),
        "loss": res.loss,
        "stress_ratio": res.loss / total if total > 0 else 0.0,
        "iterations": res.iterations,
        "embedding": [[float(v) for v in row] for row in res.points],
        "wall_time_ms": wall,
    }
    return _dump(doc)


def cmd_sample(cfg, seed, threads, base_dir="."):
    m, pts, w = load_source(cfg["source"], _rng(seed, _TAG_SAMPLE), base_dir)
    return pcio.dumps_point_cloud(m, pts, w)


def cmd_bench(cfg, seed, threads, base_dir="."):
    grid = cfg["grid"]
    for kind in grid["kind"]:
        if kind not in BENCH_KINDS:
            raise SchemaError(f"bench: unsupported kind {kind!r}")
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "projection", "n", "L", "d", "p", "wall_time_ms", "value"])
    row_id = 0
    for kind in grid["kind"]:
        for proj in grid["projection"]:
            for n in grid["n"]:
                for L in grid["L"]:
                    for d in grid["d"]:
                        for p in grid["p"]:
                            row_id += 1
                            m = BENCH_KINDS[kind](d)
                            if not m.supports(proj):
                                writer.writerow([kind, proj, n, L, d, p, "", "unsupported"])
                                continue
                            rng = _rng(seed, _TAG_BENCH, row_id)
                            x = m.random_points(rng, n, 1.0)
                            y = m.random_points(rng, n, 1.0)
                            conf = ChswConfig(p=float(p), num_projections=L, projection=proj, seed=seed, threads=threads)
                            t0 = time.perf_counter()
                            est = chsw(DiscreteMeasure(m, x), DiscreteMeasure(m, y), conf)
                            wall = (time.perf_counter() - t0) * 1e3
                            writer.writerow([kind, proj, n, L, d, p, f"{wall:.3f}", repr(est.value)])
    return buf.getvalue()


COMMANDS = {
    "distance": cmd_distance,
    "flow": cmd_flow,
    "mds": cmd_mds,
    "sample": cmd_sample,
    "bench": cmd_bench,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hadamard-sw",
        description="Projection-based optimal transport tools for Euclidean, hyperbolic, SPD and product manifolds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON configuration file")
        sp.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads")
        sp.add_argument("--output", default=None, help="result file (default: stdout)")
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(path, command):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"config {path}: {loc}: {exc.message}") from exc
    return cfg


def run(argv=None):
    """Execute the CLI and return ``(exit_code, output_text)``."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args.config, args.command)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        if seed < 0:
            raise SchemaError("--seed must be nonnegative")
        if args.threads < 1:
            raise SchemaError("--threads must be positive")
        base_dir = os.path.dirname(os.path.abspath(args.config))
        text = COMMANDS[args.command](cfg, seed, args.threads, base_dir)
    except HadamardSWError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code, None
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0, text


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
