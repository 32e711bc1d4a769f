"""Command-line front end.

Subcommands: sample, evolve, components, stats, survival, scaling,
verify.  Options may come from flags or from a JSON config file
(``--config-file``), with explicit flags taking precedence.  Every
command rerun with the same configuration and seed produces
byte-identical output.

Exit codes: 0 success or all checks passed, 1 check failure, 2 usage or
configuration error, 3 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from . import __version__
from .analysis import degree_fit_test
from .branching import CONFIGURATIONS, survival_fractions
from .digraph import edge_list_text, read_edge_list
from .sampler import evolve_chain, sample_graph_fast
from .scaling import scaling_exponent_experiment
from .structure import component_summary, degree_arrays
from .verify import SUITES, check_graph_against_model, run_suite
from .weights import (
    NormalizerMode,
    ParetoMirrored,
    critical_pareto_mirrored,
    model_to_json,
    moments,
    normalizer,
    parse_model,
    sample_weights,
)

__all__ = ["RunConfig", "UsageError", "IOFailure", "main"]

THREADS_ENV = "POISSON_DIGRAPH_THREADS"

_MODEL_HELP = (
    "weight model, e.g. constant:2, pareto-mirrored:3.5,1, oriented-nr:pareto:3.5,1,"
    " independent-product:constant:2|constant:2, or a JSON object"
)


class UsageError(Exception):
    """Invalid flags or configuration (exit code 2)."""


class IOFailure(Exception):
    """Unreadable, unwritable or malformed files (exit code 3)."""


@dataclass(frozen=True)
class RunConfig:
    """All tunables of one CLI invocation; absent fields stay None.

    Round-trips losslessly through JSON; unknown fields are rejected on
    input so configuration typos fail loudly.
    """

    model: str | None = None
    n: int | None = None
    seed: int | None = None
    normalizer_mode: str | None = None
    out: str | None = None
    graph: str | None = None
    reps: int | None = None
    kmax: int | None = None
    threshold: float | None = None
    tol: float | None = None
    configuration: str | None = None
    n_list: tuple[int, ...] | None = None
    n_from: int | None = None
    n_to: int | None = None
    suite: str | None = None
    tau: float | None = None
    critical: bool | None = None
    k: int | None = None
    threads: int | None = None
    sources: int | None = None
    bootstrap: int | None = None
    as_json: bool | None = None

    def to_json(self) -> str:
        payload = asdict(self)
        if payload["n_list"] is not None:
            payload["n_list"] = list(payload["n_list"])
        return json.dumps(payload, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config fields: {', '.join(unknown)}")
        if data.get("n_list") is not None:
            data["n_list"] = tuple(int(x) for x in data["n_list"])
        return cls(**data)


# -- config resolution helpers ------------------------------------------------


def _merge_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig()
    config_path = getattr(args, "config_file", None)
    if config_path:
        try:
            text = Path(config_path).read_text()
        except OSError as exc:
            raise IOFailure(f"cannot read config file: {exc}") from exc
        base = RunConfig.from_json(text)
    overrides = {}
    for f in fields(RunConfig):
        if hasattr(args, f.name) and getattr(args, f.name) is not None:
            overrides[f.name] = getattr(args, f.name)
    return replace(base, **overrides)


def _seed(cfg: RunConfig) -> int:
    return 0 if cfg.seed is None else int(cfg.seed)


def _norm_mode(cfg: RunConfig) -> NormalizerMode:
    return NormalizerMode(cfg.normalizer_mode or "mu-n")


def _model(cfg: RunConfig):
    if cfg.model is None:
        raise UsageError("--model is required")
    return parse_model(cfg.model)


def _threads(cfg: RunConfig) -> int:
    if cfg.threads is not None:
        return max(1, int(cfg.threads))
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {out}: {exc}") from exc


def _read_graph(cfg: RunConfig):
    if cfg.graph is None:
        raise UsageError("an input edge-list file is required")
    try:
        return read_edge_list(cfg.graph, cfg.n)
    except OSError as exc:
        raise IOFailure(f"cannot read {cfg.graph}: {exc}") from exc
    except ValueError as exc:
        raise IOFailure(f"{cfg.graph}: {exc}") from exc


def _print_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", out)


# -- subcommand handlers ------------------------------------------------------


def cmd_sample(cfg: RunConfig) -> int:
    model = _model(cfg)
    if cfg.n is None or cfg.n < 1:
        raise UsageError(f"--n must be a positive integer, got {cfg.n}")
    seed = _seed(cfg)
    mode = _norm_mode(cfg)
    w = sample_weights(model, cfg.n, seed)
    l_n = normalizer(w, moments(model).mu, mode)
    g = sample_graph_fast(w, l_n, seed)
    meta = {
        "model": json.loads(model_to_json(model)),
        "seed": seed,
        "normalizer_mode": mode.value,
        "l_n": float(l_n),
        "version": __version__,
    }
    _emit(edge_list_text(g, meta), cfg.out)
    return 0


def cmd_evolve(cfg: RunConfig) -> int:
    model = _model(cfg)
    if cfg.n_from is None or cfg.n_to is None:
        raise UsageError("--from and --to are required")
    if not 1 <= cfg.n_from <= cfg.n_to:
        raise UsageError(f"need 1 <= from <= to, got {cfg.n_from}..{cfg.n_to}")
    seed = _seed(cfg)
    mode = _norm_mode(cfg)
    g = evolve_chain(model, cfg.n_from, cfg.n_to, seed, mode)
    meta = {
        "model": json.loads(model_to_json(model)),
        "seed": seed,
        "normalizer_mode": mode.value,
        "n_from": cfg.n_from,
        "n_to": cfg.n_to,
        "version": __version__,
    }
    _emit(edge_list_text(g, meta), cfg.out)
    return 0


def cmd_components(cfg: RunConfig) -> int:
    g, _ = _read_graph(cfg)
    _emit(component_summary(g).to_json(topk=5) + "\n", cfg.out)
    return 0


def cmd_stats(cfg: RunConfig) -> int:
    g, _ = _read_graph(cfg)
    arr = degree_arrays(g)
    payload = {
        "n": g.n,
        "total_arcs": g.total_arcs,
        "total_loops": g.total_loops,
        "mean_in_degree": float(arr.d_in.mean()),
        "mean_out_degree": float(arr.d_out.mean()),
        "max_in_degree": int(arr.d_in.max()),
        "max_out_degree": int(arr.d_out.max()),
        "max_total_degree": int(arr.total.max()),
        "vertices_with_loops": int((arr.loops > 0).sum()),
    }
    code = 0
    if cfg.model is not None:
        fit = degree_fit_test(
            g,
            _model(cfg),
            kmax=cfg.kmax if cfg.kmax is not None else 30,
            threshold=cfg.threshold if cfg.threshold is not None else 0.02,
            seed=_seed(cfg),
        )
        payload["degree_fit"] = {
            "statistic": fit.statistic,
            "threshold": fit.threshold,
            "passed": fit.passed,
            "kmax": fit.kmax,
        }
        code = 0 if fit.passed else 1
    _print_json(payload, cfg.out)
    return code


def cmd_survival(cfg: RunConfig) -> int:
    model = _model(cfg)
    configuration = cfg.configuration or "plain"
    report = survival_fractions(
        model,
        configuration,
        tol=cfg.tol if cfg.tol is not None else 1e-10,
        seed=_seed(cfg),
    )
    _emit(report.to_json() + "\n", cfg.out)
    return 0


def cmd_scaling(cfg: RunConfig) -> int:
    if cfg.model is not None and cfg.tau is not None:
        raise UsageError("give either --model or --tau, not both")
    if cfg.tau is not None:
        model = critical_pareto_mirrored(cfg.tau) if cfg.critical else ParetoMirrored(cfg.tau)
    elif cfg.model is not None:
        if cfg.critical:
            raise UsageError("--critical applies only with --tau")
        model = parse_model(cfg.model)
    else:
        raise UsageError("--model or --tau is required")
    result = scaling_exponent_experiment(
        model,
        cfg.n_list if cfg.n_list is not None else (4096, 8192, 16384, 32768),
        reps=cfg.reps if cfg.reps is not None else 10,
        seed=_seed(cfg),
        sources=cfg.sources if cfg.sources is not None else 64,
        threads=_threads(cfg),
        bootstrap=cfg.bootstrap if cfg.bootstrap is not None else 200,
    )
    text = result.to_json() + "\n" if cfg.as_json else result.to_tsv()
    _emit(text, cfg.out)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.graph is not None and cfg.suite is not None:
        raise UsageError("give either --suite or --graph, not both")
    if cfg.graph is not None:
        if cfg.model is None:
            raise UsageError("--graph mode needs --model to compare against")
        g, _ = _read_graph(cfg)
        checks = [
            check_graph_against_model(
                g,
                _model(cfg),
                kmax=cfg.kmax if cfg.kmax is not None else 30,
                threshold=cfg.threshold if cfg.threshold is not None else 0.02,
                seed=_seed(cfg),
                source=cfg.graph,
            )
        ]
        label = "file"
    else:
        label = cfg.suite or "quick"
        checks = run_suite(label, _seed(cfg))
    all_pass = all(c.passed for c in checks)
    payload = {
        "suite": label,
        "checks": [c.to_dict() for c in checks],
        "all_pass": all_pass,
    }
    _print_json(payload, cfg.out)
    return 0 if all_pass else 1


# -- argument parsing ---------------------------------------------------------


def _n_list(text: str) -> tuple[int, ...]:
    values = tuple(int(part) for part in text.split(",") if part.strip())
    if not values:
        raise ValueError("empty size list")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poisson-digraph",
        description="Sample and analyse conditionally Poissonian random digraphs.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config-file", help="JSON file with RunConfig fields; explicit flags win"
    )
    common.add_argument("--seed", type=int, help="base seed (default 0)")
    common.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("sample", parents=[common], help="sample a graph, write an edge list")
    p.add_argument("--model", help=_MODEL_HELP)
    p.add_argument("--n", type=int, help="number of vertices")
    p.add_argument(
        "--mode",
        dest="normalizer_mode",
        choices=[m.value for m in NormalizerMode],
        help="normalizer L (default mu-n)",
    )
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("evolve", parents=[common], help="grow a graph one vertex at a time")
    p.add_argument("--model", help=_MODEL_HELP)
    p.add_argument("--from", dest="n_from", type=int, help="starting vertex count")
    p.add_argument("--to", dest="n_to", type=int, help="final vertex count")
    p.add_argument(
        "--mode",
        dest="normalizer_mode",
        choices=[m.value for m in NormalizerMode],
        help="normalizer L (default mu-n; empirical is not monotone and is rejected)",
    )
    p.set_defaults(handler=cmd_evolve)

    p = sub.add_parser("components", parents=[common], help="component summary of an edge list")
    p.add_argument("--in", dest="graph", help="input edge-list file")
    p.add_argument("--n", type=int, help="vertex count override for headerless files")
    p.set_defaults(handler=cmd_components)

    p = sub.add_parser("stats", parents=[common], help="degree statistics of an edge list")
    p.add_argument("--in", dest="graph", help="input edge-list file")
    p.add_argument("--n", type=int, help="vertex count override for headerless files")
    p.add_argument("--model", help="optional model to fit degrees against")
    p.add_argument("--kmax", type=int, help="degree truncation for the fit")
    p.add_argument("--threshold", type=float, help="TV pass threshold for the fit")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("survival", parents=[common], help="limiting cluster fractions")
    p.add_argument("--model", help=_MODEL_HELP)
    p.add_argument(
        "--config",
        dest="configuration",
        choices=list(CONFIGURATIONS),
        help="construction the fractions refer to (default plain)",
    )
    p.add_argument("--tol", type=float, help="fixed-point tolerance (default 1e-10)")
    p.set_defaults(handler=cmd_survival)

    p = sub.add_parser("scaling", parents=[common], help="critical cluster-size scaling")
    p.add_argument("--model", help=_MODEL_HELP + " (must be critically tuned)")
    p.add_argument("--tau", type=float, help="capacity tail exponent for a Pareto run")
    p.add_argument(
        "--critical",
        action="store_true",
        default=None,
        help="tune the Pareto scale to criticality (with --tau)",
    )
    p.add_argument("--n-list", dest="n_list", type=_n_list, help="comma-separated sizes")
    p.add_argument("--reps", type=int, help="replicates per size (default 10)")
    p.add_argument("--sources", type=int, help="forward-cluster root sample size")
    p.add_argument("--bootstrap", type=int, help="bootstrap resamples for the CI")
    p.add_argument(
        "--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)"
    )
    p.add_argument(
        "--json",
        dest="as_json",
        action="store_true",
        default=None,
        help="emit JSON instead of TSV",
    )
    p.set_defaults(handler=cmd_scaling)

    p = sub.add_parser("verify", parents=[common], help="run proposition checks")
    p.add_argument("--suite", choices=list(SUITES), help="check suite (default quick)")
    p.add_argument("--graph", help="check an existing edge-list file instead")
    p.add_argument("--model", help="model the graph is checked against")
    p.add_argument("--kmax", type=int, help="degree truncation for the file check")
    p.add_argument("--threshold", type=float, help="TV pass threshold for the file check")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        return args.handler(cfg)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
