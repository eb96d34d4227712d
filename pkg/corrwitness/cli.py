"""`corrwitness` command line: one subcommand per experiment, plus verify and replay.

Exit status: 0 on success, 1 on a runtime error or a failed verification,
2 on a usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__, checks, config, reports
from .dephasing import family_spec
from .errors import CorrWitnessError, InvalidInputError, UsageError
from .sampling import haar_unitary, sample_rng
from .sim import concurrence_map, default_config, delta_traces, frequency_curve
from .types import DephasingParams, Model, RunManifest, SpinStarParams, StateFamily

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

FAMILIES = [f.value for f in StateFamily]
MODELS = [m.value for m in Model]


# -----------------------------
# Argument parsing
# -----------------------------

def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--out", default=None, help="output path, '-' for stdout (default)")
    p.add_argument("--config", default=None, help="flat TOML file with defaults for these flags")


def _add_physical(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("dephasing model")
    g.add_argument("--epsilon", type=float, default=None)
    g.add_argument("--omega", type=float, default=None)
    g.add_argument("--g0", type=float, default=None)
    g.add_argument("--z-re", type=float, default=None)
    g.add_argument("--z-im", type=float, default=None)


def _add_amplitudes(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("amplitudes (normalized on input; equal weights when omitted)")
    for name in ("--b1-re", "--b1-im", "--b2-re", "--b2-im"):
        g.add_argument(name, type=float, default=None)
    g.add_argument("--equal-weights", action="store_true", default=None, help="b1 = b2 = 1/sqrt(2)")


def _add_spin_star(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("spin star")
    g.add_argument("--n-bath", type=int, default=None)
    g.add_argument("--a0", type=float, default=None)


def _add_sampling(p: argparse.ArgumentParser, families: Sequence[str] = FAMILIES) -> None:
    p.add_argument("--family", choices=families, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--lambda-points", type=int, default=None)
    p.add_argument("--time-points", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None, help="increase threshold (default 1e-9)")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default $CORRWITNESS_THREADS or all cores)")
    p.add_argument("--js-log", choices=sorted(config.JS_LOG_BASES), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrwitness", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default) or ERROR")
    parser.add_argument("--quiet", action="store_true", help="no progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("timetrace", help="Delta D_k(lambda, t) for fixed amplitudes")
    _add_output(p)
    _add_physical(p)
    _add_amplitudes(p)
    _add_spin_star(p)
    p.add_argument("--model", choices=MODELS, default=None)
    p.add_argument("--family", choices=FAMILIES, default=None)
    p.add_argument("--lambda", dest="lambdas", default=None, help="comma-separated lambdas (default 0.1)")
    p.add_argument("--time-points", type=int, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--js-log", choices=sorted(config.JS_LOG_BASES), default=None)

    p = sub.add_parser("frequency", help="frequency of increase f^k(lambda), dephasing model")
    _add_output(p)
    _add_physical(p)
    _add_sampling(p)

    p = sub.add_parser("concurrence", help="concurrence map C(lambda, t) and its threshold")
    _add_output(p)
    _add_physical(p)
    _add_amplitudes(p)
    p.add_argument("--family", choices=FAMILIES, default=None)
    p.add_argument("--lambda-points", type=int, default=None)
    p.add_argument("--time-points", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)

    p = sub.add_parser("spinstar", help="frequency of increase f^k(lambda), spin-star model")
    _add_output(p)
    _add_spin_star(p)
    _add_sampling(p)
    p.add_argument("--t-max", type=float, default=None)

    p = sub.add_parser("verify", help="oracle, property and witness-bound checks")
    _add_output(p)
    _add_physical(p)
    p.add_argument("--suite", choices=[*checks.SUITES, "all"], default=None)
    p.add_argument("--quick", action="store_true", default=None, help="reduced sample counts")

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="write to this path instead of the recorded one")
    return parser


# -----------------------------
# Helpers
# -----------------------------

def _checked(factory: Callable, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except InvalidInputError as e:
        raise UsageError(str(e)) from e


def _positive(cfg: Dict[str, object], *names: str) -> None:
    for name in names:
        value = cfg[name]
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be a positive integer, got {value}")


def _dephasing_params(cfg) -> DephasingParams:
    z = complex(cfg["z_re"], cfg["z_im"])
    return _checked(DephasingParams, cfg["epsilon"], cfg["omega"], cfg["g0"], z)


def _spin_star_params(cfg) -> SpinStarParams:
    if isinstance(cfg["n_bath"], bool) or not isinstance(cfg["n_bath"], int) or cfg["n_bath"] < 2:
        raise UsageError(f"--n-bath must be at least 2, got {cfg['n_bath']}")
    return _checked(SpinStarParams, cfg["a0"], cfg["n_bath"])


def _amplitudes(cfg) -> Tuple[complex, complex]:
    given = [cfg[k] for k in ("b1_re", "b1_im", "b2_re", "b2_im")]
    if cfg["equal_weights"] and any(v is not None for v in given):
        raise UsageError("--equal-weights cannot be combined with explicit amplitudes")
    if all(v is None for v in given):
        return complex(1.0 / np.sqrt(2.0)), complex(1.0 / np.sqrt(2.0))
    re1, im1, re2, im2 = (0.0 if v is None else float(v) for v in given)
    v = np.array([complex(re1, im1), complex(re2, im2)])
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise UsageError("amplitudes b1 and b2 cannot both be zero")
    v = v / norm
    return complex(v[0]), complex(v[1])


def _family(name: str) -> StateFamily:
    try:
        return StateFamily(name)
    except ValueError:
        raise UsageError(f"unknown family {name!r}; expected one of {FAMILIES}") from None


def _model(name: str) -> Model:
    try:
        return Model(name)
    except ValueError:
        raise UsageError(f"unknown model {name!r}; expected one of {MODELS}") from None


def _lambdas(text) -> List[float]:
    try:
        values = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as e:
        raise UsageError(f"--lambda expects comma-separated numbers, got {text!r}") from e
    if not values:
        raise UsageError("--lambda needs at least one value")
    for lam in values:
        if not 0.0 <= lam <= 1.0:
            raise UsageError(f"lambda must lie in [0, 1], got {lam}")
    return values


def _experiment_config(model: Model, params, cfg, samples: int = 1):
    return _checked(
        default_config,
        model,
        params,
        samples=samples,
        master_seed=cfg["seed"],
        lambda_points=cfg.get("lambda_points", 1),
        time_points=cfg["time_points"],
        t_max=cfg.get("t_max"),
        increase_tolerance=cfg.get("tolerance", 1e-9),
        js_log_base=config.js_log_base(cfg.get("js_log", "bits")),
    )


# -----------------------------
# Commands
# -----------------------------

def cmd_timetrace(cfg, progress: bool) -> Tuple[int, List[str]]:
    model = _model(cfg["model"])
    family = _family(cfg["family"])
    _positive(cfg, "time_points")
    params = _dephasing_params(cfg) if model is Model.DEPHASING else _spin_star_params(cfg)
    exp = _experiment_config(model, params, cfg)
    b1, b2 = _amplitudes(cfg)
    results = []
    for lam in _lambdas(cfg["lambdas"]):
        # One local unitary per seed, shared by every lambda.
        rng = sample_rng(cfg["seed"], 0)
        spec = _checked(family_spec, family, b1, b2, lam, rng)
        results.append((lam, exp.time_grid, delta_traces(model, params, spec, exp.time_grid, exp.js_log_base)))
    path = reports.write_text(cfg["out"], reports.timetrace_csv(results))
    return 0, [str(path)] if path else []


def cmd_frequency(cfg, progress: bool) -> Tuple[int, List[str]]:
    _positive(cfg, "samples", "lambda_points", "time_points")
    params = _dephasing_params(cfg)
    exp = _experiment_config(Model.DEPHASING, params, cfg, samples=cfg["samples"])
    curve = frequency_curve(Model.DEPHASING, params, _family(cfg["family"]), exp,
                            threads=config.resolve_threads(cfg["threads"]), progress=progress)
    path = reports.write_text(cfg["out"], reports.frequency_csv(curve))
    return 0, [str(path)] if path else []


def cmd_spinstar(cfg, progress: bool) -> Tuple[int, List[str]]:
    _positive(cfg, "samples", "lambda_points", "time_points")
    params = _spin_star_params(cfg)
    exp = _experiment_config(Model.SPINSTAR, params, cfg, samples=cfg["samples"])
    curve = frequency_curve(Model.SPINSTAR, params, _family(cfg["family"]), exp,
                            threads=config.resolve_threads(cfg["threads"]), progress=progress)
    path = reports.write_text(cfg["out"], reports.spinstar_csv(curve, params.n_bath, params.a0))
    return 0, [str(path)] if path else []


def cmd_concurrence(cfg, progress: bool) -> Tuple[int, List[str]]:
    _positive(cfg, "lambda_points", "time_points")
    params = _dephasing_params(cfg)
    exp = _experiment_config(Model.DEPHASING, params, cfg)
    family = _family(cfg["family"])
    b1, b2 = _amplitudes(cfg)
    unitary = haar_unitary(sample_rng(cfg["seed"], 0)) if family is StateFamily.HAAR_RANDOM else None
    cmap = concurrence_map(params, b1, b2, exp, family=family, unitary=unitary)
    outputs = []
    path = reports.write_text(cfg["out"], reports.concurrence_csv(cmap))
    if path is None:
        sys.stderr.write(reports.concurrence_summary(cmap))
    else:
        outputs.append(str(path))
        outputs.append(str(reports.write_text(reports.summary_path(cfg["out"]), reports.concurrence_summary(cmap))))
    logger.info("concurrence threshold lambda: %s", cmap.threshold_lambda)
    return 0, outputs


def cmd_verify(cfg, progress: bool) -> Tuple[int, List[str]]:
    params = _dephasing_params(cfg)
    results = checks.run_suite(cfg["suite"], params, seed=cfg["seed"], quick=bool(cfg["quick"]), progress=progress)
    path = reports.write_text(cfg["out"], reports.verify_report(results))
    return (0 if checks.all_passed(results) else 1), [str(path)] if path else []


COMMANDS: Dict[str, Callable[[Dict[str, object], bool], Tuple[int, List[str]]]] = {
    "timetrace": cmd_timetrace,
    "frequency": cmd_frequency,
    "concurrence": cmd_concurrence,
    "spinstar": cmd_spinstar,
    "verify": cmd_verify,
}


def run(command: str, cfg: Dict[str, object], progress: bool = False) -> int:
    """Run a resolved command and record its manifest next to the output."""
    logger.info("running %s (seed %s)", command, cfg.get("seed"))
    status, outputs = COMMANDS[command](cfg, progress)
    manifest = RunManifest(
        command=command,
        config=dict(cfg),
        master_seed=cfg.get("seed"),
        version=__version__,
        outputs=outputs,
    )
    reports.write_manifest(cfg["out"], manifest)
    return status


def cmd_replay(manifest_path: str, out: Optional[str], progress: bool) -> int:
    manifest = reports.read_manifest(manifest_path)
    if manifest.command not in COMMANDS:
        raise UsageError(f"manifest records unknown command {manifest.command!r}")
    cfg = config.resolve(manifest.command, {"out": out}, manifest.config)
    logger.info("replaying %s from %s", manifest.command, manifest_path)
    return run(manifest.command, cfg, progress)


# -----------------------------
# Entry point
# -----------------------------

def setup_logging(level: Optional[str]) -> None:
    level = (level or config.default_log_level()).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise UsageError(f"unknown log level {level!r}")
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger("corrwitness").setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        setup_logging(args.log_level)
        progress = not args.quiet and sys.stderr.isatty()
        if args.command == "replay":
            return cmd_replay(args.manifest, args.out, progress)
        flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "log_level", "quiet")}
        file_values = config.load_config_file(args.config) if args.config else None
        cfg = config.resolve(args.command, flags, file_values)
        return run(args.command, cfg, progress)
    except UsageError as e:
        print(f"corrwitness: error: {e}", file=sys.stderr)
        return 2
    except CorrWitnessError as e:
        logger.error("%s", e)
        print(f"corrwitness: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
