"""
Batch front end.

Subcommands: ``simulate``, ``fit-aux``, ``transfer``, ``tune``, ``evaluate``
and ``pipeline``.  Every subcommand writes its artifacts plus a
``manifest.json`` into ``--out``.  Flags may also come from a flat
``key=value`` file given with ``--config`` (flags on the command line win).

Exit status: 0 on success, 1 on usage errors, 2 on data errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .elastic import AuxiliaryKnowledge, TransferConfig, elastic_fit, extract_knowledge
from .exceptions import ElasticC3Error, LengthMismatch
from .fileio import (
    format_labels,
    format_matrix,
    format_trace,
    load_labels,
    load_matrix,
    select_top_variance,
)
from .itcc import itcc_fit
from .metrics import evaluate
from .simgen import GENERATOR, SimulationParams, generate
from .tuning import CRITERIA, GridSpec, default_workers, grid_search

__all__ = ["main", "run", "build_parser", "UsageError"]

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return tuple(float(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return tuple(int(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_common(p, seed=True):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="flat key=value file supplying defaults for any flag")
    if seed:
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=8)


def _add_sim(p):
    p.add_argument("--n-aux", type=int, default=100)
    p.add_argument("--n-target", type=int, default=100)
    p.add_argument("--n-features", dest="k", type=int, default=100)
    p.add_argument("--percentage", type=float, default=0.9)
    p.add_argument("--sigma", type=float, default=0.6)
    p.add_argument("--reading", choices=("direct", "complement"), default="direct")


def _add_aux_input(p, required=True):
    p.add_argument("--aux", required=required, help="auxiliary matrix file")
    p.add_argument("--aux-format", choices=("coordinate", "dense"))
    p.add_argument("--n-aux-clusters", type=int, default=2, help="N_A")
    p.add_argument("--i-a", type=int, default=10, help="auxiliary iteration budget")


def _add_target_input(p, required=True):
    p.add_argument("--target", required=required, help="target matrix file")
    p.add_argument("--target-format", choices=("coordinate", "dense"))
    p.add_argument("--n-target-clusters", type=int, default=2, help="N_T")
    p.add_argument("--i-t", type=int, default=10, help="target iteration budget")
    p.add_argument("--labels", help="reference target labels, one per line")


def _add_transfer(p):
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--K", "--k-clusters", dest="K", type=int, default=3,
                   help="feature cluster count")
    p.add_argument("--penalty-normalizer", choices=("mass", "cells_x_clusters"), default="mass")


def build_parser():
    parser = _Parser(prog="elasticc3", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"elasticc3 {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    parser.subcommands = sub.choices

    p = sub.add_parser("simulate", help="generate a coupled auxiliary/target pair")
    _add_common(p)
    _add_sim(p)

    p = sub.add_parser("fit-aux", help="co-cluster the auxiliary matrix")
    _add_common(p)
    _add_aux_input(p)
    p.add_argument("--K", "--k-clusters", dest="K", type=int, default=3)
    p.add_argument("--aux-labels", help="reference auxiliary labels")
    p.add_argument("--select-features", type=int, help="keep this many top-variance columns")

    p = sub.add_parser("transfer", help="co-cluster the target with transferred knowledge")
    _add_common(p)
    _add_target_input(p)
    _add_transfer(p)
    p.add_argument("--knowledge", help="knowledge.json written by fit-aux")
    _add_aux_input(p, required=False)
    p.add_argument("--select-features", type=int)

    p = sub.add_parser("tune", help="grid search over alpha, beta and K")
    _add_common(p)
    _add_aux_input(p)
    _add_target_input(p)
    p.add_argument("--alphas", type=_float_list, default="0,0.01,0.05,0.1,0.5,0.9,1.0")
    p.add_argument("--betas", type=_float_list, default="0,0.01,0.05,0.1,0.5,0.9,1.0")
    p.add_argument("--ks", type=_int_list, default="2,3,4,5,6,7,8,9")
    p.add_argument("--criterion", choices=CRITERIA, default="unsupervised:target_loss")
    p.add_argument("--allow-out-of-domain", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--penalty-normalizer", choices=("mass", "cells_x_clusters"), default="mass")
    p.add_argument("--select-features", type=int)

    p = sub.add_parser("evaluate", help="score predicted labels against reference labels")
    _add_common(p, seed=False)
    p.add_argument("--pred", required=True)
    p.add_argument("--labels", required=True)

    p = sub.add_parser("pipeline", help="fit-aux, transfer and evaluate in one run")
    _add_common(p)
    p.add_argument("--simulate", action="store_true", help="generate the inputs first")
    _add_sim(p)
    _add_aux_input(p, required=False)
    _add_target_input(p, required=False)
    _add_transfer(p)
    p.add_argument("--select-features", type=int)
    p.add_argument("--emit-trace", action=argparse.BooleanOptionalAction, default=True)
    return parser


def _read_config(path):
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            if "=" not in s:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = s.split("=", 1)
            values[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return values


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required")
    if getattr(args, "config", None):
        sub = parser.subcommands[args.command]
        # keys may name either the flag (n-features) or its destination (k)
        known = {}
        for a in sub._actions:
            known[a.dest] = a
            for opt in a.option_strings:
                known[opt.lstrip("-").replace("-", "_")] = a
        values = {}
        for k, v in _read_config(args.config).items():
            if k not in known or k in ("help", "config"):
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            action = known[k]
            if isinstance(action, (argparse._StoreTrueAction, argparse.BooleanOptionalAction)):
                v = v.lower() in ("1", "true", "yes", "on")
            action.required = False
            values[action.dest] = v
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class _Run:
    """Collects artifacts in memory; everything is written at the end."""

    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.files = {}
        self.inputs = {}
        self.extra = {}

    def text(self, name, content):
        self.files[name] = content

    def json(self, name, payload):
        self.files[name] = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"

    def input(self, path):
        if path is not None:
            self.inputs[str(path)] = _sha256(path)
        return path

    def flush(self):
        self.out.mkdir(parents=True, exist_ok=True)
        for name, content in sorted(self.files.items()):
            (self.out / name).write_text(content, encoding="utf-8")
        params = {k: (list(v) if isinstance(v, tuple) else v)
                  for k, v in sorted(vars(self.args).items()) if k not in ("out", "config")}
        manifest = {
            "tool": "elasticc3",
            "version": __version__,
            "command": self.args.command,
            "parameters": params,
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": {name: hashlib.sha256(c.encode("utf-8")).hexdigest()
                        for name, c in sorted(self.files.items())},
        }
        manifest.update(self.extra)
        (self.out / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _fit_summary(fit):
    return {"iterations_run": int(fit.iterations_run), "converged": bool(fit.converged),
            "final_objective": float(fit.final_objective), "restart": int(fit.restart)}


def _load(run, path, fmt, select):
    m = load_matrix(run.input(path), fmt)
    if select:
        m, kept = select_top_variance(m, select)
        return m, kept
    return m, None


def _check_labels(labels, n, what):
    if labels.size != n:
        raise LengthMismatch(f"{what} has {labels.size} labels but the matrix has {n} rows")


def _simulate(run, args):
    params = SimulationParams(n_aux=args.n_aux, n_target=args.n_target, k=args.k,
                              percentage=args.percentage, sigma=args.sigma,
                              seed=args.seed, reading=args.reading)
    pair = generate(params)
    run.extra["simulation"] = {"generator": GENERATOR, **params.to_dict()}
    return pair


def _write_pair(run, pair):
    p = pair.params
    note = (f"generator: {GENERATOR} seed={p.seed} percentage={p.percentage!r} "
            f"reading={p.reading} sigma={p.sigma!r}")
    run.text("aux.mtx", format_matrix(pair.aux, [note]))
    run.text("target.mtx", format_matrix(pair.target, [note]))
    run.text("aux_labels.txt", format_labels(pair.aux_labels))
    run.text("target_labels.txt", format_labels(pair.target_labels))


def _fit_aux(run, args, aux):
    fit = itcc_fit(aux, args.n_aux_clusters, args.K, iterations=args.i_a,
                   seed=args.seed, restarts=args.restarts)
    run.text("aux_row_assign.txt", format_labels(fit.state.row_assign))
    run.text("aux_col_assign.txt", format_labels(fit.state.col_assign))
    run.text("aux_trace.tsv", format_trace(fit.objective_trace))
    run.json("knowledge.json", extract_knowledge(fit).to_dict())
    return fit


def _transfer(run, args, target, knowledge, labels, emit_trace=True):
    cfg = TransferConfig(alpha=args.alpha, beta=args.beta, K=args.K,
                         N_A=knowledge.N_A, N_T=args.n_target_clusters,
                         I_A=getattr(args, "i_a", 10), I_T=args.i_t, seed=args.seed,
                         restarts=args.restarts, penalty_normalizer=args.penalty_normalizer)
    fit = elastic_fit(target, knowledge, cfg)
    run.text("target_row_assign.txt", format_labels(fit.state.row_assign))
    run.text("target_col_assign.txt", format_labels(fit.state.col_assign))
    if emit_trace:
        run.text("target_trace.tsv", format_trace(fit.objective_trace))
    report = {"target_fit": _fit_summary(fit)}
    if labels is not None:
        _check_labels(labels, target.n_rows, "--labels")
        report["metrics"] = evaluate(fit.state.row_assign, labels).to_dict()
        report["metrics_convention"] = "nmi_sqrt = I / sqrt(H_pred * H_truth)"
    return fit, report


def _cmd_simulate(run, args):
    _write_pair(run, _simulate(run, args))


def _cmd_fit_aux(run, args):
    aux, kept = _load(run, args.aux, args.aux_format, args.select_features)
    fit = _fit_aux(run, args, aux)
    report = {"aux_fit": _fit_summary(fit)}
    if kept is not None:
        run.text("aux_kept_columns.txt", format_labels(kept))
    if args.aux_labels:
        labels = load_labels(run.input(args.aux_labels))
        _check_labels(labels, aux.n_rows, "--aux-labels")
        report["metrics"] = evaluate(fit.state.row_assign, labels).to_dict()
    run.json("report.json", report)


def _cmd_transfer(run, args):
    target, kept = _load(run, args.target, args.target_format, args.select_features)
    labels = load_labels(run.input(args.labels)) if args.labels else None
    if labels is not None:
        _check_labels(labels, target.n_rows, "--labels")
    report = {}
    if args.knowledge:
        payload = json.loads(Path(run.input(args.knowledge)).read_text(encoding="utf-8"))
        knowledge = AuxiliaryKnowledge.from_dict(payload)
    elif args.aux:
        aux, _ = _load(run, args.aux, args.aux_format, args.select_features)
        aux_fit = _fit_aux(run, args, aux)
        knowledge = extract_knowledge(aux_fit)
        report["aux_fit"] = _fit_summary(aux_fit)
    else:
        raise UsageError("transfer needs --knowledge or --aux")
    if kept is not None:
        run.text("target_kept_columns.txt", format_labels(kept))
    _, rep = _transfer(run, args, target, knowledge, labels)
    report.update(rep)
    run.json("report.json", report)


def _cmd_tune(run, args):
    aux, _ = _load(run, args.aux, args.aux_format, args.select_features)
    target, _ = _load(run, args.target, args.target_format, args.select_features)
    labels = load_labels(run.input(args.labels)) if args.labels else None
    if labels is not None:
        _check_labels(labels, target.n_rows, "--labels")
    grid = GridSpec(args.alphas, args.betas, args.ks, args.criterion,
                    enforce_domain=not args.allow_out_of_domain)
    result = grid_search(aux, target, args.n_aux_clusters, args.n_target_clusters, grid,
                         seed=args.seed, restarts=args.restarts, labels=labels,
                         I_A=args.i_a, I_T=args.i_t,
                         workers=args.workers if args.workers else default_workers(),
                         penalty_normalizer=args.penalty_normalizer)
    run.text("grid.tsv", result.to_table())
    b = result.best
    run.json("report.json", {
        "criterion": result.criterion,
        "criterion_mode": "labeled" if grid.labeled else "unsupervised",
        "best": {"alpha": b.alpha, "beta": b.beta, "K": b.K,
                 "criterion_value": b.criterion_value, "metrics": b.metrics},
        "combinations": len(result.records),
        "aux_fits": result.aux_fit_count,
    })


def _cmd_evaluate(run, args):
    pred = load_labels(run.input(args.pred))
    truth = load_labels(run.input(args.labels))
    if pred.size != truth.size:
        raise LengthMismatch(f"{pred.size} predicted labels vs {truth.size} reference labels")
    run.json("metrics.json", {"metrics": evaluate(pred, truth).to_dict(),
                              "metrics_convention": "nmi_sqrt = I / sqrt(H_pred * H_truth)"})


def _cmd_pipeline(run, args):
    if args.simulate:
        pair = _simulate(run, args)
        _write_pair(run, pair)
        aux, target, labels = pair.aux, pair.target, pair.target_labels
        if args.select_features:
            aux, _ = select_top_variance(aux, args.select_features)
            target, _ = select_top_variance(target, args.select_features)
    else:
        if not (args.aux and args.target):
            raise UsageError("pipeline needs --simulate or both --aux and --target")
        aux, _ = _load(run, args.aux, args.aux_format, args.select_features)
        target, _ = _load(run, args.target, args.target_format, args.select_features)
        labels = load_labels(run.input(args.labels)) if args.labels else None
    aux_fit = _fit_aux(run, args, aux)
    _, report = _transfer(run, args, target, extract_knowledge(aux_fit), labels,
                          emit_trace=args.emit_trace)
    if not args.emit_trace:
        run.files.pop("aux_trace.tsv", None)
    report["aux_fit"] = _fit_summary(aux_fit)
    run.json("report.json", report)


COMMANDS = {
    "simulate": _cmd_simulate,
    "fit-aux": _cmd_fit_aux,
    "transfer": _cmd_transfer,
    "tune": _cmd_tune,
    "evaluate": _cmd_evaluate,
    "pipeline": _cmd_pipeline,
}


def run(args) -> int:
    """Execute a parsed namespace; returns the exit status."""
    r = _Run(args)
    COMMANDS[args.command](r, args)
    r.flush()
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = _parse(argv)
        return run(args)
    except UsageError as exc:
        print(f"elasticc3: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ElasticC3Error, ValueError, OSError) as exc:
        print(f"elasticc3: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
