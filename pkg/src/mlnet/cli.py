"""Command-line front end.

    mlnet analytic --alpha 1,2,4,8 --rmax 5 --step 0.01
    mlnet simulate --experiment exp.json [--jobs N] [--seed S] [--paper-scale]
    mlnet crossover --experiment exp.json
    mlnet protein --experiment exp.json

Artifacts go to ``<out>/<experiment name>/``; ``--out`` defaults to
``$MLNET_OUT`` or ``./results``.
"""
from __future__ import annotations

import argparse
import copy
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import analytics, experiment, io
from .ensemble import ExperimentPlan, candidate_alphas, crossover_sweep, expected_alpha, run_ensemble, summarize
from .netgen import DegenerateVarianceError, MultilayerSpec, SpecError
from .protein import AnalysisError, LayerPartition, PDBParseError, load_structure, threshold_sweep
from .spectral import EmptySampleError, SpectrumError, histogram

log = logging.getLogger("mlnet")

USER_ERRORS = (experiment.ExperimentError, SpecError, DegenerateVarianceError, PDBParseError,
               AnalysisError, analytics.DomainError, SpectrumError, EmptySampleError,
               FileNotFoundError, LookupError, ValueError, RuntimeError)


def _outdir(args, name: str) -> Path:
    root = args.out or os.environ.get("MLNET_OUT") or "results"
    path = Path(root) / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def _hist_opts(doc):
    h = doc.get("histogram", {})
    return h.get("bin_width", 0.1), h.get("support_cut", 5.0)


# -- analytic ----------------------------------------------------------------

def _parse_alphas(text: str) -> list[float]:
    try:
        return [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise analytics.DomainError(f"cannot parse alpha list {text!r}") from None


def cmd_analytic(args) -> list[Path]:
    if args.experiment:
        doc = experiment.load(args.experiment, "analytic")
    else:
        doc = {"version": 1, "kind": "analytic", "name": "analytic",
               "alphas": _parse_alphas(args.alpha), "rmax": args.rmax, "step": args.step}
        doc = experiment.validate(doc)
    alphas = doc["alphas"]
    rmax, step = doc.get("rmax", 5.0), doc.get("step", 0.01)
    for a in alphas:
        analytics.normalization_constant(a)  # domain check before writing anything
    npts = int(round(rmax / step)) + 1
    r = np.round(np.arange(npts) * step, 12)
    out = _outdir(args, doc["name"])
    h = io.experiment_hash(doc)
    written = []
    for a in alphas:
        rows = zip(r, analytics.density(a, r), analytics.csrd(a, r))
        written.append(io.write_csv(out / f"analytic_alpha{a:g}.csv", ("r", "density", "csrd"), rows, h))
    return written


# -- simulate ----------------------------------------------------------------

def _plan_from(doc, args) -> ExperimentPlan:
    net = dict(doc["network"])
    realizations = doc.get("realizations", 100)
    if args.paper_scale and "paper_scale" in doc:
        net["layers"] = doc["paper_scale"].get("layers", net["layers"])
        realizations = doc["paper_scale"].get("realizations", realizations)
    seed = args.seed if args.seed is not None else doc.get("master_seed", net.get("seed") or 0)
    net["seed"] = seed
    spec = MultilayerSpec.from_dict(net)
    return ExperimentPlan(spec, realizations, doc.get("k_orders", [2]), seed, doc.get("expected_m"))


def _effective_doc(doc, plan):
    eff = copy.deepcopy(doc)
    eff["network"] = plan.spec.to_dict()
    eff["realizations"] = plan.realizations
    eff["master_seed"] = plan.master_seed
    return eff


def cmd_simulate(args) -> list[Path]:
    doc = experiment.load(args.experiment, "ensemble")
    plan = _plan_from(doc, args)
    h = io.experiment_hash(_effective_doc(doc, plan))
    out = _outdir(args, doc["name"])
    bin_width, cut = _hist_opts(doc)
    samples = run_ensemble(plan, jobs=args.jobs)
    fits, ks = summarize(samples)
    written = []
    for k, sample in samples.items():
        try:
            target = expected_alpha(plan, k)
        except (ValueError, LookupError):
            target = None
        overlay = target if target is not None else fits[k].alpha_hat
        hist = histogram(sample, bin_width, cut)
        written.append(io.write_csv(out / f"hist_k{k}.csv", io.HISTOGRAM_HEADER,
                                    io.histogram_rows(hist, overlay), h))
        report = {**fits[k].to_dict(), "k": k, "expected_alpha": target,
                  "ks_candidates": ks[k], "n_ratios": len(sample), "dropped": sample.dropped,
                  "realizations": plan.realizations, "experiment": h}
        written.append(io.write_json(out / f"fit_k{k}.json", report))
        if doc.get("plots", True):
            from . import plotting

            alphas = sorted({overlay, fits[k].alpha_hat})
            written.append(plotting.srd_figure(hist, alphas, out / f"srd_k{k}.svg", f"{doc['name']}, k={k}"))
            written.append(plotting.csrd_figure(sample, alphas, out / f"csrd_k{k}.svg", cut))
    return written


def cmd_crossover(args) -> list[Path]:
    doc = experiment.load(args.experiment, "crossover")
    plan = _plan_from(doc, args)
    h = io.experiment_hash(_effective_doc(doc, plan))
    out = _outdir(args, doc["name"])
    bin_width, cut = _hist_opts(doc)
    plots = doc.get("plots", True)
    sweep = crossover_sweep(plan, doc["gammas"], jobs=args.jobs, keep_samples=True)
    cands = sorted({a for k in plan.k_orders for a in candidate_alphas(k)})
    written = [io.write_dict_rows(out / "sweep.csv", list(sweep.rows(cands)), h)]
    for p in sweep.points:
        for k, sample in p.samples.items():
            if len(sample) == 0:
                continue
            hist = histogram(sample, bin_width, cut)
            written.append(io.write_csv(out / f"hist_gamma{p.value:g}_k{k}.csv", io.HISTOGRAM_HEADER,
                                        io.histogram_rows(hist, p.fits[k].alpha_hat), h))
    if plots:
        from . import plotting

        ref = sorted({analytics.alpha_for(k, m) for k in plan.k_orders for m in (1, 2)})
        written.append(plotting.sweep_figure(sweep, out / "alpha_vs_gamma.svg", ref))
    return written


# -- protein -----------------------------------------------------------------

def cmd_protein(args) -> list[Path]:
    doc = experiment.load(args.experiment, "protein")
    pdb = Path(doc["pdb"])
    if not pdb.is_absolute():
        pdb = Path(args.experiment).resolve().parent / pdb
    if not pdb.exists():
        raise FileNotFoundError(
            f"PDB file not found: {pdb}. Download the structure (e.g. https://files.rcsb.org/download/"
            f"{pdb.stem.upper()}.pdb) and point 'pdb' in the experiment file at it.")
    try:
        structure = load_structure(pdb, doc.get("atom", "CA"))
    except PDBParseError as exc:
        raise PDBParseError(f"{pdb}: {exc}") from None
    p = doc["partition"]
    partition = LayerPartition(p["mode"], p.get("sizes"), p.get("ranges")).resolve(structure)
    sw = doc["sweep"]
    k_orders = doc.get("k_orders", [2])
    sweep = threshold_sweep(structure, partition, sw["mode"], sw["values"], sw.get("td"), k_orders,
                            keep_samples=True)
    eff = copy.deepcopy(doc)
    eff["resolved_blocks"] = partition.blocks
    h = io.experiment_hash(eff)
    out = _outdir(args, doc["name"])
    bin_width, cut = _hist_opts(doc)
    cands = sorted({a for k in k_orders for a in candidate_alphas(k)})
    written = [io.write_dict_rows(out / "sweep.csv", list(sweep.rows(cands)), h)]
    plots = doc.get("plots", True)
    for pt in sweep.points:
        for k, sample in pt.samples.items():
            if len(sample) == 0:
                continue
            tag = f"{sweep.axis}{pt.value:g}_k{k}"
            hist = histogram(sample, bin_width, cut)
            written.append(io.write_csv(out / f"hist_{tag}.csv", io.HISTOGRAM_HEADER,
                                        io.histogram_rows(hist, pt.fits[k].alpha_hat), h))
            if plots:
                from . import plotting

                alphas = candidate_alphas(k)[-3:]
                title = f"{structure.source_id} Td={pt.extra['td']:g} TdInter={pt.extra['td_inter']:g}"
                written.append(plotting.srd_figure(hist, alphas, out / f"srd_{tag}.svg", title))
                written.append(plotting.csrd_figure(sample, alphas, out / f"csrd_{tag}.svg", cut, title))
    if plots:
        from . import plotting

        written.append(plotting.sweep_figure(sweep, out / f"alpha_vs_{sweep.axis}.svg"))
    return written


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlnet", description="Spectral statistics of multilayer networks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_experiment=True):
        p.add_argument("--experiment", required=needs_experiment, help="experiment JSON file")
        p.add_argument("--out", help="output root (default $MLNET_OUT or ./results)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for realizations")
        p.add_argument("--seed", type=int, help="override the experiment's master seed")
        p.add_argument("--paper-scale", action="store_true", help="use the experiment's paper_scale dimensions")

    p = sub.add_parser("analytic", help="tabulate density and CSRD curves")
    common(p, needs_experiment=False)
    p.add_argument("--alpha", default="1,2,4,8", help="comma-separated alpha values")
    p.add_argument("--rmax", type=float, default=5.0)
    p.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_analytic)

    for name, func, text in [("simulate", cmd_simulate, "run a seeded network ensemble"),
                             ("crossover", cmd_crossover, "gamma sweep of the bilayer crossover model"),
                             ("protein", cmd_protein, "threshold sweep on a PDB structure")]:
        p = sub.add_parser(name, help=text)
        common(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        written = args.func(args)
    except USER_ERRORS as exc:
        print(f"mlnet {args.command}: error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
