"""Command-line interface: ``ergmbayes <subcommand> [options]``."""

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import __version__, exact
from .calibrate import CalibrateControl, run_calibration
from .exchange import UPDATE_MODES, ExchangeControl, run_exchange
from .formula import parse_formula
from .gof import STATISTICS, bin_labels, run_gof
from .graph import (Graph, GraphError, from_edge_list, load_network, read_attributes,
                    write_attributes, write_edge_list)
from .plotting import gof_plot, trace_plot
from .prior import PriorSpec
from .simulate import PROPOSALS, NetworkSimulator
from .summary import summarize
from .tables import metadata_beside, read_draws, write_draws, write_metadata, write_table
from .terms import ModelError

log = logging.getLogger("ergmbayes")

OUT_ENV = "ERGMBAYES_OUT"


class CliError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers, got %r" % text)


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _default_out():
    return os.environ.get(OUT_ENV, "ergmbayes-out")


def _add_common(p, network_required=True, model_required=True):
    p.add_argument("--network", required=network_required, help="edge-list file")
    p.add_argument("--attrs", help="node attribute table")
    p.add_argument("--model", required=model_required,
                   help="model formula, e.g. 'edges + nodematch(Grade) + gwesp(0.2)'")
    p.add_argument("--seed", type=int, help="random seed (drawn and recorded if omitted)")
    p.add_argument("--out", default=None, help="output directory (default $%s or ./ergmbayes-out)"
                   % OUT_ENV)
    p.add_argument("--threads", type=_positive, default=1, help="worker threads")
    p.add_argument("--proposal", choices=sorted(PROPOSALS), default="uniform",
                   help="dyad proposal of the network sampler")


def _add_prior(p):
    p.add_argument("--prior-mean", type=_floats, default=[0.0],
                   help="prior mean: one value or one per term")
    p.add_argument("--prior-sd", type=_floats, default=[10.0],
                   help="prior standard deviation: one value or one per term")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ergmbayes", description="Bayesian inference for exponential random graph models")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="approximate exchange algorithm")
    _add_common(p)
    _add_prior(p)
    p.add_argument("--burn-in", type=_nonneg, default=300)
    p.add_argument("--main-iters", type=_positive, default=2000)
    p.add_argument("--aux-iters", type=_positive, default=20000)
    p.add_argument("--nchains", type=int, default=6)
    p.add_argument("--gamma", type=float, default=0.6)
    p.add_argument("--sigma-epsilon", type=float, default=0.0125)
    p.add_argument("--update", choices=UPDATE_MODES, default="sequential",
                   help="chain update order; 'split' lets --threads run half the chains at once")
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("calibrate", help="calibrated pseudo-posterior sampling")
    _add_common(p)
    _add_prior(p)
    p.add_argument("--iters", type=_positive, default=1000)
    p.add_argument("--aux-iters", type=_positive, default=20000)
    p.add_argument("--noisy-nsim", type=_positive, default=100)
    p.add_argument("--noisy-thin", type=_positive, default=1000)
    p.add_argument("--mcmc", type=_positive, default=10000)
    p.add_argument("--hessian-nsim", type=_positive, default=1000)
    p.add_argument("--step-a0", type=float, default=10.0)
    p.add_argument("--step-t0", type=float, default=10.0)
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("gof", help="posterior-predictive goodness of fit")
    _add_common(p, network_required=False, model_required=False)
    p.add_argument("--draws", required=True, help="draws table written by fit or calibrate")
    p.add_argument("--nsim", type=_positive, default=100)
    p.add_argument("--aux-iters", type=_positive, default=20000)
    p.add_argument("--n-deg", type=_positive, default=14)
    p.add_argument("--n-dist", type=_positive, default=15)
    p.add_argument("--n-esp", type=_positive, default=10)

    p = sub.add_parser("simulate", help="simulate networks from an ERGM")
    _add_common(p, network_required=False)
    p.add_argument("--nodes", type=_positive, help="start from the empty graph on this many nodes")
    p.add_argument("--theta", type=_floats, required=True, help="parameter vector")
    p.add_argument("--nsim", type=_positive, default=1)
    p.add_argument("--aux-iters", type=_positive, default=20000)
    p.add_argument("--thin", type=_positive, default=1000)

    p = sub.add_parser("summary", help="summarise a draws table")
    p.add_argument("--draws", required=True)
    p.add_argument("--out", default=None, help="also write summary.txt (and plots) here")
    p.add_argument("--plots", action="store_true", help="write trace/density SVG")

    p = sub.add_parser("import", help="convert CSV edge/vertex tables to the native formats")
    p.add_argument("--edges", required=True, help="CSV with one edge per row")
    p.add_argument("--vertices", help="CSV of vertex attributes, one row per node")
    p.add_argument("--nodes", type=_positive, help="node count (default: vertex rows or max index)")
    p.add_argument("--one-based", action=argparse.BooleanOptionalAction, default=True,
                   help="node indices in the edge CSV start at 1 (default)")
    p.add_argument("--columns", default="-2,-1",
                   help="edge CSV columns holding the endpoints (default: last two)")
    p.add_argument("--drop", default="", help="comma-separated vertex columns to omit")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--prefix", required=True, help="output path prefix (.edges / .attrs)")

    dev = sub.add_parser("dev", help="exact-enumeration oracle for tiny networks")
    dsub = dev.add_subparsers(dest="dev_command", required=True)
    p = dsub.add_parser("logz", help="exact log normalising constant")
    p.add_argument("--nodes", type=_positive, required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--theta", type=_floats, required=True)
    p.add_argument("--attrs")
    p = dsub.add_parser("grid", help="exact grid posterior mean and sd")
    p.add_argument("--network", required=True)
    p.add_argument("--attrs")
    p.add_argument("--model", required=True)
    p.add_argument("--bounds", required=True, help="lo:hi per term, comma separated")
    p.add_argument("--num", type=_positive, default=101)
    _add_prior(p)
    return parser


# -- helpers -------------------------------------------------------------------

def _out_dir(args):
    out = args.out or _default_out()
    os.makedirs(out, exist_ok=True)
    return out


def _seed(args):
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy % (2 ** 63))
    return args.seed


def _prior(args, dim):
    mean = np.broadcast_to(args.prior_mean, (dim,)) if len(args.prior_mean) in (1, dim) else None
    sd = np.broadcast_to(args.prior_sd, (dim,)) if len(args.prior_sd) in (1, dim) else None
    if mean is None or sd is None:
        raise CliError("--prior-mean/--prior-sd need 1 or %d values" % dim)
    if np.any(sd <= 0):
        raise CliError("--prior-sd must be positive")
    return PriorSpec(np.array(mean, dtype=float), np.diag(np.asarray(sd, dtype=float) ** 2))


def _load(args):
    y = load_network(args.network, args.attrs)
    spec = parse_formula(args.model)
    missing = [a for a in spec.attributes if a not in y.attributes]
    if missing:
        raise CliError("model uses attribute(s) %s not found in %s"
                       % (", ".join(missing), args.attrs or "the network (no --attrs given)"))
    return y, spec


def _config(args):
    return {k: v for k, v in vars(args).items() if k not in ("verbose",)}


def _emit_summary(draws, labels, acceptance, out, plots):
    tab = summarize(draws, labels=labels, acceptance_rate=acceptance)
    text = tab.format()
    with open(os.path.join(out, "summary.txt"), "w") as fh:
        fh.write(text)
    if plots:
        trace_plot(draws, labels, os.path.join(out, "trace.svg"))
    return text


# -- subcommands ---------------------------------------------------------------

def cmd_fit(args):
    y, spec = _load(args)
    seed = _seed(args)
    prior = _prior(args, spec.dim)
    control = ExchangeControl(burn_in=args.burn_in, main_iters=args.main_iters,
                              aux_iters=args.aux_iters, nchains=args.nchains, gamma=args.gamma,
                              sigma_epsilon=args.sigma_epsilon, seed=seed,
                              proposal=args.proposal, update=args.update, threads=args.threads)
    out = _out_dir(args)
    post = run_exchange(y, spec, prior, control)
    write_draws(os.path.join(out, "draws.tsv"), post.draws)
    write_metadata(os.path.join(out, "metadata.json"), command="fit", config=_config(args),
                   model=spec.render(), labels=spec.labels, seed=seed,
                   accept_count=post.accept_count, proposal_count=post.proposal_count,
                   acceptance_rate=post.acceptance_rate)
    sys.stdout.write(_emit_summary(post.draws, spec.labels, post.acceptance_rate, out,
                                   not args.no_plots))


def cmd_calibrate(args):
    y, spec = _load(args)
    seed = _seed(args)
    prior = _prior(args, spec.dim)
    control = CalibrateControl(iters=args.iters, aux_iters=args.aux_iters,
                               noisy_nsim=args.noisy_nsim, noisy_thin=args.noisy_thin,
                               mcmc=args.mcmc, seed=seed, step_a0=args.step_a0,
                               step_t0=args.step_t0, hessian_nsim=args.hessian_nsim,
                               proposal=args.proposal)
    out = _out_dir(args)
    res = run_calibration(y, spec, prior, control)
    write_draws(os.path.join(out, "draws.tsv"), res.draws[None])
    write_draws(os.path.join(out, "pseudo_draws.tsv"), res.pseudo_draws[None])
    rate = res.accepted / control.mcmc
    cm = res.cmap
    write_metadata(os.path.join(out, "metadata.json"), command="calibrate",
                   config=_config(args), model=spec.render(), labels=spec.labels, seed=seed,
                   acceptance_rate=rate, theta_map=cm.theta_map, hessian_map=cm.hessian_map,
                   theta_pl=cm.theta_pl, hessian_pl=cm.hessian_pl, V=cm.V)
    sys.stdout.write(_emit_summary(res.draws[None], spec.labels, rate, out, not args.no_plots))


def cmd_gof(args):
    meta = metadata_beside(args.draws) or {}
    cfg = meta.get("config", {})
    args.network = args.network or cfg.get("network")
    args.attrs = args.attrs or cfg.get("attrs")
    args.model = args.model or meta.get("model")
    if not args.network or not args.model:
        raise CliError("gof needs --network and --model (or a metadata.json beside the draws)")
    y, spec = _load(args)
    seed = _seed(args)
    draws = read_draws(args.draws)
    if draws.shape[2] != spec.dim:
        raise CliError("draws have %d parameters but the model has %d terms"
                       % (draws.shape[2], spec.dim))
    bins = (args.n_deg, args.n_dist, args.n_esp)
    res = run_gof(y, spec, draws, nsim=args.nsim, aux_iters=args.aux_iters, bins=bins,
                  seed=seed, threads=args.threads, proposal=args.proposal)
    out = _out_dir(args)
    for stat in STATISTICS:
        q = res.quantiles[stat]
        rows = ([lab, res.observed[stat][k], q[0][k], q[1][k], q[2][k]]
                for k, lab in enumerate(bin_labels(stat, bins)))
        _write_labelled(os.path.join(out, "gof_%s.tsv" % stat),
                        ["bin", "observed", "q05", "q50", "q95"], rows)
    gof_plot(res, os.path.join(out, "gof.svg"))
    write_metadata(os.path.join(out, "metadata.json"), command="gof", config=_config(args),
                   model=spec.render(), seed=seed, coverage=res.coverage())
    print("posterior-predictive coverage of non-empty bins: %.3f" % res.coverage())


def _write_labelled(path, header, rows):
    write_table(path, header, ([r[0]] + list(r[1:]) for r in rows))


def cmd_simulate(args):
    spec = parse_formula(args.model)
    if args.network:
        y = load_network(args.network, args.attrs)
    elif args.nodes:
        attrs = None
        if args.attrs:
            attrs = read_attributes(args.attrs)
        y = Graph(args.nodes, attributes=attrs)
    else:
        raise CliError("simulate needs --network or --nodes")
    if len(args.theta) != spec.dim:
        raise CliError("--theta has %d values, model has %d terms" % (len(args.theta), spec.dim))
    seed = _seed(args)
    sim = NetworkSimulator(y, spec, args.proposal)
    chain = sim.chain(np.array(args.theta), np.random.default_rng(seed))
    out = _out_dir(args)
    rows = []
    chain.run(args.aux_iters)
    for r in range(args.nsim):
        if r:
            chain.run(args.thin)
        write_edge_list(chain.graph(), os.path.join(out, "network_%04d.edges" % (r + 1)))
        rows.append([r + 1, *chain.stats])
    write_table(os.path.join(out, "stats.tsv"), ["draw"] + spec.labels, rows)
    write_metadata(os.path.join(out, "metadata.json"), command="simulate", config=_config(args),
                   model=spec.render(), seed=seed, accepted=chain.accepted, steps=chain.steps)
    print("wrote %d network(s) to %s" % (args.nsim, out))


def cmd_summary(args):
    draws = read_draws(args.draws)
    meta = metadata_beside(args.draws) or {}
    labels = meta.get("labels")
    if not labels or len(labels) != draws.shape[2]:
        labels = ["theta_%d" % (k + 1) for k in range(draws.shape[2])]
    rate = meta.get("acceptance_rate")
    tab = summarize(draws, labels=labels, acceptance_rate=rate)
    text = tab.format()
    if args.out or args.plots:
        out = _out_dir(args)
        with open(os.path.join(out, "summary.txt"), "w") as fh:
            fh.write(text)
        if args.plots:
            trace_plot(draws, labels, os.path.join(out, "trace.svg"))
        write_metadata(os.path.join(out, "summary_metadata.json"), command="summary",
                       config=_config(args))
    sys.stdout.write(text)


def cmd_import(args):
    cols = [int(c) for c in args.columns.split(",")]
    if len(cols) != 2:
        raise CliError("--columns needs exactly two column indices")
    offset = 1 if args.one_based else 0
    pairs = []
    with open(args.edges, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip():
                continue
            try:
                i, j = (int(float(row[c])) - offset for c in cols)
            except (ValueError, IndexError):
                if pairs:
                    raise CliError("%s: bad edge row %r" % (args.edges, row))
                continue  # header
            pairs.append((i, j))
    attrs = None
    if args.vertices:
        attrs = read_attributes(args.vertices, delimiter=",")
        for name in filter(None, (s.strip() for s in args.drop.split(","))):
            attrs.pop(name, None)
        attrs = {k.strip('"'): v for k, v in attrs.items() if k.strip('" ')}
    n = args.nodes or (len(next(iter(attrs.values()))) if attrs else
                       1 + max((max(p) for p in pairs), default=-1))
    g = from_edge_list(n, pairs, directed=args.directed, attributes=attrs)
    write_edge_list(g, args.prefix + ".edges")
    if attrs:
        write_attributes(g.attributes, args.prefix + ".attrs")
    print("imported %d nodes, %d edges -> %s.edges" % (g.n, g.edge_count, args.prefix))


def cmd_dev(args):
    spec = parse_formula(args.model)
    if args.dev_command == "logz":
        attrs = None
        if args.attrs:
            attrs = read_attributes(args.attrs)
        if len(args.theta) != spec.dim:
            raise CliError("--theta has %d values, model has %d terms"
                           % (len(args.theta), spec.dim))
        print(repr(float(exact.exact_log_z(args.nodes, spec, np.array(args.theta), attrs))))
        return
    y, spec = _load(args)
    bounds = []
    for part in args.bounds.split(","):
        lo, hi = part.split(":")
        bounds.append((float(lo), float(hi)))
    grid = exact.exact_posterior_grid(y, spec, _prior(args, spec.dim), bounds, args.num)
    print("\t".join(["term", "mean", "sd", "mode"]))
    for k, lab in enumerate(spec.labels):
        print("%s\t%.6f\t%.6f\t%.6f" % (lab, grid.mean()[k], grid.sd()[k], grid.mode()[k]))


COMMANDS = {
    "fit": cmd_fit,
    "calibrate": cmd_calibrate,
    "gof": cmd_gof,
    "simulate": cmd_simulate,
    "summary": cmd_summary,
    "import": cmd_import,
    "dev": cmd_dev,
}


VECTOR_OPTIONS = ("--theta", "--prior-mean", "--prior-sd", "--bounds")


def _attach_vector_values(argv):
    """Rewrite ``--theta -1,2`` as ``--theta=-1,2`` so argparse does not take a
    leading minus sign for an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VECTOR_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else "%s=%s" % (tok, nxt))
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_vector_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (CliError, GraphError, ModelError, ValueError, OSError) as exc:
        print("ergmbayes %s: error: %s" % (args.command, exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
