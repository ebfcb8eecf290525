"""Command-line driver: ``ia-tails <command> [flags]``.

Exit codes: 0 success, 2 usage or validation error, 3 numeric failure, 4 I/O error.
"""

import argparse
import json
from pathlib import Path
import shutil
import sys
import tempfile

import numpy as np

from . import __version__, dist, models, study
from . import io as fio
from .errors import IATailsError, InsufficientDataError, NumericError
from .ia import ia_fit
from .mle import ml_fit
from .sampler import RandomStream, sample_coupled

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
FAMILIES = {"gpd": 1, "gauss": 2}
METHOD_TAGS = {"ia": "IA", "ia-gm": "IA_GM", "ml": "ML"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


class UsageError(IATailsError, ValueError):
    pass


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _count(text):
    """Positive integer; accepts ``1e6`` style literals."""
    v = float(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(v)


def _float_list(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"missing --{name.replace('_', '-')}")


def _check_params(sigma, kappa):
    if not kappa >= 0:
        raise UsageError("kappa must be ≥ 0")
    if not sigma > 0:
        raise UsageError("sigma must be > 0")


def _emit(text, out):
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return None
    fio.write_text(out, text)
    return out


def _finish(manifest, out):
    if out is not None and str(out) != "-":
        manifest.add_output(out)
        manifest.write(out)


def _config_echo(args):
    skip = {"func", "_parser", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _manifest(args, argv):
    return fio.Manifest(args.command, argv, _config_echo(args), getattr(args, "seed", None))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_sample(args, argv):
    _need(args, "out", "n", "kappa", "sigma")
    _check_params(args.sigma, args.kappa)
    if args.n < 1:
        raise UsageError("n must be ≥ 1")
    two = None if args.sides == "auto" else args.sides == "two"
    p = dist.CoupledParams(alpha=FAMILIES[args.family], mu=args.mu, sigma=args.sigma,
                           kappa=args.kappa, two_sided=two)
    man = _manifest(args, argv)
    fio.write_samples(args.out, sample_coupled(args.n, p, RandomStream(args.seed)))
    _finish(man, args.out)


def _fit_record(res, method, family):
    alpha = FAMILIES[family]
    qb = dist.to_q_beta(dist.CoupledParams(alpha=alpha, sigma=res.sigma_hat, kappa=res.kappa_hat))
    diag = dict(res.diagnostics)
    if res.per_permutation_estimates:
        diag["per_permutation_estimates"] = res.per_permutation_estimates
        diag["dispersion_at_k"] = res.dispersion_at_k
    return {"method": method, "family": family, "sigma_hat": res.sigma_hat,
            "kappa_hat": res.kappa_hat, "q_hat": qb.q, "beta_hat": qb.beta,
            "k_selected": res.k_selected, "diagnostics": diag}


def cmd_fit(args, argv):
    _need(args, "input")
    samples = fio.read_samples(args.input)
    if not len(samples):
        raise InsufficientDataError("no samples")
    alpha = FAMILIES[args.family]
    tag = METHOD_TAGS[args.method]
    if tag == "ML":
        res = ml_fit(samples, alpha)
    else:
        res = ia_fit(samples, alpha, tag, rs=RandomStream(args.seed))
    man = _manifest(args, argv)
    _emit(fio.dumps_json(_fit_record(res, args.method, args.family), args.pretty), args.out)
    _finish(man, args.out)


def cmd_mc_study(args, argv):
    _need(args, "out")
    kappas = _float_list(args.kappas)
    if not kappas:
        raise UsageError("empty kappa list")
    for k in kappas:
        _check_params(args.sigma, k)
    if args.trials < 1 or args.n < 1:
        raise UsageError("trials and n must be ≥ 1")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHOD_TAGS]
    if bad or not methods:
        raise UsageError(f"unknown method(s) {bad}; choose from {sorted(METHOD_TAGS)}")
    man = _manifest(args, argv)
    reports = study.mc_study(FAMILIES[args.family], kappas, args.sigma, args.n, args.trials,
                             [METHOD_TAGS[m] for m in methods], args.seed)
    _emit(fio.study_csv(reports, args.pretty), args.out)
    _finish(man, args.out)


def cmd_model_cnm(args, argv):
    _need(args, "out")
    cfg = models.CnmConfig(n_agents=args.agents, sigma_stress=args.sigma_stress, f=args.f,
                           steps=args.steps, subsample_every=args.stride,
                           normalize=not args.raw)
    man = _manifest(args, argv)
    fio.write_samples(args.out, models.cnm_run(cfg, RandomStream(args.seed)))
    _finish(man, args.out)


def cmd_model_stdmap(args, argv):
    _need(args, "out")
    cfg = models.StdMapConfig(K=args.K, n_initial_conditions=args.orbits,
                              transient=args.transient, sum_length=args.sum_length)
    man = _manifest(args, argv)
    fio.write_samples(args.out, models.stdmap_run(cfg, RandomStream(args.seed)))
    _finish(man, args.out)


def _parse_fit_spec(spec, family):
    """``NAME=SIGMA,KAPPA`` or the path of a JSON file written by ``fit``."""
    if "=" in spec:
        name, _, vals = spec.partition("=")
        try:
            sigma, kappa = (float(v) for v in vals.split(","))
        except ValueError:
            raise UsageError(f"bad --fit {spec!r}; expected NAME=SIGMA,KAPPA") from None
        _check_params(sigma, kappa)
    else:
        with open(spec, encoding="utf-8") as fh:
            rec = json.load(fh)
        name, sigma, kappa = rec["method"], rec["sigma_hat"], rec["kappa_hat"]
    return name, dist.CoupledParams(alpha=FAMILIES[family], sigma=sigma, kappa=kappa)


def histogram(x, bins, log_bins):
    """Density histogram; returns (centers, density, widths) with sum(density*width) = 1."""
    x = np.asarray(x, dtype=np.float64)
    if log_bins:
        x = x[x > 0]
        if x.size < 2 or x.min() == x.max():
            raise InsufficientDataError("log-spaced bins need at least two distinct positive samples")
        edges = np.geomspace(x.min(), x.max(), bins + 1)
        centers = np.sqrt(edges[:-1] * edges[1:])
    else:
        if x.size < 1:
            raise InsufficientDataError("no samples")
        lo, hi = x.min(), x.max()
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, bins + 1)
        centers = 0.5 * (edges[:-1] + edges[1:])
    counts, _ = np.histogram(x, edges)
    widths = np.diff(edges)
    density = counts / (counts.sum() * widths)
    return centers, density, widths


def cmd_plotdata(args, argv):
    _need(args, "input", "out")
    samples = fio.read_samples(args.input)
    if not len(samples):
        raise InsufficientDataError("no samples")
    if args.bins < 1:
        raise UsageError("bins must be ≥ 1")
    log_bins = args.scale == "log" or (args.scale == "auto" and args.family == "gpd")
    centers, density, _ = histogram(samples.values, args.bins, log_bins)
    header, cols = ["bin_center", "empirical_density"], [centers, density]
    for spec in args.fit or ():
        name, p = _parse_fit_spec(spec, args.family)
        header.append(f"pdf_{name}")
        cols.append(dist.pdf(centers, p))
    man = _manifest(args, argv)
    _emit(fio.numeric_csv(header, cols, args.pretty), args.out)
    _finish(man, args.out)


def cmd_replay(args, argv):
    """Re-run a manifest's command in a scratch directory and compare digests."""
    rec = fio.read_manifest(args.manifest)
    old = list(rec["argv"])
    with tempfile.TemporaryDirectory() as tmp:
        new = list(old)
        outs = {}
        for i, tok in enumerate(old[:-1]):
            if tok == "--out":
                target = Path(tmp) / Path(old[i + 1]).name
                new[i + 1] = str(target)
                outs[Path(old[i + 1]).name] = target
        code = main(new)
        if code != EXIT_OK:
            return code
        mismatched = [name for name, target in outs.items()
                      if fio.sha256_file(target) != rec["outputs"].get(name)]
        if args.keep:
            for target in outs.values():
                shutil.copy(target, Path(args.keep) / target.name)
    if mismatched:
        print(f"digest mismatch: {', '.join(mismatched)}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"reproduced {len(outs)} output(s)")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file whose keys mirror the flag names; flags win")
    common.add_argument("--pretty", action="store_true", help="rounded, human-oriented output")

    top = argparse.ArgumentParser(prog="ia-tails", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def leaf(subparsers, name, func, help_):
        sp = subparsers.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func, _parser=sp)
        return sp

    sp = leaf(sub, "sample", cmd_sample, "draw samples from a coupled distribution")
    sp.add_argument("--family", choices=sorted(FAMILIES), default="gpd")
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--kappa", type=float, default=0.0)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--sides", choices=["auto", "one", "two"], default="auto")
    sp.add_argument("--n", type=_count, default=10_000)
    sp.add_argument("--seed", type=_count, default=0)
    sp.add_argument("--out")

    sp = leaf(sub, "fit", cmd_fit, "estimate (sigma, kappa) from a sample file")
    sp.add_argument("--method", choices=sorted(METHOD_TAGS), default="ia-gm")
    sp.add_argument("--family", choices=sorted(FAMILIES), default="gpd")
    sp.add_argument("--in", dest="input")
    sp.add_argument("--seed", type=_count, default=0)
    sp.add_argument("--out", help="JSON output path (default: stdout)")

    sp = leaf(sub, "mc-study", cmd_mc_study, "Monte Carlo MSE and fit-quality table")
    sp.add_argument("--family", choices=sorted(FAMILIES), default="gpd")
    sp.add_argument("--kappas", default="0.25,0.5,1,1.25,2")
    sp.add_argument("--sigma", type=float, default=0.5)
    sp.add_argument("--n", type=_count, default=10_000)
    sp.add_argument("--trials", type=_count, default=100)
    sp.add_argument("--methods", default="ia-gm,ia,ml")
    sp.add_argument("--seed", type=_count, default=0)
    sp.add_argument("--out")

    sp_model = sub.add_parser("model", help="application data generators")
    msub = sp_model.add_subparsers(dest="model", required=True)
    sp = leaf(msub, "cnm", cmd_model_cnm, "coherent noise model avalanche sizes")
    sp.add_argument("--steps", type=_count, default=1_000_000)
    sp.add_argument("--agents", type=_count, default=100_000)
    sp.add_argument("--f", type=_count, default=8000)
    sp.add_argument("--sigma-stress", type=float, default=0.05)
    sp.add_argument("--stride", type=_count, default=1)
    sp.add_argument("--raw", action="store_true", help="agent counts instead of fractions")
    sp.add_argument("--seed", type=_count, default=0)
    sp.add_argument("--out")
    sp = leaf(msub, "stdmap", cmd_model_stdmap, "centered standard-map orbit sums")
    sp.add_argument("--K", type=float, default=0.6)
    sp.add_argument("--orbits", type=_count, default=10_000)
    sp.add_argument("--transient", type=_count, default=10_000)
    sp.add_argument("--sum-length", type=_count, default=10_000)
    sp.add_argument("--seed", type=_count, default=0)
    sp.add_argument("--out")

    sp = leaf(sub, "plotdata", cmd_plotdata, "histogram plus fitted densities as CSV")
    sp.add_argument("--in", dest="input")
    sp.add_argument("--family", choices=sorted(FAMILIES), default="gpd")
    sp.add_argument("--fit", action="append", help="NAME=SIGMA,KAPPA or a fit JSON file (repeatable)")
    sp.add_argument("--bins", type=_count, default=50)
    sp.add_argument("--scale", choices=["auto", "log", "linear"], default="auto")
    sp.add_argument("--out")

    sp = leaf(sub, "replay", cmd_replay, "re-run a manifest and verify output digests")
    sp.add_argument("manifest")
    sp.add_argument("--keep", help="directory to copy the regenerated outputs into")
    return top


def read_config(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            key, sep, val = s.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().lstrip("-").replace("-", "_")] = val.strip()
    return out


def _apply_config(parser, leaf_parser, argv, path):
    cfg = read_config(path)
    actions = {a.dest: a for a in leaf_parser._actions}
    defaults = {}
    for key, val in cfg.items():
        if key == "in":
            key = "input"
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            raise UsageError(f"{path}: unknown key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            low = val.lower()
            if low not in _TRUE | _FALSE:
                raise UsageError(f"{path}: {key} must be a boolean, got {val!r}")
            defaults[key] = low in _TRUE
        elif isinstance(act, argparse._AppendAction):
            defaults[key] = [v.strip() for v in val.split(";") if v.strip()]
        else:
            if act.choices is not None and val not in act.choices:
                raise UsageError(f"{path}: {key} must be one of {sorted(act.choices)}, got {val!r}")
            defaults[key] = val   # string defaults go through the flag's type
    leaf_parser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "config", None):
            try:
                args = _apply_config(parser, args._parser, argv, args.config)
            except SystemExit as exc:
                return int(exc.code or 0)
        rc = args.func(args, argv)
        return EXIT_OK if rc is None else rc
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (IATailsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
