"""Command-line interface: ``evtcfar {synth,train,adapt,eval,roc-plot}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 partial failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from . import io as fio
from .adapt import AdaptConfig, adapt_corpus, orient
from .evaluate import SUBSETS, comparison_report, pd_at_pfa, roc, subset_mask
from .plot import roc_svg
from .synth import NOISE_FAMILIES, SynthConfig, generate_corpus
from .train import ORIENTATIONS, TrainConfig, fit_tail_stats

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3

log = logging.getLogger("evtcfar")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _on_off(text):
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _seeds(text):
    if ":" in text:
        a, b = text.split(":", 1)
        return list(range(int(a), int(b)))
    return [int(t) for t in text.split(",") if t]


def cmd_synth(args):
    try:
        base = SynthConfig(
            n=args.n, seed=0, drift_rate=args.drift_rate, drift_noise=args.drift_noise,
            base_scale=args.base_scale, anomaly_rate=args.anomaly_rate,
            anomaly_offset=args.anomaly_offset, segment_len=args.segment_len,
            noise=args.noise, seq_id=args.prefix,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    fio.write_corpus(args.out, generate_corpus(base, args.seeds))
    return EXIT_OK


def cmd_train(args):
    try:
        cfg = TrainConfig(p_u=args.pu, w0=args.w0, orientation=args.orientation,
                          clear_only=args.clear_only)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    corpus = fio.read_corpus(args.corpus)
    exclude = [s for s in (args.exclude or "").split(",") if s]
    try:
        result = fit_tail_stats(corpus, cfg, exclude=exclude)
    except ValueError as exc:
        raise fio.DataError(str(exc)) from None
    fio.write_prior(args.out, result.prior, cfg.p_u, cfg.w0)
    log.info("trained on %d sequences (%d skipped): n=%d, mean excess=%.6g",
             len(result.used), len(result.skipped), result.n, result.s / result.n)
    return EXIT_OK


def cmd_adapt(args):
    try:
        cfg = AdaptConfig(p_u=args.pu, p_f=args.pf, w1=args.w1, L=args.L, n_a=args.na,
                          orientation=args.orientation, censor=args.censor,
                          boundary=args.boundary, ks_scale=args.ks_scale,
                          negate_output=args.negate_output)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    prior, prior_pu, _ = fio.read_prior(args.prior)
    if not math.isclose(prior_pu, cfg.p_u):
        log.warning("prior was trained with p_u=%g but adapting with p_u=%g", prior_pu, cfg.p_u)
    corpus = fio.read_corpus(args.corpus)
    results = adapt_corpus(corpus, prior, cfg, jobs=args.jobs)
    pairs, failed = [], 0
    for seq, (sid, res) in zip(corpus, results):
        if isinstance(res, Exception):
            failed += 1
            print(f"{sid}: {res}", file=sys.stderr)
        else:
            pairs.append((seq, res.adapted_scores))
    if pairs:
        fio.write_adapted(args.out, pairs)
    if failed and not pairs:
        return EXIT_DATA
    return EXIT_PARTIAL if failed else EXIT_OK


def _load_eval(args):
    data = fio.read_adapted(args.adapted)
    if not data:
        raise fio.DataError(f"{args.adapted}: no rows")
    raw = np.concatenate([orient(seq.scores, args.orientation) for seq, _ in data])
    adapted = np.concatenate([a for _, a in data])
    if args.adapted_orientation == "anomaly_low":
        adapted = -adapted
    labels = np.concatenate([seq.labels for seq, _ in data])
    condition = np.concatenate([seq.condition for seq, _ in data])
    return raw, adapted, labels, condition


def _curves(raw, adapted, labels, mask, subset):
    y = labels[mask]
    if y.size == 0 or y.min() == y.max():
        raise fio.DataError(f"subset {subset!r} has a single class; ROC is undefined")
    return roc(adapted[mask], y), roc(raw[mask], y)


def cmd_eval(args):
    raw, adapted, labels, condition = _load_eval(args)
    rows, first = [], None
    for subset in args.subset:
        cur_a, cur_r = _curves(raw, adapted, labels, subset_mask(condition, subset), subset)
        first = first or (subset, cur_a, cur_r)
        for p in args.pfa:
            rows.append((subset, p, {"adapted": pd_at_pfa(cur_a, p)[0],
                                     "raw": pd_at_pfa(cur_r, p)[0]}))
    report = comparison_report(rows)
    if args.report:
        fio.atomic_write_text(args.report, report)
    else:
        sys.stdout.write(report)
    subset, cur_a, cur_r = first
    if args.roc:
        fio.write_roc(args.roc, cur_a)
    if args.roc_raw:
        fio.write_roc(args.roc_raw, cur_r)
    if args.svg:
        fio.atomic_write_text(args.svg, roc_svg({"adapted": cur_a, "raw": cur_r},
                                                title=f"ROC ({subset})"))
    return EXIT_OK


def cmd_roc_plot(args):
    raw, adapted, labels, condition = _load_eval(args)
    subset = args.subset[0]
    cur_a, cur_r = _curves(raw, adapted, labels, subset_mask(condition, subset), subset)
    fio.atomic_write_text(args.out, roc_svg({"adapted": cur_a, "raw": cur_r},
                                            title=f"ROC ({subset})"))
    return EXIT_OK


def _subsets(text):
    names = [t for t in text.split(",") if t]
    bad = [t for t in names if t not in SUBSETS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"subsets must be among {', '.join(SUBSETS)}")
    return names


def build_parser():
    p = _Parser(prog="evtcfar", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="write a synthetic corpus CSV")
    s.add_argument("--out", required=True)
    s.add_argument("--n", type=int, default=10_000)
    s.add_argument("--seeds", type=_seeds, default=[0], help="comma list or start:stop")
    s.add_argument("--drift-rate", type=float, default=0.0)
    s.add_argument("--drift-noise", type=float, default=0.0)
    s.add_argument("--base-scale", type=float, default=1.0)
    s.add_argument("--anomaly-rate", type=float, default=0.0013)
    s.add_argument("--anomaly-offset", type=float, default=6.0)
    s.add_argument("--segment-len", type=int, default=None)
    s.add_argument("--noise", choices=NOISE_FAMILIES, default="laplace")
    s.add_argument("--prefix", default="synth")
    s.set_defaults(func=cmd_synth)

    t = sub.add_parser("train", help="learn the Gamma prior from a corpus")
    t.add_argument("corpus")
    t.add_argument("--out", required=True)
    t.add_argument("--pu", type=float, default=0.05)
    t.add_argument("--w0", type=float, default=400.0)
    t.add_argument("--exclude", default="", help="comma-separated seq_ids to leave out")
    t.add_argument("--orientation", choices=ORIENTATIONS, default="anomaly_low")
    t.add_argument("--clear-only", action="store_true",
                   help="also drop samples whose condition is not 'clear'")
    t.set_defaults(func=cmd_train)

    a = sub.add_parser("adapt", help="adapt every sequence of a corpus")
    a.add_argument("corpus")
    a.add_argument("prior")
    a.add_argument("--out", required=True)
    a.add_argument("--pu", type=float, default=0.05)
    a.add_argument("--pf", type=float, default=0.001)
    a.add_argument("--w1", type=float, default=100.0)
    a.add_argument("--L", type=int, default=101)
    a.add_argument("--na", type=int, default=12)
    a.add_argument("--orientation", choices=ORIENTATIONS, default="anomaly_low")
    a.add_argument("--censor", type=_on_off, default=True, metavar="{on,off}")
    a.add_argument("--boundary", choices=("clamp", "shrink"), default="clamp")
    a.add_argument("--ks-scale", choices=("refit", "prior"), default="refit",
                   help="scale of the exponential in the outlier scan")
    a.add_argument("--negate-output", action="store_true",
                   help="emit adapted scores good-high (alarm when < 0)")
    a.add_argument("--jobs", type=int, default=1)
    a.set_defaults(func=cmd_adapt)

    for name, func, helptext in (("eval", cmd_eval, "PD at fixed PFA, adapted vs raw"),
                                 ("roc-plot", cmd_roc_plot, "SVG ROC plot, adapted vs raw")):
        e = sub.add_parser(name, help=helptext)
        e.add_argument("adapted")
        e.add_argument("--subset", type=_subsets, default=list(SUBSETS) if name == "eval" else ["all"])
        e.add_argument("--orientation", choices=ORIENTATIONS, default="anomaly_low",
                       help="orientation of the raw score column")
        e.add_argument("--adapted-orientation", choices=ORIENTATIONS, default="anomaly_high")
        if name == "eval":
            e.add_argument("--pfa", type=_float_list, default=[0.001, 0.0002])
            e.add_argument("--report")
            e.add_argument("--roc", help="ROC CSV of the adapted scores (first subset)")
            e.add_argument("--roc-raw", help="ROC CSV of the raw scores (first subset)")
            e.add_argument("--svg")
        else:
            e.add_argument("--out", required=True)
        e.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"evtcfar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except fio.DataError as exc:
        print(f"evtcfar: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
