"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments or I/O, 2 optimizer did not
converge, 3 a certified bound was violated. Data goes to ``--out`` (``-``
for stdout); diagnostics go to stderr.
"""

import argparse
import json
import math
import sys

from . import bounds as bnd
from . import frames as fr
from . import witness as wit
from .measurement import (
    density_to_dict,
    load_density,
    outcome_distribution,
    povm_from_frame,
    save_density,
)
from .numerics import InvalidStateError, maximally_mixed, random_density

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2
EXIT_VIOLATION = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for non-convergence
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _alphas(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        out.append(math.inf if tok in ("inf", "infinity") else float(tok))
    if not out:
        raise argparse.ArgumentTypeError("empty alpha list")
    for a in out:
        if not a > 0:
            raise argparse.ArgumentTypeError(f"alpha must be positive, got {a}")
    return tuple(out)


def _eta(text):
    eta = float(text)
    if not 0.0 <= eta <= 1.0:
        raise argparse.ArgumentTypeError("eta must lie in [0, 1]")
    return eta


def _info(msg):
    print(msg, file=sys.stderr)


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _write_text(path, text):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _write_lines(path, header, lines):
    _write_text(path, "\n".join([header, *lines]) + "\n")


def _print_report(report):
    _info(json.dumps(report.as_dict()))


# ----------------------------------------------------------------------------
# frame


def cmd_frame_gen(args):
    kind = args.kind
    _info(f"# seed={args.seed}")
    if kind == "basis":
        frame = fr.orthonormal_basis_frame(_need(args.d, "--d"))
    elif kind == "simplex":
        frame = fr.simplex_etf(_need(args.d, "--d"))
    elif kind == "optimize":
        d, n = _need(args.d, "--d"), _need(args.n, "--n")
        opts = fr.OptimizeOptions(
            **{k: v for k, v in (("restarts", args.restarts), ("max_iter", args.max_iter)) if v is not None}
        )
        result = fr.optimize_etf(d, n, seed=args.seed, options=opts)
        if not result.success:
            _info(
                f"optimizer did not converge for d={d}, n={n}: best residual "
                f"{result.best_residual:.3g} over {len(result.residuals)} restarts"
            )
            return EXIT_NO_CONVERGENCE
        frame = result.frame
    elif kind == "complement":
        frame = fr.naimark_complement(fr.load_frame(_need(args.frame, "--frame")))
    else:
        raise UsageError(f"unknown kind {kind!r}")
    report = frame.report()
    _print_report(report)
    _write_text(args.out, fr.dumps_frame(frame))
    return EXIT_OK if report.passed else EXIT_INPUT


def cmd_frame_validate(args):
    vectors = fr.vectors_from_dict(_read_json(args.frame))
    report = fr.validate_frame(vectors, args.tol)
    _write_text(args.out, json.dumps(report.as_dict(), indent=1) + "\n")
    return EXIT_OK if report.passed else EXIT_INPUT


def cmd_frame_complement(args):
    frame = fr.naimark_complement(fr.load_frame(args.frame))
    _print_report(frame.report())
    _write_text(args.out, fr.dumps_frame(frame))
    return EXIT_OK


# ----------------------------------------------------------------------------
# states


def cmd_state_random(args):
    _info(f"# seed={args.seed}")
    if args.separable is not None:
        dB = args.dB if args.dB is not None else args.d
        state = wit.random_separable_state(args.d, args.separable, args.seed, dB)
        _dump_state(args.out, state.matrix, state.dA, state.dB, seed=args.seed, kind="separable")
    else:
        rho = random_density(args.d, args.rank, args.seed)
        _dump_state(args.out, rho, seed=args.seed, kind="ginibre")
    return EXIT_OK


def cmd_state_maxent(args):
    state = wit.max_entangled_state(args.d)
    _dump_state(args.out, state.matrix, state.dA, state.dB, kind="maxent")
    return EXIT_OK


def cmd_state_mixed(args):
    if args.bipartite:
        d = args.d * args.d
        _dump_state(args.out, maximally_mixed(d), args.d, args.d, kind="maximally_mixed")
    else:
        _dump_state(args.out, maximally_mixed(args.d), kind="maximally_mixed")
    return EXIT_OK


def _dump_state(path, rho, dA=None, dB=None, **meta):
    if path == "-":
        sys.stdout.write(json.dumps(density_to_dict(rho, dA, dB, **meta)) + "\n")
    else:
        save_density(path, rho, dA, dB, **meta)


# ----------------------------------------------------------------------------
# measurement and bounds


def cmd_measure(args):
    frame = fr.load_frame(args.frame)
    rho, _, _ = load_density(args.state)
    dist = outcome_distribution(povm_from_frame(frame), rho)
    lines = [f"{j},{p:.17g}" for j, p in enumerate(dist.probs)]
    _write_lines(args.out, "outcome,probability", lines)
    return EXIT_OK


def cmd_bounds(args):
    frame = fr.load_frame(args.frame)
    if args.state is not None:
        rho, dA, _ = load_density(args.state)
        if dA is not None:
            raise UsageError("bounds needs a single-system state, got a bipartite one")
        states = [rho]
    elif args.random is not None:
        if args.random < 1:
            raise UsageError("--random needs a positive count")
        d = frame.d
        states = [random_density(d, 1 + i % d, args.seed + i) for i in range(args.random)]
    elif args.mixed:
        states = [maximally_mixed(frame.d)]
    else:
        raise UsageError("give --state, --random K or --mixed")
    _info(f"# seed={args.seed}")

    families = args.family
    if families is not None:
        families = tuple(f for chunk in families for f in chunk.split(",") if f)
        if args.eta is not None and "inefficiency" not in families:
            families += ("inefficiency",)
    povm = povm_from_frame(frame)
    rows = []
    for rho in states:
        rows.extend(bnd.certify(frame, rho, args.alphas, families, args.eta, povm=povm))
    _write_lines(args.out, bnd.CSV_HEADER, [bnd.report_csv_row(r) for r in rows])
    bad = [r for r in rows if not r.holds()]
    if bad:
        for r in bad:
            _info(f"violated: {r.bound_name} alpha={bnd.format_alpha(r.alpha)} slack={r.slack:.3g}")
        return EXIT_VIOLATION
    return EXIT_OK


# ----------------------------------------------------------------------------
# witnesses


def _load_bipartite(path, d):
    rho, dA, dB = load_density(path)
    if dA is None:
        if rho.shape[0] != d * d:
            raise UsageError("state is not bipartite and its size is not d^2")
        dA = dB = d
    if dA != d or dB != d:
        raise UsageError(f"state dims ({dA}, {dB}) do not match frame dimension {d}")
    return wit.bipartite(rho, dA, dB)


def witness_verdicts(frame, state, mode, alphas):
    params = frame.params
    verdicts = []
    if mode == "g":
        verdicts.append(wit.g_test(wit.joint_etf_distribution(frame, state), params))
    elif mode == "convolution":
        povm = povm_from_frame(frame)
        elements = wit.convolution_povm(povm, povm)
        dist = wit.povm_distribution(elements, state)
        for a in alphas:
            if 0 < a <= 2:
                verdicts.append(wit.separability_tsallis_test(dist, a, params))
        verdicts.append(wit.separability_maxprob_test(dist, params))
    elif mode == "steer":
        joint = wit.joint_etf_distribution(frame, state)
        for a in alphas:
            if 0 < a <= 2:
                verdicts.append(wit.steering_test(joint, a, params))
    else:
        raise UsageError(f"unknown mode {mode!r}")
    return verdicts


def cmd_witness(args):
    frame = fr.load_frame(args.frame)
    state = _load_bipartite(args.state, frame.d)
    verdicts = witness_verdicts(frame, state, args.mode, args.alphas)
    _write_lines(args.out, wit.CSV_HEADER, [wit.verdict_csv_row(v) for v in verdicts])
    return EXIT_OK


def cmd_steer(args):
    args.mode = "steer"
    return cmd_witness(args)


# ----------------------------------------------------------------------------


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required here")
    return value


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def build_parser():
    p = _Parser(prog="etfbounds", description="Equiangular tight frames, ETF POVMs and their uncertainty bounds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    frame = sub.add_parser("frame", help="generate, validate or complement frames")
    fsub = frame.add_subparsers(dest="frame_command", required=True, parser_class=_Parser)
    gen = fsub.add_parser("gen", help="construct a frame")
    gen.add_argument("--kind", choices=("basis", "simplex", "optimize", "complement"), required=True)
    gen.add_argument("--d", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--frame", help="input frame for --kind complement")
    gen.add_argument("--restarts", type=int)
    gen.add_argument("--max-iter", type=int)
    gen.add_argument("--out", default="-")
    gen.set_defaults(func=cmd_frame_gen)
    val = fsub.add_parser("validate", help="check a frame file")
    val.add_argument("--frame", required=True)
    val.add_argument("--tol", type=float)
    val.add_argument("--out", default="-")
    val.set_defaults(func=cmd_frame_validate)
    comp = fsub.add_parser("complement", help="Naimark complement of a frame file")
    comp.add_argument("--frame", required=True)
    comp.add_argument("--out", default="-")
    comp.set_defaults(func=cmd_frame_complement)

    state = sub.add_parser("state", help="write density matrices")
    ssub = state.add_subparsers(dest="state_command", required=True, parser_class=_Parser)
    rnd = ssub.add_parser("random", help="Ginibre state, or a random separable state with --separable K")
    rnd.add_argument("--d", type=int, required=True)
    rnd.add_argument("--rank", type=int)
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--separable", type=int, metavar="K", help="number of product components")
    rnd.add_argument("--dB", type=int)
    rnd.add_argument("--out", default="-")
    rnd.set_defaults(func=cmd_state_random)
    mx = ssub.add_parser("maxent", help="maximally entangled two-qudit state")
    mx.add_argument("--d", type=int, required=True)
    mx.add_argument("--out", default="-")
    mx.set_defaults(func=cmd_state_maxent)
    mm = ssub.add_parser("mixed", help="maximally mixed state")
    mm.add_argument("--d", type=int, required=True)
    mm.add_argument("--bipartite", action="store_true")
    mm.add_argument("--out", default="-")
    mm.set_defaults(func=cmd_state_mixed)

    meas = sub.add_parser("measure", help="outcome distribution of the frame POVM")
    meas.add_argument("--frame", required=True)
    meas.add_argument("--state", required=True)
    meas.add_argument("--out", default="-")
    meas.set_defaults(func=cmd_measure)

    b = sub.add_parser("bounds", help="certify uncertainty bounds")
    b.add_argument("--frame", required=True)
    b.add_argument("--state")
    b.add_argument("--random", type=int, metavar="K")
    b.add_argument("--mixed", action="store_true", help="use the maximally mixed state")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--alphas", type=_alphas, default=bnd.DEFAULT_ALPHAS)
    b.add_argument("--family", action="append", help=f"one or more of {', '.join(bnd.ALL_FAMILIES)}")
    b.add_argument("--eta", type=_eta)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_bounds)

    w = sub.add_parser("witness", help="entanglement and steering tests")
    w.add_argument("--frame", required=True)
    w.add_argument("--state", required=True)
    w.add_argument("--mode", choices=("g", "convolution", "steer"), default="g")
    w.add_argument("--alphas", type=_alphas, default=bnd.TSALLIS_ALPHAS)
    w.add_argument("--out", default="-")
    w.set_defaults(func=cmd_witness)

    st = sub.add_parser("steer", help="steering inequality (same as witness --mode steer)")
    st.add_argument("--frame", required=True)
    st.add_argument("--state", required=True)
    st.add_argument("--alphas", type=_alphas, default=bnd.TSALLIS_ALPHAS)
    st.add_argument("--out", default="-")
    st.set_defaults(func=cmd_steer)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, InvalidStateError, OSError, KeyError) as exc:
        _info(f"error: {exc}")
        return EXIT_INPUT


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
