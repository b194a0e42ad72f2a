"""Command-line front end.

Exit codes: 0 success, 2 parse or usage error, 3 budget exceeded,
4 hypothesis violation (e.g. a non-rotating prefix or an unmet window
condition), 5 a checked inequality failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .algebra import A, K, format_word, parse_fiber, prereduce, skeletons
from .certificates import (SEED_LETTER, alpha0, build_certificate, char_poly, eta, format_poly,
                           matrix_product, primitive_block, spectral, word_matrix)
from .growth import BudgetExceeded, activity_growth, ball, growth_csv
from .norms import (ExponentParams, check_multilevel, contraction_sweep, step_q,
                    upper_exponent, weight_recursion)
from .omega import (NotRotatingError, lambda_from_alpha, parse_sequence, rotation_count)
from .oscillation import (InsufficientBlocksError, analyze, check_universal_bounds,
                          read_series_csv, synthesize_series, two_regime_profile)
from .treeauto import DegenerateSequenceError

SCHEMA_VERSION = 1

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_HYPOTHESIS, EXIT_CHECK = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# -- output ------------------------------------------------------------------------

def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config(args) -> dict:
    skip = {"func", "handler"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, result: dict, csv_text: str = None):
    fmt = args.format
    if fmt == "csv" and csv_text is None:
        raise CliError(f"{args.command} has no CSV form; use --format json", EXIT_PARSE)
    if fmt == "csv":
        header = (f"# schema_version={SCHEMA_VERSION}\n"
                  f"# config={json.dumps(_config(args), sort_keys=True)}\n")
        text = header + csv_text
    else:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "command": args.command,
            "config": _config(args),
            "result": result,
            "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        text = json.dumps(payload, indent=2, default=_json_default) + "\n"
    if args.out:
        _atomic_write(Path(args.out), text)
    else:
        sys.stdout.write(text)


def _json_default(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    if hasattr(x, "numerator"):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _budget(args):
    caps = [x for x in (args.budget_elems, _env_budget()) if x is not None]
    return min(caps) if caps else None


def _env_budget():
    raw = os.environ.get("GROWTHLAB_BUDGET")
    if raw in (None, ""):
        return None
    try:
        value = int(raw)
    except ValueError:
        raise CliError(f"GROWTHLAB_BUDGET={raw!r} is not an integer", EXIT_PARSE)
    if value < 1:
        raise CliError("GROWTHLAB_BUDGET must be positive", EXIT_PARSE)
    return value


def _seq(args):
    try:
        return parse_sequence(args.seq)
    except ValueError as exc:
        raise CliError(f"bad --seq: {exc}", EXIT_PARSE)


def _fiber(args):
    try:
        return parse_fiber(args.fiber)
    except (ValueError, OSError) as exc:
        raise CliError(f"bad --fiber: {exc}", EXIT_PARSE)


# -- commands -------------------------------------------------------------------------

def cmd_ball(args):
    seq, F = _seq(args), _fiber(args)
    budget = _budget(args)
    code = EXIT_OK
    try:
        series = ball(seq, F, args.radius, budget)
    except BudgetExceeded as exc:
        series = exc.partial
        code = EXIT_BUDGET
    act_radius = min(series.radius, args.activity_radius)
    try:
        act = activity_growth(seq, act_radius, budget=budget)
    except BudgetExceeded:
        act, act_radius, code = None, None, EXIT_BUDGET
    values = list(act.values) if act else []
    if args.plot:
        from .plotting import plot_growth
        plot_growth(series.counts, values, args.plot, title=str(seq))
    result = {
        "sequence": str(seq),
        "fiber": str(F),
        "radius_requested": args.radius,
        "radius_computed": series.radius,
        "complete": code == EXIT_OK,
        "activity_radius": act_radius,
        "rows": [{"r": r, "ball": b, "activity": values[r] if r < len(values) else None}
                 for r, b in enumerate(series.counts)],
    }
    _emit(args, result, growth_csv(series, act))
    return code


def cmd_certify(args):
    seq = _seq(args)
    budget = _budget(args)
    code = EXIT_OK
    reports = []
    for k in range(args.levels + 1):
        # |w_k| = 2·(column sum of the product at the seed) is known before building w_k
        seed = SEED_LETTER[seq.index(k - 1)] if k else 1
        predicted = 2 * sum(row[seed - 1] for row in matrix_product(seq, k))
        if budget is not None and predicted > budget:
            code = EXIT_BUDGET
            break
        rep = build_certificate(seq, k)
        reports.append(rep)
    ok = all(r.s >= 2 ** r.k and r.counts == r.matrix_counts for r in reports)
    if code == EXIT_OK and not ok:
        code = EXIT_CHECK
    if args.plot and reports:
        from .plotting import plot_certificates
        plot_certificates(reports, args.plot, reference=alpha0(), title=str(seq))
    result = {
        "sequence": str(seq),
        "levels_requested": args.levels,
        "complete": len(reports) == args.levels + 1,
        "norm": "entrywise 1-norm",
        "all_checks_pass": ok,
        "certificates": [dict(r.to_json(), bound_2k=2 ** r.k) for r in reports],
        "lower_exponent_estimates": [{"k": r.k, "ratio": r.ratio} for r in reports if r.k >= 1],
    }
    rows = "k,length,activity,nb,nc,nd,ratio\n" + "".join(
        f"{r.k},{r.length},{r.s},{r.counts[0]},{r.counts[1]},{r.counts[2]},{r.ratio!r}\n"
        for r in reports)
    _emit(args, result, rows)
    return code


def cmd_spectral(args):
    word = args.matrix_word
    if not word or any(ch not in "012" for ch in word):
        raise CliError("--matrix-word must be a non-empty string over 0,1,2", EXIT_PARSE)
    period = [int(ch) for ch in word]
    B, m, unit = primitive_block(period)
    rep = spectral(B)
    product = word_matrix(period)
    rate = rep.root ** (m / len(period))
    result = {
        "eta": eta(),
        "alpha0": alpha0(),
        "matrix_word": word,
        "period_product": [list(r) for r in product],
        "period_product_charpoly": list(char_poly(product)),
        "primitive_block": {"shifts": list(unit), "power": m, **rep.to_json()},
        "charpoly": list(rep.charpoly),
        "charpoly_text": format_poly(rep.charpoly),
        "root": rep.root,
        "bracket": [float(rep.bracket[0]), float(rep.bracket[1])],
        "growth_rate_per_letter": rate,
        "lower_exponent": math.log(2) / math.log(rate),
    }
    _emit(args, result)
    return EXIT_OK


def _step_pairs(seq, levels):
    pairs = []
    for i in range(levels):
        x, y = seq.index(i), seq.index(i + 1)
        step_q(x, y)  # raises on a non-rotating step
        if (x, y) not in pairs:
            pairs.append((x, y))
    return pairs


def cmd_normcheck(args):
    seq, F = _seq(args), _fiber(args)
    try:
        pairs = _step_pairs(seq, args.levels)
    except NotRotatingError as exc:
        raise CliError(str(exc), EXIT_HYPOTHESIS)
    if args.mode == "exhaustive":
        words = list(skeletons(args.max_factors))
    else:
        rng = random.Random(args.seed)
        alphabet = [A] + [K(f, v) for f in range(F.order) for v in range(4)]
        words = [prereduce([rng.choice(alphabet) for _ in range(rng.randint(1, args.max_length))],
                           F, keep_trivial=True) for _ in range(args.samples)]
    budget = _budget(args)
    if budget is not None and len(words) > budget:
        raise CliError(f"{len(words)} words exceed the budget {budget}", EXIT_BUDGET)
    sweep = contraction_sweep(words, pairs, F, args.constant)
    multi = None
    if args.multilevel:
        viol = sum(1 for w in words[: args.multilevel_samples]
                   if not check_multilevel(w, seq, args.multilevel, F).holds)
        multi = {"p": args.multilevel, "checked": min(len(words), args.multilevel_samples),
                 "violations": viol}
    rec = [{"omega0": r.letter, "v": "bcd"[r.v - 1], "step": r.step,
            "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual} for r in weight_recursion()]
    result = {
        "sequence": str(seq),
        "mode": args.mode,
        "constant": args.constant,
        "steps": [{"omega0": x, "omega1": y, "q": step_q(x, y), "checked": s.checked,
                   "violations": s.violations, "worst_excess": s.worst_excess,
                   "witness": format_word(s.witness) if s.witness else None}
                  for (x, y), s in sweep.items()],
        "multilevel": multi,
        "weight_recursion": rec,
    }
    _emit(args, result)
    failed = any(s.violations for s in sweep.values()) or (multi and multi["violations"])
    return EXIT_CHECK if failed else EXIT_OK


def cmd_exponent(args):
    seq = _seq(args)
    if args.lam is not None:
        lam = args.lam
    elif args.alpha is not None:
        try:
            lam = lambda_from_alpha(args.alpha)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_PARSE)
    else:
        raise CliError("give --lambda or --alpha", EXIT_PARSE)
    try:
        params: ExponentParams = upper_exponent(seq, args.horizon, args.P, lam)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE)
    result = dict(params.to_json(), sequence=str(seq))
    _emit(args, result)
    return EXIT_OK if params.hypothesis_holds else EXIT_HYPOTHESIS


def cmd_seq(args):
    seq = _seq(args)
    letters = seq.prefix(args.length)
    stats = rotation_count(letters, strict=False)
    result = {
        "description": str(seq),
        "prefix": letters,
        "p": stats.p,
        "q": stats.q,
        "ratio": str(stats.ratio),
        "non_rotating_steps": stats.invalid,
        "rotating": stats.invalid == 0,
    }
    _emit(args, result, "i,letter\n" + "".join(f"{i},{x}\n" for i, x in enumerate(letters)))
    return EXIT_OK


def cmd_oscillate(args):
    if args.input:
        try:
            series = read_series_csv(_strip_comments(Path(args.input).read_text()))
        except (OSError, ValueError) as exc:
            raise CliError(f"bad --input: {exc}", EXIT_PARSE)
        source = args.input
    else:
        switches = [10.0 ** k for k in range(1, args.alternations * 2 + 1)]
        profile = two_regime_profile(args.high, args.low, switches)
        series = synthesize_series(profile, switches[-1] * 10)
        source = f"synthetic:high={args.high},low={args.low},switches={len(switches)}"
    if args.alpha is None or args.beta is None:
        raise CliError("oscillate needs --alpha and --beta", EXIT_PARSE)
    try:
        report = analyze(series, args.alpha, args.beta, args.i0)
    except (InsufficientBlocksError, ValueError) as exc:
        raise CliError(str(exc), EXIT_HYPOTHESIS)
    verdict = check_universal_bounds(series, args.alpha, args.beta, report)
    if args.plot:
        from .plotting import plot_oscillation
        plot_oscillation(series, report, args.plot, title=source)
    result = {
        "source": source,
        "increasing": series.is_increasing,
        "increasing_source": series.increasing_source,
        "submultiplicative": series.is_submultiplicative,
        "submultiplicative_source": series.submultiplicative_source,
        "report": report.to_json(series),
        "bounds": {"u_bound": verdict.u_bound, "l_bound": verdict.l_bound,
                   "u_ok": verdict.u_ok, "l_ok": verdict.l_ok,
                   "findings": verdict.findings(), "pair_violations": verdict.pair_violations},
    }
    _emit(args, result)
    return EXIT_OK if verdict.ok else EXIT_CHECK


def _strip_comments(text):
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))


# -- parser -----------------------------------------------------------------------------

def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="growthlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seq=True, fiber=False, plot=False):
        if seq:
            sp.add_argument("--seq", default="periodic:012", help="sequence DSL")
        if fiber:
            sp.add_argument("--fiber", default="Z2", help="Z<n>, Sym3 or table:PATH")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--budget-elems", type=_positive, help="element cap")
        sp.add_argument("--seed", type=int, default=0, help="seed for random sampling")
        if plot:
            sp.add_argument("--plot", help="also render a figure to this file")

    sp = sub.add_parser("ball", help="exact growth series b(r) and activity s(r)")
    common(sp, fiber=True, plot=True)
    sp.add_argument("--radius", type=_nonneg, required=True)
    sp.add_argument("--activity-radius", type=_nonneg, default=14,
                    help="largest radius for the exhaustive activity column")
    sp.set_defaults(handler=cmd_ball)

    sp = sub.add_parser("certify", help="certificate words w_k and lower exponent estimates")
    common(sp, plot=True)
    sp.add_argument("--levels", type=_nonneg, required=True)
    sp.set_defaults(handler=cmd_certify)

    sp = sub.add_parser("spectral", help="characteristic polynomial and certified root")
    common(sp, seq=False)
    sp.add_argument("--matrix-word", default="012", help="period over 0,1,2, e.g. 001122")
    sp.set_defaults(handler=cmd_spectral)

    sp = sub.add_parser("normcheck", help="contraction inequality of the weighted norm")
    common(sp, fiber=True)
    sp.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    sp.add_argument("--levels", type=_positive, default=6, help="sequence steps to check")
    sp.add_argument("--max-factors", type=_nonneg, default=6)
    sp.add_argument("--samples", type=_positive, default=10000)
    sp.add_argument("--max-length", type=_positive, default=40)
    sp.add_argument("--constant", type=float, default=None,
                    help="additive constant (default η‖a‖)")
    sp.add_argument("--multilevel", type=_nonneg, default=0, help="also check depth p")
    sp.add_argument("--multilevel-samples", type=_positive, default=2000)
    sp.set_defaults(handler=cmd_normcheck)

    sp = sub.add_parser("exponent", help="upper exponent α(λ) and its window hypothesis")
    common(sp)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--P", type=_positive, default=6)
    sp.add_argument("--horizon", type=_nonneg, default=200)
    sp.set_defaults(handler=cmd_exponent)

    sp = sub.add_parser("seq", help="prefix dump and rotation statistics")
    common(sp)
    sp.add_argument("--length", type=_nonneg, default=20, help="last index k of the prefix")
    sp.set_defaults(handler=cmd_seq)

    sp = sub.add_parser("oscillate", help="upper/lower sets and pseudo-period exponents")
    common(sp, seq=False, plot=True)
    sp.add_argument("--input", help="series CSV (r,b | r,logb | logr,loglogb | growth CSV)")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--i0", type=_nonneg, default=1)
    sp.add_argument("--high", type=float, default=0.97, help="synthetic high exponent")
    sp.add_argument("--low", type=float, default=0.55, help="synthetic low exponent")
    sp.add_argument("--alternations", type=_positive, default=4)
    sp.set_defaults(handler=cmd_oscillate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.handler(args)
    except CliError as exc:
        print(f"growthlab: {exc}", file=sys.stderr)
        return exc.code
    except DegenerateSequenceError as exc:
        print(f"growthlab: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NotRotatingError as exc:
        print(f"growthlab: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except BudgetExceeded as exc:
        print(f"growthlab: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
