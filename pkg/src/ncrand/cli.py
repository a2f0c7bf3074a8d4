"""Command-line entry points: ``ncrand <subcommand>`` and ``effreal eval``.

Exit status is 0 on success, 2 on invalid input (including argparse
errors and an unwritable output path) and 3 when a numerical procedure
fails to converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from fractions import Fraction

import numpy as np

from . import __version__, cltlab, effreal, lawlib, mlrand, ncp, qinfo, rmt, seqspace
from .errors import NonConvergence, ValidationError
from .montecarlo import set_threads

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGENCE = 0, 2, 3

# flags that steer a run but are not experiment parameters
_PLUMBING = {"command", "out", "config", "deterministic", "threads", "summary", "handler"}


class UsageError(ValidationError):
    pass


# ---------------------------------------------------------------------------
# output


def _header(args) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _PLUMBING and k != "seed"}
    head = {
        "artifact": "ncrand",
        "version": __version__,
        "command": args.command,
        "parameters": params,
        "seed": args.seed,
    }
    if not args.deterministic:
        head["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return head


def _csv_text(args, header_row, rows) -> str:
    buf = io.StringIO()
    for key, val in _header(args).items():
        buf.write(f"# {key}: {json.dumps(val, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header_row)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _json_text(args, data) -> str:
    return json.dumps({"header": _header(args), "data": data}, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ncrand-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str, path=None) -> None:
    path = path if path is not None else args.out
    if path:
        try:
            write_atomic(path, text)
        except OSError as exc:
            raise UsageError(f"cannot write {path}: {exc}") from exc
    else:
        sys.stdout.write(text)


def data_section(text: str) -> str:
    """Strip the run header: comment lines of a CSV, or all but ``data`` of a JSON."""
    if text.lstrip().startswith("{"):
        return json.dumps(json.loads(text)["data"], sort_keys=True)
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


# ---------------------------------------------------------------------------
# parameter helpers


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(Fraction(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive(name, value, minimum=1):
    if value is None or value < minimum:
        raise UsageError(f"--{name} must be at least {minimum}")


def _bits_from_args(args) -> seqspace.BitString:
    if args.input:
        with open(args.input, encoding="ascii") as fh:
            return seqspace.BitString("".join(fh.read().split()))
    n = args.length
    _positive("length", n)
    if args.generator == "zeros":
        return seqspace.BitString.zeros(n)
    if args.generator == "alternating":
        return mlrand.alternating(n)
    return seqspace.BitString.random(n, args.seed)


# ---------------------------------------------------------------------------
# handlers


def cmd_gue_spectrum(args):
    _positive("dim", args.dim)
    _positive("trials", args.trials)
    ens = rmt.RandomMatrixEnsemble("gue", args.dim, args.seed)
    rows = []
    for t, vals in enumerate(rmt.trial_spectra(ens, args.trials)):
        rows.extend((t, i, float(v)) for i, v in enumerate(vals))
    _emit(args, _csv_text(args, ["trial", "eigenvalue_index", "value"], rows))


def cmd_mean_spectrum(args):
    _positive("dim", args.dim)
    _positive("trials", args.trials)
    _positive("bins", args.bins)
    ens = rmt.RandomMatrixEnsemble(args.ensemble, args.dim, args.seed)
    rng = None
    if args.range_lo is not None or args.range_hi is not None:
        if args.range_lo is None or args.range_hi is None or args.range_hi <= args.range_lo:
            raise UsageError("--range-lo and --range-hi must be given together with lo < hi")
        rng = (args.range_lo, args.range_hi)
    dist = rmt.mean_spectrum(ens, args.trials, args.bins, rng)
    h = dist.histogram
    _emit(args, _csv_text(args, h.header(), h.rows()))


def cmd_free_clt(args):
    _positive("n", args.n)
    _positive("dim", args.dim, 2)
    _positive("trials", args.trials)
    res = cltlab.free_clt(args.n, args.dim, args.trials, args.seed)
    _emit(args, _json_text(args, res.to_dict()))


def cmd_classical_clt(args):
    _positive("n", args.n)
    _positive("trials", args.trials, 2)
    res = cltlab.classical_clt(args.n, args.trials, args.seed)
    _emit(args, _json_text(args, res.to_dict()))


def cmd_moment_ladder(args):
    _positive("trials", args.trials)
    if args.source == "classical":
        src = cltlab.SourceSpec("classical_coin")
    else:
        src = cltlab.SourceSpec("free_bernoulli_matrix", args.dim)
    ladder = cltlab.moment_ladder(src, args.n_list, args.trials, args.seed)
    _emit(args, _csv_text(args, cltlab.LADDER_HEADER, ladder.rows()))
    if args.summary:
        summary = {"source": src.label, "ks": {str(r.n): r.ks for r in ladder.results}}
        _emit(args, _json_text(args, summary), path=args.summary)


def cmd_moments(args):
    if args.max_order < 0:
        raise UsageError("--max-order must be nonnegative")
    laws = ["gaussian", "semicircle"] if args.law == "both" else [args.law]
    rows = []
    for law in laws:
        ref = lawlib.STANDARD_GAUSSIAN if law == "gaussian" else lawlib.STANDARD_SEMICIRCLE
        for n in range(args.max_order + 1):
            rows.append((law, n, lawlib.exact_moment(law, n), lawlib.numeric_moment(ref, n)))
    _emit(args, _csv_text(args, ["law", "order", "exact", "quadrature"], rows))


def cmd_freeness_defect(args):
    if args.model == "coins":
        c1, c2 = ncp.commuting_coins()
        rep = ncp.freeness_defect([c1], [c2], args.max_word_len, args.max_power)
        data = rep.to_dict()
    else:
        _positive("dim", args.dim)
        _positive("trials", args.trials)
        defects = []
        for t in range(args.trials):
            h1 = rmt.sample(rmt.RandomMatrixEnsemble("gue", args.dim, args.seed), t)
            h2 = rmt.sample(rmt.RandomMatrixEnsemble("gue", args.dim, args.seed + 1), t)
            defects.append(
                ncp.freeness_defect(
                    [ncp.NCRandomVariable(h1, "H1")], [ncp.NCRandomVariable(h2, "H2")],
                    args.max_word_len, args.max_power,
                )
            )
        worst = max(defects, key=lambda r: r.max_defect)
        data = {
            "mean_defect": float(np.mean([r.max_defect for r in defects])),
            "max_defect": worst.max_defect,
            "word": worst.word_labels(),
            "group_labels": list(worst.group_labels),
            "per_trial": [r.max_defect for r in defects],
            "dim": args.dim,
        }
    _emit(args, _json_text(args, data))


def cmd_ml_battery(args):
    bits = _bits_from_args(args)
    if not 0 < args.significance < 1:
        raise UsageError("--significance must lie in (0, 1)")
    reports = mlrand.run_test_battery(bits, args.significance)
    data = {
        "input_length": len(bits),
        "significance": args.significance,
        "tests": [r.to_dict() for r in reports],
    }
    _emit(args, _json_text(args, data))


_COVERS = {
    "zeros": (mlrand.zeros_cover, 1, 1),
    "full": (mlrand.full_cover, 1, 1),
    "low-weight": (mlrand.low_weight_cover, 8, 0),
}


def cmd_null_cover(args):
    _positive("k-max", args.k_max)
    cover, slope, offset = _COVERS[args.cover]
    slope = args.modulus_slope if args.modulus_slope is not None else slope
    offset = args.modulus_offset if args.modulus_offset is not None else offset
    modulus = lambda k: slope * k + offset  # noqa: E731
    max_level = args.max_level if args.max_level is not None else modulus(args.k_max)
    report = mlrand.verify_null_cover(mlrand.NullCoverWitness(cover, modulus, max_level), args.k_max)
    data = report.to_dict()
    data["cover"] = args.cover
    data["modulus"] = f"{slope}*k+{offset}"
    _emit(args, _json_text(args, data))


def cmd_compressibility(args):
    bits = _bits_from_args(args)
    enc = mlrand.encode(bits)
    rate = mlrand.compress_estimate(bits)
    data = {
        "length": len(bits),
        "code_bits": enc.n_bits,
        "bits_per_symbol": rate,
        "mode": enc.mode,
        "phrases": enc.n_phrases,
        "header_bits": mlrand.header_bits(len(bits)),
    }
    _emit(args, _json_text(args, data))


def cmd_place_selection(args):
    bits = _bits_from_args(args)
    res = mlrand.select_subsequence(bits, mlrand.RULES[args.rule])
    data = res.to_dict()
    if args.emit_subsequence:
        data["subsequence"] = str(res.subsequence)
    _emit(args, _json_text(args, data))


def cmd_dyadic(args):
    v = seqspace.dyadic_expand(args.prefix, args.tail)
    data = {"prefix": args.prefix, "tail": args.tail, "value": str(v), "decimal": float(v)}
    _emit(args, _json_text(args, data))


def cmd_cylinder_measure(args):
    s = seqspace.PrefixSet(args.prefix)
    m = seqspace.prefix_set_measure(s)
    data = {
        "members": [str(x) for x in s.canonical()],
        "measure": seqspace.format_dyadic(m),
        "decimal": float(m),
    }
    _emit(args, _json_text(args, data))


def cmd_shannon(args):
    src = qinfo.ClassicalSource(tuple(args.probs))
    _emit(args, _json_text(args, {"probabilities": list(src.probabilities), "entropy": qinfo.shannon_entropy(src)}))


def _state_from_args(args) -> qinfo.QubitState:
    if args.rho_json:
        with open(args.rho_json, encoding="utf-8") as fh:
            return qinfo.QubitState(ncp.matrix_from_json(json.load(fh)))
    if len(args.diag) != 2:
        raise UsageError("--diag takes two eigenvalues")
    return qinfo.QubitState.diagonal(*args.diag)


def cmd_von_neumann(args):
    st = _state_from_args(args)
    _emit(args, _json_text(args, {"rho": ncp.matrix_to_json(st.rho), "entropy": qinfo.von_neumann_entropy(st)}))


def cmd_schumacher(args):
    st = _state_from_args(args)
    rows = [r.row() for r in qinfo.schumacher_sweep(st, args.n_list, args.epsilon)]
    _emit(args, _csv_text(args, qinfo.SCHUMACHER_HEADER, rows))


def cmd_effreal_eval(args):
    if args.precision < 0:
        raise UsageError("--precision must be nonnegative")
    x = effreal.evaluate(args.expr)
    r = x.approx(args.precision)
    text = f"{r}\n{effreal.to_decimal(r, effreal.decimal_digits(args.precision))}\n"
    _emit(args, text)


# ---------------------------------------------------------------------------
# parser


def _default_seed() -> int:
    raw = os.environ.get("NCRAND_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _add_bits_source(p):
    p.add_argument("--input", help="file of ASCII 0/1 characters (whitespace ignored)")
    p.add_argument("--generator", choices=["zeros", "alternating", "random"], default="random")
    p.add_argument("--length", type=int, default=1024)


def _add_state(p):
    p.add_argument("--diag", type=_float_list, default=[0.5, 0.5], help="eigenvalues, e.g. 0.9,0.1")
    p.add_argument("--rho-json", help="2x2 matrix as JSON rows of [re, im] pairs")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(), help="base seed (default $NCRAND_SEED or 0)")
    common.add_argument("--out", help="output path (default stdout); written atomically")
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp from the header")
    common.add_argument("--threads", type=int, default=1, help="cap on worker threads")

    parser = argparse.ArgumentParser(prog="ncrand", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ncrand {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    subs = {}

    def add(name, handler, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(handler=handler)
        subs[name] = p
        return p

    p = add("gue-spectrum", cmd_gue_spectrum, "eigenvalues of seeded GUE samples (CSV)")
    p.add_argument("--dim", type=int, default=512)
    p.add_argument("--trials", type=int, default=20)

    p = add("mean-spectrum", cmd_mean_spectrum, "pooled eigenvalue histogram with Monte Carlo error (CSV)")
    p.add_argument("--ensemble", choices=["gue", "bernoulli_conjugated"], default="gue")
    p.add_argument("--dim", type=int, default=256)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--range-lo", type=float)
    p.add_argument("--range-hi", type=float)

    p = add("free-clt", cmd_free_clt, "free central limit with Haar-conjugated ±1 letters (JSON)")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--dim", type=int, default=512)
    p.add_argument("--trials", type=int, default=50)

    p = add("classical-clt", cmd_classical_clt, "classical central limit with fair ±1 coins (JSON)")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--trials", type=int, default=100000)

    p = add("moment-ladder", cmd_moment_ladder, "moment table over a list of n (CSV)")
    p.add_argument("--source", choices=["classical", "free"], default="classical")
    p.add_argument("--n-list", type=_int_list, default=[1, 10, 100])
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--dim", type=int, default=512)
    p.add_argument("--summary", help="also write a JSON summary with KS values here")

    p = add("moments", cmd_moments, "exact and quadrature moments of the limit laws (CSV)")
    p.add_argument("--law", choices=["gaussian", "semicircle", "both"], default="both")
    p.add_argument("--max-order", type=int, default=10)

    p = add("freeness-defect", cmd_freeness_defect, "alternating centered word defect (JSON)")
    p.add_argument("--model", choices=["coins", "gue"], default="coins")
    p.add_argument("--dim", type=int, default=512)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--max-word-len", type=int, default=4)
    p.add_argument("--max-power", type=int, default=1)

    p = add("ml-battery", cmd_ml_battery, "frequency, block, runs and compressibility tests (JSON)")
    _add_bits_source(p)
    p.add_argument("--significance", type=float, default=0.01)

    p = add("null-cover", cmd_null_cover, "verify a null cover against its modulus (JSON)")
    p.add_argument("--cover", choices=sorted(_COVERS), default="zeros")
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--max-level", type=int)
    p.add_argument("--modulus-slope", type=int)
    p.add_argument("--modulus-offset", type=int)

    p = add("compressibility", cmd_compressibility, "dictionary-coder rate in bits per symbol (JSON)")
    _add_bits_source(p)

    p = add("place-selection", cmd_place_selection, "subsequence selection and frequency stability (JSON)")
    _add_bits_source(p)
    p.add_argument("--rule", choices=sorted(mlrand.RULES), default="all")
    p.add_argument("--emit-subsequence", action="store_true")

    p = add("dyadic", cmd_dyadic, "dyadic expansion of prefix + constant tail (JSON)")
    p.add_argument("--prefix", default="")
    p.add_argument("--tail", choices=["zeros", "ones"], default="zeros")

    p = add("cylinder-measure", cmd_cylinder_measure, "unbiased measure of a union of cylinders (JSON)")
    p.add_argument("--prefix", nargs="*", default=[""])

    p = add("shannon", cmd_shannon, "Shannon entropy of a finite source (JSON)")
    p.add_argument("--probs", type=_float_list, default=[0.5, 0.5])

    p = add("von-neumann", cmd_von_neumann, "von Neumann entropy of a qubit state (JSON)")
    _add_state(p)

    p = add("schumacher", cmd_schumacher, "typical-subspace dimension and rate (CSV)")
    _add_state(p)
    p.add_argument("--n-list", type=_int_list, default=[4, 8, 12, 16])
    p.add_argument("--epsilon", type=float, default=0.1)

    p = add("effreal-eval", cmd_effreal_eval, "evaluate a computable-real expression")
    p.add_argument("expr", nargs="?", default="pi")
    p.add_argument("--precision", "-k", type=int, default=30)

    return parser, subs


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(argv, parser, subs):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    try:
        cfg = read_config(known.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    command = cfg.pop("command", None)
    if not any(a in subs for a in argv):
        if command is None:
            raise UsageError("config names no command")
        argv = [command, *argv]
    name = next(a for a in argv if a in subs)
    sp = subs[name]
    actions = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, raw in cfg.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"unknown parameter {key!r} for {name}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = _parse_bool(raw)
        elif action.nargs in ("*", "+"):
            defaults[key] = raw.split()
        else:
            try:
                defaults[key] = action.type(raw) if action.type else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"bad value for {key}: {raw!r}") from exc
            if action.choices is not None and defaults[key] not in action.choices:
                raise UsageError(f"bad value for {key}: {raw!r}")
    sp.set_defaults(**defaults)
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        argv = _apply_config(argv, parser, subs)
    except ValidationError as exc:
        print(f"ncrand: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_INVALID
    set_threads(args.threads)
    try:
        args.handler(args)
    except NonConvergence as exc:
        print(f"ncrand: nonconvergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValidationError as exc:
        print(f"ncrand: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, UnicodeDecodeError) as exc:
        print(f"ncrand: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def effreal_main(argv=None) -> int:
    """``effreal eval <expr> --precision k``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = argparse.ArgumentParser(prog="effreal", description="evaluate computable reals")
    sub = parser.add_subparsers(dest="action", metavar="action")
    ev = sub.add_parser("eval", help="print a rational approximant and its decimal rendering")
    ev.add_argument("expr")
    ev.add_argument("--precision", "-k", type=int, default=30)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.action != "eval":
        parser.print_help(sys.stderr)
        return EXIT_INVALID
    return main(["effreal-eval", args.expr, "--precision", str(args.precision)])


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
