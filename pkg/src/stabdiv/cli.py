"""Command-line front end.

Every subcommand prints one report (JSON by default) to stdout or to
``--output``; relative output paths are placed under ``$STABDIV_OUTPUT_DIR``
when that variable is set.

Exit codes: 0 success, 1 input error, 2 numerical diagnostic,
3 ``growing`` verdict under ``--expect-stable``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import division, groebner, norms, operators, stability
from .operators import NumericalDiagnosticError
from .polyring import Polynomial, PolynomialSyntaxError, VectorPolynomial, WeightedOrder, format_poly, parse

OUTPUT_DIR_ENV = "STABDIV_OUTPUT_DIR"

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_GROWING = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for numerical failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    d: int = 2
    weights: tuple = ()
    precedence: tuple | None = None
    t: Fraction = Fraction(-2)
    gens: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    seed: int = 0
    fmt: str = "json"
    trace: bool = False

    @property
    def order(self) -> WeightedOrder:
        return WeightedOrder(self.weights, self.precedence)

    @property
    def space(self) -> norms.SpaceParams:
        return norms.SpaceParams(self.d, self.t)


# ---------------------------------------------------------------- parsing


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"expected a rational 'p/q', got {text!r}") from None


def _parse_poly(text: str, d: int):
    try:
        return parse(text, d)
    except PolynomialSyntaxError as e:
        raise InputError(f"{e} in {text!r}") from None


def _read_gens(args, d: int) -> list:
    texts = list(args.gens or [])
    if getattr(args, "gens_file", None):
        try:
            with open(args.gens_file, encoding="utf-8") as fh:
                texts += [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        except OSError as e:
            raise InputError(f"cannot read {args.gens_file}: {e.strerror}") from None
    return [_parse_poly(s, d) for s in texts]


def _common(p: argparse.ArgumentParser, gens=True):
    p.add_argument("--d", type=int, default=None, help="number of variables (default: from weights, else 2)")
    p.add_argument("--weights", default=None, help="comma-separated positive weights, e.g. 2,1")
    p.add_argument("--precedence", default=None, help="1-based variable precedence, e.g. 2,1")
    p.add_argument("--t", default="-2", help="space parameter t as 'p/q' (default -2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="json")
    p.add_argument("--output", default=None, help="write the report here instead of stdout")
    if gens:
        p.add_argument("--gens", nargs="+", default=None, metavar="POLY")
        p.add_argument("--gens-file", default=None, help="one polynomial per line")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="stabdiv", description="Stable division experiments in weighted Hilbert spaces.")
    sub = ap.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", help="exact squared norms, c-ratio tables, norm equivalence")
    _common(p, gens=False)
    p.add_argument("--poly", nargs="+", default=[], metavar="POLY")
    p.add_argument("--c-table", type=int, default=None, metavar="N", help="list c_{n,t} for n = 0..N")
    p.add_argument("--check-equivalence", action="store_true")

    p = sub.add_parser("divide", help="division with remainder")
    _common(p)
    p.add_argument("--h", required=True, metavar="POLY")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--ratio", action="store_true", help="also report the squared stability ratio")

    p = sub.add_parser("groebner", help="Groebner basis, staircase, degree equalization")
    _common(p)
    p.add_argument("--no-reduce", action="store_true")
    p.add_argument("--equalize", default=None, metavar="M|auto")

    p = sub.add_parser("beurling", help="gcd, cofactors and cofactor codimension (d = 2)")
    _common(p)

    p = sub.add_parser("certify", help="degree-slice stability certification")
    _common(p)
    p.add_argument("--q-max", type=int, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--complete", action="store_true",
                   help="replace gens by a quasi-homogeneous Groebner basis equalized to one degree")
    p.add_argument("--expect-stable", action="store_true")

    p = sub.add_parser("counterexample", help="the three-component module example")
    _common(p, gens=False)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--basis", choices=("trap", "fixed"), default="trap")

    p = sub.add_parser("scan-commutators", help="Schatten norms of P_N^perp S_j^* P_N")
    _common(p)
    p.add_argument("--p", type=float, default=3.0)
    p.add_argument("--D-list", dest="D_list", default="10,15,20,25,30")

    p = sub.add_parser("fang-xia-probe", help="empirical constant of the Q S_j^* g f inequality")
    _common(p, gens=False)
    p.add_argument("--poly", required=True, metavar="POLY")
    p.add_argument("--D", type=int, default=15)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--vanishing-order", type=int, default=0)
    p.add_argument("--rows", action="store_true", help="include every sample in the report")

    p = sub.add_parser("angle-check", help="randomized check of the angle bound")
    _common(p, gens=False)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-dim", type=int, default=50)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--c", type=float, default=None, help="fixed cosine (default: random per trial)")
    return ap


def config_from_args(args) -> RunConfig:
    weights = _int_list(args.weights) if args.weights else ()
    d = args.d or (len(weights) if weights else 2)
    if not weights:
        weights = (1,) * d
    if len(weights) != d:
        raise InputError(f"--weights has {len(weights)} entries but d = {d}")
    prec = None
    if args.precedence:
        prec = tuple(i - 1 for i in _int_list(args.precedence))
    t = _rational(args.t)
    if t < -d:
        raise InputError(f"t = {t} is below -d = {-d}")
    gens = _read_gens(args, d) if hasattr(args, "gens") else []
    skip = {"subcommand", "d", "weights", "precedence", "t", "seed", "fmt", "output", "gens", "gens_file", "trace"}
    opts = {k: v for k, v in vars(args).items() if k not in skip}
    try:
        cfg = RunConfig(args.subcommand, d, weights, prec, t, gens, opts, args.seed, args.fmt,
                        bool(getattr(args, "trace", False)))
        cfg.order  # validates weights/precedence
    except ValueError as e:
        raise InputError(str(e)) from None
    return cfg


# ---------------------------------------------------------------- reports


def _q(x) -> str:
    return str(Fraction(x))


def _warn_range(t: Fraction, *, operator_theory: bool):
    if operator_theory and t <= -3:
        warnings.warn(f"t = {t} is outside t > -3 assumed by the essential normality results", stacklevel=3)
    if not operator_theory and t < -2:
        warnings.warn(f"t = {t} is outside t >= -2 assumed by the division results", stacklevel=3)


def _need_gens(cfg):
    if not cfg.gens:
        raise InputError("no generators given (use --gens or --gens-file)")
    return cfg.gens


def _cmd_norm(cfg: RunConfig):
    sp = cfg.space
    out = {"d": sp.d, "t": _q(sp.t)}
    polys = [_parse_poly(s, cfg.d) for s in cfg.options["poly"]]
    results = []
    for text, p in zip(cfg.options["poly"], polys):
        row = {"poly": format_poly(p) if not p.is_zero() else "0", "norm_sq": _q(norms.norm_sq(p, sp))}
        if cfg.options["check_equivalence"]:
            if isinstance(p, VectorPolynomial) or p.is_zero():
                raise InputError(f"equivalence check needs a nonzero scalar polynomial: {text!r}")
            lo, hi = norms.equivalence_bounds_check(p, sp)
            row["equivalence"] = {"lower_ok": lo, "upper_ok": hi}
        results.append(row)
    out["results"] = results
    if cfg.options["c_table"] is not None:
        out["c_ratio"] = [{"n": n, "c": _q(norms.c_ratio(n, sp))} for n in range(cfg.options["c_table"] + 1)]
    if cfg.fmt == "text":
        lines = [f"{r['poly']}\t{r['norm_sq']}" for r in results]
        lines += [f"c_{r['n']}\t{r['c']}" for r in out.get("c_ratio", [])]
        return EXIT_OK, out, "\n".join(lines)
    if cfg.fmt == "csv":
        return EXIT_OK, out, _csv(["poly", "norm_sq"], [[r["poly"], r["norm_sq"]] for r in results])
    return EXIT_OK, out, None


def _cmd_divide(cfg: RunConfig):
    gens = _need_gens(cfg)
    if cfg.options["ratio"]:
        _warn_range(cfg.t, operator_theory=False)
    h = _parse_poly(cfg.options["h"], cfg.d)
    if isinstance(h, VectorPolynomial):
        res = division.divide_vector(h, gens, cfg.order, trace=cfg.trace)
    else:
        res = division.divide(h, gens, cfg.order, trace=cfg.trace)
    out = res.to_dict(include_trace=cfg.trace)
    if cfg.options["ratio"]:
        r = division.ratio_from_result(h, gens, res, cfg.space)
        out["ratio_sq"] = _q(r.ratio_sq)
        out["remainder_adjusted"] = _q(r.remainder_adjusted)
    if cfg.fmt == "text":
        lines = [f"a_{i + 1} = {a}" for i, a in enumerate(out["quotients"])]
        lines.append(f"r = {out['remainder']}")
        if cfg.trace:
            lines.append(res.trace_text())
        return EXIT_OK, out, "\n".join(lines)
    if cfg.fmt == "csv":
        rows = [[f"a_{i + 1}", a] for i, a in enumerate(out["quotients"])] + [["r", out["remainder"]]]
        return EXIT_OK, out, _csv(["name", "value"], rows)
    return EXIT_OK, out, None


def _mono_text(m) -> str:
    return format_poly(Polynomial.monomial(m))


def _cmd_groebner(cfg: RunConfig):
    gens = _need_gens(cfg)
    order = cfg.order
    gb = groebner.buchberger(gens, order, reduce=not cfg.options["no_reduce"])
    out = gb.to_dict()
    st = groebner.staircase(gb)
    out["staircase"] = "infinite" if st is None else [_mono_text(m) for m in st]
    out["codimension"] = "infinite" if st is None else len(st)
    eq = cfg.options["equalize"]
    if eq is not None:
        if eq == "auto":
            m = groebner.default_equalization_degree(gb, order)
        else:
            try:
                m = int(eq)
            except ValueError:
                raise InputError(f"--equalize expects an integer or 'auto', got {eq!r}") from None
        out["equalized"] = {"degree": m,
                            "generators": [format_poly(g, order) for g in groebner.equalize_degrees(gb, order, m)]}
    if cfg.fmt == "text":
        return EXIT_OK, out, "\n".join(out["generators"])
    if cfg.fmt == "csv":
        return EXIT_OK, out, _csv(["generator"], [[g] for g in out["generators"]])
    return EXIT_OK, out, None


def _cmd_beurling(cfg: RunConfig):
    gens = _need_gens(cfg)
    if cfg.d != 2:
        raise InputError("beurling needs d = 2")
    bf = groebner.beurling_form(gens, cfg.order)
    out = bf.to_dict()
    if cfg.fmt == "text":
        return EXIT_OK, out, f"gcd = {out['gcd']}\nJ = {', '.join(out['cofactors'])}\ncodimension = {out['codimension']}"
    if cfg.fmt == "csv":
        return EXIT_OK, out, _csv(["cofactor"], [[c] for c in out["cofactors"]])
    return EXIT_OK, out, None


def _cmd_certify(cfg: RunConfig):
    gens = _need_gens(cfg)
    order = cfg.order
    _warn_range(cfg.t, operator_theory=False)
    if cfg.options["complete"]:
        gb = groebner.quasi_homogeneous_basis(gens, order)
        m = groebner.default_equalization_degree(gb, order)
        # products can share leading monomials; divide by the echelon basis of the slice
        gens = stability.slice_basis(groebner.equalize_degrees(gb, order, m), order, m)
    rep = stability.certify(gens, order, cfg.space, cfg.options["q_max"], cfg.options["samples"], cfg.seed)
    out = rep.to_dict()
    code = EXIT_GROWING if cfg.options["expect_stable"] and rep.verdict == "growing" else EXIT_OK
    if cfg.fmt == "csv":
        return code, out, rep.to_csv()
    if cfg.fmt == "text":
        lines = [f"{r.degree}\t{r.dim}\t{r.max_ratio_sq}" for r in rep.records]
        lines += [f"sup = {rep.sup}", f"A <= {rep.linear_constant:.6g}", f"verdict = {rep.verdict}"]
        return code, out, "\n".join(lines)
    return code, out, None


def _cmd_counterexample(cfg: RunConfig):
    if cfg.d != 2:
        raise InputError("the counterexample lives in d = 2")
    _warn_range(cfg.t, operator_theory=False)
    gens = stability.counterexample_generators(cfg.options["basis"])
    rows = stability.certify_vector(gens, cfg.order, cfg.space, cfg.options["n_max"])
    table = [{k: (v if k == "n" else _q(v)) for k, v in r.items()} for r in rows]
    out = {"t": _q(cfg.t), "basis": cfg.options["basis"], "generators": [format_poly(g) for g in gens],
           "rows": table}
    cols = ["n", "ratio_sq", "h_sq", "products_sq", "remainder_sq"]
    if cfg.fmt == "csv":
        return EXIT_OK, out, _csv(cols, [[r[c] for c in cols] for r in table])
    if cfg.fmt == "text":
        return EXIT_OK, out, "\n".join(f"{r['n']}\t{r['ratio_sq']}" for r in table)
    return EXIT_OK, out, None


def _cmd_scan(cfg: RunConfig):
    gens = _need_gens(cfg)
    _warn_range(cfg.t, operator_theory=True)
    D_list = _int_list(cfg.options["D_list"])
    rows = operators.essential_normality_scan(gens, cfg.space, cfg.options["p"], D_list)
    out = {"t": _q(cfg.t), "p": cfg.options["p"], "generators": [format_poly(g) for g in gens],
           "rows": [r.to_dict() for r in rows]}
    if cfg.fmt == "csv":
        return EXIT_OK, out, _csv(["D", "j", "schatten", "increment"],
                                  [[r.D, r.j, r.value, "" if r.increment is None else r.increment] for r in rows])
    if cfg.fmt == "text":
        return EXIT_OK, out, "\n".join(f"{r.D}\t{r.j}\t{r.value:.12g}" for r in rows)
    return EXIT_OK, out, None


def _cmd_fang_xia(cfg: RunConfig):
    f = _parse_poly(cfg.options["poly"], cfg.d)
    _warn_range(cfg.t, operator_theory=True)
    res = operators.fang_xia_probe(f, cfg.space, cfg.options["D"], cfg.options["samples"], cfg.seed,
                                   vanishing_order=cfg.options["vanishing_order"])
    out = {"t": _q(cfg.t), "f": format_poly(f), "D": res["D"], "samples": res["samples"],
           "seed": res["seed"], "max_ratio": res["max_ratio"]}
    if cfg.options["rows"]:
        out["rows"] = res["rows"]
    if cfg.fmt == "csv":
        return EXIT_OK, out, _csv(["sample", "j", "lhs", "rhs", "ratio"],
                                  [[r[k] for k in ("sample", "j", "lhs", "rhs", "ratio")] for r in res["rows"]])
    if cfg.fmt == "text":
        return EXIT_OK, out, f"max ratio = {res['max_ratio']:.12g}"
    return EXIT_OK, out, None


def _cmd_angle(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    top = cfg.options["max_dim"]
    if top < 2:
        raise InputError("--max-dim must be at least 2")
    trials = []
    for _ in range(cfg.options["trials"]):
        n = int(rng.integers(2, top + 1))
        k = int(rng.integers(1, n))
        rep = operators.random_angle_trial(rng, n, k, cfg.options["c"], cfg.options["samples"])
        trials.append({"ambient": n, "m_dim": k, "c": rep.c, "C": rep.C, "violations": rep.violations,
                       "intermediate_violations": rep.intermediate_violations, "worst_ratio": rep.worst_ratio})
    out = {"seed": cfg.seed, "trials": len(trials),
           "violations": sum(t["violations"] for t in trials),
           "intermediate_violations": sum(t["intermediate_violations"] for t in trials),
           "worst_ratio": max((t["worst_ratio"] for t in trials), default=0.0),
           "rows": trials}
    if cfg.fmt == "csv":
        cols = ["ambient", "m_dim", "c", "C", "violations", "intermediate_violations", "worst_ratio"]
        return EXIT_OK, out, _csv(cols, [[t[c] for c in cols] for t in trials])
    if cfg.fmt == "text":
        return EXIT_OK, out, (f"trials = {out['trials']}\nviolations = {out['violations']}\n"
                              f"intermediate violations = {out['intermediate_violations']}")
    return EXIT_OK, out, None


COMMANDS = {
    "norm": _cmd_norm,
    "divide": _cmd_divide,
    "groebner": _cmd_groebner,
    "beurling": _cmd_beurling,
    "certify": _cmd_certify,
    "counterexample": _cmd_counterexample,
    "scan-commutators": _cmd_scan,
    "fang-xia-probe": _cmd_fang_xia,
    "angle-check": _cmd_angle,
}


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(report: dict) -> str:
    """Canonical JSON: sorted keys, fixed separators, NaN written as null."""
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v
    return json.dumps(clean(report), sort_keys=True, indent=2, default=_json_default)


def run(cfg: RunConfig):
    """Execute one subcommand; returns ``(exit_code, report_dict, text)``."""
    code, report, text = COMMANDS[cfg.subcommand](cfg)
    if text is None:
        text = dumps(report)
    return code, report, text


def _resolve_output(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _glue_negative_t(argv: list) -> list:
    # argparse reads "-5/2" as an option flag; bind it to --t explicitly
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--t" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append("--t=" + argv[i + 1])
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_glue_negative_t(argv))
    try:
        cfg = config_from_args(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code, _, text = run(cfg)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except (InputError, PolynomialSyntaxError, groebner.UnreachableDegreeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalDiagnosticError as e:
        print(f"numerical diagnostic: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        path = _resolve_output(args.output)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
