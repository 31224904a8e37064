"""Command-line verification reports.

Every subcommand prints one JSON report (or writes it to ``--out``) and exits
with 0 when all residuals are within tolerance, 1 otherwise, 2 on bad input.
Reports are byte-identical for identical arguments; wall time is included
only with ``--timing``.
"""

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import fourier, heisen, meta, schrod, stonevn
from .hilbertsuper import HilbertSuper, exterior_berezin, signature
from .schrod import RepData, build_schrodinger


class InputError(ValueError):
    pass


def jsonable(obj):
    """Convert numpy, complex and Fraction values for ``json.dumps``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if np.isfinite(f) else str(f)
    return obj


def _matrix(rows):
    return np.array([[complex(*z) if isinstance(z, (list, tuple)) else complex(z) for z in row]
                     for row in rows])


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def rep_to_json(data):
    out = {"hbar": data.hbar, "space": data.space.to_json(),
           "odd_gens": [[[[z.real, z.imag] for z in row] for row in A] for A in data.odd_gens]}
    if data.omega is not None:
        out["omega"] = np.asarray(data.omega).tolist()
    return out


def rep_from_json(obj):
    try:
        space = HilbertSuper.from_json(obj["space"])
        gens = [_matrix(A) for A in obj["odd_gens"]]
        omega = np.array(obj["omega"], dtype=float) if "omega" in obj else None
        data = RepData(space, gens, float(obj["hbar"]), omega)
        space.check()
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed representation: {exc}") from exc
    if omega is None or omega.shape != (len(gens), len(gens)):
        raise InputError("malformed representation: omega must be a square matrix over the generators")
    return data


# subcommands ---------------------------------------------------------------------

def cmd_sig(args):
    if args.file:
        obj = _load(args.file)
        try:
            h = HilbertSuper.from_json(obj)
            h.check()
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed gram: {exc}") from exc
    elif args.n is not None:
        h = exterior_berezin(args.n)
    else:
        raise InputError("sig needs --file or --n")
    sgn = signature(h)
    return {"parity": h.parity, "sgn": list(sgn)}, {}


def cmd_schrodinger(args):
    rep = build_schrodinger(args.m, args.p, args.q, args.hbar, args.sigma)
    data = rep.rep_data()
    res = dict(stonevn.check_axioms(data))
    if args.m == 0:
        res["group_homomorphism"] = schrod.group_homomorphism_check(rep, seed=args.seed)
        res["exp_route"] = schrod.exp_route_check(rep, seed=args.seed)
        if (args.p + args.q) % 2 == 0:
            res["bch_operator"] = schrod.bch_operator_check(rep, seed=args.seed)
    else:
        alg = meta.SpoAlg(args.m, args.p, args.q)
        res["even_ccr"] = max(
            (meta.U_star(rep, i).supercommutator(meta.U_star(rep, j))
             - meta.WeylOp.scalar(args.m, rep.space.grading, 1j * args.hbar * alg.omega[i, j])).norm()
            for i in range(2 * args.m) for j in range(2 * args.m))
    info = {"dim": rep.space.dim, "parity": rep.space.parity, "eps": rep.eps,
            "r": rep.r, "s": rep.s}
    even = len(schrod.intertwiner_space(data, data, 0))
    odd = len(schrod.intertwiner_space(data, data, 1))
    info["intertwiners"] = [even, odd]
    crit = {k: v <= args.tol for k, v in res.items()}
    crit["intertwiners"] = [even, odd] == ([1, 0] if (args.p + args.q) % 2 == 0 else [1, 1])
    if args.m == 0 and (args.p + args.q) % 2 == 0:
        rel, rank, surj = schrod.clifford_structure(rep)
        res["clifford_relations"] = rel
        info["clifford_rank"] = rank
        crit["clifford_relations"] = rel <= args.tol
        crit["clifford_surjective"] = bool(surj)
    return {"info": info, "residuals": res}, crit


def cmd_svn(args):
    expected = {}
    if args.rep:
        data = rep_from_json(_load(args.rep))
        m = args.m
    else:
        if args.p is None or args.q is None:
            raise InputError("svn-decompose needs --rep or --p and --q")
        m = args.m
        rep = build_schrodinger(0, args.p, args.q, args.hbar)
        data, _, HR = stonevn.conjugated_copy(rep, args.hr_dim, seed=args.seed, parity=args.hr_parity)
        expected = {"multiplicity": HR.dim, "hbar": args.hbar}
    dec = stonevn.svn_decompose_m(m, data) if m else stonevn.svn_decompose(data)
    rep_ = dict(dec.report)
    res = {k: rep_[k] for k in ("projector", "intertwining", "superunitary_residual")}
    crit = {k: v <= args.tol for k, v in res.items()}
    if expected:
        crit["multiplicity"] = rep_["multiplicity"] == expected["multiplicity"]
        res["hbar_error"] = abs(stonevn.central_hbar(data) - expected["hbar"])
        crit["hbar"] = res["hbar_error"] <= 1e-12
    if "classical" in rep_:
        cl = rep_.pop("classical")
        for k in ("projector", "rank_one", "isometry"):
            if k in cl:
                res[f"classical_{k}"] = cl[k]
                crit[f"classical_{k}"] = cl[k] <= 1e-9
    return {"decomposition": {"multiplicity": rep_["multiplicity"], "hbar": rep_["hbar"],
                              "HR_signature": rep_.get("HR_signature")},
            "expected": expected, "residuals": res}, crit


def cmd_fourier(args):
    if args.m:
        raise InputError("fourier-verify supports m = 0")
    if (args.p + args.q) % 2:
        raise InputError("fourier-verify needs p + q even")
    a, b = args.window
    rng = np.random.default_rng(args.seed)
    f1 = fourier.random_group_function(args.p, args.q, rng, h0=0.5 * (a + b))
    f2 = fourier.random_group_function(args.p, args.q, rng, h0=0.5 * (a + b))
    times = [float(t) for t in np.round(rng.uniform(-2, 2, size=5), 6)]
    inv = fourier.inversion_check(f1, times, (a, b), args.nodes)
    par = fourier.parseval_check(f1, f2, (a, b), 2 * args.nodes)
    h = 0.5 * (a + b)
    lhs, rhs = fourier.parseval_fixed(f1, f2, h)
    fixed = max(abs(v - rhs) for v in lhs) / max(1.0, abs(rhs))
    T = fourier.group_fourier(f1, h)
    st = fourier.supertrace_independence(fourier.schrodinger_at(args.p, args.q, -h), T, seed=args.seed)
    scale = max(1.0, float(np.abs(np.trace(T)).max()))
    res = {"inversion_residual": inv["inversion_residual"],
           "quadrature_change": inv["quadrature_change"],
           "parseval_residual": par["parseval_residual"],
           "parseval_fixed_residual": fixed,
           "supertrace_spread": st["spread"] / scale}
    crit = {"inversion": res["inversion_residual"] <= args.tol,
            "parseval": res["parseval_residual"] <= args.tol,
            "parseval_fixed": fixed <= 1e-10,
            "supertrace_independence": res["supertrace_spread"] <= 1e-10}
    return {"times": times, "nodes": inv["nodes"], "residuals": res}, crit


def _words(series):
    return {"".join("XY"[i] for i in w): c for w, c in sorted(series.items())}


def cmd_bch(args):
    B0, B1 = heisen.bch_split_series(args.order)
    a, b = heisen.bch1_order3()
    rep = build_schrodinger(0, args.p, args.q, args.hbar)
    op = schrod.bch_operator_check(rep, order=args.order, seed=args.seed)
    report = {"BCH0": _words(heisen.lie_coefficients(B0)),
              "BCH1": _words(heisen.lie_coefficients(B1)),
              "BCH1_cubic": {"[X,[X,Y]]": a, "[[X,Y],Y]": b},
              "residuals": {"operator_identity": op}}
    return report, {"operator_identity": op <= args.tol}


def cmd_clifford(args):
    alg = meta.SpoAlg(args.m, args.p, args.q)
    rep = build_schrodinger(args.m, args.p, args.q, args.hbar, args.sigma)
    tab = meta.clifford_table(alg, rep)
    res = {k: tab[k] for k in ("morphism", "equivariance", "skew", "jacobi")}
    res["display"] = meta.display_residual(alg, rep)
    return {"basis": alg.labels, "mu_s": tab["matrices"], "residuals": res}, \
        {k: v <= args.tol for k, v in res.items()}


def cmd_dual(args):
    h = abs(args.hbar)
    odd = (args.p + args.q) % 2
    sigmas = [args.sigma] if args.sigma is not None else ([0, 1] if odd else [min(args.p, args.q) % 2])
    cands = [(s_h * h, s, j) for s_h in (1, -1) for s in sigmas for j in range(4)]
    rows = stonevn.dual_classify(0, args.p, args.q, cands)
    pred = sum(r["equivalent"] != r["predicted"] for r in rows)
    rule = sum(r["equivalent"] != r["rule"] for r in rows)
    crit = {"predicate": pred == 0}
    if not odd:
        crit["even_distinct"] = all(r["equivalent"] == (r["a"] == r["b"]) for r in rows)
    return {"rows": rows, "predicate_mismatches": pred, "rule_mismatches": rule}, crit


# argument parsing ------------------------------------------------------------------

def _window(text):
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("window must be 'a,b'") from None
    return a, b


def build_parser():
    ap = argparse.ArgumentParser(prog="heisensuper", description="Verification reports for Heisenberg supergroup representations.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, tol, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--tol", type=float, default=tol)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")
        sp.add_argument("--timing", action="store_true", help="include wall time in the report")
        sp.set_defaults(func=fn)
        return sp

    def params(sp, m=0, p=None, q=None, hbar=1.0, sigma=True):
        sp.add_argument("--m", type=int, default=m)
        sp.add_argument("--p", type=int, default=p)
        sp.add_argument("--q", type=int, default=q)
        sp.add_argument("--hbar", type=float, default=hbar)
        if sigma:
            sp.add_argument("--sigma", type=int, choices=(0, 1))

    sp = add("sig", cmd_sig, 0.0, "signature of a gram matrix")
    sp.add_argument("--file")
    sp.add_argument("--n", type=int, help="use the Berezin gram of wedge C^n")

    sp = add("schrodinger-check", cmd_schrodinger, 1e-12, "Schrodinger representation residuals")
    params(sp, p=0, q=0)

    sp = add("svn-decompose", cmd_svn, 1e-10, "Stone-von Neumann decomposition")
    params(sp, sigma=False)
    sp.add_argument("--rep")
    sp.add_argument("--hr-dim", type=int, default=2)
    sp.add_argument("--hr-parity", type=int, choices=(0, 1), default=0)

    sp = add("fourier-verify", cmd_fourier, 1e-6, "group Fourier inversion and Parseval")
    params(sp, p=2, q=0, sigma=False)
    sp.add_argument("--window", type=_window, default=(0.5, 1.5))
    sp.add_argument("--nodes", type=int, default=24)

    sp = add("bch", cmd_bch, 1e-12, "graded BCH coefficients and operator identity")
    sp.add_argument("--order", type=int, default=3)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--q", type=int, default=0)
    sp.add_argument("--hbar", type=float, default=1.0)

    sp = add("clifford-table", cmd_clifford, 1e-11, "metaplectic spin matrices and residuals")
    params(sp, p=2, q=0)

    sp = add("dual-table", cmd_dual, 0.0, "superunitary dual equivalence table")
    params(sp, p=1, q=0)
    return ap


def run(argv=None):
    """Parse ``argv``, run the subcommand, emit the report; returns the exit code."""
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        body, crit = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "timing")}
    report = {"command": args.command, "parameters": params, **body,
              "criteria": crit, "passed": all(crit.values())}
    if args.timing:
        report["wall_time"] = time.perf_counter() - t0
    text = json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["passed"] else 1


def main():
    sys.exit(run())
