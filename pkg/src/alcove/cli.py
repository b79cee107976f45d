"""Command-line front end.

Subcommands ``survival``, ``expected``, ``eigen``, ``debruijn`` and
``validate`` print one JSON object (or a CSV table) on standard output.
Exit codes: 0 success, 1 validation failure, 2 invalid input, 3 method
unavailable.
"""
import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import debruijn, eigen, expected, exitprob, montecarlo
from .errors import DomainError, UnsupportedFormulaError
from .kernels1d import SeriesControl
from .rootsys import FAMILIES, RootDatum

SCHEMA = 1
SEED_ENV = "ALCOVE_SEED"
COMMANDS = ("survival", "expected", "eigen", "debruijn", "validate")
METHODS = ("formula", "image-sum", "mc")

# query keys echoed back in the output, with their defaults
DEFAULTS = {
    "type": None, "k": None, "x": None, "t": None, "t_grid": None,
    "method": "formula", "tol": 1e-12, "max_terms": 10000,
    "paths": 100_000, "dt": 1e-4, "seed": 0, "workers": 1, "bridge": False,
    "weight": None, "hot_spots": False, "samples": 10_000,
    "battery": None, "suite": "quick", "output": "json",
}


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _grid(text):
    """``start,stop,count[,log|linear]`` as a dict."""
    if isinstance(text, dict):
        return dict(text)
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) not in (3, 4):
        raise DomainError("t-grid must be start,stop,count[,log|linear]")
    scale = parts[3] if len(parts) == 4 else "linear"
    if scale not in ("log", "linear"):
        raise DomainError("t-grid scale must be log or linear")
    return {"start": float(parts[0]), "stop": float(parts[1]), "count": int(parts[2]),
            "scale": scale}


def _grid_values(g):
    if g["count"] < 1:
        raise DomainError("t-grid count must be positive")
    if g["scale"] == "log":
        if not (g["start"] > 0 and g["stop"] > 0):
            raise DomainError("log t-grid needs positive endpoints")
        return np.geomspace(g["start"], g["stop"], g["count"]).tolist()
    return np.linspace(g["start"], g["stop"], g["count"]).tolist()


def build_parser():
    p = argparse.ArgumentParser(prog="alcove", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with query fields; flags win")
    common.add_argument("--output", choices=("json", "csv"))
    common.add_argument("--type", dest="type")
    common.add_argument("--k", type=int)
    common.add_argument("--x", help="comma-separated coordinates")
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--method", choices=METHODS)
    mc.add_argument("--max-terms", dest="max_terms", type=int)
    mc.add_argument("--paths", type=int)
    mc.add_argument("--dt", type=float)
    mc.add_argument("--workers", type=int)
    mc.add_argument("--bridge", action="store_true", default=None,
                    help="Brownian-bridge facet correction for Monte Carlo")

    s = sub.add_parser("survival", parents=[common, mc], help="survival probability")
    s.add_argument("--t", type=float)
    s.add_argument("--t-grid", dest="t_grid", help="start,stop,count[,log|linear]")
    sub.add_parser("expected", parents=[common, mc], help="expected exit time (type A)")
    e = sub.add_parser("eigen", parents=[common], help="alcove eigenfunctions")
    e.add_argument("--weight", help="coefficients in the fundamental weight basis")
    e.add_argument("--hot-spots", dest="hot_spots", action="store_true", default=None)
    e.add_argument("--samples", type=int)
    d = sub.add_parser("debruijn", parents=[common], help="De Bruijn cross-check")
    d.add_argument("--battery", help="JSON battery file")
    v = sub.add_parser("validate", parents=[common], help="run a validation suite")
    v.add_argument("--suite", choices=sorted(SUITES))
    return p


def resolve(argv):
    """Merge defaults, environment, config file and flags into a query dict."""
    args = build_parser().parse_args(argv)
    q = dict(DEFAULTS)
    if os.environ.get(SEED_ENV):
        q["seed"] = int(os.environ[SEED_ENV])
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        cfg = cfg.get("query", cfg)
        unknown = set(cfg) - set(DEFAULTS) - {"command"}
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        q.update({k: v for k, v in cfg.items() if k != "command"})
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            q[key] = val
    q["command"] = args.command
    return normalize(q)


def normalize(q):
    """Canonical, JSON-stable form of a query."""
    q = dict(q)
    if q.get("x") is not None:
        q["x"] = _floats(q["x"])
    if q.get("weight") is not None:
        q["weight"] = _floats(q["weight"])
    if q.get("t_grid") is not None:
        q["t_grid"] = _grid(q["t_grid"])
    if q.get("t") is not None:
        q["t"] = float(q["t"])
    for key in ("tol", "dt"):
        q[key] = float(q[key])
    for key in ("max_terms", "paths", "seed", "workers", "samples"):
        q[key] = int(q[key])
    q["bridge"] = bool(q["bridge"])
    q["hot_spots"] = bool(q["hot_spots"])
    if q.get("type") is not None:
        q["type"] = str(q["type"]).upper()
    return {k: q[k] for k in ("command",) + tuple(DEFAULTS)}


def _datum(q):
    fam = q["type"]
    if fam is None:
        raise DomainError("--type is required")
    if fam == "F4":
        raise UnsupportedFormulaError(exitprob.F4_MESSAGE)
    if fam not in FAMILIES:
        raise DomainError(f"unknown type {fam!r}")
    k = q["k"]
    if fam == "G2":
        k = 2 if k is None else k
    if k is None:
        k = len(q["x"]) if q["x"] is not None else None
    if k is None:
        raise DomainError("--k is required")
    try:
        datum = RootDatum(fam, int(k))
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    if q["x"] is not None and len(q["x"]) != datum.ambient_dim:
        raise DomainError(f"x must have {datum.ambient_dim} coordinates for type {datum.label}")
    return datum


def _need_x(q):
    if q["x"] is None:
        raise DomainError("--x is required")
    return np.array(q["x"])


def _sim(q, horizon):
    return montecarlo.SimConfig(paths=q["paths"], dt=q["dt"], horizon=horizon, seed=q["seed"],
                                workers=q["workers"], bridge=q["bridge"])


def _survival_one(q, datum, x, t):
    method = q["method"]
    if t < 0:
        raise DomainError("t must be nonnegative")
    if method == "mc":
        if t == 0:
            return 1.0, 0.0, "monte-carlo", q["paths"]
        est = montecarlo.mc_survival(datum, x, t, _sim(q, max(t, 2 * q["dt"])))
        return est.mean, est.stderr, "monte-carlo", est.paths
    if method == "image-sum":
        if datum.rank != 2:
            raise UnsupportedFormulaError("image sums are available for rank 2 alcoves only")
        r = exitprob.survival_images(datum, x, t, tol=max(q["tol"], 1e-10))
        return r.value, r.tail_bound, r.method, r.terms
    ctl = SeriesControl(tol=q["tol"], max_terms=q["max_terms"])
    r = exitprob.survival(exitprob.SurvivalQuery(datum, tuple(x), t, ctl))
    return r.value, r.tail_bound, r.method, r.terms


def cmd_survival(q):
    datum = _datum(q)
    x = _need_x(q)
    if q["t_grid"] is not None:
        rows = []
        for t in _grid_values(q["t_grid"]):
            v, e, m, n = _survival_one(q, datum, x, t)
            rows.append({"t": t, "value": v, "error_bound": e, "method": m, "terms": n})
        return {"values": rows, "method": rows[0]["method"]}
    if q["t"] is None:
        raise DomainError("--t or --t-grid is required")
    v, e, m, n = _survival_one(q, datum, x, q["t"])
    key = "paths" if m == "monte-carlo" else "terms"
    return {"value": v, "error_bound": e, "method": m, key: n}


def cmd_expected(q):
    datum = _datum(q)
    x = _need_x(q)
    if q["method"] == "mc":
        est = montecarlo.mc_expected_exit(datum, x, _sim(q, 1.0))
        return {"value": est.mean, "error_bound": est.stderr, "method": "monte-carlo",
                "paths": est.paths, "censored_fraction": 1.0 - est.exited_fraction}
    if datum.family != "A":
        raise UnsupportedFormulaError("expected exit series is implemented for type A only")
    if q["method"] != "formula":
        raise UnsupportedFormulaError(f"method {q['method']} unavailable for expected exit")
    r = expected.expected_exit_A(x, datum.k, SeriesControl(tol=max(q["tol"], 1e-12)))
    return {"value": r.value, "error_bound": r.tail_bound, "method": "lattice-series",
            "terms": r.terms_used}


def cmd_eigen(q):
    datum = _datum(q)
    if q["weight"] is None:
        raise DomainError("--weight is required")
    if len(q["weight"]) != datum.rank:
        raise DomainError(f"weight needs {datum.rank} coefficients")
    w = eigen.Weight.from_coefficients(datum, q["weight"])
    wit = eigen.is_real(w)
    out = {"method": "orbit-sum", "eigenvalue": eigen.eigenvalue(w), "p": w.p.tolist(),
           "dominant": w.dominant, "strictly_dominant": w.strictly_dominant,
           "real": bool(wit), "witness_sign": wit.sign, "terms": len(w.orbit()[1])}
    if q["x"] is not None:
        x = datum.project(_need_x(q))
        g = eigen.g_p(w, x) if w.dominant else None
        f = eigen.f_p(w, x) if w.strictly_dominant else None
        out["value"] = {"f": None if f is None else [float(f.re), float(f.im)],
                        "g": None if g is None else [float(g.re), float(g.im)],
                        "H": float(eigen.H(x, datum))}
    if q["hot_spots"]:
        rep = eigen.hot_spots_check(w, q["samples"], q["seed"])
        out["hot_spots"] = {"passed": rep.passed, "interior_max": rep.interior_max,
                            "boundary_sup": rep.boundary_sup, "margin": rep.margin}
    return out


def cmd_debruijn(q):
    ctl = debruijn.DeBruijnControl(tol=max(q["tol"], 1e-9))
    rows = []
    for name, fs in debruijn.load_battery(q["battery"]):
        rep = debruijn.check_case(name, fs, ctl=ctl)
        rows.append({"name": name, "k": rep.k, "lhs": rep.lhs, "rhs": rep.rhs,
                     "difference": rep.difference, "passed": rep.passed})
    return {"values": rows, "method": "quadrature", "passed": all(r["passed"] for r in rows)}


# ------------------------------------------------------------- validation

def _check_kernels():
    from .kernels1d import phi, psi
    worst = 0.0
    for x in np.linspace(0.05, 0.95, 9):
        for t in (0.01, 0.05, 0.1, 0.3, 1.0, 3.0):
            for fn in (phi, psi):
                a = fn(x, t, method="theta").value
                b = fn(x, t, method="image").value
                worst = max(worst, abs(a - b))
    return worst < 1e-10, f"max theta/image gap {worst:.3g}"


def _check_combinat():
    from . import combinat
    ok = all(combinat.sign_sum(k) == 1 for k in range(2, 11))
    rng = np.random.default_rng(0)
    worst = 0.0
    for n in (2, 4, 6):
        a = rng.standard_normal((n, n))
        a = a - a.T
        worst = max(worst, abs(combinat.pfaffian(a) ** 2 - np.linalg.det(a)))
    return ok and worst < 1e-9, f"sign sums ok={ok}, max |Pf^2 - det| {worst:.3g}"


def _check_expected():
    v2 = expected.expected_exit_A([0.25, -0.25]).value
    v3 = expected.expected_exit_A([0.6, 0.3, 0.1]).value
    ok = abs(v2 - 0.125) < 1e-8 and abs(v3 - 0.03) < 1e-8
    return ok, f"k=2 {v2!r}, k=3 {v3!r}"


def _check_eigen():
    worst = 0.0
    for fam, k in (("A", 3), ("B", 2), ("C", 2), ("G2", 2)):
        datum = RootDatum(fam, k)
        w = eigen.Weight(datum, datum.rho)
        pts = datum.sample_facets(25, np.random.default_rng(1))
        worst = max(worst, float(np.max(np.abs(eigen.f_p(w, pts).complex))))
    return worst < 1e-10, f"max |f_rho| on walls {worst:.3g}"


def _check_debruijn():
    worst = 0.0
    for name, fs in debruijn.load_battery():
        if len(fs) <= 3:
            worst = max(worst, debruijn.check_case(name, fs).difference)
    return worst <= 1e-4, f"max |lhs - rhs| {worst:.3g}"


SUITES = {
    "kernels": [("kernel theta vs image", _check_kernels)],
    "combinat": [("pfaffian and sign sums", _check_combinat)],
    "expected": [("expected exit values", _check_expected)],
    "eigen": [("eigenfunctions vanish on walls", _check_eigen)],
    "debruijn": [("De Bruijn cross-side", _check_debruijn)],
}
SUITES["quick"] = [c for name in ("kernels", "combinat", "expected", "eigen") for c in SUITES[name]]
SUITES["all"] = SUITES["quick"] + SUITES["debruijn"]


def cmd_validate(q):
    rows = []
    for name, fn in SUITES[q["suite"]]:
        ok, detail = fn()
        rows.append({"name": name, "passed": bool(ok), "detail": detail})
    return {"values": rows, "method": "validate", "passed": all(r["passed"] for r in rows)}


HANDLERS = {"survival": cmd_survival, "expected": cmd_expected, "eigen": cmd_eigen,
            "debruijn": cmd_debruijn, "validate": cmd_validate}


def _finite(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def _to_csv(q, res):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value", "error_bound", "method"])
    rows = res.get("values")
    if isinstance(rows, list) and rows and "t" in rows[0]:
        for r in rows:
            w.writerow([repr(r["t"]), repr(r["value"]), repr(r["error_bound"]), r["method"]])
    elif "value" in res and isinstance(res["value"], float):
        t = q.get("t")
        w.writerow(["" if t is None else repr(t), repr(res["value"]),
                    repr(res["error_bound"]), res["method"]])
    else:
        raise DomainError("csv output is available for scalar and sweep results only")
    return buf.getvalue()


def run(q, stdout=None, stderr=None):
    """Execute a normalized query; returns the exit code.

    Writes the result to ``stdout`` and error messages to ``stderr``.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    t0 = time.perf_counter()
    try:
        res = HANDLERS[q["command"]](q)
        if q["output"] == "csv":
            stdout.write(_to_csv(q, res))
        else:
            out = {"schema": SCHEMA, "query": q}
            out.update(res)
            out["wall_time_ms"] = 1e3 * (time.perf_counter() - t0)
            stdout.write(json.dumps(_finite(out)) + "\n")
    except UnsupportedFormulaError as exc:
        stderr.write(f"error: {exc}\n")
        return 3
    except (DomainError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    if res.get("passed") is False:
        return 1
    return 0


def main(argv=None):
    try:
        q = resolve(argv)
    except UnsupportedFormulaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (DomainError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return run(q)


if __name__ == "__main__":
    sys.exit(main())
