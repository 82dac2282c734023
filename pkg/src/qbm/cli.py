"""Command-line front end: sweeps, figure data and oracle runs.

Every subcommand writes a ``# units:`` comment line, then either a CSV table
(header row, floats as %.17g) or a JSON document. Parameters come from an
optional ``--spec-file`` of key=value lines; flags on the command line win.

Exit codes: 0 success, 2 bad parameters, 3 numerical failure, 4 a physical
constraint or oracle comparison failed.
"""
import argparse
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import discrete_bath as db
from . import gaussian_state as gs
from .bath import BathParams
from .fluctuations import momentum_variance, position_variance
from .landauer import landauer_ratio
from .numerics import default_spec
from .thermo import entropy_comparison, free_energy
from .tuning import gamma_for_energy, gamma_for_occupation

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC, EXIT_CONSTRAINT = 0, 2, 3, 4

# log-uniform sampling box for state-bounds
BOUNDS_BOX = {"gamma": (0.01, 3.0), "cutoff": (2.0, 200.0), "T": (1e-3, 10.0)}

DEFAULTS = {
    "gamma": "1.0",
    "cutoff": "10.0",
    "omega0": 1.0,
    "temp": None,
    "temp_range": None,
    "n_max": None,
    "samples": 1000,
    "seed": 42,
    "rel_tol": None,
    "format": "csv",
    "out": None,
    "workers": 1,
    "tune_energy": None,
    "tune_occupation": None,
    "state": "qbm",
    "n_bar": 1.0,
    "diagonal_only": False,
    "delta": 1e-3,
    "N": 4000,
    "span": db.DEFAULT_SPAN,
    "offset": 0.5,
}

CASTS = {
    "omega0": float, "n_max": int, "samples": int, "seed": int, "rel_tol": float,
    "workers": int, "tune_energy": float, "tune_occupation": float, "n_bar": float,
    "delta": float, "N": int, "span": float, "offset": float,
}


class ParameterError(ValueError):
    pass


# --- parameter parsing ----------------------------------------------------

def parse_range(text):
    """``a:b:n`` (linear), ``a:b:n:log`` or a comma list; returns floats."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
            raise ParameterError(f"bad range {text!r}; use start:stop:count[:log]")
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ParameterError(f"range count must be >= 1 in {text!r}")
        if len(parts) == 4:
            if a <= 0 or b <= 0:
                raise ParameterError(f"log range needs positive bounds in {text!r}")
            vals = np.geomspace(a, b, n)
        else:
            vals = np.linspace(a, b, n)
        return [float(v) for v in vals]
    vals = [float(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise ParameterError("empty parameter list")
    return vals


def read_spec_file(path):
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "command":
                continue
            if key not in DEFAULTS:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = val
    return out


def resolve(args):
    """Merge defaults < spec file < flags and cast values."""
    merged = dict(DEFAULTS)
    if args.spec_file:
        merged.update(read_spec_file(args.spec_file))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            merged[key] = val
    for key, cast in CASTS.items():
        if merged[key] is not None:
            try:
                merged[key] = cast(merged[key])
            except (TypeError, ValueError):
                raise ParameterError(f"{key}={merged[key]!r} is not a valid {cast.__name__}")
    if isinstance(merged["diagonal_only"], str):
        merged["diagonal_only"] = merged["diagonal_only"].lower() in ("1", "true", "yes")
    if merged["temp"] is not None and merged["temp_range"] is not None:
        raise ParameterError("give either --temp or --temp-range, not both")
    if merged["format"] not in ("csv", "json"):
        raise ParameterError("format must be csv or json")
    if merged["workers"] < 1:
        raise ParameterError("workers must be >= 1")
    merged["spec"] = default_spec()
    if merged["rel_tol"] is not None:
        merged["spec"] = merged["spec"].replace(rel_tol=merged["rel_tol"])
    return merged


def temperatures(cfg, default="1.0"):
    text = cfg["temp_range"] if cfg["temp_range"] is not None else cfg["temp"]
    temps = parse_range(default if text is None else text)
    if any(t < 0 for t in temps):
        raise ParameterError("temperatures must be non-negative")
    return temps


def single(values, name):
    if len(values) != 1:
        raise ParameterError(f"{name} takes a single value for this command")
    return values[0]


# --- output ----------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _json_value(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return None
    return float(v)


def render(cfg, command, columns, rows, summary=None):
    units = {"hbar": 1, "k": 1, "m": 1, "omega0": cfg["omega0"]}
    if cfg["format"] == "json":
        doc = {"command": command, "units": units, "columns": columns,
               "rows": [[_json_value(v) for v in r] for r in rows]}
        if summary:
            doc["summary"] = {k: _json_value(v) for k, v in summary.items()}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# units: hbar=k=m=1, omega0={_fmt(cfg['omega0'])}; command={command}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    if summary:
        buf.write("# summary: " + ", ".join(f"{k}={_fmt(v)}" for k, v in summary.items()) + "\n")
    return buf.getvalue()


def emit(cfg, text):
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_pool(fn, tasks, workers):
    """Map in grid order; results come back ordered regardless of completion."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _guard(fn, task, label):
    try:
        return fn(*task), None
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        return None, f"{label}: {type(exc).__name__}: {exc}"


# --- entropy-sweep ----------------------------------------------------------

def _entropy_row(g, c, w0, T, spec):
    p = BathParams(omega0=w0, gamma=g, cutoff=c)
    cmp_ = entropy_comparison(T, p, spec)
    s0 = float(gs.bose_entropy(w0 / T)) if T > 0 else 0.0
    return [g, c, T, cmp_.S_thermo, cmp_.S_vN, s0, cmp_.mutual_information]


def _entropy_task(task):
    g, c, w0, T, spec = task
    return _guard(_entropy_row, task, f"grid point gamma={g}, cutoff={c}, T={T}")


def cmd_entropy_sweep(cfg):
    cutoffs = parse_range(cfg["cutoff"])
    temps = temperatures(cfg)
    pairs = []
    for c in cutoffs:
        if cfg["tune_energy"] is not None:
            p = BathParams(omega0=cfg["omega0"], gamma=0.0, cutoff=c)
            pairs.append((gamma_for_energy(cfg["tune_energy"], p, spec=cfg["spec"]), c))
        else:
            pairs.extend((g, c) for g in parse_range(cfg["gamma"]))
    for g, c in pairs:
        BathParams(omega0=cfg["omega0"], gamma=g, cutoff=c)
    tasks = [(g, c, cfg["omega0"], T, cfg["spec"]) for g, c in pairs for T in temps]
    cols = ["gamma", "cutoff", "T", "S_thermo", "S_vN", "s_omega0", "I_sb"]
    results = run_pool(_entropy_task, tasks, cfg["workers"])
    rows, errors = [], []
    for (g, c, _, T, _), (row, err) in zip(tasks, results):
        if err:
            errors.append(err)
            row = [g, c, T] + [math.nan] * 4
        rows.append(row)
    return cols, rows, None, errors


# --- density-matrix ---------------------------------------------------------

def _state_for(cfg):
    p = BathParams(omega0=cfg["omega0"], gamma=0.0, cutoff=single(parse_range(cfg["cutoff"]), "cutoff"))
    kind = cfg["state"]
    if kind == "thermal":
        return gs.thermal_state(cfg["n_bar"], p), p
    if kind == "squeezed":
        return gs.squeezed_vacuum(cfg["n_bar"], p), p
    if kind != "qbm":
        raise ParameterError(f"unknown state {kind!r}; use qbm, thermal or squeezed")
    T = single(temperatures(cfg, default="0"), "temperature")
    if cfg["tune_occupation"] is not None:
        g = gamma_for_occupation(cfg["tune_occupation"], p, T, spec=cfg["spec"])
    else:
        g = single(parse_range(cfg["gamma"]), "gamma")
    p = p.replace(gamma=g)
    return gs.from_bath(T, p, cfg["spec"]), p


def cmd_density_matrix(cfg):
    s, p = _state_for(cfg)
    n_mean, n_var = s.mean_occupation, s.occupation_variance
    summary_base = {"gamma": p.gamma, "cutoff": p.cutoff, "mu": s.mu}
    if cfg["diagonal_only"]:
        n_max = cfg["n_max"] if cfg["n_max"] is not None else gs.auto_n_max(s)
        diag = gs.number_basis_diagonals(s, n_max)
        p_n = gs.eigenvalues(s, n_max).p_n
        th = gs.number_basis_diagonals(gs.thermal_state(n_mean, p), n_max)
        sq = gs.number_basis_diagonals(gs.squeezed_vacuum(n_mean, p), n_max)
        cols = ["n", "rho_nn", "p_n", "thermal_rho_nn", "squeezed_rho_nn"]
        rows = [[n, diag[n], p_n[n], th[n], sq[n]] for n in range(n_max + 1)]
        summary = dict(summary_base, trace=float(diag.sum()), n_mean=n_mean, n_var=n_var)
        return cols, rows, summary, []
    block = gs.number_basis_block(s, cfg["n_max"])
    closed = gs.number_basis_diagonals(s, block.n_max)
    rows = [[i, j, v, closed[i] if i == j else None] for i, j, v in block.rows()]
    d = np.diag(block.rho)
    n = np.arange(block.n_max + 1)
    mean = float(n @ d)
    summary = dict(summary_base, n_max=block.n_max, trace=float(d.sum()),
                   purity_sum=block.purity_sum(), n_mean=mean,
                   n_var=float((n * n) @ d - mean * mean))
    return ["n", "m", "rho_nm", "rho_nn_closed_form"], rows, summary, []


# --- state-bounds -----------------------------------------------------------

def sample_parameters(n, seed):
    """Log-uniform (gamma, cutoff, T) triples inside BOUNDS_BOX."""
    rng = np.random.default_rng(seed)
    out = []
    for key in ("gamma", "cutoff", "T"):
        lo, hi = BOUNDS_BOX[key]
        out.append(np.exp(rng.uniform(math.log(lo), math.log(hi), n)))
    return np.column_stack(out)


def _bounds_row(g, c, T, w0, spec):
    p = BathParams(omega0=w0, gamma=g, cutoff=c)
    s = gs.from_bath(T, p, spec)
    n_mean, n_var = gs.occupation_statistics(s)
    return [g, c, T, s.x, s.y, s.mu, n_mean, n_var, s.q2 * s.p2]


def _bounds_task(task):
    g, c, T = task[:3]
    return _guard(_bounds_row, task, f"sample gamma={g}, cutoff={c}, T={T}")


def bounds_violations(row, tol=1e-6):
    g, c, T, x, y, mu, n, var, qp = row
    bad = []
    if mu > 1.0 + 1e-12:
        bad.append(f"mu={mu:.12g} > 1")
    if qp < 0.25 * (1.0 - 1e-12):
        bad.append(f"<q^2><p^2>={qp:.12g} < 1/4")
    if var < n * (n + 1.0) - tol:
        bad.append(f"var n={var:.12g} < n(n+1)={n * (n + 1):.12g}")
    if var > 2.0 * n * (n + 1.0) + tol:
        bad.append(f"var n={var:.12g} > 2n(n+1)={2 * n * (n + 1):.12g}")
    return bad


def cmd_state_bounds(cfg):
    if cfg["samples"] < 1:
        raise ParameterError("samples must be >= 1")
    pts = sample_parameters(cfg["samples"], cfg["seed"])
    tasks = [(float(g), float(c), float(T), cfg["omega0"], cfg["spec"]) for g, c, T in pts]
    results = run_pool(_bounds_task, tasks, cfg["workers"])
    cols = ["gamma", "cutoff", "T", "dq2_norm", "dp2_norm", "mu", "n_mean", "n_var"]
    rows, errors, violations = [], [], []
    for task, (row, err) in zip(tasks, results):
        if err:
            errors.append(err)
            rows.append(list(task[:3]) + [math.nan] * 5)
            continue
        bad = bounds_violations(row)
        if bad:
            violations.append(f"gamma={row[0]!r}, cutoff={row[1]!r}, T={row[2]!r}: " + "; ".join(bad))
        rows.append(row[:8])
    summary = {"samples": len(rows), "violations": len(violations), "seed": cfg["seed"]}
    return cols, rows, summary, errors, violations


# --- landauer ---------------------------------------------------------------

def _landauer_row(g, c, w0, T, delta, spec):
    pt = landauer_ratio(T, BathParams(omega0=w0, gamma=g, cutoff=c), delta, spec)
    return [g, c, T, pt.ratio, pt.bound, pt.ratio_over_bound, pt.below_bound]


def _landauer_task(task):
    g, c, _, T = task[:4]
    return _guard(_landauer_row, task, f"grid point gamma={g}, cutoff={c}, T={T}")


def cmd_landauer(cfg):
    gammas = parse_range(cfg["gamma"])
    cutoffs = parse_range(cfg["cutoff"])
    temps = temperatures(cfg)
    if any(t <= 0 for t in temps):
        raise ParameterError("landauer needs T > 0")
    if sorted(temps) != temps:
        raise ParameterError("temperature grid must be ascending")
    for g in gammas:
        for c in cutoffs:
            BathParams(omega0=cfg["omega0"], gamma=g, cutoff=c)
    tasks = [(g, c, cfg["omega0"], T, cfg["delta"], cfg["spec"])
             for g in gammas for c in cutoffs for T in temps]
    results = run_pool(_landauer_task, tasks, cfg["workers"])
    rows, errors = [], []
    for task, (row, err) in zip(tasks, results):
        if err:
            errors.append(err)
            g, c, _, T = task[:4]
            row = [g, c, T, math.nan, T * math.log(2.0), math.nan, False]
        rows.append(row)
    cols = ["gamma", "cutoff", "T", "ratio", "kTln2", "ratio_over_bound", "below_bound"]
    return cols, rows, None, errors


# --- oracle -----------------------------------------------------------------

def _compare(name, got, ref, tol):
    rel = abs(got - ref) / max(abs(ref), 1e-300)
    return [name, got, ref, rel, tol, "PASS" if rel <= tol else "FAIL"]


def two_oscillator_rows(bath):
    """Closed-form check of the N = 1 model: 2x2 eigenproblem by hand."""
    p = bath.params
    alpha = p.omega0 ** 2 + 2.0 * bath.counter_term / p.m
    w2 = bath.omegas[0] ** 2
    b = bath.couplings[0] / math.sqrt(p.m * bath.masses[0])
    mean, half = 0.5 * (alpha + w2), math.hypot(0.5 * (alpha - w2), b)
    big = mean + half
    # product of the roots, avoiding cancellation in mean - half
    lam = np.array([(alpha * w2 - b * b) / big, big])
    # system component of each eigenvector (v0, v1) with (alpha - lam) v0 = b v1
    weight = b * b / (b * b + (alpha - lam) ** 2)
    modes = db.normal_modes(bath)
    rows = []
    for k in range(2):
        rows.append(_compare(f"omega_{k}", modes.frequencies[k], math.sqrt(lam[k]), 1e-12))
        rows.append(_compare(f"weight_{k}", modes.system_weight[k], weight[k], 1e-10))
    return rows


def cmd_oracle(cfg):
    g = single(parse_range(cfg["gamma"]), "gamma")
    c = single(parse_range(cfg["cutoff"]), "cutoff")
    T = single(temperatures(cfg), "temperature")
    p = BathParams(omega0=cfg["omega0"], gamma=g, cutoff=c)
    bath = db.build(cfg["N"], p, span=cfg["span"], offset=cfg["offset"])
    rows = []
    if cfg["N"] == 1:
        rows += two_oscillator_rows(bath)
    else:
        modes = db.normal_modes(bath)
        if cfg["N"] <= 2000:
            dense = db.normal_modes(bath, method="dense")
            err = float(np.max(np.abs(dense.frequencies - modes.frequencies) / dense.frequencies))
            rows.append(["secular_vs_dense", err, 0.0, err, 1e-9, "PASS" if err <= 1e-9 else "FAIL"])
        rows.append(_compare("weight_sum", float(modes.system_weight.sum()), 1.0, 1e-10))
        q2, p2 = db.exact_moments(bath, T, modes)
        rows.append(_compare("q2", q2, position_variance(T, p, cfg["spec"]), 5e-3))
        rows.append(_compare("p2", p2, momentum_variance(T, p, cfg["spec"]), 5e-3))
        if T > 0:
            fe = db.exact_total_free_energy(bath, T, modes)
            rows.append(_compare("F_tot-F_b", fe.shift, free_energy(T, p, spec=cfg["spec"]), 1e-2))
    failed = [r[0] for r in rows if r[-1] == "FAIL"]
    cols = ["quantity", "discrete", "reference", "rel_diff", "tol", "status"]
    summary = {"N": cfg["N"], "gamma": g, "cutoff": c, "T": T, "failed": len(failed)}
    return cols, rows, summary, [], [f"oracle comparison failed: {n}" for n in failed]


# --- entry point ------------------------------------------------------------

COMMANDS = {
    "entropy-sweep": cmd_entropy_sweep,
    "density-matrix": cmd_density_matrix,
    "state-bounds": cmd_state_bounds,
    "landauer": cmd_landauer,
    "oracle": cmd_oracle,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec-file", help="key=value parameter file; flags override it")
    common.add_argument("--gamma", help="coupling: value, list a,b,c or range start:stop:count[:log]")
    common.add_argument("--cutoff", help="Drude cutoff Gamma, same syntax as --gamma")
    common.add_argument("--omega0", type=float)
    common.add_argument("--temp", help="temperature value or list")
    common.add_argument("--temp-range", help="temperature range start:stop:count[:log]")
    common.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--workers", type=int, help="process pool size for grid sweeps")

    ap = argparse.ArgumentParser(prog="qbm", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("entropy-sweep", parents=[common], help="thermodynamic vs von Neumann entropy")
    sp.add_argument("--tune-energy", type=float, help="root-find gamma so <H_s> at T=0 equals this")

    sp = sub.add_parser("density-matrix", parents=[common], help="number-basis density matrix")
    sp.add_argument("--state", choices=("qbm", "thermal", "squeezed"))
    sp.add_argument("--n-bar", type=float, help="mean occupation for thermal/squeezed states")
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--tune-occupation", type=float, help="root-find gamma for this <n>")
    sp.add_argument("--diagonal-only", action="store_true",
                    help="populations with eigenvalues and same-<n> thermal/squeezed references")

    sp = sub.add_parser("state-bounds", parents=[common], help="random-parameter bound scan")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int)

    sp = sub.add_parser("landauer", parents=[common], help="heat per bit vs kT ln 2")
    sp.add_argument("--delta", type=float, help="relative omega0 step")

    sp = sub.add_parser("oracle", parents=[common], help="finite bath vs continuum formulas")
    sp.add_argument("--N", type=int, help="number of bath oscillators")
    sp.add_argument("--span", type=float, help="bath grid extent in units of the cutoff")
    sp.add_argument("--offset", type=float, help="grid offset, 0.5 midpoint, 0 right endpoint")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
    except (ValueError, OSError) as exc:
        print(f"qbm: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", gs.TruncationWarning)
            result = COMMANDS[args.command](cfg)
        for w in caught:
            if issubclass(w.category, gs.TruncationWarning):
                print(f"qbm: warning: {w.message}", file=sys.stderr)
            else:
                warnings.showwarning(w.message, w.category, w.filename, w.lineno)
    except (ParameterError, OSError) as exc:
        print(f"qbm: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except ValueError as exc:
        # raised by parameter validation before any heavy computation
        print(f"qbm: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (ArithmeticError, RuntimeError) as exc:
        print(f"qbm: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    cols, rows, summary, errors = result[:4]
    violations = result[4] if len(result) > 4 else []
    emit(cfg, render(cfg, args.command, cols, rows, summary))
    for msg in errors:
        print(f"qbm: numerical failure at {msg}", file=sys.stderr)
    for msg in violations:
        print(f"qbm: constraint violated: {msg}", file=sys.stderr)
    if violations:
        return EXIT_CONSTRAINT
    if errors:
        return EXIT_NUMERIC
    return EXIT_OK
