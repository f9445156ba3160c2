"""Command-line entry point: ``mixqfi <subcommand> --config run.yaml``.

Configs are flat YAML mappings (scalars and lists only). Scans are written as
CSV with a ``# schema:`` comment line, single reports as JSON. Exit status is
0 on success, 1 for invalid input and 2 when a property suite fails.
"""

import argparse
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from itertools import product

import numpy as np
import yaml

from . import __version__
from .control import (
    NO_PULSES,
    amplitude_hamiltonian,
    find_sign_changes,
    frequency_hamiltonian,
    pi_pulse_schedule,
    saturation_check,
)
from .qfi import HermitianOperator, brute_force_max, max_qfi, optimal_state, qfi
from .spectra import SpectrumError, state_spectrum
from .spectrum_opt import PurityProblem, optimize_spectrum
from .thermal import (
    SpinEnsemble,
    beta_from_polarization,
    frequency_g,
    leading_order,
    lower_bound_LB,
    lower_bound_MB,
    modulation_g,
    scaling_exponent,
    thermal_max_qfi,
)
from .verify import run_suites, summary

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_SUITE = 0, 1, 2


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# Config access
# --------------------------------------------------------------------------


def load_config(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a key-value mapping")
    for k, v in data.items():
        if isinstance(v, dict):
            raise ConfigError(f"{k}: nested mappings are not allowed (flat keys only)")
    return data


def _num(cfg, key, default=None, kind=float, positive=False):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"{key}: required")
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    v = kind(v)
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite")
    if positive and v <= 0:
        raise ConfigError(f"{key}: must be positive")
    return v


def _vec(cfg, key, default=None, allow_scalar=True):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"{key}: required")
        return list(default)
    v = cfg[key]
    if allow_scalar and isinstance(v, (int, float)) and not isinstance(v, bool):
        v = [v]
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{key}: expected a non-empty list of numbers")
    for x in v:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ConfigError(f"{key}: entries must be finite numbers, got {x!r}")
    return [float(x) for x in v]


def _flag(cfg, key, default):
    v = cfg.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"{key}: expected true or false")
    return v


def _choice(cfg, key, options, default):
    v = cfg.get(key, default)
    if v not in options:
        raise ConfigError(f"{key}: expected one of {', '.join(options)}, got {v!r}")
    return v


def _generator(cfg):
    if "h" in cfg and "h_matrix" in cfg:
        raise ConfigError("h, h_matrix: give only one")
    if "h_matrix" in cfg:
        try:
            re = np.array(cfg["h_matrix"], dtype=float)
            im = np.array(cfg.get("h_matrix_imag", np.zeros_like(re)), dtype=float)
            return HermitianOperator(re + 1j * im)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"h_matrix: {exc}") from None
    return HermitianOperator.diag(_vec(cfg, "h", allow_scalar=False))


def _spectrum(cfg, key="p"):
    try:
        return state_spectrum(_vec(cfg, key, allow_scalar=False))
    except SpectrumError as exc:
        raise ConfigError(f"{key}: {exc}") from None


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_csv(stream, name, columns, rows, notes=()):
    buf = io.StringIO(newline="")
    buf.write(f"# schema: mixqfi.{name}.v{SCHEMA_VERSION}\n")
    for line in notes:
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt(x) for x in r) + "\n")
    stream.write(buf.getvalue())


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def write_json(stream, name, payload):
    doc = {"schema": f"mixqfi.{name}.v{SCHEMA_VERSION}", **payload}
    stream.write(json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n")


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_max_qfi(cfg, seed, out, workers=1):
    p = _spectrum(cfg)
    h = _generator(cfg)
    if h.dim != p.size:
        raise ConfigError(f"p, h: dimensions differ ({p.size} vs {h.dim})")
    budget = _num(cfg, "budget", 10000, int, positive=True)
    bound = max_qfi(p, h.eigvals)
    rho = optimal_state(p, h)
    brute = brute_force_max(p, h, budget=budget, seed=seed)
    write_json(out, "max_qfi", {
        "dim": p.size,
        "p": p,
        "h_eigs": h.eigvals,
        "bound": bound,
        "optimal_qfi": qfi(rho, h),
        "optimal_basis_real": rho.basis.real,
        "optimal_basis_imag": rho.basis.imag,
        "brute_force": brute.value,
        "ratio": brute.ratio,
        "budget": budget,
        "seed": seed,
    })
    return EXIT_OK


THERMAL_COLUMNS = ["N", "j", "beta", "T", "g", "K_B", "L_B", "M_B", "leading", "slope_N", "slope_j"]


def _thermal_row(args):
    n, j, beta, T, g = args
    e = SpinEnsemble(n, j, beta)
    g2 = g * g
    return [n, j, beta, T, g, thermal_max_qfi(e, g), g2 * lower_bound_LB(e),
            g2 * lower_bound_MB(e), g2 * leading_order(e)]


def _g_of_T(cfg, T):
    mod = _choice(cfg, "modulation", ("constant", "cos", "frequency"), "constant")
    amp = _num(cfg, "amplitude", 1.0)
    omega = _num(cfg, "omega", 1.0, positive=True)
    if mod == "constant":
        return abs(amp) * T
    if mod == "cos":
        zeros = (np.arange(int(omega * T / np.pi + 0.5)) + 0.5) * np.pi / omega
        return modulation_g(lambda t: amp * math.cos(omega * t), T, breakpoints=zeros)
    return abs(frequency_g(amp, omega, T))


def _slopes(rows, key_idx, var_idx):
    out = [math.nan] * len(rows)
    groups = {}
    for i, r in enumerate(rows):
        groups.setdefault(tuple(r[k] for k in key_idx), []).append(i)
    for idx in groups.values():
        pts = [(rows[i][var_idx], rows[i][5]) for i in idx]
        if len({x for x, _ in pts}) >= 3 and all(v > 0 for _, v in pts):
            s = scaling_exponent(pts)
            for i in idx:
                out[i] = s
    return out


def cmd_thermal_scan(cfg, seed, out, workers=1):
    del seed
    ns = _vec(cfg, "N", [1])
    js = _vec(cfg, "j", [0.5])
    if "beta" in cfg and "P" in cfg:
        raise ConfigError("beta, P: give only one")
    if "P" in cfg:
        try:
            betas = [beta_from_polarization(P) for P in _vec(cfg, "P")]
        except ValueError as exc:
            raise ConfigError(f"P: {exc}") from None
    else:
        betas = _vec(cfg, "beta", [1.0])
    for n in ns:
        if n != int(n) or n < 1:
            raise ConfigError(f"N: entries must be positive integers, got {n!r}")
    for b in betas:
        if b < 0:
            raise ConfigError(f"beta: must be nonnegative, got {b!r}")
    if "T" in cfg:
        Ts = _vec(cfg, "T")
        if any(T <= 0 for T in Ts):
            raise ConfigError("T: entries must be positive")
        gs = [_g_of_T(cfg, T) for T in Ts]
    else:
        Ts, gs = [math.nan], [_num(cfg, "g", 1.0)]
    tasks = []
    for n, j, b, (T, g) in product(ns, js, betas, list(zip(Ts, gs))):
        try:
            SpinEnsemble(int(n), j, b)
        except ValueError as exc:
            raise ConfigError(f"j: {exc}") from None
        tasks.append((int(n), j, b, T, g))
    rows = _map(_thermal_row, tasks, workers)
    slope_n = _slopes(rows, (1, 2, 3), 0)
    slope_j = _slopes(rows, (0, 2, 3), 1)
    rows = [r + [a, b] for r, a, b in zip(rows, slope_n, slope_j)]
    notes = [
        "N: spins; j: spin size; beta: inverse spin temperature; T: evolution time (nan if unused)",
        "g: integrated |modulation|; K_B: maximal QFI; L_B, M_B: lower bounds; leading: 4 N^2 <Sz>^2 (all times g^2)",
        "slope_N, slope_j: log-log slope of K_B over the N (resp. j) values sharing the other parameters; nan if < 3 points",
    ]
    write_csv(out, "thermal_scan", THERMAL_COLUMNS, rows, notes)
    return EXIT_OK


def _product_spectrum(n, j, beta):
    from .thermal import thermal_state

    w = thermal_state(j, beta).spectrum
    p = np.ones(1)
    for _ in range(n):
        p = np.kron(p, w)
    return np.sort(p)[::-1]


def _control_setup(cfg, T):
    mod = _choice(cfg, "modulation", ("constant", "cos-amplitude", "cos-frequency"), "cos-amplitude")
    n = _num(cfg, "N", 1, int, positive=True)
    j = _num(cfg, "j", 0.5, positive=True)
    omega = _num(cfg, "omega", 1.0, positive=True)
    amp = _num(cfg, "amplitude", 1.0)
    pulses = _flag(cfg, "pulses", True)
    if mod == "constant":
        H = amplitude_hamiltonian(lambda t: 1.0, T, n, j)
        alpha, switch = amp, None
    elif mod == "cos-amplitude":
        H = amplitude_hamiltonian(lambda t: math.cos(omega * t), T, n, j)
        alpha, switch = amp, lambda t: math.cos(omega * t)
    else:
        H = frequency_hamiltonian(amp, T, n, j)
        alpha, switch = omega, lambda t: -t * math.sin(omega * t)
    d = H.dim(alpha)
    controls = NO_PULSES
    if pulses and switch is not None:
        controls = pi_pulse_schedule(find_sign_changes(switch, T), d, (n, j))
    return H, alpha, controls, (n, j)


def _control_point(cfg, T, steps):
    H, alpha, controls, (n, j) = _control_setup(cfg, T)
    if "p" in cfg:
        p = _spectrum(cfg)
    else:
        p = _product_spectrum(n, j, _num(cfg, "beta", 1.0))
    if p.size != H.dim(alpha):
        raise ConfigError(f"p: length {p.size} does not match dimension {H.dim(alpha)}")
    table = []
    for s in (steps // 4, steps // 2, steps):
        if s < 1:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rep = saturation_check(p, H, controls, alpha, steps=s)
        table.append({"steps": s, "qfi": rep.value, "K_alpha": rep.bound, "ratio": rep.ratio})
    return {"T": T, "pulses": len(controls), "K_alpha": table[-1]["K_alpha"],
            "qfi": table[-1]["qfi"], "ratio": table[-1]["ratio"], "convergence": table}


def cmd_control_sim(cfg, seed, out, workers=1):
    del seed, workers
    steps = _num(cfg, "steps", 10000, int, positive=True)
    tol = _num(cfg, "tolerance", 1e-4, positive=True)
    Ts = _vec(cfg, "T", [2 * math.pi])
    if any(T <= 0 for T in Ts):
        raise ConfigError("T: entries must be positive")
    points = [_control_point(cfg, T, steps) for T in Ts]
    for pt in points:
        conv = pt["convergence"]
        if len(conv) >= 2:
            a, b = conv[-2]["qfi"], conv[-1]["qfi"]
            pt["converged"] = abs(a - b) <= tol * max(abs(b), 1e-300)
        else:
            pt["converged"] = False
        if not pt["converged"]:
            print(f"warning: T={fmt(pt['T'])}: step halving changes the QFI by more than {tol:g}",
                  file=sys.stderr)
    payload = {
        "modulation": cfg.get("modulation", "cos-amplitude"),
        "steps": steps,
        "points": points,
    }
    if len(points) == 1:
        payload.update({k: points[0][k] for k in ("K_alpha", "qfi", "ratio")})
    elif len(points) >= 3 and all(pt["qfi"] > 0 for pt in points):
        payload["T_slope"] = scaling_exponent([(pt["T"], pt["qfi"]) for pt in points])
    write_json(out, "control_sim", payload)
    return EXIT_OK


def _purity_point(args):
    h, g, restarts, seed = args
    sol = optimize_spectrum(PurityProblem(h, g), restarts=restarts, seed=seed)
    return [g, *sol.p.tolist(), sol.value, sol.kkt_residual]


def cmd_purity_scan(cfg, seed, out, workers=1):
    h = np.sort(np.array(_vec(cfg, "h", allow_scalar=False)))[::-1]
    d = h.size
    if "gammas" in cfg:
        gammas = _vec(cfg, "gammas")
    else:
        n = _num(cfg, "points", 50, int, positive=True)
        gammas = np.linspace(1.0 / d, 1.0, n).tolist()
    for g in gammas:
        if not 1.0 / d - 1e-10 <= g <= 1.0 + 1e-10:
            raise ConfigError(f"gammas: {g!r} outside [1/{d}, 1]")
    restarts = _num(cfg, "restarts", 50, int, positive=True)
    rows = _map(_purity_point, [(h, g, restarts, seed) for g in gammas], workers)
    cols = ["gamma"] + [f"p{k + 1}" for k in range(d)] + ["value", "kkt_residual"]
    notes = ["h = " + " ".join(fmt(x) for x in h),
             "p1..pd: optimal decreasing spectrum at purity gamma; value: maximal QFI"]
    write_csv(out, "purity_scan", cols, rows, notes)
    return EXIT_OK


def cmd_verify(cfg, seed, out, workers=1, samples=None):
    del workers
    if samples is None:
        samples = cfg.get("samples", 1000)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        raise ConfigError(f"samples: expected a positive integer, got {samples!r}")
    results = run_suites(seed=seed, samples=samples)
    out.write(f"seed={seed} samples={samples}\n")
    out.write(summary(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_SUITE


COMMANDS = {
    "max-qfi": cmd_max_qfi,
    "thermal-scan": cmd_thermal_scan,
    "control-sim": cmd_control_sim,
    "purity-scan": cmd_purity_scan,
    "verify": cmd_verify,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="mixqfi", description="Maximal QFI of mixed states.")
    ap.add_argument("--version", action="version", version=f"mixqfi {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="YAML file with flat keys")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--workers", type=int, default=1, help="worker processes for grid points")
        if name == "verify":
            sp.add_argument("--samples", type=int, default=None, help="trials per suite")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    fn = COMMANDS[args.command]
    buf = io.StringIO()
    try:
        cfg = load_config(args.config)
        if args.workers < 1:
            raise ConfigError("workers: must be >= 1")
        kws = {"samples": args.samples} if args.command == "verify" else {}
        code = fn(cfg, args.seed, buf, args.workers, **kws)
    except (ConfigError, SpectrumError, yaml.YAMLError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
