"""Command-line runner: ``schrolet SUBCOMMAND [CONFIG] [options]``.

Exit codes: 0 all requested checks pass, 1 a check fails, 2 the
configuration or an input file is malformed, 3 an I/O error occurred.
Artifacts go to ``--out``, else ``$SCHROLET_OUT_DIR``, else ``./schrolet_out``.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io as sio
from .admissible import (build_generator_2d, build_generator_general, check_continuous_admissibility,
                         check_discrete_conditions, check_support_disjointness, shannon_constant)
from .continuous import (QuadSpec, WeilQuad, reproducing_convergence, weil_constant, weil_test_functions,
                         write_voice_csv)
from .frame import SamplingGrid, analyze, band_trig_signal, parseval_report, synthesize
from .group import isotypic, make_finite_subgroup
from .harmonics import labels_2d, labels_3d
from .profiles import ShannonProfile
from .radial import LN2, set_threads
from .rep import CartesianSignal, j_inverse_roundtrip, propagate

SUBCOMMANDS = ("build-frame", "check-admissible", "check-discrete", "analyze", "synthesize",
               "verify-parseval", "reproducing-check", "weil-check", "propagate", "erratum-report")

DEFAULTS = {
    "d": 2,
    "grid": {"omega_min_exp": -3, "omega_max_exp": -1, "Q": 8, "n_gauss": 32},
    "generator": {"profile": "shannon", "constant": "computed", "alphas": "standard", "n_range": [-4, 3],
                  "L": 1, "subgroup": {"kind": "cyclic-3D-z", "param": 2}, "i_max": 4,
                  "bijection": "per-group"},
    "sampling": {"j_range": [-6, 6], "K": 32, "scale_k": True},
    "signal": {"bands": [-3, -2], "k0": 3, "p": 6, "seed": 0, "count": 5},
    "tolerances": {"parseval": 1e-8, "discrete": 1e-12, "continuous": 1e-10, "reproducing": 1e-2,
                   "reduction": 3.0, "weil": 1e-3, "mass": 1e-10, "roundtrip": 1e-8,
                   "moment": 1e-8},
    "quad": {"grid": {"omega_min_exp": -3, "omega_max_exp": -1, "Q": 32, "n_gauss": 64},
             "n_range": [-1, 1], "u_max": 64.0, "du": 1.0, "p_range": [-16, 20], "Q": 4,
             "n_rot": 16, "levels": 2, "factor": 4, "voice_csv": False},
    "weil": {"panels": 2, "n_gauss": 6, "n_rot": 8},
    "propagate": {"N": 128, "Xi": 4.0, "times": [0.0, 0.05, 0.1, 0.2], "sigma": 1.0,
                  "center": [0.5, 0.0], "steps": 100},
}

REQUIRED = {"grid": ("omega_min_exp", "omega_max_exp", "Q"),
            "quad.grid": ("omega_min_exp", "omega_max_exp", "Q")}



# ---------------------------------------------------------------------------
# configuration

def _merge(base: dict, over: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        where = f"{path}.{key}" if path else key
        if key in out and isinstance(out[key], dict) and val is not None:
            if not isinstance(val, dict):
                raise sio.SchemaError(where, "must be an object")
            req = REQUIRED.get(where)
            if req:
                for r in req:
                    if r not in val:
                        raise sio.SchemaError(f"{where}.{r}", "missing required field")
                out[key] = copy.deepcopy(val)
            else:
                out[key] = _merge(out[key], val, where)
        else:
            out[key] = copy.deepcopy(val)
    return out


def load_config(path: str | None, overrides: dict) -> dict:
    user = {}
    if path:
        try:
            text = Path(path).read_text()
        except OSError:
            raise
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise sio.SchemaError(str(path), f"invalid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise sio.SchemaError("<root>", "configuration must be a JSON object")
    cfg = _merge(DEFAULTS, user)
    for dotted, val in overrides.items():
        node = cfg
        keys = dotted.split(".")
        for k in keys[:-1]:
            node = node[k]
        node[keys[-1]] = val
    _validate(cfg)
    return cfg


def _need(cond: bool, where: str, msg: str):
    if not cond:
        raise sio.SchemaError(where, msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _validate(cfg: dict):
    _need(cfg["d"] in (2, 3), "d", "must be 2 or 3")
    sio.grid_from_header(cfg["grid"], "grid")
    sio.grid_from_header(cfg["quad"]["grid"], "quad.grid")
    gen = cfg["generator"]
    _need(_is_int(gen["L"]) and gen["L"] >= 1, "generator.L", "must be a positive integer")
    _need(isinstance(gen["n_range"], list) and len(gen["n_range"]) == 2 and all(map(_is_int, gen["n_range"])),
          "generator.n_range", "must be [n_min, n_max]")
    _need(_is_int(gen["i_max"]) and gen["i_max"] >= 0, "generator.i_max", "must be a non-negative integer")
    c = gen["constant"]
    _need(c in ("computed", "printed", "admissible") or isinstance(c, (int, float)), "generator.constant",
          "must be 'computed', 'printed', 'admissible' or a number")
    s = cfg["sampling"]
    _need(isinstance(s["j_range"], list) and len(s["j_range"]) == 2 and all(map(_is_int, s["j_range"])),
          "sampling.j_range", "must be [j_min, j_max]")
    _need(_is_int(s["K"]) and s["K"] >= 0, "sampling.K", "must be a non-negative integer")
    for key, val in cfg["tolerances"].items():
        _need(isinstance(val, (int, float)) and val >= 0, f"tolerances.{key}", "must be a non-negative number")


# ---------------------------------------------------------------------------
# builders

def _constant(gen: dict, L: int):
    c = gen["constant"]
    if c == "admissible":
        return 1.0 / np.sqrt(LN2)
    if c in ("computed", "printed"):
        return shannon_constant(L, c)
    return float(c)


def make_generator(cfg: dict, n_range=None):
    gen = cfg["generator"]
    if gen["profile"] != "shannon":
        raise sio.SchemaError("generator.profile", "only 'shannon' is available from configuration")
    if cfg["d"] == 2:
        alphas = gen["alphas"]
        if isinstance(alphas, dict):
            try:
                alphas = {int(k): float(v) for k, v in alphas.items()}
            except ValueError as exc:
                raise sio.SchemaError("generator.alphas", "keys must be integers, values numbers") from exc
        elif alphas != "standard":
            raise sio.SchemaError("generator.alphas", "must be 'standard' or an object n -> alpha")
        L = gen["L"]
        return build_generator_2d("shannon", alphas, L, tuple(n_range or gen["n_range"]),
                                  constant=_constant(gen, L))
    sub = gen["subgroup"]
    for key in ("kind", "param"):
        _need(key in sub, f"generator.subgroup.{key}", "missing required field")
    try:
        F = make_finite_subgroup(sub["kind"], sub["param"])
    except ValueError as exc:
        raise sio.SchemaError("generator.subgroup", str(exc)) from exc
    isos = [isotypic(F, lab) for lab in labels_3d(gen["i_max"])]
    return build_generator_general(ShannonProfile(_constant(gen, F.order)), F, isos,
                                   bijection=gen["bijection"])


def make_grid(cfg: dict, key: str = "grid"):
    node = cfg["quad"]["grid"] if key == "quad.grid" else cfg["grid"]
    return sio.grid_from_header(node, key)


def make_sampling(cfg: dict, g, grid):
    s = cfg["sampling"]
    return SamplingGrid.for_generator(g, grid, tuple(s["j_range"]), s["K"], s["scale_k"])


def make_signals(cfg: dict, g, grid, count=None):
    sc = cfg["signal"]
    if sc.get("file"):
        return [sio.read_sequence(sc["file"])]
    rng = np.random.default_rng(sc["seed"])
    return [band_trig_signal(grid, g.labels, sc["bands"], rng, sc["k0"], sc["p"])
            for _ in range(count or sc["count"])]


# ---------------------------------------------------------------------------
# subcommands

def _dump(out: Path, name: str, obj) -> Path:
    p = out / name
    p.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")
    return p


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _table(rows):
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<34} {detail}")
    return all(ok for _, ok, _ in rows)


def cmd_build_frame(cfg, out, args):
    g = make_generator(cfg)
    grid = make_grid(cfg)
    s = make_sampling(cfg, g, grid)
    _dump(out, "generator.json", g.describe())
    _dump(out, "sampling.json", {"j_range": [s.j_min, s.j_max], "K": s.K, "L": s.L,
                                 "K_per_j": {str(j): s.K_at(j) for j in s.js}, "size": s.size()})
    print(f"generator: {len(g.slots)} slots, subgroup {g.F.kind}({g.F.param}); frame size {s.size()}")
    return True


def cmd_check_admissible(cfg, out, args):
    tol = cfg["tolerances"]["continuous"]
    g = make_generator(cfg)
    raw = check_continuous_admissibility(g, tol=tol)[1]
    scale = 1.0 / np.sqrt(g.profile.log_norm_sq())
    scaled = check_continuous_admissibility(g.scaled(scale), tol=tol)[0]
    _dump(out, "admissible.json", {"slot_integrals": raw.to_dict(), "rescale_factor": scale,
                                   "rescaled_per_label": scaled.to_dict()})
    return _table([("slot integral = ln2/L", raw.passed, f"max residual {raw.max_residual:.3e}"),
                   ("rescaled per-label integral", scaled.passed, f"max residual {scaled.max_residual:.3e}")])


def cmd_check_discrete(cfg, out, args):
    tol = cfg["tolerances"]["discrete"]
    g = make_generator(cfg)
    reps = check_discrete_conditions(g, tol=tol)
    unit = check_discrete_conditions(g, tol=tol, shift_unit=1.0)
    disj = check_support_disjointness(g)
    _dump(out, "discrete.json", {"printed_shift": {k: v.to_dict() for k, v in reps.items()},
                                 "unit_shift": {k: v.to_dict() for k, v in unit.items()},
                                 "support_disjointness": disj.to_dict()})
    rows = [(f"{k} (2 pi m)", v.passed, f"max residual {v.max_residual:.3e}") for k, v in reps.items()]
    rows += [(f"{k} (m)", v.passed, f"max residual {v.max_residual:.3e}") for k, v in unit.items()
             if k != "constancy"]
    rows.append(("support disjointness", disj.passed, f"overlap {disj.max_residual:.3e}"))
    return _table(rows)


def cmd_analyze(cfg, out, args):
    g = make_generator(cfg)
    grid = make_grid(cfg)
    s = make_sampling(cfg, g, grid)
    f = sio.read_sequence(args.signal) if args.signal else make_signals(cfg, g, grid, 1)[0]
    c = analyze(f, g, s)
    sio.write_coefficients(out / "coefficients.csv", c)
    sio.write_sequence(out / "signal.csv", f)
    print(f"{sum(c.data[j].size for j in c.data)} coefficients, sum |c|^2 = {c.sum_sq():.17g}")
    return True


def cmd_synthesize(cfg, out, args):
    g = make_generator(cfg)
    grid = make_grid(cfg)
    s = make_sampling(cfg, g, grid)
    if args.coefficients:
        c = sio.read_coefficients(args.coefficients)
        f = synthesize(c, g, s, grid)
        sio.write_sequence(out / "synthesized.csv", f)
        print(f"synthesized signal with norm^2 {f.norm_sq():.17g}")
        return True
    f = sio.read_sequence(args.signal) if args.signal else make_signals(cfg, g, grid, 1)[0]
    back = synthesize(analyze(f, g, s), g, s, grid)
    sio.write_sequence(out / "synthesized.csv", back)
    err = (back - f).norm() / f.norm()
    _dump(out, "synthesize.json", {"relative_error": err})
    return _table([("round trip", err <= cfg["tolerances"]["roundtrip"], f"relative error {err:.3e}")])


def cmd_verify_parseval(cfg, out, args):
    tol = cfg["tolerances"]["parseval"]
    g = make_generator(cfg)
    grid = make_grid(cfg)
    s = make_sampling(cfg, g, grid)
    reps = [parseval_report(f, g, s, tol) for f in make_signals(cfg, g, grid)]
    _dump(out, "parseval.json", {"L": g.L, "reports": [r.to_dict() for r in reps]})
    worst = max(abs(r.ratio - 1) for r in reps)
    return _table([(f"Parseval ratio ({len(reps)} signals)", all(r.passed for r in reps),
                    f"max |ratio - 1| {worst:.3e}")])


def cmd_reproducing_check(cfg, out, args):
    q = cfg["quad"]
    tol = cfg["tolerances"]
    g = make_generator(cfg, n_range=q["n_range"])
    g = g.scaled(1.0 / np.sqrt(g.profile.log_norm_sq()))
    grid = make_grid(cfg, "quad.grid")
    f = make_signals(cfg, g, grid, 1)[0]
    spec = QuadSpec(q["u_max"], q["du"], q["p_range"][0], q["p_range"][1], q["Q"], q["n_rot"])
    levels = reproducing_convergence(f, g, spec, q["levels"], q["factor"])
    if q["voice_csv"]:
        write_voice_csv(out / "voice.csv", f, g, spec)
    _dump(out, "reproducing.json", {"levels": levels})
    rows = [("baseline ratio", levels[0]["error"] <= tol["reproducing"], f"ratio {levels[0]['ratio']:.6f}")]
    for n, lev in enumerate(levels[1:], 1):
        red = lev["reduction"] or float("inf")
        rows.append((f"refinement {n} error reduction", red >= tol["reduction"], f"x{red:.2f}"))
    rows.append(("window resolved by grid", all(l["window_resolved"] for l in levels), ""))
    return _table(rows)


def cmd_weil_check(cfg, out, args):
    w = cfg["weil"]
    rows, res = [], {}
    for name, (lo, hi), fn in weil_test_functions():
        C = weil_constant(fn, WeilQuad(np.exp(lo), np.exp(hi), w["panels"], w["n_gauss"], w["n_rot"]), cfg["d"])
        res[name] = C
        rows.append((f"Weil constant ({name})", abs(C - 1) <= cfg["tolerances"]["weil"], f"C = {C:.12f}"))
    _dump(out, "weil.json", res)
    return _table(rows)


def _spatial(f: CartesianSignal):
    """Inverse Fourier transform on the dual grid x_m = (m - N/2) / (N h)."""
    N, h = f.N, f.h
    xi = CartesianSignal.axis(N, f.Xi)
    x = (np.arange(N) - N // 2) / (N * h)
    E = np.exp(2j * np.pi * np.outer(x, xi)) * h
    out = f.values
    for axis in range(f.d):
        out = np.moveaxis(np.tensordot(E, out, axes=([1], [axis])), 0, axis)
    return x, out


def cmd_propagate(cfg, out, args):
    p = cfg["propagate"]
    d, N, Xi, sigma = cfg["d"], p["N"], float(p["Xi"]), float(p["sigma"])
    c0 = np.array(p["center"], dtype=float)
    _need(c0.shape == (d,), "propagate.center", f"must have {d} entries")
    _need(_is_int(p["steps"]) and p["steps"] >= 1, "propagate.steps", "must be a positive integer")
    f0 = CartesianSignal.from_callable(d, N, Xi, lambda xi: np.exp(-np.pi * sigma ** 2 * np.sum((xi - c0) ** 2, -1)))
    masses, moments = [], []
    for idx, t in enumerate(p["times"]):
        x, fx = _spatial(propagate(f0, float(t)))
        dens = np.abs(fx) ** 2
        dx = (x[1] - x[0]) ** d
        pts = np.stack(np.meshgrid(*([x] * d), indexing="ij"), axis=-1)
        mass = float(np.sum(dens) * dx)
        mean = np.sum(pts * dens[..., None], axis=tuple(range(d))) * dx / mass
        masses.append(mass)
        moments.append(float(np.sum(np.sum((pts - mean) ** 2, -1) * dens) * dx / mass))
        with open(out / f"snapshot_{idx:03d}.csv", "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow([f"x{k + 1}" for k in range(d)] + ["density"])
            for ind in np.ndindex(*dens.shape):
                wr.writerow([format(x[i], ".17g") for i in ind] + [format(dens[ind], ".17g")])
    drift = max(abs(m - masses[0]) for m in masses) / masses[0]
    # a chain of small steps accumulates rounding only
    f, dt = f0, max(p["times"], default=0.0) / p["steps"]
    for _ in range(p["steps"]):
        f = propagate(f, dt)
    drift = max(drift, abs(f.norm_sq() / f0.norm_sq() - 1))
    # free Gaussian: each coordinate has variance (sigma**4 + 4 t**2) / (4 pi sigma**2)
    exact = [d * (sigma ** 4 + 4 * t * t) / (4 * np.pi * sigma ** 2) for t in p["times"]]
    moment_err = max(abs(m / e - 1) for m, e in zip(moments, exact))
    order = np.argsort(p["times"])
    spreading = all(moments[order[k + 1]] > moments[order[k]] for k in range(len(order) - 1)
                    if p["times"][order[k + 1]] > p["times"][order[k]] >= 0)
    _dump(out, "propagate.json", {"times": p["times"], "mass": masses, "second_moment": moments,
                                  "second_moment_exact": exact, "mass_drift": drift,
                                  "steps": p["steps"]})
    return _table([("mass conservation", drift <= cfg["tolerances"]["mass"], f"relative drift {drift:.3e}"),
                   ("second moment increasing", spreading, ""),
                   ("second moment vs free-Gaussian law", moment_err <= cfg["tolerances"]["moment"],
                    f"relative error {moment_err:.3e}")])


def cmd_erratum_report(cfg, out, args):
    L = cfg["generator"]["L"] if cfg["d"] == 2 else make_generator(cfg).L
    tol = cfg["tolerances"]["discrete"]
    report = {}
    for which in ("printed", "computed"):
        g = build_generator_2d("shannon", "standard", L, (0, 0), constant=shannon_constant(L, which))
        cons = check_discrete_conditions(g, tol=tol)["constancy"]
        report[f"shannon_constant_{which}"] = {"constant": shannon_constant(L, which),
                                               "measured_sum": cons.constants["0/chi0/1"],
                                               "target": 1.0 / L, "passes": cons.passed}
    report["j_inverse"] = {"exponent_unitary": {"d=3": j_inverse_roundtrip(3, 0.25)},
                           "exponent_printed": {"d=3": j_inverse_roundtrip(3, 1.0)}}
    grid = sio.grid_from_header({"omega_min_exp": -1, "omega_max_exp": 0, "Q": 64})
    report["weights_over_half_to_one"] = {"domega": float(grid.measure_weights("domega").sum()),
                                          "domega_over_omega": float(grid.measure_weights("domega_over_omega").sum()),
                                          "ln2": LN2}
    _dump(out, "erratum.json", report)
    flagged = L > 1 and not report["shannon_constant_printed"]["passes"]
    rows = [("printed constant flagged" if L > 1 else "printed constant (L=1, coincides)",
             flagged or L == 1, f"sum_j = {report['shannon_constant_printed']['measured_sum']:.6g} vs 1/L = {1 / L:.6g}"),
            ("computed constant L^-1/2", report["shannon_constant_computed"]["passes"],
             f"sum_j = {report['shannon_constant_computed']['measured_sum']:.6g}"),
            ("J^-1 exponent (d-2)/4 inverts J", report["j_inverse"]["exponent_unitary"]["d=3"] < 1e-12,
             f"printed exponent error {report['j_inverse']['exponent_printed']['d=3']:.3g}")]
    return _table(rows)


COMMANDS = {"build-frame": cmd_build_frame, "check-admissible": cmd_check_admissible,
            "check-discrete": cmd_check_discrete, "analyze": cmd_analyze, "synthesize": cmd_synthesize,
            "verify-parseval": cmd_verify_parseval, "reproducing-check": cmd_reproducing_check,
            "weil-check": cmd_weil_check, "propagate": cmd_propagate, "erratum-report": cmd_erratum_report}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schrolet", description="Schroedingerlet frame experiments")
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("config", nargs="?", help="JSON configuration file")
    p.add_argument("--L", type=int, help="order of the planar rotation subgroup (d = 2)")
    p.add_argument("--threads", type=int, default=1, help="threads for the NUFFT fast paths")
    p.add_argument("--out", help="output directory (default $SCHROLET_OUT_DIR or ./schrolet_out)")
    p.add_argument("--signal", help="sequence signal CSV to use instead of a generated one")
    p.add_argument("--coefficients", help="coefficient CSV for synthesize")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        set_threads(args.threads)
        overrides = {"generator.L": args.L} if args.L is not None else {}
        cfg = load_config(args.config, overrides)
        out = Path(args.out or os.environ.get("SCHROLET_OUT_DIR") or "schrolet_out")
        out.mkdir(parents=True, exist_ok=True)
        ok = COMMANDS[args.command](cfg, out, args)
    except sio.SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
