"""Command-line interface: curves, scale reports, grids, Monte Carlo runs.

Every command writes a run manifest (JSON) capturing the resolved
configuration, seed, and tool version; re-running with the same
configuration reproduces output files byte for byte (timestamps live
only in the manifest).  CSV files carry '#'-prefixed key=value header
lines followed by comma-separated numeric rows printed with 17
significant digits.

Exit codes: 0 success, 2 validation failure, 3 numerical non-convergence.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import (
    GridResolutionError,
    QuadratureError,
    SamplingError,
    SubplanckError,
)
from .fidelity import (
    FidelityCurve,
    coherent_fidelity,
    compass_fidelity,
    fidelity_quadrature,
    number_fidelity,
    random_avg_fidelity,
    scale_report,
    squeezed_fidelity,
)
from .fock import (
    ComplexAmplitude,
    DensityOp,
    make_coherent,
    make_compass,
    make_number,
    make_random,
    make_rng,
    make_squeezed,
    make_thermal,
)
from .mixedstate import entanglement_fidelity, mixed_scale_report
from .phasespace import (
    PhaseGrid,
    char_values,
    default_grid,
    husimi_values,
    wigner_values,
)
from .protocol import OutcomeSampler, average_channel, mc_average
from .dynamics import (
    EvolutionConfig,
    SpatialGrid,
    coherent_wavefunction,
    evolve_chaotic,
    wavefunction_to_fock,
)


class ValidationFailure(Exception):
    """User-facing configuration or data-validation problem (exit 2)."""


# ---------------------------------------------------------------------------
# state specification
# ---------------------------------------------------------------------------

STATE_KINDS = {
    "coherent": {"nu1": 0.0, "nu2": 0.0},
    "number": {"n": 0},
    "squeezed": {"u": 0.0},
    "compass": {"a": 1.0},
    "random": {"dim": 16, "seed": 0},
    "thermal": {"nbar": 1.0},
    "chaotic": {"x0": -8.0, "p0": 4.0, "t_final": 5.0, "dt": 2.5e-4},
}


@dataclass
class StateSpec:
    kind: str
    params: dict = field(default_factory=dict)
    trunc: int | None = None

    @classmethod
    def parse(cls, text, trunc=None):
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        if kind not in STATE_KINDS:
            raise ValidationFailure(
                f"unknown state kind {kind!r}; choose from {sorted(STATE_KINDS)}"
            )
        params = dict(STATE_KINDS[kind])
        if rest:
            for item in rest.split(","):
                key, _, val = item.partition("=")
                key = key.strip()
                if key not in params:
                    raise ValidationFailure(f"unknown parameter {key!r} for {kind}")
                params[key] = type(params[key])(float(val)) if not isinstance(
                    params[key], int
                ) else int(float(val))
        return cls(kind, params, trunc)

    @property
    def descriptor(self):
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}:{inner}"

    def build(self):
        p = self.params
        dim = self.trunc or 64
        if self.kind == "coherent":
            return make_coherent(ComplexAmplitude(p["nu1"], p["nu2"]), dim)
        if self.kind == "number":
            return make_number(p["n"], max(dim, p["n"] + 1))
        if self.kind == "squeezed":
            return make_squeezed(p["u"], dim)
        if self.kind == "compass":
            return make_compass(p["a"], dim)
        if self.kind == "random":
            return make_random(p["dim"], seed=p["seed"])
        if self.kind == "thermal":
            return make_thermal(p["nbar"], dim)
        if self.kind == "chaotic":
            cfg = EvolutionConfig(dt=p["dt"], t_final=p["t_final"])
            psi = coherent_wavefunction(p["x0"], p["p0"], cfg.grid)
            state, _ = wavefunction_to_fock(evolve_chaotic(psi, cfg), dim=self.trunc)
            return state
        raise ValidationFailure(f"unhandled kind {self.kind}")

    def closed_form(self):
        p = self.params
        if self.kind == "coherent":
            return coherent_fidelity
        if self.kind == "number":
            return lambda t: number_fidelity(p["n"], t)
        if self.kind == "squeezed":
            return lambda t: squeezed_fidelity(p["u"], t)
        if self.kind == "compass":
            return lambda t: compass_fidelity(p["a"], t)
        if self.kind == "random":
            return lambda t: random_avg_fidelity(p["dim"], t)  # ensemble mean
        if self.kind == "thermal":
            return lambda t: 1.0 / (1.0 + (2.0 * p["nbar"] + 1.0) * t / 2.0)
        return None


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path, header, columns, rows):
    lines = [f"# {k}={v}" for k, v in header.items()]
    lines.append("# columns=" + ",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_state_csv(path, state, header=None):
    """Serialize a Fock coefficient vector as rows (n, re_c, im_c)."""
    doc = dict(header or {})
    doc["dim"] = state.dim
    rows = [(n, c.real, c.imag) for n, c in enumerate(state.coeffs)]
    write_csv(path, doc, ["n", "re_c", "im_c"], rows)


def read_state_csv(path):
    """Inverse of write_state_csv."""
    from .fock import PureState

    rows = [
        [float(v) for v in line.split(",")]
        for line in open(path)
        if line.strip() and not line.startswith("#")
    ]
    arr = np.array(rows)
    return PureState(arr[:, 1] + 1j * arr[:, 2], normalize=False, fix_phase=False)


def write_manifest(path, command, config, seed=None):
    doc = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "generator": "philox",
        "created": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest_path(args):
    if args.manifest:
        return args.manifest
    return args.out + ".manifest.json"


PLOT_SCRIPT = """\
#!/usr/bin/env python3
\"\"\"Render {csv} (auto-generated companion script).\"\"\"
import numpy as np
import matplotlib.pyplot as plt

data = np.loadtxt({csv!r}, delimiter=",", comments="#")
n1, n2 = {res1}, {res2}
v = data[:, 2].reshape(n1, n2)
extent = [data[:, 1].min(), data[:, 1].max(), data[:, 0].min(), data[:, 0].max()]
lim = np.max(np.abs(v))
plt.imshow(v.T[::-1], extent=extent, cmap="RdBu_r", vmin=-lim, vmax=lim)
plt.colorbar(label={label!r})
plt.xlabel("position quadrature")
plt.ylabel("momentum quadrature")
plt.title({title!r})
plt.savefig({png!r}, dpi=160, bbox_inches="tight")
print("wrote", {png!r})
"""


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_fidelity_curve(args):
    spec = StateSpec.parse(args.state, args.trunc)
    if not (0 <= args.t_min < args.t_max) and args.t_steps != 1:
        raise ValidationFailure("need 0 <= t-min < t-max")
    ts = np.linspace(args.t_min, args.t_max, args.t_steps)
    state = spec.build()
    closed = spec.closed_form()
    if isinstance(state, DensityOp):
        fq = np.array([entanglement_fidelity(state, t) for t in ts])
        method = "entanglement"
    else:
        fq = np.array([fidelity_quadrature(state, t, args.form) for t in ts])
        method = f"form{args.form}"
    try:
        FidelityCurve(ts, fq, spec.descriptor, method).validate()
    except ValueError as exc:
        raise ValidationFailure(f"curve validation failed: {exc}") from exc
    header = {
        "state": spec.descriptor,
        "method": method,
        "trunc": args.trunc or "default",
    }
    if closed is None:
        cols = ["t", "F_quadrature"]
        rows = [(t, f) for t, f in zip(ts, fq)]
    else:
        fc = np.array([closed(t) for t in ts])
        cols = ["t", "F_closed", "F_quadrature", "abs_diff"]
        rows = [(t, a, b, abs(a - b)) for t, a, b in zip(ts, fc, fq)]
    write_csv(args.out, header, cols, rows)
    write_manifest(_manifest_path(args), "fidelity-curve", _config_dict(args),
                   seed=spec.params.get("seed"))
    return 0


def cmd_scales(args):
    spec = StateSpec.parse(args.state, args.trunc)
    state = spec.build()
    if isinstance(state, DensityOp):
        rep = mixed_scale_report(state, label=spec.descriptor)
    else:
        rep = scale_report(state, label=spec.descriptor)
    doc = rep.as_dict()
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        write_manifest(_manifest_path(args), "scales", _config_dict(args),
                       seed=spec.params.get("seed"))
    else:
        print(text)
    return 0


def cmd_grid(args):
    spec = StateSpec.parse(args.state, args.trunc)
    state = spec.build()
    res = args.grid_res
    if args.grid_extent is not None:
        grid = PhaseGrid(ComplexAmplitude(0.0, 0.0), (args.grid_extent, args.grid_extent),
                         (res, res))
    else:
        grid = default_grid(state, resolution=res)
    pts = grid.points()
    if args.function == "wigner":
        vals = (np.pi / 2.0) * wigner_values(state, pts)
        label, title = "(pi/2) W", f"Wigner, {spec.descriptor}"
    elif args.function == "husimi":
        vals = np.pi * husimi_values(state, pts)
        label, title = "pi Q", f"Husimi, {spec.descriptor}"
    elif args.function == "charsq":
        vals = np.abs(char_values(state, pts)) ** 2
        label, title = "|Phi|^2", f"characteristic (squared), {spec.descriptor}"
    else:
        raise ValidationFailure("function must be wigner, husimi or charsq")
    a1, a2 = grid.mesh()
    header = {
        "state": spec.descriptor,
        "function": args.function,
        "scaling": label,
        "center1": _fmt(grid.center.q1),
        "center2": _fmt(grid.center.q2),
        "extent1": _fmt(grid.extent[0]),
        "extent2": _fmt(grid.extent[1]),
        "res1": res,
        "res2": res,
        "measure": "d2alpha = dq1 dq2 / 2",
    }
    rows = zip(a1.ravel(), a2.ravel(), vals.ravel())
    write_csv(args.out, header, ["nu1", "nu2", "value"], rows)
    script = PLOT_SCRIPT.format(csv=args.out, res1=res, res2=res, label=label,
                                title=title, png=args.out + ".png")
    with open(args.out + ".plot.py", "w") as fh:
        fh.write(script)
    write_manifest(_manifest_path(args), "grid", _config_dict(args),
                   seed=spec.params.get("seed"))
    return 0


def cmd_teleport_mc(args):
    spec = StateSpec.parse(args.state, args.trunc)
    state = spec.build()
    if isinstance(state, DensityOp):
        raise ValidationFailure("teleport-mc expects a pure input state")
    rng = make_rng(args.seed)
    sampler = OutcomeSampler(state, args.t)
    result = mc_average(state, args.t, args.samples, rng, sampler=sampler)
    rho_avg = average_channel(state, args.t)
    w_avg = wigner_values(rho_avg, result.grid.points())
    l1 = float(np.sum(np.abs(result.grid.values - w_avg)) * result.grid.cell_measure)
    rows = [
        (k, x1, x2, f)
        for k, (x1, x2, f) in enumerate(zip(result.xi1, result.xi2, result.fidelities))
    ]
    write_csv(args.out, {"state": spec.descriptor, "t": _fmt(args.t),
                         "samples": args.samples, "seed": args.seed},
              ["sample", "xi1", "xi2", "conditional_fidelity"], rows)
    closed = spec.closed_form()
    summary = {
        "mean_conditional_fidelity": float(np.mean(result.fidelities)),
        "stderr": float(np.std(result.fidelities) / np.sqrt(args.samples)),
        "closed_form": None if closed is None else float(closed(args.t)),
        "l1_distance_to_average_channel": l1,
        "samples": args.samples,
        "seed": args.seed,
    }
    with open(args.out + ".summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(_manifest_path(args), "teleport-mc", _config_dict(args), seed=args.seed)
    return 0


def cmd_random_average(args):
    ts = np.linspace(args.t_min, args.t_max, args.t_steps)
    rng = make_rng(args.seed)
    states = [make_random(args.dim, rng=rng) for _ in range(args.samples)]
    rows = []
    for t in ts:
        formula = random_avg_fidelity(args.dim, t)
        vals = np.array([fidelity_quadrature(s, t, 4) for s in states])
        rows.append((t, formula, vals.mean(), vals.std(ddof=1) / np.sqrt(args.samples)))
    write_csv(args.out, {"dim": args.dim, "samples": args.samples, "seed": args.seed},
              ["t", "F_formula", "F_mc_mean", "F_mc_stderr"], rows)
    write_manifest(_manifest_path(args), "random-average", _config_dict(args), seed=args.seed)
    return 0


def cmd_evolve(args):
    from .dynamics import double_well_potential, split_step_evolve

    grid = SpatialGrid(args.grid_min, args.grid_max, args.grid_points)
    cfg = EvolutionConfig(dt=args.dt, t_final=args.t_final, grid=grid)
    psi0 = coherent_wavefunction(args.x0, args.p0, grid)
    if cfg.n_steps == 0:
        final = psi0
    elif args.snapshot_stride > 0:
        # march in stride-sized chunks, logging (tau, x, psi) after each
        snap_rows = []
        cur, tau = psi0, 0.0
        done = 0
        while done < cfg.n_steps:
            steps = min(args.snapshot_stride, cfg.n_steps - done)
            part = EvolutionConfig(dt=args.dt, t_final=steps * args.dt, grid=grid)
            cur = split_step_evolve(cur, 5.0, double_well_potential, part, t0=tau)
            tau += steps * args.dt
            done += steps
            for xv, sv in zip(cur.x, cur.samples):
                snap_rows.append((tau, xv, sv.real, sv.imag))
        final = cur
        write_csv(args.out_prefix + "_snapshots.csv",
                  {"dt": _fmt(args.dt), "stride": args.snapshot_stride},
                  ["tau", "x", "re_psi", "im_psi"], snap_rows)
    else:
        final = evolve_chaotic(psi0, cfg)
    write_csv(args.out_prefix + "_final_wavefunction.csv",
              {"t_final": _fmt(args.t_final), "dt": _fmt(args.dt),
               "x_min": _fmt(grid.x_min), "dx": _fmt(grid.dx),
               "norm_drift": _fmt(final.norm2 - 1.0)},
              ["x", "re_psi", "im_psi"],
              zip(final.x, final.samples.real, final.samples.imag))
    state, leakage = wavefunction_to_fock(final, dim=args.trunc)
    write_state_csv(args.out_prefix + "_fock_state.csv", state,
                    header={"leakage": _fmt(leakage)})
    import warnings as _w

    from .fock import quad_moments

    with _w.catch_warnings():
        _w.simplefilter("ignore")
        _, _, vx, vp = quad_moments(state)
    target = vx + vp
    cand = np.arange(1, 400)
    matched = int(cand[np.argmin(np.abs((cand**2 + 1.0) / (cand + 1.0) - target))])
    ts = np.linspace(args.t_min, args.t_max, args.t_steps)
    rows = []
    for t in ts:
        rows.append((
            t,
            fidelity_quadrature(state, t, 4),
            random_avg_fidelity(matched, t),
            random_avg_fidelity(100, t),
        ))
    write_csv(args.out_prefix + "_fidelity.csv",
              {"matched_dim": matched, "fock_dim": state.dim,
               "leakage": _fmt(leakage), "variance_sum": _fmt(target)},
              ["t", "F_chaotic", "F_random_matched", "F_random_100"], rows)
    summary = {
        "fock_dim": state.dim,
        "leakage": leakage,
        "norm_drift": final.norm2 - 1.0,
        "variance_sum": target,
        "matched_dim": matched,
        "max_dev_matched": float(max(abs(r[1] - r[2]) for r in rows)),
        "max_dev_dim100": float(max(abs(r[1] - r[3]) for r in rows)),
    }
    if args.convergence:
        base = args.dt * 4
        runs = []
        for dt_ in (base, base / 2, base / 4):
            runs.append(evolve_chaotic(psi0, EvolutionConfig(dt=dt_, t_final=args.t_final, grid=grid)))
        d1 = float(np.linalg.norm(runs[0].samples - runs[1].samples))
        d2 = float(np.linalg.norm(runs[1].samples - runs[2].samples))
        summary["convergence_ratio"] = d1 / d2
        summary["convergence_base_dt"] = base
    with open(args.out_prefix + "_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(args.manifest or args.out_prefix + "_manifest.json",
                   "evolve", _config_dict(args))
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _config_dict(args):
    skip = {"func", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _add_common(p):
    p.add_argument("--trunc", type=int, default=None, help="Fock truncation override")
    p.add_argument("--manifest", default=None, help="manifest path (default: <out>.manifest.json)")
    p.add_argument("--config", default=None, help="JSON file of flag defaults (flags win)")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="subplanck",
        description="Teleportation fidelities and phase-space structure measures.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity-curve", help="fidelity vs squeezing parameter")
    p.add_argument("--state", required=True)
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=2.0)
    p.add_argument("--t-steps", type=int, default=21)
    p.add_argument("--form", type=int, default=4, choices=(1, 2, 3, 4))
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_fidelity_curve)

    p = sub.add_parser("scales", help="slope, critical squeezing, scale lengths")
    p.add_argument("--state", required=True)
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_scales)

    p = sub.add_parser("grid", help="quasidistribution on a grid (plus plot script)")
    p.add_argument("--state", required=True)
    p.add_argument("--function", default="wigner", choices=("wigner", "husimi", "charsq"))
    p.add_argument("--grid-extent", type=float, default=None)
    p.add_argument("--grid-res", type=int, default=256)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("teleport-mc", help="Monte Carlo teleportation trajectories")
    p.add_argument("--state", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_teleport_mc)

    p = sub.add_parser("random-average", help="ensemble formula vs sampled states")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--t-min", type=float, default=0.2)
    p.add_argument("--t-max", type=float, default=2.0)
    p.add_argument("--t-steps", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_random_average)

    p = sub.add_parser("evolve", help="driven double-well run and fidelity overlay")
    p.add_argument("--x0", type=float, default=-8.0)
    p.add_argument("--p0", type=float, default=4.0)
    p.add_argument("--t-final", type=float, default=5.0)
    p.add_argument("--dt", type=float, default=2.5e-4)
    p.add_argument("--grid-min", type=float, default=-30.0)
    p.add_argument("--grid-max", type=float, default=30.0)
    p.add_argument("--grid-points", type=int, default=4096)
    p.add_argument("--t-min", type=float, default=0.2)
    p.add_argument("--t-max", type=float, default=2.0)
    p.add_argument("--t-steps", type=int, default=10)
    p.add_argument("--snapshot-stride", type=int, default=0,
                   help="write (tau, x, psi) rows every this many steps")
    p.add_argument("--convergence", action="store_true")
    p.add_argument("--out-prefix", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_evolve)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    # --config provides defaults; explicit flags win
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--config" in argv:
        idx = argv.index("--config")
        with open(argv[idx + 1]) as fh:
            doc = json.load(fh)
        cfg = doc.get("config", doc)
        pre = []
        for key, val in cfg.items():
            flag = "--" + key.replace("_", "-")
            if key in ("command", "func", "out", "manifest") or val is None:
                continue
            if isinstance(val, bool):
                if val:
                    pre.append(flag)
                continue
            pre.extend([flag, str(val)])
        argv = argv[:1] + pre + argv[1:]
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, GridResolutionError, SamplingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except SubplanckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
