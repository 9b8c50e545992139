"""Command-line interface.

Subcommands: spectrum, critical, simulate, sweep, colormap, persistence.
Reports are JSON, series and grids are CSV, heatmaps are P2 PGM with a
JSON sidecar.  Every file-writing run also writes a ``.meta.json`` echo of
the fully resolved configuration; passing it back via ``--config``
reproduces the run (explicit flags still win over the file).

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, dynamics, graphs, netsim, stability
from .errors import InvalidParamsError, NetsyncError, NumericalError

DEFAULT_OUT_DIR = Path("out")

_REGULAR_KINDS = {k.value: k for k in graphs.RegularKind}


def _parse_graph_spec(spec: str, seed: int | None) -> graphs.Graph:
    parts = spec.split(":")
    kind = parts[0].lower()
    try:
        if kind in _REGULAR_KINDS and len(parts) == 2:
            return graphs.build_regular(_REGULAR_KINDS[kind], int(parts[1]))
        if kind in ("er", "ws", "ba"):
            if seed is None:
                raise InvalidParamsError(f"random graph '{spec}' requires --seed")
            if kind == "er" and len(parts) == 3:
                return graphs.erdos_renyi(int(parts[1]), float(parts[2]), seed)
            if kind == "ws" and len(parts) == 4:
                return graphs.watts_strogatz(int(parts[1]), int(parts[2]), float(parts[3]), seed)
            if kind == "ba" and len(parts) == 3:
                return graphs.barabasi_albert(int(parts[1]), int(parts[2]), seed)
    except ValueError as exc:
        raise InvalidParamsError(f"bad graph spec {spec!r}: {exc}") from exc
    raise InvalidParamsError(
        f"bad graph spec {spec!r}; expected kind:n, er:n:p, ws:n:k:p or ba:n:m"
    )


def _load_graph(resolved: dict) -> graphs.Graph:
    if resolved.get("graph_file"):
        return graphs.read_edge_list(resolved["graph_file"])
    if resolved.get("graph"):
        return _parse_graph_spec(resolved["graph"], resolved.get("seed"))
    raise InvalidParamsError("one of --graph or --graph-file is required")


def _parse_lorenz(spec: str) -> dynamics.LorenzParams:
    if spec == "classic":
        return dynamics.CLASSIC
    vals = _parse_float_list(spec)
    if len(vals) != 3:
        raise InvalidParamsError(f"lorenz spec needs 'classic' or sigma,r,b; got {spec!r}")
    return dynamics.LorenzParams(sigma=vals[0], r=vals[1], b=vals[2])


def _parse_coupling(spec: str, dim: int) -> dynamics.CouplingMatrix:
    if spec == "identity":
        return dynamics.identity_coupling(dim)
    vals = _parse_float_list(spec)
    if len(vals) != dim * dim:
        raise InvalidParamsError(f"coupling matrix needs {dim * dim} entries, got {len(vals)}")
    return dynamics.coupling_matrix(np.array(vals).reshape(dim, dim))


def _parse_float_list(spec: str) -> list[float]:
    try:
        if ":" in spec:
            lo, hi, step = (float(v) for v in spec.split(":"))
            if step <= 0.0 or hi < lo:
                raise InvalidParamsError(f"bad range {spec!r}")
            count = int(round((hi - lo) / step))
            return [lo + k * step for k in range(count + 1) if lo + k * step <= hi + 1e-12]
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidParamsError(f"bad numeric list {spec!r}") from exc


def _parse_window(spec: str) -> tuple[float, float]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise InvalidParamsError(f"window must be lo:hi, got {spec!r}")
    return float(parts[0]), float(parts[1])


def _parse_edge(spec: str) -> tuple[int, int]:
    parts = spec.split(":")
    if len(parts) != 2:
        raise InvalidParamsError(f"edge must be i:j, got {spec!r}")
    return int(parts[0]), int(parts[1])


def spread_initial_conditions(base, n: int, spread: float) -> np.ndarray:
    """Deterministic stacked initial state: vertex k sits at
    base + (k/(n-1)) * spread along the unit direction (-1, 1, 0, ...)/sqrt(2),
    so the extreme vertices are exactly ``spread`` apart."""
    base = np.asarray(base, dtype=float)
    m = base.size
    direction = np.zeros(m)
    direction[0] = -1.0
    if m > 1:
        direction[1] = 1.0
    direction /= np.sqrt((direction * direction).sum())
    blocks = [base + (spread * k / max(n - 1, 1)) * direction for k in range(n)]
    return np.concatenate(blocks)


def _build_system(resolved: dict) -> tuple[netsim.NetworkSystem, dynamics.LorenzParams]:
    g = _load_graph(resolved)
    params = _parse_lorenz(resolved["lorenz"])
    field = dynamics.lorenz_field(params)
    h = _parse_coupling(resolved["H"], field.dim)
    sys_ = netsim.NetworkSystem(graph=g, field=field, h=h,
                                alpha=float(resolved.get("alpha", 0.0)))
    return sys_, params


def _write_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


def _echo_meta(resolved: dict, out_path: Path) -> None:
    meta_path = out_path.with_suffix(out_path.suffix + ".meta.json")
    meta_path.write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n")


def _out_path(resolved: dict, default_name: str) -> Path:
    if resolved.get("out"):
        return Path(resolved["out"])
    if resolved.get("default_out"):
        DEFAULT_OUT_DIR.mkdir(parents=True, exist_ok=True)
        return DEFAULT_OUT_DIR / default_name
    raise InvalidParamsError("an output path is required (--out or --default-out)")


def _resolve(args: argparse.Namespace, file_config: dict, defaults: dict) -> dict:
    """explicit flag > --config file value > built-in default."""
    resolved = dict(defaults)
    for key in defaults:
        if key in file_config and file_config[key] is not None:
            resolved[key] = file_config[key]
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _cmd_spectrum(args, file_config) -> int:
    resolved = _resolve(args, file_config, {
        "command": "spectrum", "graph": None, "graph_file": None, "seed": None,
        "cap": graphs.SPECTRUM_MAX_VERTICES, "out": None,
    })
    g = _load_graph(resolved)
    decomp = graphs.spectrum(g, cap=int(resolved["cap"]))
    vals = " ".join(f"{v:.10g}" for v in decomp.eigenvalues)
    lines = [vals]
    spec = resolved.get("graph") or ""
    kind = spec.split(":")[0].lower() if spec else ""
    if kind in _REGULAR_KINDS:
        analytic = graphs.lambda2_analytic(_REGULAR_KINDS[kind], g.n)
        match = "match" if abs(decomp.eigenvalues[1] - analytic) <= 1e-9 else "MISMATCH"
        lines.append(f"analytic lambda2: {analytic:.10g} ({match})")
    text = "\n".join(lines)
    if resolved["out"]:
        out = Path(resolved["out"])
        out.write_text(text + "\n")
        _echo_meta(resolved, out)
    print(text)
    return 0


def _cmd_critical(args, file_config) -> int:
    resolved = _resolve(args, file_config, {
        "command": "critical", "graph": None, "graph_file": None, "seed": None,
        "lorenz": "classic", "H": "identity", "grid_points": dynamics.BETA_GRID_POINTS,
        "out": None,
    })
    g = _load_graph(resolved)
    params = _parse_lorenz(resolved["lorenz"])
    h = _parse_coupling(resolved["H"], 3)
    report = stability.alpha_c_general(g, params, h, grid_points=int(resolved["grid_points"]))
    _write_json(report.to_json_dict(), resolved["out"])
    if resolved["out"]:
        _echo_meta(resolved, Path(resolved["out"]))
    return 0


def _cmd_simulate(args, file_config) -> int:
    resolved = _resolve(args, file_config, {
        "command": "simulate", "graph": None, "graph_file": None, "seed": None,
        "lorenz": "classic", "H": "identity", "alpha": 0.0,
        "dt": netsim.DEFAULT_DT, "tmax": 100.0, "ic": "-7,10,5", "ic_spread": 0.0,
        "save_stride": 10, "out": None, "default_out": False,
    })
    sys_, _ = _build_system(resolved)
    base = _parse_float_list(resolved["ic"]) if isinstance(resolved["ic"], str) else resolved["ic"]
    if len(base) != sys_.dim:
        raise InvalidParamsError(f"initial state needs {sys_.dim} components")
    x0 = spread_initial_conditions(base, sys_.n, float(resolved["ic_spread"]))
    steps = int(round(float(resolved["tmax"]) / float(resolved["dt"])))
    traj = netsim.rk4_integrate(sys_, x0, float(resolved["dt"]), steps,
                                save_stride=int(resolved["save_stride"]))
    out = _out_path(resolved, "simulate.csv")
    netsim.write_trajectory_csv(traj, out)
    _echo_meta(resolved, out)
    if sys_.n >= 2:
        print(f"final_sync_error={diagnostics.final_sync_error(traj):.10g}")
    print(f"wrote {out}")
    return 0


def _sim_config(resolved: dict) -> diagnostics.SimConfig:
    window = resolved["window"]
    if isinstance(window, str):
        window = _parse_window(window)
    else:
        window = (float(window[0]), float(window[1]))
    return diagnostics.SimConfig(
        dt=float(resolved["dt"]),
        t_end=float(resolved["tmax"]),
        window=window,
        save_stride=int(resolved["save_stride"]),
    )


def _cmd_sweep(args, file_config) -> int:
    resolved = _resolve(args, file_config, {
        "command": "sweep", "graph": None, "graph_file": None, "seed": None,
        "lorenz": "classic", "H": "identity", "alphas": None,
        "dt": netsim.DEFAULT_DT, "tmax": diagnostics.DEFAULT_WINDOW[1],
        "window": f"{diagnostics.DEFAULT_WINDOW[0]}:{diagnostics.DEFAULT_WINDOW[1]}",
        "save_stride": 10, "ic": "-7,10,5", "ic_spread": 0.014,
        "workers": None, "out": None, "default_out": False,
    })
    if not resolved["alphas"]:
        raise InvalidParamsError("--alphas is required")
    sys_, _ = _build_system(resolved)
    alphas = (_parse_float_list(resolved["alphas"])
              if isinstance(resolved["alphas"], str) else list(resolved["alphas"]))
    base = _parse_float_list(resolved["ic"]) if isinstance(resolved["ic"], str) else resolved["ic"]
    x0 = spread_initial_conditions(base, sys_.n, float(resolved["ic_spread"]))
    workers = int(resolved["workers"]) if resolved["workers"] is not None else None
    result = diagnostics.alpha_sweep(sys_, alphas, x0, _sim_config(resolved),
                                     workers=workers, seed=resolved.get("seed"))
    out = _out_path(resolved, "sweep.csv")
    diagnostics.write_sweep_csv(result, out)
    _echo_meta(resolved, out)
    print(f"wrote {out}")
    return 0


def _cmd_colormap(args, file_config) -> int:
    resolved = _resolve(args, file_config, {
        "command": "colormap", "graph": None, "graph_file": None, "seed": None,
        "lorenz": "classic", "H": "identity", "alphas": None, "xis": None,
        "shape": None, "omega": None, "edge": "0:1",
        "dt": netsim.DEFAULT_DT, "tmax": diagnostics.DEFAULT_WINDOW[1],
        "window": f"{diagnostics.DEFAULT_WINDOW[0]}:{diagnostics.DEFAULT_WINDOW[1]}",
        "save_stride": 10, "ic": "-7,10,5", "ic_spread": 0.014,
        "workers": None, "out": None, "default_out": False,
    })
    for key in ("alphas", "xis", "shape"):
        if not resolved[key]:
            raise InvalidParamsError(f"--{key} is required")
    sys_, _ = _build_system(resolved)
    m = sys_.dim
    shape_vals = (_parse_float_list(resolved["shape"])
                  if isinstance(resolved["shape"], str) else list(resolved["shape"]))
    if len(shape_vals) != m * m:
        raise InvalidParamsError(f"--shape needs {m * m} entries")
    shape = np.array(shape_vals).reshape(m, m)
    alphas = (_parse_float_list(resolved["alphas"])
              if isinstance(resolved["alphas"], str) else list(resolved["alphas"]))
    xis = (_parse_float_list(resolved["xis"])
           if isinstance(resolved["xis"], str) else list(resolved["xis"]))
    edge = _parse_edge(resolved["edge"]) if isinstance(resolved["edge"], str) else tuple(resolved["edge"])
    base = _parse_float_list(resolved["ic"]) if isinstance(resolved["ic"], str) else resolved["ic"]
    x0 = spread_initial_conditions(base, sys_.n, float(resolved["ic_spread"]))
    omega = None if resolved["omega"] is None else float(resolved["omega"])
    workers = int(resolved["workers"]) if resolved["workers"] is not None else None
    result = diagnostics.colormap_sweep(sys_, alphas, xis, x0, shape, _sim_config(resolved),
                                        omega=omega, edge=edge, workers=workers,
                                        seed=resolved.get("seed"))
    out = _out_path(resolved, "colormap.csv")
    diagnostics.write_sweep_csv(result, out)
    diagnostics.write_sweep_pgm(result, out.with_suffix(".pgm"))
    _echo_meta(resolved, out)
    print(f"wrote {out} and {out.with_suffix('.pgm')}")
    return 0


def _cmd_persistence(args, file_config) -> int:
    resolved = _resolve(args, file_config, {
        "command": "persistence", "graph": None, "graph_file": None, "seed": None,
        "lorenz": "classic", "H": "identity", "alpha": None, "xi": None,
        "shape": None, "omega": None, "edge": "0:1", "general_eta": False,
        "grid_points": dynamics.BETA_GRID_POINTS, "out": None,
    })
    for key in ("alpha", "xi", "shape"):
        if resolved[key] is None:
            raise InvalidParamsError(f"--{key.replace('_', '-')} is required")
    g = _load_graph(resolved)
    params = _parse_lorenz(resolved["lorenz"])
    h = _parse_coupling(resolved["H"], 3)
    report = stability.alpha_c_general(g, params, h, grid_points=int(resolved["grid_points"]))
    shape_vals = (_parse_float_list(resolved["shape"])
                  if isinstance(resolved["shape"], str) else list(resolved["shape"]))
    if len(shape_vals) != 9:
        raise InvalidParamsError("--shape needs 9 entries")
    shape = np.array(shape_vals).reshape(3, 3)
    edge = _parse_edge(resolved["edge"]) if isinstance(resolved["edge"], str) else tuple(resolved["edge"])
    omega = None if resolved["omega"] is None else float(resolved["omega"])
    pert = netsim.Perturbation(i=edge[0], j=edge[1],
                               base=float(resolved["xi"]) * shape, omega=omega)
    pr = stability.persistence_bound(report, float(resolved["alpha"]), g, [pert],
                                     per_mode=not resolved["general_eta"])
    payload = report.to_json_dict() | pr.to_json_dict()
    _write_json(payload, resolved["out"])
    if resolved["out"]:
        _echo_meta(resolved, Path(resolved["out"]))
    return 0


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "critical": _cmd_critical,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "colormap": _cmd_colormap,
    "persistence": _cmd_persistence,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidParamsError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="netsync",
                     description="Synchronization analysis of diffusively coupled oscillator networks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--graph", help="kind:n | er:n:p | ws:n:k:p | ba:n:m")
        p.add_argument("--graph-file", dest="graph_file", help="edge-list file")
        p.add_argument("--seed", type=int, help="seed for random graph models")
        p.add_argument("--config", help="JSON file of defaults (a .meta.json echo)")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("spectrum", help="Laplacian eigenvalues with analytic cross-check")
    common(p)
    p.add_argument("--cap", type=int, help="max vertex count")

    p = sub.add_parser("critical", help="critical coupling report (JSON)")
    common(p)
    p.add_argument("--lorenz", help="classic | sigma,r,b")
    p.add_argument("--H", help="identity | m*m entries")
    p.add_argument("--grid-points", dest="grid_points", type=int)

    p = sub.add_parser("simulate", help="integrate the network, write trajectory CSV")
    common(p)
    p.add_argument("--lorenz", help="classic | sigma,r,b")
    p.add_argument("--H", help="identity | m*m entries")
    p.add_argument("--alpha", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--ic", help="base state, comma separated")
    p.add_argument("--ic-spread", dest="ic_spread", type=float,
                   help="distance between extreme vertex states")
    p.add_argument("--save-stride", dest="save_stride", type=int)
    p.add_argument("--default-out", dest="default_out", action="store_const", const=True,
                   help="write under ./out/")

    p = sub.add_parser("sweep", help="alpha sweep of time-averaged sync error (CSV)")
    common(p)
    p.add_argument("--lorenz", help="classic | sigma,r,b")
    p.add_argument("--H", help="identity | m*m entries")
    p.add_argument("--alphas", help="comma list or lo:hi:step")
    p.add_argument("--dt", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--window", help="lo:hi averaging window")
    p.add_argument("--save-stride", dest="save_stride", type=int)
    p.add_argument("--ic", help="base state")
    p.add_argument("--ic-spread", dest="ic_spread", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--default-out", dest="default_out", action="store_const", const=True)

    p = sub.add_parser("colormap", help="(alpha, xi) perturbation grid (CSV + PGM)")
    common(p)
    p.add_argument("--lorenz", help="classic | sigma,r,b")
    p.add_argument("--H", help="identity | m*m entries")
    p.add_argument("--alphas", help="comma list or lo:hi:step")
    p.add_argument("--xis", help="comma list or lo:hi:step")
    p.add_argument("--shape", help="m*m entries of the perturbation shape")
    p.add_argument("--omega", type=float, help="cosine modulation frequency")
    p.add_argument("--edge", help="perturbed edge i:j (default 0:1)")
    p.add_argument("--dt", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--window", help="lo:hi averaging window")
    p.add_argument("--save-stride", dest="save_stride", type=int)
    p.add_argument("--ic", help="base state")
    p.add_argument("--ic-spread", dest="ic_spread", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--default-out", dest="default_out", action="store_const", const=True)

    p = sub.add_parser("persistence", help="persistence bound report (JSON)")
    common(p)
    p.add_argument("--lorenz", help="classic | sigma,r,b")
    p.add_argument("--H", help="identity | m*m entries")
    p.add_argument("--alpha", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--shape", help="9 entries of the perturbation shape")
    p.add_argument("--omega", type=float)
    p.add_argument("--edge", help="perturbed edge i:j")
    p.add_argument("--general-eta", dest="general_eta", action="store_const", const=True,
                   help="use the full eta = alpha*lambda2*mu1 - beta")
    p.add_argument("--grid-points", dest="grid_points", type=int)

    return parser


def run(argv) -> int:
    """Parse argv and execute; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        file_config = {}
        if getattr(args, "config", None):
            file_config = json.loads(Path(args.config).read_text())
            if not isinstance(file_config, dict):
                raise InvalidParamsError(f"config file {args.config} must hold a JSON object")
        return _COMMANDS[args.command](args, file_config)
    except NumericalError as exc:
        print(f"netsync: numerical failure: {exc}", file=sys.stderr)
        return 2
    except NetsyncError as exc:
        print(f"netsync: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
