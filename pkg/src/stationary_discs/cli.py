"""Command-line interface: ``stationary-discs <command> model.json [options]``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import birkhoff, jets, modeldisc, rhsolver
from .circlefns import CircleError, circle_points, winding_number
from .polyalgebra import HermitianPolynomial, PolynomialError, load_polynomial

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3
LINEARIZATION_NF_CAP = 64


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    model: str
    theta: str | None = None
    nf: int = 256
    trials: int = 64
    seed: int = 0
    tol: float = 1e-9
    grid: str = "0"
    out: str | None = None
    v: str | None = None
    window: int = 8
    workers: int = 4
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {unknown}")
        cfg = cls(**data)
        if cfg.nf < 8:
            raise ConfigError("nf must be >= 8")
        if cfg.trials < 1:
            raise ConfigError("trials must be >= 1")
        if cfg.tol <= 0:
            raise ConfigError("tol must be positive")
        return cfg


# ---------------------------------------------------------------------------
# helpers


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    return obj


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"


def read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_model(path: str) -> HermitianPolynomial:
    data = read_json(path)
    try:
        return load_polynomial(data)
    except PolynomialError as exc:
        raise PolynomialError(f"{path}: {exc}") from exc


def parse_v(text: str | None, n: int):
    if text is None:
        return None
    try:
        parts = [complex(p.replace(" ", "").replace("i", "j")) for p in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse v={text!r}; use e.g. '1,0.5+0.2j'") from exc
    if len(parts) != n:
        raise ConfigError(f"v has {len(parts)} entries, model has n={n}")
    return np.array(parts)


def choose_v(P: HermitianPolynomial, cfg: RunConfig):
    v = parse_v(cfg.v, P.n)
    if v is not None:
        ok, cert = modeldisc.is_admissible(P, v, nf=cfg.nf)
        return v, ok, cert, None
    found = modeldisc.find_admissible(P, cfg.trials, cfg.seed, nf=cfg.nf)
    return found["v"], found["success"], found["certificate"], found["trial"]


def parse_grid(grid: str, dim: int) -> list[np.ndarray]:
    """``0``; ``axes:delta`` (plus/minus delta on each kernel axis); or a JSON file of coordinate lists."""
    if grid == "0":
        return [np.zeros(dim)]
    if grid.startswith("axes:"):
        delta = float(grid[5:])
        out = []
        for i in range(dim):
            for sgn in (1, -1):
                e = np.zeros(dim)
                e[i] = sgn * delta
                out.append(e)
        return out
    data = read_json(grid)
    pts = [np.asarray(p, float) for p in data]
    if any(p.shape != (dim,) for p in pts):
        raise ConfigError(f"grid points must have {dim} coordinates")
    return pts


def disc_v_list(v):
    return [[float(np.real(z)), float(np.imag(z))] for z in v]


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(cfg: RunConfig) -> tuple[dict, int]:
    P = load_model(cfg.model)
    v, ok, cert, trial = choose_v(P, cfg)
    rep = {"n": P.n, "weights": list(P.weight.m), "d": P.d, "k0": P.k0, "admissible": ok}
    if not ok:
        rep["reason"] = "Q^v vanishes on the boundary circle" if "vanish" in cert.get("reason", "") else cert.get("reason")
        rep["certificate"] = cert
        return rep, EXIT_OK
    rep["v"] = disc_v_list(v)
    rep["trial"] = trial
    bounds = jets.jet_bound(P, v, nf=cfg.nf)
    rep["indQ"] = bounds["indQ"]
    rep["l0_generic"] = bounds["generic"]
    rep["l0_refined"] = bounds["refined"]
    rep["N_upper"] = bounds["N_upper"]
    if "N_homogeneous_formula" in bounds:
        rep["N"] = bounds["N_homogeneous_formula"]
    for key in ("N_decoupled", "N_decoupled_literal", "blocks"):
        if key in bounds:
            rep[key] = bounds[key]
    if P.weight.even_system:
        system = rhsolver.linearize(P, v, min(cfg.nf, LINEARIZATION_NF_CAP))
        rep["kernel_dim"] = system.kernel_dim
        rep["kernel_gap"] = system.gap
        rep["l3_kernel_dim"] = system.l3_kernel_dim
    return rep, EXIT_OK


def cmd_find_admissible(cfg: RunConfig) -> tuple[dict, int]:
    P = load_model(cfg.model)
    found = modeldisc.find_admissible(P, cfg.trials, cfg.seed, nf=cfg.nf)
    rep = {"success": found["success"], "trial": found["trial"], "v": disc_v_list(found["v"]),
           "certificate": found["certificate"], "trials": cfg.trials, "seed": cfg.seed}
    return rep, EXIT_OK if found["success"] else EXIT_NUMERICAL


def _poly_json(f):
    s = f.support(1e-13 * max(f.norm(), 1e-300))
    if s is None:
        return {"low": 0, "coeffs": []}
    return {"low": s[0], "coeffs": [[c.real, c.imag] for c in f.coeffs[s[0] + f.nf: s[1] + f.nf + 1]]}


def cmd_levi(cfg: RunConfig) -> tuple[dict, int]:
    P = load_model(cfg.model)
    v, ok, cert, _ = choose_v(P, cfg)
    levi = modeldisc.levi_coefficients(P, v, cfg.nf)
    rep = {"v": disc_v_list(v), "admissible": ok, "certificate": cert,
           "Q": [[_poly_json(q) for q in row] for row in levi.Q],
           "S": [[_poly_json(s) for s in row] for row in levi.S],
           "detQ": _poly_json(levi.detQ), "Qprime": _poly_json(levi.Qprime)}
    if ok:
        rep["indQ"] = winding_number(levi.detQ)
        if P.weight.even_system:
            rep["detA_relative_error"] = rhsolver.det_A_error(P, v, min(cfg.nf, LINEARIZATION_NF_CAP))
    return rep, EXIT_OK


def cmd_indices(cfg: RunConfig) -> tuple[dict, int]:
    P = load_model(cfg.model)
    v, ok, cert, _ = choose_v(P, cfg)
    if not ok:
        return {"admissible": False, "reason": cert.get("reason")}, EXIT_NUMERICAL
    nf = min(cfg.nf, LINEARIZATION_NF_CAP)
    A = rhsolver.reduce_to_A(rhsolver.build_G(P, v, nf), P.weight.m, P.d)
    L = birkhoff.symbol(A)
    rep = birkhoff.report(L, cfg.window)
    rep["v"] = disc_v_list(v)
    rep["maslov_formula"] = 2 * winding_number(modeldisc.levi_coefficients(P, v, nf).detQ) - 2 * sum(P.weight.m)
    rep["max_index"] = max(rep["indices"])
    rep["min_index"] = min(rep["indices"])
    return rep, EXIT_OK


def cmd_jet_bound(cfg: RunConfig) -> tuple[dict, int]:
    P = load_model(cfg.model)
    v = parse_v(cfg.v, P.n)
    rep = jets.jet_bound(P, v, cfg.trials, cfg.seed, nf=min(cfg.nf, LINEARIZATION_NF_CAP))
    if rep.get("admissible") and P.weight.even_system:
        vv = np.array([complex(a, b) for a, b in rep["v"]])
        system = rhsolver.linearize(P, vv, min(cfg.nf, LINEARIZATION_NF_CAP), with_l3=False)
        rep["profile"] = jets.rank_profile(system.kernel_discs(), max(rep["refined"], 1) + 2)
    return rep, EXIT_OK


def _attach(cfg: RunConfig, with_theta: bool) -> tuple[dict, int]:
    P = load_model(cfg.model)
    v, ok, cert, _ = choose_v(P, cfg)
    if not ok:
        return {"admissible": False, "reason": cert.get("reason")}, EXIT_NUMERICAL
    nf = min(cfg.nf, LINEARIZATION_NF_CAP)
    system = rhsolver.linearize(P, v, nf, with_l3=False)
    model = modeldisc.ModelHypersurface(P)
    if with_theta and cfg.theta:
        try:
            surface = rhsolver.PerturbedHypersurface.from_json(model, read_json(cfg.theta))
        except PolynomialError as exc:
            raise PolynomialError(f"{cfg.theta}: {exc}") from exc
    else:
        surface = rhsolver.PerturbedHypersurface(model)
    grid = parse_grid(cfg.grid, system.kernel_dim)
    results = rhsolver.disc_family(surface, system, grid, workers=cfg.workers, tol=cfg.tol)
    discs, failed = [], False
    for item in results:
        entry = {"index": item["index"], "coords": item["coords"], "ok": item["ok"]}
        if item["ok"]:
            res = item["result"]
            entry.update(residual=res.residual, iterations=res.iterations, flags=res.flags,
                         center=[[c.real, c.imag] for c in res.disc.center()])
            if res.residual > cfg.tol or not all(res.flags):
                failed = True
        else:
            entry["error"] = item["error"]
            failed = True
        discs.append(entry)
    rep = {"v": disc_v_list(v), "kernel_dim": system.kernel_dim, "kernel_gap": system.gap, "nf": nf,
           "theta": surface.to_json(), "discs": discs}
    ok_discs = [r["result"].disc for r in results if r["ok"]]
    if len(ok_discs) > 1:
        dmin = min(a.distance(b) for i, a in enumerate(ok_discs) for b in ok_discs[i + 1:])
        rep["min_pairwise_distance"] = dmin
    if cfg.out:
        write_traces(Path(cfg.out).with_name(Path(cfg.out).stem + "_traces.csv"), results)
    return rep, EXIT_NUMERICAL if failed else EXIT_OK


def write_traces(path: Path, results, samples: int = 256) -> None:
    zeta = circle_points(samples)
    theta = 2 * np.pi * np.arange(samples) / samples
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["grid_index", "component", "theta", "re", "im"])
        for item in results:
            if not item["ok"]:
                continue
            vals = item["result"].disc.values(zeta)
            for k, row in enumerate(vals):
                for t, z in zip(theta, row):
                    w.writerow([item["index"], k, f"{t:.12g}", f"{z.real:.12g}", f"{z.imag:.12g}"])


def cmd_attach(cfg: RunConfig) -> tuple[dict, int]:
    return _attach(cfg, with_theta=True)


def cmd_family(cfg: RunConfig) -> tuple[dict, int]:
    rep, code = _attach(cfg, with_theta=False)
    if code == EXIT_OK and rep.get("discs"):
        P = load_model(cfg.model)
        v = np.array([complex(a, b) for a, b in rep["v"]])
        base = modeldisc.build_lift(P, v, nf=2 * min(cfg.nf, LINEARIZATION_NF_CAP))
        centers = []
        for a in (0.0, 0.1, -0.1, 0.1j, -0.1j):
            g = modeldisc.reparametrize(base, a, P.k0)
            centers.append({"a": [np.real(a), np.imag(a)], "center": [[c.real, c.imag] for c in g.center()]})
        rep["reparametrized_centers"] = centers
        if P.weight.homogeneous:
            rep["center_jacobian"] = modeldisc.center_jacobian(P, v, cfg.nf)
    return rep, code


COMMANDS = {
    "analyze": cmd_analyze,
    "find-admissible": cmd_find_admissible,
    "levi": cmd_levi,
    "indices": cmd_indices,
    "attach": cmd_attach,
    "jet-bound": cmd_jet_bound,
    "family": cmd_family,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stationary-discs", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("model", help="model polynomial JSON file")
    p.add_argument("theta", nargs="?", help="perturbation JSON file (attach only)")
    p.add_argument("--nf", type=int, default=256)
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--grid", default="0", help="'0', 'axes:DELTA' or a JSON file of kernel coordinates")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--v", help="comma separated complex vector, e.g. '1,0.5+0.2j'")
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--config", help="JSON file of RunConfig overrides")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = {k: v for k, v in vars(args).items() if k != "config"}
    if args.config:
        data.update(read_json(args.config))
    return RunConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report, code = COMMANDS[cfg.command](cfg)
    except (ConfigError, PolynomialError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (rhsolver.SolverError, modeldisc.DiscError, birkhoff.LoopError, birkhoff.IndexRecoveryError,
            birkhoff.FactorizationError, jets.JetError, CircleError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = dumps({"command": cfg.command, "config": {k: v for k, v in asdict(cfg).items() if k != "extra"},
                  "report": report})
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
