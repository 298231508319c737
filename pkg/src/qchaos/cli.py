"""``qchaos`` command line.

Every run writes its data files plus ``manifest.json`` into ``--out``.
Invalid input exits with status 2 and internal failures with 1.
"""

from __future__ import annotations

import os

_threads = os.environ.get("QCHAOS_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse  # noqa: E402
import json  # noqa: E402
import math  # noqa: E402
import platform  # noqa: E402
import sys  # noqa: E402
import time  # noqa: E402
import traceback  # noqa: E402
from dataclasses import asdict, dataclass, field  # noqa: E402
from pathlib import Path  # noqa: E402

import numpy as np  # noqa: E402
import scipy  # noqa: E402
from scipy.optimize import brentq  # noqa: E402

from . import __version__  # noqa: E402
from . import analytic_spectra as AS  # noqa: E402
from . import billiard as BL  # noqa: E402
from . import geometry as G  # noqa: E402
from . import numeric_spectra as NS  # noqa: E402
from . import qe_diagnostics as QE  # noqa: E402
from . import quantization as Q  # noqa: E402
from . import spectral_stats as SS  # noqa: E402
from .errors import QChaosError  # noqa: E402
from .tables import csv_text, dumps, mode_table_csv, write  # noqa: E402

COMMANDS = ("billiard", "spectrum", "weyl", "spacing", "quantize-check", "egorov", "qe", "bounce")


class UsageError(QChaosError, ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int
    out: Path
    formats: tuple[str, ...]
    outputs: list[str] = field(default_factory=list)

    def emit(self, name: str, text: str) -> None:
        ext = name.rsplit(".", 1)[-1]
        if ext in ("csv", "json") and ext not in self.formats:
            return
        write(self.out / name, text)
        self.outputs.append(name)


# ---------------------------------------------------------------- argument helpers

def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _vertices(text: str):
    try:
        pts = [tuple(float(c) for c in v.split(",")) for v in str(text).split(";")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("vertices look like 'x,y;x,y;x,y'") from exc
    if len(pts) != 3 or any(len(p) != 2 for p in pts):
        raise argparse.ArgumentTypeError("a triangle needs three 'x,y' vertices")
    return pts


def _add_domain(p: argparse.ArgumentParser, default: str = "bunimovich") -> None:
    g = p.add_argument_group("domain")
    g.add_argument("--domain", default=default,
                   choices=["rectangle", "disk", "bunimovich", "stadium", "sinai", "triangle"])
    g.add_argument("--a", type=float, default=1.0, help="rectangle width")
    g.add_argument("--b", type=float, default=1.0, help="rectangle height")
    g.add_argument("--r", type=float, default=1.0, help="disk or stadium cap radius")
    g.add_argument("--w", type=float, default=2.0, help="stadium straight length")
    g.add_argument("--t", type=float, default=1.0, help="Bunimovich aspect ratio")
    g.add_argument("--side", type=float, default=180.0, help="Sinai table side")
    g.add_argument("--r-inner", type=float, default=30.0, help="Sinai obstacle radius")
    g.add_argument("--vertices", type=_vertices, default=None, help="triangle 'x,y;x,y;x,y'")


def _domain(ns) -> G.Domain:
    kind = ns.domain
    if kind == "rectangle":
        return G.rectangle(ns.a, ns.b)
    if kind == "disk":
        return G.disk(ns.r)
    if kind == "bunimovich":
        return G.bunimovich(ns.t)
    if kind == "stadium":
        return G.stadium(ns.w, 2 * ns.r, ns.r)
    if kind == "sinai":
        return G.sinai(ns.side, ns.r_inner)
    if ns.vertices is None:
        raise UsageError("--vertices is required for a triangle")
    return G.triangle(ns.vertices)


def _add_mps(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("particular-solutions solver")
    g.add_argument("--sector", default="odd-odd", choices=list(NS.SECTORS))
    g.add_argument("--B", type=int, default=120)
    g.add_argument("--Mb", type=int, default=360)
    g.add_argument("--Mi", type=int, default=150)
    g.add_argument("--threshold", type=float, default=None)
    g.add_argument("--scan-step", type=float, default=None)
    g.add_argument("--polish", default="auto", choices=["auto", "mfs", "off"])


def _mps_cfg(ns, d: G.Domain) -> NS.MPSConfig:
    sector = ns.sector if d.preset in NS.STADIUM_PRESETS else "none"
    return NS.MPSConfig(B=ns.B, M_b=ns.Mb, M_i=ns.Mi, threshold=ns.threshold,
                        scan_step=ns.scan_step, sector=sector, seed=ns.seed, polish=ns.polish)


# ---------------------------------------------------------------- subcommands

def cmd_billiard(ns, rc: RunConfig) -> dict:
    d = _domain(ns)
    rng = np.random.default_rng(ns.seed)
    if ns.s0 is not None:
        start = BL.state_from_boundary(d, ns.s0, ns.alpha)
    else:
        start = BL.random_state(d, rng)
    traj = BL.trace_length(d, start, ns.length) if ns.length else BL.trace(d, start, ns.collisions)
    rc.emit("collisions.csv", traj.to_csv())
    summary = {"domain": d.to_dict(), "start": {"position": list(start.position),
                                                "direction": list(start.direction)},
               "collisions": len(traj.records), "corner": traj.corner}
    if ns.growth_eps:
        fit = BL.separation_growth(d, start, ns.growth_eps, ns.growth_n)
        summary["growth"] = {"model": fit.model, "slope": fit.slope, "rate": fit.rate,
                             "r2_linear": fit.r2_linear, "r2_exponential": fit.r2_exponential,
                             "saturated_at": fit.saturated_at,
                             "separations": list(fit.separations)}
    rc.emit("billiard.json", dumps(summary))
    return summary


def _analytic_pairs(d: G.Domain, lo: float, hi: float):
    if d.preset == "rectangle":
        lam, _ = AS.rectangle_eigenvalues(d.params["a"], d.params["b"], "dirichlet", hi)
        pairs = AS.rectangle_modes(d.params["a"], d.params["b"], "dirichlet", max(1, len(lam)))
    elif d.preset == "disk":
        rows = AS.disk_eigenvalues(hi, d.params["r"])
        pairs = AS.disk_modes(max(1, sum(r[3] for r in rows)), d.params["r"])
    else:
        return None
    return [p for p in pairs if lo <= p.eigenvalue <= hi]


def cmd_spectrum(ns, rc: RunConfig) -> dict:
    d = _domain(ns)
    method = ns.method
    if method == "auto":
        method = "analytic" if d.preset in ("rectangle", "disk") else "mps"
    if method == "analytic":
        pairs = _analytic_pairs(d, ns.lmin, ns.lmax)
        if pairs is None:
            raise UsageError(f"no closed-form spectrum for {d.preset}")
        spec = SS.SpectrumWindow(np.array([p.eigenvalue for p in pairs]), d.to_dict(),
                                 (ns.lmin, ns.lmax))
        raster_domain = d
        out = spec.to_dict()
    else:
        res = NS.mps_solve(d, (ns.lmin, ns.lmax), _mps_cfg(ns, d))
        pairs, spec = res.pairs, res.spectrum
        raster_domain = res.problem.domain
        out = res.to_dict(with_coeffs=True)
    rc.emit("spectrum.json", dumps(out))
    rc.emit("modes.csv", mode_table_csv(pairs))
    if ns.raster is not None:
        if not 0 <= ns.raster < len(pairs):
            raise UsageError(f"--raster index {ns.raster} outside 0..{len(pairs) - 1}")
        r = NS.eigenfunction_density(pairs[ns.raster], raster_domain, ns.nx, ns.ny)
        rc.emit(f"raster_{ns.raster}.txt", r.to_text())
    return {"levels": len(spec)}


def cmd_weyl(ns, rc: RunConfig) -> dict:
    if ns.sho:
        rows = []
        for h in ns.h:
            count = SS.sho_level_count(ns.dim, h, ns.energy)
            if ns.dim == 1:
                pred = SS.sho_weyl_prediction(1, h, ns.energy)
                vol = se = None
            else:
                half = math.sqrt(ns.energy) * 1.25
                est = SS.phase_volume(SS.quadratic_form, [(-half, half)] * (2 * ns.dim), 0.0,
                                      ns.energy, samples=ns.samples, seed=ns.seed)
                vol, se = est.volume, est.se
                pred = vol / (2 * math.pi * h) ** ns.dim
            rows.append({"h": h, "count": count, "prediction": pred,
                         "rel_error": abs(count - pred) / pred, "volume": vol, "volume_se": se})
        report = {"dim": ns.dim, "energy": ns.energy, "rows": rows}
        rc.emit("weyl.json", dumps(report))
        rc.emit("weyl.csv", csv_text(["h", "count", "prediction"],
                                      [[r["h"], r["count"], r["prediction"]] for r in rows]))
        return report
    d = _domain(ns)
    pairs = None
    if d.preset == "rectangle":
        lam, _ = AS.rectangle_eigenvalues(d.params["a"], d.params["b"], "dirichlet", ns.lmax)
    elif d.preset == "disk":
        lam = np.array([r[0] for r in AS.disk_eigenvalues(ns.lmax, d.params["r"])
                        for _ in range(r[3])])
    else:
        res = NS.mps_solve(d, (ns.lmin, ns.lmax), _mps_cfg(ns, d))
        lam = res.spectrum.eigenvalues
        pairs = res
    if pairs is None:
        fit = SS.weyl_fit(lam, d)
    else:
        fit = SS.weyl_fit(lam, area=pairs.problem.domain.area,
                          perimeter=pairs.problem.weyl_perimeter)
    spec = SS.SpectrumWindow(lam, d.to_dict())
    rc.emit("weyl.json", dumps(fit.to_dict()))
    rc.emit("staircase.csv", spec.staircase_csv())
    return fit.to_dict()


def cmd_spacing(ns, rc: RunConfig) -> dict:
    if ns.synthetic:
        rng = np.random.default_rng(ns.seed)
        s = rng.exponential(size=ns.levels) if ns.synthetic == "poisson" else \
            np.sqrt(-4 * np.log(1 - rng.uniform(size=ns.levels)) / math.pi)
        sample = SS.spacing_sample(s)
    else:
        d = _domain(ns)
        if d.preset == "rectangle":
            a, b = d.params["a"], d.params["b"]
            lmax = 4 * math.pi * ns.levels / (a * b) * 1.2 + 100
            lam, _ = AS.rectangle_eigenvalues(a, b, "dirichlet", lmax)
            lam = lam[: ns.levels]
            sample = SS.unfold(lam, d)
        else:
            res = NS.mps_solve(d, (ns.lmin, ns.lmax), _mps_cfg(ns, d))
            fit = SS.weyl_fit(res.spectrum, area=res.problem.domain.area,
                              perimeter=res.problem.weyl_perimeter)
            sample = SS.unfold(res.spectrum, fit=fit)
    verdict = SS.spacing_test(sample)
    rc.emit("spacing.json", dumps(verdict.to_dict()))
    rc.emit("ecdf.csv", sample.ecdf_csv())
    return verdict.to_dict()


def _moyal_pairs():
    return [(Q.gaussian_symbol(0.0, 0.0, 1.5, 1.2), Q.gaussian_symbol(0.5, -0.3, 1.5, 1.2)),
            (Q.gaussian_symbol(0.0, 0.0, 2.0, 1.2), Q.gaussian_symbol(0.5, 0.3, 1.5, 1.2))]


def quantize_report(checks) -> dict:
    """Run the discrete-calculus checks named in ``checks``."""
    out = {}
    hs = (0.2, 0.1, 0.05)
    if "identities" in checks:
        g = Q.GridSpec(256, 12.0, 0.1)
        a = Q.x_symbol(np.cos, lambda x: -np.sin(x))
        mats = [Q.quantize(a, g, t).matrix for t in (0.0, 0.5, 1.0)]
        tdef = max(float(np.max(np.abs(m - mats[0]))) for m in mats)
        herm = Q.quantize(Q.gaussian_symbol(0.3, -0.2, 1.0, 1.0), g).hermitian_defect()
        ccr = Q.canonical_commutator_defect(g)
        out["identities"] = {"t_independence": tdef, "hermitian_defect": herm,
                             "canonical_commutator": ccr,
                             "pass": tdef < 1e-10 and herm < 1e-10 and ccr < 1e-8}
    if "moyal" in checks:
        reps = []
        for a, b in _moyal_pairs():
            grids = [Q.GridSpec(int(128 * 0.2 / h), 12.0, h) for h in hs]
            reps.append(Q.moyal_order(a, b, grids).to_dict())
        out["moyal"] = reps
    if "commutator" in checks:
        grids = [Q.GridSpec(int(128 * 0.2 / h), 8 * math.pi, h) for h in hs]
        s = Q.x_symbol(np.sin, np.cos, "sin")
        p2 = Q.Symbol(lambda x, p: p * p + 0 * x, lambda x, p: 0 * x * p,
                      lambda x, p: 2 * p + 0 * x, None, True, "p^2")
        out["commutator"] = Q.commutator_check(s, p2, grids, band_fraction=0.8).to_dict()
    if "uncertainty" in checks:
        g = Q.GridSpec(512, 40.0, 1.0)
        rows = [Q.uncertainty_check(Q.gaussian_state(g, 0, 0, w * math.sqrt(g.h)), g).ratio
                for w in (0.5, 1.0, 2.0)]
        chirp = Q.gaussian_state(g) * np.exp(1j * g.x ** 3 / 10)
        out["uncertainty"] = {"gaussian_ratios": rows,
                              "chirp_ratio": Q.uncertainty_check(chirp, g).ratio}
    if "garding" in checks:
        grids = [Q.GridSpec(int(128 * 0.2 / h), 4 * math.pi, h) for h in hs]
        reps = {}
        for name, sym in garding_symbols().items():
            r = Q.garding_check(sym, grids, 1.0)
            reps[name] = {"h_list": r.h_list, "min_eigenvalues": r.min_eigenvalues,
                          "nondecreasing": r.nondecreasing}
        out["garding"] = reps
    return out


def garding_symbols() -> dict:
    return {
        "2+sin(x)": Q.x_symbol(lambda x: 2 + np.sin(x), np.cos, "2+sin"),
        "1+x^2/(1+x^2)": Q.x_symbol(lambda x: 1 + x * x / (1 + x * x),
                                    lambda x: 2 * x / (1 + x * x) ** 2, "1+x2"),
        "1+exp(-x^2-p^2)sin^2(x)": Q.Symbol(
            lambda x, p: 1 + np.exp(-x * x - p * p) * np.sin(x) ** 2, p_support=5.0,
            name="1+bump"),
    }


def cmd_quantize_check(ns, rc: RunConfig) -> dict:
    checks = ["identities", "moyal", "commutator", "uncertainty", "garding"] \
        if ns.check == "all" else [ns.check]
    rep = quantize_report(checks)
    rc.emit("quantize_check.json", dumps(rep))
    return rep


POTENTIALS = {
    "cos": (np.cos, lambda x: -np.sin(x)),
    "zero": (lambda x: np.zeros_like(np.asarray(x, dtype=float)),
             lambda x: np.zeros_like(np.asarray(x, dtype=float))),
}


def cmd_egorov(ns, rc: RunConfig) -> dict:
    V, dV = POTENTIALS[ns.V]
    h0 = max(ns.h)
    grids = [Q.GridSpec(int(round(ns.N_ref * h0 / h)), ns.L, h) for h in ns.h]
    a = Q.gaussian_symbol(0.0, 0.0, 1.0, 1.0)
    rep = Q.egorov_check(a, V, dV, grids, ns.time).to_dict()
    rc.emit("egorov.json", dumps(rep))
    return rep


def stadium_windows(d: G.Domain, starts, modes: int, cfg: NS.MPSConfig):
    """Solve at least ``modes`` consecutive levels from each start value.

    Each window ends where the sector Weyl count predicts ``modes`` levels plus
    a margin; a short window is re-solved with a larger margin.
    """
    pb = NS.MPSProblem(d, cfg)
    out = []
    for lo in starts:
        margin = 1.1 * modes + 3
        while True:
            hi = brentq(lambda lam: pb.predicted_count(lo, lam) - margin, lo, lo + 1e6)
            res = NS.mps_solve(d, (lo, hi), cfg)
            if len(res.pairs) >= modes:
                break
            margin += 0.3 * modes
        out.append(res)
    return out


def cmd_qe(ns, rc: RunConfig) -> dict:
    d = G.bunimovich(ns.t)
    cfg = NS.MPSConfig(sector=ns.sector, seed=ns.seed, polish=ns.polish)
    q = NS.desymmetrize(d)
    quad = G.quadrature(q, 96)
    rect, _ = QE.stadium_rect(q)
    A = QE.position_observable(QE.indicator_box(*rect), q, "rectangle part")
    windows = []
    for i, res in enumerate(stadium_windows(d, ns.starts, ns.modes, cfg)):
        pairs = res.pairs[: ns.modes]
        rep = QE.qe_variance(A, pairs, quad)
        rc.emit(f"qe_{i}.csv", rep.to_csv())
        windows.append(rep.to_dict())
    eps = [w["eps"] for w in windows]
    summary = {"windows": windows, "eps": eps,
               "eps_ratio_last_first": eps[-1] / eps[0] if eps and eps[0] > 0 else None}
    rc.emit("qe.json", dumps(summary))
    return summary


def cmd_bounce(ns, rc: RunConfig) -> dict:
    d = G.bunimovich(ns.t)
    res = NS.mps_solve(d, (ns.lmin, ns.lmax),
                       NS.MPSConfig(sector=ns.sector, seed=ns.seed, polish=ns.polish))
    rect, frac = QE.stadium_rect(d)
    rows = []
    for i, p in enumerate(res.pairs):
        r = NS.eigenfunction_raster(NS.sector_pair_on_stadium(p), d, ns.nx, ns.ny)
        sc = QE.bouncing_ball_score(r, rect, frac)
        rows.append([i, float(p.eigenvalue), sc.rect_mass, sc.concentration, int(sc.flagged)])
        if sc.flagged and ns.rasters:
            rc.emit(f"bounce_raster_{i}.txt", r.to_text())
    rc.emit("bounce.csv", csv_text(["mode", "lambda", "rect_mass", "concentration", "flagged"],
                                   rows))
    summary = {"modes": len(rows), "flagged": [r[0] for r in rows if r[4]],
               "rect_fraction": frac}
    rc.emit("bounce.json", dumps(summary))
    return summary


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qchaos", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qchaos {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=Path("qchaos_out"))
        p.add_argument("--format", default="csv,json", help="comma list from {csv,json}")
        p.add_argument("--config", type=Path, default=None, help="JSON file mirroring the flags")

    p = sub.add_parser("billiard", help="trace a billiard orbit")
    _add_domain(p)
    p.add_argument("--collisions", type=int, default=200)
    p.add_argument("--length", type=float, default=None, help="trace by path length instead")
    p.add_argument("--s0", type=float, default=None, help="start on the boundary at arclength s0")
    p.add_argument("--alpha", type=float, default=0.0, help="launch angle from the inward normal")
    p.add_argument("--growth-eps", type=float, default=None)
    p.add_argument("--growth-n", type=int, default=60)
    common(p)
    p.set_defaults(func=cmd_billiard)

    p = sub.add_parser("spectrum", help="Dirichlet eigenvalues in a window")
    _add_domain(p)
    _add_mps(p)
    p.add_argument("--method", default="auto", choices=["auto", "analytic", "mps"])
    p.add_argument("--lmin", type=float, default=1.0)
    p.add_argument("--lmax", type=float, default=100.0)
    p.add_argument("--raster", type=int, default=None, help="mode index to rasterise")
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("weyl", help="Weyl-law fit or oscillator level counts")
    _add_domain(p, "rectangle")
    _add_mps(p)
    p.add_argument("--lmin", type=float, default=1.0)
    p.add_argument("--lmax", type=float, default=1e4)
    p.add_argument("--sho", action="store_true", help="count oscillator levels instead")
    p.add_argument("--dim", type=int, default=1, choices=[1, 2])
    p.add_argument("--h", type=_floats, default=[0.05, 0.02, 0.01])
    p.add_argument("--energy", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=200_000)
    common(p)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("spacing", help="nearest-neighbour spacing statistics")
    _add_domain(p, "rectangle")
    _add_mps(p)
    p.add_argument("--levels", type=int, default=5000)
    p.add_argument("--lmin", type=float, default=1.0)
    p.add_argument("--lmax", type=float, default=720.0)
    p.add_argument("--synthetic", choices=["poisson", "goe"], default=None)
    common(p)
    p.set_defaults(func=cmd_spacing)

    p = sub.add_parser("quantize-check", help="discrete Weyl-calculus identities and rates")
    p.add_argument("--check", default="all",
                   choices=["all", "identities", "moyal", "commutator", "uncertainty", "garding"])
    common(p)
    p.set_defaults(func=cmd_quantize_check)

    p = sub.add_parser("egorov", help="quantum-classical propagation error versus h")
    p.add_argument("--V", default="cos", choices=sorted(POTENTIALS))
    p.add_argument("--t", dest="time", type=float, default=1.0)
    p.add_argument("--h", type=_floats, default=[0.2, 0.1, 0.05])
    p.add_argument("--L", type=float, default=4 * math.pi)
    p.add_argument("--N-ref", dest="N_ref", type=int, default=256)
    common(p)
    p.set_defaults(func=cmd_egorov)

    p = sub.add_parser("qe", help="expectation-value variance over stadium windows")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--sector", default="odd-odd", choices=list(NS.SECTORS[1:]))
    p.add_argument("--starts", type=_floats, default=[50.0, 250.0, 1250.0])
    p.add_argument("--modes", type=int, default=50)
    p.add_argument("--polish", default="auto", choices=["auto", "mfs", "off"])
    common(p)
    p.set_defaults(func=cmd_qe)

    p = sub.add_parser("bounce", help="bouncing-ball scores of stadium modes")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--sector", default="odd-odd", choices=list(NS.SECTORS[1:]))
    p.add_argument("--lmin", type=float, default=1.0)
    p.add_argument("--lmax", type=float, default=300.0)
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=64)
    p.add_argument("--rasters", action="store_true", help="write rasters of flagged modes")
    p.add_argument("--polish", default="auto", choices=["auto", "mfs", "off"])
    common(p)
    p.set_defaults(func=cmd_bounce)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    ns = parser.parse_args(argv)
    if ns.config is None:
        return ns
    try:
        cfg = json.loads(Path(ns.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {ns.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    known = set(vars(ns))
    unknown = sorted(k for k in (key.replace("-", "_") for key in cfg) if k not in known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    # Command-line flags take precedence over the file.
    sub = parser._subparsers._group_actions[0].choices[ns.command]
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    ns = parser.parse_args(argv)
    for key in ("out", "config"):
        if isinstance(getattr(ns, key), str):
            setattr(ns, key, Path(getattr(ns, key)))
    if isinstance(getattr(ns, "h", None), str):
        ns.h = _floats(ns.h)
    return ns


def _jsonable_params(ns) -> dict:
    out = {}
    for k, v in sorted(vars(ns).items()):
        if k in ("func",):
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    return out


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"qchaos: error: {exc}", file=sys.stderr)
        return 2
    formats = tuple(f.strip() for f in str(ns.format).split(",") if f.strip())
    if not formats or any(f not in ("csv", "json") for f in formats):
        print("qchaos: error: --format takes a comma list from {csv,json}", file=sys.stderr)
        return 2
    rc = RunConfig(ns.command, _jsonable_params(ns), ns.seed, Path(ns.out), formats)
    t0 = time.perf_counter()
    status, error = 0, None
    try:
        ns.func(ns, rc)
    except (QChaosError, ValueError) as exc:
        status, error = 2, f"{type(exc).__name__}: {exc}"
    except Exception as exc:  # noqa: BLE001
        status, error = 1, f"{type(exc).__name__}: {exc}"
        traceback.print_exc()
    manifest = {
        "command": ns.command,
        "config": rc.params,
        "seed": ns.seed,
        "versions": {"qchaos": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "timings": {"total_s": time.perf_counter() - t0,
                    "finished": time.strftime("%Y-%m-%dT%H:%M:%S")},
        "threads": os.environ.get("QCHAOS_THREADS"),
        "outputs": rc.outputs,
        "status": status,
        "error": error,
    }
    try:
        write(rc.out / "manifest.json", dumps(manifest))
    except OSError as exc:
        print(f"qchaos: error: cannot write manifest: {exc}", file=sys.stderr)
        return 2 if status == 0 else status
    if error:
        print(f"qchaos: error: {error}", file=sys.stderr)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
