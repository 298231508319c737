"""Variance of rectangle-part expectation values over stadium windows, plus bouncing-ball flags.

    python scripts/qe_windows.py --starts 50,250,1250 --modes 50
"""

import argparse

from qchaos import geometry as G
from qchaos import numeric_spectra as NS
from qchaos import qe_diagnostics as QE
from qchaos.cli import stadium_windows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", default="50,250,1250")
    ap.add_argument("--modes", type=int, default=50)
    ap.add_argument("--t", type=float, default=1.0)
    args = ap.parse_args()

    d = G.bunimovich(args.t)
    starts = [float(s) for s in args.starts.split(",")]
    windows = stadium_windows(d, starts, args.modes, NS.MPSConfig(sector="odd-odd"))
    q = windows[0].problem.domain
    quad = G.quadrature(q, 96)
    rect, frac = QE.stadium_rect(q)
    A = QE.ObservableSpec(QE.indicator_box(*rect), alpha=frac)
    full_rect, full_frac = QE.stadium_rect(d)
    for w in windows:
        modes = w.pairs[: args.modes]
        rep = QE.qe_variance(A, modes, quad)
        flagged = []
        for p in modes:
            ras = NS.eigenfunction_raster(NS.sector_pair_on_stadium(p), d, 128, 64)
            sc = QE.bouncing_ball_score(ras, full_rect, full_frac)
            if sc.flagged:
                flagged.append(f"{p.eigenvalue:.2f} ({sc.concentration:.2f})")
        lo, hi = rep.window
        print(f"[{lo:8.2f}, {hi:8.2f}]  eps {rep.eps:.5f}  density {rep.split.density:.3f}  "
              f"flagged: {', '.join(flagged) or '-'}")


if __name__ == "__main__":
    main()
