"""Fitted Zitterbewegung frequency and amplitude against the closed forms, over p0.

    python scripts/zb_sweep.py --eta 0.05 --omega 0.5 --p0 0 0.25 0.5 1 --csv sweep.csv
"""
import argparse
import csv

from iondirac.analysis import fit_trajectory, position_series, predict_zb, zb_time_grid
from iondirac.hamiltonian import ModelParams, dirac_1p1
from iondirac.states import WavepacketSpec, momentum_wavepacket


def sweep(params, momenta, sigma_p=None):
    h = dirac_1p1(params)
    rows = []
    for p0 in momenta:
        pred = predict_zb(params, p0)
        psi = momentum_wavepacket(h.space, WavepacketSpec(p0=p0, sigma_p=sigma_p), 0, params.delta, params.hbar)
        series = position_series(h, psi, zb_time_grid(pred.omega_zb), params)
        fit = fit_trajectory(series, "x")
        rows.append({
            "p0": p0,
            "omega_pred": pred.omega_zb,
            "omega_fit": fit.frequency,
            "r_pred": pred.r_zb,
            "r_fit": fit.amplitude,
            "drift": fit.slope,
            "leakage": series.max_leakage,
        })
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=0.05)
    ap.add_argument("--omega", type=float, default=0.5)
    ap.add_argument("--n-max", type=int, default=40)
    ap.add_argument("--sigma-p", type=float, default=None)
    ap.add_argument("--p0", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    params = ModelParams(eta=args.eta, omega=args.omega, n_max=(args.n_max,), mass_axis="y")
    rows = sweep(params, args.p0, args.sigma_p)
    print(f"{'p0':>6} {'omega_pred':>11} {'omega_fit':>11} {'R_pred':>9} {'R_fit':>9} {'leakage':>9}")
    for r in rows:
        print(f"{r['p0']:6.3f} {r['omega_pred']:11.5f} {r['omega_fit']:11.5f} "
              f"{r['r_pred']:9.5f} {r['r_fit']:9.5f} {r['leakage']:9.1e}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)


if __name__ == "__main__":
    main()
