"""Physical Zitterbewegung scales for an ion simulation and for a free electron.

    python scripts/ion_scales.py --mass-u 25 --trap-mhz 1 --eta 0.05 --sideband-khz 100 --carrier-khz 50
"""
import argparse
import json

import numpy as np
from scipy.constants import atomic_mass

from iondirac.analysis import IonSpec, electron_prediction, si_convert
from iondirac.hamiltonian import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mass-u", type=float, default=25.0)
    ap.add_argument("--trap-mhz", type=float, default=1.0)
    ap.add_argument("--eta", type=float, default=0.05)
    ap.add_argument("--sideband-khz", type=float, default=100.0)
    ap.add_argument("--carrier-khz", type=float, default=50.0)
    args = ap.parse_args()

    params = ModelParams(eta=args.eta, omega=2 * np.pi * args.carrier_khz * 1e3,
                         omega_sb=2 * np.pi * args.sideband_khz * 1e3)
    ion = IonSpec(mass=args.mass_u * atomic_mass, trap_frequency=2 * np.pi * args.trap_mhz * 1e6)
    print(json.dumps(si_convert(params, ion), indent=2))
    e = electron_prediction()
    print(f"electron: omega_ZB = {e.omega_zb:.3e} rad/s, R_ZB = {e.r_zb:.3e} m")


if __name__ == "__main__":
    main()
