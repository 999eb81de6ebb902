"""Welch spectra of white noise and of OU noise with a Lorentzian fit."""
import argparse

from delaynoise.experiments import (
    band_flatness,
    fit_lorentzian,
    ou_series,
    spectrum_periodogram,
    white_noise_series,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau", type=float, default=5.0)
    ap.add_argument("--segments", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    n = 4096 * (args.segments + 1) // 2

    h = 0.05
    omega, power = spectrum_periodogram(white_noise_series(args.seed, n, h), h)
    print(f"white noise: band max/min ratio {band_flatness(omega, power):.3f}")

    h = args.tau / 20
    omega, power = spectrum_periodogram(ou_series(args.seed, n, h, args.tau), h)
    p0, corner = fit_lorentzian(omega, power, omega_max=10 / args.tau)
    print(f"OU tau={args.tau:g}: fitted corner {corner:.4f} (1/tau = {1 / args.tau:.4f}), plateau {p0:.4f}")


if __name__ == "__main__":
    main()
