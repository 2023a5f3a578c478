#!/usr/bin/env python3
"""Plot the CSV output of `thermostat run <preset>`.

    python3 scripts/plot_figures.py out/          # every preset directory found
    python3 scripts/plot_figures.py out/fig6      # one preset
"""
import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def relaxation(d, name):
    cmp = pd.read_csv(d / "comparison.csv")
    fig, ax = plt.subplots(1, 2, figsize=(10, 4))
    ax[0].plot(cmp.t, cmp.rho_11_exact, lw=0.8, label="exact")
    ax[0].plot(cmp.t, cmp.rho_11_ham, label="HAM")
    if "rho_11_born" in cmp:
        ax[0].plot(cmp.t, cmp.rho_11_born, "--", label="Born")
    ax[0].set_xlabel("t")
    ax[0].set_ylabel(r"$\rho_{11}$")
    ax[0].legend()
    ax[1].plot(cmp.t, cmp.abs_rho_01_sq_exact, lw=0.8, label="exact")
    ax[1].plot(cmp.t, cmp.abs_rho_01_sq_ham, label="HAM")
    ax[1].set_xlabel("t")
    ax[1].set_ylabel(r"$|\rho_{01}|^2$")
    ax[1].legend()
    fig.tight_layout()
    fig.savefig(d / f"{name}.png", dpi=120)


def fig8(d):
    tab = pd.read_csv(d / "fig8.csv").groupby("xi").median(numeric_only=True)
    fig, ax = plt.subplots()
    ax.plot(tab.index, tab.T_dec_fit, "o", label="exact, fitted")
    ax.plot(tab.index, tab.T_dec_theory, "-", label="HAM")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$T_{dec}$")
    ax.legend()
    fig.savefig(d / "fig8.png", dpi=120)


def fig9(d):
    tab = pd.read_csv(d / "fig9.csv")
    fig, ax = plt.subplots()
    ax.hist(tab.D, bins=20)
    ax.set_xlabel("D")
    fig.savefig(d / "fig9.png", dpi=120)


def fig10(d):
    tab = pd.read_csv(d / "fig10.csv").groupby("N").mean(numeric_only=True)
    fig, ax = plt.subplots()
    ax.loglog(tab.index, tab.D2, "o")
    ax.loglog(tab.index, tab.D2.iloc[0] * tab.index[0] / tab.index, "--", label="1/N")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$D^2$")
    ax.legend()
    fig.savefig(d / "fig10.png", dpi=120)


def plot(d):
    name = d.name
    if (d / "comparison.csv").exists():
        relaxation(d, name)
    elif name == "fig8":
        fig8(d)
    elif name == "fig9":
        fig9(d)
    elif name == "fig10":
        fig10(d)
    else:
        return
    print("plotted", d)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("path", type=pathlib.Path)
    args = ap.parse_args()
    dirs = [args.path] if (args.path / "manifest.txt").exists() else sorted(p for p in args.path.iterdir() if p.is_dir())
    for d in dirs:
        plot(d)


if __name__ == "__main__":
    main()
