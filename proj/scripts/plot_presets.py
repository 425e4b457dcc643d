#!/usr/bin/env python3
"""Plot preset CSVs written by catm_sim into PNG files next to them.

usage: plot_presets.py OUT_DIR
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def fig3(df, out):
    g = df.groupby(["rl_pdsch", "coupling_loss_db"])["user_experienced_throughput_bps"].mean()
    fig, ax = plt.subplots()
    for rl, s in g.groupby(level=0):
        ax.plot(s.index.get_level_values(1), s.values / 1e3, marker="o", label=f"PDSCH RL {rl}")
    ax.set_xlabel("coupling loss [dB]")
    ax.set_ylabel("user-experienced throughput [kbit/s]")
    ax.legend()
    fig.savefig(out)


def coverage(df, key, out):
    g = df.groupby([key, "coupling_loss_db"])["residual_bler"].mean()
    fig, ax = plt.subplots()
    for v, s in g.groupby(level=0):
        ax.semilogy(s.index.get_level_values(1), s.values.clip(1e-4), marker=".", label=f"{key} {v:g}")
    ax.axhline(0.02, color="k", lw=0.8, ls="--")
    ax.set_xlabel("coupling loss [dB]")
    ax.set_ylabel("residual BLER")
    ax.legend()
    fig.savefig(out)


def main():
    d = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
    plots = {
        "fig3.csv": lambda df, o: fig3(df, o),
        "fig4c.csv": lambda df, o: coverage(df, "p0_dbm", o),
        "fig4d.csv": lambda df, o: coverage(df, "initial_mcs", o),
    }
    for name, fn in plots.items():
        p = d / name
        if p.exists():
            out = p.with_suffix(".png")
            fn(pd.read_csv(p), out)
            print(f"wrote {out}")


if __name__ == "__main__":
    main()
