"""Figure rendering for the CLI report paths (written next to the data files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .treesim import _restricted_tail_sums, theoretical_tail_sum_cdf

__all__ = ["save_sweep_figure", "save_density_figure"]


def save_sweep_figure(rows, path) -> None:
    """Plot the trace curves and the trace advantage of a sweep.

    ``rows`` are (alpha1, trace_nd, trace_dm, advantage) tuples as emitted in
    the sweep CSV.
    """
    data = np.asarray(rows, dtype=float)
    fig, (ax_traces, ax_adv) = plt.subplots(
        2, 1, figsize=(6.4, 6.4), sharex=True, constrained_layout=True
    )
    ax_traces.plot(data[:, 0], data[:, 1], "o-", label="star (rank 1) trace")
    ax_traces.plot(data[:, 0], data[:, 2], "s-", label="rank n-1 trace")
    ax_traces.set_ylabel("trace")
    ax_traces.legend()
    ax_adv.plot(data[:, 0], data[:, 3], "o-", color="tab:red")
    ax_adv.set_xlabel(r"$|\alpha_1|$")
    ax_adv.set_ylabel("trace advantage")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_density_figure(n: int, trials: int, seed: int, path) -> None:
    """Plot the empirical CDF of the restricted tail sums against t^(n-1)."""
    sample = _restricted_tail_sums(n, trials, seed)
    grid = np.linspace(0.0, 1.0, 256)
    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    if sample.size:
        ax.step(
            sample,
            np.arange(1, sample.size + 1) / sample.size,
            where="post",
            label=f"empirical ({sample.size} kept)",
        )
    ax.plot(
        grid,
        theoretical_tail_sum_cdf(grid, n),
        "--",
        color="tab:orange",
        label=rf"$t^{{{n - 1}}}$",
    )
    ax.set_xlabel("restricted tail sum")
    ax.set_ylabel("CDF")
    ax.legend()
    fig.savefig(path, dpi=150)
    plt.close(fig)
