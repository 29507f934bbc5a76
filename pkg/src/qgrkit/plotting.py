"""Figure rendering for sweep tables and residual summaries.

Figures are written straight to files with the non-interactive Agg
backend; nothing here opens a window.  The CLI calls these alongside its
delimited outputs so every sweep ships with a plot of the uncertainty
budget and every verification can ship a residual chart.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .residuals import IdentityResidual

__all__ = ["plot_sweep", "plot_residuals"]

#: Floor used when drawing residuals of exactly zero on a log axis.
_LOG_FLOOR = 1e-18


def plot_sweep(rows: list[dict[str, float]], param_path: str, path: str) -> str:
    """Render the sweep summary to a two-panel PNG.

    Top panel: the uncertainty product, the accounting value, and the
    Robertson floor against the swept parameter.  Bottom panel: the
    magnitudes of the gap terms on a log axis.

    Returns the path written.
    """
    params = [row["param"] for row in rows]
    fig, (top, bottom) = plt.subplots(
        2, 1, figsize=(7.0, 6.5), sharex=True, constrained_layout=True
    )
    top.plot(params, [row["product"] for row in rows], "o-", label="sigma_x * sigma_p")
    top.plot(params, [row["qgr_value"] for row in rows], "s--", label="qgr value")
    top.plot(params, [row["robertson_C"] for row in rows], "^:", label="Robertson C")
    top.set_ylabel("uncertainty")
    top.legend(loc="best", fontsize=9)
    top.grid(True, alpha=0.3)

    for key, style in (("Theta", "o-"), ("Xi", "s--"), ("epsilon", "^:")):
        bottom.plot(
            params,
            [max(abs(row[key]), _LOG_FLOOR) for row in rows],
            style,
            label=f"|{key}|",
        )
    bottom.set_yscale("log")
    bottom.set_xlabel(param_path)
    bottom.set_ylabel("gap magnitude")
    bottom.legend(loc="best", fontsize=9)
    bottom.grid(True, alpha=0.3)

    fig.suptitle("Uncertainty budget along the sweep", fontsize=11)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_residuals(checks: list[IdentityResidual], path: str) -> str:
    """Render a horizontal bar chart of residuals against tolerances.

    Bars show ``log10`` of each relative residual (floored for exact
    zeros); tolerance markers show the budget each check was held to.
    Failing checks are drawn in red.

    Returns the path written.
    """
    names = [check.name for check in checks]
    values = [math.log10(max(check.rel_residual, _LOG_FLOOR)) for check in checks]
    budgets = [math.log10(max(check.tolerance, _LOG_FLOOR)) for check in checks]
    colors = ["#b22222" if not check.passed else "#2f6f4f" for check in checks]

    height = max(3.0, 0.24 * len(checks) + 1.2)
    fig, ax = plt.subplots(figsize=(8.5, height), constrained_layout=True)
    ypos = range(len(checks))
    ax.barh(ypos, [v - math.log10(_LOG_FLOOR) for v in values],
            left=math.log10(_LOG_FLOOR), color=colors, alpha=0.8)
    ax.plot(budgets, list(ypos), "k|", markersize=9, label="tolerance")
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(names, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("log10 relative residual")
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(True, axis="x", alpha=0.3)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
