"""Publication-style figures from a flow run time series.

Three figure types: semilog oscillation decay with a fitted rate,
energy traces (J and I on twin axes), and the maximum-principle envelope
of the trace field.  Output is PNG or SVG, chosen by the file extension.
Rendering is deterministic for identical input: fixed figure geometry,
hashed SVG ids, no embedded timestamps.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotcompanion"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .series import SeriesTable, load_series  # noqa: E402

FIGSIZE = (8.0, 5.0)

#: Oscillation samples at or below this floor are roundoff, not signal.
OSC_FLOOR = 1e-14

#: Minimum number of qualifying samples for a meaningful rate fit.
MIN_FIT_SAMPLES = 10


def fit_decay(t: np.ndarray, osc: np.ndarray):
    """Decay rate from a semilog line fit, or None when unfittable.

    Drops samples at the roundoff floor and fits only the final half of
    the qualifying samples.  Returns (eta, r_squared, intercept) with eta
    positive for decay; the intercept anchors the fitted line in figures.
    """
    keep = osc > OSC_FLOOR
    if int(np.count_nonzero(keep)) < MIN_FIT_SAMPLES:
        return None
    tq, yq = t[keep], np.log(osc[keep])
    half = len(tq) // 2
    tq, yq = tq[half:], yq[half:]
    slope, intercept = np.polyfit(tq, yq, 1)
    fitted = slope * tq + intercept
    ss_res = float(np.sum((yq - fitted) ** 2))
    ss_tot = float(np.sum((yq - np.mean(yq)) ** 2))
    scale = max(1.0, float(np.sum(yq ** 2)))
    if ss_tot <= 1e-20 * scale:
        r_squared = 1.0 if ss_res <= 1e-20 * scale else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return -float(slope), r_squared, float(intercept)


def _save(fig, out_path) -> None:
    out = str(out_path)
    if out.endswith(".svg"):
        # the SVG writer embeds a creation date unless told otherwise
        fig.savefig(out, metadata={"Date": None})
    elif out.endswith(".png"):
        fig.savefig(out)
    else:
        plt.close(fig)
        raise ValueError(f"unsupported output extension: {out} "
                         "(use .png or .svg)")
    plt.close(fig)


def _load(csv_path) -> SeriesTable:
    return load_series(csv_path)


def plot_decay(csv_path, out_path) -> None:
    """Semilog oscillation decay with the fitted rate in the legend."""
    table = _load(csv_path)
    t, osc = table["t"], table["osc_phidot"]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    shown = np.maximum(osc, OSC_FLOOR)  # keep the log axis finite
    ax.semilogy(t, shown, lw=1.2, color="tab:blue",
                label="oscillation of the flow speed")
    fit = fit_decay(t, osc)
    if fit is not None:
        eta, r2, intercept = fit
        ax.semilogy(t, np.exp(intercept - eta * t), "--", color="tab:red",
                    label=f"fit: rate {eta:.4g} (r$^2$={r2:.4f})")
    else:
        ax.plot([], [], " ", label="decay rate: n/a")
    ax.set_xlabel("t")
    ax.set_ylabel("sup - inf of dphi/dt")
    ax.set_title("Oscillation decay")
    ax.legend(loc="upper right")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, out_path)


def plot_functionals(csv_path, out_path) -> None:
    """J and I traces on twin axes."""
    table = _load(csv_path)
    t = table["t"]
    fig, ax_j = plt.subplots(figsize=FIGSIZE)
    ax_j.plot(t, table["J"], color="tab:blue", lw=1.4, label="J")
    ax_j.set_xlabel("t")
    ax_j.set_ylabel("J", color="tab:blue")
    ax_j.tick_params(axis="y", labelcolor="tab:blue")
    ax_i = ax_j.twinx()
    ax_i.plot(t, table["I"], color="tab:green", lw=1.0, label="I")
    ax_i.set_ylabel("I (conserved at 0)", color="tab:green")
    ax_i.tick_params(axis="y", labelcolor="tab:green")
    ax_j.set_title("Energy descent and conserved gauge functional")
    ax_j.grid(True, alpha=0.3)
    _save(fig, out_path)


def plot_envelope(csv_path, out_path) -> None:
    """Extremes of the trace field against their initial envelope."""
    table = _load(csv_path)
    t = table["t"]
    sup = table["sup_lambda_chi_omega"]
    inf = table["inf_lambda_chi_omega"]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(t, sup, color="tab:blue", lw=1.4, label="sup of the trace")
    ax.plot(t, inf, color="tab:orange", lw=1.4, label="inf of the trace")
    ax.axhline(sup[0], color="tab:blue", ls="--", lw=0.9, alpha=0.7,
               label="initial sup")
    ax.axhline(inf[0], color="tab:orange", ls="--", lw=0.9, alpha=0.7,
               label="initial inf")
    ax.fill_between(t, inf, sup, color="tab:gray", alpha=0.12)
    ax.set_xlabel("t")
    ax.set_ylabel("trace of chi$^{-1}$ against omega")
    ax.set_title("Maximum-principle envelope")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    _save(fig, out_path)
