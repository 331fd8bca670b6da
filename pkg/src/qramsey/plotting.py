"""Report figures written next to experiment CSVs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import fit_exponent  # noqa: E402

# Fixed metadata keeps the PNG bytes reproducible.
_META = {"Software": None}


def _finish(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)


def plot_disc_scaling(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for n in sorted({r["n"] for r in rows}):
        sub = [r for r in rows if r["n"] == n]
        ts = sorted({r["t"] for r in sub})
        mean = [np.mean([r["measured_max"] for r in sub if r["t"] == t]) for t in ts]
        ax.loglog(ts, mean, "o-", label=f"n={n}")
    slope = fit_exponent(rows)
    ts = np.array(sorted({r["t"] for r in rows}), dtype=float)
    ref = np.mean([r["measured_max"] for r in rows if r["t"] == ts[0]])
    ax.loglog(ts, ref * (ts / ts[0]) ** 1.5, "k--", lw=1, label="slope 3/2")
    ax.set_xlabel("t (max set size)")
    ax.set_ylabel("max |D_p(S)| found")
    ax.set_title(f"bounded-set discrepancy, fitted slope {slope:.3f}")
    ax.legend(frameon=False, fontsize=8)
    _finish(fig, path)


def plot_tail_bounds(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    ex = np.array([r["exact"] for r in rows])
    bd = np.array([r["bound"] for r in rows])
    floor = 1e-30
    ax.loglog(np.maximum(ex, floor), np.maximum(bd, floor), ".", ms=4)
    lo = max(floor, min(ex[ex > 0].min(), bd.min()))
    ax.loglog([lo, 1], [lo, 1], "k-", lw=0.8)
    ax.set_xlabel("exact tail probability")
    ax.set_ylabel("rate-function bound")
    _finish(fig, path)


def plot_linear(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ks = sorted({r["k"] for r in rows})
    rate = [np.mean([bool(r["success"]) for r in rows if r["k"] == k]) for k in ks]
    ax.plot(ks, rate, "o-")
    ax.set_ylim(0, 1.05)
    ax.set_xlabel("k")
    ax.set_ylabel("success rate")
    _finish(fig, path)


def plot_extraction(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ns = sorted({r["n"] for r in rows})
    ax.plot(ns, [np.mean([r["ell"] for r in rows if r["n"] == n]) for n in ns], "o-",
            label="witness size")
    ax.plot(ns, [n / np.log(n) for n in ns], "k--", lw=1, label="n / ln n")
    ax.set_xlabel("n")
    ax.legend(frameon=False)
    _finish(fig, path)


def plot_lower_bound(rows, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ks = sorted({r["k"] for r in rows})
    ax.plot(ks, [np.median([r["attempts"] for r in rows if r["k"] == k]) for k in ks], "o-")
    ax.set_xlabel("k")
    ax.set_ylabel("median attempts")
    _finish(fig, path)


PLOTTERS = {
    "disc-scaling": plot_disc_scaling,
    "tail-bounds": plot_tail_bounds,
    "linear": plot_linear,
    "extraction": plot_extraction,
    "lower-bound": plot_lower_bound,
}


def plot_report(kind: str, rows, path) -> None:
    if rows:
        PLOTTERS[kind](rows, path)
