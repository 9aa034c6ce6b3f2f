"""Figure rendering for run reports.

Each experiment gets one PNG next to its delimited output, drawn from the
same records that go into the JSON-lines file.  The delimited files stay
canonical; figures are a convenience view and can be disabled wholesale,
so every renderer works from plain record dicts and never recomputes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figure"]

_EPS = 1e-18


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _residual_axis(ax, values, tolerance, label):
    values = np.asarray(values, dtype=float)
    ax.semilogy(np.arange(len(values)), np.maximum(values, _EPS), "o", ms=4)
    if tolerance is not None:
        ax.axhline(tolerance, color="tab:red", lw=1, ls="--", label=f"tolerance {tolerance:g}")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("trial")
    ax.set_ylabel(label)


def _fig_wallach_scan(report, path):
    s = [r["s"] for r in report.records]
    worst = [r["worst_min_eigenvalue"] for r in report.records]
    frac = [r["indefinite_fraction"] for r in report.records]
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    top.plot(s, worst, "o-", ms=4)
    top.axhline(0.0, color="tab:red", lw=1, ls="--")
    top.set_ylabel("worst min eigenvalue")
    top.set_yscale("symlog", linthresh=1e-10)
    bottom.plot(s, frac, "s-", ms=4, color="tab:orange")
    bottom.set_ylim(-0.05, 1.05)
    bottom.set_xlabel("kernel exponent s")
    bottom.set_ylabel("indefinite fraction")
    top.set_title(f"positivity scan: {report.parameters.get('domain', '')}")
    _save(fig, path)


def _fig_restriction_norm(report, path):
    orders = [r["order"] for r in report.records]
    rho = [r["rho"] for r in report.records]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.loglog(orders, rho, "o-", base=2)
    ax.set_xlabel("truncation order N")
    ax.set_ylabel("restriction norm estimate")
    ax.set_title(f"s1={report.parameters.get('s1')}, s2={report.parameters.get('s2')}")
    _save(fig, path)


def _fig_residuals(report, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    _residual_axis(
        ax,
        [r["residual"] for r in report.records],
        report.parameters.get("tol"),
        "residual",
    )
    ax.set_title(report.experiment)
    _save(fig, path)


def _fig_cocycle(report, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    svals = sorted({r["s"] for r in report.records})
    for s in svals:
        vals = [r["residual"] for r in report.records if r["s"] == s]
        ax.semilogy(np.maximum(np.asarray(vals, dtype=float), _EPS), "o", ms=3, label=f"s={s:g}")
    ax.set_xlabel("trial")
    ax.set_ylabel("cocycle residual")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(report.experiment)
    _save(fig, path)


def _fig_berezin(report, path):
    s = [r["s"] for r in report.records]
    gap = [r["relative_gap"] for r in report.records]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.loglog(s, gap, "o-", label="relative gap")
    guide = gap[0] * np.asarray(s, dtype=float) ** -1.0 * s[0]
    ax.loglog(s, guide, ls=":", color="gray", label="1/s guide")
    ax.set_xlabel("kernel exponent s")
    ax.set_ylabel("|omega(s) pairing - L2| / |L2|")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def _fig_orbit(report, path):
    alphas = [r["alpha"] for r in report.records]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    values, counts = np.unique(np.asarray(alphas, dtype=int), return_counts=True)
    ax.bar(values, counts, width=0.6)
    ax.set_xticks(values)
    ax.set_xlabel("orbit invariant alpha")
    ax.set_ylabel("pairs")
    _save(fig, path)


_VERDICT_COLORS = {"CONVERGENT": "tab:blue", "DIVERGENT": "tab:red", "INCONCLUSIVE": "gray"}


def _fig_boundary_trace(report, path):
    fig, ax = plt.subplots(figsize=(6, 4.2))
    seen = set()
    for rec in report.records:
        gaps = np.maximum(np.asarray(rec["cauchy_gaps"], dtype=float), _EPS)
        verdict = rec["verdict"]
        label = verdict if verdict not in seen else None
        seen.add(verdict)
        ax.semilogy(
            np.arange(1, len(gaps) + 1), gaps, "-o", ms=2.5, lw=0.9,
            color=_VERDICT_COLORS.get(verdict, "black"), alpha=0.65, label=label,
        )
    tol = report.parameters.get("tolerance")
    if tol is not None:
        ax.axhline(tol, color="k", lw=1, ls="--")
        ax.axhline(10 * tol, color="k", lw=1, ls=":")
    ax.set_xlabel("ladder rung")
    ax.set_ylabel("Cauchy gap")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(f"windings {report.parameters.get('windings')}, family {report.parameters.get('family')}")
    _save(fig, path)


def _fig_l1_boundary(report, path):
    fig, (left, right) = plt.subplots(1, 2, figsize=(8, 3.8))
    for rec in report.records:
        norms = np.asarray(rec["l1_norms"], dtype=float)
        left.plot(np.arange(1, len(norms) + 1), norms, "-o", ms=2.5, lw=0.9, alpha=0.7)
    left.set_xlabel("ladder rung")
    left.set_ylabel("trace L1 norm")
    agg = report.aggregate
    labels = ["coarse", "refined"]
    values = [agg["kernel_coarse"], agg["kernel_fine"]]
    right.bar(labels, values, width=0.5)
    if agg.get("exact_constant") is not None:
        right.axhline(agg["exact_constant"], color="tab:red", lw=1, ls="--", label="exact")
        right.legend(fontsize=8)
    right.set_ylabel("kernel double integral")
    fig.suptitle(f"s = {report.parameters.get('s')}")
    _save(fig, path)


def _fig_selftest(report, path):
    # Runtimes are banned from the JSON-lines records, so read the summary
    # rows, which carry them for the CSV.
    names = [r["name"] for r in report.summary_rows]
    runtimes = [r["runtime_seconds"] for r in report.summary_rows]
    colors = ["tab:green" if r["passed"] else "tab:red" for r in report.summary_rows]
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    pos = np.arange(len(names))
    ax.barh(pos, runtimes, color=colors)
    ax.set_yticks(pos)
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("runtime (s)")
    ax.set_title("selftest checks (green = passed)")
    _save(fig, path)


_RENDERERS = {
    "wallach-scan": _fig_wallach_scan,
    "restriction-norm": _fig_restriction_norm,
    "intertwine-check": _fig_residuals,
    "j-operator-check": _fig_residuals,
    "cocycle-check": _fig_cocycle,
    "group-law-check": _fig_residuals,
    "berezin-limit": _fig_berezin,
    "orbit-invariant": _fig_orbit,
    "boundary-trace": _fig_boundary_trace,
    "l1-boundary": _fig_l1_boundary,
    "selftest": _fig_selftest,
}


def render_figure(report, outdir) -> str | None:
    """Render the experiment's PNG next to its reports; None if no renderer."""
    renderer = _RENDERERS.get(report.experiment)
    if renderer is None:
        return None
    path = Path(outdir) / f"{report.experiment}.png"
    renderer(report, path)
    return str(path)
