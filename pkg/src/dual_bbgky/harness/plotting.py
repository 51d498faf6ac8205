"""Plot data (TSV) and figures (PNG) derived from a verification report.

matplotlib is imported lazily so that the engine and the JSON/text report
path never load it.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .report import VerificationReport


def residual_vs_time(report: VerificationReport) -> list:
    """Rows (check, t, worst residual over instances and sub-quantities, tolerance)."""
    worst: dict = {}
    for r in report.records:
        t = r.parameters.get("t")
        if t is None or r.check == "norm_estimate":
            continue
        key = (r.check, float(t))
        if key not in worst or r.residual > worst[key][0]:
            worst[key] = (r.residual, r.tolerance)
    return [(c, t, res, tol) for (c, t), (res, tol) in sorted(worst.items())]


def ratio_vs_gamma(report: VerificationReport) -> list:
    """Rows (gamma, worst ratio over instances and times, bound)."""
    worst: dict = {}
    for r in report.records:
        if r.check != "norm_estimate":
            continue
        g = float(r.parameters["gamma"])
        if g not in worst or r.residual > worst[g][0]:
            worst[g] = (r.residual, r.tolerance)
    return [(g, ratio, bound) for g, (ratio, bound) in sorted(worst.items())]


def _write_tsv(path: Path, header: list, rows: list):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])


def write_plot_data(report: VerificationReport, stem: Path, figures: bool = True) -> list:
    """Write ``<stem>.residual_vs_t.tsv`` and ``<stem>.ratio_vs_gamma.tsv`` (plus PNGs).

    Returns the paths written.  Tables with no rows are skipped.
    """
    stem = Path(stem)
    written = []
    rt = residual_vs_time(report)
    rg = ratio_vs_gamma(report)
    if rt:
        p = stem.with_name(stem.name + ".residual_vs_t.tsv")
        _write_tsv(p, ["check", "t", "residual", "tolerance"], rt)
        written.append(p)
    if rg:
        p = stem.with_name(stem.name + ".ratio_vs_gamma.tsv")
        _write_tsv(p, ["gamma", "worst_ratio", "bound"], rg)
        written.append(p)
    if figures:
        written += _render_figures(stem, rt, rg)
    return written


def _render_figures(stem: Path, rt: list, rg: list) -> list:
    if not rt and not rg:
        return []
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    if rt:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for check in sorted({row[0] for row in rt}):
            pts = [(t, max(res, 1e-18)) for c, t, res, _ in rt if c == check]
            ax.semilogy([p[0] for p in pts], [p[1] for p in pts], marker="o", label=check)
        ax.set_xlabel("t")
        ax.set_ylabel("worst residual")
        ax.set_title("Identity residuals against time")
        ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        p = stem.with_name(stem.name + ".residual_vs_t.png")
        fig.savefig(p, dpi=120, metadata={"Software": None})
        plt.close(fig)
        written.append(p)
    if rg:
        fig, ax = plt.subplots(figsize=(5.5, 4))
        gs = [row[0] for row in rg]
        ax.plot(gs, [row[1] for row in rg], marker="o", label="worst observed ratio")
        ax.plot(gs, [row[2] for row in rg], marker="s", linestyle="--", label="bound e^2/(1 - gamma e)")
        ax.set_yscale("log")
        ax.set_xlabel("gamma")
        ax.set_ylabel("norm ratio")
        ax.set_title("Norm growth against the estimate")
        ax.legend()
        fig.tight_layout()
        p = stem.with_name(stem.name + ".ratio_vs_gamma.png")
        fig.savefig(p, dpi=120, metadata={"Software": None})
        plt.close(fig)
        written.append(p)
    return written
