"""Figure rendering for the report commands.

Everything here is optional output: the delimited reports stay the
interface, the figures are a reading aid written next to them.  Imports
are kept inside the functions so the library works without a display
stack until a figure is actually requested.
"""

from __future__ import annotations


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def ball_growth_figure(sizes: list[int], path: str) -> str:
    """Sphere and cumulative ball sizes against the radius."""
    plt = _pyplot()
    radii = list(range(len(sizes)))
    totals = []
    for s in sizes:
        totals.append((totals[-1] if totals else 0) + s)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(radii, sizes, "o-", label="sphere")
    ax.plot(radii, totals, "s-", label="ball")
    ax.set_xlabel("radius")
    ax.set_ylabel("words")
    ax.set_yscale("log")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def scan_figure(report, path: str) -> str:
    """Per-degree maxima and the (i, j) block landscape of a ratio scan."""
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    degrees = sorted(report.per_n_max)
    ax1.plot(degrees, [report.per_n_max[n] for n in degrees], "o-")
    ax1.axhline(report.c_q, color="gray", linestyle="--", label="c_q")
    ax1.set_xlabel("degree n")
    ax1.set_ylabel("max ratio")
    ax1.set_xticks(degrees)
    ax1.legend()
    ax1.grid(True, alpha=0.3)
    best: dict[tuple[int, int], float] = {}
    for row in report.rows:
        key = (row.i, row.j)
        best[key] = max(best.get(key, 0.0), row.ratio)
    xs = [k[1] for k in best]
    ys = [k[0] for k in best]
    sc = ax2.scatter(xs, ys, c=list(best.values()), cmap="viridis", s=60)
    ax2.set_xlabel("column block j")
    ax2.set_ylabel("row block i")
    fig.colorbar(sc, ax=ax2, label="max ratio")
    fig.suptitle(f"block ratios, K={report.k_emp:.4g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def counterexample_figure(result, path: str) -> str:
    """Coefficient counts of the family product with the norm annotations."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ms = sorted(result.coefficient_counts)
    ax.bar(ms, [result.coefficient_counts[m] for m in ms])
    ax.set_xlabel("pair count m")
    ax.set_ylabel("c_m")
    ax.set_title(
        f"n={result.n}: block norm {result.block_norm:.6f}, "
        f"ratio {result.ratio:.4f} vs bound {result.lower_bound:.4f}"
    )
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def convergence_figure(rows, path: str) -> str:
    """Constants and both approximation gaps along the parameter grid."""
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    qs = [r.q for r in rows]
    ax1.plot(qs, [r.c_q1 for r in rows], "o-", label="C_q1")
    ax1.plot(qs, [r.f_q1 for r in rows], "s-", label="F_q1")
    ax2.plot(qs, [r.gap_dir1 for r in rows], "o-", label="gap dir 1")
    ax2.plot(qs, [r.gap_dir2 for r in rows], "s-", label="gap dir 2")
    for ax in (ax1, ax2):
        ax.set_xlabel("q")
        ax.set_yscale("log")
        ax.invert_xaxis()
        ax.legend()
        ax.grid(True, alpha=0.3)
    ax1.set_ylabel("constant")
    ax2.set_ylabel("truncated gap")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def matrix_figure(entries, path: str, title: str = "") -> str:
    """Magnitude heatmap of a truncated operator."""
    plt = _pyplot()
    import numpy as np

    fig, ax = plt.subplots(figsize=(5, 5))
    im = ax.imshow(np.abs(entries), cmap="magma", interpolation="nearest")
    ax.set_xlabel("domain index")
    ax.set_ylabel("codomain index")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label="|entry|")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
