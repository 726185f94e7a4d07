"""Coefficient tables and support plots written next to certificate reports."""

from __future__ import annotations

import csv
import os
from typing import Optional, Sequence

from .bounds import SturmBound
from .qseries import QExpansion


def coefficient_rows(f: QExpansion, forbidden: Sequence[int] = (),
                     bound: Optional[SturmBound] = None):
    yield ("n", "n_mod_4", "coefficient", "nonzero", "forbidden_class", "within_bound")
    for n in range(f.prec):
        c = f.coeff(n)
        within = "" if bound is None else str(int(bound.covers(n)))
        yield (n, n % 4, str(c), int(bool(c)), int(n % 4 in forbidden), within)


def write_coefficient_table(f: QExpansion, path, forbidden: Sequence[int] = (),
                            bound: Optional[SturmBound] = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerows(coefficient_rows(f, forbidden, bound))


def _magnitude(c) -> float:
    # display only; the exact value is in the table
    return max(abs(float(x)) for x in c.coeffs)


def plot_support(series: dict, path, bound: Optional[SturmBound] = None,
                 forbidden: Sequence[int] = (), title: Optional[str] = None):
    """Stem plot of |a(n)| for each named series, forbidden classes in red."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(len(series), 1, figsize=(8, 2.2 * len(series) + 0.6),
                             sharex=True, squeeze=False)
    for ax, (name, f) in zip(axes[:, 0], series.items()):
        good = [(n, _magnitude(c)) for n, c in f.terms() if n % 4 not in forbidden]
        bad = [(n, _magnitude(c)) for n, c in f.terms() if n % 4 in forbidden]
        for pts, color, label in ((good, "C0", "allowed class"), (bad, "C3", "forbidden class")):
            if pts:
                xs, ys = zip(*pts)
                ax.vlines(xs, 0, ys, color=color, lw=1.2)
                ax.plot(xs, ys, "o", color=color, ms=3.5, label=label)
        ax.axvline(f.prec - 0.5, color="0.5", ls=":", lw=1, label=f"O(q^{f.prec})")
        if bound is not None:
            ax.axvline(float(bound.bound), color="k", ls="--", lw=1,
                       label=f"bound {bound.floor}")
        ax.set_ylabel(f"|a(n)|  {name}", fontsize=8)
        ax.set_ylim(bottom=0)
        ax.legend(fontsize=7, loc="upper right", frameon=False)
    axes[-1, 0].set_xlabel("n")
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report_dir(directory, cert, series: dict, report_text: str, json_text: str,
                     forbidden: Sequence[int] = ()) -> list[str]:
    """Write certificate.{txt,json}, one coefficient TSV per series and support.png."""
    os.makedirs(directory, exist_ok=True)
    written = []

    def _out(name, body):
        p = os.path.join(directory, name)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
        written.append(p)

    _out("certificate.txt", report_text)
    _out("certificate.json", json_text)
    for name, f in series.items():
        p = os.path.join(directory, f"{name}.tsv")
        write_coefficient_table(f, p, forbidden, cert.bound)
        written.append(p)
    title = f"{cert.kind.value}: {cert.verdict_text()}"
    written.append(plot_support(series, os.path.join(directory, "support.png"), cert.bound,
                                forbidden, title))
    return written
