"""Report emission: provenance-stamped CSV/JSON plus rendered figures.

Every delimited output starts with a comment line carrying the configuration
hash and seed so results can be traced back to their inputs. Numbers are
printed with six significant digits, `.` as the decimal separator and no
thousands separator, which keeps golden-file diffs byte-stable. Figures are
rendered beside the delimited files with the non-interactive Agg backend.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import BoundSweep, WelfareReport
from .incentives import Theorem1Report

CSV_HEADER = "variant,pairing,side,mean,ci95,success,reject,notmatched,forced,msgs"


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def provenance_line(config_hash: str, seed: int) -> str:
    return f"# config={config_hash} seed={seed}"


def welfare_csv_rows(variant: str, pairing: str, report: WelfareReport) -> list[str]:
    rows = []
    for side, mean, ci in (
        ("purchaser", report.mean_purchaser, report.ci95_purchaser),
        ("seller", report.mean_seller, report.ci95_seller),
    ):
        rows.append(
            ",".join(
                [
                    variant,
                    pairing,
                    side,
                    _fmt(mean),
                    _fmt(ci),
                    _fmt(report.success_rate),
                    _fmt(report.reject_rate),
                    _fmt(report.not_matched_rate),
                    _fmt(report.forced_rate),
                    _fmt(report.mean_messages),
                ]
            )
        )
    return rows


def write_welfare_csv(
    path: Path,
    entries: Sequence[tuple[str, str, WelfareReport]],
    config_hash: str,
    seed: int,
) -> None:
    lines = [provenance_line(config_hash, seed), CSV_HEADER]
    for variant, pairing, report in entries:
        lines.extend(welfare_csv_rows(variant, pairing, report))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict, config_hash: str, seed: int) -> None:
    body = {"config": config_hash, "seed": seed, **payload}
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")


# --- figures ----------------------------------------------------------------

_VARIANT_ORDER = ("barg", "mat", "bou", "all")
_VARIANT_LABELS = {"barg": "barg", "mat": "mat.", "bou": "bou.", "all": "all"}


def _variant_bars(ax, rows: Mapping[str, Mapping[str, WelfareReport]], side_attr: str) -> None:
    present = [v for v in _VARIANT_ORDER if all(v in row for row in rows.values())]
    width = 0.8 / max(len(rows), 1)
    x0 = range(len(present))
    for i, (label, row) in enumerate(rows.items()):
        means = [getattr(row[v], side_attr) for v in present]
        cis = [getattr(row[v], "ci95_" + side_attr.split("_")[1]) for v in present]
        xs = [x + i * width for x in x0]
        ax.bar(xs, means, width=width, yerr=cis, capsize=2, label=label)
    ax.set_xticks([x + (len(rows) - 1) * width / 2 for x in x0])
    ax.set_xticklabels([_VARIANT_LABELS[v] for v in present])
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylabel("welfare")
    ax.legend(fontsize=8)


def render_fig2(
    table: Mapping[str, Mapping[str, WelfareReport]], out_dir: Path
) -> list[Path]:
    """Three welfare panels, one per focal agent type, PNG files."""
    panels = [
        ("fig2_uncurious.png", "uncurious agents", ["unc-vs-unc"]),
        ("fig2_curious.png", "curious agents", ["cur-vs-unc", "cur-vs-sec"]),
        ("fig2_secretive.png", "secretive agents", ["sec-vs-unc", "sec-vs-cur"]),
    ]
    written = []
    for filename, title, pairings in panels:
        rows = {p: table[p] for p in pairings if p in table}
        if not rows:
            continue
        fig, ax = plt.subplots(figsize=(4.5, 3.0))
        _variant_bars(ax, rows, "mean_purchaser")
        ax.set_title(f"Welfare of the {title}")
        fig.tight_layout()
        path = out_dir / filename
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def render_welfare(report: WelfareReport, title: str, path: Path) -> Path:
    """Per-side welfare bars with outcome rates for a single scenario."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.0, 3.0))
    sides = ["purchaser", "seller"]
    means = [report.mean_purchaser, report.mean_seller]
    cis = [report.ci95_purchaser, report.ci95_seller]
    ax1.bar(sides, means, yerr=cis, capsize=3, color=["tab:blue", "tab:orange"])
    ax1.axhline(0.0, color="black", linewidth=0.8)
    ax1.set_ylabel("welfare")
    ax1.set_title(title)
    labels = ["success", "reject", "not matched", "forced"]
    rates = [
        report.success_rate,
        report.reject_rate,
        report.not_matched_rate,
        report.forced_rate,
    ]
    ax2.bar(labels, rates, color="tab:gray")
    ax2.set_ylabel("fraction of draws")
    ax2.set_ylim(0.0, 1.0)
    ax2.tick_params(axis="x", labelrotation=20)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_bound_sweep(
    sweeps: Mapping[str, BoundSweep], path: Path
) -> Path:
    """Welfare against the proposal bound, one line per pairing."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    for label, sweep in sweeps.items():
        ys = [r.mean_purchaser for r in sweep.reports]
        ax.plot(sweep.bounds, ys, marker="o", label=label)
        if sweep.plateau is not None:
            ax.axvline(sweep.plateau, linestyle=":", linewidth=0.8, color="gray")
    ax.set_xlabel("proposal bound per side")
    ax.set_ylabel("welfare")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_theorem1(report: Theorem1Report, path: Path) -> Path:
    """Mean utility per declared reserve, truthful value marked."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    xs = list(report.grid)
    ys = [s.mean_utility for s in report.stats]
    errs = [s.ci95 for s in report.stats]
    ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=3)
    ax.axvline(report.truthful_value, linestyle="--", color="tab:red", linewidth=1.0,
               label="truthful bound-reserve")
    ax.set_xlabel("declared reserve price")
    ax.set_ylabel("mean utility")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def sweep_csv_lines(
    sweeps: Mapping[str, BoundSweep], config_hash: str, seed: int
) -> list[str]:
    lines = [provenance_line(config_hash, seed), "pairing,bound,side,mean,ci95,success,reject,notmatched,forced,msgs"]
    for pairing, sweep in sweeps.items():
        for bound, report in zip(sweep.bounds, sweep.reports):
            for side, mean, ci in (
                ("purchaser", report.mean_purchaser, report.ci95_purchaser),
                ("seller", report.mean_seller, report.ci95_seller),
            ):
                lines.append(
                    ",".join(
                        [
                            pairing,
                            str(bound),
                            side,
                            _fmt(mean),
                            _fmt(ci),
                            _fmt(report.success_rate),
                            _fmt(report.reject_rate),
                            _fmt(report.not_matched_rate),
                            _fmt(report.forced_rate),
                            _fmt(report.mean_messages),
                        ]
                    )
                )
    return lines
