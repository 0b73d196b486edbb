"""Render an EvalReport to files: JSON, CSVs, and matplotlib figures.

One call writes the whole bundle into a directory so a report is always
self-contained: the JSON is the machine-readable truth, the CSVs are the
delimited form for spreadsheets, and the PNGs give the at-a-glance story
(fetch success by prefix length, dead-end rates, exposure concentration).
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluate import EvalReport


def write_csvs(report: EvalReport, out_dir: Path) -> list[Path]:
    paths = []

    path = out_dir / "fetch_success.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["prefix_length", "success_rate"])
        for p in sorted(report.fetch_success_at_k):
            writer.writerow([p, report.fetch_success_at_k[p]])
    paths.append(path)

    path = out_dir / "dead_end.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["policy", "dead_end_rate"])
        for policy in sorted(report.dead_end_rate):
            writer.writerow([policy, report.dead_end_rate[policy]])
    paths.append(path)

    path = out_dir / "summary.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "value"])
        writer.writerow(["recommendation_gini", report.recommendation_gini])
        writer.writerow(["mean_groups_per_page", report.mean_groups_per_page])
        writer.writerow(["dedup_violations", report.dedup_violations])
        for name in sorted(report.counts):
            writer.writerow([name, report.counts[name]])
    paths.append(path)
    return paths


def _fetch_success_figure(report: EvalReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    lengths = sorted(report.fetch_success_at_k)
    rates = [report.fetch_success_at_k[p] for p in lengths]
    ax.plot(lengths, rates, marker="o")
    ax.set_xlabel("prefix length (keystrokes)")
    ax.set_ylabel("fetch success rate")
    ax.set_ylim(0, 1.05)
    ax.set_title("Fetch success by keystroke")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _dead_end_figure(report: EvalReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    policies = sorted(report.dead_end_rate)
    rates = [report.dead_end_rate[p] for p in policies]
    ax.bar(policies, rates, color=["#c44e52", "#4c72b0"][: len(policies)])
    ax.set_ylabel("dead-end rate (unavailable-target queries)")
    ax.set_ylim(0, 1.05)
    ax.set_title("Dead ends: matches only vs. full pipeline")
    for i, rate in enumerate(rates):
        ax.text(i, rate + 0.02, f"{rate:.2f}", ha="center")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_figures(report: EvalReport, out_dir: Path) -> list[Path]:
    paths = []
    path = out_dir / "fetch_success.png"
    _fetch_success_figure(report, path)
    paths.append(path)

    path = out_dir / "dead_end.png"
    _dead_end_figure(report, path)
    paths.append(path)

    return paths


def write_report_bundle(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """Write report.json plus CSVs and figures into out_dir; returns the paths."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    json_path = directory / "report.json"
    json_path.write_text(report.to_json() + "\n", encoding="utf-8")
    written = [json_path]
    written.extend(write_csvs(report, directory))
    written.extend(write_figures(report, directory))
    return written
