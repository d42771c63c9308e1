"""
Operator-facing tables. Everything here goes to stderr; stdout is reserved for JSON.
"""

from typing import Dict, List, Mapping

from rich import box
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from xentrack.metrics.types import MetricsReport

console = Console(stderr=True)


def print_error(message: str) -> None:
    """One line, no markup interpretation (messages may contain brackets)."""
    console.print(f"error: {message}", markup=False, highlight=False, soft_wrap=True)


def print_track_summary(rows: List[Dict]) -> None:
    if not rows:
        console.print("[dim]No videos in the detection file.[/dim]")
        return
    table = Table(title="Tracking", box=box.SIMPLE, padding=(0, 2))
    table.add_column("Video", style="cyan")
    table.add_column("Frames", justify="right")
    table.add_column("Born", justify="right")
    table.add_column("Max live", justify="right")
    table.add_column("Instances", justify="right")
    for row in rows:
        table.add_row(
            escape(row["video_id"]),
            str(row["frames"]),
            str(row["tracks_born"]),
            str(row["max_concurrent"]),
            str(row["instances"]),
        )
    console.print(table)


def _mota_color(mota: float) -> str:
    return "green" if mota >= 0.9 else "yellow" if mota >= 0.5 else "red"


def print_report(report: MetricsReport) -> None:
    table = Table(title="Evaluation", box=box.SIMPLE, padding=(0, 2))
    for name in ("Video", "MOTA", "MOTP", "IDF1", "IDSW", "Frag", "FP", "FN"):
        table.add_column(name, justify="left" if name == "Video" else "right")

    def add(label: str, s) -> None:
        color = _mota_color(s.mota)
        table.add_row(
            label,
            f"[{color}]{s.mota:.4f}[/{color}]",
            f"{s.motp:.4f}",
            f"{s.idf1:.4f}",
            str(s.id_switches),
            str(s.fragmentations),
            str(s.fp),
            str(s.fn),
        )

    for video_id, summary in report.per_video.items():
        add(escape(video_id), summary)
    if len(report.per_video) > 1:
        add("[bold]all[/bold]", report)
    console.print(table)


def print_bench(stages: Mapping[str, Mapping[str, float]], fps: float) -> None:
    table = Table(title=f"Benchmark ({fps:.1f} frames/s)", box=box.SIMPLE, padding=(0, 2))
    table.add_column("Stage", style="cyan")
    for name in ("p50 ms", "p90 ms", "p99 ms", "mean ms"):
        table.add_column(name, justify="right")
    for stage, stats in stages.items():
        table.add_row(stage, *(f"{stats[k]:.3f}" for k in ("p50_ms", "p90_ms", "p99_ms", "mean_ms")))
    console.print(table)
