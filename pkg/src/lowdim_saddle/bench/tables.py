"""CSV and Markdown rendering of run reports."""

from __future__ import annotations

import csv
import io
from collections import defaultdict

from ..core import RunReport

CSV_COLUMNS = (
    "method", "problem", "n", "m", "epsilon", "seed", "outer_iters", "grad_x_calls",
    "grad_y_calls", "prox_calls", "value_calls", "residual", "wall_sec", "timed_out",
)


def _row(r: RunReport) -> list[str]:
    c = r.counters
    return [
        r.method, r.problem, str(r.n), str(r.m), repr(float(r.epsilon)),
        "" if r.seed is None else str(r.seed), str(r.outer_iters),
        str(c.get("grad_x", 0)), str(c.get("grad_y", 0)), str(c.get("prox", 0)), str(c.get("value", 0)),
        repr(float(r.residual)), repr(float(r.wall_sec)), str(bool(r.timed_out)).lower(),
    ]


def render_csv(reports: list[RunReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(_row(r))
    return buf.getvalue()


def parse_csv(text: str) -> list[RunReport]:
    """Inverse of ``render_csv`` for the tabulated fields."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        rep = RunReport(
            method=row["method"], problem=row["problem"], n=int(row["n"]), m=int(row["m"]),
            epsilon=float(row["epsilon"]), seed=int(row["seed"]) if row["seed"] else None,
            outer_iters=int(row["outer_iters"]), residual=float(row["residual"]),
            wall_sec=float(row["wall_sec"]), timed_out=row["timed_out"] == "true",
        )
        rep.counters.update(grad_x=int(row["grad_x_calls"]), grad_y=int(row["grad_y_calls"]),
                            prox=int(row["prox_calls"]), value=int(row["value_calls"]))
        out.append(rep)
    return out


def render_markdown(reports: list[RunReport]) -> str:
    """One pipe table per n; rows by epsilon (descending), then m, then seed."""
    methods = list(dict.fromkeys(r.method for r in reports))
    by_n: dict[int, list[RunReport]] = defaultdict(list)
    for r in reports:
        by_n[r.n].append(r)
    blocks = []
    for n in sorted(by_n):
        cells: dict[tuple, dict[str, RunReport]] = defaultdict(dict)
        for r in by_n[n]:
            cells[(r.epsilon, r.m, r.seed)][r.method] = r
        header = ["eps", "m", "seed"]
        for meth in methods:
            header += [f"{meth} iters", f"{meth} ms"]
        lines = [f"### n = {n}", "", "| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        for key in sorted(cells, key=lambda k: (-k[0], k[1], -1 if k[2] is None else k[2])):
            eps, m, seed = key
            row = [f"{eps:g}", str(m), "" if seed is None else str(seed)]
            for meth in methods:
                r = cells[key].get(meth)
                if r is None:
                    row += ["", ""]
                    continue
                ms = f"{1000.0 * r.wall_sec:.0f}"
                row += [str(r.outer_iters), ms + (" (timeout)" if r.timed_out else "")]
            lines.append("| " + " | ".join(row) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def render_table(reports: list[RunReport], format: str = "csv") -> str:
    if not reports:
        raise ValueError("no reports to render")
    if format == "csv":
        return render_csv(reports)
    if format in ("md", "markdown"):
        return render_markdown(reports)
    raise ValueError(f"unknown format {format!r}")
