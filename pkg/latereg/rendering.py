"""Terminal rendering for Betti tables and verification summaries.

Betti tables use the usual layout: columns are homological degrees i, rows
are j - i, and the entry in row s, column i is β_{i,i+s}; zeros print as ".".
"""

from __future__ import annotations

from typing import Optional

from latereg.resolution import BettiTable


def _style(text: str, style: str, use_rich: bool) -> str:
    """Apply Rich markup if enabled."""
    if use_rich:
        return f"[{style}]{text}[/{style}]"
    return text


def _grid(table: BettiTable) -> list[list[str]]:
    """Rows of cells: a header, the totals, then one row per j - i."""
    if not table:
        return [["", "0"], ["total:", "."]]
    pd = table.pd
    shifts = [j - i for i, j in table]
    header = [""] + [str(i) for i in range(pd + 1)]
    totals = ["total:"] + [str(b) for b in table.totals()]
    rows = [header, totals]
    for s in range(min(shifts), max(shifts) + 1):
        row = [f"{s}:"]
        for i in range(pd + 1):
            beta = table[(i, i + s)]
            row.append(str(beta) if beta else ".")
        rows.append(row)
    return rows


def render_betti(
    table: BettiTable,
    use_rich: bool = False,
    highlight: Optional[set[tuple[int, int]]] = None,
) -> str:
    """Render a Betti table as aligned text.

    Args:
        table: The table to render
        use_rich: Whether to include Rich markup for colors
        highlight: (i, j) entries to mark, e.g. disagreements

    Returns:
        The rendered table, one line per row
    """
    rows = _grid(table)
    ncols = max(len(r) for r in rows)
    widths = [max(len(r[c]) for r in rows if c < len(r)) for c in range(ncols)]
    label_row_shift = {idx: int(r[0][:-1]) for idx, r in enumerate(rows[2:], start=2)}
    lines = []
    for idx, row in enumerate(rows):
        cells = [row[0].rjust(widths[0])]
        for c in range(1, len(row)):
            cell = row[c].rjust(widths[c])
            if idx == 0:
                cell = _style(cell, "bold", use_rich)
            elif idx >= 2:
                i = c - 1
                if highlight and (i, i + label_row_shift[idx]) in highlight:
                    cell = _style(cell, "red", use_rich)
                elif row[c] == ".":
                    cell = _style(cell, "dim", use_rich)
            cells.append(cell)
        lines.append(" ".join(cells))
    return "\n".join(lines)


def render_side_by_side(
    predicted: BettiTable, computed: BettiTable, use_rich: bool = False, gap: int = 4
) -> str:
    """Predicted and computed tables next to each other, differences marked."""
    diff = set(predicted.difference(computed))
    left = render_betti(predicted, False).splitlines()
    right = render_betti(computed, use_rich, highlight=diff).splitlines()
    width = max(len(line) for line in left + ["predicted"])
    height = max(len(left), len(right))
    left += [""] * (height - len(left))
    right += [""] * (height - len(right))
    head = "predicted".ljust(width) + " " * gap + "computed"
    lines = [_style(head, "bold", use_rich)]
    lines.extend(a.ljust(width) + " " * gap + b for a, b in zip(left, right))
    return "\n".join(lines)


def render_sequence(seq: tuple[int, ...] | list[int]) -> str:
    return "(" + ", ".join(str(t) for t in seq) + ")"


def render_verdict(passed: bool, use_rich: bool = True) -> str:
    if passed:
        return _style("PASS", "bold green", use_rich)
    return _style("FAIL", "bold red", use_rich)
