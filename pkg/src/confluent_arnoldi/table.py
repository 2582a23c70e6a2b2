"""Result tables: CSV round trip and a dependency-free SVG convergence plot."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence
from xml.sax.saxutils import escape


@dataclass
class ResultTable:
    """Rows of numbers under snake_case column names; column 0 is the degree ``n``."""

    columns: List[str]
    rows: List[tuple] = field(default_factory=list)

    def append(self, row: dict):
        self.rows.append(tuple(row.get(c, math.nan) for c in self.columns))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultTable) or self.columns != other.columns:
            return False
        if len(self.rows) != len(other.rows):
            return False
        for r, s in zip(self.rows, other.rows):
            for a, b in zip(r, s):
                if not (a == b or (isinstance(a, float) and isinstance(b, float)
                                   and math.isnan(a) and math.isnan(b))):
                    return False
        return True

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        reader = csv.reader(io.StringIO(text))
        columns = next(reader)
        rows = [tuple(_parse(v) for v in r) for r in reader if r]
        return cls(columns, rows)

    @classmethod
    def read_csv(cls, path) -> "ResultTable":
        return cls.from_csv(Path(path).read_text())


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return "%.17g" % v


def _parse(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


# ---------------------------------------------------------------- SVG

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
_W, _H = 640, 420
_L, _R, _T, _B = 70, 190, 30, 50


def emit_plot(table: ResultTable, path, title: str = "",
              series: Sequence[str] = None) -> None:
    """Semilog-y plot of every error column against ``n`` as a standalone SVG."""
    if not len(table):
        raise ValueError("cannot plot an empty table")
    x_name = table.columns[0]
    series = list(series or [c for c in table.columns[1:] if c.startswith("err")])
    xs = [float(v) for v in table.column(x_name)]
    data = {}
    for name in series:
        pts = [(x, float(y)) for x, y in zip(xs, table.column(name))
               if isinstance(y, (int, float)) and math.isfinite(y) and y > 0]
        data[name] = [(x, math.log10(y)) for x, y in pts]
    ally = [y for pts in data.values() for _, y in pts] or [0.0]
    ylo, yhi = math.floor(min(ally)), math.ceil(max(ally))
    if yhi == ylo:
        yhi += 1
    xlo, xhi = min(xs), max(xs)
    if xhi == xlo:
        xlo, xhi = xlo - 1, xhi + 1

    def px(x):
        return _L + (x - xlo) / (xhi - xlo) * (_W - _L - _R)

    def py(y):
        return _T + (yhi - y) / (yhi - ylo) * (_H - _T - _B)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<rect x="{_L}" y="{_T}" width="{_W - _L - _R}" height="{_H - _T - _B}" '
           'fill="none" stroke="black"/>']
    step = max(1, (yhi - ylo) // 8)
    for e in range(ylo, yhi + 1, step):
        y = py(e)
        out.append(f'<line x1="{_L}" y1="{y:.2f}" x2="{_W - _R}" y2="{y:.2f}" '
                   'stroke="#ddd"/>')
        out.append(f'<text x="{_L - 6}" y="{y + 4:.2f}" text-anchor="end">1e{e}</text>')
    for i in range(6):
        x = xlo + i * (xhi - xlo) / 5
        out.append(f'<text x="{px(x):.2f}" y="{_H - _B + 16}" text-anchor="middle">'
                   f'{x:g}</text>')
    out.append(f'<text x="{(_L + _W - _R) / 2}" y="{_H - 10}" text-anchor="middle">'
               f'{escape(x_name)}</text>')
    if title:
        out.append(f'<text x="{_L}" y="18">{escape(title)}</text>')
    for k, (name, pts) in enumerate(data.items()):
        color = _COLORS[k % len(_COLORS)]
        if len(pts) > 1:
            d = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
            out.append(f'<polyline points="{d}" fill="none" stroke="{color}"/>')
        for x, y in pts:
            out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2" fill="{color}"/>')
        ly = _T + 14 * k + 8
        out.append(f'<line x1="{_W - _R + 10}" y1="{ly}" x2="{_W - _R + 28}" y2="{ly}" '
                   f'stroke="{color}"/>')
        out.append(f'<text x="{_W - _R + 32}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
