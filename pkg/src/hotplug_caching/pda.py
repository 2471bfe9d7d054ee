"""Placement delivery arrays: the three defining conditions and the MAN family.

An F x K grid holds a star (cache hit), an integer label (one broadcast per
label), or a null.  Proper PDAs contain no nulls; nulls appear only in
star-skeleton arrays and in reduced arrays produced by the rate improver,
which reuse the same grid format.

Labels are either plain integers or structured pairs ``(subset, copy)`` as
used by the design-built arrays; structured labels are mapped to the dense
range [1..S] only when writing the text format.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import InvalidParameter, ParseError
from .report import ValidationReport


class _Star:
    __slots__ = ()

    def __repr__(self):
        return "*"


STAR = _Star()


def _label_sort_key(label):
    # ints before structured pairs; pairs ordered by copy within subset size
    if isinstance(label, int):
        return (0, label)
    subset, copy = label
    return (1, len(subset), copy, subset)


@dataclass(frozen=True)
class Pda:
    """An F x K star/label grid with an ordered label set."""

    grid: tuple[tuple[object, ...], ...]
    label_order: tuple = ()

    def __post_init__(self):
        grid = tuple(tuple(row) for row in self.grid)
        object.__setattr__(self, "grid", grid)
        if not self.label_order:
            seen = {e for row in grid for e in row if e is not STAR and e is not None}
            object.__setattr__(self, "label_order", tuple(sorted(seen, key=_label_sort_key)))

    @property
    def F(self) -> int:
        return len(self.grid)

    @property
    def K(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    @property
    def Z(self) -> int:
        return sum(1 for e in (row[0] for row in self.grid) if e is STAR)

    @property
    def S(self) -> int:
        return len(self.label_order)

    def entries(self):
        """Yield (row, col, label) for every non-star, non-null entry, 0-based."""
        for r, row in enumerate(self.grid):
            for c, e in enumerate(row):
                if e is not STAR and e is not None:
                    yield r, c, e

    def star_columns(self, r: int) -> frozenset:
        return frozenset(c for c, e in enumerate(self.grid[r]) if e is STAR)

    def column_labels(self, c: int) -> set:
        return {row[c] for row in self.grid if row[c] is not STAR and row[c] is not None}

    def occurrences(self, label) -> list[tuple[int, int]]:
        return [(r, c) for r, c, e in self.entries() if e == label]

    def dense_label(self, label) -> int:
        return self.label_order.index(label) + 1

    def __str__(self):
        return format_grid(self.grid, self.label_order)


@dataclass(frozen=True)
class PdaStats:
    K: int
    F: int
    Z: int
    S: int
    g: int | None
    histogram: tuple[tuple[object, int], ...]

    def describe(self) -> str:
        if self.g is not None:
            return f"{self.g}-[{self.K},{self.F},{self.Z},{self.S}] regular PDA"
        return f"[{self.K},{self.F},{self.Z},{self.S}] PDA (irregular)"


def validate_pda(p: Pda) -> ValidationReport:
    """Check conditions C1 (per-column stars), C2 (label presence), C3 (pair pattern)."""
    report = ValidationReport(subject=f"PDA {p.F}x{p.K}")
    grid = p.grid
    if any(len(row) != p.K for row in grid):
        report.add("shape", "ragged rows")
        return report
    for r, row in enumerate(grid):
        for c, e in enumerate(row):
            if e is None:
                report.add("null-entry", "PDA may not contain nulls", (r + 1, c + 1))
                return report

    star_counts = [sum(1 for row in grid if row[c] is STAR) for c in range(p.K)]
    if len(set(star_counts)) > 1:
        common = Counter(star_counts).most_common(1)[0][0]
        bad = next(c for c, n in enumerate(star_counts) if n != common)
        report.add("C1", f"column star counts differ: {star_counts}", bad + 1)

    labels = [e for _, _, e in p.entries()]
    present = set(labels)
    if present and all(isinstance(x, int) for x in present):
        missing = set(range(1, max(present) + 1)) - present
        if missing:
            report.add("C2", "integer labels must cover [1..S] with no gaps", min(missing))
    for label in p.label_order:
        if label not in present:
            report.add("C2", "declared label never occurs", label)

    by_label: dict = {}
    for r, c, e in p.entries():
        by_label.setdefault(e, []).append((r, c))
    for label, cells in by_label.items():
        for (r1, c1), (r2, c2) in combinations(cells, 2):
            if r1 == r2 or c1 == c2:
                report.add(
                    "C3",
                    "equal labels must lie in distinct rows and columns",
                    (label, (r1 + 1, c1 + 1), (r2 + 1, c2 + 1)),
                )
            elif grid[r1][c2] is not STAR or grid[r2][c1] is not STAR:
                report.add(
                    "C3",
                    "off-diagonal of an equal-label pair must be stars",
                    (label, (r1 + 1, c1 + 1), (r2 + 1, c2 + 1)),
                )
    return report


def man_pda(K: int, t: int) -> Pda:
    """The MAN array: rows are t-subsets of [K] in lex order.

    Entry (tau, j) is a star when j lies in tau, else the lex rank of the
    (t+1)-subset tau + {j}; a (t+1)-[K, C(K,t), C(K-1,t-1), C(K,t+1)]
    regular PDA.
    """
    if not 1 <= t <= K - 1:
        raise InvalidParameter(f"need 1 <= t <= K-1, got t={t}, K={K}")
    rank = {s: i + 1 for i, s in enumerate(combinations(range(1, K + 1), t + 1))}
    grid = []
    for tau in combinations(range(1, K + 1), t):
        tau_set = set(tau)
        row = []
        for j in range(1, K + 1):
            if j in tau_set:
                row.append(STAR)
            else:
                row.append(rank[tuple(sorted(tau_set | {j}))])
        grid.append(tuple(row))
    return Pda(tuple(grid), tuple(range(1, comb(K, t + 1) + 1)))


def man_row_index(K: int, subset: tuple[int, ...]) -> int:
    """0-based row of a t-subset in the lex ordering of C([K], t)."""
    idx = 0
    prev = 0
    t = len(subset)
    for pos, x in enumerate(sorted(subset)):
        for y in range(prev + 1, x):
            idx += comb(K - y, t - pos - 1)
        prev = x
    return idx


def stats(p: Pda) -> PdaStats:
    """Computed parameters plus per-label occurrence histogram."""
    hist = Counter(e for _, _, e in p.entries())
    counts = set(hist.values())
    g = counts.pop() if len(counts) == 1 else None
    ordered = tuple((label, hist[label]) for label in p.label_order)
    return PdaStats(K=p.K, F=p.F, Z=p.Z, S=p.S, g=g, histogram=ordered)


# ---------------------------------------------------------------------------
# Grid text format: header "K F", then F rows of tokens (*, -, or integer)
# ---------------------------------------------------------------------------


def format_grid(grid, label_order=()) -> str:
    dense = {label: i + 1 for i, label in enumerate(label_order)}
    lines = [f"{len(grid[0])} {len(grid)}"]
    for row in grid:
        toks = []
        for e in row:
            if e is STAR:
                toks.append("*")
            elif e is None:
                toks.append("-")
            else:
                toks.append(str(dense.get(e, e)))
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def parse_grid(lines) -> tuple[tuple[object, ...], ...]:
    rows = [ln.split("#", 1)[0].strip() for ln in lines]
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError("empty grid")
    head = rows[0].split()
    if len(head) != 2:
        raise ParseError(f"grid header must be 'K F', got {rows[0]!r}")
    try:
        K, F = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if len(rows) - 1 != F:
        raise ParseError(f"expected {F} grid rows, got {len(rows) - 1}")
    grid = []
    for row in rows[1:]:
        toks = row.split()
        if len(toks) != K:
            raise ParseError(f"expected {K} tokens per row, got {len(toks)}")
        out = []
        for tok in toks:
            if tok == "*":
                out.append(STAR)
            elif tok == "-":
                out.append(None)
            else:
                try:
                    out.append(int(tok))
                except ValueError as exc:
                    raise ParseError(f"bad token {tok!r}") from exc
        grid.append(tuple(out))
    return tuple(grid)


def save_pda(p: Pda, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_grid(p.grid, p.label_order))


def load_pda(path) -> Pda:
    with open(path, encoding="utf-8") as fh:
        grid = parse_grid(fh.read().splitlines())
    if any(e is None for row in grid for e in row):
        raise ParseError("PDA grid may not contain '-' nulls")
    return Pda(grid)
