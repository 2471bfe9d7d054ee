"""Hotplug placement delivery arrays: the (P, B) pair and both constructions.

P is an F x K star/null array (one column per user, Z stars per column); B is
a PDA for the K' active users.  The defining property: for every K'-subset
tau of users there is an F'-subset zeta of P's rows whose stars, restricted
to tau's columns, line up with B's stars under some row bijection (columns
correspond in sorted order).

``find_zeta`` knows both constructions:

* MAN pair: zeta is the set of t-subsets of tau, aligned rank-to-rank.
* design pair: the B row (Y, i) aligns with the i-th block meeting tau
  exactly in U, where U is Y mapped onto tau (blocks ordered lex).

For arbitrary pairs (for example hand-built bundles) the generic finder
groups rows by star pattern inside tau's columns and matches pattern
multiplicities, which is exact: any alignment must pair rows with identical
patterns.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
import random

from .designs import Design, counts
from .errors import ConfigRejected, InvalidParameter, NotAnHpPda, ParseError
from .pda import STAR, Pda, format_grid, man_row_index, parse_grid, validate_pda
from .report import ValidationReport


@dataclass(frozen=True)
class StarArray:
    """F x K grid of stars and nulls with a uniform per-column star count."""

    grid: tuple[tuple[object, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(tuple(row) for row in self.grid))

    @property
    def F(self) -> int:
        return len(self.grid)

    @property
    def K(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    @property
    def Z(self) -> int:
        return sum(1 for row in self.grid if row[0] is STAR)

    def column_stars(self, user: int) -> tuple[int, ...]:
        """1-based rows carrying a star in the column of a 1-based user."""
        return tuple(r + 1 for r, row in enumerate(self.grid) if row[user - 1] is STAR)

    def pattern(self, r: int, tau: tuple[int, ...]) -> frozenset:
        """0-based positions of stars of row r inside the sorted user set tau."""
        row = self.grid[r]
        return frozenset(j for j, user in enumerate(tau) if row[user - 1] is STAR)


@dataclass(frozen=True)
class ZetaResult:
    """Alignment for one active set: zeta_rows[b] is the 0-based P row matched
    to B row b; columns correspond in sorted order."""

    tau: tuple[int, ...]
    zeta_rows: tuple[int, ...]

    @property
    def zeta(self) -> tuple[int, ...]:
        """The row subset as sorted 1-based indices."""
        return tuple(sorted(r + 1 for r in self.zeta_rows))


@dataclass(eq=False)
class HpPda:
    """A (K, K', F, F', Z, Z', S) hotplug PDA pair."""

    P: StarArray
    B: Pda
    kind: str = "generic"  # man | tdesign | generic
    man_t: int = 0
    config: "TSchemeConfig | None" = None
    removal: frozenset | None = None
    _zeta_cache: dict = field(default_factory=dict, repr=False)

    @property
    def K(self) -> int:
        return self.P.K

    @property
    def Kp(self) -> int:
        return self.B.K

    @property
    def F(self) -> int:
        return self.P.F

    @property
    def Fp(self) -> int:
        return self.B.F

    @property
    def Z(self) -> int:
        return self.P.Z

    @property
    def Zp(self) -> int:
        return self.B.Z

    @property
    def S(self) -> int:
        return self.B.S

    def params(self) -> tuple[int, ...]:
        return (self.K, self.Kp, self.F, self.Fp, self.Z, self.Zp, self.S)

    def check_shape(self) -> None:
        if not (self.K >= self.Kp and self.F >= self.Fp):
            raise InvalidParameter(f"need K >= K' and F >= F', got {self.params()}")
        if not self.Z < self.Fp:
            raise InvalidParameter(
                f"need Z < F' (cache strictly smaller than a file), got Z={self.Z}, F'={self.Fp}"
            )
        if self.Z < self.Zp:
            raise InvalidParameter(f"need Z >= Z', got Z={self.Z}, Z'={self.Zp}")


@dataclass(frozen=True)
class TSchemeConfig:
    """Choice of copy counts a_s (s in [1..t-1]) for a design-built pair."""

    design: Design
    a: tuple[int, ...]  # a[s-1] = a_s

    def __post_init__(self):
        t = self.design.t
        if t < 2:
            raise ConfigRejected("design strength t >= 2 required")
        if len(self.a) != t - 1:
            raise ConfigRejected(f"need {t - 1} values a_1..a_{t-1}, got {len(self.a)}")
        lam_st = counts(self.design).lambda_s_t
        for s, a_s in enumerate(self.a, start=1):
            if not 0 <= a_s <= lam_st[s]:
                raise ConfigRejected(
                    f"a_{s}={a_s} outside [0, lambda_{s}^{t}={lam_st[s]}]"
                )
        if self.r_size <= counts(self.design).lambda1:
            raise ConfigRejected(
                f"|R|={self.r_size} must exceed lambda_1={counts(self.design).lambda1}; "
                "memory ratio would reach 1"
            )

    @property
    def t(self) -> int:
        return self.design.t

    def a_of(self, s: int) -> int:
        return self.a[s - 1]

    @property
    def r_size(self) -> int:
        return sum(a_s * comb(self.t, s) for s, a_s in enumerate(self.a, start=1))

    def subarray_order(self):
        """(s, i) pairs in B row order: s descending, copies ascending."""
        for s in range(self.t - 1, 0, -1):
            for i in range(1, self.a_of(s) + 1):
                yield s, i


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def man_hppda(K: int, Kp: int, t: int) -> HpPda:
    """The MAN pair: B is the MAN PDA for K' users, P the star skeleton of
    the MAN PDA for K users (integers replaced by null)."""
    from .pda import man_pda

    if not 1 <= t <= Kp <= K:
        raise InvalidParameter(f"need 1 <= t <= K' <= K, got t={t}, K'={Kp}, K={K}")
    if comb(K - 1, t - 1) >= comb(Kp, t):
        raise InvalidParameter(
            f"Z=C(K-1,t-1)={comb(K - 1, t - 1)} must stay below F'=C(K',t)={comb(Kp, t)}"
        )
    B = man_pda(Kp, t)
    grid = []
    for tau in combinations(range(1, K + 1), t):
        tau_set = set(tau)
        grid.append(tuple(STAR if j in tau_set else None for j in range(1, K + 1)))
    h = HpPda(P=StarArray(tuple(grid)), B=B, kind="man", man_t=t)
    h.check_shape()
    return h


def tdesign_hppda(cfg: TSchemeConfig) -> HpPda:
    """The design pair: P is the transposed incidence matrix of the design;
    B is the vertical stack of subarrays B_(s,i), rows (Y, i) over Y in
    C([t], s), entry (Y, i), j = star when j in Y else the label
    (Y + {j}, i)."""
    d = cfg.design
    t = d.t
    grid_p = []
    for blk in d.blocks:
        bset = set(blk)
        grid_p.append(tuple(STAR if x in bset else None for x in range(1, d.v + 1)))

    rows = []
    label_order = []
    for s, i in cfg.subarray_order():
        for u in combinations(range(1, t + 1), s + 1):
            label_order.append((u, i))
        for y in combinations(range(1, t + 1), s):
            yset = set(y)
            row = []
            for j in range(1, t + 1):
                if j in yset:
                    row.append(STAR)
                else:
                    row.append((tuple(sorted(yset | {j})), i))
            rows.append(tuple(row))
    B = Pda(tuple(rows), tuple(label_order))
    h = HpPda(P=StarArray(tuple(grid_p)), B=B, kind="tdesign", config=cfg)
    h.check_shape()
    return h


def blocks_matching(design: Design, tau, U) -> list[tuple[int, ...]]:
    """Blocks A with A intersect tau = U, in lex order; exactly lambda_s^t
    of them for |tau| = t and |U| = s."""
    tau_set, u_set = set(tau), set(U)
    if not u_set <= tau_set:
        raise InvalidParameter("U must be a subset of tau")
    return [blk for blk in design.blocks if set(blk) & tau_set == u_set]


# ---------------------------------------------------------------------------
# Zeta finders
# ---------------------------------------------------------------------------


def find_zeta(h: HpPda, tau) -> ZetaResult:
    """Rows of P aligning with B for the active set tau (memoized).

    Construction-aware for the MAN and design pairs, pattern matching
    otherwise; the result is always re-checked for star equality.
    """
    tau = tuple(sorted(tau))
    if len(tau) != h.Kp or not all(1 <= u <= h.K for u in tau) or len(set(tau)) != h.Kp:
        raise InvalidParameter(f"active set must be {h.Kp} distinct users in [1..{h.K}]")
    cached = h._zeta_cache.get(tau)
    if cached is not None:
        return cached
    if h.kind == "man":
        zeta_rows = _man_zeta(h, tau)
    elif h.kind == "tdesign":
        zeta_rows = _tdesign_zeta(h, tau)
    else:
        zeta_rows = _generic_zeta(h, tau)
        if zeta_rows is None:
            raise NotAnHpPda(f"no aligned row subset for tau={tau}")
    result = ZetaResult(tau=tau, zeta_rows=tuple(zeta_rows))
    _assert_star_equal(h, result)
    h._zeta_cache[tau] = result
    return result


def _man_zeta(h: HpPda, tau: tuple[int, ...]) -> list[int]:
    t = h.man_t
    out = []
    for subset in combinations(range(1, h.Kp + 1), t):
        users = tuple(tau[j - 1] for j in subset)
        out.append(man_row_index(h.K, users))
    return out


def _tdesign_zeta(h: HpPda, tau: tuple[int, ...]) -> list[int]:
    cfg = h.config
    d = cfg.design
    block_index = {blk: i for i, blk in enumerate(d.blocks)}
    match_cache: dict = {}
    out = []
    for s, i in cfg.subarray_order():
        for y in combinations(range(1, cfg.t + 1), s):
            u = tuple(sorted(tau[j - 1] for j in y))
            hits = match_cache.get(u)
            if hits is None:
                hits = blocks_matching(d, tau, u)
                match_cache[u] = hits
            if len(hits) < i:
                raise NotAnHpPda(
                    f"only {len(hits)} blocks meet tau={tau} exactly in {u}, need copy {i}"
                )
            out.append(block_index[hits[i - 1]])
    return out


def _generic_zeta(h: HpPda, tau: tuple[int, ...]) -> list[int] | None:
    needed: dict[frozenset, list[int]] = {}
    for r in range(h.Fp):
        pattern = frozenset(c for c, e in enumerate(h.B.grid[r]) if e is STAR)
        needed.setdefault(pattern, []).append(r)
    pools: dict[frozenset, list[int]] = {p: [] for p in needed}
    for f in range(h.F):
        pattern = h.P.pattern(f, tau)
        if pattern in pools:
            pools[pattern].append(f)
    zeta_rows = [0] * h.Fp
    for pattern, b_rows in needed.items():
        pool = pools[pattern]
        if len(pool) < len(b_rows):
            return None
        for b_row, f in zip(b_rows, pool):
            zeta_rows[b_row] = f
    return zeta_rows


def check_zeta(h: HpPda, tau, zeta) -> ZetaResult | None:
    """Certify a given row subset (1-based indices): align its rows with B by
    star pattern, or return None when impossible."""
    tau = tuple(sorted(tau))
    rows = sorted(int(r) - 1 for r in zeta)
    if len(rows) != h.Fp or len(set(rows)) != h.Fp:
        return None
    needed: dict[frozenset, list[int]] = {}
    for r in range(h.Fp):
        pattern = frozenset(c for c, e in enumerate(h.B.grid[r]) if e is STAR)
        needed.setdefault(pattern, []).append(r)
    have: dict[frozenset, list[int]] = {}
    for f in rows:
        have.setdefault(h.P.pattern(f, tau), []).append(f)
    if {p: len(v) for p, v in needed.items()} != {p: len(v) for p, v in have.items()}:
        return None
    zeta_rows = [0] * h.Fp
    for pattern, b_rows in needed.items():
        for b_row, f in zip(b_rows, have[pattern]):
            zeta_rows[b_row] = f
    result = ZetaResult(tau=tau, zeta_rows=tuple(zeta_rows))
    _assert_star_equal(h, result)
    return result


def _assert_star_equal(h: HpPda, res: ZetaResult) -> None:
    for b_row, f in enumerate(res.zeta_rows):
        expected = frozenset(c for c, e in enumerate(h.B.grid[b_row]) if e is STAR)
        if h.P.pattern(f, res.tau) != expected:
            raise NotAnHpPda(
                f"row {f + 1} of P does not match B row {b_row + 1} inside tau={res.tau}"
            )


def verify_hppda(
    h: HpPda, mode: str = "exhaustive", samples: int = 200, seed: int = 0
) -> ValidationReport:
    """Check that B is a PDA and that every (or a sampled) active set has a
    zeta; failures are listed with the offending tau."""
    report = ValidationReport(subject=f"HpPDA {h.params()}")
    b_report = validate_pda(h.B)
    if not b_report.ok:
        for v in b_report.violations:
            report.add("B:" + v.kind, v.message, v.witness)
        return report
    try:
        h.check_shape()
    except InvalidParameter as exc:
        report.add("shape", str(exc))
        return report
    star_counts = Counter(
        sum(1 for row in h.P.grid if row[c] is STAR) for c in range(h.K)
    )
    if len(star_counts) > 1:
        report.add("P", f"per-column star counts differ: {dict(star_counts)}")
        return report

    if mode == "exhaustive":
        taus = combinations(range(1, h.K + 1), h.Kp)
    else:
        report.sampled = True
        rng = random.Random(seed)
        taus = (
            tuple(sorted(rng.sample(range(1, h.K + 1), h.Kp))) for _ in range(samples)
        )
    for tau in taus:
        try:
            find_zeta(h, tau)
        except NotAnHpPda as exc:
            report.add("zeta", str(exc), tau)
    return report


# ---------------------------------------------------------------------------
# Bundle format: parameter header, P grid, B grid, optional removal labels
# ---------------------------------------------------------------------------


def format_bundle(h: HpPda) -> str:
    parts = ["HPPDA " + " ".join(str(x) for x in h.params())]
    parts.append("P")
    parts.append(format_grid(h.P.grid).rstrip("\n"))
    parts.append("B")
    parts.append(format_grid(h.B.grid, h.B.label_order).rstrip("\n"))
    if h.removal:
        dense = sorted(h.B.dense_label(lab) for lab in h.removal)
        parts.append("T " + " ".join(str(x) for x in dense))
    return "\n".join(parts) + "\n"


def parse_bundle(text: str) -> HpPda:
    lines = [ln.split("#", 1)[0].rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or not lines[0].startswith("HPPDA"):
        raise ParseError("bundle must start with an HPPDA header line")
    try:
        params = tuple(int(x) for x in lines[0].split()[1:])
    except ValueError as exc:
        raise ParseError(f"bad header: {exc}") from exc
    if len(params) != 7:
        raise ParseError("header must carry K K' F F' Z Z' S")
    K, Kp, F, Fp, Z, Zp, S = params

    def section(name, start):
        if start >= len(lines) or lines[start].strip() != name:
            raise ParseError(f"expected section {name!r}")
        return start + 1

    idx = section("P", 1)
    p_grid = parse_grid(lines[idx : idx + F + 1])
    idx = idx + F + 1
    idx = section("B", idx)
    b_grid = parse_grid(lines[idx : idx + Fp + 1])
    idx = idx + Fp + 1
    removal = None
    if idx < len(lines):
        toks = lines[idx].split()
        if toks[0] != "T":
            raise ParseError(f"unexpected trailing line {lines[idx]!r}")
        removal = frozenset(int(x) for x in toks[1:])

    if any(e is not STAR and e is not None for row in p_grid for e in row):
        raise ParseError("P section may contain only '*' and '-'")
    if any(e is None for row in b_grid for e in row):
        raise ParseError("B section may not contain '-'")
    P = StarArray(p_grid)
    B = Pda(b_grid)
    h = HpPda(P=P, B=B, kind="generic", removal=removal)
    got = h.params()
    if got != params:
        raise ParseError(f"header {params} does not match grids {got}")
    rep = validate_pda(B)
    if not rep.ok:
        raise ParseError(f"B section is not a PDA: {rep.violations[0]}")
    if removal and not removal <= set(B.label_order):
        raise ParseError("removal labels must occur in B")
    return h


def save_bundle(h: HpPda, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_bundle(h))


def load_bundle(path) -> HpPda:
    with open(path, encoding="utf-8") as fh:
        return parse_bundle(fh.read())
