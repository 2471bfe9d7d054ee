"""Combinatorial t-(v, k, lambda) designs: validation, counting, constructions.

Points are the 1-based integers [1..v].  Blocks are stored as sorted tuples
and the block list is kept in lexicographic order, which fixes the row
indexing of every array built from a design.

Constructions provided here:

* ``complete_design``: all k-subsets of [v].
* ``reduce_strength`` / ``derived_design``: the standard transformations.
* ``inversive_plane``: the Moebius-plane 3-(q^2+1, q+1, 1) design, built as
  the orbit of the projective subline PG(1, q) under fractional linear maps
  over GF(q^2).
* ``search_3design_v43``: randomized exact-multicover search for a
  3-(v, 4, 3) design on any even v >= 6 (every triple covered exactly three
  times by distinct quadruples).

Designs are immutable and safe to share; validation walks t-subsets
exhaustively up to 10^6 of them and samples beyond that.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import InvalidParameter, ParseError, SearchFailed
from .report import ValidationReport

EXHAUSTIVE_SUBSET_LIMIT = 10**6


@dataclass(frozen=True)
class Design:
    """A t-(v, k, lambda) design with non-repeated blocks."""

    v: int
    t: int
    k: int
    lam: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        normalized = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", normalized)

    @property
    def b(self) -> int:
        return len(self.blocks)

    @property
    def points(self) -> range:
        return range(1, self.v + 1)

    def name(self) -> str:
        return f"{self.t}-({self.v},{self.k},{self.lam})"


@dataclass(frozen=True)
class DesignCounts:
    """Derived block counts: lambda_s for s in [0..t], lambda_s^t for s in [1..t-1]."""

    lambda_s: tuple[int, ...]
    lambda_s_t: dict[int, int]

    @property
    def b(self) -> int:
        return self.lambda_s[0]

    @property
    def lambda1(self) -> int:
        return self.lambda_s[1]


def counts(d: Design) -> DesignCounts:
    """lambda_s = lam*C(v-s, t-s)/C(k-s, t-s); lambda_s^t = lam*C(v-t, k-s)/C(v-t, k-t)."""
    lams = []
    for s in range(d.t + 1):
        num = d.lam * comb(d.v - s, d.t - s)
        den = comb(d.k - s, d.t - s)
        if num % den:
            raise InvalidParameter(f"lambda_{s} is not an integer for {d.name()}")
        lams.append(num // den)
    lst = {}
    den = comb(d.v - d.t, d.k - d.t)
    for s in range(1, d.t):
        num = d.lam * comb(d.v - d.t, d.k - s)
        if num % den:
            raise InvalidParameter(f"lambda_{s}^{d.t} is not an integer for {d.name()}")
        lst[s] = num // den
    return DesignCounts(tuple(lams), lst)


def validate_design(
    d: Design,
    max_exhaustive: int = EXHAUSTIVE_SUBSET_LIMIT,
    sample_size: int = 20000,
    seed: int = 0,
) -> ValidationReport:
    """Check every design invariant, reporting each violation with a witness."""
    report = ValidationReport(subject=d.name())
    if not (d.v > d.k >= d.t >= 1):
        report.add("parameters", f"need v > k >= t >= 1, got v={d.v}, k={d.k}, t={d.t}")
        return report
    point_set = set(d.points)
    for blk in d.blocks:
        if len(blk) != d.k or len(set(blk)) != d.k:
            report.add("block-size", f"block must have {d.k} distinct points", blk)
        elif not set(blk) <= point_set:
            report.add("block-range", f"block has points outside [1..{d.v}]", blk)
    if len(set(d.blocks)) != len(d.blocks):
        dup = next(b for b, c in Counter(d.blocks).items() if c > 1)
        report.add("repeated-block", "blocks must be pairwise distinct", dup)
    if report.violations:
        return report

    expected_b = d.lam * comb(d.v, d.t) / comb(d.k, d.t)
    if d.b != expected_b:
        report.add(
            "block-count",
            f"b={d.b} but lam*C(v,t)/C(k,t)={expected_b}",
        )

    total_subsets = comb(d.v, d.t)
    if total_subsets <= max_exhaustive:
        cover: Counter = Counter()
        for blk in d.blocks:
            cover.update(combinations(blk, d.t))
        for sub in combinations(d.points, d.t):
            got = cover.get(sub, 0)
            if got != d.lam:
                report.add(
                    "coverage",
                    f"{d.t}-subset covered {got} times, expected {d.lam}",
                    sub,
                )
                break
    else:
        report.sampled = True
        rng = random.Random(seed)
        block_sets = [set(b) for b in d.blocks]
        for _ in range(sample_size):
            sub = set(rng.sample(d.points, d.t))
            got = sum(1 for bs in block_sets if sub <= bs)
            if got != d.lam:
                report.add(
                    "coverage",
                    f"{d.t}-subset covered {got} times, expected {d.lam}",
                    tuple(sorted(sub)),
                )
                break
    return report


def complete_design(v: int, k: int, t: int) -> Design:
    """All C(v, k) k-subsets of [v]; a t-(v, k, C(v-t, k-t)) design."""
    if not v > k >= t >= 1:
        raise InvalidParameter(f"need v > k >= t >= 1, got v={v}, k={k}, t={t}")
    return Design(v, t, k, comb(v - t, k - t), tuple(combinations(range(1, v + 1), k)))


def reduce_strength(d: Design, s: int) -> Design:
    """Reinterpret a t-design as an s-(v, k, lambda_s) design, s < t."""
    if not 1 <= s < d.t:
        raise InvalidParameter(f"need 1 <= s < t={d.t}, got s={s}")
    lam_s = counts(d).lambda_s[s]
    return Design(d.v, s, d.k, lam_s, d.blocks)


def derived_design(d: Design, z) -> Design:
    """Blocks through the point set z with z removed, points relabeled to [v-|z|]."""
    zset = frozenset(z)
    if not zset:
        return d
    if not zset <= set(d.points):
        raise InvalidParameter(f"{sorted(zset)} is not a subset of the point set")
    i = len(zset)
    if i >= d.t:
        raise InvalidParameter(f"need |z| < t, got |z|={i}, t={d.t}")
    remaining = [x for x in d.points if x not in zset]
    relabel = {x: j + 1 for j, x in enumerate(remaining)}
    blocks = [
        tuple(sorted(relabel[x] for x in blk if x not in zset))
        for blk in d.blocks
        if zset <= set(blk)
    ]
    return Design(d.v - i, d.t - i, d.k - i, d.lam, tuple(blocks))


# ---------------------------------------------------------------------------
# Inversive (Moebius) planes
# ---------------------------------------------------------------------------


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise InvalidParameter(f"{q} is not a prime power")
    p = next(f for f in range(2, q + 1) if q % f == 0)
    e = 0
    n = q
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise InvalidParameter(f"{q} is not a prime power")
    return p, e


def _poly_divides(p: int, div: list[int], poly: list[int]) -> bool:
    """Whether monic ``div`` divides monic ``poly``, coefficients over GF(p)."""
    rem = list(poly)
    dd = len(div) - 1
    while len(rem) - 1 >= dd:
        lead = rem[-1]
        if lead:
            shift = len(rem) - 1 - dd
            for i, c in enumerate(div):
                rem[shift + i] = (rem[shift + i] - lead * c) % p
        rem.pop()
    return all(c == 0 for c in rem)


class _SmallField:
    """GF(p^d) for tiny orders, via a searched irreducible polynomial.

    Elements are integers in [0, p^d - 1] encoding coefficient vectors in
    base p.  Only used internally by design constructions; the public MDS
    field kinds stay prime / binary.
    """

    def __init__(self, p: int, d: int):
        self.p = p
        self.d = d
        self.order = p**d
        self._poly = self._find_irreducible()
        self._build_log_tables()

    def _to_vec(self, x):
        p, d = self.p, self.d
        out = []
        for _ in range(d + 1):
            out.append(x % p)
            x //= p
        return out

    def _polymul_mod(self, a: int, b: int) -> int:
        p, d = self.p, self.d
        av, bv = self._to_vec(a), self._to_vec(b)
        prod = [0] * (2 * d + 1)
        for i in range(d):
            if av[i] == 0:
                continue
            for j in range(d):
                prod[i + j] = (prod[i + j] + av[i] * bv[j]) % p
        red = self._poly_vec
        for deg in range(2 * d, d - 1, -1):
            c = prod[deg]
            if c == 0:
                continue
            prod[deg] = 0
            for j in range(d):
                prod[deg - d + j] = (prod[deg - d + j] - c * red[j]) % p
        acc = 0
        for i in reversed(range(d)):
            acc = acc * p + prod[i]
        return acc

    def _find_irreducible(self) -> int:
        p, d = self.p, self.d
        if d == 1:
            self._poly_vec = [0]
            return p
        # Monic degree-d polynomial with no monic divisor of degree <= d//2,
        # lex-smallest by low-coefficient encoding.
        for low in range(p**d):
            coeffs = self._to_vec(low)[:d] + [1]
            if self._is_irreducible(coeffs):
                self._poly_vec = coeffs[:d]
                return low + p**d
        raise InvalidParameter(f"no irreducible polynomial found for GF({p}^{d})")

    def _is_irreducible(self, coeffs) -> bool:
        p = self.p
        d = len(coeffs) - 1
        for deg in range(1, d // 2 + 1):
            for low in range(p**deg):
                div = self._to_vec(low)[:deg] + [1]
                if _poly_divides(p, div, coeffs):
                    return False
        return True

    def _build_log_tables(self):
        order = self.order
        # Find a multiplicative generator by direct order checks.
        for g in range(2, order):
            seen = 1
            x = g
            n = 1
            while x != 1:
                x = self._polymul_mod(x, g)
                n += 1
                if n > order:
                    break
            if n == order - 1:
                self.gen = g
                break
        else:
            raise InvalidParameter(f"no generator found in GF({self.p}^{self.d})")
        exp = [0] * (order - 1)
        log = [0] * order
        x = 1
        for i in range(order - 1):
            exp[i] = x
            log[x] = i
            x = self._polymul_mod(x, self.gen)
        self.exp = exp
        self.log = log

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.order - 1)]

    def add(self, a, b):
        p, d = self.p, self.d
        acc = 0
        mult = 1
        for _ in range(d):
            acc += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return acc

    def sub(self, a, b):
        p, d = self.p, self.d
        acc = 0
        mult = 1
        for _ in range(d):
            acc += ((a - b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return acc

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError
        return self.exp[(self.order - 1 - self.log[a]) % (self.order - 1)]

    def subfield(self, sub_order: int) -> list[int]:
        """Elements x with x^sub_order = x, i.e. the copy of GF(sub_order)."""
        step = (self.order - 1) // (sub_order - 1)
        elems = [0] + [self.exp[i * step] for i in range(sub_order - 1)]
        return sorted(elems)


def inversive_plane(q: int) -> Design:
    """The 3-(q^2+1, q+1, 1) Moebius plane for a prime power q.

    Points are GF(q^2) plus an infinity point; the circles are the images of
    the subline GF(q) + {inf} under fractional linear maps.  Circles are
    enumerated by spanning triples: the unique circle through each point
    triple is the image of (0, 1, inf) mapped onto it.
    """
    p, e = _prime_power(q)
    fld = _SmallField(p, 2 * e)
    qq = fld.order  # q^2
    inf = qq  # sentinel for the infinity point

    def proj(x):
        return (1, 0) if x == inf else (x, 1)

    def unproj(u, v):
        if v == 0:
            return inf
        return fld.mul(u, fld.inv(v))

    base = fld.subfield(q) + [inf]
    base_proj = [proj(x) for x in base]

    def circle_through(a, b, c):
        # Matrix sending (0:1) -> a, (1:1) -> b, (1:0) -> c.
        au, av = proj(a)
        bu, bv = proj(b)
        cu, cv = proj(c)
        det = fld.sub(fld.mul(cu, av), fld.mul(au, cv))
        det_inv = fld.inv(det)
        alpha = fld.mul(det_inv, fld.sub(fld.mul(bu, av), fld.mul(au, bv)))
        beta = fld.mul(det_inv, fld.sub(fld.mul(cu, bv), fld.mul(bu, cv)))
        m00, m01 = fld.mul(alpha, cu), fld.mul(beta, au)
        m10, m11 = fld.mul(alpha, cv), fld.mul(beta, av)
        pts = []
        for u, v in base_proj:
            nu = fld.add(fld.mul(m00, u), fld.mul(m01, v))
            nv = fld.add(fld.mul(m10, u), fld.mul(m11, v))
            pts.append(unproj(nu, nv))
        return frozenset(pts)

    points = list(range(qq + 1))
    covered: set[tuple[int, int, int]] = set()
    circles: list[frozenset] = []
    for tri in combinations(points, 3):
        if tri in covered:
            continue
        circ = circle_through(*tri)
        if len(circ) != q + 1:
            raise RuntimeError("degenerate circle; field arithmetic broken")
        circles.append(circ)
        for sub in combinations(sorted(circ), 3):
            covered.add(sub)
    blocks = tuple(tuple(sorted(x + 1 for x in circ)) for circ in circles)
    design = Design(qq + 1, 3, q + 1, 1, blocks)
    if design.b != q * (qq + 1):
        raise RuntimeError(f"expected {q*(qq+1)} circles, found {design.b}")
    return design


# ---------------------------------------------------------------------------
# Randomized search for 3-(v, 4, 3) designs
# ---------------------------------------------------------------------------


def search_3design_v43(v: int, seed: int = 0, budget: int = 2_000_000) -> Design:
    """Find a 3-(v, 4, 3) design on an even v >= 6 by randomized hill climbing.

    Every triple of [v] must end up covered exactly three times by distinct
    quadruples.  Revolving-door walk: pick an under-covered triple, add a
    random unused quadruple through it, and evict one previously chosen
    quadruple from each triple the addition over-covers.  The block count
    only ever moves toward the target, and the walk escapes plateaus by
    randomness.  SearchFailed once the step budget is spent.
    """
    if v < 6 or v % 2:
        raise InvalidParameter(f"need even v >= 6, got {v}")
    if v == 6:
        return complete_design(6, 4, 3)  # C(3,1) = 3 = lambda already

    quads = list(combinations(range(1, v + 1), 4))
    triples = list(combinations(range(1, v + 1), 3))
    tri_index = {t: i for i, t in enumerate(triples)}
    quad_tris = [tuple(tri_index[t] for t in combinations(qd, 3)) for qd in quads]
    tri_quads: list[list[int]] = [[] for _ in triples]
    for qi, tids in enumerate(quad_tris):
        for ti in tids:
            tri_quads[ti].append(qi)
    n_tri = len(triples)
    target = 3 * n_tri // 4

    rng = random.Random(seed)
    count = [0] * n_tri
    chosen: set[int] = set()
    open_triples = set(range(n_tri))

    def add(qi: int):
        chosen.add(qi)
        for x in quad_tris[qi]:
            count[x] += 1
            if count[x] == 3:
                open_triples.discard(x)

    def remove(qi: int):
        chosen.discard(qi)
        for x in quad_tris[qi]:
            if count[x] == 3:
                open_triples.add(x)
            count[x] -= 1

    steps = 0
    while len(chosen) < target:
        steps += 1
        if steps > budget:
            raise SearchFailed(
                f"no 3-({v},4,3) design found within budget {budget} (seed {seed})"
            )
        ti = rng.choice(tuple(open_triples))
        options = [qi for qi in tri_quads[ti] if qi not in chosen]
        # fewest over-covered triples first, so most moves make pure progress
        cost = [sum(1 for x in quad_tris[qi] if count[x] == 3) for qi in options]
        low = min(cost)
        qi = rng.choice([q for q, c in zip(options, cost) if c == low])
        evicted = []
        for x in quad_tris[qi]:
            if count[x] == 3:
                victims = [qj for qj in tri_quads[x] if qj in chosen]
                evicted.append(rng.choice(victims))
        add(qi)
        for qj in set(evicted):
            if qj in chosen:
                remove(qj)
    blocks = tuple(quads[qi] for qi in sorted(chosen))
    return Design(v, 3, 4, 3, blocks)


# ---------------------------------------------------------------------------
# Text format: header "t v k lambda", one block per line
# ---------------------------------------------------------------------------


def format_design(d: Design) -> str:
    lines = [f"# {d.name()} design, {d.b} blocks", f"{d.t} {d.v} {d.k} {d.lam}"]
    lines.extend(" ".join(str(x) for x in blk) for blk in d.blocks)
    return "\n".join(lines) + "\n"


def parse_design(text: str, validate: bool = True) -> Design:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line)
    if not rows:
        raise ParseError("empty design file")
    head = rows[0].split()
    if len(head) != 4:
        raise ParseError(f"header must be 't v k lambda', got {rows[0]!r}")
    try:
        t, v, k, lam = (int(x) for x in head)
        blocks = tuple(tuple(int(x) for x in row.split()) for row in rows[1:])
    except ValueError as exc:
        raise ParseError(f"bad integer in design file: {exc}") from exc
    for blk in blocks:
        if len(blk) != k:
            raise ParseError(f"block {blk} does not have {k} points")
    d = Design(v, t, k, lam, blocks)
    if validate:
        rep = validate_design(d)
        if not rep.ok:
            raise InvalidParameter(f"design file fails validation: {rep.violations[0]}")
    return d


def save_design(d: Design, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_design(d))


def load_design(path, validate: bool = True) -> Design:
    with open(path, encoding="utf-8") as fh:
        return parse_design(fh.read(), validate=validate)
