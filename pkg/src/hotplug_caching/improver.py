"""Rate improvement by deleting surplus broadcast labels from B.

Each active user caches Z coded subfiles but only needs F' - Z beyond its
cache, while plain delivery hands it F' - Z'.  Any label set T whose
intersection with every column of B stays within the surplus Z - Z' can be
blanked, shrinking the rate to (S - |T|) / F'.

Selection strategies:

* ``greedy_t``: rarest-label-first greedy under the per-column budget, for
  arbitrary PDAs.
* ``man_removal_plan``: the closed-form MAN procedure; per surplus round it
  removes one family of pairwise-disjoint (t+1)-subset labels, reaching
  floor(K'/(t+1)) * (Z - Z') removals.
* ``algorithm_t`` (design pairs): exhausts whole subarrays from the smallest
  active level upward, then finishes inside one subarray with disjoint
  partition rounds; its size matches the closed form whenever the surplus
  falls inside the level brackets.
* ``brute_force_best_t``: exact maximum by branch and bound, test oracle for
  small label counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import InvalidRemoval
from .hppda import TSchemeConfig
from .pda import Pda, STAR


@dataclass(frozen=True)
class RemovalPlan:
    """A label set T with its per-column intersection counts."""

    labels: frozenset
    budget: int
    column_counts: tuple[int, ...]
    s_original: int

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def s_reduced(self) -> int:
        return self.s_original - len(self.labels)


@dataclass(frozen=True)
class ReducedPda:
    """B with the removed labels blanked to null."""

    base: Pda
    removed: frozenset

    @property
    def grid(self):
        return tuple(
            tuple(None if e is not STAR and e in self.removed else e for e in row)
            for row in self.base.grid
        )

    @property
    def surviving(self) -> tuple:
        return tuple(lab for lab in self.base.label_order if lab not in self.removed)

    def __str__(self):
        from .pda import format_grid

        return format_grid(self.grid, self.base.label_order)


def make_plan(b: Pda, labels, budget: int) -> RemovalPlan:
    """Validate the per-column budget for a label set and freeze it as a plan."""
    label_set = frozenset(labels)
    unknown = label_set - set(b.label_order)
    if unknown:
        raise InvalidRemoval(f"labels not in B: {sorted(unknown, key=str)}")
    col_counts = tuple(len(label_set & b.column_labels(c)) for c in range(b.K))
    bad = [c + 1 for c, n in enumerate(col_counts) if n > budget]
    if bad:
        raise InvalidRemoval(
            f"columns {bad} exceed the per-column budget {budget}: counts {col_counts}"
        )
    return RemovalPlan(
        labels=label_set, budget=budget, column_counts=col_counts, s_original=b.S
    )


def reduce_b(b: Pda, plan: RemovalPlan | frozenset, budget: int | None = None) -> ReducedPda:
    """Blank the plan's labels; every column keeps at least F' - Z labels."""
    if not isinstance(plan, RemovalPlan):
        if budget is None:
            raise InvalidRemoval("raw label sets need an explicit budget")
        plan = make_plan(b, plan, budget)
    else:
        # re-validate against this B; plans are cheap to rebuild
        plan = make_plan(b, plan.labels, plan.budget)
    return ReducedPda(base=b, removed=plan.labels)


def greedy_t(b: Pda, budget: int) -> RemovalPlan:
    """Maximal-by-inclusion T: labels by ascending occurrence count, accepted
    while no touched column exceeds the budget.  Valid always, maximum not
    guaranteed."""
    if budget < 0:
        raise InvalidRemoval("budget must be nonnegative")
    occurrence = {lab: 0 for lab in b.label_order}
    label_cols: dict = {lab: set() for lab in b.label_order}
    for r, c, e in b.entries():
        occurrence[e] += 1
        label_cols[e].add(c)
    col_used = [0] * b.K
    chosen = []
    order = sorted(b.label_order, key=lambda lab: (occurrence[lab], b.dense_label(lab)))
    for lab in order:
        cols = label_cols[lab]
        if all(col_used[c] < budget for c in cols):
            chosen.append(lab)
            for c in cols:
                col_used[c] += 1
    return make_plan(b, chosen, budget)


# ---------------------------------------------------------------------------
# MAN pairs
# ---------------------------------------------------------------------------


def man_removal_count(Kp: int, t: int, Z: int, Zp: int) -> int:
    """floor(K'/(t+1)) * (Z - Z') labels are removable from a MAN B."""
    return (Kp // (t + 1)) * (Z - Zp)


def man_removal_plan(b: Pda, Kp: int, t: int, Z: int, Zp: int) -> RemovalPlan:
    """A concrete T of the closed-form size: one family of pairwise-disjoint
    (t+1)-subsets per surplus round, families label-disjoint across rounds."""
    rounds = Z - Zp
    family_size = Kp // (t + 1)
    rank = {s: i + 1 for i, s in enumerate(combinations(range(1, Kp + 1), t + 1))}
    families = _round_families(Kp, t + 1, family_size, rounds)
    if families is None:
        raise InvalidRemoval(
            f"no {rounds} label-disjoint families of {family_size} disjoint "
            f"(t+1)-subsets exist; target {man_removal_count(Kp, t, Z, Zp)} unreachable"
        )
    chosen = [rank[s] for fam in families for s in fam]
    return make_plan(b, chosen, rounds)


def _family_options(n: int, size: int, count: int, used: frozenset):
    """Yield every family of ``count`` pairwise-disjoint size-``size`` subsets
    of [n] avoiding ``used``, lex-first order."""
    subsets = [s for s in combinations(range(1, n + 1), size) if s not in used]

    def rec(start, acc, support):
        if len(acc) == count:
            yield list(acc)
            return
        for idx in range(start, len(subsets)):
            s = subsets[idx]
            if support & set(s):
                continue
            yield from rec(idx + 1, acc + [s], support | set(s))

    yield from rec(0, [], set())


def _round_families(n: int, size: int, per_round: int, rounds: int, used: frozenset = frozenset()):
    """``rounds`` label-disjoint families, complete backtracking across rounds."""
    if rounds == 0:
        return []
    for fam in _family_options(n, size, per_round, used):
        rest = _round_families(n, size, per_round, rounds - 1, used | set(fam))
        if rest is not None:
            return [fam] + rest
    return None


# ---------------------------------------------------------------------------
# Design pairs: partition rounds inside one subarray, then Algorithm for B
# ---------------------------------------------------------------------------


def function1(t: int, s: int, z: int, i: int, used: frozenset = frozenset()) -> list:
    """z partition rounds over [t]: each round greedily splits [t] into
    floor(t/(s+1)) disjoint (s+1)-subsets, never reusing a label (U, i); the
    result has z * floor(t/(s+1)) labels and meets every column of B_(s,i)
    at most z times.

    Requires z < C(t-1, s), which guarantees enough disjoint families exist;
    the lex-first choice is backtracked when a previous round blocks it.
    """
    if z == 0:
        return []
    if z < 0 or z >= comb(t - 1, s):
        raise InvalidRemoval(f"need 0 <= z < C(t-1,s)={comb(t - 1, s)}, got z={z}")
    per_round = t // (s + 1)
    taken = frozenset(u for (u, j) in used if j == i)
    fams = _round_families(t, s + 1, per_round, z, taken)
    if fams is None:
        raise InvalidRemoval(
            f"no {z} label-disjoint partition rounds exist for t={t}, s={s}"
        )
    return [(u, i) for fam in fams for u in fam]


@dataclass(frozen=True)
class WSchedule:
    """Active levels of a design pair: W = ascending {s : a_s != 0} and the
    per-level column weights alpha_b = a_(s_b) * C(t-1, s_b)."""

    levels: tuple[int, ...]
    alphas: tuple[int, ...]

    @classmethod
    def of(cls, cfg: TSchemeConfig) -> "WSchedule":
        levels = tuple(s for s in range(1, cfg.t) if cfg.a_of(s))
        alphas = tuple(cfg.a_of(s) * comb(cfg.t - 1, s) for s in levels)
        return cls(levels, alphas)


def subarray_labels(t: int, s: int, i: int) -> list:
    """All C(t, s+1) labels of the subarray B_(s,i)."""
    return [(u, i) for u in combinations(range(1, t + 1), s + 1)]


def theorem_size(cfg: TSchemeConfig, Z: int, Zp: int) -> int | None:
    """Closed-form |T| when the surplus falls inside a level bracket, else None."""
    t = cfg.t
    sched = WSchedule.of(cfg)
    surplus = Z - Zp
    x = 0
    for j, s_j in enumerate(sched.levels):
        col = comb(t - 1, s_j)
        for a in range(cfg.a_of(s_j)):
            if (a + 1) * col + x > surplus >= a * col + x:
                head = sum(
                    cfg.a_of(s_b) * comb(t, s_b + 1) for s_b in sched.levels[:j]
                )
                return head + a * comb(t, s_j + 1) + (t // (s_j + 1)) * (
                    surplus - x - a * col
                )
        x += sched.alphas[j]
    return None


def algorithm_t(cfg: TSchemeConfig, Z: int, Zp: int) -> RemovalPlan:
    """Removal set for a design pair B per the level-bracket schedule.

    Whole subarrays are taken from the smallest active level upward; the
    remainder comes from partition rounds (``function1``) in the next copy.
    When the surplus covers every level, all labels are removable.
    """
    from .hppda import tdesign_hppda

    t = cfg.t
    surplus = Z - Zp
    if surplus < 0:
        raise InvalidRemoval(f"negative surplus Z - Z' = {surplus}")
    b = tdesign_hppda(cfg).B
    sched = WSchedule.of(cfg)
    chosen: list = []
    x = 0
    for j, s_j in enumerate(sched.levels):
        col = comb(t - 1, s_j)
        for a in range(cfg.a_of(s_j)):
            if (a + 1) * col + x > surplus >= a * col + x:
                for s_b in sched.levels[:j]:
                    for i in range(1, cfg.a_of(s_b) + 1):
                        chosen.extend(subarray_labels(t, s_b, i))
                for i in range(1, a + 1):
                    chosen.extend(subarray_labels(t, s_j, i))
                z = surplus - x - a * col
                chosen.extend(function1(t, s_j, z, a + 1))
                plan = make_plan(b, chosen, surplus)
                want = theorem_size(cfg, Z, Zp)
                assert plan.size == want, (plan.size, want)
                return plan
        x += sched.alphas[j]
    # surplus >= total removable per column: every label goes
    for s_b in sched.levels:
        for i in range(1, cfg.a_of(s_b) + 1):
            chosen.extend(subarray_labels(t, s_b, i))
    return make_plan(b, chosen, surplus)


# ---------------------------------------------------------------------------
# Exact oracle
# ---------------------------------------------------------------------------


def brute_force_best_t(b: Pda, budget: int) -> RemovalPlan:
    """Maximum-size T by branch and bound over label subsets (small S only)."""
    labels = list(b.label_order)
    label_cols = [frozenset(c for c in range(b.K) if lab in b.column_labels(c)) for lab in labels]
    n = len(labels)
    best: list = []

    def rec(idx: int, chosen: list, col_used: list):
        nonlocal best
        if len(chosen) + (n - idx) <= len(best):
            return
        if idx == n:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        cols = label_cols[idx]
        if all(col_used[c] < budget for c in cols):
            for c in cols:
                col_used[c] += 1
            chosen.append(labels[idx])
            rec(idx + 1, chosen, col_used)
            chosen.pop()
            for c in cols:
                col_used[c] -= 1
        rec(idx + 1, chosen, col_used)

    rec(0, [], [0] * b.K)
    return make_plan(b, best, budget)
