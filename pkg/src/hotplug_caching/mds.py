"""Systematic [n, k] MDS erasure codes from Vandermonde matrices.

A file split into k subfiles is encoded into n coded subfiles such that any
k of them recover the original.  Symbol blocks are either ``bytes`` (binary
fields up to GF(2^8), the fast path used by the simulator) or sequences of
ints (any field, used at small scale in tests).

The generator starts from the k x n Vandermonde matrix over n distinct
nonzero evaluation points and is row-reduced to systematic form, so the
first k coded subfiles equal the plain subfiles and the code stays MDS
(row operations do not change the generated code).
"""

from __future__ import annotations

import random

from .errors import FieldTooSmall, InsufficientSymbols, ShapeError
from .gf import BinaryField, FieldContext


class MdsCode:
    """Immutable [n, k] MDS code over a field context.

    ``generator`` is the systematic k x n matrix; decode submatrix inverses
    are memoized per position set.
    """

    def __init__(self, k: int, n: int, field: FieldContext, generator):
        self.k = k
        self.n = n
        self.field = field
        self.generator = tuple(tuple(row) for row in generator)
        self._inverse_cache: dict[tuple[int, ...], tuple[tuple[int, ...], ...]] = {}

    def __repr__(self):
        return f"MdsCode[{self.n},{self.k}]({self.field!r})"

    @property
    def _bytes_capable(self) -> bool:
        return isinstance(self.field, BinaryField) and self.field.order <= 256

    def encode(self, subfiles) -> list:
        return encode(self, subfiles)

    def decode(self, available) -> list:
        return decode(self, available)

    def _submatrix_inverse(self, positions: tuple[int, ...]):
        inv = self._inverse_cache.get(positions)
        if inv is None:
            rows = [[self.generator[i][p - 1] for i in range(self.k)] for p in positions]
            inverted = _invert_matrix(self.field, rows)
            if inverted is None:
                raise RuntimeError(
                    f"singular {self.k}x{self.k} submatrix at positions {positions}; "
                    "MDS invariant violated"
                )
            inv = tuple(tuple(row) for row in inverted)
            self._inverse_cache[positions] = inv
        return inv


def make_mds(k: int, n: int, field: FieldContext) -> MdsCode:
    """Systematic Vandermonde code of dimension k and length n over the field."""
    if not 1 <= k <= n:
        raise ShapeError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > field.order - 1:
        raise FieldTooSmall(f"length {n} needs field order > {n}, got {field.order}")
    if isinstance(field, BinaryField):
        points = [field.exp[j] for j in range(n)]
    else:
        points = list(range(1, n + 1))
    vand = [[field.pow(x, i) for x in points] for i in range(k)]
    head = [[vand[i][j] for j in range(k)] for i in range(k)]
    head_inv = _invert_matrix(field, head)
    assert head_inv is not None, "Vandermonde head must be invertible"
    gen = _matmul(field, head_inv, vand)
    return MdsCode(k, n, field, gen)


def encode(code: MdsCode, subfiles) -> list:
    """Encode k equal-length symbol blocks into n coded blocks.

    Coded block j is sum_i generator[i][j] * subfiles[i], elementwise.
    """
    if len(subfiles) != code.k:
        raise ShapeError(f"expected {code.k} subfiles, got {len(subfiles)}")
    length = len(subfiles[0])
    if any(len(b) != length for b in subfiles):
        raise ShapeError("subfiles must have equal length")
    field = code.field
    if code._bytes_capable and all(isinstance(b, (bytes, bytearray)) for b in subfiles):
        out = []
        for j in range(code.n):
            acc = bytearray(length)
            _accumulate_bytes(code, acc, [(code.generator[i][j], subfiles[i]) for i in range(code.k)])
            out.append(bytes(acc))
        return out
    out = []
    for j in range(code.n):
        acc = [0] * length
        for i in range(code.k):
            g = code.generator[i][j]
            if g == 0:
                continue
            blk = subfiles[i]
            for pos in range(length):
                acc[pos] = field.add(acc[pos], field.mul(g, blk[pos]))
        out.append(acc)
    return out


def decode(code: MdsCode, available) -> list:
    """Recover the k original blocks from any k coded blocks.

    ``available`` maps 1-based coded positions to blocks; the k smallest
    positions are used.
    """
    if len(available) < code.k:
        raise InsufficientSymbols(f"need {code.k} positions, got {len(available)}")
    positions = tuple(sorted(available))[: code.k]
    if positions[0] < 1 or positions[-1] > code.n:
        raise ShapeError(f"positions must lie in [1, {code.n}]")
    inv = code._submatrix_inverse(positions)
    blocks = [available[p] for p in positions]
    length = len(blocks[0])
    if any(len(b) != length for b in blocks):
        raise ShapeError("coded blocks must have equal length")
    field = code.field
    if code._bytes_capable and all(isinstance(b, (bytes, bytearray)) for b in blocks):
        out = []
        for i in range(code.k):
            acc = bytearray(length)
            _accumulate_bytes(code, acc, [(inv[i][a], blocks[a]) for a in range(code.k)])
            out.append(bytes(acc))
        return out
    out = []
    for i in range(code.k):
        acc = [0] * length
        for a in range(code.k):
            c = inv[i][a]
            if c == 0:
                continue
            blk = blocks[a]
            for pos in range(length):
                acc[pos] = field.add(acc[pos], field.mul(c, blk[pos]))
        out.append(acc)
    return out


def verify_mds(code: MdsCode, samples: int = 1000, seed: int = 0) -> bool:
    """Check that k x k submatrices of the generator are invertible.

    Exhaustive for n <= 20, otherwise at least ``samples`` random position
    sets.
    """
    from itertools import combinations

    field = code.field
    if code.n <= 20:
        subsets = combinations(range(1, code.n + 1), code.k)
    else:
        rng = random.Random(seed)
        subsets = (
            tuple(sorted(rng.sample(range(1, code.n + 1), code.k))) for _ in range(samples)
        )
    for positions in subsets:
        rows = [[code.generator[i][p - 1] for i in range(code.k)] for p in positions]
        if _invert_matrix(field, rows) is None:
            return False
    return True


def _accumulate_bytes(code: MdsCode, acc: bytearray, terms) -> None:
    from . import kernels

    field = code.field
    assert isinstance(field, BinaryField)
    for coeff, blk in terms:
        if coeff == 0:
            continue
        if coeff == 1:
            kernels.xor_into(acc, blk)
        else:
            kernels.axpy_into(acc, field.scale_table(coeff), blk)


def _invert_matrix(field: FieldContext, rows):
    """Gauss-Jordan inverse over the field; None when singular."""
    k = len(rows)
    aug = [list(rows[i]) + [1 if j == i else 0 for j in range(k)] for i in range(k)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pinv = field.inv(aug[col][col])
        aug[col] = [field.mul(pinv, x) for x in aug[col]]
        for r in range(k):
            if r == col or aug[r][col] == 0:
                continue
            factor = aug[r][col]
            aug[r] = [field.sub(x, field.mul(factor, y)) for x, y in zip(aug[r], aug[col])]
    return [row[k:] for row in aug]


def _matmul(field: FieldContext, a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc = 0
            for x in range(inner):
                if a[i][x] and b[x][j]:
                    acc = field.add(acc, field.mul(a[i][x], b[x][j]))
            out[i][j] = acc
    return out
