"""Pure-Python byte kernels for GF(2^m) vector arithmetic (m <= 8).

Fallback used when the compiled extension is unavailable.  Both operations
lean on CPython's C-level primitives: big-int XOR for elementwise addition
and bytes.translate for scalar multiplication, so the fallback stays usable
at simulation scale.
"""


def xor_into(dst: bytearray, src) -> None:
    """dst[i] ^= src[i] for all i."""
    n = len(dst)
    if len(src) != n:
        raise ValueError("length mismatch")
    dst[:] = (
        int.from_bytes(dst, "little") ^ int.from_bytes(src, "little")
    ).to_bytes(n, "little")


def axpy_into(dst: bytearray, table, src) -> None:
    """dst[i] ^= table[src[i]] for all i, table being a 256-entry scaling row."""
    n = len(dst)
    if len(src) != n:
        raise ValueError("length mismatch")
    if len(table) != 256:
        raise ValueError("table must have 256 entries")
    scaled = bytes(src).translate(table)
    dst[:] = (
        int.from_bytes(dst, "little") ^ int.from_bytes(scaled, "little")
    ).to_bytes(n, "little")
