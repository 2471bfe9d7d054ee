"""End-to-end execution of the caching scheme with real file bytes.

Placement splits every file into F' subfiles, MDS-encodes them into F coded
subfiles, and fills each user's cache along the stars of its column of P.
Delivery picks the row subset aligning P with B for the active set and
broadcasts one XOR per surviving label.  Each active user peels every
transmission carrying its column's label with cached subfiles of the other
users' demands, then MDS-decodes its file from cache plus received pieces.

``exhaustive_check`` drives this over every active set and every demand
vector (or a seeded sample when the demand space is large) and verifies
byte-exact recovery plus the measured rate.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .errors import DecodeFailure, InvalidParameter, ShapeError
from .gf import BinaryField
from .hppda import HpPda, ZetaResult, find_zeta
from .improver import RemovalPlan
from .mds import MdsCode, decode
from .pda import STAR

DEFAULT_SUBFILE_LEN = 64


@dataclass
class ServerState:
    """Files, their per-file coded subfiles, and the scheme objects."""

    hppda: HpPda
    code: MdsCode
    subfile_len: int
    files: tuple[bytes, ...]
    coded: tuple[tuple[bytes, ...], ...]  # coded[n-1][f-1]

    @property
    def n_files(self) -> int:
        return len(self.files)


@dataclass
class UserCache:
    """Cache of one user: the same coded positions for every file."""

    user: int
    positions: tuple[int, ...]
    blocks: dict[int, dict[int, bytes]]  # file -> position -> payload

    def total_symbols(self) -> int:
        return sum(len(blk) for per_file in self.blocks.values() for blk in per_file.values())


@dataclass
class DeliverySession:
    """One delivery round: transmissions plus their summand provenance."""

    active: tuple[int, ...]
    demands: dict[int, int]
    zeta: ZetaResult
    removed: frozenset
    transmissions: dict  # label -> payload bytes
    composition: dict  # label -> tuple of (user, file, position)
    file_lengths: tuple[int, ...]
    subfile_count: int

    def trace(self, dense: dict | None = None) -> str:
        lines = []
        for label, terms in self.composition.items():
            name = dense.get(label, label) if dense else label
            rhs = " + ".join(f"C_{{{n},{f}}}" for _, n, f in terms)
            lines.append(f"X_{name} = {rhs}")
        return "\n".join(lines)


def place(
    hppda: HpPda, code: MdsCode, files, subfile_len: int | None = None
) -> tuple[ServerState, list[UserCache]]:
    """Run the placement phase; returns the server state and all K caches.

    Every user ends up caching exactly N * Z coded subfiles, a Z / F'
    fraction of the library.
    """
    if not files:
        raise ShapeError("need at least one file")
    if code.k != hppda.Fp or code.n != hppda.F:
        raise ShapeError(
            f"code must be [{hppda.F},{hppda.Fp}], got [{code.n},{code.k}]"
        )
    if not (isinstance(code.field, BinaryField) and code.field.order == 256):
        raise InvalidParameter("byte payload placement requires GF(2^8)")
    files = tuple(bytes(f) for f in files)
    fp = hppda.Fp
    length = subfile_len
    if length is None:
        length = max(1, -(-max(len(f) for f in files) // fp))
    if any(len(f) > fp * length for f in files):
        raise ShapeError(f"files must fit in F' * L = {fp * length} bytes")

    coded = []
    for data in files:
        padded = data.ljust(fp * length, b"\x00")
        subs = [padded[i * length : (i + 1) * length] for i in range(fp)]
        coded.append(tuple(code.encode(subs)))
    server = ServerState(
        hppda=hppda, code=code, subfile_len=length, files=files, coded=tuple(coded)
    )

    caches = []
    for user in range(1, hppda.K + 1):
        positions = hppda.P.column_stars(user)
        blocks = {
            n: {f: coded[n - 1][f - 1] for f in positions}
            for n in range(1, len(files) + 1)
        }
        caches.append(UserCache(user=user, positions=positions, blocks=blocks))
    return server, caches


def deliver(
    server: ServerState, active, demands, removal: RemovalPlan | frozenset | None = None
) -> DeliverySession:
    """Broadcast one coded sum per surviving label of B over the active set."""
    h = server.hppda
    active = tuple(sorted(active))
    if len(active) != h.Kp:
        raise InvalidParameter(f"active set must have K'={h.Kp} users")
    if isinstance(demands, dict):
        demand_map = {int(u): int(d) for u, d in demands.items()}
    else:
        if len(demands) != len(active):
            raise InvalidParameter("one demand per active user")
        demand_map = dict(zip(active, (int(d) for d in demands)))
    if set(demand_map) != set(active):
        raise InvalidParameter("demands must cover exactly the active users")
    if any(not 1 <= d <= server.n_files for d in demand_map.values()):
        raise InvalidParameter(f"demands must index files in [1..{server.n_files}]")

    removed = frozenset()
    if isinstance(removal, RemovalPlan):
        removed = removal.labels
    elif removal:
        removed = frozenset(removal)

    zeta = find_zeta(h, active)
    entries_by_label: dict = {lab: [] for lab in h.B.label_order if lab not in removed}
    for r, c, lab in h.B.entries():
        if lab not in removed:
            entries_by_label[lab].append((c, r))

    transmissions = {}
    composition = {}
    for lab, cells in entries_by_label.items():
        payload = bytearray(server.subfile_len)
        terms = []
        for c, r in sorted(cells):
            user = active[c]
            n = demand_map[user]
            f = zeta.zeta_rows[r] + 1
            _xor(payload, server.coded[n - 1][f - 1])
            terms.append((user, n, f))
        transmissions[lab] = bytes(payload)
        composition[lab] = tuple(terms)
    return DeliverySession(
        active=active,
        demands=demand_map,
        zeta=zeta,
        removed=removed,
        transmissions=transmissions,
        composition=composition,
        file_lengths=tuple(len(f) for f in server.files),
        subfile_count=h.Fp,
    )


def decode_user(cache: UserCache, session: DeliverySession, code: MdsCode) -> bytes:
    """Reconstruct the user's demanded file from its cache and the session.

    Every transmission labeled in the user's column peels down to one coded
    subfile of the demand: all other summands are cached by PDA condition C3.
    """
    user = cache.user
    if user not in session.active:
        raise InvalidParameter(f"user {user} was not active")
    demand = session.demands[user]
    got: dict[int, bytes] = dict(cache.blocks[demand])
    for lab, terms in session.composition.items():
        own = [(n, f) for u, n, f in terms if u == user]
        if not own:
            continue
        payload = bytearray(session.transmissions[lab])
        for u, n, f in terms:
            if u == user:
                continue
            piece = cache.blocks.get(n, {}).get(f)
            if piece is None:
                raise DecodeFailure(
                    f"user {user} lacks cached C_{{{n},{f}}} needed to peel X_{lab}"
                )
            _xor(payload, piece)
        got[own[0][1]] = bytes(payload)
    if len(got) < code.k:
        raise DecodeFailure(
            f"user {user} holds {len(got)} coded subfiles, needs {code.k}"
        )
    subs = decode(code, got)
    data = b"".join(subs)
    return data[: session.file_lengths[demand - 1]]


def _xor(dst: bytearray, src: bytes) -> None:
    from . import kernels

    kernels.xor_into(dst, src)


@dataclass
class CheckReport:
    """Outcome of an exhaustive (or sampled) correctness sweep."""

    sessions: int = 0
    decode_failures: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    rates: set = field(default_factory=set)
    seed: int = 0
    demand_mode: str = "exhaustive"
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.decode_failures and not self.mismatches and len(self.rates) == 1

    @property
    def measured_rate(self) -> Fraction:
        if len(self.rates) != 1:
            raise DecodeFailure(f"rate not uniform across sessions: {sorted(self.rates)}")
        return next(iter(self.rates))

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        rate = str(self.measured_rate) if len(self.rates) == 1 else f"mixed {sorted(self.rates)}"
        return (
            f"{status}: {self.sessions} sessions ({self.demand_mode} demands, seed {self.seed}), "
            f"{len(self.decode_failures) + len(self.mismatches)} failures, "
            f"measured rate {rate}, {self.elapsed:.2f}s"
        )


def exhaustive_check(
    hppda: HpPda,
    code: MdsCode,
    removal: RemovalPlan | frozenset | None = None,
    n_files: int = 4,
    trials: int = 200,
    seed: int = 0,
    subfile_len: int = DEFAULT_SUBFILE_LEN,
    demand_limit: int = 10**4,
) -> CheckReport:
    """Verify byte-exact recovery over every active set.

    All demand vectors are enumerated when there are at most ``demand_limit``
    of them, otherwise ``trials`` seeded random vectors per active set.  The
    measured rate (transmitted symbols over file symbols) must be identical
    in every session.
    """
    rng = random.Random(seed)
    fp = hppda.Fp
    files = []
    for _ in range(n_files):
        size = fp * subfile_len - rng.randrange(0, subfile_len)
        files.append(bytes(rng.randrange(256) for _ in range(size)))
    server, caches = place(hppda, code, files, subfile_len)
    cache_of = {c.user: c for c in caches}

    report = CheckReport(seed=seed)
    total_demands = n_files**hppda.Kp
    exhaustive_demands = total_demands <= demand_limit
    report.demand_mode = "exhaustive" if exhaustive_demands else f"sampled({trials})"
    start = time.perf_counter()
    for tau in combinations(range(1, hppda.K + 1), hppda.Kp):
        if exhaustive_demands:
            demand_iter = product(range(1, n_files + 1), repeat=hppda.Kp)
        else:
            demand_iter = (
                tuple(rng.randrange(1, n_files + 1) for _ in range(hppda.Kp))
                for _ in range(trials)
            )
        for demands in demand_iter:
            session = deliver(server, tau, demands, removal)
            report.sessions += 1
            report.rates.add(Fraction(len(session.transmissions), fp))
            for user, want in zip(tau, demands):
                try:
                    got = decode_user(cache_of[user], session, code)
                except DecodeFailure as exc:
                    report.decode_failures.append((tau, demands, user, str(exc)))
                    continue
                if got != server.files[want - 1]:
                    report.mismatches.append((tau, demands, user))
    report.elapsed = time.perf_counter() - start
    return report
