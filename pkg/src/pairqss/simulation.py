"""Event-level Monte-Carlo execution of the pair-distribution protocol.

Sampling happens at the post-detection level: each pulse on each
dealer-player link yields a coincidence with the closed-form gain, both
parties pick bases independently, and conditional on a same-basis
coincidence the player bit flips against the dealer bit with the
closed-form error rate of that basis.  Mismatched-basis coincidences are
kept in the streams (marked unusable) so per-pulse gain accounting stays
honest, then dropped at matching.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .photonics import BipartiteStats

# Pulses processed per RNG block; streams are reproducible for a fixed seed
# regardless of how many chunks a run spans.
CHUNK_PULSES = 1 << 20

_UNUSABLE = -1  # coincidence whose two parties measured different bases


class Basis(str, Enum):
    X = "X"
    Z = "Z"


class Decision(str, Enum):
    PROCEED = "proceed"
    ABORT = "abort"


@dataclass(frozen=True)
class EventStream:
    """Detection record of one dealer-player link over a pulse train.

    Arrays are aligned and hold one entry per coincident detection; basis
    codes are 1 for X, 0 for Z and -1 for a mismatched-basis coincidence
    that cannot be used.
    """

    link_index: int
    n_pulses: int
    rounds: np.ndarray
    basis: np.ndarray
    dealer_bits: np.ndarray
    player_bits: np.ndarray

    def count(self, basis: Basis) -> int:
        code = 1 if basis is Basis.X else 0
        return int(np.count_nonzero(self.basis == code))


@dataclass(frozen=True)
class MatchedRound:
    """One n-party round assembled from same-basis events of every link."""

    basis: Basis
    j: int
    dealer_bits: tuple[int, ...]
    player_bits: tuple[int, ...]


@dataclass(frozen=True)
class CorrelatedRound:
    """A matched round after the XOR correlation step.

    In the Z basis the dealer broadcasts one parity bit per link beyond the
    first and every player key bit should equal the dealer's; in the X
    basis the dealer folds all her bits into one and the players' bits are
    untouched, leaving an even-parity correlation.
    """

    basis: Basis
    j: int
    dealer_key_bit: int
    broadcast_bits: tuple[int, ...]
    player_key_bits: tuple[int, ...]


@dataclass(frozen=True)
class SimEstimates:
    gain_est: float
    e_z_marginal_est: list[float]
    e_x_est: float
    rounds_x: int
    rounds_z: int


def _link_rng(seed: int, link_index: int, chunk: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, link_index + 1], dtype=np.uint64)
    counter = np.array([0, 0, chunk, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _concat(parts: list[np.ndarray], dtype) -> np.ndarray:
    if parts:
        return np.concatenate(parts)
    return np.empty(0, dtype=dtype)


def generate_events(
    stats: BipartiteStats | Sequence[BipartiteStats],
    n_links: int,
    n_pulses: int,
    p_x: float,
    seed: int,
) -> list[EventStream]:
    """Sample per-pulse detection events for every dealer-player link.

    ``stats`` may be a single BipartiteStats applied to all links or one
    per link.  Streams for a fixed seed are bit-for-bit reproducible; each
    link uses an independent counter-based RNG stream.
    """
    if isinstance(stats, BipartiteStats):
        per_link = [stats] * n_links
    else:
        per_link = list(stats)
        if len(per_link) != n_links:
            raise ValueError(f"expected {n_links} per-link stats, got {len(per_link)}")

    streams = []
    for link in range(n_links):
        st = per_link[link]
        rounds_parts: list[np.ndarray] = []
        basis_parts: list[np.ndarray] = []
        dealer_parts: list[np.ndarray] = []
        player_parts: list[np.ndarray] = []
        for chunk_index, start in enumerate(range(0, n_pulses, CHUNK_PULSES)):
            width = min(CHUNK_PULSES, n_pulses - start)
            u = _link_rng(seed, link, chunk_index).random((5, width))
            coincident = u[0] < st.gain
            if not coincident.any():
                continue
            dealer_x = u[1] < p_x
            player_x = u[2] < p_x
            same = dealer_x == player_x
            basis = np.where(same, dealer_x.astype(np.int8), np.int8(_UNUSABLE))
            dealer_bits = (u[3] < 0.5).astype(np.uint8)
            err_prob = np.where(basis == 1, st.error_x, st.error_z)
            flips = (u[4] < err_prob).astype(np.uint8)
            player_bits = dealer_bits ^ flips

            rounds_parts.append(np.nonzero(coincident)[0].astype(np.int64) + start)
            basis_parts.append(basis[coincident])
            dealer_parts.append(dealer_bits[coincident])
            player_parts.append(player_bits[coincident])

        streams.append(
            EventStream(
                link_index=link,
                n_pulses=n_pulses,
                rounds=_concat(rounds_parts, np.int64),
                basis=_concat(basis_parts, np.int8),
                dealer_bits=_concat(dealer_parts, np.uint8),
                player_bits=_concat(player_parts, np.uint8),
            )
        )
    return streams


def post_match(streams: list[EventStream]) -> list[MatchedRound]:
    """Assemble n-party rounds by pairing same-basis events in sequence.

    The j-th matched round of a basis combines the j-th event of that basis
    from every link, in pulse order; each basis yields as many rounds as
    the poorest link provides.  X rounds are emitted first, then Z.
    """
    ordered = sorted(streams, key=lambda s: s.link_index)
    matched: list[MatchedRound] = []
    for basis, code in ((Basis.X, 1), (Basis.Z, 0)):
        picks = [np.nonzero(s.basis == code)[0] for s in ordered]
        depth = min((len(p) for p in picks), default=0)
        if depth == 0:
            continue
        dealer = np.stack([s.dealer_bits[p[:depth]] for s, p in zip(ordered, picks)])
        player = np.stack([s.player_bits[p[:depth]] for s, p in zip(ordered, picks)])
        for j in range(depth):
            matched.append(
                MatchedRound(
                    basis=basis,
                    j=j,
                    dealer_bits=tuple(int(b) for b in dealer[:, j]),
                    player_bits=tuple(int(b) for b in player[:, j]),
                )
            )
    return matched


def apply_xor(matched: MatchedRound) -> CorrelatedRound:
    """Run the dealer/player XOR correlation step on one matched round."""
    a = matched.dealer_bits
    b = matched.player_bits
    if matched.basis is Basis.Z:
        broadcast = tuple(a[0] ^ ai for ai in a[1:])
        players = (b[0],) + tuple(c ^ bi for c, bi in zip(broadcast, b[1:]))
        return CorrelatedRound(
            basis=matched.basis,
            j=matched.j,
            dealer_key_bit=a[0],
            broadcast_bits=broadcast,
            player_key_bits=players,
        )
    folded = 0
    for ai in a:
        folded ^= ai
    return CorrelatedRound(
        basis=matched.basis,
        j=matched.j,
        dealer_key_bit=folded,
        broadcast_bits=(),
        player_key_bits=b,
    )


def estimate_statistics(
    correlated: list[CorrelatedRound],
    raw: list[MatchedRound],
    n_pulses: int,
) -> SimEstimates:
    """Empirical gain and error rates from the correlated rounds.

    A Z round errs for player i when their key bit disagrees with the
    dealer's; an X round errs when the parity of all key bits is odd.  The
    gain estimate is the fraction of pulses that produced a usable n-party
    X round.
    """
    if len(raw) != len(correlated):
        raise ValueError("matched and correlated round lists differ in length")
    x_rounds = [r for r in correlated if r.basis is Basis.X]
    z_rounds = [r for r in correlated if r.basis is Basis.Z]
    if not x_rounds:
        raise ValueError("no X-basis rounds to estimate from")
    if not z_rounds:
        raise ValueError("no Z-basis rounds to estimate from")

    n_players = len(x_rounds[0].player_key_bits)
    z_err = [0] * n_players
    for r in z_rounds:
        for i, bit in enumerate(r.player_key_bits):
            if bit != r.dealer_key_bit:
                z_err[i] += 1
    x_err = 0
    for r in x_rounds:
        parity = r.dealer_key_bit
        for bit in r.player_key_bits:
            parity ^= bit
        if parity:
            x_err += 1

    return SimEstimates(
        gain_est=len(x_rounds) / n_pulses,
        e_z_marginal_est=[e / len(z_rounds) for e in z_err],
        e_x_est=x_err / len(x_rounds),
        rounds_x=len(x_rounds),
        rounds_z=len(z_rounds),
    )


def correlation_test(est: SimEstimates, threshold: float) -> Decision:
    """Abort when any dealer-player Z marginal strictly exceeds the threshold."""
    if max(est.e_z_marginal_est) > threshold:
        return Decision.ABORT
    return Decision.PROCEED


def transcript_records(
    matched: Iterable[MatchedRound], correlated: Iterable[CorrelatedRound]
) -> Iterator[dict]:
    """One JSON-ready record per matched round, in emission order."""
    for m, c in zip(matched, correlated):
        yield {
            "basis": m.basis.value,
            "j": m.j,
            "dealer_bits": list(m.dealer_bits),
            "player_bits": list(m.player_bits),
            "dealer_key_bit": c.dealer_key_bit,
            "broadcast_bits": list(c.broadcast_bits),
            "player_key_bits": list(c.player_key_bits),
        }


def write_transcript(
    out: IO[str], matched: Iterable[MatchedRound], correlated: Iterable[CorrelatedRound]
) -> None:
    """Dump matched/correlated rounds as newline-delimited JSON."""
    for record in transcript_records(matched, correlated):
        out.write(json.dumps(record, separators=(",", ":")) + "\n")
