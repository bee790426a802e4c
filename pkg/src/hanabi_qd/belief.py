"""Grounded knowledge tracking over hidden hand slots.

Everything here is "no player model": a slot's possible identities follow
purely from the hint masks and the cards the viewer can see (partner's
hand, the discard pile, cards already played onto the fireworks). Other
own slots are never deducted; their identities are unknown, so a slot's
distribution is an independent per-slot marginal, O(num_ids) to compute.

Results are memoized on `view.cache` at two levels: per (color, rank-mask)
row sums, and per slot. Unhinted slots share one computation, and a view
probed by many agents (action-similarity corpora) pays for each distinct
mask pair once.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from .engine import Card, PlayerView


class CardDistribution:
    """Copy counts over identities a hidden slot could be."""

    __slots__ = ("variant", "counts")

    def __init__(self, variant, counts: Tuple[int, ...]):
        self.variant = variant
        self.counts = counts

    @property
    def total(self) -> int:
        return sum(self.counts)

    def count(self, color: str, rank: int) -> int:
        return self.counts[self.variant.cid(color, rank)]

    def support(self) -> List[Card]:
        return [self.variant.card(cid) for cid, n in enumerate(self.counts) if n > 0]

    def as_dict(self) -> dict:
        return {
            self.variant.card(cid): n for cid, n in enumerate(self.counts) if n > 0
        }


def _public_counts(view: PlayerView) -> list:
    """Copies of each identity not discarded and not yet played."""
    counts = view.cache.get("public")
    if counts is None:
        v = view.variant
        counts = [ic - d for ic, d in zip(v.initial_counts, view.discard)]
        max_rank = v.max_rank
        for c, top in enumerate(view.fireworks):
            base = c * max_rank
            for r in range(top):
                counts[base + r] -= 1
        view.cache["public"] = counts
    return counts


def _unseen_counts(view: PlayerView) -> list:
    """Public counts minus the partner's visible hand: what the viewer
    cannot see (own hand plus deck)."""
    counts = view.cache.get("unseen")
    if counts is None:
        counts = _public_counts(view).copy()
        for cid in view.partner_hand:
            counts[cid] -= 1
        view.cache["unseen"] = counts
    return counts


def _reachable_top(view: PlayerView) -> tuple:
    """Per color, the highest rank that can still be played, walking up
    from the fireworks top until a rank with every copy discarded blocks
    the pile. Public information only."""
    return _context(view)[1]


def _useless_rank_masks(view: PlayerView) -> tuple:
    """Per color, the bitmask of ranks that can never be played: at or
    below the pile top, or above the highest reachable rank."""
    return _context(view)[2]


def _context(view: PlayerView):
    """One pass over the color/rank table building everything classify
    needs: (unseen counts, reachable tops, useless-rank masks, per-color
    full-rank row sums). Built once per view and shared by every agent
    probing it."""
    ctx = view.cache.get("ctx")
    if ctx is None:
        v = view.variant
        unseen = _unseen_counts(view)
        discard = view.discard
        initial = v.initial_counts
        max_rank = v.max_rank
        full = v.full_rank_mask
        reach = []
        umasks = []
        rows = []
        for c, top in enumerate(view.fireworks):
            base = c * max_rank
            r = top
            while r < max_rank and discard[base + r] < initial[base + r]:
                r += 1
            reach.append(r)
            umask = ((1 << top) - 1) | (full & ~((1 << r) - 1))
            umasks.append(umask)
            total = useless = playable = 0
            for rp in range(max_rank):
                n = unseen[base + rp]
                if n:
                    total += n
                    if rp == top:
                        playable += n
                    elif (umask >> rp) & 1:
                        useless += n
            rows.append((total, useless, playable))
        ctx = (unseen, tuple(reach), tuple(umasks), rows)
        view.cache["ctx"] = ctx
    return ctx


def _classify(view: PlayerView, cmask: int, rmask: int, counts: list,
              umasks: tuple, full_rows: Optional[list]) -> tuple:
    """(playable, useless, total) copy counts for a mask pair."""
    v = view.variant
    indices = v.indices_in_mask
    playable = useless = total = 0
    if full_rows is not None and rmask == v.full_rank_mask:
        for c in indices[cmask]:
            t, u, p = full_rows[c]
            total += t
            useless += u
            playable += p
        return playable, useless, total
    max_rank = v.max_rank
    fireworks = view.fireworks
    rank_positions = indices[rmask]
    for c in indices[cmask]:
        base = c * max_rank
        top = fireworks[c]
        umask = umasks[c]
        for rp in rank_positions:
            n = counts[base + rp]
            if n:
                total += n
                if rp == top:
                    playable += n
                elif (umask >> rp) & 1:
                    useless += n
    return playable, useless, total


def _check_slot(view: PlayerView, slot: int) -> None:
    if not 0 <= slot < view.hand_size:
        raise ValueError(f"empty slot {slot}")


def all_slot_counts(view: PlayerView) -> list:
    """(playable, useless, total) per own slot, computed in one pass.

    This is the inner loop of rule evaluation: slots sharing a knowledge
    mask pair (all unhinted slots, typically) share one classification.
    """
    trips = view.cache.get("slot_trips")
    if trips is None:
        unseen, _, umasks, full_rows = _context(view)
        own_kc = view.own_kc
        own_kr = view.own_kr
        by_mask = {}
        trips = []
        for s in range(view.hand_size):
            key = own_kc[s] * 256 + own_kr[s]
            got = by_mask.get(key)
            if got is None:
                got = _classify(view, own_kc[s], own_kr[s], unseen, umasks, full_rows)
                by_mask[key] = got
            trips.append(got)
        view.cache["slot_trips"] = trips
    return trips


def slot_counts(view: PlayerView, slot: int) -> tuple:
    """(playable, useless, total) for one of the viewer's own slots."""
    _check_slot(view, slot)
    return all_slot_counts(view)[slot]


def public_counts_for_masks(view: PlayerView, cmask: int, rmask: int) -> tuple:
    """(playable, useless, total) under public counts only: how a mask pair
    looks to someone who cannot deduct either hand (used to anticipate the
    partner's belief after a prospective hint)."""
    trips = view.cache.setdefault("ptrip", {})
    key = cmask * 256 + rmask
    got = trips.get(key)
    if got is None:
        counts = _public_counts(view)
        _, _, umasks, _ = _context(view)
        got = _classify(view, cmask, rmask, counts, umasks, None)
        trips[key] = got
    return got


# ----------------------------------------------------------------------
# Public operations
# ----------------------------------------------------------------------

def possible_identities(view: PlayerView, slot: int) -> CardDistribution:
    """Copy counts of every identity the slot could hold: for each
    (color, rank) allowed by the hint masks, initial copies minus copies
    the viewer can see elsewhere."""
    _check_slot(view, slot)
    v = view.variant
    unseen = _unseen_counts(view)
    cmask = view.own_kc[slot]
    rmask = view.own_kr[slot]
    max_rank = v.max_rank
    counts = [0] * v.num_ids
    for c in range(v.num_colors):
        if not cmask & (1 << c):
            continue
        base = c * max_rank
        for r in range(1, max_rank + 1):
            if rmask & (1 << (r - 1)):
                counts[base + r - 1] = unseen[base + r - 1]
    return CardDistribution(v, tuple(counts))


def playability_probability(view: PlayerView, slot: int) -> float:
    """Probability the slot's card is the next rank of its color pile."""
    playable, _, total = slot_counts(view, slot)
    return playable / total


def uselessness_indicator(view: PlayerView, slot: int) -> float:
    """Probability the slot's card can never be played: its rank is at or
    below its pile, or a prerequisite rank is fully discarded."""
    _, useless, total = slot_counts(view, slot)
    return useless / total
