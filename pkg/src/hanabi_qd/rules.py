"""The fixed 135-rule catalog chromosomes index into.

15 base behaviors x 9 firing guards, enumerated guard-major inside each
behavior: `rule_id = template_index * 9 + guard_index`. The enumeration
order is frozen; `catalog_hash()` fingerprints it so archives evolved
under one catalog refuse to load under another. Play templates span the
whole risk axis (certain, thresholded, most-probable, deliberately
least-probable): the behavior grid cannot be illuminated without both
cautious and reckless play on tap.

Every rule is a deterministic function of the acting player's view: same
view, same (optional) action. Tie-breaks are fixed throughout: lowest own
slot first; for hints, color before rank, colors in deck order, ranks
ascending. A rule that does not apply returns None, which is a normal
value, not an error.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import belief
from .engine import PlayerView

GUARD_NAMES = (
    "always",
    "tokens_lt_2",
    "tokens_lt_4",
    "tokens_lt_6",
    "tokens_ge_4",
    "lives_eq_1",
    "lives_ge_2",
    "deck_lt_10",
    "deck_ge_10",
)


def guard_flags(view: PlayerView) -> tuple:
    """All nine guard predicates evaluated once per view, in GUARD_NAMES
    order. The single source of truth for guard semantics."""
    flags = view.cache.get("guards")
    if flags is None:
        tokens = view.info_tokens
        lives = view.lives
        deck = view.deck_size
        flags = (
            True,
            tokens < 2,
            tokens < 4,
            tokens < 6,
            tokens >= 4,
            lives == 1,
            lives >= 2,
            deck < 10,
            deck >= 10,
        )
        view.cache["guards"] = flags
    return flags


def _is_singleton(mask: int) -> bool:
    return mask & (mask - 1) == 0


# ----------------------------------------------------------------------
# Template bodies. Each returns a legal Action or None.
# ----------------------------------------------------------------------

def play_safe(view: PlayerView) -> Optional[object]:
    for s, (playable, _, total) in enumerate(belief.all_slot_counts(view)):
        if playable == total:
            return view.variant.play_actions[s]
    return None


def play_probably_safe(view: PlayerView, threshold: float) -> Optional[object]:
    for s, (playable, _, total) in enumerate(belief.all_slot_counts(view)):
        if playable / total >= threshold:
            return view.variant.play_actions[s]
    return None


def play_most_probable(view: PlayerView) -> Optional[object]:
    """Play the slot most likely to land; always fires on a non-empty hand.
    Realized risk follows knowledge quality, so this is the workhorse of
    low-to-mid risk-aversion behavior."""
    best_slot = -1
    best = (-1, 1)  # compare playable/total as cross-multiplied fractions
    for s, (playable, _, total) in enumerate(belief.all_slot_counts(view)):
        if playable * best[1] > best[0] * total:
            best = (playable, total)
            best_slot = s
    if best_slot < 0:
        return None
    return view.variant.play_actions[best_slot]


def play_least_probable(view: PlayerView) -> Optional[object]:
    """Play the slot least likely to land: deliberately reckless, the far
    low end of the risk-aversion axis."""
    best_slot = -1
    best = (2, 1)
    for s, (playable, _, total) in enumerate(belief.all_slot_counts(view)):
        if playable * best[1] < best[0] * total:
            best = (playable, total)
            best_slot = s
    if best_slot < 0:
        return None
    return view.variant.play_actions[best_slot]


def _hint_actions(view: PlayerView):
    v = view.variant
    partner = view.partner
    return v.hint_color_actions[partner], v.hint_rank_actions[partner]


def tell_playable(view: PlayerView) -> Optional[object]:
    """Point at the partner's first truly playable card: its color if they
    do not know it, else its rank."""
    if view.info_tokens <= 0:
        return None
    v = view.variant
    color_of, rank_of = v.color_of, v.rank_of
    fireworks = view.fireworks
    hc, hr = _hint_actions(view)
    for s, cid in enumerate(view.partner_hand):
        cidx = color_of[cid]
        rank = rank_of[cid]
        if fireworks[cidx] + 1 != rank:
            continue
        if not _is_singleton(view.partner_kc[s]):
            return hc[cidx]
        if not _is_singleton(view.partner_kr[s]):
            return hr[rank - 1]
    return None


def tell_useless(view: PlayerView) -> Optional[object]:
    """Point at the partner's first dead card so they can discard it:
    its color if unknown to them, else its rank."""
    if view.info_tokens <= 0:
        return None
    v = view.variant
    color_of, rank_of = v.color_of, v.rank_of
    fireworks = view.fireworks
    reach = belief._reachable_top(view)
    hc, hr = _hint_actions(view)
    for s, cid in enumerate(view.partner_hand):
        cidx = color_of[cid]
        rank = rank_of[cid]
        if not (rank <= fireworks[cidx] or rank > reach[cidx]):
            continue
        if not _is_singleton(view.partner_kc[s]):
            return hc[cidx]
        if not _is_singleton(view.partner_kr[s]):
            return hr[rank - 1]
    return None


def tell_most_informative(view: PlayerView) -> Optional[object]:
    """Give the hint that shrinks the most of the partner's masks,
    counting negative information; None when no hint teaches anything."""
    if view.info_tokens <= 0:
        return None
    v = view.variant
    color_of, rank_of = v.color_of, v.rank_of
    phand = view.partner_hand
    pkc, pkr = view.partner_kc, view.partner_kr
    hc, hr = _hint_actions(view)
    best_gain = 0
    best_action = None
    for cidx in range(v.num_colors):
        bit = 1 << cidx
        gain = 0
        present = False
        for s, cid in enumerate(phand):
            if color_of[cid] == cidx:
                present = True
                if pkc[s] != bit:
                    gain += 1
            elif pkc[s] & bit:
                gain += 1
        if present and gain > best_gain:
            best_gain = gain
            best_action = hc[cidx]
    for rank in range(1, v.max_rank + 1):
        bit = 1 << (rank - 1)
        gain = 0
        present = False
        for s, cid in enumerate(phand):
            if rank_of[cid] == rank:
                present = True
                if pkr[s] != bit:
                    gain += 1
            elif pkr[s] & bit:
                gain += 1
        if present and gain > best_gain:
            best_gain = gain
            best_action = hr[rank - 1]
    return best_action


def tell_unknown_rank(view: PlayerView) -> Optional[object]:
    if view.info_tokens <= 0:
        return None
    rank_of = view.variant.rank_of
    _, hr = _hint_actions(view)
    for s, cid in enumerate(view.partner_hand):
        if not _is_singleton(view.partner_kr[s]):
            return hr[rank_of[cid] - 1]
    return None


def _may_discard(view: PlayerView) -> bool:
    return view.info_tokens < view.variant.max_info_tokens and view.hand_size > 0


def discard_certainly_useless(view: PlayerView) -> Optional[object]:
    if not _may_discard(view):
        return None
    for s, (_, useless, total) in enumerate(belief.all_slot_counts(view)):
        if useless == total:
            return view.variant.discard_actions[s]
    return None


def discard_probably_useless(view: PlayerView, threshold: float) -> Optional[object]:
    if not _may_discard(view):
        return None
    for s, (_, useless, total) in enumerate(belief.all_slot_counts(view)):
        if useless / total >= threshold:
            return view.variant.discard_actions[s]
    return None


def discard_oldest_unhinted(view: PlayerView) -> Optional[object]:
    if not _may_discard(view):
        return None
    v = view.variant
    full_c, full_r = v.full_color_mask, v.full_rank_mask
    for s in range(view.hand_size):
        if view.own_kc[s] == full_c and view.own_kr[s] == full_r:
            return v.discard_actions[s]
    return None


def discard_oldest(view: PlayerView) -> Optional[object]:
    if not _may_discard(view):
        return None
    return view.variant.discard_actions[0]


def discard_random(view: PlayerView) -> Optional[object]:
    """Slot picked by hashing the view, so the choice is a pure function
    of the view (rule determinism) yet spread across slots."""
    if not _may_discard(view):
        return None
    digest = hashlib.sha256(view.canonical_key().encode("ascii")).digest()
    slot = int.from_bytes(digest[:8], "big") % view.hand_size
    return view.variant.discard_actions[slot]


TEMPLATES = (
    ("play_safe", None, play_safe),
    ("play_probably_safe", 0.4, play_probably_safe),
    ("play_probably_safe", 0.6, play_probably_safe),
    ("play_probably_safe", 0.8, play_probably_safe),
    ("play_most_probable", None, play_most_probable),
    ("play_least_probable", None, play_least_probable),
    ("tell_playable", None, tell_playable),
    ("tell_useless", None, tell_useless),
    ("tell_most_informative", None, tell_most_informative),
    ("tell_unknown_rank", None, tell_unknown_rank),
    ("discard_certainly_useless", None, discard_certainly_useless),
    ("discard_probably_useless", 0.6, discard_probably_useless),
    ("discard_oldest_unhinted", None, discard_oldest_unhinted),
    ("discard_oldest", None, discard_oldest),
    ("discard_random", None, discard_random),
)

NUM_RULES = len(TEMPLATES) * len(GUARD_NAMES)


@dataclass(frozen=True)
class Rule:
    id: int
    template: str
    threshold: Optional[float]
    guard: str
    guard_index: int
    body: Callable = field(repr=False, compare=False)  # template sans guard
    fn: Callable = field(repr=False, compare=False)    # guard + template

    def __call__(self, view: PlayerView):
        return self.fn(view)


def _bind_threshold(body, threshold):
    if threshold is None:
        return body

    def bound(view, _body=body, _thr=threshold):
        return _body(view, _thr)

    return bound


def _make_fn(body, guard_index):
    if guard_index == 0:
        return body

    def guarded(view, _body=body, _gi=guard_index):
        return _body(view) if guard_flags(view)[_gi] else None

    return guarded


def _build_catalog() -> tuple:
    rules = []
    for t_idx, (name, threshold, raw_body) in enumerate(TEMPLATES):
        body = _bind_threshold(raw_body, threshold)
        for g_idx, guard_name in enumerate(GUARD_NAMES):
            rule_id = t_idx * len(GUARD_NAMES) + g_idx
            rules.append(
                Rule(
                    id=rule_id,
                    template=name,
                    threshold=threshold,
                    guard=guard_name,
                    guard_index=g_idx,
                    body=body,
                    fn=_make_fn(body, g_idx),
                )
            )
    return tuple(rules)


_CATALOG = _build_catalog()


def catalog() -> tuple:
    """The full fixed rule catalog, indexed by rule id."""
    return _CATALOG


def apply_rule(rule: Rule, view: PlayerView):
    """The rule's action on this view, or None if it does not apply."""
    return rule.fn(view)


def catalog_csv() -> str:
    lines = ["id,template,params,guard"]
    for rule in _CATALOG:
        params = "" if rule.threshold is None else f"threshold={rule.threshold}"
        lines.append(f"{rule.id},{rule.template},{params},{rule.guard}")
    return "\n".join(lines) + "\n"


# bumped when a template's behavior changes without renaming: the CSV only
# carries names and params, but archives must not cross semantic versions
CATALOG_VERSION = 2


def catalog_hash() -> str:
    text = f"catalog-version {CATALOG_VERSION}\n" + catalog_csv()
    return hashlib.sha256(text.encode("ascii")).hexdigest()
