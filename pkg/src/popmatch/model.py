"""Instances, matchings and the plain-text instance format.

An instance is a set of agents, a set of posts and, for every agent, a
preference list made of tiers (posts in one tier are tied).  Agents and
posts are dense 0-based indices; names are kept only for display.

File format, one agent per line::

    # comment
    posts: p1 p2 p3          (optional; when present it declares the post universe)
    a1: p1 (p2 p3)
    a2: p3 p1

Parenthesised groups are ties.  Commas inside groups are accepted and ignored.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

Tiers = tuple[frozenset[int], ...]

_NAME = re.compile(r"[^\s():#,]+\Z")
_TOKEN = re.compile(r"\(|\)|[^\s(),]+")


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class ContractError(ValueError):
    """Raised when an operation is called outside its precondition."""


@dataclass(frozen=True)
class Instance:
    agents: tuple[str, ...]
    posts: tuple[str, ...]
    prefs: tuple[Tiers, ...]
    # post index of each agent's last-resort post, when augmented
    last_resort: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if len(self.prefs) != len(self.agents):
            raise ValueError("one preference list per agent required")
        if len(set(self.agents)) != len(self.agents):
            raise ValueError("agent names must be unique")
        if len(set(self.posts)) != len(self.posts):
            raise ValueError("post names must be unique")
        n = len(self.posts)
        for a, tiers in enumerate(self.prefs):
            seen: set[int] = set()
            for tier in tiers:
                if not tier:
                    raise ValueError(f"agent {self.agents[a]}: empty tier")
                for p in tier:
                    if not 0 <= p < n:
                        raise ValueError(f"agent {self.agents[a]}: unknown post {p}")
                    if p in seen:
                        raise ValueError(f"agent {self.agents[a]}: post {self.posts[p]} listed twice")
                    seen.add(p)
        if self.last_resort is not None:
            if len(self.last_resort) != len(self.agents):
                raise ValueError("one last-resort post per agent required")
            for a, lr in enumerate(self.last_resort):
                if not self.prefs[a] or self.prefs[a][-1] != frozenset([lr]):
                    raise ValueError(f"agent {self.agents[a]}: last resort must be the final singleton tier")
                if sum(lr in t for q in self.prefs for t in q) != 1:
                    raise ValueError("a last-resort post must appear in exactly one list")

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_posts(self) -> int:
        return len(self.posts)

    @property
    def is_augmented(self) -> bool:
        return self.last_resort is not None

    @cached_property
    def _tier_index(self) -> tuple[dict[int, int], ...]:
        return tuple({p: i for i, tier in enumerate(tiers) for p in tier} for tiers in self.prefs)

    @cached_property
    def _last_resort_set(self) -> frozenset[int]:
        return frozenset(self.last_resort or ())

    def tier_of(self, a: int, p: int) -> Optional[int]:
        """0-based tier of post p in agent a's list, or None if unlisted."""
        return self._tier_index[a].get(p)

    def acceptable(self, a: int) -> list[int]:
        """Posts on a's list, best tier first, index order within a tier."""
        return [p for tier in self.prefs[a] for p in sorted(tier)]

    def is_last_resort(self, p: int) -> bool:
        return p in self._last_resort_set

    def real_posts(self) -> list[int]:
        return [p for p in range(self.n_posts) if p not in self._last_resort_set]

    def agent_index(self, name: str) -> int:
        try:
            return self.agents.index(name)
        except ValueError:
            raise KeyError(f"unknown agent {name!r}") from None

    def post_index(self, name: str) -> int:
        try:
            return self.posts.index(name)
        except ValueError:
            raise KeyError(f"unknown post {name!r}") from None

    def true_tiers(self, a: int) -> Tiers:
        """a's list without the last-resort tier."""
        if self.is_augmented:
            return self.prefs[a][:-1]
        return self.prefs[a]

    def with_list(self, a: int, tiers: Sequence[Iterable[int]]) -> "Instance":
        """Copy of the instance where agent a submits ``tiers`` instead.

        On an augmented instance ℓ(a) stays as the final tier.
        """
        new = tuple(frozenset(t) for t in tiers)
        if self.is_augmented:
            new = new + (frozenset([self.last_resort[a]]),)
        prefs = self.prefs[:a] + (new,) + self.prefs[a + 1:]
        return Instance(self.agents, self.posts, prefs, self.last_resort)

    def base(self) -> "Instance":
        """The instance without last-resort posts (identity if not augmented)."""
        if not self.is_augmented:
            return self
        keep = self.real_posts()
        remap = {p: i for i, p in enumerate(keep)}
        prefs = tuple(
            tuple(frozenset(remap[p] for p in tier) for tier in tiers[:-1])
            for tiers in self.prefs
        )
        return Instance(self.agents, tuple(self.posts[p] for p in keep), prefs)


class Matching(Mapping):
    """Immutable injective map agent -> post."""

    __slots__ = ("_fwd", "_rev")

    def __init__(self, pairs: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        fwd = dict(pairs.items() if isinstance(pairs, Mapping) else pairs)
        rev = {p: a for a, p in fwd.items()}
        if len(rev) != len(fwd):
            raise ValueError("matching assigns a post to two agents")
        self._fwd = fwd
        self._rev = rev

    def __getitem__(self, a: int) -> int:
        return self._fwd[a]

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._fwd))

    def __len__(self) -> int:
        return len(self._fwd)

    def __hash__(self) -> int:
        return hash(frozenset(self._fwd.items()))

    def __repr__(self) -> str:
        return f"Matching({dict(sorted(self._fwd.items()))})"

    def agent_of(self, p: int) -> Optional[int]:
        return self._rev.get(p)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self._fwd.items())

    def replace(self, updates: Mapping[int, Optional[int]]) -> "Matching":
        """New matching with the given agents reassigned (None unmatches)."""
        fwd = dict(self._fwd)
        for a, p in updates.items():
            if p is None:
                fwd.pop(a, None)
            else:
                fwd[a] = p
        return Matching(fwd)


def check_matching(inst: Instance, m: Matching) -> None:
    for a, p in m.items():
        if not 0 <= a < inst.n_agents or inst.tier_of(a, p) is None:
            raise ContractError(f"({a}, {p}) is not an edge of the instance")


def matching_from_names(inst: Instance, pairs: Iterable[tuple[str, str]]) -> Matching:
    return Matching((inst.agent_index(a), inst.post_index(p)) for a, p in pairs)


def matching_names(inst: Instance, m: Matching) -> list[tuple[str, str]]:
    return [(inst.agents[a], inst.posts[p]) for a, p in m.pairs()]


# -- last resorts -----------------------------------------------------------


def augment_last_resorts(inst: Instance) -> Instance:
    """Give every agent a private worst post l(a) so every agent can be matched."""
    if inst.is_augmented:
        raise ContractError("instance is already augmented")
    n = inst.n_posts
    lr = tuple(range(n, n + inst.n_agents))
    posts = inst.posts + tuple(f"l({name})" for name in inst.agents)
    prefs = tuple(tiers + (frozenset([lr[a]]),) for a, tiers in enumerate(inst.prefs))
    return Instance(inst.agents, posts, prefs, lr)


def strip_last_resorts(m: Matching, inst: Instance) -> Matching:
    if not inst.is_augmented:
        raise ContractError("instance is not augmented")
    return Matching((a, p) for a, p in m.items() if not inst.is_last_resort(p))


# -- text format ------------------------------------------------------------


def _check_name(lineno: int, name: str, what: str) -> str:
    if not _NAME.match(name):
        raise ParseError(lineno, f"invalid {what} name {name!r}")
    return name


def parse_instance(text: str) -> Instance:
    header: Optional[list[str]] = None
    agents: list[str] = []
    raw_lists: list[tuple[int, list[list[str]]]] = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(lineno, "expected 'NAME: items'")
        name, rest = (s.strip() for s in line.split(":", 1))
        if name == "posts":
            if header is not None:
                raise ParseError(lineno, "duplicate posts header")
            if agents:
                raise ParseError(lineno, "posts header must precede agent lines")
            header = [_check_name(lineno, t, "post") for t in rest.replace(",", " ").split()]
            if len(set(header)) != len(header):
                raise ParseError(lineno, "duplicate post in header")
            continue
        _check_name(lineno, name, "agent")
        if name in agents:
            raise ParseError(lineno, f"duplicate agent {name!r}")

        tiers: list[list[str]] = []
        group: Optional[list[str]] = None
        for tok in _TOKEN.findall(rest):
            if tok == "(":
                if group is not None:
                    raise ParseError(lineno, "nested tie group")
                group = []
            elif tok == ")":
                if group is None:
                    raise ParseError(lineno, "unbalanced ')'")
                if not group:
                    raise ParseError(lineno, "empty tie group")
                tiers.append(group)
                group = None
            else:
                _check_name(lineno, tok, "post")
                if group is not None:
                    group.append(tok)
                else:
                    tiers.append([tok])
        if group is not None:
            raise ParseError(lineno, "unclosed '('")
        if not tiers:
            raise ParseError(lineno, f"agent {name!r} has an empty list")
        flat = [p for t in tiers for p in t]
        dup = {p for p in flat if flat.count(p) > 1}
        if dup:
            raise ParseError(lineno, f"post {sorted(dup)[0]!r} listed twice")
        if header is not None:
            unknown = [p for p in flat if p not in header]
            if unknown:
                raise ParseError(lineno, f"unknown post {unknown[0]!r}")
        agents.append(name)
        raw_lists.append((lineno, tiers))

    posts: list[str] = list(header) if header is not None else []
    if header is None:
        for _, tiers in raw_lists:
            for t in tiers:
                for p in t:
                    if p not in posts:
                        posts.append(p)
    index = {p: i for i, p in enumerate(posts)}
    prefs = tuple(tuple(frozenset(index[p] for p in t) for t in tiers) for _, tiers in raw_lists)
    return Instance(tuple(agents), tuple(posts), prefs)


def format_tiers(inst: Instance, tiers: Iterable[Iterable[int]]) -> str:
    out = []
    for tier in tiers:
        names = [inst.posts[p] for p in sorted(tier)]
        out.append(names[0] if len(names) == 1 else "(" + " ".join(names) + ")")
    return " ".join(out)


def serialize_instance(inst: Instance) -> str:
    """Canonical text: posts header, then one line per agent."""
    if inst.is_augmented:
        raise ContractError("strip last resorts (Instance.base) before serializing")
    lines = ["posts: " + " ".join(inst.posts)]
    for a, name in enumerate(inst.agents):
        lines.append(f"{name}: {format_tiers(inst, inst.prefs[a])}")
    return "\n".join(lines) + "\n"


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())
