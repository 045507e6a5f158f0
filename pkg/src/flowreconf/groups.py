"""Finite abelian groups given as products of cyclic groups.

An element is a residue vector.  For vectorised work each element also has
an integer *index*: the mixed-radix number whose digits are the residues,
most significant first.  Index order coincides with lexicographic order on
residue vectors, and the zero element has index 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInput

DEFAULT_ORDER_CAP = 2**20

# addition tables are materialised only below this order
_TABLE_ORDER = 256


@dataclass(frozen=True, order=True)
class GroupElem:
    residues: tuple[int, ...]

    def __str__(self) -> str:
        return "".join(str(r) for r in self.residues) if len(self.residues) > 1 else str(self.residues[0])


@dataclass(frozen=True)
class GroupSpec:
    moduli: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def __str__(self) -> str:
        return "x".join(f"Z{m}" for m in self.moduli)

    def notation(self) -> str:
        """The CLI notation, e.g. ``z:2,2``."""
        return "z:" + ",".join(str(m) for m in self.moduli)

    # -- element level -------------------------------------------------

    def zero(self) -> GroupElem:
        return GroupElem((0,) * self.rank)

    def elem(self, *residues: int) -> GroupElem:
        if len(residues) != self.rank:
            raise InvalidInput(f"{self} needs {self.rank} residues, got {len(residues)}")
        return GroupElem(tuple(r % m for r, m in zip(residues, self.moduli)))

    def _check(self, a: GroupElem) -> None:
        if len(a.residues) != self.rank:
            raise InvalidInput(f"element {a.residues} does not belong to {self}")

    def add(self, a: GroupElem, b: GroupElem) -> GroupElem:
        self._check(a)
        self._check(b)
        return GroupElem(tuple((x + y) % m for x, y, m in zip(a.residues, b.residues, self.moduli)))

    def neg(self, a: GroupElem) -> GroupElem:
        self._check(a)
        return GroupElem(tuple(-x % m for x, m in zip(a.residues, self.moduli)))

    def sub(self, a: GroupElem, b: GroupElem) -> GroupElem:
        return self.add(a, self.neg(b))

    def elements(self) -> list[GroupElem]:
        return [self.element(i) for i in range(self.order)]

    def nonzero_elements(self) -> list[GroupElem]:
        return [self.element(i) for i in range(1, self.order)]

    # -- index level ---------------------------------------------------

    @cached_property
    def _weights(self) -> tuple[int, ...]:
        w, acc = [], 1
        for m in reversed(self.moduli):
            w.append(acc)
            acc *= m
        return tuple(reversed(w))

    def index(self, a: GroupElem) -> int:
        self._check(a)
        return sum(r * w for r, w in zip(a.residues, self._weights))

    def element(self, index: int) -> GroupElem:
        if not 0 <= index < self.order:
            raise InvalidInput(f"index {index} out of range for {self}")
        return GroupElem(tuple((index // w) % m for w, m in zip(self._weights, self.moduli)))

    def decode(self, idx: np.ndarray) -> list[np.ndarray]:
        idx = np.asarray(idx, dtype=np.int64)
        return [(idx // w) % m for w, m in zip(self._weights, self.moduli)]

    def encode(self, residues: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros(np.shape(residues[0]), dtype=np.int64)
        for r, w, m in zip(residues, self._weights, self.moduli):
            out += (np.asarray(r) % m) * w
        return out

    @cached_property
    def _add_table(self) -> np.ndarray | None:
        if self.order > _TABLE_ORDER:
            return None
        i = np.arange(self.order)
        return self._add_slow(i[:, None], i[None, :])

    @cached_property
    def _neg_table(self) -> np.ndarray | None:
        if self.order > _TABLE_ORDER:
            return None
        return self._neg_slow(np.arange(self.order))

    def _add_slow(self, x, y):
        return self.encode([a + b for a, b in zip(self.decode(x), self.decode(y))])

    def _neg_slow(self, x):
        return self.encode([-a for a in self.decode(x)])

    def add_idx(self, x, y) -> np.ndarray:
        """Vectorised addition on element indices (broadcasting)."""
        t = self._add_table
        if t is not None:
            return t[np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)]
        return self._add_slow(x, y)

    def neg_idx(self, x) -> np.ndarray:
        t = self._neg_table
        if t is not None:
            return t[np.asarray(x, dtype=np.int64)]
        return self._neg_slow(x)

    def sub_idx(self, x, y) -> np.ndarray:
        return self.add_idx(x, self.neg_idx(y))

    def mul_idx(self, x, n: int) -> np.ndarray:
        """``n * x`` for an integer ``n`` (possibly negative)."""
        return self.encode([a * n for a in self.decode(x)])

    def split(self, left_rank: int) -> tuple["GroupSpec", "GroupSpec"]:
        """View this group as ``A x B`` with ``A`` the first ``left_rank`` factors."""
        if not 0 < left_rank < self.rank:
            raise InvalidInput(f"cannot split {self} after {left_rank} factors")
        return GroupSpec(self.moduli[:left_rank]), GroupSpec(self.moduli[left_rank:])


def make_group(moduli: Iterable[int], cap: int = DEFAULT_ORDER_CAP) -> GroupSpec:
    moduli = tuple(int(m) for m in moduli)
    if not moduli:
        raise InvalidInput("a group needs at least one cyclic factor")
    for m in moduli:
        if m < 2:
            raise InvalidInput(f"modulus {m} < 2")
    order = math.prod(moduli)
    if order > cap:
        raise InvalidInput(f"group order {order} exceeds cap {cap}")
    return GroupSpec(moduli)


def product(a: GroupSpec, b: GroupSpec, cap: int = DEFAULT_ORDER_CAP) -> GroupSpec:
    return make_group(a.moduli + b.moduli, cap=cap)


def parse_group(text: str, cap: int = DEFAULT_ORDER_CAP) -> GroupSpec:
    """Parse a comma-separated moduli list such as ``"4"`` or ``"2,2"``."""
    try:
        moduli = [int(t) for t in text.split(",")]
    except ValueError:
        raise InvalidInput(f"bad group notation {text!r}") from None
    return make_group(moduli, cap=cap)


def zero(spec: GroupSpec) -> GroupElem:
    return spec.zero()


def add(spec: GroupSpec, a: GroupElem, b: GroupElem) -> GroupElem:
    return spec.add(a, b)


def neg(spec: GroupSpec, a: GroupElem) -> GroupElem:
    return spec.neg(a)


def nonzero_elements(spec: GroupSpec) -> list[GroupElem]:
    return spec.nonzero_elements()
