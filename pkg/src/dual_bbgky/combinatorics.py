"""Set partitions, Stirling numbers and the signed partition sums behind cumulants.

Particle labels are positive integers.  An *element* of a set being
partitioned is either a bare label or a :class:`Cluster`, a group of labels
that behaves as a single element (it is never split across blocks).

All counts use Python integers, so every identity here holds exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, Sequence, Tuple, Union

from .errors import CapacityError, LabelError

#: Largest ground set accepted by the enumerators (Bell(12) = 4 213 597).
MAX_ELEMENTS = 12

LabelSet = Tuple[int, ...]


def as_labels(labels: Iterable[int]) -> LabelSet:
    """Return ``labels`` as a strictly increasing tuple of positive ints."""
    out = tuple(int(x) for x in labels)
    if any(x < 1 for x in out):
        raise LabelError(f"labels must be positive integers, got {out}")
    if any(a >= b for a, b in zip(out, out[1:])):
        raise LabelError(f"labels must be strictly increasing without duplicates, got {out}")
    return out


@dataclass(frozen=True, order=True)
class Cluster:
    """Several particles fused into one element of a partitioned set."""

    labels: LabelSet

    def __post_init__(self):
        object.__setattr__(self, "labels", as_labels(sorted(self.labels)))
        if not self.labels:
            raise LabelError("a cluster must contain at least one label")

    def __repr__(self):
        return "C" + "{" + ",".join(map(str, self.labels)) + "}"


Element = Union[int, Cluster]
Block = Tuple[Element, ...]
Partition = Tuple[Block, ...]


def element_labels(elem: Element) -> LabelSet:
    if isinstance(elem, Cluster):
        return elem.labels
    return (int(elem),)


def block_labels(block: Iterable[Element]) -> LabelSet:
    """Sorted union of the particle labels carried by the elements of ``block``."""
    return tuple(sorted(itertools.chain.from_iterable(element_labels(e) for e in block)))


def _least(elem: Element) -> int:
    return element_labels(elem)[0]


def _check_size(n: int):
    if n > MAX_ELEMENTS:
        raise CapacityError(f"{n} elements exceeds the partition capacity of {MAX_ELEMENTS}")


def _restricted_growth_strings(n: int) -> Iterator[list]:
    # Knuth's Algorithm H would be faster; the recursive form is plenty at n <= 12.
    a = [0] * n

    def rec(i, m):
        if i == n:
            yield a
            return
        for v in range(m + 2):
            a[i] = v
            yield from rec(i + 1, max(m, v))

    if n == 0:
        yield a
        return
    yield from rec(1, 0)


def enumerate_partitions(elems: Sequence[Element]) -> Iterator[Partition]:
    """Yield every set partition of ``elems`` exactly once.

    Elements are first sorted by least label; blocks list their elements in
    that order and blocks are ordered by least label, so iteration order is
    canonical and reproducible.

    >>> [p for p in enumerate_partitions([1, 2])]
    [((1, 2),), ((1,), (2,))]
    """
    elems = sorted(elems, key=_least)
    n = len(elems)
    if n == 0:
        raise ValueError("cannot partition an empty set")
    _check_size(n)
    seen = set()
    for e in elems:
        labs = element_labels(e)
        if seen.intersection(labs):
            raise LabelError(f"elements share labels: {elems}")
        seen.update(labs)
    for rgs in _restricted_growth_strings(n):
        blocks: list = [[] for _ in range(max(rgs) + 1)]
        for e, b in zip(elems, rgs):
            blocks[b].append(e)
        yield tuple(tuple(b) for b in blocks)


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind; zero when ``k > n`` or ``k < 0``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if k < 0 or k > n:
        return 0
    if n == k:
        return 1
    if k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def bell(n: int) -> int:
    return sum(stirling2(n, k) for k in range(n + 1))


def signed_partition_sum(n: int) -> int:
    """Sum over partitions P of an n-set of (-1)^(|P|-1) (|P|-1)!.

    Evaluated by grouping partitions by block count; equals 1 for n = 1 and
    0 otherwise.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_size(n)
    return sum((-1) ** (k - 1) * stirling2(n, k) * factorial(k - 1) for k in range(1, n + 1))


def signed_factorial_sum(n: int) -> int:
    """Sum over partitions P of an n-set of (-1)^|P| |P|!; equals (-1)^n.

    The empty set has the single empty partition, so ``n = 0`` gives 1.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    _check_size(n)
    return sum((-1) ** k * stirling2(n, k) * factorial(k) for k in range(n + 1))


def distinct_tuples(labels: Sequence[int], n: int) -> list:
    """All ordered n-tuples of pairwise distinct entries of ``labels``.

    Returns an empty list when ``n`` exceeds the number of labels.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    return list(itertools.permutations(tuple(labels), n))


def subsets(labels: Sequence[int], size: int | None = None) -> Iterator[LabelSet]:
    """Subsets of ``labels`` as sorted tuples, by increasing size then lexicographically."""
    labels = tuple(labels)
    sizes = range(len(labels) + 1) if size is None else [size]
    for k in sizes:
        yield from itertools.combinations(labels, k)
