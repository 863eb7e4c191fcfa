"""Signed permutations of types A, B, D and their statistics.

Elements use one-line notation: ``values[i-1] = pi(i)``.  Type ``A`` of rank
``N`` is the symmetric group on ``{1, ..., N+1}``; types ``B`` and ``D`` of
rank ``N`` act on ``{+-1, ..., +-N}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from math import factorial

import numpy as np

from .errors import IncompatibleStatistic, InvalidRank, TooLarge

__all__ = [
    "SignedPermutation",
    "group_order",
    "check_rank",
    "enumerate_group",
    "count_statistic",
    "batch_statistic",
    "inversions_merge",
    "STATISTICS",
]

STATISTICS = ("inversions", "descents", "alternating_descents")
ENUMERATION_LIMIT = 10**7


def check_rank(kind: str, N: int) -> None:
    if kind not in ("A", "B", "D"):
        raise InvalidRank(f"unknown Coxeter type {kind!r}")
    if N < 1 or (kind == "D" and N < 2):
        raise InvalidRank(f"type {kind} needs rank >= {2 if kind == 'D' else 1}, got {N}")


def group_order(kind: str, N: int) -> int:
    check_rank(kind, N)
    if kind == "A":
        return factorial(N + 1)
    if kind == "B":
        return 2**N * factorial(N)
    return 2 ** (N - 1) * factorial(N)


@dataclass(frozen=True)
class SignedPermutation:
    values: tuple[int, ...]
    kind: str = "B"

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if sorted(abs(v) for v in vals) != list(range(1, len(vals) + 1)):
            raise ValueError(f"{vals} is not a signed permutation")
        if self.kind == "A" and any(v < 0 for v in vals):
            raise ValueError("type A elements carry no signs")
        if self.kind == "D" and sum(v < 0 for v in vals) % 2:
            raise ValueError("type D elements have an even number of negative entries")

    @property
    def rank(self) -> int:
        return len(self.values) - 1 if self.kind == "A" else len(self.values)

    @classmethod
    def identity(cls, kind: str, N: int) -> SignedPermutation:
        check_rank(kind, N)
        size = N + 1 if kind == "A" else N
        return cls(tuple(range(1, size + 1)), kind)


def inversions_merge(seq) -> int:
    """Number of pairs ``i < j`` with ``seq[i] > seq[j]``, by merge sort."""
    seq = list(seq)

    def sort_count(xs):
        if len(xs) <= 1:
            return xs, 0
        mid = len(xs) // 2
        left, cl = sort_count(xs[:mid])
        right, cr = sort_count(xs[mid:])
        merged = []
        count = cl + cr
        i = j = 0
        while i < len(left) and j < len(right):
            if right[j] < left[i]:
                merged.append(right[j])
                count += len(left) - i
                j += 1
            else:
                merged.append(left[i])
                i += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return sort_count(seq)[1]


def _signed_inversions(vals, kind: str) -> int:
    inv_plus = inversions_merge(vals)
    if kind == "A":
        return inv_plus
    n = len(vals)
    inv_minus = sum(1 for i in range(n) for j in range(i + 1, n) if -vals[i] > vals[j])
    if kind == "D":
        return inv_plus + inv_minus
    inv_zero = sum(1 for v in vals if v < 0)
    return inv_plus + inv_minus + inv_zero


def _descents(vals, kind: str) -> int:
    if kind == "D":
        first = -vals[1]
    else:
        first = 0
    ext = (first,) + tuple(vals)
    return sum(1 for i in range(len(vals)) if ext[i] > ext[i + 1])


def _alternating_descents(vals) -> int:
    # position i (1-based) is counted at odd i on a descent, at even i on an ascent
    count = 0
    for i in range(1, len(vals)):
        down = vals[i - 1] > vals[i]
        if (i % 2 == 1) == down:
            count += 1
    return count


def count_statistic(element: SignedPermutation, statistic: str, kind: str | None = None) -> int:
    kind = kind or element.kind
    vals = element.values
    if kind == "D" and sum(v < 0 for v in vals) % 2:
        raise IncompatibleStatistic("element is not in type D")
    if kind == "A" and any(v < 0 for v in vals):
        raise IncompatibleStatistic("element is not in type A")
    if statistic == "inversions":
        return _signed_inversions(vals, kind)
    if statistic == "descents":
        return _descents(vals, kind)
    if statistic == "alternating_descents":
        if kind != "A":
            raise IncompatibleStatistic("alternating descents are defined for type A only")
        return _alternating_descents(vals)
    raise IncompatibleStatistic(f"unknown statistic {statistic!r}")


def enumerate_group(kind: str, N: int, limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """All elements as rows of an int array, in a fixed order."""
    order = group_order(kind, N)
    if order > limit:
        raise TooLarge(f"|{kind}{N}| = {order} exceeds the enumeration limit {limit}")
    size = N + 1 if kind == "A" else N
    perms = np.array(list(permutations(range(1, size + 1))), dtype=np.int16)
    if kind == "A":
        return perms
    signs = np.array(list(product((1, -1), repeat=N)), dtype=np.int16)
    if kind == "D":
        signs = signs[(signs < 0).sum(axis=1) % 2 == 0]
    out = perms[:, None, :] * signs[None, :, :]
    return out.reshape(-1, N)


def batch_statistic(elements: np.ndarray, statistic: str, kind: str) -> np.ndarray:
    """Vectorized statistic over rows of ``elements``."""
    x = np.asarray(elements, dtype=np.int32)
    rows, n = x.shape
    if statistic == "inversions":
        total = np.zeros(rows, dtype=np.int64)
        for i in range(n - 1):
            total += (x[:, i : i + 1] > x[:, i + 1 :]).sum(axis=1)
            if kind in ("B", "D"):
                total += (-x[:, i : i + 1] > x[:, i + 1 :]).sum(axis=1)
        if kind == "B":
            total += (x < 0).sum(axis=1)
        return total
    if statistic == "descents":
        if kind == "D":
            first = -x[:, 1:2]
        else:
            first = np.zeros((rows, 1), dtype=x.dtype)
        ext = np.concatenate([first, x], axis=1)
        return (ext[:, :-1] > ext[:, 1:]).sum(axis=1).astype(np.int64)
    if statistic == "alternating_descents":
        if kind != "A":
            raise IncompatibleStatistic("alternating descents are defined for type A only")
        down = x[:, :-1] > x[:, 1:]
        odd = (np.arange(1, n) % 2 == 1)[None, :]
        return (down == odd).sum(axis=1).astype(np.int64)
    raise IncompatibleStatistic(f"unknown statistic {statistic!r}")
