"""Central Koszul sign oracle.

Every sign in the package (wedge reordering, bracket symmetry, word
sorting, unshuffle sums) is produced by the routines below, so that a
single convention governs all modules: transposing two symbols of odd
parity costs a factor -1, every other transposition is free.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence


def perm_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a sequence of distinct integers."""
    sign = 1
    n = len(perm)
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def koszul_sign(parities: Sequence[int], perm: Sequence[int]) -> int:
    """Sign of reordering (x_0,...,x_{n-1}) into (x_perm[0],...,x_perm[n-1]).

    ``parities[i]`` is the parity (0 or 1) of x_i.  Each inverted pair of
    odd symbols contributes -1.
    """
    sign = 1
    n = len(perm)
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j] and parities[perm[i]] & parities[perm[j]]:
                sign = -sign
    return sign


def unshuffle_sign(parities: Sequence[int], first: Iterable[int], second: Iterable[int]) -> int:
    """Koszul sign of splitting ordered positions into (first, second).

    Both blocks must individually be in increasing order; the sign counts
    odd-odd pairs (a, b) with a in ``first``, b in ``second`` and b < a.
    """
    sign = 1
    second = tuple(second)
    for a in first:
        if not parities[a]:
            continue
        for b in second:
            if b < a and parities[b]:
                sign = -sign
    return sign


def sort_with_sign(items, parity_of: Callable, key: Callable = None):
    """Stable-sort ``items``, tracking the Koszul sign of the rearrangement.

    Returns ``(sign, sorted_tuple)`` or ``None`` when an odd item repeats
    (in which case any graded-symmetric expression vanishes).
    """
    arr = list(items)
    sign = 1
    keyf = key if key is not None else (lambda x: x)
    n = len(arr)
    for i in range(1, n):
        j = i
        while j > 0 and keyf(arr[j - 1]) > keyf(arr[j]):
            if parity_of(arr[j - 1]) & parity_of(arr[j]):
                sign = -sign
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            j -= 1
    for i in range(n - 1):
        if arr[i] == arr[i + 1] and parity_of(arr[i]):
            return None
    return sign, tuple(arr)
