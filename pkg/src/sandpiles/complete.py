"""Fast recurrence tests on complete graphs, where only the sorted configuration matters."""

from __future__ import annotations

from collections.abc import Sequence

from .recurrence import BurnReport


def _check_stable(n: int, c: Sequence[int]) -> None:
    if len(c) != n:
        raise ValueError(f"configuration has {len(c)} entries, expected {n}")
    for v in c:
        if not 0 <= v < n:
            raise ValueError(f"configuration is not stable on K_{n}")


def is_parking_function(q: Sequence[int]) -> bool:
    if any(v < 1 for v in q):
        raise ValueError("parking function entries must be positive")
    return all(v <= i for i, v in enumerate(sorted(q), start=1))


def is_dr_complete(n: int, c: Sequence[int]) -> bool:
    """DR on ``K_n`` iff ``n - c`` is a parking function."""
    _check_stable(n, c)
    return all(v >= i for i, v in enumerate(sorted(c)))


def _is_sorted(c: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(c, c[1:]))


def stochastic_burning(n: int, c: Sequence[int]) -> tuple[int, BurnReport]:
    """Burn vertices from the largest grain count down while ``Sum >= Target``.

    Returns the number ``k`` of unburned vertices (SR iff ``k == 0``) and a
    report in original vertex labels. Ties are broken by a stable sort, so
    among equal counts the higher label burns first.
    """
    _check_stable(n, c)
    order = range(n) if _is_sorted(c) else sorted(range(n), key=c.__getitem__)
    total = sum(c)
    target = n * (n - 1) // 2
    k = n
    burned = [0]
    while total >= target and k > 0:
        idx = order[k - 1]
        total -= c[idx]
        target -= k - 1
        burned.append(idx + 1)
        k -= 1
    remain = frozenset(order[j] + 1 for j in range(k))
    return k, BurnReport(burned, remain)


def is_sr_complete(n: int, c: Sequence[int]) -> bool:
    """Prefix sums of the sorted configuration dominate ``i choose 2``."""
    _check_stable(n, c)
    acc = 0
    for i, v in enumerate(sorted(c)):
        acc += v
        if acc < i * (i + 1) // 2:
            return False
    return True


def sr_violation(n: int, c: Sequence[int]) -> tuple[frozenset[int], int, int] | None:
    """Smallest set ``A`` with fewer grains than the ``|A| choose 2`` edges inside it.

    Returns ``(A, grains, edges)`` or ``None`` when ``c`` is SR. Only the
    lowest entries need checking, so ``A`` is the shortest violating prefix
    of the sorted configuration.
    """
    _check_stable(n, c)
    order = sorted(range(n), key=c.__getitem__)
    acc = 0
    for i, idx in enumerate(order):
        acc += c[idx]
        if acc < i * (i + 1) // 2:
            return frozenset(j + 1 for j in order[: i + 1]), acc, i * (i + 1) // 2
    return None
