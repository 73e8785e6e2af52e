"""Tiny deterministic fan-out helper.

Verification sweeps and scans are embarrassingly parallel: a pure job per
modulus plus an ordered reduction.  ordered_map preserves input order, so a
merged report is byte-identical at any worker count, including 1.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))
