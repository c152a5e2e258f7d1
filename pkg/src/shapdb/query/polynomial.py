"""Exact products of polynomials with nonnegative integer coefficients.

Coefficient lists are little-endian (index = degree). Long products are done
by Kronecker substitution: both operands are packed into one big integer,
multiplied with GMP, and unpacked.
"""
from __future__ import annotations

import heapq
from functools import lru_cache
from itertools import count

import gmpy2

_NAIVE_LIMIT = 16


def binomial_row(n: int) -> tuple[int, ...]:
    return _binomial_row(n)


@lru_cache(maxsize=64)
def _binomial_row(n: int) -> tuple[int, ...]:
    row = [1] * (n + 1)
    for k in range(n):
        row[k + 1] = row[k] * (n - k) // (k + 1)
    return tuple(row)


def _naive(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pack(coeffs, width):
    data = b"".join(c.to_bytes(width, "little") for c in coeffs)
    return gmpy2.mpz(int.from_bytes(data, "little"))


def _unpack(value, width, length):
    data = int(value).to_bytes(width * length, "little")
    return [int.from_bytes(data[i * width:(i + 1) * width], "little") for i in range(length)]


def poly_mul(a, b) -> list[int]:
    if not a or not b:
        return []
    if min(len(a), len(b)) <= _NAIVE_LIMIT:
        return _naive(a, b)
    if min(a) < 0 or min(b) < 0:
        raise ValueError("packed multiplication needs nonnegative coefficients")
    bits = max(a).bit_length() + max(b).bit_length() + min(len(a), len(b)).bit_length() + 1
    width = (bits + 7) // 8
    length = len(a) + len(b) - 1
    return _unpack(_pack(a, width) * _pack(b, width), width, length)


def poly_product(polys) -> list[int]:
    """Product of many polynomials, smallest operands first."""
    polys = [list(p) for p in polys]
    if not polys:
        return [1]
    tick = count()
    heap = [(len(p), next(tick), p) for p in polys]
    heapq.heapify(heap)
    while len(heap) > 1:
        _, _, x = heapq.heappop(heap)
        _, _, y = heapq.heappop(heap)
        z = poly_mul(x, y)
        heapq.heappush(heap, (len(z), next(tick), z))
    return heap[0][2]
