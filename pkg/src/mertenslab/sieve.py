"""Segmented least-prime-factor sieve.

A :class:`SieveSegment` stores, for every n in a half-open block
``[lo, hi)``, the least prime factor ``lpf(n)`` and its multiplicity in n.
The Moebius function and the von Mangoldt function are derived exactly from
a segment; any block decomposition of ``[1, N]`` yields identical values.

Conventions: ``lpf(1) = 1`` with multiplicity 0 (sentinel); all integers are
signed 64-bit and the module refuses bounds at or above 2**63.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import RangeError

DEFAULT_SEGMENT_SIZE = 1 << 20
INT_LIMIT = 2 ** 63 - 1

_CACHE_MAGIC = b"MLAB"
_CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIQQ")


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit, as an int64 array (simple Eratosthenes)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if is_p[i]:
            is_p[i * i::i] = False
    return np.flatnonzero(is_p).astype(np.int64)


@dataclass(frozen=True)
class SieveSegment:
    """Least-prime-factor data for the block ``[lo, hi)``.

    Attributes:
        lo: Inclusive lower bound, >= 1.
        hi: Exclusive upper bound.
        lpf: int64 array, ``lpf[n - lo]`` = least prime factor of n (1 for n=1).
        lpf_mult: uint8 array, multiplicity of ``lpf`` in n (0 for n=1).
        base_primes: primes <= isqrt(hi - 1) used to sieve the block.
    """

    lo: int
    hi: int
    lpf: np.ndarray
    lpf_mult: np.ndarray
    base_primes: np.ndarray
    _prime_log: np.ndarray = field(repr=False, default=None)

    def __len__(self) -> int:
        return self.hi - self.lo

    def values(self) -> np.ndarray:
        """The integers n covered by this segment."""
        return np.arange(self.lo, self.hi, dtype=np.int64)


def _check_base_primes(hi: int, primes: np.ndarray) -> None:
    s = math.isqrt(hi - 1)
    if s < 2:
        return
    needed = base_primes(s)
    if len(primes) == 0:
        raise RangeError(f"base_primes must cover all primes <= {s}; got none")
    have = np.asarray(primes, dtype=np.int64)
    missing = np.setdiff1d(needed, have, assume_unique=False)
    if len(missing):
        raise RangeError(
            f"base_primes must cover all primes <= {s}; missing {int(missing[0])}"
        )


def build_segment(lo: int, hi: int, primes: Sequence[int] | np.ndarray) -> SieveSegment:
    """Sieve the block ``[lo, hi)``.

    Args:
        lo: Inclusive start, >= 1.
        hi: Exclusive end; requires ``hi > lo`` and ``hi - 1 < 2**63``.
        primes: all primes <= isqrt(hi - 1) (validated; extra primes are fine).

    Returns:
        An immutable :class:`SieveSegment`; output is a pure function of
        (lo, hi), independent of construction order.
    """
    if lo < 1:
        raise RangeError(f"segment lower bound must be >= 1, got {lo}")
    if hi <= lo:
        raise RangeError(f"empty or inverted segment range [{lo}, {hi})")
    if hi - 1 > INT_LIMIT:
        raise RangeError(f"upper bound {hi} exceeds the 64-bit limit {INT_LIMIT}")
    primes = np.asarray(primes, dtype=np.int64)
    _check_base_primes(hi, primes)

    size = hi - lo
    lpf = np.zeros(size, dtype=np.int64)
    mult = np.zeros(size, dtype=np.uint8)
    s = math.isqrt(hi - 1)
    cut = int(np.searchsorted(primes, s, side="right"))

    # Mark least prime factors largest-first so the smallest prime wins.
    for j in range(cut - 1, -1, -1):
        p = int(primes[j])
        start = ((lo + p - 1) // p) * p
        lpf[start - lo::p] = p

    n = np.arange(lo, hi, dtype=np.int64)
    unmarked = lpf == 0
    lpf[unmarked] = n[unmarked]  # primes above isqrt(hi-1), and n = 1
    mult[:] = 1

    # Multiplicity of the least prime factor: for p^k | n with lpf(n) = p.
    for j in range(cut):
        p = int(primes[j])
        q = p * p
        k = 2
        while q < hi:
            start = ((lo + q - 1) // q) * q
            idx = np.arange(start - lo, size, q)
            hit = idx[lpf[idx] == p]
            mult[hit] = k
            q *= p
            k += 1

    if lo == 1:
        lpf[0] = 1
        mult[0] = 0

    prime_log = np.log(primes[:cut].astype(np.float64)) if cut else np.array([])
    return SieveSegment(lo=lo, hi=hi, lpf=lpf, lpf_mult=mult,
                        base_primes=primes, _prime_log=prime_log)


def mobius_from_segment(seg: SieveSegment) -> np.ndarray:
    """Moebius values mu(n) in {-1, 0, +1} for the segment, as int8.

    Peels every base prime off the block: one sign flip per dividing prime,
    zero where a square divides, and a final flip where a single prime
    factor above isqrt(hi-1) remains.
    """
    lo, hi = seg.lo, seg.hi
    size = hi - lo
    mu = np.ones(size, dtype=np.int8)
    prod = np.ones(size, dtype=np.int64)
    s = math.isqrt(hi - 1)
    cut = int(np.searchsorted(seg.base_primes, s, side="right"))
    for j in range(cut):
        p = int(seg.base_primes[j])
        start = ((lo + p - 1) // p) * p
        sl = slice(start - lo, size, p)
        np.negative(mu[sl], out=mu[sl])
        prod[sl] *= p
        q = p * p
        if q < hi:
            start2 = ((lo + q - 1) // q) * q
            mu[start2 - lo::q] = 0
    # prod < n exactly when one prime factor > isqrt(hi-1) is left over.
    leftover = prod != np.arange(lo, hi, dtype=np.int64)
    mu[leftover] = -mu[leftover]
    if lo == 1:
        mu[0] = 1
    return mu


def lambda_from_segment(seg: SieveSegment) -> np.ndarray:
    """von Mangoldt values: log p where n = p^k, else 0 (float64).

    Logs come from one table per prime so repeated powers of p carry
    bit-identical values.
    """
    lo, hi = seg.lo, seg.hi
    lam = np.zeros(hi - lo, dtype=np.float64)
    n = np.arange(lo, hi, dtype=np.int64)
    is_prime = seg.lpf == n
    if lo == 1:
        is_prime[0] = False
    lam[is_prime] = np.log(seg.lpf[is_prime].astype(np.float64))
    s = math.isqrt(hi - 1)
    cut = int(np.searchsorted(seg.base_primes, s, side="right"))
    for j in range(cut):
        p = int(seg.base_primes[j])
        log_p = float(seg._prime_log[j]) if seg._prime_log is not None else math.log(p)
        q = p * p
        while q < lo:
            q *= p
        while q < hi:
            lam[q - lo] = log_p
            q *= p
    return lam


# ----------------------------------------------------------------------
# Binary segment cache: header (magic, version, lo, hi) + lpf u64 + mult u8
# ----------------------------------------------------------------------

def cache_path(cache_dir: str, lo: int, hi: int) -> str:
    return os.path.join(cache_dir, f"mlab_{lo}_{hi}.seg")


def save_segment(seg: SieveSegment, cache_dir: str) -> str:
    """Write a segment to the cache directory (atomic replace)."""
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, seg.lo, seg.hi)
    header = _CACHE_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, seg.lo, seg.hi)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(seg.lpf.astype("<u8").tobytes())
            fh.write(seg.lpf_mult.astype("u1").tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_segment(cache_dir: str, lo: int, hi: int,
                 primes: np.ndarray) -> SieveSegment | None:
    """Load ``[lo, hi)`` from cache; None on miss or header mismatch."""
    path = cache_path(cache_dir, lo, hi)
    if not os.path.exists(path):
        return None
    size = hi - lo
    expect = _CACHE_HEADER.size + 8 * size + size
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) != expect:
        return None
    magic, version, flo, fhi = _CACHE_HEADER.unpack_from(blob, 0)
    if magic != _CACHE_MAGIC or version != _CACHE_VERSION or flo != lo or fhi != hi:
        return None
    off = _CACHE_HEADER.size
    lpf = np.frombuffer(blob, dtype="<u8", count=size, offset=off).astype(np.int64)
    mult = np.frombuffer(blob, dtype="u1", count=size, offset=off + 8 * size).copy()
    s = math.isqrt(hi - 1)
    cut = int(np.searchsorted(primes, s, side="right"))
    prime_log = np.log(primes[:cut].astype(np.float64)) if cut else np.array([])
    return SieveSegment(lo=lo, hi=hi, lpf=lpf, lpf_mult=mult,
                        base_primes=primes, _prime_log=prime_log)


def iter_segments(n_max: int,
                  segment_size: int = DEFAULT_SEGMENT_SIZE,
                  primes: np.ndarray | None = None,
                  cache_dir: str | None = None,
                  workers: int = 1) -> Iterator[SieveSegment]:
    """Yield segments covering [1, n_max] in ascending order.

    Segments are independent work units: with ``workers > 1`` they are built
    concurrently but always yielded in order, so consumers see a schedule-
    independent stream.
    """
    if n_max < 1:
        raise RangeError(f"n_max must be >= 1, got {n_max}")
    if n_max > INT_LIMIT:
        raise RangeError(f"n_max {n_max} exceeds the 64-bit limit {INT_LIMIT}")
    if segment_size < 1:
        raise RangeError("segment_size must be positive")
    if primes is None:
        primes = base_primes(math.isqrt(n_max))

    bounds = [(lo, min(lo + segment_size, n_max + 1))
              for lo in range(1, n_max + 1, segment_size)]

    def make(b):
        lo, hi = b
        if cache_dir is not None:
            seg = load_segment(cache_dir, lo, hi, primes)
            if seg is not None:
                return seg
        seg = build_segment(lo, hi, primes)
        if cache_dir is not None:
            save_segment(seg, cache_dir)
        return seg

    if workers <= 1:
        for b in bounds:
            yield make(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(make, bounds)
