"""Checkpointed prefix sums of the sieved functions.

The store keeps three running sums checkpointed every ``stride`` integers
(the Mertens function M as exact int64, A(x) = sum mu(n) log n, and the
piecewise-exact integral I(x) = sum M(n) log((n+1)/n)), plus a sparse table
of prime powers carrying the von Mangoldt values, from which psi and its
relatives are answered directly.  Values between checkpoints are recovered
by re-sieving one window, so memory stays O(n_max / stride) while arbitrary
real-argument queries remain cheap; recently used windows are kept in an
LRU cache.

Key evaluators built on top of the store:

    big_f(x)          F(x) = sum_{n<=x} mu(n) log(x/n) = M(|x|) log x - A(|x|)
    big_f_integral(x) the same F(x) as integral_1^x M(y)/y dy, evaluated in
                      closed form over the unit steps of M
    h_smoothed(y)     F(y)/y       (normalized smoothed Mertens function)
    h_mertens(y)      M(y)/y
    g_weighted(x)     log x * sum_{n<=x} F(x/n), sharing one (M, A) pair per
                      block of constant floor(x/n)
"""

from __future__ import annotations

import math
from collections import OrderedDict

import numpy as np
from scipy.special import gammaln

from . import sieve
from .accum import NeumaierSum, chunked_cumsum
from .errors import CapabilityError, RangeError

DEFAULT_STRIDE = 1 << 16


def x_from_y(y):
    """Map the summation variable y to the smoothed argument x = (log y)^2."""
    return np.log(y) ** 2


def y_from_x(x):
    """Inverse map: y = exp(sqrt(x))."""
    return np.exp(np.sqrt(x))


class PrefixSums:
    """Checkpointed running sums over [1, n_max] with exact window replay."""

    def __init__(self, n_max: int, stride: int = DEFAULT_STRIDE,
                 segment_size: int = sieve.DEFAULT_SEGMENT_SIZE,
                 cache_dir: str | None = None, workers: int = 1,
                 window_cache: int = 32):
        if n_max < 1:
            raise RangeError(f"n_max must be >= 1, got {n_max}")
        if n_max > sieve.INT_LIMIT:
            raise RangeError(f"n_max {n_max} exceeds the 64-bit limit")
        if segment_size % stride != 0:
            raise RangeError("segment_size must be a multiple of the checkpoint stride")
        self.n_max = int(n_max)
        self.stride = int(stride)
        self.segment_size = int(segment_size)
        self.cache_dir = cache_dir
        self.primes = sieve.base_primes(math.isqrt(self.n_max))
        self._windows: OrderedDict[int, dict] = OrderedDict()
        self._window_cap = window_cache
        self.table_cap = 0
        self._s_lambda2 = None
        self._s_theta = None
        self._build(workers)

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def _build(self, workers: int) -> None:
        stride, n_max = self.stride, self.n_max
        n_cp = n_max // stride
        self.cp_m = np.zeros(n_cp + 1, dtype=np.int64)
        self.cp_a = np.zeros(n_cp + 1, dtype=np.float64)
        self.cp_fint = np.zeros(n_cp + 1, dtype=np.float64)

        carry_m = 0
        acc_a = NeumaierSum()
        acc_f = NeumaierSum()
        pp_vals, pp_lam = [], []

        for seg in sieve.iter_segments(n_max, self.segment_size, self.primes,
                                       self.cache_dir, workers):
            lo, hi = seg.lo, seg.hi
            mu = sieve.mobius_from_segment(seg)
            lam = sieve.lambda_from_segment(seg)
            n = seg.values()
            logn = np.log(n.astype(np.float64))

            mask = lam > 0.0
            pp_vals.append(n[mask])
            pp_lam.append(lam[mask])

            m_cum = carry_m + np.cumsum(mu, dtype=np.int64)
            a_terms = mu * logn
            f_terms = m_cum * np.log1p(1.0 / n)

            # checkpoints land on the segment grid (segment_size % stride == 0)
            first_k = (lo - 1) // stride + 1
            last_k = (hi - 1) // stride
            for k in range(first_k, last_k + 1):
                off_lo = (k - 1) * stride + 1 - lo
                off_hi = k * stride - lo + 1
                acc_a.add(float(np.sum(a_terms[off_lo:off_hi])))
                acc_f.add(float(np.sum(f_terms[off_lo:off_hi])))
                self.cp_m[k] = m_cum[off_hi - 1]
                self.cp_a[k] = acc_a.value
                self.cp_fint[k] = acc_f.value
            carry_m = int(m_cum[-1])

        self.mertens_at_n_max = carry_m
        self.pp = np.concatenate(pp_vals) if pp_vals else np.zeros(0, np.int64)
        self.pp_lam = np.concatenate(pp_lam) if pp_lam else np.zeros(0)
        self.pp_log = np.log(self.pp.astype(np.float64)) if len(self.pp) else np.zeros(0)
        self.pp_cum_lam = chunked_cumsum(self.pp_lam)
        self.pp_cum_lam_over = chunked_cumsum(self.pp_lam / self.pp)
        self.pp_cum_lamlog = chunked_cumsum(self.pp_lam * self.pp_log)

    def attach_table(self, table) -> None:
        """Adopt dense Selberg-weight prefix sums from an arithmetic table."""
        self.table_cap = table.n_max
        self._s_lambda2 = chunked_cumsum(table.lambda2[1:])
        self._s_theta = chunked_cumsum(table.theta[1:])

    # ------------------------------------------------------------------
    # window replay
    # ------------------------------------------------------------------

    def _window(self, k: int) -> dict:
        win = self._windows.get(k)
        if win is not None:
            self._windows.move_to_end(k)
            return win
        lo = k * self.stride + 1
        hi = min((k + 1) * self.stride, self.n_max) + 1
        seg = None
        if self.cache_dir is not None:
            seg = sieve.load_segment(self.cache_dir, lo, hi, self.primes)
        if seg is None:
            seg = sieve.build_segment(lo, hi, self.primes)
        mu = sieve.mobius_from_segment(seg)
        n = seg.values()
        logn = np.log(n.astype(np.float64))
        m_cum = self.cp_m[k] + np.cumsum(mu, dtype=np.int64)
        a_cum = self.cp_a[k] + np.cumsum(mu * logn)
        f_cum = self.cp_fint[k] + np.cumsum(m_cum * np.log1p(1.0 / n))
        win = {"mu": mu, "m": m_cum, "a": a_cum, "fint": f_cum, "lo": lo, "hi": hi}
        self._windows[k] = win
        if len(self._windows) > self._window_cap:
            self._windows.popitem(last=False)
        return win

    def _floor_checked(self, x, lo: float = 1.0) -> int:
        xv = float(x)
        if not (lo <= xv):
            raise RangeError(f"argument {xv} below admissible minimum {lo}")
        if xv > self.n_max:
            raise CapabilityError(
                f"argument {xv} beyond table cap {self.n_max}", max_usable=self.n_max)
        return int(math.floor(xv))

    def _cum_lookup(self, kind: str, n: int):
        """Value of the running sum at integer n (0 for n = 0)."""
        if n == 0:
            return 0 if kind == "m" else 0.0
        k, r = divmod(n, self.stride)
        if r == 0:
            if kind == "m":
                return int(self.cp_m[k])
            return float(self.cp_a[k] if kind == "a" else self.cp_fint[k])
        win = self._window(k)
        return win[kind][r - 1]

    # ------------------------------------------------------------------
    # point queries
    # ------------------------------------------------------------------

    def mertens(self, x) -> int:
        """M(floor(x)) as an exact integer, 1 <= x <= n_max."""
        return int(self._cum_lookup("m", self._floor_checked(x)))

    def mu_log_sum(self, x) -> float:
        """A(floor(x)) = sum_{n<=x} mu(n) log n."""
        return float(self._cum_lookup("a", self._floor_checked(x)))

    def psi(self, x) -> float:
        """Chebyshev psi(x) = sum of von Mangoldt values up to x."""
        n = self._floor_checked(x)
        idx = int(np.searchsorted(self.pp, n, side="right"))
        return float(self.pp_cum_lam[idx - 1]) if idx else 0.0

    def big_f(self, x) -> float:
        """Smoothed Mertens sum F(x) = M(|x|) log x - A(|x|), x >= 1."""
        n = self._floor_checked(x)
        return self._cum_lookup("m", n) * math.log(x) - self._cum_lookup("a", n)

    def big_f_integral(self, x) -> float:
        """F(x) via the piecewise-exact integral of M(y)/y over [1, x]."""
        n = self._floor_checked(x)
        val = float(self._cum_lookup("fint", n - 1)) if n > 1 else 0.0
        frac = float(x) / n
        if frac > 1.0:
            val += self._cum_lookup("m", n) * math.log(frac)
        return val

    def h_smoothed(self, y) -> float:
        """F(y)/y, the smoothed sum normalized at y = exp(sqrt(x))."""
        return self.big_f(y) / float(y)

    def h_mertens(self, y) -> float:
        """M(y)/y, the raw Mertens ratio at y = exp(sqrt(x))."""
        return self.mertens(y) / float(y)

    # ------------------------------------------------------------------
    # batched queries (grouped by window so each window is replayed once)
    # ------------------------------------------------------------------

    def _cum_many(self, kind: str, ns: np.ndarray) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if len(ns) and (ns.min() < 0 or ns.max() > self.n_max):
            bad = ns.min() if ns.min() < 0 else ns.max()
            raise CapabilityError(f"index {bad} outside [0, {self.n_max}]",
                                  max_usable=self.n_max)
        dtype = np.int64 if kind == "m" else np.float64
        out = np.zeros(len(ns), dtype=dtype)
        ks, rs = np.divmod(ns, self.stride)
        at_cp = rs == 0
        if at_cp.any():
            cp = self.cp_m if kind == "m" else (self.cp_a if kind == "a" else self.cp_fint)
            out[at_cp] = cp[ks[at_cp]]
        rest = ~at_cp
        for k in np.unique(ks[rest]):
            win = self._window(int(k))
            sel = rest & (ks == k)
            out[sel] = win[kind][rs[sel] - 1]
        return out

    def mertens_many(self, xs) -> np.ndarray:
        """Vectorized M(floor(x)) for an array of arguments."""
        ns = np.floor(np.asarray(xs, dtype=np.float64)).astype(np.int64)
        if len(ns) and ns.min() < 1:
            raise RangeError("arguments below 1 in mertens_many")
        return self._cum_many("m", ns)

    def big_f_many(self, ys) -> np.ndarray:
        """Vectorized F(y) for an array of real arguments >= 1."""
        ys = np.asarray(ys, dtype=np.float64)
        ns = np.floor(ys).astype(np.int64)
        if len(ns) and ns.min() < 1:
            raise RangeError("arguments below 1 in big_f_many")
        m = self._cum_many("m", ns).astype(np.float64)
        a = self._cum_many("a", ns)
        return m * np.log(ys) - a

    def psi_many(self, xs) -> np.ndarray:
        ns = np.floor(np.asarray(xs, dtype=np.float64)).astype(np.int64)
        idx = np.searchsorted(self.pp, ns, side="right")
        out = np.zeros(len(ns))
        nz = idx > 0
        out[nz] = self.pp_cum_lam[idx[nz] - 1]
        return out

    def mobius_range(self, lo: int, hi: int) -> np.ndarray:
        """Dense mu values for n in [lo, hi), recovered from cached windows."""
        if lo < 1 or hi <= lo or hi - 1 > self.n_max:
            raise RangeError(f"invalid range [{lo}, {hi}) for mobius_range")
        out = np.empty(hi - lo, dtype=np.int8)
        pos = lo
        while pos < hi:
            k = (pos - 1) // self.stride
            win = self._window(k)
            take = min(hi, win["hi"]) - pos
            off = pos - win["lo"]
            out[pos - lo:pos - lo + take] = win["mu"][off:off + take]
            pos += take
        return out

    def lambda_range(self, lo: int, hi: int) -> np.ndarray:
        """Dense von Mangoldt values for n in [lo, hi), from the sparse table."""
        if lo < 1 or hi <= lo or hi - 1 > self.n_max:
            raise RangeError(f"invalid range [{lo}, {hi}) for lambda_range")
        out = np.zeros(hi - lo)
        i0 = np.searchsorted(self.pp, lo, side="left")
        i1 = np.searchsorted(self.pp, hi - 1, side="right")
        out[self.pp[i0:i1] - lo] = self.pp_lam[i0:i1]
        return out

    # ------------------------------------------------------------------
    # Selberg-weight prefix sums (dense below the attached table cap,
    # prime-power hyperbola enumeration above it)
    # ------------------------------------------------------------------

    def lambda2_sum(self, x) -> float:
        """Sum of the Selberg weight (Lambda*Lambda + Lambda log) up to x."""
        n = self._floor_checked(x)
        if self._s_lambda2 is not None and n <= self.table_cap:
            return float(self._s_lambda2[n - 1])
        return self._lambda_conv_sum(n) + self._lamlog_sum(n)

    def theta_sum(self, x) -> float:
        """Sum of (Lambda*Lambda)(n)/log n up to x."""
        n = self._floor_checked(x)
        if self._s_theta is not None and n <= self.table_cap:
            return float(self._s_theta[n - 1])
        return self._theta_sum_sparse(n)

    def _pp_upto(self, n: int) -> int:
        return int(np.searchsorted(self.pp, n, side="right"))

    def _lamlog_sum(self, n: int) -> float:
        i = self._pp_upto(n)
        return float(self.pp_cum_lamlog[i - 1]) if i else 0.0

    def _lambda_conv_sum(self, n: int) -> float:
        """sum_{ab<=n} Lambda(a) Lambda(b) by the symmetric hyperbola split."""
        if n < 4:
            return 0.0
        r = math.isqrt(n)
        i = self._pp_upto(r)
        if i == 0:
            return 0.0
        a = self.pp[:i]
        psi_at = self.psi_many(n // a)
        cross = 2.0 * float(np.sum(self.pp_lam[:i] * psi_at))
        corner = float(self.pp_cum_lam[i - 1]) ** 2
        return cross - corner

    def _theta_sum_sparse(self, n: int) -> float:
        """sum_{ab<=n} Lambda(a) Lambda(b) / log(ab) over prime-power pairs."""
        if n < 4:
            return 0.0
        r = math.isqrt(n)
        i = self._pp_upto(r)
        if i == 0:
            return 0.0
        total = NeumaierSum()
        for j in range(i):
            la, lga = float(self.pp_lam[j]), float(self.pp_log[j])
            hi = self._pp_upto(n // int(self.pp[j]))
            total.add(2.0 * la * float(np.sum(
                self.pp_lam[:hi] / (lga + self.pp_log[:hi]))))
        lam_s, log_s = self.pp_lam[:i], self.pp_log[:i]
        corner = float(np.sum(
            (lam_s[:, None] * lam_s[None, :]) / (log_s[:, None] + log_s[None, :])))
        return total.value - corner

    # ------------------------------------------------------------------
    # weighted and remainder-style sums
    # ------------------------------------------------------------------

    def g_weighted(self, x) -> float:
        """log x * sum_{n<=x} F(x/n), one (M, A) lookup per divisor block."""
        n_top = self._floor_checked(x)
        xv = float(x)
        if n_top < 1:
            return 0.0
        starts, stops, vs = [], [], []
        n = 1
        while n <= n_top:
            v = n_top // n
            n2 = n_top // v
            starts.append(n)
            stops.append(n2)
            vs.append(v)
            n = n2 + 1
        starts = np.array(starts, dtype=np.int64)
        stops = np.array(stops, dtype=np.int64)
        vs = np.array(vs, dtype=np.int64)
        m = self._cum_many("m", vs).astype(np.float64)
        a = self._cum_many("a", vs)
        counts = (stops - starts + 1).astype(np.float64)
        log_sum = counts * math.log(xv) - (gammaln(stops + 1.0) - gammaln(starts.astype(np.float64)))
        total = float(np.sum(m * log_sum) - np.sum(a * counts))
        return math.log(xv) * total

    def lambda_over_n_sum(self, x) -> tuple[float, float]:
        """(sum_{n<=x} Lambda(n)/n, its gap to log x); 2 <= x <= n_max."""
        n = self._floor_checked(x, lo=2.0)
        i = self._pp_upto(n)
        val = float(self.pp_cum_lam_over[i - 1]) if i else 0.0
        return val, val - math.log(float(x))

    # ------------------------------------------------------------------
    # export
    # ------------------------------------------------------------------

    def export_rows(self, xs) -> list[dict]:
        """Rows for the x,M,F_sum,F_integral,psi,S_lambda2 CSV schema."""
        rows = []
        for x in xs:
            rows.append({
                "x": float(x),
                "M": self.mertens(x),
                "F_sum": self.big_f(x),
                "F_integral": self.big_f_integral(x),
                "psi": self.psi(x),
                "S_lambda2": self.lambda2_sum(x),
            })
        return rows


def log_square_sum(x) -> tuple[float, float]:
    """(sum_{n<=x} log(x/n)^2, that sum minus 2x); defined for x >= 1."""
    xv = float(x)
    if xv < 1.0:
        raise RangeError(f"log_square_sum needs x >= 1, got {xv}")
    top = int(math.floor(xv))
    log_x = math.log(xv)
    acc = NeumaierSum()
    chunk = 1 << 20
    for lo in range(1, top + 1, chunk):
        hi = min(lo + chunk, top + 1)
        t = log_x - np.log(np.arange(lo, hi, dtype=np.float64))
        acc.add(float(np.sum(t * t)))
    value = acc.value
    return value, value - 2.0 * xv
