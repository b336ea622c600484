"""Profiles of the normalized smoothed sum H and its zero-interval statistics.

Two arithmetic profiles share one parametrization, y = exp(sqrt(x)):

    smoothed:  H(x) = F(y)/y   with F(y) = sum_{n<=y} mu(n) log(y/n)
    mertens:   H(x) = M(y)/y

Cumulative integrals over the x-domain are evaluated exactly.  Substituting
y = exp(sqrt(x)) gives dx = 2 log(u)/u du, and on each unit step [n, n+1)
the integrand's arithmetic part is M(n) log u - A(n) (or the constant M(n)),
so every step contributes a closed form built from

    Q(u) = -(log u + 1)/u             (antiderivative of log u / u^2)
    P(u) = -(log^2 u + 2 log u + 2)/u (antiderivative of log^2 u / u^2)

Absolute-value integrals split a step only where the linear-in-log factor
changes sign; that root is also a zero of the continuous F, which is how
zero crossings are located and then refined by bisection.

For the mertens profile H is a step function: M moves by at most one per
step, so every sign change passes through an exact-zero run; the run's
first and last step boundaries are recorded as zeros (left endpoints, in
x-coordinates) and flagged as step boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import sieve
from .accum import NeumaierSum
from .errors import CapabilityError, RangeError
from .summatory import PrefixSums

X_MIN_GUARD = 1e-6          # left cutoff: 1/(2 sqrt(x)) is singular at 0
ZERO_XTOL_REL = 1e-12       # x-domain relative tolerance for refined zeros
Y_GRID_START = 2.0


def _q_anti(u, log_u):
    return -(log_u + 1.0) / u


def _p_anti(u, log_u):
    return -(log_u * (log_u + 2.0) + 2.0) / u


def _piece_smoothed(m, a, u0, u1):
    """Signed integral of 2 (m log u - a) log u / u^2 over [u0, u1]."""
    l0, l1 = math.log(u0), math.log(u1)
    return 2.0 * (m * (_p_anti(u1, l1) - _p_anti(u0, l0))
                  - a * (_q_anti(u1, l1) - _q_anti(u0, l0)))


def _piece_mertens(m, u0, u1):
    """Signed integral of 2 m log u / u^2 over [u0, u1]."""
    return 2.0 * m * (_q_anti(u1, math.log(u1)) - _q_anti(u0, math.log(u0)))


@dataclass
class StreamResult:
    """Exact cumulative integrals and zero events up to each query point."""

    ys: np.ndarray
    cum_abs: np.ndarray
    cum_signed: np.ndarray
    f_at: np.ndarray            # F(y) (smoothed) or M(floor(y)) (mertens)
    zeros_y: np.ndarray
    zeros_cum_abs: np.ndarray
    zero_flags: list
    decade_sup: dict            # mertens only: decade -> sup |M(n)|/n
    total_abs: float
    total_signed: float


def _refine_crossing(m, a, n, tol_rel=ZERO_XTOL_REL):
    """Bisect m log u - a on [n, n+1] down to an x-domain width tol."""
    lo, hi = float(n), float(n + 1)
    f_lo = m * math.log(lo) - a
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        x_mid = math.log(mid) ** 2
        du_tol = tol_rel * max(x_mid, X_MIN_GUARD) * mid / max(2.0 * math.log(mid), 0.2)
        if hi - lo <= max(du_tol, 4.0 * math.ulp(mid)):
            return mid
        f_mid = m * math.log(mid) - a
        if f_mid == 0.0:
            return mid
        if (f_lo < 0.0) == (f_mid < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def stream_cumulative(ys, kind: str = "smoothed",
                      segment_size: int = sieve.DEFAULT_SEGMENT_SIZE,
                      primes: np.ndarray | None = None,
                      collect_decade_sup: bool = False) -> StreamResult:
    """One sieve pass computing cumulative integrals at the query points ys.

    ``ys`` must be >= 1; they are sorted internally and results are returned
    in the caller's order.  ``cum_abs[i]`` is the x-domain integral of |H|
    from 0 up to x = (log ys[i])^2, and ``cum_signed`` likewise without the
    absolute value.
    """
    if kind not in ("smoothed", "mertens"):
        raise RangeError(f"unknown profile kind {kind!r}")
    ys = np.asarray(ys, dtype=np.float64)
    if ys.size == 0:
        return StreamResult(ys=ys, cum_abs=np.zeros(0), cum_signed=np.zeros(0),
                            f_at=np.zeros(0), zeros_y=np.zeros(0),
                            zeros_cum_abs=np.zeros(0), zero_flags=[],
                            decade_sup={}, total_abs=0.0, total_signed=0.0)
    if ys.min() < 1.0:
        raise RangeError("query points must satisfy y >= 1")
    order = np.argsort(ys, kind="stable")
    ys_sorted = ys[order]
    n_top = max(int(math.floor(float(ys_sorted[-1]))), 1)
    smoothed = kind == "smoothed"

    cum_abs_q = np.zeros(len(ys_sorted))
    cum_sig_q = np.zeros(len(ys_sorted))
    f_at_q = np.zeros(len(ys_sorted))
    zeros_y, zeros_cum, zero_flags = [], [], []
    decade_sup: dict = {}

    acc_abs = NeumaierSum()
    acc_sig = NeumaierSum()
    acc_a = NeumaierSum()
    carry_m = 0
    run_open = False            # an M == 0 run reaches the segment seam
    run_start_n = 0
    last_zero_n = 0
    q_pos = 0

    if primes is None:
        primes = sieve.base_primes(math.isqrt(max(n_top + 1, 4)))

    def emit_step_zero(n_pos: int, cum_value: float) -> None:
        zeros_y.append(float(n_pos))
        zeros_cum.append(cum_value)
        zero_flags.append("step")

    for seg in sieve.iter_segments(n_top, segment_size, primes):
        lo, hi = seg.lo, seg.hi
        size = hi - lo
        mu = sieve.mobius_from_segment(seg)
        m_cum = carry_m + np.cumsum(mu, dtype=np.int64)
        n = seg.values()
        log_all = np.log(np.arange(lo, hi + 1, dtype=np.float64))
        log_n, log_n1 = log_all[:-1], log_all[1:]
        un = n.astype(np.float64)
        u1 = (n + 1).astype(np.float64)
        q_n = _q_anti(un, log_n)
        q_n1 = _q_anti(u1, log_n1)
        mf = m_cum.astype(np.float64)

        if smoothed:
            a_terms = mu * log_n
            a_cum = acc_a.value + np.cumsum(a_terms)
            p_n = _p_anti(un, log_n)
            p_n1 = _p_anti(u1, log_n1)
            d_sig = 2.0 * (mf * (p_n1 - p_n) - a_cum * (q_n1 - q_n))
            g_start = mf * log_n - a_cum
            g_end = mf * log_n1 - a_cum
            cross = g_start * g_end < 0.0
        else:
            a_cum = None
            d_sig = 2.0 * mf * (q_n1 - q_n)
            cross = None
        d_abs = np.abs(d_sig)

        # crossings of the continuous smoothed sum (rare); fix the step's
        # absolute increment before prefix sums are taken
        cross_fix = {}
        if smoothed:
            for i in np.flatnonzero(cross):
                m_i = float(mf[i])
                a_i = float(a_cum[i])
                step_n = int(n[i])
                u_star = _refine_crossing(m_i, a_i, step_n)
                left = abs(_piece_smoothed(m_i, a_i, step_n, u_star))
                right = abs(_piece_smoothed(m_i, a_i, u_star, step_n + 1))
                d_abs[i] = left + right
                cross_fix[i] = (u_star, left)

        # exclusive local prefix: cumulative value just before each step
        pre_abs = np.empty(size)
        pre_sig = np.empty(size)
        pre_abs[0] = acc_abs.value
        pre_sig[0] = acc_sig.value
        if size > 1:
            np.cumsum(d_abs[:-1], out=pre_abs[1:])
            pre_abs[1:] += acc_abs.value
            np.cumsum(d_sig[:-1], out=pre_sig[1:])
            pre_sig[1:] += acc_sig.value

        if smoothed:
            for i in sorted(cross_fix):
                zeros_y.append(cross_fix[i][0])
                zeros_cum.append(float(pre_abs[i]) + cross_fix[i][1])
                zero_flags.append("crossing")
        else:
            # maximal runs of M == 0: zeros at the run's first and last step
            z = m_cum == 0
            if run_open and (size == 0 or not z[0]):
                if last_zero_n > run_start_n:
                    emit_step_zero(last_zero_n, acc_abs.value)
                run_open = False
            if z.any():
                idx = np.flatnonzero(z)
                gaps = np.flatnonzero(np.diff(idx) > 1)
                starts = idx[np.concatenate(([0], gaps + 1))]
                ends = idx[np.concatenate((gaps, [len(idx) - 1]))]
                for s_i, e_i in zip(starts, ends):
                    n_s, n_e = int(n[s_i]), int(n[e_i])
                    continued = run_open and s_i == 0
                    if not continued:
                        emit_step_zero(n_s, float(pre_abs[s_i]))
                        run_start_n = n_s
                    if e_i == size - 1:
                        run_open = True
                        last_zero_n = n_e
                    else:
                        run_open = False
                        if n_e > run_start_n:
                            emit_step_zero(n_e, float(pre_abs[e_i]))
            if collect_decade_sup:
                ratios = np.abs(mf) / un
                d_lo = len(str(lo)) - 1
                d_hi = len(str(hi - 1)) - 1
                for dec in range(d_lo, d_hi + 1):
                    a_edge = max(lo, 10 ** dec)
                    b_edge = min(hi - 1, 10 ** (dec + 1) - 1)
                    if a_edge > b_edge:
                        continue
                    sup = float(ratios[a_edge - lo:b_edge - lo + 1].max())
                    decade_sup[dec] = max(decade_sup.get(dec, 0.0), sup)

        # answer query points landing in this segment
        while q_pos < len(ys_sorted) and ys_sorted[q_pos] < hi:
            yq = float(ys_sorted[q_pos])
            i = int(math.floor(yq)) - lo
            m_i = float(mf[i])
            a_i = float(a_cum[i]) if smoothed else 0.0
            step_n = int(n[i])
            if yq > step_n:
                if smoothed:
                    part_sig = _piece_smoothed(m_i, a_i, step_n, yq)
                    if i in cross_fix and cross_fix[i][0] < yq:
                        u_star, left_abs = cross_fix[i]
                        part_abs = left_abs + abs(_piece_smoothed(m_i, a_i, u_star, yq))
                    else:
                        part_abs = abs(part_sig)
                else:
                    part_sig = _piece_mertens(m_i, step_n, yq)
                    part_abs = abs(part_sig)
            else:
                part_sig = part_abs = 0.0
            q_idx = order[q_pos]
            cum_abs_q[q_idx] = float(pre_abs[i]) + part_abs
            cum_sig_q[q_idx] = float(pre_sig[i]) + part_sig
            f_at_q[q_idx] = (m_i * math.log(yq) - a_i) if smoothed else m_i
            q_pos += 1

        acc_abs.add(float(np.sum(d_abs)))
        acc_sig.add(float(np.sum(d_sig)))
        carry_m = int(m_cum[-1])
        if smoothed:
            acc_a.add(float(np.sum(a_terms)))

    if run_open and last_zero_n > run_start_n:
        emit_step_zero(last_zero_n, acc_abs.value)

    return StreamResult(
        ys=ys, cum_abs=cum_abs_q, cum_signed=cum_sig_q, f_at=f_at_q,
        zeros_y=np.array(zeros_y, dtype=np.float64),
        zeros_cum_abs=np.array(zeros_cum, dtype=np.float64),
        zero_flags=zero_flags, decade_sup=decade_sup,
        total_abs=acc_abs.value, total_signed=acc_sig.value)


# ----------------------------------------------------------------------
# profile objects
# ----------------------------------------------------------------------

@dataclass
class ZeroInterval:
    """Statistics of one interval [a, b] between successive zeros of H.

    ``h_at_xi`` is the mean value integral_abs / (b - a) by construction;
    ``xi`` locates a point where |H| attains it (nan for step profiles).
    ``deriv_bound`` is the endpoint-derivative bound m (b-a)^2 / 2 and
    ``damped_bound`` is alpha (b-a) (1 - kappa |H(xi)|) when the profile
    constants are available (nan otherwise).
    """

    a: float
    b: float
    integral_abs: float
    xi: float
    h_at_xi: float
    deriv_bound: float
    damped_bound: float


@dataclass
class ConstantEstimates:
    """Finite-range estimates of the proof constants (labels say so).

    All values are measured on the computed range; the sup-style quantities
    are estimates of limsups and cannot be certified from finite data.
    """

    alpha_hat: float            # sup |H| over the tail window
    ell_hat: float              # tail-sup surrogate for limsup |H|
    mean_abs_hat: float         # (1/x_max) * integral_0^{x_max} |H|
    mean_abs_tail_hat: float    # same average restricted to the tail window
    deriv_sup_hat: float        # sup |H'| over a dense grid
    signed_span_hat: float      # sup over pairs of |integral_{x1}^{x2} H|
    iota_hat: float             # min over intervals of |H(xi)|
    kappa: float                # (2h - m) alpha / (2 M h^2); nan when M = 0
    epsilon: float              # alpha / h
    h_param: float              # max of the two feasibility constraints
    lambda_est: float           # kappa * iota (nan when not applicable)
    window_lo: float
    window_hi: float
    n_window_samples: int


@dataclass
class HProfile:
    """Sampled profile of H with exact cumulative integrals and zeros."""

    kind: str                   # smoothed | mertens | synthetic
    y_max: float
    x_samples: np.ndarray
    y_samples: np.ndarray
    h_values: np.ndarray
    cumulative_abs_integral: np.ndarray
    cumulative_signed_integral: np.ndarray
    zeros: np.ndarray           # x-domain positions
    zero_flags: list
    cum_abs_at_zeros: np.ndarray
    zeros_are_step_boundaries: bool
    h_continuous: Callable = field(repr=False, default=None)
    h_derivative_fn: Callable = field(repr=False, default=None)
    store: PrefixSums = field(repr=False, default=None)
    decade_sups: dict = None
    intervals: list = None
    constants: ConstantEstimates = None

    @property
    def x_max(self) -> float:
        return float(self.x_samples[-1]) if len(self.x_samples) else 0.0

    def finite_zero_branch(self) -> bool:
        """True when fewer than two zeros exist in range (no interval data)."""
        return len(self.zeros) < 2


def build_profile(store: PrefixSums, kind: str = "smoothed",
                  y_max: int | None = None,
                  samples_per_decade: int = 32,
                  collect_decade_sup: bool = None) -> HProfile:
    """Sample H on a geometric y-grid and attach exact cumulative integrals.

    ``y_max`` defaults to the store cap.  A ``y_max`` below the grid start
    (2.0) yields an empty profile, which downstream consumers must treat as
    the finite-zeros branch rather than an error.
    """
    if kind not in ("smoothed", "mertens"):
        raise RangeError(f"unknown profile kind {kind!r}")
    if samples_per_decade < 10:
        raise RangeError("samples_per_decade must be >= 10")
    if y_max is None:
        y_max = store.n_max
    if y_max > store.n_max:
        raise CapabilityError(f"y_max {y_max} beyond store cap {store.n_max}",
                              max_usable=store.n_max)
    if collect_decade_sup is None:
        collect_decade_sup = kind == "mertens"

    if y_max < Y_GRID_START:
        empty = np.zeros(0)
        return HProfile(kind=kind, y_max=float(y_max), x_samples=empty,
                        y_samples=empty, h_values=empty,
                        cumulative_abs_integral=empty,
                        cumulative_signed_integral=empty,
                        zeros=empty, zero_flags=[], cum_abs_at_zeros=empty,
                        zeros_are_step_boundaries=(kind == "mertens"),
                        h_continuous=_make_h_eval(store, kind), store=store)

    n_pts = max(int(math.ceil(samples_per_decade * math.log10(y_max / Y_GRID_START))), 1) + 1
    ys = np.geomspace(Y_GRID_START, float(y_max), n_pts)
    ys[-1] = float(y_max)
    ys = np.unique(ys)

    res = stream_cumulative(ys, kind=kind, primes=store.primes,
                            collect_decade_sup=collect_decade_sup)
    xs = np.log(ys) ** 2
    h_vals = res.f_at / ys

    zeros_x = np.log(res.zeros_y) ** 2 if len(res.zeros_y) else np.zeros(0)
    return HProfile(
        kind=kind, y_max=float(y_max), x_samples=xs, y_samples=ys,
        h_values=h_vals,
        cumulative_abs_integral=res.cum_abs,
        cumulative_signed_integral=res.cum_signed,
        zeros=zeros_x, zero_flags=res.zero_flags,
        cum_abs_at_zeros=res.zeros_cum_abs,
        zeros_are_step_boundaries=(kind == "mertens"),
        h_continuous=_make_h_eval(store, kind),
        store=store,
        decade_sups=res.decade_sup or None)


def _make_h_eval(store: PrefixSums, kind: str) -> Callable:
    if kind == "smoothed":
        def h_eval(x):
            y = math.exp(math.sqrt(max(x, 0.0)))
            return store.big_f(y) / y
    else:
        def h_eval(x):
            y = math.exp(math.sqrt(max(x, 0.0)))
            return store.mertens(y) / y
    return h_eval


def build_synthetic_profile(h_func: Callable, x_grid,
                            dh_func: Callable | None = None) -> HProfile:
    """Wrap a continuous test function as a profile.

    Zeros are bracketed on the sample grid and refined with Brent's method;
    cumulative integrals come from adaptive quadrature on the sign-constant
    subintervals, so closed-form test cases reproduce to near machine
    precision.
    """
    xs = np.asarray(x_grid, dtype=np.float64)
    if len(xs) < 2 or np.any(np.diff(xs) <= 0):
        raise RangeError("x_grid must be strictly increasing with >= 2 points")
    h_vals = np.array([h_func(x) for x in xs])

    zeros = []
    for i in range(len(xs) - 1):
        f0, f1 = h_vals[i], h_vals[i + 1]
        if f0 == 0.0:
            zeros.append(float(xs[i]))
        elif f0 * f1 < 0.0:
            zeros.append(float(brentq(h_func, xs[i], xs[i + 1],
                                      xtol=1e-15, rtol=1e-15)))
    if len(h_vals) and h_vals[-1] == 0.0:
        zeros.append(float(xs[-1]))
    zeros = np.array(sorted(set(zeros)))

    # integrate |h| piecewise between breakpoints (grid + zeros)
    breaks = np.unique(np.concatenate((xs, zeros)))
    cum_abs_b = np.zeros(len(breaks))
    cum_sig_b = np.zeros(len(breaks))
    for i in range(1, len(breaks)):
        seg_sig, _ = quad(h_func, breaks[i - 1], breaks[i], limit=200)
        cum_sig_b[i] = cum_sig_b[i - 1] + seg_sig
        mid = 0.5 * (breaks[i - 1] + breaks[i])
        sign = 1.0 if h_func(mid) >= 0 else -1.0
        cum_abs_b[i] = cum_abs_b[i - 1] + sign * seg_sig

    pos = np.searchsorted(breaks, xs)
    zpos = np.searchsorted(breaks, zeros)
    return HProfile(
        kind="synthetic", y_max=float("nan"), x_samples=xs,
        y_samples=np.full(len(xs), float("nan")), h_values=h_vals,
        cumulative_abs_integral=cum_abs_b[pos],
        cumulative_signed_integral=cum_sig_b[pos],
        zeros=zeros, zero_flags=["crossing"] * len(zeros),
        cum_abs_at_zeros=cum_abs_b[zpos],
        zeros_are_step_boundaries=False,
        h_continuous=h_func, h_derivative_fn=dh_func)


def find_zeros(profile: HProfile) -> np.ndarray:
    """Zero positions of the profile in x-coordinates (already refined)."""
    return profile.zeros


# ----------------------------------------------------------------------
# derivative, intervals, constants
# ----------------------------------------------------------------------

def h_derivative(store: PrefixSums, y: float) -> float:
    """Closed-form derivative of the smoothed profile at x = (log y)^2.

    dH/dx = (M(y) - F(y)) / (2 sqrt(x) y), from F'(y) = M(y)/y and the chain
    rule.  At integer y the step value of M gives the right-hand limit; x
    below the left cutoff is clamped to it.
    """
    if y < 1.0:
        raise RangeError(f"derivative needs y >= 1, got {y}")
    x = max(math.log(y) ** 2, X_MIN_GUARD)
    return (store.mertens(y) - store.big_f(y)) / (2.0 * math.sqrt(x) * float(y))


def h_derivative_many(store: PrefixSums, ys) -> np.ndarray:
    ys = np.asarray(ys, dtype=np.float64)
    xs = np.maximum(np.log(ys) ** 2, X_MIN_GUARD)
    m = store.mertens_many(ys).astype(np.float64)
    f = store.big_f_many(ys)
    return (m - f) / (2.0 * np.sqrt(xs) * ys)


def _derivative_sup(profile: HProfile, refine: int = 4) -> float:
    """sup |H'| over a dense grid covering the profile's x-range."""
    if len(profile.x_samples) == 0:
        return 0.0
    if profile.kind == "synthetic":
        xs = np.linspace(profile.x_samples[0], profile.x_samples[-1],
                         refine * len(profile.x_samples))
        if profile.h_derivative_fn is not None:
            vals = np.array([abs(profile.h_derivative_fn(x)) for x in xs])
        else:
            h = profile.h_continuous
            step = max((xs[-1] - xs[0]) * 1e-7, 1e-9)
            vals = np.array([abs(h(x + step) - h(x - step)) / (2 * step) for x in xs])
        return float(vals.max())
    ys = np.geomspace(profile.y_samples[0], profile.y_samples[-1],
                      refine * len(profile.y_samples))
    ys = np.minimum(np.maximum(ys, 1.0), profile.store.n_max)
    if profile.kind == "smoothed":
        return float(np.abs(h_derivative_many(profile.store, ys)).max())
    xs = np.maximum(np.log(ys) ** 2, X_MIN_GUARD)
    m = profile.store.mertens_many(ys).astype(np.float64)
    return float(np.abs(m / ys / (2.0 * np.sqrt(xs))).max())


def _locate_mean_point(profile: HProfile, a: float, b: float,
                       target: float) -> float:
    """First x in (a, b) where |H(x)| reaches the interval mean value."""
    h = profile.h_continuous
    if h is None:
        return float("nan")
    inside = profile.x_samples[(profile.x_samples > a) & (profile.x_samples < b)]
    candidates = np.concatenate((inside, np.linspace(a, b, 17)[1:-1]))
    candidates = np.sort(candidates)
    hi_x = None
    for c in candidates:
        if abs(h(float(c))) >= target:
            hi_x = float(c)
            break
    if hi_x is None:
        peak = max(candidates, key=lambda c: abs(h(float(c))), default=None)
        if peak is None or abs(h(float(peak))) < target:
            return float("nan")
        hi_x = float(peak)
    lo_x = a
    for _ in range(100):
        mid = 0.5 * (lo_x + hi_x)
        if hi_x - lo_x <= 1e-12 * max(abs(mid), 1.0):
            break
        if abs(h(mid)) >= target:
            hi_x = mid
        else:
            lo_x = mid
    return 0.5 * (lo_x + hi_x)


def interval_stats(profile: HProfile, m_hat: float | None = None,
                   alpha_hat: float | None = None,
                   kappa: float | None = None,
                   locate_xi: bool | None = None) -> list[ZeroInterval]:
    """Per-interval exact integrals, mean-value data, and both bounds.

    With fewer than two zeros the list is empty: that is the finite-zeros
    branch of the analysis, not an error.
    """
    if profile.finite_zero_branch():
        return []
    if m_hat is None:
        m_hat = _derivative_sup(profile)
    if locate_xi is None:
        locate_xi = not profile.zeros_are_step_boundaries
    out = []
    za = profile.zeros
    ca = profile.cum_abs_at_zeros
    for i in range(len(za) - 1):
        a, b = float(za[i]), float(za[i + 1])
        width = b - a
        integral = float(ca[i + 1] - ca[i])
        if integral < 0.0:   # exact-zero rounding
            integral = 0.0
        h_xi = integral / width if width > 0 else 0.0
        xi = _locate_mean_point(profile, a, b, h_xi) if (locate_xi and h_xi > 0) \
            else float("nan")
        deriv_bound = 0.5 * m_hat * width * width
        if alpha_hat is not None and kappa is not None and math.isfinite(kappa):
            damped = alpha_hat * width * (1.0 - kappa * h_xi)
        else:
            damped = float("nan")
        out.append(ZeroInterval(a=a, b=b, integral_abs=integral, xi=xi,
                                h_at_xi=h_xi, deriv_bound=deriv_bound,
                                damped_bound=damped))
    return out


def estimate_constants(profile: HProfile, tail_fraction: float = 0.5,
                       h_margin: float = 0.1) -> ConstantEstimates:
    """Measure every named constant on the profile's tail window.

    The window is x >= (1 - tail_fraction) * x_max.  h_param realizes the
    two feasibility constraints (interval width and positive damping) as a
    single max with a safety margin, and falls back to 1.0 when both are
    degenerate (e.g. H identically zero).
    """
    if len(profile.x_samples) == 0:
        raise RangeError("cannot estimate constants on an empty profile")
    if not 0.0 < tail_fraction < 1.0:
        raise RangeError("tail_fraction must lie in (0, 1)")
    x_max = profile.x_max
    w_lo = x_max * (1.0 - tail_fraction)
    in_win = profile.x_samples >= w_lo
    if not in_win.any():
        raise RangeError("tail window contains no samples")

    abs_h = np.abs(profile.h_values)
    alpha_hat = float(abs_h[in_win].max())
    ell_hat = alpha_hat
    total_abs = float(profile.cumulative_abs_integral[-1])
    mean_abs_hat = total_abs / x_max if x_max > 0 else 0.0
    idx_lo = int(np.searchsorted(profile.x_samples, w_lo))
    idx_lo = min(idx_lo, len(profile.x_samples) - 1)
    tail_mass = total_abs - float(profile.cumulative_abs_integral[idx_lo])
    tail_span = x_max - float(profile.x_samples[idx_lo])
    mean_abs_tail_hat = tail_mass / tail_span if tail_span > 0 else alpha_hat

    m_hat = _derivative_sup(profile)
    cs = profile.cumulative_signed_integral
    signed_span = float(max(cs.max(), 0.0) - min(cs.min(), 0.0))

    intervals = interval_stats(profile, m_hat=m_hat)
    if intervals:
        min_width = min(iv.b - iv.a for iv in intervals)
        h1 = alpha_hat / min_width if min_width > 0 else 0.0
        iota_hat = min(iv.h_at_xi for iv in intervals)
    else:
        h1 = 0.0
        iota_hat = float("nan")
    h2 = 0.5 * m_hat * (1.0 + h_margin)
    h_param = max(h1, h2)
    if h_param <= 0.0:
        h_param = 1.0

    if signed_span > 0.0:
        kappa = (2.0 * h_param - m_hat) * alpha_hat / (2.0 * signed_span * h_param ** 2)
    else:
        kappa = float("nan")
    epsilon = alpha_hat / h_param
    lambda_est = kappa * iota_hat if (math.isfinite(kappa) and math.isfinite(iota_hat)) \
        else float("nan")

    constants = ConstantEstimates(
        alpha_hat=alpha_hat, ell_hat=ell_hat, mean_abs_hat=mean_abs_hat,
        mean_abs_tail_hat=mean_abs_tail_hat, deriv_sup_hat=m_hat,
        signed_span_hat=signed_span, iota_hat=iota_hat, kappa=kappa,
        epsilon=epsilon, h_param=h_param, lambda_est=lambda_est,
        window_lo=w_lo, window_hi=x_max, n_window_samples=int(in_win.sum()))

    if intervals and math.isfinite(kappa):
        intervals = interval_stats(profile, m_hat=m_hat, alpha_hat=alpha_hat,
                                   kappa=kappa)
    profile.intervals = intervals
    profile.constants = constants
    return constants


# ----------------------------------------------------------------------
# the contraction iteration
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class IterationResult:
    """Trajectory of the damping recurrence l_k = 1 + lam * l_{k-1}.

    ``bounds_recurrence`` divides a fixed alpha by l_k (limit alpha (1-lam));
    ``bounds_contracting`` shrinks alpha by 1/(1+lam) each round (limit 0).
    Both readings are reported.
    """

    lam: float
    alpha: float
    lambdas: np.ndarray
    limit: float
    bounds_recurrence: np.ndarray
    bounds_contracting: np.ndarray


def lambda_iteration(lam: float, n_steps: int, alpha: float = 1.0) -> IterationResult:
    """Run the recurrence l_0 = 1, l_k = 1 + lam * l_{k-1} for n_steps."""
    if not 0.0 < lam < 1.0:
        raise RangeError(f"lambda must lie in (0, 1), got {lam}")
    if n_steps < 1:
        raise RangeError("n_steps must be >= 1")
    ls = np.empty(n_steps + 1)
    ls[0] = 1.0
    for k in range(1, n_steps + 1):
        ls[k] = 1.0 + lam * ls[k - 1]
    limit = 1.0 / (1.0 - lam)
    shrink = alpha / (1.0 + lam) ** np.arange(n_steps + 1)
    return IterationResult(lam=lam, alpha=alpha, lambdas=ls, limit=limit,
                           bounds_recurrence=alpha / ls,
                           bounds_contracting=shrink)
