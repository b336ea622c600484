"""Selberg-weight tables built by Dirichlet convolution.

The Selberg weight admits two independent formulas,

    mobius form:   L2(n) = sum_{d|n} mu(d) log(n/d)^2
    direct form:   L2(n) = (Lambda*Lambda)(n) + Lambda(n) log n

and the table can compute either or both, recording the worst disagreement.
The companion weights are

    L2minus(n) = (Lambda*Lambda)(n) - Lambda(n) log n
    Theta(n)   = (Lambda*Lambda)(n) / log n      (Theta(1) := 0)

Convolutions run the divisor-pair double loop split at sqrt(n_max): the
short-divisor half walks strides of d, the long-divisor half walks strides
of the cofactor, so the work is O(n_max log n_max) additions done in
O(sqrt(n_max)) vectorized passes, each Kahan-compensated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sieve
from .accum import kahan_slice_add
from .errors import CrossCheckError, RangeError

TOL_REL = 1e-9
TOL_ABS = 1e-9


def convolve_prefix(f: np.ndarray, g: np.ndarray, n_max: int) -> np.ndarray:
    """Dirichlet convolution (f*g)(n) = sum_{d|n} f(d) g(n/d) for n <= n_max.

    Inputs are 1-indexed arrays of length >= n_max + 1 (index 0 ignored).
    Zero entries of the outer factor are skipped, so sparse inputs such as
    the von Mangoldt function convolve in time proportional to their support.
    """
    if n_max < 1:
        raise RangeError(f"convolution cap must be >= 1, got {n_max}")
    if len(f) < n_max + 1 or len(g) < n_max + 1:
        raise RangeError("input columns shorter than n_max + 1")
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    out = np.zeros(n_max + 1)
    comp = np.zeros(n_max + 1)
    b = math.isqrt(n_max)
    for d in range(1, b + 1):
        fd = f[d]
        if fd != 0.0:
            kahan_slice_add(out, comp, slice(d, n_max + 1, d), fd * g[1:n_max // d + 1])
    for q in range(1, n_max // (b + 1) + 1):
        gq = g[q]
        if gq != 0.0:
            top = n_max // q
            kahan_slice_add(out, comp, slice(q * (b + 1), q * top + 1, q),
                            gq * f[b + 1:top + 1])
    return out - comp


@dataclass
class ArithTable:
    """Dense arithmetic-function columns over [1, n_max] (index 0 unused).

    ``lambda2`` always holds the direct-form values; when built with
    ``method="both"`` the worst relative gap to the mobius form is recorded
    in ``form_discrepancy`` at index ``form_discrepancy_n``.
    """

    n_max: int
    mu: np.ndarray
    lam: np.ndarray
    lambda2: np.ndarray
    lambda2_minus: np.ndarray
    theta: np.ndarray
    log_n: np.ndarray
    form_discrepancy: float = 0.0
    form_discrepancy_n: int = 0
    lambda_conv: np.ndarray = field(default=None, repr=False)


def build_arith_table(n_max: int, method: str = "both",
                      segment_size: int = sieve.DEFAULT_SEGMENT_SIZE,
                      tol_rel: float = TOL_REL) -> ArithTable:
    """Sieve mu and Lambda up to n_max and build the Selberg-weight columns.

    Args:
        n_max: table cap (the convolution cost is n_max log n_max).
        method: "selberg-form", "mobius-form", or "both".  With "both" the
            two formulas are cross-checked and the worst gap recorded.
        tol_rel: relative budget for the cross-check, scaled by log(n_max)^2.

    Raises:
        CrossCheckError: the two formulas disagree beyond tolerance.
    """
    if n_max < 1:
        raise RangeError(f"n_max must be >= 1, got {n_max}")
    if method not in ("selberg-form", "mobius-form", "both"):
        raise RangeError(f"unknown method {method!r}")

    mu = np.zeros(n_max + 1, dtype=np.int8)
    lam = np.zeros(n_max + 1)
    for seg in sieve.iter_segments(n_max, segment_size):
        mu[seg.lo:seg.hi] = sieve.mobius_from_segment(seg)
        lam[seg.lo:seg.hi] = sieve.lambda_from_segment(seg)

    log_n = np.zeros(n_max + 1)
    log_n[1:] = np.log(np.arange(1, n_max + 1, dtype=np.float64))

    lam_conv = convolve_prefix(lam, lam, n_max)
    lam_log = lam * log_n
    lambda2_direct = lam_conv + lam_log
    lambda2_minus = lam_conv - lam_log

    theta = np.zeros(n_max + 1)
    if n_max >= 2:
        theta[2:] = lam_conv[2:] / log_n[2:]

    disc = 0.0
    disc_n = 0
    if method == "mobius-form":
        lambda2 = convolve_prefix(mu.astype(np.float64), log_n ** 2, n_max)
    else:
        lambda2 = lambda2_direct
        if method == "both":
            lambda2_mob = convolve_prefix(mu.astype(np.float64), log_n ** 2, n_max)
            gaps = np.abs(lambda2_mob - lambda2_direct)
            disc_n = int(np.argmax(gaps))
            disc = float(gaps[disc_n])
            budget = tol_rel * max(math.log(n_max), 1.0) ** 2
            if disc > budget:
                raise CrossCheckError(
                    f"Selberg-weight forms disagree by {disc:.3e} at n={disc_n} "
                    f"(budget {budget:.3e})",
                    worst_n=disc_n, discrepancy=disc)

    return ArithTable(n_max=n_max, mu=mu, lam=lam, lambda2=lambda2,
                      lambda2_minus=lambda2_minus, theta=theta, log_n=log_n,
                      form_discrepancy=disc, form_discrepancy_n=disc_n,
                      lambda_conv=lam_conv)


@dataclass(frozen=True)
class PointwiseResidualStats:
    """Residual statistics for the two pointwise Selberg-weight claims.

    r13(n) = 2 Lambda(n) log(x/n) - |L2minus(n)|
    r14(n) = 2 log n - L2(n)

    Both fail pointwise (r14(30) = 2 log 30 with L2(30) = 0) and are honest
    only on summatory average, so this is instrumentation, not an assertion.
    """

    x: float
    r13_norm_max: float     # max |r13(n)| / log(n+1)
    r13_norm_mean: float    # mean |r13(n)| / log(n+1)
    r14_abs_max: float      # max |r14(n)|
    r13_avg: float          # (1/x) sum r13(n)
    r14_avg: float          # (1/x) sum r14(n)


def pointwise_residuals(table: ArithTable, x: float) -> PointwiseResidualStats:
    """Evaluate the pointwise residual statistics at 2 <= x <= table cap."""
    if x < 2:
        raise RangeError(f"residual statistics need x >= 2, got {x}")
    top = int(math.floor(x))
    if top > table.n_max:
        raise RangeError(f"x = {x} beyond table cap {table.n_max}")
    n = np.arange(1, top + 1)
    log_ratio = math.log(x) - table.log_n[1:top + 1]
    r13 = 2.0 * table.lam[1:top + 1] * log_ratio - np.abs(table.lambda2_minus[1:top + 1])
    r14 = 2.0 * table.log_n[1:top + 1] - table.lambda2[1:top + 1]
    norm = np.log(n + 1.0)
    r13_norm = np.abs(r13) / norm
    return PointwiseResidualStats(
        x=float(x),
        r13_norm_max=float(r13_norm.max()),
        r13_norm_mean=float(r13_norm.mean()),
        r14_abs_max=float(np.abs(r14).max()),
        r13_avg=float(np.sum(r13) / x),
        r14_avg=float(np.sum(r14) / x),
    )


def table_rows(table: ArithTable, ns) -> list[dict]:
    """Rows for the n,mu,lambda,lambda2,lambda2_minus,theta CSV schema."""
    rows = []
    for n in ns:
        n = int(n)
        if not 1 <= n <= table.n_max:
            raise RangeError(f"row index {n} outside [1, {table.n_max}]")
        rows.append({
            "n": n,
            "mu": int(table.mu[n]),
            "lambda": float(table.lam[n]),
            "lambda2": float(table.lambda2[n]),
            "lambda2_minus": float(table.lambda2_minus[n]),
            "theta": float(table.theta[n]),
        })
    return rows
