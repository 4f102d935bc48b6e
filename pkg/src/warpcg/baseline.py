"""Euclidean conjugate-gradient ascent baseline.

Identical skeleton to the warped driver -- same Wolfe search, same
Dai-Yuan-style coefficient with the same sign policy, same trace schema and
stop reasons -- but with flat geometry: straight search rays, identity
transport, Euclidean norms. It exists so that experiments have a
like-for-like flat-space reference and so that the warped driver's
infinite-sigma limit has something exact to be compared against.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import LineSearchFail, NumericalBreakdown
from .geometry import GeodesicJet
from .linesearch import strong_wolfe
from .objective import CountingObjective, Objective
from .rcg import IterationTrace, RcgConfig, RcgResult, StopReason
from .retraction import directional_value_and_slope

__all__ = ["run_euclidean_cg"]


@dataclass(frozen=True, eq=False)
class _FlatPoint:
    theta: np.ndarray
    value: float
    grad: np.ndarray

    @property
    def grad_norm(self) -> float:
        return float(np.linalg.norm(self.grad))


def _evaluate(obj: Objective, theta: np.ndarray) -> _FlatPoint:
    value = float(obj.value(theta))
    grad = np.asarray(obj.grad(theta), dtype=float)
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise NumericalBreakdown("non-finite objective data")
    return _FlatPoint(theta=theta, value=value, grad=grad)


def run_euclidean_cg(
    obj: Objective,
    theta0: np.ndarray,
    cfg: RcgConfig | None = None,
) -> RcgResult:
    """Maximize obj from theta0 with flat-space CG ascent.

    Returns the same result/trace types as the warped driver; the two
    gradient-norm columns coincide since the metric is the identity.
    """
    cfg = cfg or RcgConfig()
    counting = CountingObjective(obj)
    theta0 = np.asarray(theta0, dtype=float)

    cur = _evaluate(counting, theta0)
    v = cur.grad.copy()
    trace: list[IterationTrace] = []
    stop: StopReason | None = None
    f_prev = cur.value
    prev_t: float | None = None
    prev_slope: float | None = None
    pending_restart = False
    k = 0
    attempts = 0
    failed_attempts = 0
    zeros = np.zeros_like(theta0)

    while True:
        if cur.grad_norm < cfg.tol_grad:
            stop = StopReason.SMALL_GRAD
            break
        if k >= cfg.max_iters or attempts >= 2 * cfg.max_iters + 1:
            stop = StopReason.MAX_ITERS
            break
        attempts += 1
        wall_start = time.perf_counter_ns()
        counts_before = counting.counts.snapshot()
        restarted = 1 if pending_restart else 0
        pending_restart = False

        try:
            slope0 = float(cur.grad @ v)
            if not np.isfinite(slope0) or slope0 <= 0.0:
                v = cur.grad.copy()
                restarted = 1
                slope0 = float(v @ v)
                if slope0 <= 0.0:
                    stop = StopReason.SMALL_GRAD
                    break

            ray = GeodesicJet(theta=cur.theta, v=v, q=zeros, k=zeros)
            if prev_slope is None:
                t_init = 1.0
            else:
                t_init = prev_t * prev_slope / slope0
                if not np.isfinite(t_init) or t_init <= 0.0:
                    t_init = 1.0
                t_init = min(max(t_init, 1e-12), 1e12)

            try:
                ls = strong_wolfe(
                    lambda t: directional_value_and_slope(counting, ray, t),
                    f0=cur.value,
                    slope0=slope0,
                    c1=cfg.wolfe_c1,
                    c2=cfg.wolfe_c2,
                    t_init=t_init,
                    max_evals=cfg.max_ls_evals,
                )
            except LineSearchFail:
                failed_attempts += 1
                if restarted:
                    stop = StopReason.LINE_SEARCH_FAIL
                    break
                v = cur.grad.copy()
                pending_restart = True
                continue

            nxt = _FlatPoint(theta=ls.point, value=ls.value, grad=ls.grad)
            den = float(nxt.grad @ v) - float(cur.grad @ v)
            if not np.isfinite(den) or abs(den) < 1e-300:
                beta = 0.0
                restarted = 1
            else:
                beta = float(nxt.grad @ nxt.grad) / den
            beta_used = min(beta, 0.0)
            if beta_used != beta:
                restarted = 1
            v_next = nxt.grad - beta_used * v
        except NumericalBreakdown:
            stop = StopReason.NUMERICAL_BREAKDOWN
            break

        counts_after = counting.counts
        trace.append(
            IterationTrace(
                k=k,
                f=nxt.value,
                grad_norm_riem=nxt.grad_norm,
                grad_norm_eucl=nxt.grad_norm,
                t=ls.t,
                beta=beta_used,
                s=1.0,
                ls_evals=ls.evals,
                wall_ns=time.perf_counter_ns() - wall_start,
                restart=restarted,
                n_value=counts_after.n_value - counts_before.n_value,
                n_grad=counts_after.n_grad - counts_before.n_grad,
                n_hvp=counts_after.n_hvp - counts_before.n_hvp,
                cache_builds=0,
                theta=nxt.theta if cfg.record_thetas else None,
            )
        )

        df = nxt.value - f_prev
        cur = nxt
        v = v_next
        f_prev = nxt.value
        prev_t = ls.t
        prev_slope = slope0
        k += 1
        if df < cfg.tol_df:
            stop = StopReason.SMALL_DELTA_F
            break

    counts = counting.counts
    return RcgResult(
        theta=cur.theta,
        value=cur.value,
        stop_reason=stop,
        iterations=k,
        grad_norm_riem=cur.grad_norm,
        grad_norm_eucl=cur.grad_norm,
        trace=trace,
        n_value=counts.n_value,
        n_grad=counts.n_grad,
        n_hvp=counts.n_hvp,
        cache_builds=0,
        failed_attempts=failed_attempts,
    )
