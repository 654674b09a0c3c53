"""Adaptive parallel arc-length method.

A coarse serial Crisfield run supplies level-0 intervals between
consecutive path points. Each interval is re-solved from its start with
``n_sub`` sub-steps of length L / n_sub; the relative gap between where the
sub-path ends and the stored end point is the interval error. Intervals
above ``eps_u`` are split into ``n_sub`` children seeded by the re-solved
sub-points, down to ``max_level``.

One coordinator owns the interval store. Jobs are self-contained (start,
end, length, operator copy) and run inline (``workers=0``) or in a process
pool. The output is merged in interval-id order, so it does not depend on
the number of workers or on completion order.
"""
from __future__ import annotations

import concurrent.futures as cf
import enum
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .continuation import (ContinuationConfig, ContinuationState, EquilibriumPath, PathPoint,
                           StepFailed, metric_norm, run, stability_index, step_crisfield)
from .io import write_json
from .operators import OperatorSet


class IntervalStatus(enum.Enum):
    PENDING = "Pending"
    SOLVED = "Solved"
    REFINED = "Refined"
    CONVERGED = "Converged"
    FAILED = "Failed"


@dataclass(frozen=True)
class ApalmConfig:
    eps_l: float = 1e-3
    eps_u: float = 1e-3
    n_sub: int = 2
    max_level: int = 5
    dL: float = 0.05
    workers: int = 0
    psi: float = 1.0
    tolF: float = 1e-10
    max_iterations: int = 25
    pipelined: bool = False  # overlap initialization with correction; not implemented

    def __post_init__(self):
        if not 0 < self.eps_l <= self.eps_u:
            raise ValueError("need 0 < eps_l <= eps_u")
        if self.n_sub < 2:
            raise ValueError("n_sub must be at least 2")
        if self.max_level < 0:
            raise ValueError("max_level must be non-negative")
        if not self.dL > 0:
            raise ValueError("dL must be positive")
        if self.workers < 0:
            raise ValueError("workers must be non-negative")

    def continuation(self, dl: float | None = None, steps: int = 1) -> ContinuationConfig:
        return ContinuationConfig(stepper="crisfield", dl=self.dL if dl is None else dl, steps=steps,
                                  psi=self.psi, tolF=self.tolF, max_iterations=self.max_iterations)


@dataclass
class ApalmInterval:
    id: tuple
    level: int
    parent: tuple | None
    start_u: np.ndarray
    start_lam: float
    end_u: np.ndarray
    end_lam: float
    length: float
    error: float = math.nan
    status: IntervalStatus = IntervalStatus.PENDING
    flagged: bool = False
    points: list = field(default_factory=list)
    n_sub_used: int = 0
    wall_time: float = 0.0
    message: str = ""


def _distance(u1, l1, u2, l2, psi, P2):
    return metric_norm(np.asarray(u1) - np.asarray(u2), l1 - l2, psi, P2)


def serial_init(ops: OperatorSet, cfg: ApalmConfig, N: int, u0=None, lam0: float = 0.0):
    """N coarse Crisfield steps; one level-0 interval per consecutive converged pair.

    The start point is included, so N converged steps give N intervals.
    """
    u0 = np.zeros(ops.n_dof) if u0 is None else np.asarray(u0, dtype=float)
    start = PathPoint(u0.copy(), float(lam0), stability_index(ops, u0) if N else 0, step=0)
    if N == 0:
        return EquilibriumPath(), []
    path = run(cfg.continuation(steps=N), ops, u0=u0, lam0=lam0)
    P = ops.force()
    P2 = float(P @ P)
    pts = [start] + path.points
    intervals = []
    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        intervals.append(ApalmInterval(
            id=(i,), level=0, parent=None, start_u=a.u.copy(), start_lam=a.lam,
            end_u=b.u.copy(), end_lam=b.lam,
            length=_distance(a.u, a.lam, b.u, b.lam, cfg.psi, P2)))
    path.points = pts
    return path, intervals


def _substeps(interval, ops, cfg, n_sub):
    P = ops.force()
    P2 = float(P @ P)
    ccfg = cfg.continuation(dl=interval.length / n_sub)
    st = ContinuationState(u=interval.start_u.copy(), lam=interval.start_lam,
                           dl=ccfg.dl, dl0=ccfg.dl, psi=cfg.psi)
    pts = []
    for _ in range(n_sub):
        direction = (interval.end_u - st.u, interval.end_lam - st.lam)
        if metric_norm(direction[0], direction[1], cfg.psi, P2) == 0.0:
            # already at the stored end; follow the last increment instead
            direction = (st.du_prev, st.dlam_prev)
        out = step_crisfield(st, ops, ccfg, direction=direction)
        st.u, st.lam, st.du_prev, st.dlam_prev = out.u, out.lam, out.du, out.dlam
        pts.append(PathPoint(out.u, out.lam, stability_index(ops, out.u), dl=ccfg.dl))
    gap = _distance(st.u, st.lam, interval.end_u, interval.end_lam, cfg.psi, P2)
    return pts, gap / interval.length


def correct_interval(interval: ApalmInterval, ops: OperatorSet, cfg: ApalmConfig):
    """Re-solve one interval; returns (points, error, n_sub_used).

    A failed sub-step triggers one retry with twice as many sub-steps; a
    second failure propagates as StepFailed.
    """
    if interval.length == 0.0:
        return [], 0.0, 0
    try:
        pts, err = _substeps(interval, ops, cfg, cfg.n_sub)
        return pts, err, cfg.n_sub
    except StepFailed:
        pts, err = _substeps(interval, ops, cfg, 2 * cfg.n_sub)
        return pts, err, 2 * cfg.n_sub


def _job(payload):
    """Worker entry point: everything it needs travels in ``payload``."""
    interval, ops, cfg = payload
    t0 = time.perf_counter()
    try:
        pts, err, used = correct_interval(interval, ops, cfg)
        return interval.id, pts, err, used, "", time.perf_counter() - t0
    except StepFailed as exc:
        return interval.id, [], math.nan, 2 * cfg.n_sub, f"{exc.status}: {exc}", time.perf_counter() - t0


@dataclass
class ApalmResult:
    path: EquilibriumPath
    intervals: dict

    def report(self) -> dict:
        out = []
        for key in sorted(self.intervals):
            iv = self.intervals[key]
            out.append({"id": list(iv.id), "level": iv.level,
                        "parent": None if iv.parent is None else list(iv.parent),
                        "length": iv.length, "error": None if math.isnan(iv.error) else iv.error,
                        "status": iv.status.value, "flagged": iv.flagged, "n_sub": iv.n_sub_used,
                        "wall_time": iv.wall_time, "message": iv.message})
        return {"intervals": out,
                "max_level": max((iv.level for iv in self.intervals.values()), default=0),
                "failed": sum(iv.status is IntervalStatus.FAILED for iv in self.intervals.values())}

    def write_report(self, path) -> None:
        write_json(path, self.report())


def solve(path0: EquilibriumPath, intervals: list, cfg: ApalmConfig,
          ops_factory: Callable[[], OperatorSet]) -> ApalmResult:
    """Correct and refine until no interval is pending; merge by interval id."""
    if cfg.pipelined:
        raise NotImplementedError("only segregated initialize-then-correct is implemented")
    store = {iv.id: iv for iv in intervals}
    pending = [iv.id for iv in intervals]

    def handle(result):
        iid, pts, err, used, msg, wall = result
        iv = store[iid]
        iv.wall_time, iv.n_sub_used, iv.message = wall, used, msg
        if msg:
            iv.status = IntervalStatus.FAILED
            return []
        iv.error = err
        iv.points = pts
        iv.status = IntervalStatus.SOLVED
        if err <= cfg.eps_u:
            iv.status = IntervalStatus.CONVERGED
            return []
        if iv.level >= cfg.max_level:
            iv.status = IntervalStatus.CONVERGED
            iv.flagged = True
            return []
        iv.status = IntervalStatus.REFINED
        children = []
        starts = [(iv.start_u, iv.start_lam)] + [(p.u, p.lam) for p in pts[:-1]]
        ends = [(p.u, p.lam) for p in pts]
        child_len = iv.length / len(pts)
        for k, ((su, sl), (eu, el)) in enumerate(zip(starts, ends)):
            cid = iid + (k,)
            store[cid] = ApalmInterval(id=cid, level=iv.level + 1, parent=iid,
                                       start_u=np.array(su), start_lam=float(sl),
                                       end_u=np.array(eu), end_lam=float(el), length=child_len)
            children.append(cid)
        return children

    if cfg.workers == 0:
        while pending:
            iid = pending.pop(0)
            pending.extend(handle(_job((store[iid], ops_factory(), cfg))))
    else:
        with cf.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {pool.submit(_job, (store[i], ops_factory(), cfg)) for i in pending}
            while futures:
                done, futures = cf.wait(futures, return_when=cf.FIRST_COMPLETED)
                for fut in sorted(done, key=lambda f: f.result()[0]):
                    for cid in handle(fut.result()):
                        futures.add(pool.submit(_job, (store[cid], ops_factory(), cfg)))

    out = EquilibriumPath()
    if path0.points:
        first = path0.points[0]
        out.points.append(replace(first, level=0, interval_id=()))
    for iid in sorted(store):
        iv = store[iid]
        if iv.status is IntervalStatus.CONVERGED:
            for p in iv.points:
                out.points.append(replace(p, level=iv.level, interval_id=iid))
        elif iv.status is IntervalStatus.FAILED:
            out.events.append({"type": "interval_failed", "interval_id": list(iid), "reason": iv.message})
    for i, p in enumerate(out.points):
        p.step = i
    if any(iv.status is IntervalStatus.FAILED for iv in store.values()):
        out.status, out.reason = "Aborted", "one or more intervals failed"
    return ApalmResult(out, store)
