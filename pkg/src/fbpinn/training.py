"""Schwarz-style training of window-weighted local networks.

The global ansatz is the window-weighted sum of local network outputs (plus
an optional frozen coarse network), passed through the problem's hard
constraint. Training proceeds in rounds: every active subdomain takes p
optimizer steps against its own parameters while all foreign contributions
at shared points stay frozen in an overlap cache, then the cache is
refreshed once. Inactive subdomains are never touched, so their parameters
are bitwise stable across rounds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .decomposition import classify_points, sample_collocation, window_table
from .networks import (NumericalFailureError, eval_batch, init_params,
                       loss_gradient)
from .optimizers import make_optimizer
from .problems import soft_boundary_loss
from .scheduling import parallel_schedule, active_set as schedule_active_set


@dataclass
class LossBreakdown:
    """Collocation loss split by point class. total = interior + overlap
    (+ boundary when a soft constraint is active)."""

    total: float
    interior: float
    overlap: float
    boundary: float = 0.0
    per_subdomain_interior: tuple = ()


@dataclass
class OverlapCache:
    """Frozen background per subdomain, aligned with its member points:
    the weighted sum of neighbor-network contributions (zero at interior
    points) plus the coarse-network term when one is present. bc_* entries
    mirror the same background at soft boundary points."""

    values: list
    dvalues: list
    bc_values: list | None
    round_refreshed: int


@dataclass
class LossRecord:
    step: int
    round: int
    phase: str
    total: float
    interior: float
    overlap: float
    boundary: float
    l2_error: float


@dataclass
class RunReport:
    records: list = field(default_factory=list)
    initial_loss: float | None = None
    final_loss: LossBreakdown | None = None
    final_l2: float | None = None
    solution_x: np.ndarray | None = None
    solution_pred: np.ndarray | None = None
    solution_exact: np.ndarray | None = None
    wall_time_s: float = 0.0
    phases: dict = field(default_factory=dict)
    config: dict | None = None


@dataclass
class SubdomainWorkspace:
    """Static per-subdomain tables over its member collocation points."""

    index: int
    point_ids: np.ndarray
    x: np.ndarray
    x_hat: np.ndarray
    input_scale: float            # d(x_hat)/dx
    win: np.ndarray
    dwin: np.ndarray
    overlap_mask: np.ndarray
    owned_mask: np.ndarray        # this subdomain is the lowest-indexed owner
    cons: np.ndarray | None
    dcons: np.ndarray | None
    rhs: np.ndarray
    outgoing: list = field(default_factory=list)   # (target j, src pos, dst pos)
    bc_sel: np.ndarray | None = None
    bc_xhat: np.ndarray | None = None
    bc_win: np.ndarray | None = None
    bc_owned: np.ndarray | None = None


@dataclass
class _GlobalTables:
    x: np.ndarray
    cons: np.ndarray | None
    dcons: np.ndarray | None
    rhs: np.ndarray
    interior_mask: np.ndarray
    overlap_mask: np.ndarray
    bc_x: np.ndarray | None
    bc_targets: np.ndarray | None
    bc_weight: float


@dataclass
class FbpinnState:
    problem: object
    decomposition: object
    collocation: object
    params: list
    coarse_params: object | None
    input_norms: list                 # per subdomain (center, halfwidth)
    coarse_norm: tuple
    optimizers: list
    coarse_optimizer: object | None
    communication_interval: int
    round: int
    step: int
    workspaces: list
    tables: _GlobalTables
    cache: OverlapCache | None

    @property
    def n_subdomains(self):
        return len(self.params)


def _norm_inputs(left, right, x):
    center = 0.5 * (left + right)
    halfwidth = 0.5 * (right - left)
    return (np.asarray(x, dtype=float) - center) / halfwidth, 1.0 / halfwidth


def create_state(problem, decomposition, points, *, layer_sizes,
                 communication_interval=1, optimizer="adam", learning_rate=1e-3,
                 master_seed=0, coarse_layer_sizes=None):
    """Initialize networks, classify collocation points, precompute windows,
    and fill the overlap cache from the freshly initialized parameters.

    Per-network seeds are master_seed + subdomain index (1-based); the coarse
    network, when requested, uses master_seed itself.
    """
    dom = problem.domain
    if abs(dom.a - decomposition.domain.a) > 1e-12 or abs(dom.b - decomposition.domain.b) > 1e-12:
        raise ValueError("problem and decomposition domains differ")
    if not isinstance(communication_interval, (int, np.integer)) or communication_interval < 1:
        raise ValueError(f"communication_interval must be >= 1, got {communication_interval!r}")

    colloc = classify_points(decomposition, points)
    pts = colloc.points
    n_points = len(pts)
    n_sub = decomposition.n_subdomains
    hard = problem.constraint.kind == "hard"

    tables = window_table(decomposition, pts)
    owner = np.zeros(n_points, dtype=int)
    for j in range(n_sub, 0, -1):
        owner[colloc.members[j - 1]] = j

    interior_mask = np.zeros(n_points, dtype=bool)
    overlap_mask = np.zeros(n_points, dtype=bool)
    for j in range(n_sub):
        interior_mask[colloc.interior[j]] = True
        overlap_mask[colloc.overlap[j]] = True

    if hard:
        cons_all = np.asarray(problem.constraint.multiplier(pts), dtype=float)
        dcons_all = np.asarray(problem.constraint.multiplier_prime(pts), dtype=float)
        bc_x = bc_targets = None
        bc_weight = 0.0
        bc_owner = None
    else:
        cons_all = dcons_all = None
        bc_x = np.asarray(problem.constraint.points, dtype=float)
        bc_targets = np.asarray(problem.constraint.targets, dtype=float)
        bc_weight = float(problem.constraint.weight)
        for xb in bc_x:
            if not dom.contains(xb):
                raise ValueError(f"soft boundary point {xb!r} outside the domain")
        bc_owner = np.zeros(len(bc_x), dtype=int)
        for j in range(n_sub, 0, -1):
            sd = decomposition.subdomains[j - 1]
            bc_owner[(bc_x >= sd.left) & (bc_x <= sd.right)] = j

    input_norms = []
    workspaces = []
    for j in range(1, n_sub + 1):
        sd = decomposition.subdomains[j - 1]
        ids = colloc.members[j - 1]
        x = pts[ids]
        x_hat, scale = _norm_inputs(sd.left, sd.right, x)
        idx_check, win, dwin = tables[j - 1]
        assert np.array_equal(idx_check, ids)
        ovl = np.zeros(len(ids), dtype=bool)
        ovl[np.searchsorted(ids, colloc.overlap[j - 1])] = True
        ws = SubdomainWorkspace(
            index=j, point_ids=ids, x=x, x_hat=x_hat, input_scale=scale,
            win=win, dwin=dwin, overlap_mask=ovl,
            owned_mask=owner[ids] == j,
            cons=cons_all[ids] if hard else None,
            dcons=dcons_all[ids] if hard else None,
            rhs=np.asarray(problem.rhs(x), dtype=float),
        )
        if not hard:
            sel = np.nonzero((bc_x >= sd.left) & (bc_x <= sd.right))[0]
            ws.bc_sel = sel
            ws.bc_xhat, _ = _norm_inputs(sd.left, sd.right, bc_x[sel])
            ws.bc_win = np.array([decomposition.window(j, xb) for xb in bc_x[sel]])[:, 0] \
                if len(sel) else np.zeros(0)
            ws.bc_owned = bc_owner[sel] == j
        input_norms.append((0.5 * (sd.left + sd.right), 0.5 * (sd.right - sd.left)))
        workspaces.append(ws)

    for ws in workspaces:
        sd = decomposition.subdomains[ws.index - 1]
        for l in sorted(sd.neighbor_indices):
            other = workspaces[l - 1]
            _, src, dst = np.intersect1d(ws.point_ids, other.point_ids,
                                         assume_unique=True, return_indices=True)
            ws.outgoing.append((l, src, dst))

    params = [init_params(layer_sizes, master_seed + j) for j in range(1, n_sub + 1)]
    optimizers = [make_optimizer(optimizer, learning_rate) for _ in range(n_sub)]
    coarse_params = coarse_optimizer = None
    if coarse_layer_sizes is not None:
        coarse_params = init_params(coarse_layer_sizes, master_seed)
        coarse_optimizer = make_optimizer(optimizer, learning_rate)

    state = FbpinnState(
        problem=problem, decomposition=decomposition, collocation=colloc,
        params=params, coarse_params=coarse_params,
        input_norms=input_norms, coarse_norm=(dom.midpoint, 0.5 * dom.width),
        optimizers=optimizers, coarse_optimizer=coarse_optimizer,
        communication_interval=int(communication_interval), round=0, step=0,
        workspaces=workspaces,
        tables=_GlobalTables(pts, cons_all, dcons_all,
                             np.asarray(problem.rhs(pts), dtype=float),
                             interior_mask, overlap_mask, bc_x, bc_targets, bc_weight),
        cache=None,
    )
    state.cache = refresh_overlap_cache(state)
    return state


def _coarse_eval(state, x):
    center, halfwidth = state.coarse_norm
    u, du = eval_batch(state.coarse_params, (np.asarray(x, dtype=float) - center) / halfwidth)
    return u, du / halfwidth


def refresh_overlap_cache(state):
    """Recompute every subdomain's frozen background from current parameters:
    neighbor window-weighted sums at shared points, plus the coarse network
    everywhere when one is present."""
    soft = state.tables.bc_x is not None
    values, dvalues, bc_values = [], [], [] if soft else None
    for ws in state.workspaces:
        if state.coarse_params is not None:
            ug, dug = _coarse_eval(state, ws.x)
            values.append(ug)
            dvalues.append(dug)
        else:
            values.append(np.zeros(len(ws.x)))
            dvalues.append(np.zeros(len(ws.x)))
        if soft:
            if state.coarse_params is not None and len(ws.bc_sel):
                ugb, _ = _coarse_eval(state, state.tables.bc_x[ws.bc_sel])
                bc_values.append(ugb)
            else:
                bc_values.append(np.zeros(len(ws.bc_sel)))
    for ws, params in zip(state.workspaces, state.params):
        if not ws.outgoing and not soft:
            continue
        u, du = eval_batch(params, ws.x_hat)
        contrib = ws.win * u
        dcontrib = ws.dwin * u + ws.win * (ws.input_scale * du)
        for target, src, dst in ws.outgoing:
            values[target - 1][dst] += contrib[src]
            dvalues[target - 1][dst] += dcontrib[src]
        if soft and len(ws.bc_sel):
            ub, _ = eval_batch(params, ws.bc_xhat)
            mine = ws.bc_win * ub
            for other in state.workspaces:
                if other.index == ws.index or not len(other.bc_sel):
                    continue
                common, src, dst = np.intersect1d(ws.bc_sel, other.bc_sel,
                                                  assume_unique=True, return_indices=True)
                if len(common):
                    bc_values[other.index - 1][dst] += mine[src]
    return OverlapCache(values, dvalues, bc_values, state.round)


def evaluate_global(state, x):
    """Raw global value and spatial derivative at scalar x: the weighted sum
    of local networks plus the coarse term. No constraint applied."""
    x = float(x)
    if not state.problem.domain.contains(x):
        raise ValueError(f"point {x!r} outside domain")
    value = dvalue = 0.0
    if state.coarse_params is not None:
        u, du = _coarse_eval(state, [x])
        value += float(u[0])
        dvalue += float(du[0])
    for ws, params in zip(state.workspaces, state.params):
        sd = state.decomposition.subdomains[ws.index - 1]
        if not sd.contains(x):
            continue
        w, dw = state.decomposition.window(ws.index, x)
        x_hat = (x - 0.5 * (sd.left + sd.right)) * ws.input_scale
        u, du = eval_batch(params, [x_hat])
        value += w * float(u[0])
        dvalue += dw * float(u[0]) + w * ws.input_scale * float(du[0])
    return value, dvalue


def evaluate_global_batch(state, xs):
    xs = np.asarray(xs, dtype=float)
    value = np.zeros_like(xs)
    dvalue = np.zeros_like(xs)
    if state.coarse_params is not None:
        u, du = _coarse_eval(state, xs)
        value += u
        dvalue += du
    tables = window_table(state.decomposition, xs)
    for ws, params, (idx, win, dwin) in zip(state.workspaces, state.params, tables):
        sd = state.decomposition.subdomains[ws.index - 1]
        x_hat, scale = _norm_inputs(sd.left, sd.right, xs[idx])
        u, du = eval_batch(params, x_hat)
        value[idx] += win * u
        dvalue[idx] += dwin * u + win * (scale * du)
    return value, dvalue


def solution_values(state, xs):
    """Constrained solution: hard constraint multiplier times the raw sum
    (raw sum itself under a soft constraint)."""
    value, _ = evaluate_global_batch(state, xs)
    if state.problem.constraint.kind == "hard":
        return np.asarray(state.problem.constraint.multiplier(xs), dtype=float) * value
    return value


def _split_breakdown(state, squared, boundary):
    t = state.tables
    n = len(t.x)
    total = float(np.sum(squared) / n)
    interior = float(np.sum(squared[t.interior_mask]) / n)
    overlap = float(np.sum(squared[t.overlap_mask]) / n)
    per_sub = tuple(
        float(np.sum(squared[ws.point_ids[~ws.overlap_mask]]) / n)
        for ws in state.workspaces)
    return LossBreakdown(total + boundary, interior, overlap, boundary, per_sub)


def _check_finite_residual(state, r):
    bad = ~np.isfinite(r)
    if bad.any():
        i = int(np.argmax(bad))
        raise NumericalFailureError(
            f"non-finite residual at x={state.tables.x[i]!r}", point=float(state.tables.x[i]))


def global_loss(state):
    """Mean squared constrained residual over all collocation points, split
    into interior and overlap parts (plus the soft boundary penalty)."""
    t = state.tables
    with np.errstate(invalid="ignore", over="ignore"):
        value = np.zeros(len(t.x))
        dvalue = np.zeros(len(t.x))
        if state.coarse_params is not None:
            u, du = _coarse_eval(state, t.x)
            value += u
            dvalue += du
        bc_value = np.zeros(len(t.bc_x)) if t.bc_x is not None else None
        for ws, params in zip(state.workspaces, state.params):
            u, du = eval_batch(params, ws.x_hat)
            value[ws.point_ids] += ws.win * u
            dvalue[ws.point_ids] += ws.dwin * u + ws.win * (ws.input_scale * du)
            if bc_value is not None and len(ws.bc_sel):
                ub, _ = eval_batch(params, ws.bc_xhat)
                bc_value[ws.bc_sel] += ws.bc_win * ub
        if t.cons is not None:
            r = t.dcons * value + t.cons * dvalue - t.rhs
            boundary = 0.0
        else:
            r = dvalue - t.rhs
            if state.coarse_params is not None:
                ub, _ = _coarse_eval(state, t.bc_x)
                bc_value += ub
            boundary = soft_boundary_loss(state.problem.constraint,
                                          zip(bc_value, t.bc_targets))
    _check_finite_residual(state, r)
    return _split_breakdown(state, r * r, boundary)


def _make_local_loss_fn(state, j, cache):
    """Closure for loss_gradient: live network j against the frozen cache.
    Returns (batch inputs, loss_fn)."""
    ws = state.workspaces[j - 1]
    n = len(state.tables.x)
    bg = cache.values[j - 1]
    dbg = cache.dvalues[j - 1]
    hard = state.tables.cons is not None
    n_own = len(ws.x_hat)

    if hard:
        def loss_fn(u, du):
            value = ws.win * u + bg
            dvalue = ws.dwin * u + ws.win * (ws.input_scale * du) + dbg
            r = ws.dcons * value + ws.cons * dvalue - ws.rhs
            loss = (r @ r) / n
            ru = (2.0 / n) * r
            gu = ru * (ws.dcons * ws.win + ws.cons * ws.dwin)
            gd = ru * (ws.cons * (ws.win * ws.input_scale))
            return loss, gu, gd
        return ws.x_hat, loss_fn

    n_bc = len(state.tables.bc_x)
    targets = state.tables.bc_targets[ws.bc_sel]
    bc_bg = cache.bc_values[j - 1]
    weight = state.tables.bc_weight

    def loss_fn(u_all, du_all):
        u, du = u_all[:n_own], du_all[:n_own]
        dvalue = ws.dwin * u + ws.win * (ws.input_scale * du) + dbg
        r = dvalue - ws.rhs
        loss = (r @ r) / n
        ru = (2.0 / n) * r
        gu = ru * ws.dwin
        gd = ru * (ws.win * ws.input_scale)
        if len(ws.bc_sel):
            ub = u_all[n_own:]
            err = ws.bc_win * ub + bc_bg - targets
            loss = loss + weight * (err @ err) / n_bc
            gub = (2.0 * weight / n_bc) * err * ws.bc_win
            gu = np.concatenate([gu, gub])
            gd = np.concatenate([gd, np.zeros(len(ub))])
        return loss, gu, gd

    inputs = np.concatenate([ws.x_hat, ws.bc_xhat]) if len(ws.bc_sel) else ws.x_hat
    return inputs, loss_fn


def local_loss(state, j, cache=None):
    """Subdomain j's training loss: squared residuals over its member points
    with foreign contributions taken from the cache, scaled by the global
    point count."""
    cache = cache if cache is not None else state.cache
    inputs, loss_fn = _make_local_loss_fn(state, j, cache)
    with np.errstate(invalid="ignore", over="ignore"):
        u, du = eval_batch(state.params[j - 1], inputs)
        loss, _, _ = loss_fn(u, du)
    return float(loss)


def _stale_breakdown(state):
    """Loss as the optimizers currently see it: every point evaluated with
    its lowest-indexed owner's live network against the (possibly stale)
    cache."""
    t = state.tables
    r_all = np.zeros(len(t.x))
    bc_value = np.zeros(len(t.bc_x)) if t.bc_x is not None else None
    hard = t.cons is not None
    with np.errstate(invalid="ignore", over="ignore"):
        for ws, params in zip(state.workspaces, state.params):
            u, du = eval_batch(params, ws.x_hat)
            value = ws.win * u + state.cache.values[ws.index - 1]
            dvalue = (ws.dwin * u + ws.win * (ws.input_scale * du)
                      + state.cache.dvalues[ws.index - 1])
            if hard:
                r = ws.dcons * value + ws.cons * dvalue - ws.rhs
            else:
                r = dvalue - ws.rhs
            r_all[ws.point_ids[ws.owned_mask]] = r[ws.owned_mask]
            if bc_value is not None and len(ws.bc_sel):
                ub, _ = eval_batch(params, ws.bc_xhat)
                full = ws.bc_win * ub + state.cache.bc_values[ws.index - 1]
                bc_value[ws.bc_sel[ws.bc_owned]] = full[ws.bc_owned]
        boundary = 0.0
        if bc_value is not None:
            boundary = soft_boundary_loss(state.problem.constraint,
                                          zip(bc_value, t.bc_targets))
        squared = r_all * r_all
    return _split_breakdown(state, squared, boundary)


def _train_round(state, active, on_step):
    for j in active.active:
        if not 1 <= j <= state.n_subdomains:
            raise ValueError(f"active subdomain {j} out of range")
    order = sorted(active.active)
    for _ in range(state.communication_interval):
        state.step += 1
        for j in order:
            inputs, loss_fn = _make_local_loss_fn(state, j, state.cache)
            try:
                _, grad = loss_gradient(state.params[j - 1], inputs, loss_fn)
            except NumericalFailureError as err:
                err.subdomain = j
                err.step = state.step
                raise
            state.optimizers[j - 1].step(state.params[j - 1], grad)
        if on_step is not None:
            on_step()
    state.round += 1
    state.cache = refresh_overlap_cache(state)
    return state


def train_round(state, active):
    """One round: p optimizer steps for each active subdomain against the
    frozen cache, then a single cache refresh."""
    return _train_round(state, active, None)


@dataclass
class _EvalGrid:
    x: np.ndarray
    exact: np.ndarray
    exact_norm: float
    cons: np.ndarray | None
    entries: list          # per subdomain (idx, win, x_hat)
    coarse_x: np.ndarray | None


def _make_eval_grid(state, n_points):
    x = sample_collocation(state.problem.domain, n_points)
    exact = np.asarray(state.problem.exact_solution(x), dtype=float)
    hard = state.problem.constraint.kind == "hard"
    entries = []
    for ws, (idx, win, _) in zip(state.workspaces,
                                 window_table(state.decomposition, x)):
        sd = state.decomposition.subdomains[ws.index - 1]
        x_hat, _ = _norm_inputs(sd.left, sd.right, x[idx])
        entries.append((idx, win, x_hat))
    return _EvalGrid(
        x=x, exact=exact, exact_norm=float(np.linalg.norm(exact)),
        cons=np.asarray(state.problem.constraint.multiplier(x), dtype=float) if hard else None,
        entries=entries,
        coarse_x=x if state.coarse_params is not None else None)


def _grid_solution(state, grid):
    value = np.zeros(len(grid.x))
    if state.coarse_params is not None:
        u, _ = _coarse_eval(state, grid.coarse_x)
        value += u
    for params, (idx, win, x_hat) in zip(state.params, grid.entries):
        u, _ = eval_batch(params, x_hat)
        value[idx] += win * u
    return grid.cons * value if grid.cons is not None else value


def _grid_l2(state, grid):
    with np.errstate(invalid="ignore", over="ignore"):
        pred = _grid_solution(state, grid)
    return float(np.linalg.norm(pred - grid.exact) / grid.exact_norm)


def train(state, schedule, rounds, *, record_interval=10, l2_points=None,
          report=None, phase="fbpinn", step_offset=0):
    """Run `rounds` schedule-driven rounds, recording the stale-cache loss
    split and the relative L2 error on a dense grid every record_interval
    optimizer steps (and at the final step). On numerical failure the
    partial report is attached to the raised error."""
    if not isinstance(rounds, (int, np.integer)) or rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds!r}")
    if not isinstance(record_interval, (int, np.integer)) or record_interval < 1:
        raise ValueError(f"record_interval must be >= 1, got {record_interval!r}")
    if schedule.n_subdomains != state.n_subdomains:
        raise ValueError("schedule and state disagree on the number of subdomains")
    report = report if report is not None else RunReport()
    grid = _make_eval_grid(state, l2_points if l2_points is not None
                           else 10 * len(state.tables.x))
    started = time.perf_counter()
    if report.initial_loss is None:
        report.initial_loss = global_loss(state).total
    final_step = state.step + int(rounds) * state.communication_interval

    def on_step():
        s = state.step
        if s % record_interval == 0 or s == final_step:
            bd = _stale_breakdown(state)
            report.records.append(LossRecord(
                step_offset + s, state.round, phase, bd.total, bd.interior,
                bd.overlap, bd.boundary, _grid_l2(state, grid)))

    try:
        for _ in range(int(rounds)):
            _train_round(state, schedule_active_set(schedule, state.round), on_step)
    except NumericalFailureError as err:
        report.wall_time_s += time.perf_counter() - started
        err.report = report
        raise
    report.wall_time_s += time.perf_counter() - started
    report.final_loss = global_loss(state)
    report.final_l2 = _grid_l2(state, grid)
    report.solution_x = grid.x
    report.solution_pred = _grid_solution(state, grid)
    report.solution_exact = grid.exact
    report.phases[phase] = report.phases.get(phase, 0) + int(rounds) * state.communication_interval
    return report


def _train_single(params, problem, points, optimizer, steps, *, norm,
                  record_interval, report, phase, l2_points, step_offset=0):
    """Full-batch training of one network u(x_hat) under the problem's
    constraint; shared by the plain-network baseline and the coarse phase."""
    x = np.asarray(points, dtype=float)
    n = len(x)
    center, halfwidth = norm
    x_hat = (x - center) / halfwidth
    scale = 1.0 / halfwidth
    rhs = np.asarray(problem.rhs(x), dtype=float)
    hard = problem.constraint.kind == "hard"
    if hard:
        cons = np.asarray(problem.constraint.multiplier(x), dtype=float)
        dcons = np.asarray(problem.constraint.multiplier_prime(x), dtype=float)
        inputs = x_hat
    else:
        bc_x = np.asarray(problem.constraint.points, dtype=float)
        bc_t = np.asarray(problem.constraint.targets, dtype=float)
        weight = float(problem.constraint.weight)
        inputs = np.concatenate([x_hat, (bc_x - center) / halfwidth])

    def loss_fn(u_all, du_all):
        u, du = u_all[:n], du_all[:n]
        if hard:
            r = dcons * u + cons * (scale * du) - rhs
            loss = (r @ r) / n
            ru = (2.0 / n) * r
            return loss, ru * dcons, ru * (cons * scale)
        r = scale * du - rhs
        loss = (r @ r) / n
        err = u_all[n:] - bc_t
        loss = loss + weight * (err @ err) / len(bc_t)
        gu = np.concatenate([np.zeros(n), (2.0 * weight / len(bc_t)) * err])
        gd = np.concatenate([(2.0 / n) * r * scale, np.zeros(len(bc_t))])
        return loss, gu, gd

    grid_x = sample_collocation(problem.domain, l2_points)
    grid_exact = np.asarray(problem.exact_solution(grid_x), dtype=float)
    grid_norm = float(np.linalg.norm(grid_exact))
    grid_hat = (grid_x - center) / halfwidth
    grid_cons = (np.asarray(problem.constraint.multiplier(grid_x), dtype=float)
                 if hard else None)

    def current_loss():
        with np.errstate(invalid="ignore", over="ignore"):
            u, du = eval_batch(params, inputs)
            loss, _, _ = loss_fn(u, du)
        return float(loss)

    def current_pred():
        with np.errstate(invalid="ignore", over="ignore"):
            u, _ = eval_batch(params, grid_hat)
        return grid_cons * u if hard else u

    started = time.perf_counter()
    if report.initial_loss is None:
        report.initial_loss = current_loss()
    for s in range(1, int(steps) + 1):
        try:
            _, grad = loss_gradient(params, inputs, loss_fn)
        except NumericalFailureError as err:
            err.step = step_offset + s
            report.wall_time_s += time.perf_counter() - started
            err.report = report
            raise
        optimizer.step(params, grad)
        if s % record_interval == 0 or s == steps:
            loss = current_loss()
            l2 = float(np.linalg.norm(current_pred() - grid_exact) / grid_norm)
            report.records.append(LossRecord(step_offset + s, s - 1, phase,
                                             loss, loss, 0.0, 0.0, l2))
    report.wall_time_s += time.perf_counter() - started
    report.final_loss = LossBreakdown(current_loss(), current_loss(), 0.0)
    report.final_l2 = float(np.linalg.norm(current_pred() - grid_exact) / grid_norm)
    report.solution_x = grid_x
    report.solution_pred = current_pred()
    report.solution_exact = grid_exact
    report.phases[phase] = report.phases.get(phase, 0) + int(steps)
    return report


def train_pinn(problem, points, *, layer_sizes, steps, optimizer="adam",
               learning_rate=1e-3, seed=0, record_interval=10, l2_points=None):
    """Single-network baseline on the full domain, normalized to [-1, 1].
    With one subdomain this matches the decomposed trainer step for step."""
    if not isinstance(steps, (int, np.integer)) or steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps!r}")
    params = init_params(layer_sizes, seed)
    opt = make_optimizer(optimizer, learning_rate)
    report = RunReport()
    dom = problem.domain
    pts = np.asarray(points, dtype=float)
    _train_single(params, problem, pts, opt, steps,
                  norm=(dom.midpoint, 0.5 * dom.width),
                  record_interval=record_interval, report=report, phase="pinn",
                  l2_points=l2_points if l2_points is not None else 10 * len(pts))
    return report


def train_coarse_then_local(state, coarse_epochs, coarse_points, local_rounds,
                            schedule=None, *, record_interval=10, l2_points=None):
    """Two-phase run: first fit the coarse network alone on its own equispaced
    grid, then freeze it bitwise and train the local networks around it. With
    coarse_epochs=0 the coarse network contributes its untrained
    initialization and the run degenerates to plain decomposed training."""
    if state.coarse_params is None:
        raise ValueError("state was created without a coarse network")
    if not isinstance(coarse_epochs, (int, np.integer)) or coarse_epochs < 0:
        raise ValueError(f"coarse_epochs must be >= 0, got {coarse_epochs!r}")
    report = RunReport()
    if coarse_epochs > 0:
        pts = sample_collocation(state.problem.domain, coarse_points)
        _train_single(state.coarse_params, state.problem, pts,
                      state.coarse_optimizer, coarse_epochs,
                      norm=state.coarse_norm, record_interval=record_interval,
                      report=report, phase="coarse",
                      l2_points=l2_points if l2_points is not None
                      else 10 * len(state.tables.x))
    state.cache = refresh_overlap_cache(state)
    schedule = schedule if schedule is not None else parallel_schedule(state.n_subdomains)
    train(state, schedule, local_rounds, record_interval=record_interval,
          l2_points=l2_points, report=report, phase="local",
          step_offset=int(coarse_epochs))
    return report
