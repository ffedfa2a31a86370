"""Block-coordinate updates for beamformers and antenna positions.

Each update solves a convex restriction of the max-min weighted SINR problem
built from the surrogates in `surrogate`, warm-started at the incumbent so the
true objective never decreases (up to solver residuals). Every subproblem is
normalized before it reaches the conic kernel: SINR-side constraints are
divided by gamma_k * sigma_k^2 and interference slacks by sigma_k^2, keeping
all solver data O(1) even though raw channel powers sit near 1e-11 W.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import (PositionState, ScenarioRealization,
                      channel_matrix, compute_min_weighted_sinr)
from .conic import ConicProgram, SolveStatus, SolverSettings, solve
from .surrogate import (build_rx_context, build_tx_context,
                        lower_surrogate_rx, lower_surrogate_tx,
                        upper_surrogate_rx, upper_surrogate_tx)

ANCHOR_FLOOR = 1e-12   # smallest eta anchor fed to the bilinear bound
CURVATURE_FLOOR = 1e-12  # below this (normalized) the surrogate turns affine
DISTANCE_SLACK = 1e-9


class ZeroIncumbentError(RuntimeError):
    """An update was asked to linearize around an all-zero beamformer."""


class InfeasibleAnchorError(RuntimeError):
    """A position update started from an anchor violating its own constraints."""


@dataclass
class AlgorithmState:
    """Everything the alternating optimization carries between blocks."""

    beamformers: np.ndarray        # (N, M) complex
    positions: PositionState
    sinr: np.ndarray               # (K,) true SINRs at this state
    objective: float               # min_k sinr_k / gamma_k
    min_sinr_anchor: float         # eta anchor, floored at ANCHOR_FLOOR
    slack_anchors: np.ndarray      # (K,) noise-normalized interference-plus-noise
    iteration: int = 0


def evaluate_state(scenario: ScenarioRealization, beamformers: np.ndarray,
                   positions: PositionState, iteration: int = 0) -> AlgorithmState:
    """Recompute SINRs, objective and anchors for the given iterate."""
    cfg = scenario.config
    sinr, objective = compute_min_weighted_sinr(scenario, positions, beamformers)
    h = channel_matrix(scenario, positions)
    powers = np.abs(h.conj() @ np.asarray(beamformers).T) ** 2   # (K, N)
    group = scenario.group_of_user
    own = powers[np.arange(cfg.users), group]
    noise = np.asarray(cfg.noise_power)
    slack = (powers.sum(axis=1) - own + noise) / noise
    return AlgorithmState(beamformers=np.asarray(beamformers, dtype=complex),
                          positions=positions, sinr=sinr, objective=objective,
                          min_sinr_anchor=max(objective, ANCHOR_FLOOR),
                          slack_anchors=slack, iteration=iteration)


def _require_nonzero_beamformers(state: AlgorithmState, cfg) -> None:
    for n in range(cfg.groups):
        if not np.linalg.norm(state.beamformers[n]) > 0.0:
            raise ZeroIncumbentError(f"beamformer of group {n} is zero")


def _clamp_to_budget(beamformers: np.ndarray, pmax: float) -> np.ndarray:
    # solver iterates can overshoot the power ball by its tolerance; shave
    # the common scale so recorded states meet the budget exactly
    total = float(np.sum(np.abs(beamformers) ** 2))
    if total > pmax:
        beamformers = beamformers * np.sqrt(pmax / total)
    return beamformers


def _stack_complex(vec: np.ndarray) -> np.ndarray:
    return np.concatenate([vec.real, vec.imag])


def _interference_rows(h: np.ndarray, n_vars: int, offset: int) -> np.ndarray:
    """Rows F with ||F x||^2 = |h^H w|^2 for w stacked at offset as (re, im)."""
    m = h.size
    rows = np.zeros((2, n_vars))
    rows[0, offset:offset + m] = h.real
    rows[0, offset + m:offset + 2 * m] = h.imag
    rows[1, offset:offset + m] = -h.imag
    rows[1, offset + m:offset + 2 * m] = h.real
    return rows


# --------------------------------------------------------------------------
# beamformer updates
# --------------------------------------------------------------------------

def update_beamformer_single(state: AlgorithmState, scenario: ScenarioRealization,
                             settings: SolverSettings | None = None):
    """One SCA step on the common beamformer of a single multicast group.

    Returns (new_state, info). On solver failure the incumbent is kept.
    """
    cfg = scenario.config
    if cfg.groups != 1:
        raise ValueError("single-group update called on a multi-group config")
    _require_nonzero_beamformers(state, cfg)
    m = cfg.tx_antennas
    n_vars = 2 * m + 1
    eta_idx = 2 * m
    w0 = state.beamformers[0]
    h = channel_matrix(scenario, state.positions)

    prog = ConicProgram(n_vars, eta_idx)
    for k in range(cfg.users):
        scale = cfg.sinr_weights[k] * cfg.noise_power[k]
        s0 = complex(np.vdot(w0, h[k]).conjugate())        # h_k^H w0
        coeffs = np.zeros(n_vars)
        coeffs[:2 * m] = -2.0 * _stack_complex(s0 * h[k]) / scale
        coeffs[eta_idx] = 1.0
        prog.add_affine(coeffs, abs(s0) ** 2 / scale)
    ball = np.zeros((2 * m, n_vars))
    ball[:, :2 * m] = np.eye(2 * m)
    prog.add_norm_ball(ball, np.zeros(2 * m), np.sqrt(cfg.pmax))

    warm = np.concatenate([_stack_complex(w0), [state.objective]])
    result = solve(prog, settings, warm_start=warm)
    info = {"block": "beamformer", "status": result.status.value,
            "eta": result.objective, "fallback": result.status is not SolveStatus.OPTIMAL}
    if info["fallback"]:
        return state, info
    w_new = _clamp_to_budget(result.x[:m] + 1j * result.x[m:2 * m], cfg.pmax)
    new_state = evaluate_state(scenario, w_new[None, :], state.positions,
                               state.iteration)
    if new_state.objective < state.objective:
        info["fallback"] = True
        info["status"] = "regressed"
        return state, info
    return new_state, info


def update_beamformers_multi(state: AlgorithmState, scenario: ScenarioRealization,
                             settings: SolverSettings | None = None):
    """One SCA step on all group beamformers under inter-group interference.

    With a single group there are no interference terms and the step reduces
    to update_beamformer_single, so it delegates.
    """
    cfg = scenario.config
    if cfg.groups == 1:
        return update_beamformer_single(state, scenario, settings)
    _require_nonzero_beamformers(state, cfg)
    m, n_groups = cfg.tx_antennas, cfg.groups
    n_vars = 2 * m * n_groups + 1
    eta_idx = n_vars - 1
    eta_anchor = state.min_sinr_anchor
    h = channel_matrix(scenario, state.positions)
    group = scenario.group_of_user

    prog = ConicProgram(n_vars, eta_idx)
    for k in range(cfg.users):
        n = group[k]
        noise = cfg.noise_power[k]
        gamma = cfg.sinr_weights[k]
        h_scaled = h[k] / np.sqrt(noise)
        s0 = complex(np.vdot(state.beamformers[n], h_scaled).conjugate())
        factor = np.sqrt(2.0) * np.vstack([
            _interference_rows(h_scaled, n_vars, 2 * m * q)
            for q in range(n_groups) if q != n])
        linear = np.zeros(n_vars)
        own = 2 * m * n
        linear[own:own + 2 * m] = -2.0 / (gamma * eta_anchor) * _stack_complex(s0 * h_scaled)
        linear[eta_idx] = abs(s0) ** 2 / (gamma * eta_anchor ** 2)
        prog.add_quadratic(factor, linear, 1.0)
    ball = np.zeros((2 * m * n_groups, n_vars))
    ball[:, :-1] = np.eye(2 * m * n_groups)
    prog.add_norm_ball(ball, np.zeros(2 * m * n_groups), np.sqrt(cfg.pmax))

    warm = np.concatenate([np.concatenate([_stack_complex(w) for w in state.beamformers]),
                           [state.objective]])
    result = solve(prog, settings, warm_start=warm)
    info = {"block": "beamformer", "status": result.status.value,
            "eta": result.objective, "fallback": result.status is not SolveStatus.OPTIMAL}
    if info["fallback"]:
        return state, info
    w_new = np.stack([result.x[2 * m * q:2 * m * q + m]
                      + 1j * result.x[2 * m * q + m:2 * m * (q + 1)]
                      for q in range(n_groups)])
    w_new = _clamp_to_budget(w_new, cfg.pmax)
    new_state = evaluate_state(scenario, w_new, state.positions, state.iteration)
    if new_state.objective < state.objective:
        info["fallback"] = True
        info["status"] = "regressed"
        return state, info
    return new_state, info


# --------------------------------------------------------------------------
# transmit position update (one antenna at a time, Gauss-Seidel)
# --------------------------------------------------------------------------

def _surrogate_pieces(surr, scale):
    """Normalized anchor/value/gradient/curvature of a quadratic surrogate."""
    return (surr.anchor, surr.value / scale, surr.gradient / scale,
            surr.curvature / scale)


def _check_tx_anchor(state: AlgorithmState, cfg, m: int) -> None:
    t = state.positions.tx
    half = cfg.region_size / 2.0
    if np.abs(t[m]).max() > half + DISTANCE_SLACK:
        raise InfeasibleAnchorError(f"antenna {m} anchor outside the region")
    others = np.delete(np.arange(t.shape[0]), m)
    if others.size:
        dist = np.linalg.norm(t[others] - t[m], axis=1)
        if dist.min() < cfg.min_spacing - DISTANCE_SLACK:
            raise InfeasibleAnchorError(f"antenna {m} anchor violates min spacing")


def _distance_rows(prog: ConicProgram, anchor: np.ndarray, others: np.ndarray,
                   spacing: float, n_vars: int) -> None:
    """Linearized pairwise-distance constraints, normalized by D^2."""
    d2 = spacing ** 2
    for other in others:
        gap = anchor - other
        coeffs = np.zeros(n_vars)
        coeffs[0:2] = -2.0 * gap / d2
        offset = (d2 - gap @ gap + 2.0 * gap @ anchor) / d2
        prog.add_affine(coeffs, offset)


def update_tx_position(state: AlgorithmState, scenario: ScenarioRealization,
                       m: int, settings: SolverSettings | None = None):
    """One SCA step on transmit antenna m with all other variables fixed."""
    cfg = scenario.config
    _require_nonzero_beamformers(state, cfg)
    _check_tx_anchor(state, cfg, m)
    anchor = state.positions.tx[m].copy()
    others = np.delete(state.positions.tx, m, axis=0)
    half = cfg.region_size / 2.0
    group = scenario.group_of_user

    position_dependence = 0.0
    if cfg.groups == 1:
        n_vars, eta_idx = 3, 2
        prog = ConicProgram(n_vars, eta_idx)
        incumbent_eta = np.inf
        for k in range(cfg.users):
            scale = cfg.sinr_weights[k] * cfg.noise_power[k]
            ctx = build_tx_context(scenario, state.positions, state.beamformers,
                                   k, 0, m)
            a, value, grad, curv = _surrogate_pieces(
                lower_surrogate_tx(ctx, anchor), scale)
            position_dependence += float(np.abs(grad).sum()) + curv
            incumbent_eta = min(incumbent_eta, value)
            linear = np.zeros(n_vars)
            linear[0:2] = -grad - curv * a
            linear[eta_idx] = 1.0
            offset = -value + grad @ a + 0.5 * curv * (a @ a)
            if curv < CURVATURE_FLOOR:
                linear[0:2] = -grad
                prog.add_affine(linear, -value + grad @ a)
            else:
                factor = np.zeros((2, n_vars))
                factor[0, 0] = factor[1, 1] = np.sqrt(curv)
                prog.add_quadratic(factor, linear, offset)
        _distance_rows(prog, anchor, others, cfg.min_spacing, n_vars)
        prog.set_box(0, -half, half)
        prog.set_box(1, -half, half)
        warm = np.concatenate([anchor, [incumbent_eta]])
    else:
        k_total = cfg.users
        n_vars = 3 + k_total
        eta_idx = 2
        eta_anchor = state.min_sinr_anchor
        prog = ConicProgram(n_vars, eta_idx)
        contexts = [[build_tx_context(scenario, state.positions, state.beamformers,
                                      k, q, m) for q in range(cfg.groups)]
                    for k in range(k_total)]
        for k in range(k_total):
            n = group[k]
            noise = cfg.noise_power[k]
            gamma = cfg.sinr_weights[k]
            z_idx = 3 + k
            z_anchor = state.slack_anchors[k]
            # own-group signal must dominate the bilinear bound of eta * slack
            a, value, grad, curv = _surrogate_pieces(
                lower_surrogate_tx(contexts[k][n], anchor), gamma * noise)
            position_dependence += float(np.abs(grad).sum()) + curv
            c_eta = z_anchor / eta_anchor
            c_z = eta_anchor / z_anchor
            rows = [np.zeros(n_vars), np.zeros(n_vars)]
            rows[0][eta_idx] = np.sqrt(c_eta)
            rows[1][z_idx] = np.sqrt(c_z)
            linear = np.zeros(n_vars)
            linear[0:2] = -grad - curv * a
            offset = -value + grad @ a + 0.5 * curv * (a @ a)
            if curv >= CURVATURE_FLOOR:
                extra = np.zeros((2, n_vars))
                extra[0, 0] = extra[1, 1] = np.sqrt(curv)
                rows.extend(extra)
            else:
                linear[0:2] = -grad
                offset = -value + grad @ a
            prog.add_quadratic(np.vstack(rows), linear, offset)
            # interference from other groups stays below the slack
            total_curv, total_grad, total_const = 0.0, np.zeros(2), 0.0
            for q in range(cfg.groups):
                if q == n:
                    continue
                _, uval, ugrad, ucurv = _surrogate_pieces(
                    upper_surrogate_tx(contexts[k][q], anchor), noise)
                total_curv += ucurv
                total_grad += ugrad
                total_const += uval
            position_dependence += float(np.abs(total_grad).sum()) + total_curv
            linear = np.zeros(n_vars)
            linear[0:2] = total_grad - total_curv * anchor
            linear[z_idx] = -1.0
            offset = (total_const - total_grad @ anchor
                      + 0.5 * total_curv * (anchor @ anchor) + 1.0)
            if total_curv >= CURVATURE_FLOOR:
                factor = np.zeros((2, n_vars))
                factor[0, 0] = factor[1, 1] = np.sqrt(total_curv)
                prog.add_quadratic(factor, linear, offset)
            else:
                linear[0:2] = total_grad
                prog.add_affine(linear, total_const - total_grad @ anchor + 1.0)
        _distance_rows(prog, anchor, others, cfg.min_spacing, n_vars)
        prog.set_box(0, -half, half)
        prog.set_box(1, -half, half)
        prog.set_box(eta_idx, 0.0, np.inf)
        for k in range(k_total):
            prog.set_box(3 + k, 0.0, np.inf)
        warm = np.concatenate([anchor, [state.objective], state.slack_anchors])

    if position_dependence == 0.0:
        # every constraint is independent of t_m (e.g. M = 1, L = 1): moving
        # the antenna cannot change anything, keep it in place
        return state, {"block": f"tx[{m}]", "status": "constant",
                       "eta": state.objective, "fallback": False}
    result = solve(prog, settings, warm_start=warm)
    info = {"block": f"tx[{m}]", "status": result.status.value,
            "eta": result.objective, "fallback": result.status is not SolveStatus.OPTIMAL}
    if info["fallback"]:
        return state, info
    t_new = np.clip(result.x[0:2], -half, half)
    if others.size and np.linalg.norm(others - t_new, axis=1).min() < cfg.min_spacing - DISTANCE_SLACK:
        info["fallback"] = True
        info["status"] = "distance_check_failed"
        return state, info
    positions = state.positions.copy()
    positions.tx[m] = t_new
    new_state = evaluate_state(scenario, state.beamformers, positions,
                               state.iteration)
    if new_state.objective < state.objective:
        info["fallback"] = True
        info["status"] = "regressed"
        return state, info
    return new_state, info


# --------------------------------------------------------------------------
# receive position updates
# --------------------------------------------------------------------------

def _rx_single_user_constraint(prog, ctx, scale, anchor, r_slice, eta_idx):
    """eta <= lower surrogate of the (normalized) own-group power at r."""
    surr = lower_surrogate_rx(ctx, anchor)
    a, value, grad, curv = _surrogate_pieces(surr, scale)
    n_vars = prog.n_vars
    linear = np.zeros(n_vars)
    linear[eta_idx] = 1.0
    if curv < CURVATURE_FLOOR:
        linear[r_slice] = -grad
        prog.add_affine(linear, -value + grad @ a)
        return value, grad, curv
    linear[r_slice] = -grad - curv * a
    factor = np.zeros((2, n_vars))
    factor[0, r_slice.start] = factor[1, r_slice.start + 1] = np.sqrt(curv)
    prog.add_quadratic(factor, linear, -value + grad @ a + 0.5 * curv * (a @ a))
    return value, grad, curv


def _rx_multi_user_constraints(prog, contexts, cfg, k, group_idx, anchors,
                               eta_anchor, z_anchor, r_slice, eta_idx, z_idx):
    """Bilinear-bound signal constraint plus interference slack for user k."""
    n_vars = prog.n_vars
    noise = cfg.noise_power[k]
    gamma = cfg.sinr_weights[k]
    anchor = anchors[k]
    a, value, grad, curv = _surrogate_pieces(
        lower_surrogate_rx(contexts[group_idx], anchor), gamma * noise)
    rows = [np.zeros(n_vars), np.zeros(n_vars)]
    rows[0][eta_idx] = np.sqrt(z_anchor / eta_anchor)
    rows[1][z_idx] = np.sqrt(eta_anchor / z_anchor)
    linear = np.zeros(n_vars)
    if curv >= CURVATURE_FLOOR:
        linear[r_slice] = -grad - curv * a
        extra = np.zeros((2, n_vars))
        extra[0, r_slice.start] = extra[1, r_slice.start + 1] = np.sqrt(curv)
        rows.extend(extra)
        offset = -value + grad @ a + 0.5 * curv * (a @ a)
    else:
        linear[r_slice] = -grad
        offset = -value + grad @ a
    prog.add_quadratic(np.vstack(rows), linear, offset)

    total_curv, total_grad, total_const = 0.0, np.zeros(2), 0.0
    for q, ctx in enumerate(contexts):
        if q == group_idx:
            continue
        _, uval, ugrad, ucurv = _surrogate_pieces(
            upper_surrogate_rx(ctx, anchor), noise)
        total_curv += ucurv
        total_grad += ugrad
        total_const += uval
    linear = np.zeros(n_vars)
    linear[z_idx] = -1.0
    if total_curv >= CURVATURE_FLOOR:
        linear[r_slice] = total_grad - total_curv * anchor
        factor = np.zeros((2, n_vars))
        factor[0, r_slice.start] = factor[1, r_slice.start + 1] = np.sqrt(total_curv)
        prog.add_quadratic(factor, linear,
                           total_const - total_grad @ anchor
                           + 0.5 * total_curv * (anchor @ anchor) + 1.0)
    else:
        linear[r_slice] = total_grad
        prog.add_affine(linear, total_const - total_grad @ anchor + 1.0)


def _rx_task_single(scenario, state, k, settings):
    """Best receive position of user k for the single-group objective."""
    cfg = scenario.config
    scale = cfg.sinr_weights[k] * cfg.noise_power[k]
    anchor = state.positions.rx[k].copy()
    half = cfg.rx_region / 2.0
    ctx = build_rx_context(scenario, state.positions, state.beamformers, k, 0)
    exp = ctx.expansion
    value = float(exp.value(anchor)) / scale
    grad = exp.gradient(anchor) / scale
    curv = exp.curvature_bound() / scale
    if curv <= 0.0 or exp.amplitudes.size == 0:
        return anchor, value, "constant"
    if curv >= CURVATURE_FLOOR:
        star = anchor + grad / curv
        if np.abs(star).max() <= half:
            return star, value + float(grad @ grad) / (2.0 * curv), "closed_form"
    prog = ConicProgram(3, 2)
    _rx_single_user_constraint(prog, ctx, scale, anchor, slice(0, 2), 2)
    prog.set_box(0, -half, half)
    prog.set_box(1, -half, half)
    result = solve(prog, settings, warm_start=np.concatenate([anchor, [value]]))
    if result.status is not SolveStatus.OPTIMAL:
        return anchor, value, "fallback"
    return result.x[0:2], result.objective, "conic"


def _rx_task_multi(scenario, state, k, settings):
    """Receive position of user k under inter-group interference."""
    cfg = scenario.config
    anchor = state.positions.rx[k].copy()
    half = cfg.rx_region / 2.0
    n = scenario.group_of_user[k]
    contexts = [build_rx_context(scenario, state.positions, state.beamformers, k, q)
                for q in range(cfg.groups)]
    prog = ConicProgram(4, 2)
    _rx_multi_user_constraints(prog, contexts, cfg, k, n, state.positions.rx,
                               state.min_sinr_anchor, state.slack_anchors[k],
                               slice(0, 2), 2, 3)
    prog.set_box(0, -half, half)
    prog.set_box(1, -half, half)
    prog.set_box(2, 0.0, np.inf)
    prog.set_box(3, 0.0, np.inf)
    warm = np.concatenate([anchor, [state.objective, state.slack_anchors[k]]])
    result = solve(prog, settings, warm_start=warm)
    if result.status is not SolveStatus.OPTIMAL:
        return anchor, state.objective, "fallback"
    return result.x[0:2], result.objective, "conic"


def update_rx_positions(state: AlgorithmState, scenario: ScenarioRealization,
                        mode: str = "sequential",
                        settings: SolverSettings | None = None,
                        max_workers: int | None = None):
    """One SCA step on every receive position.

    mode "sequential" loops users in order, "parallel" fans the independent
    per-user subproblems over a thread pool, "collective" solves one joint
    program; all three report the same max-min surrogate value up to solver
    tolerance because the per-user feasible sets are decoupled.
    """
    cfg = scenario.config
    if mode not in ("sequential", "parallel", "collective"):
        raise ValueError(f"unknown rx update mode {mode!r}")
    _require_nonzero_beamformers(state, cfg)
    half = cfg.rx_region / 2.0
    if np.abs(state.positions.rx).max() > half + DISTANCE_SLACK:
        raise InfeasibleAnchorError("an rx anchor lies outside its region")
    k_total = cfg.users
    single = cfg.groups == 1
    task = _rx_task_single if single else _rx_task_multi

    statuses: list[str]
    if mode == "collective":
        new_rx, eta, statuses = _rx_collective(state, scenario, settings)
    else:
        if mode == "parallel":
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                results = list(pool.map(
                    lambda k: task(scenario, state, k, settings), range(k_total)))
        else:
            results = [task(scenario, state, k, settings) for k in range(k_total)]
        new_rx = np.stack([r[0] for r in results])
        eta = float(min(r[1] for r in results))
        statuses = [r[2] for r in results]

    positions = state.positions.copy()
    positions.rx = np.clip(new_rx, -half, half)
    new_state = evaluate_state(scenario, state.beamformers, positions,
                               state.iteration)
    info = {"block": "rx", "mode": mode, "eta": eta, "statuses": statuses,
            "fallback": all(s == "fallback" for s in statuses)}
    if new_state.objective < state.objective:
        info["fallback"] = True
        info["statuses"] = ["regressed"] * k_total
        return state, info
    return new_state, info


def _rx_collective(state, scenario, settings):
    """All receive positions in one program sharing the max-min variable.

    The per-user feasible sets are decoupled, so maximizing eta alone leaves
    the users above the minimum anywhere on their level sets.  A per-user
    score s_k tied into the objective with a small positive weight pins every
    user at its own surrogate maximum, which is exactly what the sequential
    sweep computes; eta = min_k of the linked scores is unchanged.
    """
    cfg = scenario.config
    k_total = cfg.users
    single = cfg.groups == 1
    half = cfg.rx_region / 2.0
    eta_idx = 2 * k_total
    score_idx = lambda k: eta_idx + 1 + k
    z_idx = lambda k: eta_idx + 1 + k_total + k
    out_idx = eta_idx + 1 + k_total + (0 if single else k_total)
    n_vars = out_idx + 1
    # the solver resolves each score to (optimality gap / weight), so the
    # weight is kept O(1) rather than vanishing; exactness needs only > 0
    tie_weight = 1.0 / k_total
    prog = ConicProgram(n_vars, out_idx)
    warm_scores = np.empty(k_total)
    for k in range(k_total):
        r_slice = slice(2 * k, 2 * k + 2)
        anchor = state.positions.rx[k]
        if single:
            ctx = build_rx_context(scenario, state.positions, state.beamformers, k, 0)
            scale = cfg.sinr_weights[k] * cfg.noise_power[k]
            value, _, _ = _rx_single_user_constraint(prog, ctx, scale, anchor,
                                                     r_slice, score_idx(k))
            warm_scores[k] = value
        else:
            contexts = [build_rx_context(scenario, state.positions,
                                         state.beamformers, k, q)
                        for q in range(cfg.groups)]
            _rx_multi_user_constraints(prog, contexts, cfg, k,
                                       scenario.group_of_user[k],
                                       state.positions.rx,
                                       state.min_sinr_anchor,
                                       state.slack_anchors[k],
                                       r_slice, score_idx(k), z_idx(k))
            warm_scores[k] = state.objective
        link = np.zeros(n_vars)
        link[eta_idx], link[score_idx(k)] = 1.0, -1.0     # eta <= s_k
        prog.add_affine(link, 0.0)
        prog.set_box(2 * k, -half, half)
        prog.set_box(2 * k + 1, -half, half)
    agg = np.zeros(n_vars)
    agg[out_idx], agg[eta_idx] = 1.0, -1.0                # o <= eta + w sum s_k
    for k in range(k_total):
        agg[score_idx(k)] = -tie_weight
    prog.add_affine(agg, 0.0)
    warm_eta = float(warm_scores.min())
    warm = [state.positions.rx.ravel(), [warm_eta], warm_scores]
    if not single:
        prog.set_box(eta_idx, 0.0, np.inf)
        for k in range(k_total):
            prog.set_box(score_idx(k), 0.0, np.inf)
            prog.set_box(z_idx(k), 0.0, np.inf)
        warm.append(state.slack_anchors)
    warm.append([warm_eta + tie_weight * warm_scores.sum()])
    result = solve(prog, settings, warm_start=np.concatenate(warm))
    if result.status is not SolveStatus.OPTIMAL:
        return state.positions.rx.copy(), float(warm_eta), ["fallback"] * k_total
    new_rx = result.x[:2 * k_total].reshape(k_total, 2)
    return new_rx, float(result.x[eta_idx]), ["collective"] * k_total
