"""Alternating optimization driver: beamformers, tx antennas, rx antennas.

One outer iteration runs the beamformer step, a Gauss-Seidel sweep over the
transmit antennas, then the receive-position step; blocks can be switched off
to realize the fixed-antenna benchmark schemes. The loop stops when the
fractional objective increase between consecutive outer iterations falls
below epsilon or the iteration cap is hit, and records a rich per-iteration
trace (objective, SINRs, feasibility metrics, timings, solver statuses).
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .blocks import (AlgorithmState, evaluate_state, update_beamformer_single,
                     update_beamformers_multi, update_rx_positions,
                     update_tx_position)
from .channel import (PositionState, ScenarioRealization, channel_matrix,
                      transmit_grid)
from .conic import SolverSettings


@dataclass
class ConvergenceCriterion:
    epsilon: float = 1e-4        # fractional objective increase threshold
    max_iterations: int = 200


@dataclass
class IterationTrace:
    """Per-iteration records plus run metadata, serializable to JSON lines."""

    meta: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

    def objectives(self) -> np.ndarray:
        return np.array([rec["objective"] for rec in self.records])

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"type": "meta", **self.meta}) + "\n")
            for rec in self.records:
                fh.write(json.dumps({"type": "iteration", **rec}) + "\n")

    @classmethod
    def load(cls, path) -> "IterationTrace":
        trace = cls()
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                doc = json.loads(line)
                kind = doc.pop("type")
                if kind == "meta":
                    trace.meta = doc
                else:
                    trace.records.append(doc)
        return trace


def default_rx_mode() -> str:
    return "parallel" if (os.cpu_count() or 1) > 1 else "sequential"


def initialize(scenario: ScenarioRealization,
               tx_override: np.ndarray | None = None,
               rx_override: np.ndarray | None = None) -> AlgorithmState:
    """Deterministic starting point: grid layout, reference rx, matched power.

    Transmit antennas sit on a centered square grid with spacing
    max(min_spacing, lambda/2); receive antennas start at their reference
    points (region centers). Each group's beamformer is the matched filter of
    the group's summed channel, scaled so the power budget is met with
    equality split evenly across groups.
    """
    cfg = scenario.config
    if tx_override is not None:
        tx = np.array(tx_override, dtype=float)
    else:
        tx = transmit_grid(cfg.tx_antennas, cfg.region_size, cfg.min_spacing,
                           cfg.wavelength)
    if rx_override is not None:
        rx = np.array(rx_override, dtype=float)
    else:
        rx = np.zeros((cfg.users, 2))
    positions = PositionState(tx=tx, rx=rx)
    h = channel_matrix(scenario, positions)
    beams = np.zeros((cfg.groups, cfg.tx_antennas), dtype=complex)
    for n in range(cfg.groups):
        summed = h[cfg.group_members(n)].sum(axis=0)
        norm = np.linalg.norm(summed)
        if norm == 0.0:
            raise RuntimeError(f"group {n} has a zero summed channel at init")
        beams[n] = np.sqrt(cfg.pmax / cfg.groups) * summed / norm
    return evaluate_state(scenario, beams, positions)


def _record(state: AlgorithmState, cfg, infos, timings) -> dict:
    return {
        "iteration": state.iteration,
        "objective": state.objective,
        "objective_db": 10.0 * np.log10(max(state.objective, 1e-300)),
        "sinr": [float(s) for s in state.sinr],
        "total_power": float(np.sum(np.abs(state.beamformers) ** 2)),
        "min_tx_spacing": state.positions.min_tx_spacing(),
        "region_overrun": state.positions.region_overrun(cfg),
        "tx": state.positions.tx.tolist(),
        "rx": state.positions.rx.tolist(),
        "statuses": [info.get("status", info.get("statuses")) for info in infos],
        "timings_s": timings,
    }


def _run_loop(scenario: ScenarioRealization, state: AlgorithmState,
              criterion: ConvergenceCriterion, rx_mode: str,
              move_tx: bool, move_rx: bool,
              settings: SolverSettings | None) -> tuple[AlgorithmState, IterationTrace]:
    cfg = scenario.config
    single = cfg.groups == 1
    trace = IterationTrace(meta={
        "users": cfg.users, "groups": cfg.groups, "tx_antennas": cfg.tx_antennas,
        "paths": cfg.paths, "rx_mode": rx_mode, "move_tx": move_tx,
        "move_rx": move_rx, "epsilon": criterion.epsilon,
    })
    trace.records.append(_record(state, cfg, [], {}))
    previous = state.objective
    for iteration in range(1, criterion.max_iterations + 1):
        infos = []
        t0 = time.perf_counter()
        if single:
            state, info = update_beamformer_single(state, scenario, settings)
        else:
            state, info = update_beamformers_multi(state, scenario, settings)
        infos.append(info)
        t1 = time.perf_counter()
        if move_tx:
            for m in range(cfg.tx_antennas):
                state, info = update_tx_position(state, scenario, m, settings)
                infos.append(info)
        t2 = time.perf_counter()
        if move_rx:
            state, info = update_rx_positions(state, scenario, rx_mode, settings)
            infos.append(info)
        t3 = time.perf_counter()
        state.iteration = iteration
        timings = {"beamformer": t1 - t0, "tx": t2 - t1, "rx": t3 - t2}
        trace.records.append(_record(state, cfg, infos, timings))
        gain = (state.objective - previous) / max(previous, 1e-12)
        if gain < criterion.epsilon:
            break
        previous = state.objective
    return state, trace


def run_single_group(scenario: ScenarioRealization,
                     criterion: ConvergenceCriterion | None = None,
                     rx_mode: str | None = None,
                     move_tx: bool = True, move_rx: bool = True,
                     settings: SolverSettings | None = None,
                     initial: AlgorithmState | None = None):
    """Full alternating optimization for one multicast group."""
    if scenario.config.groups != 1:
        raise ValueError("run_single_group needs a single-group config")
    criterion = criterion or ConvergenceCriterion()
    rx_mode = rx_mode or default_rx_mode()
    state = initial if initial is not None else initialize(scenario)
    return _run_loop(scenario, state, criterion, rx_mode, move_tx, move_rx,
                     settings)


def run_multi_group(scenario: ScenarioRealization,
                    criterion: ConvergenceCriterion | None = None,
                    rx_mode: str | None = None,
                    move_tx: bool = True, move_rx: bool = True,
                    settings: SolverSettings | None = None,
                    initial: AlgorithmState | None = None):
    """Full alternating optimization with inter-group interference."""
    if scenario.config.groups < 2:
        raise ValueError("run_multi_group needs at least two groups")
    criterion = criterion or ConvergenceCriterion()
    rx_mode = rx_mode or default_rx_mode()
    state = initial if initial is not None else initialize(scenario)
    return _run_loop(scenario, state, criterion, rx_mode, move_tx, move_rx,
                     settings)
