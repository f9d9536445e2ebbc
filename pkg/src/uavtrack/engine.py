"""Synchronous-round multi-UAV formation and tracking loop.

Every round each UAV reads the same snapshot of the previous round
(target truth, neighbour positions), estimates the target, refreshes its
system state, computes its camera twist and moves.  All agents commit
together, then the target advances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .camera import EPS_DEPTH, project
from .config import ExplicitPlacement, ScenarioConfig
from .control import control_command, desired_state, feature_jacobian, state_error, swarm_input
from .dynamics import SystemState, TargetState, advance_target, integrate, state_derivative, target_velocity
from .errors import UavTrackError
from .estimation import Belief, estimate
from .geometry import Pose, Twist, camera_pose_from_body, heading, rotate_by_rates
from .metrics import MetricsRecord, error_area, normalized_errors, pairwise_distances, view_coverage


@dataclass(frozen=True)
class UavAgent:
    id: int
    pose: Pose
    twist: Twist = field(default_factory=Twist)
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    system_state: SystemState | None = None
    belief: Belief | None = None
    predicted: SystemState | None = None
    occlusions: int = 0


@dataclass(frozen=True)
class World:
    agents: tuple[UavAgent, ...]
    target: TargetState
    time: float = 0.0
    round: int = 0
    rng_seed: int = 0
    # velocity the target used over the last round (speed comparisons)
    target_motion: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass(frozen=True)
class AgentSnapshot:
    id: int
    position: np.ndarray
    angles: tuple[float, float, float]
    heading: float
    velocity: np.ndarray
    twist: np.ndarray
    u: float
    v: float


@dataclass
class RunLog:
    records: list[MetricsRecord]
    snapshots: list[tuple[AgentSnapshot, ...]]
    target_path: list[np.ndarray]
    final: World
    converged_round: int | None = None


# -- world construction -----------------------------------------------------

def initial_world(config: ScenarioConfig) -> World:
    target_pos = np.array(config.target_position, dtype=float)
    p = config.placement
    poses = []
    if isinstance(p, ExplicitPlacement):
        for pos, ori in zip(p.positions, p.orientations):
            poses.append(camera_pose_from_body(pos, ori))
    else:
        radius = config.ring_radius
        for i in range(config.num_uavs):
            az = p.phase + 2.0 * math.pi * i / config.num_uavs
            pos = target_pos + np.array([radius * math.cos(az), radius * math.sin(az), p.height])
            poses.append(camera_pose_from_body(pos, (0.0, 0.0, az + math.pi)))
    agents = tuple(UavAgent(i, pose) for i, pose in enumerate(poses))
    target = TargetState(target_pos, target_velocity(0.0, config.mobility))
    return World(agents, target, 0.0, 0, config.seed, target.velocity.copy())


# -- neighbours ---------------------------------------------------------------

def find_neighbors(agents, gamma: float) -> dict[int, tuple[int, ...]]:
    if not gamma > 0:
        raise ValueError("communication range must be positive")
    ids = [a.id for a in agents]
    pos = np.array([a.pose.position for a in agents]).reshape(len(ids), 3)
    d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
    table = {}
    for i, aid in enumerate(ids):
        table[aid] = tuple(ids[j] for j in range(len(ids)) if j != i and d[i, j] <= gamma)
    return table


# -- observation ----------------------------------------------------------------

def _observe(pose: Pose, target_pos: np.ndarray, config: ScenarioConfig, rng=None):
    """Feature triple and back-projected target position, or None if not in front."""
    p_cam = pose.rotation @ (target_pos - pose.position)
    z = p_cam[2]
    if not z > EPS_DEPTH:
        return None
    x1, x2 = p_cam[0] / z, p_cam[1] / z
    if rng is not None and config.pixel_noise > 0:
        intr = config.intrinsics
        x1 += rng.normal(0.0, config.pixel_noise) / intr.fx
        x2 += rng.normal(0.0, config.pixel_noise) / intr.fy
    s = np.array([x1, x2, 1.0 / z])
    meas = pose.position + pose.rotation.T @ (np.array([x1, x2, 1.0]) * z)
    return s, meas


def _agent_rng(world: World, agent_id: int, config: ScenarioConfig):
    # keyed by (seed, round, agent) so noise does not depend on processing order
    if config.pixel_noise <= 0:
        return None
    return np.random.default_rng([world.rng_seed, world.round, agent_id])


def _advance_agent(agent: UavAgent, world: World, neighbor_pos, config: ScenarioConfig) -> UavAgent:
    gains = config.gains
    rot = agent.pose.rotation
    obs = _observe(agent.pose, world.target.position, config, _agent_rng(world, agent.id, config))

    # (1) target estimate
    measurement = None if obs is None else obs[1]
    p_hat, v_hat, belief = estimate(config.estimator, world.target, measurement, config.dt, agent.belief)

    # (2) system state refresh
    occlusions = agent.occlusions
    if obs is None:
        if agent.system_state is None:
            raise UavTrackError("target not in front of the camera at start", agent.id)
        occlusions += 1
    if config.feature_source == "integrated" and agent.predicted is not None:
        s = agent.predicted.features
    elif obs is not None:
        s = obs[0]
    else:
        # hold the last feature while the target is behind the camera plane
        s = agent.system_state.features
    state = SystemState(s[0], s[1], s[2], p_hat, v_hat)

    # (3)-(4) neighbour snapshot reads and swarm term (inertial frame)
    if config.swarm_enabled and neighbor_pos:
        u_s = swarm_input(agent.pose.position, neighbor_pos, gains, config.swarm_sign)
    else:
        u_s = np.zeros(3)

    # (5) camera-frame command, then move
    e = state_error(s, desired_state(gains))
    L = feature_jacobian(s)
    vq_cam = np.concatenate([rot @ v_hat, np.zeros(3)])
    cmd = control_command(e, L, vq_cam, rot @ u_s, gains)
    v_world = rot.T @ cmd.linear
    new_pose = Pose.from_rotation(agent.pose.position + config.dt * v_world,
                                  rotate_by_rates(rot, cmd.angular, config.dt))

    predicted = None
    if config.feature_source == "integrated":
        predicted = integrate(state, state_derivative(state, cmd, rot), config.dt)
    return UavAgent(agent.id, new_pose, cmd, v_world, state, belief, predicted, occlusions)


def step(world: World, config: ScenarioConfig, order=None) -> tuple[World, MetricsRecord]:
    """Advance one synchronous round; ``order`` permutes agent processing."""
    agents = world.agents
    neighbors = find_neighbors(agents, config.comm_range)
    by_id = {a.id: a for a in agents}
    idx = range(len(agents)) if order is None else order
    new = {}
    for i in idx:
        agent = agents[i]
        nbr = [by_id[j].pose.position for j in neighbors[agent.id]]
        try:
            new[agent.id] = _advance_agent(agent, world, nbr, config)
        except UavTrackError as exc:
            if exc.agent_id is None:
                exc.agent_id = agent.id
            raise
    target = advance_target(world.target, world.time, config.dt, config.mobility)
    nxt = World(
        tuple(new[a.id] for a in agents),
        target,
        (world.round + 1) * config.dt,
        world.round + 1,
        world.rng_seed,
        world.target.velocity.copy(),
    )
    return nxt, measure(nxt, config)


# -- metrics --------------------------------------------------------------------

def _pixel(agent: UavAgent, target_pos, config: ScenarioConfig):
    p_rel = target_pos - agent.pose.position
    p_cam = agent.pose.rotation @ p_rel
    if not p_cam[2] > EPS_DEPTH:
        return None, p_rel
    return project(p_cam, config.intrinsics), p_rel


def measure(world: World, config: ScenarioConfig) -> MetricsRecord:
    intr = config.intrinsics
    tpos = world.target.position
    ex, ey, ez, ea, speed = [], [], [], [], []
    for a in world.agents:
        pt, p_rel = _pixel(a, tpos, config)
        if pt is None:
            e = (math.nan, math.nan, float(np.linalg.norm(p_rel)) / config.gains.d_q)
        else:
            e = normalized_errors(pt, p_rel, intr, config.gains.d_q)
        ex.append(e[0])
        ey.append(e[1])
        ez.append(e[2])
        ea.append(error_area(e[0], e[1]))
        speed.append(float(np.linalg.norm(a.velocity)))
    positions = [a.pose.position for a in world.agents]
    total, effective = view_coverage(positions, tpos, intr.fov_az)
    return MetricsRecord(
        world.round, world.time, tuple(ex), tuple(ey), tuple(ez), tuple(ea), tuple(speed),
        float(np.linalg.norm(world.target_motion)), total, effective, pairwise_distances(positions),
    )


def snapshot(world: World, config: ScenarioConfig) -> tuple[AgentSnapshot, ...]:
    out = []
    for a in world.agents:
        pt, _ = _pixel(a, world.target.position, config)
        u, v = (math.nan, math.nan) if pt is None else (pt.u, pt.v)
        out.append(AgentSnapshot(a.id, a.pose.position.copy(), a.pose.angles, heading(a.pose),
                                 a.velocity.copy(), a.twist.as_vector(), u, v))
    return tuple(out)


def check_convergence(history, window: int = 10, tol_e: float = 1e-2, tol_v: float = 0.05) -> bool:
    if not history:
        raise ValueError("history must be non-empty")
    if len(history) < window:
        return False
    for rec in history[-window:]:
        if not max(rec.e_a) < tol_e:
            return False
        scale = max(rec.target_speed, 1.0)
        if not max(abs(s - rec.target_speed) for s in rec.speed) / scale < tol_v:
            return False
    return True


def run(config: ScenarioConfig, order=None) -> RunLog:
    world = initial_world(config)
    records = [measure(world, config)]
    snaps = [snapshot(world, config)]
    path = [world.target.position.copy()]
    conv = config.convergence
    converged = None
    for _ in range(config.max_rounds):
        world, rec = step(world, config, order)
        records.append(rec)
        snaps.append(snapshot(world, config))
        path.append(world.target.position.copy())
        if converged is None and check_convergence(records, conv.window, conv.tol_e, conv.tol_v):
            converged = rec.round
            if conv.stop:
                break
    return RunLog(records, snaps, path, world, converged)
