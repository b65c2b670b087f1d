"""Planar particle model, beacon-referenced steering law and full-space
simulation.

Each agent is a unit-mass self-steering particle carried by a natural
frame (heading x_i of unit length, normal y_i = x_i rotated by +pi/2);
the steering control u_i is the path curvature.  The feedback is a convex
combination of constant-bearing pursuit of the next agent in the cycle
and constant-bearing tracking of a fixed beacon.  Both the vector form
and the scalar shape form of the law are implemented; the vector form is
authoritative and the two agree to roundoff.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CollisionError, NumericError
from .numerics import DEFAULT_DT, rk4_step, wrap_angle
from .shape_space import EPS_COL, ShapeState


def rot90(v):
    """Rotate planar vectors by +pi/2 (counter-clockwise)."""
    v = np.asarray(v, dtype=float)
    return np.stack((-v[..., 1], v[..., 0]), axis=-1)


def rotate(v, angle):
    """Rotate planar vectors by the given angle(s), counter-clockwise."""
    c = np.cos(angle)
    s = np.sin(angle)
    return np.stack((c * v[..., 0] - s * v[..., 1],
                     s * v[..., 0] + c * v[..., 1]), axis=-1)


def heading_from_angle(angle):
    return np.stack((np.cos(angle), np.sin(angle)), axis=-1)


@dataclass
class AgentState:
    """Position and natural frame of one agent."""

    r: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def validate(self, tol=1e-9):
        if abs(np.hypot(*self.x) - 1.0) > tol:
            raise ValueError("heading is not unit length")
        if np.max(np.abs(self.y - rot90(self.x))) > tol:
            raise ValueError("frame normal is not the +pi/2 rotation of x")


@dataclass
class WorldState:
    """Positions and frames of n agents plus the fixed beacon."""

    positions: np.ndarray  # (n, 2)
    headings: np.ndarray   # (n, 2), unit rows
    beacon: np.ndarray     # (2,)
    t: float = 0.0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.headings = np.asarray(self.headings, dtype=float)
        self.beacon = np.asarray(self.beacon, dtype=float)

    @property
    def n(self):
        return self.positions.shape[0]

    @property
    def normals(self):
        return rot90(self.headings)

    def agent(self, i):
        return AgentState(r=self.positions[i].copy(),
                          x=self.headings[i].copy(),
                          y=rot90(self.headings[i]))

    @classmethod
    def from_polar(cls, positions, heading_angles, beacon=(0.0, 0.0), t=0.0):
        return cls(positions=np.asarray(positions, dtype=float),
                   headings=heading_from_angle(np.asarray(heading_angles,
                                                          dtype=float)),
                   beacon=np.asarray(beacon, dtype=float), t=t)

    def copy(self):
        return WorldState(self.positions.copy(), self.headings.copy(),
                          self.beacon.copy(), self.t)


def random_world(n, seed, side=4.0, beacon=(0.0, 0.0)):
    """Random bounded initial condition: positions uniform in a square of
    the given side centered on the beacon, headings uniform on the circle.
    The seed fully determines the world."""
    rng = np.random.default_rng(seed)
    beacon = np.asarray(beacon, dtype=float)
    positions = beacon + rng.uniform(-side / 2.0, side / 2.0, size=(n, 2))
    angles = rng.uniform(-np.pi, np.pi, size=n)
    return WorldState.from_polar(positions, angles, beacon=beacon)


def _chase_geometry(positions, beacon):
    """Distances and unit bearings to the pursued neighbor and beacon.

    Raises CollisionError on any collocated pair (pursued neighbor or
    beacon), identifying the pair.
    """
    d_next = np.roll(positions, -1, axis=0) - positions
    rho = np.hypot(d_next[:, 0], d_next[:, 1])
    if np.any(rho <= EPS_COL):
        i = int(np.argmax(rho <= EPS_COL))
        raise CollisionError(
            f"agents {i + 1} and {(i + 1) % positions.shape[0] + 1} are "
            "collocated", pair=(i, (i + 1) % positions.shape[0]))
    d_b = beacon - positions
    rho_b = np.hypot(d_b[:, 0], d_b[:, 1])
    if np.any(rho_b <= EPS_COL):
        i = int(np.argmax(rho_b <= EPS_COL))
        raise CollisionError(f"agent {i + 1} is collocated with the beacon",
                             pair=(i, "beacon"))
    return d_next / rho[:, None], rho, d_b / rho_b[:, None], rho_b


def cb_component(i, world, params):
    """Constant-bearing pursuit curvature toward agent i+1 (vector form)."""
    n = world.n
    j = (i + 1) % n
    d = world.positions[j] - world.positions[i]
    rho = float(np.hypot(*d))
    if rho <= EPS_COL:
        raise CollisionError(f"agents {i + 1} and {j + 1} are collocated",
                             pair=(i, j))
    los = d / rho
    y_i = rot90(world.headings[i])
    rel_vel = (params.nu[i] * world.headings[i]
               - params.nu[j] * world.headings[j])
    return float(params.mu * rotate(y_i, params.alpha[i]) @ los
                 + (los @ rot90(rel_vel)) / (params.nu[i] * rho))


def beacon_component(i, world, params):
    """Beacon-tracking curvature for agent i (vector form)."""
    d = world.beacon - world.positions[i]
    rho_b = float(np.hypot(*d))
    if rho_b <= EPS_COL:
        raise CollisionError(f"agent {i + 1} is collocated with the beacon",
                             pair=(i, "beacon"))
    y_i = rot90(world.headings[i])
    return float(params.mu_b[i] * rotate(y_i, params.alpha0[i]) @ (d / rho_b))


def steering_law(i, world, params):
    """Curvature command for agent i: convex combination of neighbor
    pursuit and beacon tracking."""
    return ((1.0 - params.lam) * cb_component(i, world, params)
            + params.lam * beacon_component(i, world, params))


def steering_law_shape(i, shape, params):
    """The same control evaluated from scalar shape variables.

    Kept alongside the vector form as a consistency check; the two agree
    to 1e-10 at any valid state.
    """
    n = shape.n
    j = (i + 1) % n
    speed_ratio = params.nu[j] / params.nu[i]
    return float(
        params.lam * params.mu_b[i]
        * np.sin(shape.kappa_b[i] - params.alpha0[i])
        + (1.0 - params.lam) * params.mu
        * np.sin(shape.kappa[i] - params.alpha[i])
        + (1.0 - params.lam) / shape.rho[i]
        * (np.sin(shape.kappa[i]) + speed_ratio * np.sin(shape.theta[j])))


def control_profile(world, params):
    """Curvature commands for all agents at once (vector form)."""
    los, rho, e_b, _ = _chase_geometry(world.positions, world.beacon)
    y = rot90(world.headings)
    vel = params.nu[:, None] * world.headings
    rel_vel = vel - np.roll(vel, -1, axis=0)
    u_cb = (params.mu * np.sum(rotate(y, params.alpha) * los, axis=1)
            + np.sum(los * rot90(rel_vel), axis=1) / (params.nu * rho))
    u_b = params.mu_b * np.sum(rotate(y, params.alpha0) * e_b, axis=1)
    return (1.0 - params.lam) * u_cb + params.lam * u_b


@dataclass
class WorldRates:
    """Time derivative of a WorldState (beacon is fixed)."""

    d_positions: np.ndarray
    d_headings: np.ndarray
    d_normals: np.ndarray
    d_beacon: np.ndarray
    controls: np.ndarray


def world_derivative(world, params):
    """Particle-model rates: r' = nu x, x' = nu u y, y' = -nu u x."""
    u = control_profile(world, params)
    d_pos = params.nu[:, None] * world.headings
    gain = (params.nu * u)[:, None]
    y = rot90(world.headings)
    return WorldRates(d_positions=d_pos, d_headings=gain * y,
                      d_normals=-gain * world.headings,
                      d_beacon=np.zeros(2), controls=u)


@dataclass
class FullTrajectory:
    """Sampled full-space trajectory (beacon constant across the run)."""

    t: np.ndarray
    positions: np.ndarray  # (m, n, 2)
    headings: np.ndarray   # (m, n, 2)
    controls: np.ndarray   # (m, n)
    beacon: np.ndarray

    @property
    def n(self):
        return self.positions.shape[1]

    def world_at(self, idx):
        return WorldState(self.positions[idx].copy(),
                          self.headings[idx].copy(),
                          self.beacon.copy(), t=float(self.t[idx]))


def simulate(world0, params, T, dt=DEFAULT_DT, record_every=1):
    """Fixed-step RK4 simulation of the full planar dynamics.

    Headings are renormalized to unit length after every step (the exact
    flow preserves them; the discrete step does not), so |r'_i| = nu_i
    holds exactly at every sample.  The run aborts with CollisionError,
    carrying time and pair, if any monitored range reaches the
    collocation floor.
    """
    n = world0.n
    beacon = world0.beacon.copy()
    n_steps = int(round(T / dt))

    def field(vec):
        pos = vec[:2 * n].reshape(n, 2)
        head = vec[2 * n:].reshape(n, 2)
        los, rho, e_b, _ = _chase_geometry(pos, beacon)
        y = rot90(head)
        vel = params.nu[:, None] * head
        rel_vel = vel - np.roll(vel, -1, axis=0)
        u = ((1.0 - params.lam)
             * (params.mu * np.sum(rotate(y, params.alpha) * los, axis=1)
                + np.sum(los * rot90(rel_vel), axis=1) / (params.nu * rho))
             + params.lam * params.mu_b
             * np.sum(rotate(y, params.alpha0) * e_b, axis=1))
        return np.concatenate([vel.ravel(),
                               ((params.nu * u)[:, None] * y).ravel()])

    vec = np.concatenate([world0.positions.ravel(), world0.headings.ravel()])
    times = [0.0]
    pos_samples = [world0.positions.copy()]
    head_samples = [world0.headings.copy()]
    ctrl_samples = [control_profile(world0, params)]

    for step in range(1, n_steps + 1):
        t = step * dt
        try:
            vec = rk4_step(field, vec, dt)
        except CollisionError as err:
            raise CollisionError(str(err), pair=err.pair, t=t) from None
        if not np.all(np.isfinite(vec)):
            raise NumericError(f"non-finite state at t = {t:.6g}")
        head = vec[2 * n:].reshape(n, 2)
        head /= np.hypot(head[:, 0], head[:, 1])[:, None]
        if step % record_every == 0 or step == n_steps:
            pos = vec[:2 * n].reshape(n, 2)
            times.append(t)
            pos_samples.append(pos.copy())
            head_samples.append(head.copy())
            world = WorldState(pos, head, beacon, t=t)
            try:
                ctrl_samples.append(control_profile(world, params))
            except CollisionError as err:
                raise CollisionError(str(err), pair=err.pair, t=t) from None

    return FullTrajectory(t=np.asarray(times),
                          positions=np.asarray(pos_samples),
                          headings=np.asarray(head_samples),
                          controls=np.asarray(ctrl_samples),
                          beacon=beacon)


def _shape_arrays(positions, headings, beacon):
    """Shape variables from cartesian data; supports leading batch axes.

    positions/headings: (..., n, 2); beacon: (2,).
    """
    h_ang = np.arctan2(headings[..., 1], headings[..., 0])
    d_next = np.roll(positions, -1, axis=-2) - positions
    rho = np.hypot(d_next[..., 0], d_next[..., 1])
    kappa = wrap_angle(np.arctan2(d_next[..., 1], d_next[..., 0]) - h_ang)
    d_prev = np.roll(positions, 1, axis=-2) - positions
    theta = wrap_angle(np.arctan2(d_prev[..., 1], d_prev[..., 0]) - h_ang)
    d_b = beacon - positions
    rho_b = np.hypot(d_b[..., 0], d_b[..., 1])
    kappa_b = wrap_angle(np.arctan2(d_b[..., 1], d_b[..., 0]) - h_ang)
    return rho, kappa, theta, rho_b, kappa_b


def extract_shape(world):
    """Scalar shape variables of a world state.

    Raises CollisionError when a monitored range sits at the collocation
    floor (the bearings would be undefined).
    """
    _chase_geometry(world.positions, world.beacon)
    rho, kappa, theta, rho_b, kappa_b = _shape_arrays(
        world.positions, world.headings, world.beacon)
    return ShapeState(rho=rho, kappa=kappa, theta=theta, rho_b=rho_b,
                      kappa_b=kappa_b)


def extract_shape_trajectory(traj):
    """Shape variables along a full-space trajectory, as (m, n) arrays."""
    return _shape_arrays(traj.positions, traj.headings, traj.beacon)


def write_trajectory_csv(traj, path, seed=None, header_notes=()):
    """Full-space trajectory CSV.

    Row layout: t, then per-agent (r_x, r_y, heading angle), then the
    beacon position, then the curvature commands u_i.
    """
    n = traj.n
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"r{i}_x", f"r{i}_y", f"heading_{i}"]
    cols += ["beacon_x", "beacon_y"]
    cols += [f"u_{i}" for i in range(1, n + 1)]
    h_ang = np.arctan2(traj.headings[..., 1], traj.headings[..., 0])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# full-space trajectory; positions in length units, "
                 "headings in radians wrapped to (-pi, pi], u in 1/length\n")
        if seed is not None:
            fh.write(f"# seed = {seed}\n")
        for note in header_notes:
            fh.write(f"# {note}\n")
        fh.write(",".join(cols) + "\n")
        for idx in range(traj.t.size):
            row = [traj.t[idx]]
            for i in range(n):
                row += [traj.positions[idx, i, 0], traj.positions[idx, i, 1],
                        h_ang[idx, i]]
            row += [traj.beacon[0], traj.beacon[1]]
            row += list(traj.controls[idx])
            fh.write(",".join(format(v, ".12g") for v in row) + "\n")
