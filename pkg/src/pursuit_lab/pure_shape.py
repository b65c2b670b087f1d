"""Pure-shape coordinates, invariant manifolds and reduced dynamics.

A change of variables splits the shape into a "pure shape" part --
relative bearings and length ratios, invariant under rotation and
uniform scaling -- plus the overall heading kappa_1 and scale rho_1.
For every k in {1, ..., n-1} there is an invariant manifold M_k on which
the pure shape is frozen (agents equally spaced on a circle around the
beacon, common bearing offsets) and only (kappa_1, rho_1) evolve, with
2-D reduced dynamics.  When the reduced circling equilibrium fails to
exist, an angular strip Delta is positively invariant and trajectories
spiral outward toward a computable asymptotic heading offset.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (CollisionError, InconclusiveError,
                     PreconditionError, UndefinedManifoldError)
from .full_space import WorldState, heading_from_angle
from .numerics import DEFAULT_DT, rk4_step, wrap_angle
from .params import (require_a6, require_analysis_assumptions, satisfies_a6)
from .shape_space import EPS_COL

# A5 guard: |cos(Phi/2)|, |cos(Psi/2)| or |sin(Phi/2)| below this is
# flagged (the manifold derivation divides by these quantities).
A5_GUARD_TOL = 1e-6
# Manifold-membership tolerance for classification.
MEMBERSHIP_TOL = 1e-7


@dataclass
class PureShapeState:
    """Overall pose (kappa1, rho1) plus the scale-free shape variables."""

    kappa1: float
    rho1: float
    kappa_t: np.ndarray  # kappa_i - kappa_{i+1}
    psi: np.ndarray      # theta_i - kappa_i
    phi_b: np.ndarray    # kappa_ib - kappa_i
    rho_t: np.ndarray    # rho_i / rho_1 (first entry exactly 1)
    rho_tb: np.ndarray   # rho_ib / rho_1

    @property
    def n(self):
        return self.kappa_t.shape[0]

    def copy(self):
        return PureShapeState(self.kappa1, self.rho1, self.kappa_t.copy(),
                              self.psi.copy(), self.phi_b.copy(),
                              self.rho_t.copy(), self.rho_tb.copy())

    def to_vector(self):
        return np.concatenate([[self.kappa1, self.rho1], self.kappa_t,
                               self.psi, self.phi_b, self.rho_t,
                               self.rho_tb])

    @classmethod
    def from_vector(cls, vec, n):
        vec = np.asarray(vec, dtype=float)
        parts = np.split(vec[2:], 5)
        return cls(kappa1=float(vec[0]), rho1=float(vec[1]),
                   kappa_t=parts[0].copy(), psi=parts[1].copy(),
                   phi_b=parts[2].copy(), rho_t=parts[3].copy(),
                   rho_tb=parts[4].copy())


@dataclass
class PureShapeRates:
    """Time derivatives of all pure-shape fields."""

    kappa1: float
    rho1: float
    kappa_t: np.ndarray
    psi: np.ndarray
    phi_b: np.ndarray
    rho_t: np.ndarray
    rho_tb: np.ndarray

    def to_vector(self):
        return np.concatenate([[self.kappa1, self.rho1], self.kappa_t,
                               self.psi, self.phi_b, self.rho_t,
                               self.rho_tb])


def pure_constraint_residuals(state):
    """Residuals of the transformed cycle-closure and consistency
    constraints: the closure angle (mod 2*pi) and the per-agent real and
    imaginary consistency defects in the length ratios."""
    closure = float(wrap_angle(np.sum(np.pi - state.psi)))
    phi_next = np.roll(state.phi_b, -1)
    psi_next = np.roll(state.psi, -1)
    rho_tb_next = np.roll(state.rho_tb, -1)
    turn = phi_next - psi_next
    g1 = (state.rho_t - state.rho_tb * np.cos(state.phi_b)
          - rho_tb_next * np.cos(turn))
    g2 = state.rho_tb * np.sin(state.phi_b) + rho_tb_next * np.sin(turn)
    return closure, g1, g2


def to_pure_shape(shape):
    """Change of variables from a full shape state.

    Ratios are taken against agent 1's chase range, so the result is
    invariant under uniform rescaling of all lengths (except rho1
    itself).
    """
    if shape.rho[0] <= EPS_COL:
        raise CollisionError("rho_1 at or below collocation floor",
                             pair=(0, 1))
    return PureShapeState(
        kappa1=float(shape.kappa[0]),
        rho1=float(shape.rho[0]),
        kappa_t=wrap_angle(shape.kappa - np.roll(shape.kappa, -1)),
        psi=wrap_angle(shape.theta - shape.kappa),
        phi_b=wrap_angle(shape.kappa_b - shape.kappa),
        rho_t=shape.rho / shape.rho[0],
        rho_tb=shape.rho_b / shape.rho[0])


def _recover_kappa(state):
    """Per-agent kappa_i = kappa_1 + suffix sum of the kappa tilde chain."""
    suffix = np.cumsum(state.kappa_t[::-1])[::-1]
    return state.kappa1 + suffix


def _phi_psi(state):
    """The auxiliary half-angle arguments Phi_i and Psi_i.

    kappa_i+ is formed from the suffix-sum identity (empty sum for the
    last agent) rather than by rolling recovered kappa values: the
    half-angle expressions are only 4*pi-periodic, and the identity form
    keeps them consistent for any wrapped representatives of kappa~.
    """
    suffix_excl = np.concatenate(
        [np.cumsum(state.kappa_t[::-1])[::-1][1:], [0.0]])
    kplus = 2.0 * state.kappa1 + state.kappa_t + 2.0 * suffix_excl
    psi_next = np.roll(state.psi, -1)
    return kplus, kplus + psi_next, state.kappa_t - psi_next


def a5_guard_values(state):
    """Min |cos(Phi/2)|, |cos(Psi/2)|, |sin(Phi/2)| over agents."""
    _, phi, psi = _phi_psi(state)
    return (float(np.min(np.abs(np.cos(phi / 2.0)))),
            float(np.min(np.abs(np.cos(psi / 2.0)))),
            float(np.min(np.abs(np.sin(phi / 2.0)))))


def _rates_vector(vec, n, mu, lam, alpha, alpha0):
    """Packed-vector form of the transformed rates (integration hot path).

    Layout matches PureShapeState.to_vector: kappa1, rho1, then the
    kappa~, psi, phi_b, rho~, rho~_b blocks.
    """
    kappa1 = vec[0]
    rho1 = vec[1]
    kappa_t = vec[2:2 + n]
    psi = vec[2 + n:2 + 2 * n]
    phi_b = vec[2 + 2 * n:2 + 3 * n]
    rho_t = vec[2 + 3 * n:2 + 4 * n]
    rho_tb = vec[2 + 4 * n:2 + 5 * n]

    suffix = np.cumsum(kappa_t[::-1])[::-1]
    suffix_excl = np.concatenate([suffix[1:], [0.0]])
    kplus = 2.0 * kappa1 + kappa_t + 2.0 * suffix_excl
    psi_next = np.roll(psi, -1)
    half_phi = 0.5 * (kplus + psi_next)
    half_psi = 0.5 * (kappa_t - psi_next)
    s_half = np.sin(half_phi)
    c_half = np.cos(half_phi)
    c_psi = np.cos(half_psi)
    spread = s_half * c_psi / rho_t           # sin(Phi/2)cos(Psi/2)/rho~
    squeeze = c_half * c_psi                  # cos(Phi/2)cos(Psi/2)

    d_kappa1 = (-mu * ((1.0 - lam) * np.sin(kappa1 - alpha)
                       + lam * np.sin(phi_b[0] + kappa1 - alpha0))
                + 2.0 * lam / rho1 * s_half[0] * c_psi[0])
    d_rho1 = -2.0 * squeeze[0]

    phi_next = np.roll(phi_b, -1)
    d_kappa_t = (-2.0 * mu * (
        (1.0 - lam) * np.sin(0.5 * kappa_t)
        * np.cos(0.5 * kplus - alpha)
        + lam * np.sin(0.5 * (phi_b - phi_next + kappa_t))
        * np.cos(0.5 * (phi_b + phi_next + kplus) - alpha0))
        + 2.0 * lam / rho1 * (spread - np.roll(spread, -1)))
    d_rho_t = 2.0 / rho1 * (rho_t * squeeze[0] - squeeze)
    d_psi = 2.0 / rho1 * (np.roll(spread, 1) - spread)
    beacon_arg = phi_b + kappa1 + suffix
    d_rho_tb = (2.0 * rho_tb * squeeze[0] - np.cos(beacon_arg)) / rho1
    d_phi_b = (np.sin(beacon_arg) / rho_tb - 2.0 * spread) / rho1
    out = np.empty(2 + 5 * n)
    out[0] = d_kappa1
    out[1] = d_rho1
    out[2:2 + n] = d_kappa_t
    out[2 + n:2 + 2 * n] = d_psi
    out[2 + 2 * n:2 + 3 * n] = d_phi_b
    out[2 + 3 * n:2 + 4 * n] = d_rho_t
    out[2 + 4 * n:2 + 5 * n] = d_rho_tb
    return out


def pure_shape_derivative(state, params):
    """Closed-loop rates of the transformed variables (requires A1-A4)."""
    require_analysis_assumptions(params)
    if state.rho1 <= EPS_COL:
        raise CollisionError("rho_1 at or below collocation floor",
                             pair=(0, 1))
    vec = _rates_vector(state.to_vector(), state.n, params.mu, params.lam,
                        params.alpha[0], params.alpha0[0])
    out = PureShapeState.from_vector(vec, state.n)
    return PureShapeRates(kappa1=out.kappa1, rho1=out.rho1,
                          kappa_t=out.kappa_t, psi=out.psi,
                          phi_b=out.phi_b, rho_t=out.rho_t,
                          rho_tb=out.rho_tb)


@dataclass(frozen=True)
class ManifoldSpec:
    """The constants defining the invariant manifold M_k."""

    n: int
    k: int
    psi_const: float
    phi_const: float
    rho_tb_const: float

    def residuals(self, state):
        """Max deviation from each defining constant family."""
        return np.array([
            float(np.max(np.abs(wrap_angle(state.kappa_t)))),
            float(np.max(np.abs(wrap_angle(state.psi - self.psi_const)))),
            float(np.max(np.abs(wrap_angle(state.phi_b - self.phi_const)))),
            float(np.max(np.abs(state.rho_t - 1.0))),
            float(np.max(np.abs(state.rho_tb - self.rho_tb_const))),
        ])

    def contains(self, state, tol=MEMBERSHIP_TOL):
        return bool(np.max(self.residuals(state)) < tol)


def manifold_spec(n, k):
    """Constants of M_k; defined for k in {1, ..., n-1} only."""
    if not 1 <= k <= n - 1:
        raise UndefinedManifoldError(
            f"manifold index k = {k} outside 1..{n - 1} (k = 0 and k = n "
            "leave the beacon ratio undefined)")
    return ManifoldSpec(
        n=n, k=k,
        psi_const=float((n - 2 * k) * np.pi / n),
        phi_const=float((n - 2 * k) * np.pi / (2 * n)),
        rho_tb_const=float(1.0 / (2.0 * np.sin(k * np.pi / n))))


def lift(spec, kappa1, rho1, beacon=(0.0, 0.0)):
    """A pure-shape state exactly on M_k plus a consistent world.

    The embedding pins the beacon at the given point, places agent 1 at
    position angle 0 on the circle of radius rho1 * rho_tb_const and
    advances the position angle by 2*k*pi/n per agent (counter-clockwise
    ordering); headings follow from the manifold's common beacon bearing.
    """
    if not rho1 > 0.0:
        raise PreconditionError("rho1 must be positive")
    n, k = spec.n, spec.k
    pure = PureShapeState(
        kappa1=float(wrap_angle(kappa1)), rho1=float(rho1),
        kappa_t=np.zeros(n),
        psi=np.full(n, spec.psi_const),
        phi_b=np.full(n, spec.phi_const),
        rho_t=np.ones(n),
        rho_tb=np.full(n, spec.rho_tb_const))
    beacon = np.asarray(beacon, dtype=float)
    beta = 2.0 * np.pi * k / n * np.arange(n)
    radius = rho1 * spec.rho_tb_const
    positions = beacon + radius * heading_from_angle(beta)
    kappa_b = wrap_angle(kappa1 + spec.phi_const)
    heading_angles = beta + np.pi - kappa_b
    world = WorldState(positions=positions,
                       headings=heading_from_angle(heading_angles),
                       beacon=beacon)
    return pure, world


def _reduced_scalars(params, k):
    mu = params.mu
    lam = params.lam
    alpha = params.alpha[0]
    alpha0 = params.alpha0[0]
    kpn = k * np.pi / params.n
    return mu, lam, alpha, alpha0, kpn


def reduced_derivative(kappa1, rho1, params, k):
    """The 2-D reduced rates (kappa1', rho1') on M_k (requires A1-A4)."""
    require_analysis_assumptions(params)
    if not 1 <= k <= params.n - 1:
        raise UndefinedManifoldError(f"k = {k} outside 1..{params.n - 1}")
    if not rho1 > 0.0:
        raise PreconditionError("rho1 must be positive")
    mu, lam, alpha, alpha0, kpn = _reduced_scalars(params, k)
    return (_reduced_kappa_rate(kappa1, rho1, mu, lam, alpha, alpha0, kpn),
            _reduced_rho_rate(kappa1, kpn))


def _reduced_kappa_rate(kappa1, rho1, mu, lam, alpha, alpha0, kpn):
    return (-mu * ((1.0 - lam) * math.sin(kappa1 - alpha)
                   + lam * math.cos(kappa1 - kpn - alpha0))
            + 2.0 * lam / rho1 * math.cos(kappa1 - kpn) * math.sin(kpn))


def _reduced_rho_rate(kappa1, kpn):
    # sum-to-product form; the difference-of-cosines form agrees to 1e-12
    return 2.0 * math.sin(kappa1 - kpn) * math.sin(kpn)


def _reduced_rho_rate_cos_form(kappa1, kpn):
    return -math.cos(kappa1) + math.cos(kappa1 - 2.0 * kpn)


def reduced_field(params, k):
    """Vector field for the reduced dynamics (validated once, then pure
    scalar math per call; suitable for tight integration loops)."""
    require_analysis_assumptions(params)
    if not 1 <= k <= params.n - 1:
        raise UndefinedManifoldError(f"k = {k} outside 1..{params.n - 1}")
    mu, lam, alpha, alpha0, kpn = _reduced_scalars(params, k)

    def field(y):
        kappa1, rho1 = y[0], y[1]
        if not rho1 > 0.0:
            raise CollisionError("reduced scale rho1 reached zero",
                                 pair=(0, 1))
        return np.array([
            _reduced_kappa_rate(kappa1, rho1, mu, lam, alpha, alpha0, kpn),
            _reduced_rho_rate(kappa1, kpn)])

    return field


def integrate_reduced(kappa1, rho1, params, k, T, dt=DEFAULT_DT,
                      record_every=1):
    """RK4 trajectory of the reduced dynamics.

    kappa1 is left unwrapped along the run (the field is 2*pi-periodic),
    keeping the recorded curve continuous for portrait use.
    """
    fieldfn = reduced_field(params, k)
    n_steps = int(round(T / dt))
    y = np.array([float(kappa1), float(rho1)])
    times = [0.0]
    rows = [y.copy()]
    for step in range(1, n_steps + 1):
        y = rk4_step(fieldfn, y, dt)
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            rows.append(y.copy())
    rows = np.asarray(rows)
    return np.asarray(times), rows[:, 0], rows[:, 1]


@dataclass
class ReducedEquilibrium:
    """A circling equilibrium of the reduced dynamics with its tag."""

    kappa1: float
    rho1: float
    stable: bool
    tag: str
    method: str


def _linearized_tag(params, k, kappa1, rho1):
    """Stability from the 2x2 Jacobian (trace/determinant signs)."""
    h = 1e-6
    fieldfn = reduced_field(params, k)

    def f(ka, rh):
        return fieldfn(np.array([ka, rh]))

    j11, j21 = (f(kappa1 + h, rho1) - f(kappa1 - h, rho1)) / (2 * h)
    j12, j22 = (f(kappa1, rho1 + h) - f(kappa1, rho1 - h)) / (2 * h)
    trace = j11 + j22
    det = j11 * j22 - j12 * j21
    if abs(trace) < 1e-9 or abs(det) < 1e-9:
        return False, "marginal"
    stable = trace < 0.0 and det > 0.0
    return stable, "stable" if stable else "unstable"


def reduced_equilibrium(params, k):
    """The circling equilibria of the reduced dynamics, or None.

    The two candidate headings kappa1 = k*pi/n and k*pi/n + pi share one
    radius; both are returned, tagged.  Absence (non-positive radius
    denominator) is a value, not an error.  Under the A6 gain pattern the
    tags come from the closed-form sign test; otherwise from numeric
    linearization.
    """
    require_analysis_assumptions(params)
    if not 1 <= k <= params.n - 1:
        raise UndefinedManifoldError(f"k = {k} outside 1..{params.n - 1}")
    mu, lam, alpha, alpha0, kpn = _reduced_scalars(params, k)
    denom = mu * ((1.0 - lam) * math.sin(kpn - alpha)
                  + lam * math.cos(alpha0))
    if denom <= 0.0:
        return None
    rho1_star = 2.0 * lam * math.sin(kpn) / denom

    results = []
    if satisfies_a6(params):
        rp = reduced_params(params, k)
        sign = (math.sin(rp.gamma_kn * math.pi - rp.alpha0_plus)
                * math.cos(rp.gamma_kn * math.pi + rp.alpha0_minus))
        if abs(sign) < 1e-12:
            for kap in (kpn, kpn + math.pi):
                stable, tag = _linearized_tag(params, k, kap, rho1_star)
                results.append(ReducedEquilibrium(
                    kappa1=float(wrap_angle(kap)), rho1=rho1_star,
                    stable=stable, tag=tag, method="linearization"))
            return results
        first_stable = sign < 0.0
        for kap, stable in ((kpn, first_stable),
                            (kpn + math.pi, not first_stable)):
            results.append(ReducedEquilibrium(
                kappa1=float(wrap_angle(kap)), rho1=rho1_star,
                stable=stable, tag="stable" if stable else "unstable",
                method="a6-sign-test"))
        return results
    for kap in (kpn, kpn + math.pi):
        stable, tag = _linearized_tag(params, k, kap, rho1_star)
        results.append(ReducedEquilibrium(
            kappa1=float(wrap_angle(kap)), rho1=rho1_star, stable=stable,
            tag=tag, method="linearization"))
    return results


@dataclass(frozen=True)
class ReducedParams:
    """Derived angles for the A6 reduced-dynamics analysis."""

    gamma_kn: float
    alpha0_plus: float
    alpha0_minus: float


def reduced_params(params, k):
    alpha = params.common_alpha()
    alpha0 = params.common_alpha0()
    return ReducedParams(gamma_kn=(2.0 * k - params.n) / (4.0 * params.n),
                         alpha0_plus=0.5 * (alpha0 + alpha),
                         alpha0_minus=0.5 * (alpha0 - alpha))


@dataclass(frozen=True)
class RegionCheck:
    """Whether the angular strip Delta is positively invariant."""

    holds: bool
    value: float
    k: int
    kappa1_low: float
    kappa1_high: float

    def contains(self, kappa1, rho1):
        offset = wrap_angle(kappa1 - self.kappa1_low)
        return rho1 > 0.0 and 0.0 < offset < np.pi


def invariant_region_check(params, k):
    """Evaluate the invariance condition for the strip
    Delta = (k*pi/n, k*pi/n + pi) x (0, inf)."""
    require_analysis_assumptions(params)
    if not 1 <= k <= params.n - 1:
        raise UndefinedManifoldError(f"k = {k} outside 1..{params.n - 1}")
    _, lam, alpha, alpha0, kpn = _reduced_scalars(params, k)
    value = (1.0 - lam) * math.sin(kpn - alpha) + lam * math.cos(alpha0)
    return RegionCheck(holds=value <= 0.0, value=float(value), k=k,
                       kappa1_low=float(kpn), kappa1_high=float(kpn + math.pi))


def asymptote_prediction(params, k):
    """The limiting heading offset inside Delta (A6 gains required).

    Returns gamma*pi + alpha0_plus when the selector cosine is positive,
    the antipode when negative; a selector within 1e-9 of zero is
    inconclusive.
    """
    require_a6(params)
    region = invariant_region_check(params, k)
    if not region.holds:
        raise PreconditionError(
            "asymptote analysis applies only when the invariant-region "
            f"condition holds (value = {region.value:.6g} > 0)")
    rp = reduced_params(params, k)
    selector = math.cos(rp.gamma_kn * math.pi + rp.alpha0_minus)
    if abs(selector) < 1e-9:
        raise InconclusiveError(
            "asymptote selector cos(gamma*pi + alpha0^-) vanishes")
    limit = rp.gamma_kn * math.pi + rp.alpha0_plus
    if selector < 0.0:
        limit += math.pi
    return float(wrap_angle(limit))


@dataclass
class PureShapeTrajectory:
    """Sampled trajectory of the transformed dynamics with A5 guards."""

    t: np.ndarray
    states: np.ndarray          # (m, 2 + 5n) packed vectors
    n: int
    a5_flags: list = field(default_factory=list)

    def state_at(self, idx):
        return PureShapeState.from_vector(self.states[idx], self.n)

    @property
    def kappa1(self):
        return self.states[:, 0]

    @property
    def rho1(self):
        return self.states[:, 1]


def integrate_pure_shape(state0, params, T, dt=DEFAULT_DT, record_every=1):
    """RK4 trajectory of the full transformed dynamics.

    Angle blocks are re-wrapped each step; positivity of rho1 and the
    length ratios is enforced; samples where an A5 guard quantity falls
    within 1e-6 of zero are recorded in ``a5_flags`` (the sufficient
    conditions behind the manifold derivation degenerate there).
    """
    require_analysis_assumptions(params)
    n = state0.n
    n_steps = int(round(T / dt))
    mu, lam = params.mu, params.lam
    alpha, alpha0 = params.alpha[0], params.alpha0[0]

    def field(vec):
        if vec[1] <= EPS_COL:
            raise CollisionError("rho_1 at or below collocation floor",
                                 pair=(0, 1))
        return _rates_vector(vec, n, mu, lam, alpha, alpha0)

    vec = state0.copy().to_vector()
    times = [0.0]
    rows = [vec.copy()]
    flags = []
    for step in range(1, n_steps + 1):
        t = step * dt
        try:
            vec = rk4_step(field, vec, dt)
        except CollisionError as err:
            raise CollisionError(str(err), pair=err.pair, t=t) from None
        state = PureShapeState.from_vector(vec, n)
        state.kappa1 = float(wrap_angle(state.kappa1))
        state.kappa_t = wrap_angle(state.kappa_t)
        state.psi = wrap_angle(state.psi)
        state.phi_b = wrap_angle(state.phi_b)
        if (state.rho1 <= EPS_COL
                or np.any(state.rho_t * state.rho1 <= EPS_COL)
                or np.any(state.rho_tb * state.rho1 <= EPS_COL)):
            raise CollisionError("a range reached the collocation floor",
                                 t=t)
        guards = a5_guard_values(state)
        if min(guards) < A5_GUARD_TOL:
            flags.append((t, guards))
        vec = state.to_vector()
        if step % record_every == 0 or step == n_steps:
            times.append(t)
            rows.append(vec.copy())
    return PureShapeTrajectory(t=np.asarray(times), states=np.asarray(rows),
                               n=n, a5_flags=flags)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling grid for the reduced phase plane."""

    kappa_min: float
    kappa_max: float
    kappa_samples: int
    rho_min: float
    rho_max: float
    rho_samples: int

    def __post_init__(self):
        if not (-np.pi < self.kappa_min < self.kappa_max <= np.pi):
            raise ValueError("kappa grid must lie inside (-pi, pi]")
        if not 0.0 < self.rho_min < self.rho_max:
            raise ValueError("rho grid must satisfy 0 < rho_min < rho_max")
        if self.kappa_samples < 2 or self.rho_samples < 2:
            raise ValueError("need at least 2 samples per axis")


@dataclass
class PhasePortrait:
    """Sampled vector field plus integrated seed trajectories."""

    kappa_grid: np.ndarray
    rho_grid: np.ndarray
    d_kappa: np.ndarray
    d_rho: np.ndarray
    trajectories: list  # (t, kappa1, rho1) triples


def phase_portrait(params, k, grid, seeds=(), T=50.0, dt=1e-2):
    """Sample the reduced vector field on a grid and integrate seeds.

    Deterministic: grid order is row-major in (kappa, rho) and seed
    trajectories keep their input order.
    """
    require_analysis_assumptions(params)
    mu, lam, alpha, alpha0, kpn = _reduced_scalars(params, k)
    kappas = np.linspace(grid.kappa_min, grid.kappa_max, grid.kappa_samples)
    rhos = np.linspace(grid.rho_min, grid.rho_max, grid.rho_samples)
    kk, rr = np.meshgrid(kappas, rhos, indexing="ij")
    d_kappa = (-mu * ((1.0 - lam) * np.sin(kk - alpha)
                      + lam * np.cos(kk - kpn - alpha0))
               + 2.0 * lam / rr * np.cos(kk - kpn) * np.sin(kpn))
    d_rho = 2.0 * np.sin(kk - kpn) * np.sin(kpn) * np.ones_like(rr)
    trajectories = [integrate_reduced(ka, rh, params, k, T, dt)
                    for ka, rh in seeds]
    return PhasePortrait(kappa_grid=kk, rho_grid=rr, d_kappa=d_kappa,
                         d_rho=d_rho, trajectories=trajectories)


def write_portrait_csv(portrait, grid_path):
    """Grid CSV: kappa1, rho1, kappa1_rate, rho1_rate."""
    with open(grid_path, "w", encoding="utf-8") as fh:
        fh.write("# reduced-dynamics vector field samples\n")
        fh.write("kappa1,rho1,dkappa1,drho1\n")
        flat = zip(portrait.kappa_grid.ravel(), portrait.rho_grid.ravel(),
                   portrait.d_kappa.ravel(), portrait.d_rho.ravel())
        for ka, rh, dk_, dr in flat:
            fh.write(f"{ka:.12g},{rh:.12g},{dk_:.12g},{dr:.12g}\n")


def write_portrait_trajectory_csv(t, kappa1, rho1, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# reduced-dynamics trajectory\n")
        fh.write("t,kappa1,rho1\n")
        for row in zip(t, kappa1, rho1):
            fh.write(",".join(format(v, ".12g") for v in row) + "\n")
