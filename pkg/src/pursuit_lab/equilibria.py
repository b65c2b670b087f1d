"""Closed-form enumeration of circling equilibria.

Every relative equilibrium of the closed-loop shape dynamics is a
circling orbit centered on the beacon.  Candidate equilibria are indexed
by a sign pattern sigma in {-1,+1}^n (which of the two bearing-offset
solutions each agent takes) and an integer winding m; the common offset
alpha* follows in closed form whenever 2M - n != 0, where M counts the
+1 entries.  A candidate survives iff two positivity conditions hold,
and then all shape values follow in closed form.  Both circling
directions are supported; the clockwise family is the sign-flipped image
of the counter-clockwise conditions.
"""

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateAlphaSumError, DegenerateBranchError,
                     EnumerationSizeError)
from .full_space import WorldState, heading_from_angle
from .numerics import wrap_angle
from .params import require_shape_assumptions
from .shape_space import ShapeState

# sin(sum alpha_i) below this is treated as degenerate (Theorem-1 gate).
ALPHA_SUM_TOL = 1e-9
# Positivity screening: strict margin, and the band reported as marginal.
STRICT_MARGIN = 1e-12
MARGINAL_BAND = 1e-9
# Branch enumeration cap: 2**n candidates.
MAX_ENUM_AGENTS = 16


@dataclass(frozen=True)
class BranchAssignment:
    """A candidate branch: sign pattern sigma and winding number m."""

    sigma: tuple
    m: int

    @property
    def M(self):
        return sum(1 for s in self.sigma if s == 1)

    @property
    def n(self):
        return len(self.sigma)

    def bitstring(self):
        return "".join("+" if s == 1 else "-" for s in self.sigma)


def alpha_star(branch, params):
    """Common bearing offset kappa_i - alpha_i on a branch, wrapped.

    Undefined (DegenerateBranchError) when 2M - n = 0; those branches are
    handled by :func:`classify_degenerate`.
    """
    if not params.flags().a3_common_alpha0:
        from .errors import AssumptionError
        raise AssumptionError("A3 violated: alpha0 differs across agents")
    two_m_n = 2 * branch.M - branch.n
    if two_m_n == 0:
        raise DegenerateBranchError(
            "branch has 2M - n = 0; no isolated alpha*")
    m, M, n = branch.m, branch.M, branch.n
    value = ((m + M - n) * np.pi - params.alpha_sum()) / two_m_n
    return float(wrap_angle(value))


@dataclass
class CirclingEquilibrium:
    """A circling equilibrium and its closed-form shape values.

    ``direction`` is +1 for counter-clockwise (kappa_ib = +pi/2) and -1
    for clockwise (kappa_ib = -pi/2).  ``margins`` holds the screening
    condition values (radius positivity first, then the n chord
    positivity values); all are strictly positive on an accepted branch.
    """

    branch: BranchAssignment
    alpha_star: float
    direction: int
    kappa: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    rho_b: float
    margins: np.ndarray
    marginal: bool = False

    @property
    def kappa_b(self):
        return self.direction * np.pi / 2.0

    @property
    def n(self):
        return self.kappa.shape[0]


class DegenerateClass(enum.Enum):
    """Classification of the 2M - n = 0 branches for even n."""

    CONTINUUM = "continuum"
    NO_BRANCH_EQUILIBRIA = "no-branch-equilibria"
    NOT_APPLICABLE = "not-applicable"


def classify_degenerate(params):
    """Classify the degenerate (2M - n = 0) branches.

    For even n these branches admit a continuum of relative equilibria
    exactly when the alpha_i sum to an integer multiple of pi; for odd n
    the case cannot occur.
    """
    if params.n % 2 == 1:
        return DegenerateClass.NOT_APPLICABLE
    total = params.alpha_sum()
    nearest = np.round(total / np.pi) * np.pi
    if abs(total - nearest) < ALPHA_SUM_TOL:
        return DegenerateClass.CONTINUUM
    return DegenerateClass.NO_BRANCH_EQUILIBRIA


def _build_equilibrium(branch, a_star, direction, params, margins, marginal):
    sigma = np.asarray(branch.sigma, dtype=float)
    kappa = wrap_angle((1.0 - sigma) * (np.pi / 2.0)
                       + sigma * a_star + params.alpha)
    theta = wrap_angle(np.pi - np.roll(kappa, 1))
    c1 = margins[0]
    rho_b = params.lam / (params.mu * c1)
    rho = 2.0 * rho_b * margins[1:]
    return CirclingEquilibrium(branch=branch, alpha_star=a_star,
                               direction=direction, kappa=kappa, theta=theta,
                               rho=rho, rho_b=float(rho_b),
                               margins=np.asarray(margins),
                               marginal=marginal)


def enumerate_equilibria(params, direction=1, include_marginal=False):
    """All circling equilibria for one circling direction.

    Iterates every sign pattern with 2M - n != 0 and every winding in
    0..2n-1 (wrapped alpha* values repeat beyond that window and are
    deduplicated).  Candidates whose screening conditions clear the
    strict margin are returned; candidates inside the marginal band are
    flagged and only returned when ``include_marginal`` is set.

    Raises DegenerateAlphaSumError when sin(sum alpha_i) vanishes: the
    closed-form characterization does not cover that case (see
    classify_degenerate for the even-n degenerate branches; the remaining
    branches are unclassified).
    """
    require_shape_assumptions(params)
    if direction not in (1, -1):
        raise ValueError("direction must be +1 (ccw) or -1 (cw)")
    n = params.n
    if n > MAX_ENUM_AGENTS:
        raise EnumerationSizeError(
            f"branch enumeration needs 2**{n} sign patterns; cap is "
            f"2**{MAX_ENUM_AGENTS}")
    if abs(np.sin(params.alpha_sum())) <= ALPHA_SUM_TOL:
        raise DegenerateAlphaSumError(
            "sin(sum alpha_i) = 0: branch enumeration is unclassified; "
            "see classify_degenerate for the 2M - n = 0 branches")

    alpha0 = params.alpha0[0]
    found = []
    for sigma in itertools.product((-1, 1), repeat=n):
        branch_m = [BranchAssignment(sigma=sigma, m=m) for m in range(2 * n)]
        if 2 * branch_m[0].M - n == 0:
            continue
        seen = []
        for branch in branch_m:
            a_star = alpha_star(branch, params)
            if any(abs(wrap_angle(a_star - prev)) < 1e-12 for prev in seen):
                continue
            seen.append(a_star)
            c1 = (params.lam * np.cos(alpha0)
                  + (1.0 - params.lam) * direction * np.sin(a_star))
            c2 = direction * np.sin(a_star + np.asarray(sigma) * params.alpha)
            margins = np.concatenate([[c1], c2])
            marginal = bool(np.min(np.abs(margins)) < MARGINAL_BAND)
            accepted = bool(np.all(margins > STRICT_MARGIN)) and not marginal
            if accepted or (marginal and include_marginal
                            and np.all(margins > 0.0)):
                found.append(_build_equilibrium(branch, a_star, direction,
                                                params, margins, marginal))
    return found


def equilibrium_shape(eq, params):
    """Full 5n shape state of a circling equilibrium."""
    n = eq.n
    return ShapeState(rho=eq.rho.copy(), kappa=eq.kappa.copy(),
                      theta=eq.theta.copy(),
                      rho_b=np.full(n, eq.rho_b),
                      kappa_b=np.full(n, eq.kappa_b))


def embed_world(eq, beacon=(0.0, 0.0), base_angle=0.0):
    """A world state realizing the equilibrium geometry.

    Agents sit on the circle of radius rho_b around the beacon; the
    position angle advances by 2*kappa_i from agent i to agent i+1 (the
    chord subtending kappa geometry), and headings are chosen so the
    extracted shape reproduces the equilibrium.  Any rigid motion of this
    embedding is equivalent; agent 1 is pinned at ``base_angle``.
    """
    beacon = np.asarray(beacon, dtype=float)
    n = eq.n
    beta = base_angle + np.concatenate([[0.0],
                                        np.cumsum(2.0 * eq.kappa[:-1])])
    positions = beacon + eq.rho_b * heading_from_angle(beta)
    heading_angles = beta + np.pi - eq.kappa_b
    return WorldState(positions=positions,
                      headings=heading_from_angle(heading_angles),
                      beacon=beacon)


def common_curvature(eq):
    """The common turning rate gamma = 2 sin(kappa_i)/rho_i of the orbit."""
    return 2.0 * np.sin(eq.kappa) / eq.rho


def format_equilibrium_report(equilibria, params, direction_label=None):
    """Human-readable report, one record per equilibrium."""
    lines = []
    lines.append(f"circling equilibria: {len(equilibria)} found")
    lines.append(f"n = {params.n}, mu = {params.mu:.12g}, "
                 f"lambda = {params.lam:.12g}, "
                 f"alpha0 = {params.alpha0[0]:.12g} rad")
    if direction_label:
        lines.append(f"direction: {direction_label}")
    for idx, eq in enumerate(equilibria, start=1):
        lines.append("")
        lines.append(f"equilibrium {idx}"
                     + (" [MARGINAL]" if eq.marginal else ""))
        lines.append(f"  sigma = {eq.branch.bitstring()}  m = {eq.branch.m}  "
                     f"direction = {'ccw' if eq.direction == 1 else 'cw'}")
        lines.append(f"  alpha* = {eq.alpha_star:.12g} rad "
                     f"({eq.alpha_star / np.pi:.6f} pi)")
        lines.append("  kappa  = ["
                     + ", ".join(f"{v:.12g}" for v in eq.kappa)
                     + "] rad = ["
                     + ", ".join(f"{v / np.pi:.6f}" for v in eq.kappa)
                     + "] pi")
        lines.append("  rho    = ["
                     + ", ".join(f"{v:.12g}" for v in eq.rho) + "]")
        lines.append(f"  rho_b  = {eq.rho_b:.12g}")
        lines.append("  margins = ["
                     + ", ".join(f"{v:.6g}" for v in eq.margins) + "]")
    return "\n".join(lines) + "\n"
