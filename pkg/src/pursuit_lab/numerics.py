"""Shared numerical kernels.

Fixed-step RK4 integration, angle normalization, polynomial root finding
(Aberth-Ehrlich simultaneous iteration) and eigenvalues of 5x5 complex
matrices via the characteristic polynomial.  All functions are pure.

Conventions used package-wide:

* state vectors are 1-D float arrays of fixed length;
* polynomials are 1-D complex coefficient arrays, highest degree first,
  with a nonzero leading coefficient;
* angles are stored wrapped to (-pi, pi] and compared circularly.
"""

import numpy as np

from .errors import IntegrationError, NumericError

# Default fixed step for all integrations (deterministic, reproducible).
DEFAULT_DT = 1e-3
# Circular tolerance for angle equality.
ANGLE_TOL = 1e-9


def wrap_angle(theta):
    """Wrap an angle (scalar or array) to the interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - theta, 2.0 * np.pi)


def angle_distance(a, b):
    """Circular distance |a - b| mod 2*pi, in [0, pi]."""
    return np.abs(wrap_angle(np.asarray(a) - np.asarray(b)))


def _check_finite(k, stage):
    if not np.all(np.isfinite(k)):
        bad = int(np.argmin(np.isfinite(k)))
        raise IntegrationError(
            f"non-finite derivative entry at index {bad} (RK4 stage {stage})"
        )


def rk4_step(field, state, dt):
    """Advance ``state`` by one classical 4th-order Runge-Kutta step.

    Parameters
    ----------
    field : callable
        Maps a state vector to its time derivative (autonomous system).
    state : ndarray
        Current state.
    dt : float
        Step size, > 0.

    Returns
    -------
    ndarray
        The state after one step.  Deterministic for fixed inputs.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    k1 = np.asarray(field(state), dtype=float)
    _check_finite(k1, 1)
    k2 = np.asarray(field(state + (0.5 * dt) * k1), dtype=float)
    _check_finite(k2, 2)
    k3 = np.asarray(field(state + (0.5 * dt) * k2), dtype=float)
    _check_finite(k3, 3)
    k4 = np.asarray(field(state + dt * k3), dtype=float)
    _check_finite(k4, 4)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _horner(coeffs, z):
    v = np.full_like(z, coeffs[0])
    for c in coeffs[1:]:
        v = v * z + c
    return v


def _derivative_coeffs(coeffs):
    deg = coeffs.size - 1
    return coeffs[:-1] * np.arange(deg, 0, -1)


def _polish_clusters(coeffs, roots, scale):
    """Collapse root clusters onto polished multiple roots.

    The simultaneous iteration is only linearly convergent at a root of
    multiplicity c, stalling on a small star around it.  A c-fold root is
    a simple (well-conditioned) root of the (c-1)-th derivative, so each
    cluster centroid is Newton-polished there; the collapse is kept only
    when the full polynomial residual confirms a genuine multiple root
    (close-but-distinct roots fail that check and are left alone).
    """
    n = roots.size
    # generous radius: the stall star of a degree-5 quintuple root reaches
    # ~3e-3; false merges are rejected by the residual check below
    tol = 1e-2 * (1.0 + np.max(np.abs(roots)))
    used = np.zeros(n, dtype=bool)
    out = roots.copy()
    for i in range(n):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        queue = [i]
        while queue:
            a = queue.pop()
            for j in range(n):
                if not used[j] and abs(out[a] - out[j]) < tol:
                    used[j] = True
                    group.append(j)
                    queue.append(j)
        c = len(group)
        if c < 2:
            continue
        dc = coeffs
        for _ in range(c - 1):
            dc = _derivative_coeffs(dc)
        d1 = _derivative_coeffs(dc)
        z = out[group].mean()
        for _ in range(60):
            dv = _horner(d1, np.array([z]))[0]
            if dv == 0:
                break
            step = _horner(dc, np.array([z]))[0] / dv
            z = z - step
            if abs(step) <= 1e-15 * (1.0 + abs(z)):
                break
        if abs(_horner(coeffs, np.array([z]))[0]) <= 1e-12 * scale:
            out[group] = z
    return out


def poly_roots(coeffs, max_iter=500, step_tol=1e-14):
    """All complex roots (with multiplicity) of a polynomial.

    Aberth-Ehrlich simultaneous iteration; initial estimates sit on a
    circle inside the Cauchy root bound with an angular offset that breaks
    symmetric stalling.  Root clusters left by multiple roots are
    collapsed onto a polished multiple root afterwards.

    Parameters
    ----------
    coeffs : array_like
        Complex coefficients, highest degree first; leading entry nonzero.

    Returns
    -------
    ndarray
        ``degree`` complex roots, residuals below
        ``1e-9 * (1 + max |coefficient|)``.

    Raises
    ------
    NumericError
        If the iteration has not converged after ``max_iter`` sweeps.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.ndim != 1 or c.size < 2:
        raise ValueError("polynomial degree must be at least 1")
    if c[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    scale = 1.0 + float(np.max(np.abs(c)))
    c = c / c[0]

    # Exact zero roots deflate immediately (keeps multiple roots at the
    # origin from slowing the simultaneous iteration).
    zero_roots = 0
    while c.size > 1 and c[-1] == 0:
        zero_roots += 1
        c = c[:-1]
    n = c.size - 1
    if n == 0:
        return np.zeros(zero_roots, dtype=complex)
    if n == 1:
        return np.concatenate([[-c[1]], np.zeros(zero_roots, dtype=complex)])

    dc = c[:-1] * np.arange(n, 0, -1)
    radius = 1.0 + float(np.max(np.abs(c[1:])))
    angles = 2.0 * np.pi * (np.arange(n) + 0.25) / n + 0.4
    z = radius * np.exp(1j * angles)

    residual_tol = 1e-13 * scale
    for _ in range(max_iter):
        pv = _horner(c, z)
        if np.max(np.abs(pv)) <= residual_tol:
            break
        dv = _horner(dc, z)
        dv = np.where(dv == 0, 1e-300, dv)
        w = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = (1.0 / diff).sum(axis=1)
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
        delta = w / denom
        z = z - delta
        if np.max(np.abs(delta)) <= step_tol * (1.0 + np.max(np.abs(z))):
            break
    else:
        raise NumericError(
            f"polynomial root iteration did not converge in {max_iter} sweeps"
        )
    roots = np.concatenate([z, np.zeros(zero_roots, dtype=complex)])
    full = np.concatenate([c, np.zeros(zero_roots, dtype=complex)])
    return _polish_clusters(full, roots, 1.0 + float(np.max(np.abs(full))))


def characteristic_polynomial(matrix):
    """Characteristic polynomial of a square complex matrix.

    Faddeev-LeVerrier recurrence; exact in exact arithmetic, no
    eigendecomposition involved.  Coefficients highest degree first,
    monic.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    k = a.shape[0]
    coeffs = np.empty(k + 1, dtype=complex)
    coeffs[0] = 1.0
    mk = np.zeros_like(a)
    eye = np.eye(k)
    for j in range(1, k + 1):
        mk = a @ (mk + coeffs[j - 1] * eye)
        coeffs[j] = -np.trace(mk) / j
    return coeffs


def eig5(matrix):
    """The 5 eigenvalues of a 5x5 complex matrix.

    Computed as the roots of the characteristic polynomial with the
    Aberth-Ehrlich solver; backward error at working precision for the
    well-conditioned fixed-size blocks this package produces.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.shape != (5, 5):
        raise ValueError("eig5 expects a 5x5 matrix")
    if not np.all(np.isfinite(a.view(float))):
        raise NumericError("matrix has non-finite entries")
    return poly_roots(characteristic_polynomial(a))
