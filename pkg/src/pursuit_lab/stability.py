"""Local stability analysis of the counter-clockwise leftmost-branch
circling equilibrium under assumptions A1-A4.

The linearized shape dynamics couple each agent only to its cyclic
neighbors, so the 5n x 5n Jacobian is block circulant in the three 5x5
blocks (A0, A1, A-1) and its spectrum decomposes over the n-th roots of
unity into 5x5 mode blocks D_k.  Each mode's characteristic polynomial
factors into a constraint pair (x^2 + mu^2 a^2) and a complex cubic; a
Routh-type test on the cubic coefficients gives necessary conditions for
stability, mode by mode.  The gain mu only scales the spectrum, so the
verdict is mu-independent.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EquilibriumNotFoundError, SingularModeError
from .numerics import eig5, wrap_angle
from .params import require_analysis_assumptions

# Zero threshold for sin(m*pi/n) (mode geometry degenerates there).
_SING_TOL = 1e-12
# Imaginary-axis band for grouping eigenvalues.
IMAG_AXIS_TOL = 1e-6
# Eigenvalues this close to a constraint target count as matched.
_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class ABDCoefficients:
    """The three scalars that generate every linearization quantity."""

    a: float
    b: float
    d: float
    alpha_star: float
    m: int


@dataclass(frozen=True)
class QCoefficients:
    """Entries of the linearization blocks (q4 = -mu^2 a^2 identically)."""

    q1: float
    q2: float
    q3: float
    q4: float
    q5: float


@dataclass(frozen=True)
class BlockTriple:
    """Self, next-neighbor and previous-neighbor coupling blocks."""

    A0: np.ndarray
    A1: np.ndarray
    Am1: np.ndarray


@dataclass(frozen=True)
class CubicCoefficients:
    """Real/imaginary coefficient pairs of the mode-k cubic factor.

    The `_t` members are the real (tilde) parts and the `_h` members the
    imaginary (hat) parts; at k = 0 every hat entry and e_t vanish.
    """

    c_t: float
    c_h: float
    d_t: float
    d_h: float
    e_t: float
    e_h: float
    k: int

    def polynomial(self, mu, a):
        """Monic cubic factor, highest degree first."""
        return np.array([
            1.0,
            mu * (self.c_t - 1j * self.c_h),
            mu ** 2 * a * (self.d_t + 1j * self.d_h),
            mu ** 3 * a ** 2 * (self.e_t - 1j * self.e_h),
        ], dtype=complex)


def abd(params, m):
    """Closed-form a, b, d coefficients at the leftmost-branch equilibrium.

    Requires A1-A4.  Raises SingularModeError when sin(m*pi/n) = 0 and
    EquilibriumNotFoundError when no counter-clockwise equilibrium exists
    at this winding (a <= 0, or a chord with non-positive length).
    """
    require_analysis_assumptions(params)
    n = params.n
    alpha = params.common_alpha()
    alpha0 = params.common_alpha0()
    angle = m * np.pi / n
    sin_m = np.sin(angle)
    if abs(sin_m) < _SING_TOL:
        raise SingularModeError(f"sin({m}*pi/{n}) = 0: mode geometry "
                                "is singular")
    if sin_m < 0.0:
        raise EquilibriumNotFoundError(
            f"winding m = {m} gives sin(m*pi/n) < 0: chord length would "
            "be non-positive on the counter-clockwise branch")
    a_star = float(wrap_angle(angle - alpha))
    a = np.cos(alpha0) + (1.0 / params.lam - 1.0) * np.sin(a_star)
    if a <= 0.0:
        raise EquilibriumNotFoundError(
            f"a = {a:.6g} <= 0: no circling equilibrium at winding m = {m}")
    b = params.lam * np.sin(alpha0) + (1.0 - params.lam) * np.cos(a_star)
    d = a + (1.0 - params.lam) * np.cos(a_star) / np.tan(angle)
    return ABDCoefficients(a=float(a), b=float(b), d=float(d),
                           alpha_star=a_star, m=m)


def block_triple(params, m):
    """The three 5x5 linearization blocks and their q coefficients.

    State order inside each agent block: (rho, kappa, theta, rho_b,
    kappa_b).  A1 couples to the next agent solely through its theta
    column; A-1 couples to the previous agent solely through the theta
    row.
    """
    co = abd(params, m)
    lam = params.lam
    mu = params.mu
    angle = m * np.pi / params.n
    sin_m = np.sin(angle)
    q1 = 0.5 * mu ** 2 * co.a ** 2 / sin_m
    q2 = 0.5 * mu * co.a / np.tan(angle)
    q3 = mu * (1.0 - lam) * np.cos(co.alpha_star)
    q4 = -2.0 * q1 * sin_m
    q5 = -mu * lam * np.sin(params.common_alpha0())
    q = QCoefficients(q1=float(q1), q2=float(q2), q3=float(q3),
                      q4=float(q4), q5=float(q5))

    a0 = np.array([
        [0.0, sin_m, 0.0, 0.0, 0.0],
        [-lam * q1, lam * q2 - q3, 0.0, 0.0, q5],
        [(1 - lam) * q1, -(1 - lam) * q2 - q3, -q2, 0.0, q5],
        [0.0, 0.0, 0.0, 0.0, 1.0],
        [(1 - lam) * q1, -(1 - lam) * q2 - q3, 0.0, q4, q5],
    ])
    a1 = np.zeros((5, 5))
    a1[:, 2] = [sin_m, -lam * q2, (1 - lam) * q2, 0.0, (1 - lam) * q2]
    am1 = np.zeros((5, 5))
    am1[2, :] = [-q1, q2, 0.0, 0.0, 0.0]
    return BlockTriple(A0=a0, A1=a1, Am1=am1), q


def dk(blocks, k, n):
    """Mode block D_k = A0 + w^k A1 + w^-k A-1, w = exp(2 pi j / n)."""
    if not 0 <= k < n:
        raise ValueError("mode index k must satisfy 0 <= k < n")
    w = np.exp(2j * np.pi * k / n)
    return blocks.A0.astype(complex) + w * blocks.A1 + np.conj(w) * blocks.Am1


def assemble_block_circulant(blocks, n):
    """The explicit 5n x 5n block-circulant Jacobian circ(A0, A1, 0, ...,
    A-1): row block i carries A0 on the diagonal, A1 at block i+1 and
    A-1 at block i-1 (indices mod n)."""
    big = np.zeros((5 * n, 5 * n))
    for i in range(n):
        big[5 * i:5 * i + 5, 5 * i:5 * i + 5] = blocks.A0
        j = (i + 1) % n
        big[5 * i:5 * i + 5, 5 * j:5 * j + 5] = blocks.A1
        j = (i - 1) % n
        big[5 * i:5 * i + 5, 5 * j:5 * j + 5] = blocks.Am1
    return big


def char_poly(params, m, k):
    """Coefficients (degree 5, highest first) of the mode-k
    characteristic polynomial, in closed form."""
    co = abd(params, m)
    lam = params.lam
    mu = params.mu
    a, b, d = co.a, co.b, co.d
    n = params.n
    cot_m = 1.0 / np.tan(m * np.pi / n)
    w = np.exp(2j * np.pi * k / n)
    one_minus = 1.0 - w
    one_plus = 1.0 + w
    cos_star = np.cos(co.alpha_star)
    c5 = 1.0
    c4 = mu * (b + 0.5 * a * (1.0 - lam) * one_minus * cot_m)
    c3 = 0.5 * mu ** 2 * a * (2.0 * a + one_minus * d + lam * a * one_plus)
    c2 = (0.5 * mu ** 3 * a ** 2 * (1.0 - lam) * one_minus
          * (cos_star + a * cot_m)
          + mu ** 3 * a ** 2 * b)
    c1 = 0.5 * mu ** 4 * a ** 3 * (one_minus * d + lam * a * one_plus)
    c0 = 0.5 * mu ** 5 * a ** 4 * one_minus * (1.0 - lam) * cos_star
    return np.array([c5, c4, c3, c2, c1, c0], dtype=complex)


def cubic_coeffs(params, m, k):
    """Coefficients of the mode-k cubic factor.

    The quintic splits as (x^2 + mu^2 a^2) times a complex cubic; the
    six coefficients below are trigonometric in k*pi/n and carry no mu.
    """
    co = abd(params, m)
    lam = params.lam
    n = params.n
    a, b, d = co.a, co.b, co.d
    cot_m = 1.0 / np.tan(m * np.pi / n)
    sk = np.sin(k * np.pi / n)
    ck = np.cos(k * np.pi / n)
    cos_star = np.cos(co.alpha_star)
    return CubicCoefficients(
        c_t=float(b + a * (1.0 - lam) * sk ** 2 * cot_m),
        c_h=float(a * (1.0 - lam) * sk * ck * cot_m),
        d_t=float(d * sk ** 2 + lam * a * ck ** 2),
        d_h=float((lam * a - d) * sk * ck),
        e_t=float((1.0 - lam) * cos_star * sk ** 2),
        e_h=float((1.0 - lam) * cos_star * sk * ck),
        k=k)


@dataclass(frozen=True)
class RouthConditionRow:
    """The three Routh-type condition values for one mode."""

    k: int
    values: tuple
    applicable: tuple
    passed: bool


@dataclass
class RouthVerdict:
    """Necessary-condition verdict, mode by mode.

    ``overall`` is the conjunction over all applicable conditions.  The
    third condition is identically zero at k = 0 (every hat coefficient
    vanishes there) and is treated as vacuous for that mode; conditions
    1-2 at k = 0 reduce to b > 0 given a > 0.
    """

    rows: list
    overall: bool
    notes: list = field(default_factory=list)


def routh_conditions(params, m, k):
    """The three Theorem-style condition values for mode k."""
    co = abd(params, m)
    cc = cubic_coeffs(params, m, k)
    a = co.a
    c_t, c_h, d_t, d_h, e_t, e_h = (cc.c_t, cc.c_h, cc.d_t, cc.d_h,
                                    cc.e_t, cc.e_h)
    cond1 = c_t
    cond2 = c_t * (c_t * d_t - a * e_t) - d_h * (c_t * c_h + a * d_h)
    gamma = c_t * (c_t * d_t - c_h * d_h) - a * (d_h * d_h + c_t * e_t)
    lam_k = c_t * (c_h * e_t - c_t * e_h) + a * d_h * e_t
    cond3 = gamma ** 2 * e_t + gamma * lam_k * d_h - lam_k ** 2 * c_t
    return float(cond1), float(cond2), float(cond3)


def routh_necessary(params, m):
    """Evaluate the necessary stability conditions for every mode."""
    rows = []
    notes = []
    for k in range(params.n):
        values = routh_conditions(params, m, k)
        applicable = (True, True, k != 0)
        passed = all(v > 0.0 for v, app in zip(values, applicable) if app)
        rows.append(RouthConditionRow(k=k, values=values,
                                      applicable=applicable, passed=passed))
        if k == 0:
            notes.append("k=0: third condition is identically zero "
                         "(vacuous); conditions 1-2 amount to b > 0")
    return RouthVerdict(rows=rows, overall=all(r.passed for r in rows),
                        notes=notes)


@dataclass
class CorollaryReport:
    """Quick-check specializations of the necessary conditions."""

    b_value: float
    b_positive: bool
    even_n: bool
    even_values: tuple = ()
    even_passed: bool = True

    @property
    def passed(self):
        return self.b_positive and self.even_passed


def corollary_checks(params, m):
    """The k = 0 shortcut (b > 0) and, for even n, the k = n/2 trio."""
    co = abd(params, m)
    report_even = params.n % 2 == 0
    even_values = ()
    even_passed = True
    if report_even:
        lam = params.lam
        cot_m = 1.0 / np.tan(m * np.pi / params.n)
        cos_star = np.cos(co.alpha_star)
        v1 = cos_star
        v2 = (lam * np.sin(params.common_alpha0())
              + (1.0 - lam) * (cos_star + co.a * cot_m))
        v3 = (co.b * co.d
              + co.a * (1.0 - lam) * (co.d * cot_m - cos_star))
        even_values = (float(v1), float(v2), float(v3))
        even_passed = all(v > 0.0 for v in even_values)
    return CorollaryReport(b_value=co.b, b_positive=co.b > 0.0,
                           even_n=report_even, even_values=even_values,
                           even_passed=even_passed)


@dataclass
class SpectrumReport:
    """Grouped eigenvalues of the linearization.

    The constraint group holds the n pairs +/- j*mu*a plus the k = 0
    zero root (2n + 1 in total, all on the imaginary axis within
    tolerance); the informative group holds the remaining 3n - 1
    eigenvalues, which decide stability.
    """

    by_mode: list
    constraint: np.ndarray
    informative: np.ndarray
    diagnostics: list
    mu_a: float

    @property
    def ok(self):
        return not self.diagnostics

    def max_informative_real(self):
        return float(np.max(self.informative.real))


def spectrum_report(params, m):
    """Full 5n spectrum from the mode blocks, partitioned into the
    constraint and informative groups."""
    blocks, _ = block_triple(params, m)
    co = abd(params, m)
    mu_a = params.mu * co.a
    n = params.n
    diagnostics = []
    constraint = []
    informative = []
    by_mode = []
    for k in range(n):
        eigs = eig5(dk(blocks, k, n))
        by_mode.append(eigs)
        targets = [1j * mu_a, -1j * mu_a]
        if k == 0:
            targets.append(0.0 + 0.0j)
        remaining = list(eigs)
        for target in targets:
            dist = [abs(z - target) for z in remaining]
            idx = int(np.argmin(dist))
            z = remaining.pop(idx)
            if dist[idx] > _MATCH_TOL * (1.0 + mu_a):
                diagnostics.append(
                    f"k={k}: nearest eigenvalue to constraint root "
                    f"{target:.6g} is {dist[idx]:.3e} away")
            if abs(z.real) >= IMAG_AXIS_TOL:
                diagnostics.append(
                    f"k={k}: constraint eigenvalue {z:.6g} is off the "
                    f"imaginary axis (|Re| >= {IMAG_AXIS_TOL:.0e})")
            constraint.append(z)
        for z in remaining:
            if abs(z.real) < IMAG_AXIS_TOL:
                diagnostics.append(
                    f"k={k}: informative eigenvalue {z:.6g} is within "
                    "the imaginary-axis band (borderline)")
            informative.append(z)
    constraint = np.asarray(constraint)
    informative = np.asarray(informative)
    if constraint.size != 2 * n + 1 or informative.size != 3 * n - 1:
        diagnostics.append(
            f"partition count mismatch: {constraint.size} constraint / "
            f"{informative.size} informative eigenvalues")
    return SpectrumReport(by_mode=by_mode, constraint=constraint,
                          informative=informative, diagnostics=diagnostics,
                          mu_a=float(mu_a))


def format_stability_report(params, m):
    """Per-mode report: cubic coefficients, condition values, cubic
    roots, the grouped spectrum and the overall verdict."""
    co = abd(params, m)
    verdict = routh_necessary(params, m)
    spectrum = spectrum_report(params, m)
    corollaries = corollary_checks(params, m)
    lines = []
    lines.append(f"stability analysis at winding m = {m} "
                 f"(counter-clockwise leftmost branch)")
    lines.append(f"n = {params.n}, mu = {params.mu:.12g}, "
                 f"lambda = {params.lam:.12g}")
    lines.append(f"alpha* = {co.alpha_star:.12g} rad "
                 f"({co.alpha_star / np.pi:.6f} pi), a = {co.a:.12g}, "
                 f"b = {co.b:.12g}, d = {co.d:.12g}")
    from .numerics import poly_roots
    for row, eigs in zip(verdict.rows, spectrum.by_mode):
        cc = cubic_coeffs(params, m, row.k)
        cubic_roots = np.sort_complex(
            poly_roots(cc.polynomial(params.mu, co.a)))
        lines.append("")
        lines.append(f"mode k = {row.k}: "
                     + ("PASS" if row.passed else "FAIL"))
        lines.append(f"  cubic: c~ = {cc.c_t:.12g}, c^ = {cc.c_h:.12g}, "
                     f"d~ = {cc.d_t:.12g}, d^ = {cc.d_h:.12g}, "
                     f"e~ = {cc.e_t:.12g}, e^ = {cc.e_h:.12g}")
        conds = ", ".join(
            (f"{v:.12g}" if app else f"{v:.12g} (vacuous)")
            for v, app in zip(row.values, row.applicable))
        lines.append(f"  conditions: {conds}")
        lines.append("  cubic roots: "
                     + ", ".join(f"{z.real:+.9f}{z.imag:+.9f}j"
                                 for z in cubic_roots))
        lines.append("  eigenvalues: "
                     + ", ".join(f"{z.real:+.9f}{z.imag:+.9f}j"
                                 for z in np.sort_complex(np.asarray(eigs))))
    lines.append("")
    lines.append(f"constraint group ({spectrum.constraint.size} on the "
                 "imaginary axis), informative group "
                 f"({spectrum.informative.size})")
    lines.append(f"max informative Re = "
                 f"{spectrum.max_informative_real():.12g}")
    lines.append(f"corollary b > 0: {corollaries.b_value:.12g} -> "
                 + ("pass" if corollaries.b_positive else "fail"))
    if corollaries.even_n:
        lines.append("even-n corollary values: "
                     + ", ".join(f"{v:.12g}" for v in corollaries.even_values)
                     + (" -> pass" if corollaries.even_passed else " -> fail"))
    for note in verdict.notes:
        lines.append(f"note: {note}")
    for diag in spectrum.diagnostics:
        lines.append(f"diagnostic: {diag}")
    lines.append(f"necessary conditions verdict: "
                 + ("PASS" if verdict.overall else "FAIL"))
    return "\n".join(lines) + "\n"


def write_spectrum_csv(params, m, path):
    """Spectrum CSV: one row per eigenvalue with its mode and group."""
    spectrum = spectrum_report(params, m)
    blocks, _ = block_triple(params, m)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# eigenvalues of the block-circulant linearization; "
                 "group is 'constraint' or 'informative'\n")
        fh.write("k,re,im,group\n")
        mu_a = spectrum.mu_a
        for k, eigs in enumerate(spectrum.by_mode):
            targets = [1j * mu_a, -1j * mu_a] + ([0j] if k == 0 else [])
            remaining = list(eigs)
            matched = []
            for target in targets:
                idx = int(np.argmin([abs(z - target) for z in remaining]))
                matched.append(remaining.pop(idx))
            for z in matched:
                fh.write(f"{k},{z.real:.12g},{z.imag:.12g},constraint\n")
            for z in remaining:
                fh.write(f"{k},{z.real:.12g},{z.imag:.12g},informative\n")
    return spectrum
