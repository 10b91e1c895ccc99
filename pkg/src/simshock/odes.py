r"""Self-similar reductions of u*u_tt - (u_t)^2 = u*u_x*u_t.

Separable solutions concentrate into two one-parameter families indexed by
the similarity exponent alpha < 1, with beta = 1 - alpha:

* approaching the critical time (t < 0):
      u(x, t) = (-t)^(-alpha) * f(y),   y = x / (-t)^beta,
  and f satisfies

      beta^2 y^2 f f'' = beta y (f')^2 (beta y + f)
                         + beta (alpha - 2) y f f' + alpha f^2 (f' - 1);

* past it (t > 0):
      u(x, t) = t^(-alpha) * F(y),      y = x / t^beta,
  and F satisfies the sign-adjusted form

      beta^2 y^2 F F'' = beta y (F')^2 (beta y - F)
                         + beta (alpha - 2) y F F' + alpha F^2 (-F' - 1).

At alpha = 0 these collapse to the travelling-profile equations

      y f f'' = (f')^2 (y + f) - 2 f f'        (shock)
      y F F'' = (F')^2 (y - F) - 2 F F'        (rarefaction)

and F = -f maps solutions of one onto the other (the same reflection maps
the alpha-family onto the post-critical family).

Each family has a singular point at y = 0 and admits a one-parameter bundle
of local solutions there; the series helpers below produce launch states a
small offset away from the singular points so the adaptive integrator never
starts on one.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "KIND_ALGEBRAIC_TAIL",
    "KIND_FARFIELD",
    "KIND_FLAT",
    "KIND_ORIGIN",
    "KIND_SHOCK_POINT",
    "ExpansionCoeffs",
    "SimilarityParams",
    "exponents",
    "farfield_series",
    "flat_series",
    "origin_series",
    "rescale",
    "rhs_blowup",
    "rhs_blowup_dev",
    "rhs_global",
    "rhs_rarefaction",
    "rhs_shock",
    "rhs_shock_dev",
    "shock_series",
]


def exponents(alpha):
    """Both roots of (1-alpha)^2 m^2 - (2 alpha^2 - 4 alpha + 3) m + (1-alpha)^2 = 0.

    These are the exponents of the linearized correction around f0(y) = y at
    the origin.  Returns (m_minus, m_plus) with m_minus * m_plus = 1 and
    m_plus > 1 for every alpha < 1.  The discriminant simplifies exactly to
    4*(1-alpha)^2 + 1, so both roots are real and the smaller one is formed
    without subtractive cancellation.
    """
    if alpha >= 1.0:
        raise ValueError("exponents defined for alpha < 1")
    q = (1.0 - alpha) ** 2
    s = 2.0 * q + 1.0  # equals 2*alpha^2 - 4*alpha + 3
    r = math.sqrt(4.0 * q + 1.0)
    m_plus = (s + r) / (2.0 * q)
    m_minus = 2.0 * q / (s + r)
    return m_minus, m_plus


@dataclass(frozen=True)
class SimilarityParams:
    """Similarity exponents for one family member: alpha < 1, beta = 1 - alpha,
    plus the origin-bundle exponents m_minus < 1 < m_plus."""

    alpha: float
    beta: float
    m_minus: float
    m_plus: float

    @classmethod
    def from_alpha(cls, alpha):
        alpha = float(alpha)
        if alpha >= 1.0:
            raise ValueError("similarity family requires alpha < 1")
        m_minus, m_plus = exponents(alpha)
        return cls(alpha=alpha, beta=1.0 - alpha, m_minus=m_minus, m_plus=m_plus)

    @property
    def tail_exponent(self):
        """Power of the algebraic far tail, -alpha/(1-alpha): negative decay
        for alpha in (0,1), positive growth |alpha|/(1+|alpha|) for alpha < 0."""
        return -self.alpha / self.beta


KIND_ORIGIN = "OriginBundle"
KIND_FARFIELD = "FarFieldEquilibrium"
KIND_SHOCK_POINT = "ShockPoint"
KIND_FLAT = "FlatInterface"
KIND_ALGEBRAIC_TAIL = "AlgebraicTail"


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Provenance of a launch: which local expansion produced it and with
    what free coefficient (A, B, F0, a_flat or C0 depending on kind)."""

    kind: str
    value: float
    params: SimilarityParams


# --------------------------------------------------------- right-hand sides


def rhs_shock(y, f, fp):
    """f'' for the travelling shock profile, y f f'' = (f')^2 (y+f) - 2 f f'."""
    return (fp * fp * (y + f) - 2.0 * f * fp) / (y * f)


def rhs_rarefaction(y, f, fp):
    """F'' for the rarefaction profile, y F F'' = (F')^2 (y-F) - 2 F F'."""
    return (fp * fp * (y - f) - 2.0 * f * fp) / (y * f)


def rhs_blowup(alpha, y, f, fp):
    """f'' for the pre-critical family at exponent alpha (reduces to
    rhs_shock at alpha = 0)."""
    beta = 1.0 - alpha
    num = (
        beta * y * fp * fp * (beta * y + f)
        + beta * (alpha - 2.0) * y * f * fp
        + alpha * f * f * (fp - 1.0)
    )
    return num / (beta * beta * y * y * f)


def rhs_global(alpha, y, f, fp):
    """F'' for the post-critical family at exponent alpha (reduces to
    rhs_rarefaction at alpha = 0)."""
    beta = 1.0 - alpha
    num = (
        beta * y * fp * fp * (beta * y - f)
        + beta * (alpha - 2.0) * y * f * fp
        + alpha * f * f * (-fp - 1.0)
    )
    return num / (beta * beta * y * y * f)


def rhs_shock_dev(y, w, v):
    """rhs_shock in deviation coordinates w = f - y, v = f' - 1.

    Algebraically identical to rhs_shock(y, y + w, 1 + v), rearranged so
    every numerator term carries w or v.  The exact line f = y is then
    preserved to the last bit (no cancellation of O(y^2) terms), and
    launches whose correction sits far below machine precision relative
    to y remain representable as long as w itself does.
    """
    return (1.0 + v) * (2.0 * y * v - w * (1.0 - v)) / (y * (y + w))


def rhs_blowup_dev(alpha, y, w, v):
    """rhs_blowup in deviation coordinates w = f - y, v = f' - 1.

    Same rearrangement as rhs_shock_dev; reduces to it at alpha = 0.
    """
    beta = 1.0 - alpha
    num = (
        beta * (beta + 1.0) * y * y * v * (1.0 + v)
        - beta * beta * y * w
        + beta * y * v * w * (alpha + v)
        + alpha * (y + w) * (y + w) * v
    )
    return num / (beta * beta * y * y * (y + w))


# ------------------------------------------------------------ series launches


def origin_series(params, A, y):
    """Two-term origin expansion f = y + A |y|^(m_plus - 1) y, valid near the
    interior singular point; odd in y, so one formula covers both signs.

    Returns (f, fp); fp = 1 + A m_plus |y|^(m_plus - 1).
    """
    m = params.m_plus
    ya = np.abs(y)
    f = y + A * ya ** (m - 1.0) * y
    fp = 1.0 + A * m * ya ** (m - 1.0)
    return f, fp


def farfield_series(B, y):
    """Far-field expansion about the equilibrium 1: f = 1 + B/y, fp = -B/y^2.

    Used to launch from large negative y; valid for any y != 0.
    """
    y = np.asarray(y, dtype=float) if not np.isscalar(y) else y
    f = 1.0 + B / y
    fp = -B / (y * y)
    return f, fp


def shock_series(params, F0, y):
    """Quadratic expansion of the unique smooth post-critical branch through
    F(0) = F0 > 0 (alpha < 0): the slope at 0 is forced to -1 and the
    curvature to beta^2/(alpha F0), so

        F  = F0 - y + beta^2 y^2 / (2 alpha F0)
        F' = -1 + beta^2 y / (alpha F0).

    Any other slope at 0 makes the equation's right side blow up like 1/y^2.
    """
    if params.alpha >= 0.0:
        raise ValueError("shock-point expansion requires alpha < 0")
    if F0 <= 0.0:
        raise ValueError("shock-point expansion requires F0 > 0")
    b2aF = params.beta**2 / (params.alpha * F0)
    f = F0 - y + 0.5 * b2aF * y * y
    fp = -1.0 + b2aF * y
    return f, fp


def flat_series(a_flat, y):
    """Flat-interface decay toward y = 0^-: f = exp(-a/(-y)), all of whose
    derivatives vanish at 0.  Returns (f, fp) with fp = -(a/y^2) f < 0.
    Requires y < 0 and a_flat > 0.
    """
    if a_flat <= 0.0:
        raise ValueError("flat expansion requires a_flat > 0")
    if np.any(np.asarray(y) >= 0.0):
        raise ValueError("flat expansion lives on y < 0")
    f = np.exp(-a_flat / (-y))
    fp = -(a_flat / (y * y)) * f
    return f, fp


# ----------------------------------------------------------------- rescale


def rescale(profile, a):
    """Apply the scaling symmetry f_a(y) = a f(y/a) to a stored profile.

    Grid and values scale by a, the derivative is unchanged.  A fitted tail
    C y^p transforms to (C a^(1-p)) y^p.  For a > 0 the attached dense
    trajectory is transformed along; for a < 0 the grid orientation flips,
    the arrays are reversed to keep the grid ascending, and the trajectory
    is dropped.
    """
    a = float(a)
    if a == 0.0:
        raise ValueError("rescale requires a != 0")
    grid = a * profile.grid
    f = a * profile.f
    fp = profile.fp.copy()
    tail = profile.tail
    if tail is not None:
        tail = replace(
            tail, amplitude=tail.amplitude * a ** (1.0 - tail.exponent),
            window=(a * tail.window[0], a * tail.window[1]),
        )
    traj = profile.trajectory
    if a < 0.0:
        order = np.argsort(grid)
        grid, f, fp = grid[order], f[order], fp[order]
        traj = None
        if tail is not None:
            tail = replace(tail, window=(tail.window[1], tail.window[0]))
    elif traj is not None:
        scaled_events = [
            replace(ev, t=a * ev.t, state=np.array([a * ev.state[0], ev.state[1]]))
            for ev in traj.events
        ]
        traj = replace(
            traj,
            t=a * traj.t,
            y=np.column_stack([a * traj.y[:, 0], traj.y[:, 1]]),
            events=scaled_events,
            _seg_t0=a * traj._seg_t0,
            _seg_h=a * traj._seg_h,
            _seg_y0=np.column_stack([a * traj._seg_y0[:, 0], traj._seg_y0[:, 1]]),
            _seg_q=np.stack([traj._seg_q[:, 0, :], traj._seg_q[:, 1, :] / a], axis=1),
        )
    return replace(profile, grid=grid, f=f, fp=fp, tail=tail, trajectory=traj)
