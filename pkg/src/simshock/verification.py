"""Independent checks on solved profiles.

Nothing in this module reuses the divided-out second derivative that drove
the integration; profile curvature is always re-measured, either from the
dense interpolant's own derivative or from finite differences of the stored
first derivative.  Residuals are evaluated in the multiplied-through form of
each family ODE (no division by the vanishing denominator) and scaled by
1 + |y|^3 + |f|^3 so far-field and near-origin samples are comparable.

The PDE check reconstructs u(x, t) from the similarity form and measures
u u_tt - (u_t)^2 - u u_x u_t with centered second-order differences, at two
step sizes, so the convergence order of the discretization error is visible.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import (
    CoverageGapError,
    MissingTailFitError,
    ZeroDenominatorError,
)
from .odes import rhs_blowup, rhs_global, rhs_rarefaction, rhs_shock
from .shooting import (
    FAMILY_BLOWUP,
    FAMILY_COMPACT,
    FAMILY_GLOBAL,
    FAMILY_RAREFACTION,
    FAMILY_SHOCK,
    reflect,
)

__all__ = [
    "CriticalPoint",
    "LogDivergenceReport",
    "ParabolicityReport",
    "PdeResidualReport",
    "ResidualReport",
    "final_profile",
    "log_divergence",
    "max_principle_scan",
    "ode_residual",
    "parabolicity",
    "pde_residual",
    "reflection_check",
]


@dataclass(frozen=True)
class ResidualReport:
    """Scaled residual norms over the sample set."""

    max_abs: float
    rms: float
    n: int
    worst_location: float


@dataclass(frozen=True)
class ParabolicityReport:
    """Minimum of the family's parabolicity functional over the grid."""

    min_value: float
    argmin: float
    ok: bool
    n: int


@dataclass(frozen=True)
class CriticalPoint:
    """Interior critical point: location, profile value, the re-measured
    second derivative, and the one the ODE implies at a critical point."""

    y: float
    value: float
    second_derivative: float
    ode_implied: float


@dataclass(frozen=True)
class PdeResidualReport:
    """PDE residual at steps h and h/2 with the implied convergence order."""

    h: float
    max_abs: float
    rms: float
    max_abs_half: float
    rms_half: float
    order: float
    order_max: float
    n: int


@dataclass(frozen=True)
class LogDivergenceReport:
    """I(Y) = -int_{-Y}^{Y} F'(y) y dy against ln Y, with its linear fit."""

    Y: np.ndarray
    I: np.ndarray
    slope: float
    intercept: float
    r_squared: float


# ---------------------------------------------------------------- residuals


def _implicit_residual(family, params, y, f, fp, fpp):
    """Multiplied-through family ODE evaluated on samples; zero on solutions."""
    if family in (FAMILY_SHOCK, FAMILY_COMPACT):
        return y * f * fpp - fp * fp * (y + f) + 2.0 * f * fp
    if family == FAMILY_RAREFACTION:
        return y * f * fpp - fp * fp * (y - f) + 2.0 * f * fp
    alpha, beta = params.alpha, params.beta
    b2 = beta * beta
    if family == FAMILY_BLOWUP:
        return (
            b2 * y * y * f * fpp
            - beta * y * fp * fp * (beta * y + f)
            - beta * (alpha - 2.0) * y * f * fp
            - alpha * f * f * (fp - 1.0)
        )
    if family == FAMILY_GLOBAL:
        return (
            b2 * y * y * f * fpp
            - beta * y * fp * fp * (beta * y - f)
            - beta * (alpha - 2.0) * y * f * fp
            - alpha * f * f * (-fp - 1.0)
        )
    raise ValueError(f"no residual form for family {family!r}")


def _samples(profile, fractions=(0.25, 0.5, 0.75)):
    """(y, f, fp, fpp) samples with independently measured curvature.

    With a trajectory attached, samples sit at interior fractions of every
    step (where the interpolant is not collocated with the right-hand side)
    and fpp is the interpolant derivative of the fp component.  Without one,
    the grid nodes themselves are used and fpp comes from second-order
    finite differences of fp, which limits the attainable residual.
    """
    traj = profile.trajectory
    if traj is not None:
        nodes = traj.t
        fr = np.asarray(fractions)
        ts = (nodes[:-1, None] + np.diff(nodes)[:, None] * fr[None, :]).ravel()
        states = traj.eval(ts)
        deriv = traj.derivative(ts, order=1)
        sign = profile.traj_sign
        return ts, sign * states[:, 0], sign * states[:, 1], sign * deriv[:, 1]
    y = profile.grid
    f = profile.f
    fp = profile.fp
    h_lo = y[1:-1] - y[:-2]
    h_hi = y[2:] - y[1:-1]
    fpp = (
        (fp[2:] - fp[1:-1]) * (h_lo / h_hi) + (fp[1:-1] - fp[:-2]) * (h_hi / h_lo)
    ) / (h_lo + h_hi)
    return y[1:-1], f[1:-1], fp[1:-1], fpp


def ode_residual(profile, fractions=(0.25, 0.5, 0.75)):
    """Scaled residual of the family ODE over independently measured samples.

    Returns a ResidualReport of |R| / (1 + |y|^3 + |f|^3).
    """
    y, f, fp, fpp = _samples(profile, fractions)
    r = _implicit_residual(profile.family, profile.params, y, f, fp, fpp)
    scaled = np.abs(r) / (1.0 + np.abs(y) ** 3 + np.abs(f) ** 3)
    i = int(np.argmax(scaled))
    return ResidualReport(
        max_abs=float(scaled[i]),
        rms=float(np.sqrt(np.mean(scaled**2))),
        n=int(scaled.size),
        worst_location=float(y[i]),
    )


def reflection_check(profile, fractions=(0.25, 0.5, 0.75)):
    """Residual of the mirrored profile -f under the partner family's ODE.

    The reflection maps each family's solutions onto its partner's exactly,
    so this should match ode_residual(profile) up to rounding.
    """
    mirrored = reflect(profile)
    y, f, fp, fpp = _samples(profile, fractions)
    r = _implicit_residual(mirrored.family, profile.params, y, -f, -fp, -fpp)
    scaled = np.abs(r) / (1.0 + np.abs(y) ** 3 + np.abs(f) ** 3)
    i = int(np.argmax(scaled))
    return ResidualReport(
        max_abs=float(scaled[i]),
        rms=float(np.sqrt(np.mean(scaled**2))),
        n=int(scaled.size),
        worst_location=float(y[i]),
    )


# ------------------------------------------------------------- parabolicity


def parabolicity(profile):
    """Minimum of the parabolicity functional u_t/u expressed through the
    profile: f' y / f for the travelling profiles, (alpha f + beta y f')/f
    on the pre-critical family, and its negative on the post-critical one
    (where the time factor flips sign).  Positive means the equation stays
    parabolic along the profile.

    Raises ZeroDenominatorError if the grid carries f = 0 nodes.
    """
    y = profile.grid
    f = profile.f
    fp = profile.fp
    if np.any(f == 0.0):
        raise ZeroDenominatorError("profile carries f = 0 nodes")
    if profile.family in (FAMILY_SHOCK, FAMILY_RAREFACTION, FAMILY_COMPACT):
        g = fp * y / f
    elif profile.family == FAMILY_BLOWUP:
        g = (profile.params.alpha * f + profile.params.beta * fp * y) / f
    elif profile.family == FAMILY_GLOBAL:
        g = -(profile.params.alpha * f + profile.params.beta * fp * y) / f
    else:
        raise ValueError(f"no parabolicity form for family {profile.family!r}")
    i = int(np.argmin(g))
    return ParabolicityReport(
        min_value=float(g[i]), argmin=float(y[i]), ok=bool(g[i] > 0.0), n=int(g.size)
    )


# -------------------------------------------------------- maximum principle


def _family_rhs(family, params):
    if family in (FAMILY_SHOCK, FAMILY_COMPACT):
        return lambda y, f, fp: rhs_shock(y, f, fp)
    if family == FAMILY_RAREFACTION:
        return lambda y, f, fp: rhs_rarefaction(y, f, fp)
    if family == FAMILY_BLOWUP:
        return lambda y, f, fp: rhs_blowup(params.alpha, y, f, fp)
    if family == FAMILY_GLOBAL:
        return lambda y, f, fp: rhs_global(params.alpha, y, f, fp)
    raise ValueError(f"no right-hand side for family {family!r}")


def max_principle_scan(profile):
    """Locate interior critical points (sign changes of f') and report each
    with the re-measured second derivative next to the ODE-implied one.

    At a critical point the family ODE pins the curvature to
    rhs(y0, f(y0), 0); on the post-critical family that is
    |alpha| f / (beta^2 y0^2) > 0, which is what makes interior minima the
    only possible critical points there.
    """
    y = profile.grid
    fp = profile.fp
    rhs = _family_rhs(profile.family, profile.params)
    traj = profile.trajectory
    points = []
    for i in range(len(y) - 1):
        a, b = fp[i], fp[i + 1]
        if a == 0.0:
            if 0 < i:  # node exactly critical
                y0, f0 = float(y[i]), float(profile.f[i])
                points.append(_critical_point(profile, rhs, y0, f0, traj))
            continue
        if (a > 0.0) == (b > 0.0):
            continue
        lo, hi = float(y[i]), float(y[i + 1])
        if traj is not None:
            glo = a
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                gm = profile.eval(mid)[1]
                if gm == 0.0:
                    lo = hi = mid
                    break
                if (gm > 0.0) == (glo > 0.0):
                    lo = mid
                    glo = gm
                else:
                    hi = mid
                if hi - lo <= 1e-13 * max(1.0, abs(hi)):
                    break
            y0 = 0.5 * (lo + hi)
            f0 = profile.eval(y0)[0]
        else:
            y0 = lo + (hi - lo) * a / (a - b)  # secant through the nodes
            f0 = float(np.interp(y0, y, profile.f))
        points.append(_critical_point(profile, rhs, y0, f0, traj))
    return points


def _critical_point(profile, rhs, y0, f0, traj):
    if traj is not None:
        fpp = float(profile.traj_sign * traj.derivative(y0, order=1)[1])
    else:
        i = int(np.searchsorted(profile.grid, y0))
        i = min(max(i, 1), len(profile.grid) - 2)
        fpp = float(
            (profile.fp[i + 1] - profile.fp[i - 1])
            / (profile.grid[i + 1] - profile.grid[i - 1])
        )
    return CriticalPoint(
        y=float(y0),
        value=float(f0),
        second_derivative=fpp,
        ode_implied=float(rhs(y0, f0, 0.0)),
    )


# ------------------------------------------------------------ PDE residual


def _u_factory(profile):
    """(x, t) -> u for the similarity form this family represents."""
    family = profile.family
    alpha = profile.params.alpha
    beta = profile.params.beta
    if family in (FAMILY_SHOCK, FAMILY_COMPACT, FAMILY_BLOWUP):
        def u(x, t):
            if t >= 0.0:
                raise CoverageGapError("pre-critical form needs t < 0")
            s = (-t) ** (-beta)
            return (-t) ** (-alpha) * profile.eval(x * s)[0]
        return u, -1.0
    if family in (FAMILY_RAREFACTION, FAMILY_GLOBAL):
        def u(x, t):
            if t <= 0.0:
                raise CoverageGapError("post-critical form needs t > 0")
            return t ** (-alpha) * profile.eval(x * t ** (-beta))[0]
        return u, 1.0
    raise ValueError(f"no similarity form for family {family!r}")


def _fd_residual(u, xs, ts, h):
    out = np.empty((len(xs), len(ts)))
    for i, x in enumerate(xs):
        for j, t in enumerate(ts):
            c = u(x, t)
            px, mx = u(x + h, t), u(x - h, t)
            pt, mt = u(x, t + h), u(x, t - h)
            ut = (pt - mt) / (2.0 * h)
            utt = (pt - 2.0 * c + mt) / (h * h)
            ux = (px - mx) / (2.0 * h)
            out[i, j] = c * utt - ut * ut - c * ux * ut
    return out


def pde_residual(profile, x_window=(0.5, 1.5), t_window=None, h=1e-3, n=5):
    """Finite-difference residual of u u_tt - (u_t)^2 - u u_x u_t on the
    reconstructed similarity solution, at steps h and h/2.

    The window defaults keep every stencil point's similarity variable
    inside the profile's coverage; points outside raise CoverageGapError.
    order is log2(rms_h / rms_{h/2}), about 2 for a healthy profile.
    """
    u, tsign = _u_factory(profile)
    if t_window is None:
        t_window = (-2.0, -1.0) if tsign < 0 else (1.0, 2.0)
    if not (t_window[0] < t_window[1]):
        raise ValueError("t_window must be ordered")
    if tsign < 0 and not t_window[1] + h < 0.0:
        raise CoverageGapError("t_window must stay below t = 0 at stencil width")
    if tsign > 0 and not t_window[0] - h > 0.0:
        raise CoverageGapError("t_window must stay above t = 0 at stencil width")
    xs = np.linspace(x_window[0], x_window[1], n)
    ts = np.linspace(t_window[0], t_window[1], n)
    r1 = np.abs(_fd_residual(u, xs, ts, h))
    r2 = np.abs(_fd_residual(u, xs, ts, 0.5 * h))
    rms1 = float(np.sqrt(np.mean(r1**2)))
    rms2 = float(np.sqrt(np.mean(r2**2)))
    order = float(np.log2(rms1 / rms2)) if rms2 > 0.0 else np.inf
    order_max = (
        float(np.log2(r1.max() / r2.max())) if r2.max() > 0.0 else np.inf
    )
    return PdeResidualReport(
        h=h,
        max_abs=float(r1.max()),
        rms=rms1,
        max_abs_half=float(r2.max()),
        rms_half=rms2,
        order=order,
        order_max=order_max,
        n=int(r1.size),
    )


# ----------------------------------------------------------- log divergence


def log_divergence(profile, Y_values=None, panels=10_000):
    """I(Y) = -int_{-Y}^{Y} F'(y) y dy by composite quadrature, fitted
    linearly against ln Y.

    On profiles whose far tail carries the 1/y correction the integrand
    decays like 1/|y|, so I grows logarithmically and the fit slope measures
    the tail coefficient.  Y values outside the profile's coverage raise
    CoverageGapError.
    """
    if Y_values is None:
        Y_values = np.linspace(10.0, 50.0, 9)
    Y_values = np.asarray(Y_values, dtype=float)
    lo, hi = profile.span
    if Y_values.max() > min(-lo, hi):
        raise CoverageGapError(
            f"largest Y {Y_values.max()!r} exceeds coverage [{lo!r}, {hi!r}]"
        )
    I = np.empty(Y_values.size)
    for k, Y in enumerate(Y_values):
        ys = np.linspace(-Y, Y, panels + 1)
        _, fp = profile.eval(ys)
        I[k] = -simpson(fp * ys, x=ys)
    X = np.log(Y_values)
    slope, intercept = np.polyfit(X, I, 1)
    resid = I - (slope * X + intercept)
    ss_tot = float(np.sum((I - I.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0.0 else 1.0
    return LogDivergenceReport(
        Y=Y_values, I=I, slope=float(slope), intercept=float(intercept), r_squared=r2
    )


# ------------------------------------------------------------- final traces


def final_profile(profile, x):
    """Final-time trace u(x, 0-) or u(x, 0+) from the fitted tail law.

    The algebraic tail C y^p is exactly what survives at the critical time:
    u(x, t) -> C x^p as t -> 0 on the respective side.  Requires a fitted
    tail (MissingTailFitError otherwise) and x > 0.
    """
    if profile.tail is None:
        raise MissingTailFitError("profile carries no tail fit")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("final trace is defined for x > 0")
    return profile.tail.amplitude * x**profile.tail.exponent
