"""Shooting construction of similarity profiles.

Every profile here is grown by launching a local series expansion a small
offset away from a singular point of its family ODE and integrating across
the span with the adaptive stepper.  The module covers:

* the travelling shock profile through the origin, found by bisecting the
  origin-bundle coefficient A until the far value lands on the equilibrium 1,
* far-field launches around that equilibrium (both signs of B, including the
  flat-decay branch that terminates at the interface and its gluing with the
  identically-zero state),
* the pre-critical (t < 0) profile family for alpha != 0 with its algebraic
  tail, and the post-critical (t > 0) family launched from the unique smooth
  shock-point expansion,
* the matched pre/post pair connected through the scaling symmetry so that
  both sides share one final-time power law.

All integrations are deterministic; sweeps run sequentially and report
results in input order.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    CoverageGapError,
    MatchFailureError,
    NoBracketError,
    NonPositiveValuesError,
    OutOfRangeError,
    PositivityLostError,
    SolverError,
    StepUnderflowError,
    WindowTooShortError,
)
from .integrator import (
    EVENT_GUARD,
    EVENT_SPAN_END,
    EVENT_VALUE_CAP,
    EVENT_ZERO_CROSS,
    OdeSystem,
    Tolerances,
    Trajectory,
    integrate,
)
from .odes import (
    KIND_FARFIELD,
    KIND_ORIGIN,
    KIND_SHOCK_POINT,
    ExpansionCoeffs,
    SimilarityParams,
    farfield_series,
    origin_series,
    rescale,
    rhs_blowup,
    rhs_blowup_dev,
    rhs_global,
    rhs_rarefaction,
    rhs_shock,
    rhs_shock_dev,
    shock_series,
)

__all__ = [
    "FAMILY_BLOWUP",
    "FAMILY_COMPACT",
    "FAMILY_GLOBAL",
    "FAMILY_RAREFACTION",
    "FAMILY_SHOCK",
    "ExtensionPair",
    "FlatFit",
    "Outcome",
    "Profile",
    "ShootConfig",
    "ShootResult",
    "SweepRecord",
    "TailFit",
    "build_compact_profile",
    "build_extension_pair",
    "classify",
    "fit_tail",
    "reflect",
    "solve_blowup_family",
    "solve_farfield",
    "solve_global",
    "solve_shock_bvp",
    "sweep_parameter",
]

FAMILY_SHOCK = "shock"
FAMILY_RAREFACTION = "rarefaction"
FAMILY_BLOWUP = "blowup"
FAMILY_GLOBAL = "global"
FAMILY_COMPACT = "compact"
FAMILY_FARFIELD = "farfield"  # launch route; the ODE solved is the shock one

OUTCOME_CONVERGES = "ConvergesTo"
OUTCOME_BLOWUP = "BlowUpAt"
OUTCOME_HITS_ZERO = "HitsZeroAt"
OUTCOME_FLAT_DECAY = "FlatDecayDetected"
OUTCOME_INDETERMINATE = "Indeterminate"


# ------------------------------------------------------------------- config


@dataclass(frozen=True)
class ShootConfig:
    """Numerical policy for every solver in this module.

    All solves share one integration accuracy (rtol/atol), one span
    [delta, y_max] measured from the singular point, and one set of
    detection thresholds.  Field ranges are enforced on construction.
    """

    y_max: float = 50.0          # right end of the integration span
    delta: float = 1e-4          # series launch offset from the singular point
    rtol: float = 1e-13
    atol: float = 1e-13
    max_step: float = 5.0
    value_cap: float = 1e8       # |f| or |f'| at this size counts as blow-up
    param_tol: float = 1e-10     # bisection bracket width at convergence
    bvp_tol: float = 1e-6        # |f(y_max) - 1| accepted for the shock profile
    bracket_lo: float = -10.0    # initial A bracket, low end
    bracket_hi: float = -1e-6    # initial A bracket, high end
    limit_window: float = 0.2    # trailing fraction of the span used by classify
    limit_tol: float = 1e-2      # flatness threshold inside that window
    match_tol: float = 1e-3      # relative amplitude agreement for the pair
    tail_decades: float = 1.0    # tail-fit window length in decades of y
    farfield_start: float = -50.0
    flat_floor: float = 1e-15    # |f| below this counts as flat decay
    guard_floor: float = 1e-300  # ODE denominator magnitude treated as singular
    switch_rel: float = 1e-4     # |f-y|/y at which origin launches leave
                                 # deviation coordinates for physical ones

    def __post_init__(self):
        checks = [
            ("rtol", self.rtol > 0.0),
            ("atol", self.atol > 0.0),
            ("delta", 0.0 < self.delta < self.y_max),
            ("y_max", self.y_max > 0.0),
            ("max_step", self.max_step > 0.0),
            ("value_cap", self.value_cap > 1.0),
            ("param_tol", self.param_tol > 0.0),
            ("bvp_tol", self.bvp_tol > 0.0),
            ("bracket", self.bracket_lo < self.bracket_hi < 0.0),
            ("limit_window", 0.0 < self.limit_window < 1.0),
            ("limit_tol", self.limit_tol > 0.0),
            ("match_tol", self.match_tol > 0.0),
            ("tail_decades", self.tail_decades > 0.0),
            ("farfield_start", self.farfield_start < 0.0),
            ("flat_floor", self.flat_floor > 0.0),
            ("guard_floor", self.guard_floor > 0.0),
            ("switch_rel", 0.0 < self.switch_rel < 0.5),
        ]
        for name, ok in checks:
            if not ok:
                raise OutOfRangeError(f"config value out of range: {name}")

    def tolerances(self):
        return Tolerances(
            rtol=self.rtol,
            atol=self.atol,
            max_step=self.max_step,
            min_step=None,
            value_cap=self.value_cap,
        )


# -------------------------------------------------------------------- types


@dataclass(frozen=True)
class Outcome:
    """How an integration ended: kind is one of ConvergesTo / BlowUpAt /
    HitsZeroAt / FlatDecayDetected / Indeterminate; value carries the limit
    for ConvergesTo, location the y of the terminating event."""

    kind: str
    value: float | None = None
    location: float | None = None


@dataclass(frozen=True)
class TailFit:
    """Least-squares fit of ln f against ln y over (window[0], window[1]).

    amplitude = exp(intercept), exponent = slope.  When pinned is True the
    exponent was held at expected_exponent and only the amplitude fitted.
    """

    amplitude: float
    exponent: float
    expected_exponent: float | None
    window: tuple
    r_squared: float
    rms_residual: float
    n: int
    pinned: bool = False


@dataclass(frozen=True)
class FlatFit:
    """Fit of ln f against 1/y over the flat-decay window (y < 0): the decay
    constant a_flat is the slope, positive for a genuine flat interface."""

    a_flat: float
    r_squared: float
    window: tuple
    n: int


@dataclass
class Profile:
    """One similarity profile on an ascending grid.

    f and fp hold the profile and its first derivative at the grid nodes.
    trajectory, when present, carries dense output over (part of) the grid;
    eval() prefers it and falls back to linear interpolation elsewhere.
    """

    family: str
    params: SimilarityParams
    grid: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    launch: ExpansionCoeffs | None = None
    tail: TailFit | None = None
    trajectory: object = field(default=None, repr=False)
    traj_sign: float = field(default=1.0, repr=False)

    def __post_init__(self):
        if self.grid.size < 2:
            raise ValueError("profile grid needs at least two nodes")
        if not np.all(np.diff(self.grid) > 0.0):
            raise ValueError("profile grid must be strictly ascending")

    @property
    def span(self):
        return float(self.grid[0]), float(self.grid[-1])

    def eval(self, ys):
        """(f, fp) at the requested points; dense output where available,
        linear interpolation on the stored nodes elsewhere.  Points outside
        the grid raise CoverageGapError."""
        arr = np.atleast_1d(np.asarray(ys, dtype=float))
        lo, hi = self.grid[0], self.grid[-1]
        if np.any(arr < lo) or np.any(arr > hi):
            raise CoverageGapError(
                f"evaluation outside profile coverage [{lo!r}, {hi!r}]"
            )
        f = np.empty(arr.size)
        fp = np.empty(arr.size)
        traj = self.trajectory
        if traj is not None:
            tlo, thi = sorted((traj.t[0], traj.t[-1]))
        for i, yv in enumerate(arr):
            if traj is not None and tlo <= yv <= thi:
                s = traj.eval(yv)
                f[i] = self.traj_sign * s[0]
                fp[i] = self.traj_sign * s[1]
            else:
                f[i] = np.interp(yv, self.grid, self.f)
                fp[i] = np.interp(yv, self.grid, self.fp)
        if np.isscalar(ys) or np.asarray(ys).ndim == 0:
            return float(f[0]), float(fp[0])
        return f, fp


@dataclass(frozen=True)
class ShootResult:
    """One solved profile plus how it was obtained."""

    family: str
    param_name: str
    param_value: float
    profile: Profile
    outcome: Outcome
    iterations: int = 0
    residual: float | None = None


@dataclass(frozen=True)
class SweepRecord:
    """One sweep entry: the swept value and what came out of it.  profile is
    None when the solve failed; error carries the failure text."""

    param_name: str
    value: float
    profile: Profile | None
    outcome: Outcome
    error: str | None = None


@dataclass(frozen=True)
class ExtensionPair:
    """Matched pre-critical (minus, t < 0) and post-critical (plus, t > 0)
    profiles sharing the final-time power law C0 * x^tail_power.

    plus is already rescaled by scale_a; both profiles carry pinned-exponent
    tails whose amplitudes agree to match_rel_error.
    """

    minus: Profile
    plus: Profile
    scale_a: float
    tail_power: float
    amplitude_minus: float
    amplitude_plus: float
    match_rel_error: float
    free_fit_minus: TailFit
    free_fit_plus: TailFit


# -------------------------------------------------------------- family glue


def _make_system(family, params, guard_floor):
    if family in (FAMILY_SHOCK, FAMILY_COMPACT):

        def f(t, s):
            return np.array([s[1], rhs_shock(t, s[0], s[1])])

        def guard(t, s):
            return abs(t * s[0]) < guard_floor

    elif family == FAMILY_RAREFACTION:

        def f(t, s):
            return np.array([s[1], rhs_rarefaction(t, s[0], s[1])])

        def guard(t, s):
            return abs(t * s[0]) < guard_floor

    elif family == FAMILY_BLOWUP:
        alpha = params.alpha
        b2 = params.beta * params.beta

        def f(t, s):
            return np.array([s[1], rhs_blowup(alpha, t, s[0], s[1])])

        def guard(t, s):
            return abs(b2 * t * t * s[0]) < guard_floor

    elif family == FAMILY_GLOBAL:
        alpha = params.alpha
        b2 = params.beta * params.beta

        def f(t, s):
            return np.array([s[1], rhs_global(alpha, t, s[0], s[1])])

        def guard(t, s):
            return abs(b2 * t * t * s[0]) < guard_floor

    else:
        raise ValueError(f"unknown family {family!r}")
    return OdeSystem(f=f, dim=2, singular_guard=guard)


def _profile_from_trajectory(family, params, traj, launch):
    grid = traj.t
    f = traj.y[:, 0]
    fp = traj.y[:, 1]
    if grid[0] > grid[-1]:
        grid, f, fp = grid[::-1], f[::-1], fp[::-1]
    return Profile(
        family=family,
        params=params,
        grid=grid.copy(),
        f=f.copy(),
        fp=fp.copy(),
        launch=launch,
        trajectory=traj,
    )


def classify(trajectory, config=None):
    """Outcome of one integration.

    Cap events mean blow-up at the event location; a zero crossing of the
    profile component means it hit zero there.  Completed spans are scanned
    over the trailing limit_window fraction: if both the spread of f and the
    size of fp stay below limit_tol, the run converged to the window mean.
    Everything else is Indeterminate.
    """
    cfg = config if config is not None else ShootConfig()
    ev = trajectory.event_of_kind(EVENT_VALUE_CAP)
    if ev is not None:
        return Outcome(OUTCOME_BLOWUP, location=float(ev.t))
    ev = trajectory.event_of_kind(EVENT_ZERO_CROSS)
    if ev is not None:
        return Outcome(OUTCOME_HITS_ZERO, location=float(ev.t))
    if not trajectory.complete:
        return Outcome(OUTCOME_INDETERMINATE)
    t0 = float(trajectory.t[0])
    t1 = trajectory.t_end
    ts = np.linspace(t1 - cfg.limit_window * (t1 - t0), t1, 33)
    ss = trajectory.eval(ts)
    fbar = float(np.mean(ss[:, 0]))
    if (
        float(np.max(np.abs(ss[:, 0] - fbar))) <= cfg.limit_tol
        and float(np.max(np.abs(ss[:, 1]))) <= cfg.limit_tol
    ):
        return Outcome(OUTCOME_CONVERGES, value=fbar)
    return Outcome(OUTCOME_INDETERMINATE)


def _first_flat_node(traj, floor):
    idx = np.nonzero(np.abs(traj.y[:, 0]) < floor)[0]
    return float(traj.t[idx[0]]) if idx.size else traj.t_end


def _deviation_to_physical(traj):
    """Map a trajectory of (w, w') = (f - y, f' - 1) onto (f, f').

    The shift is affine in the node states and adds the identity line to
    the dense segments: the constant picks up the segment origin, the
    linear interpolant coefficient picks up 1, higher ones are unchanged.
    """
    y = traj.y.copy()
    y[:, 0] += traj.t
    y[:, 1] += 1.0
    seg_y0 = traj._seg_y0.copy()
    seg_q = traj._seg_q.copy()
    if len(seg_y0):
        seg_y0[:, 0] += traj._seg_t0
        seg_y0[:, 1] += 1.0
        seg_q[:, 0, 0] += 1.0
    events = [
        replace(ev, state=np.array([ev.t + ev.state[0], 1.0 + ev.state[1]]))
        for ev in traj.events
    ]
    return Trajectory(
        t=traj.t.copy(),
        y=y,
        events=events,
        complete=traj.complete,
        direction=traj.direction,
        _seg_t0=traj._seg_t0.copy(),
        _seg_h=traj._seg_h.copy(),
        _seg_y0=seg_y0,
        _seg_q=seg_q,
    )


def _concat_trajectories(a, b):
    """Join two trajectories where b starts at a's final node."""
    return Trajectory(
        t=np.concatenate([a.t, b.t[1:]]),
        y=np.concatenate([a.y, b.y[1:]]),
        events=list(a.events) + list(b.events),
        complete=b.complete,
        direction=a.direction,
        _seg_t0=np.concatenate([a._seg_t0, b._seg_t0]),
        _seg_h=np.concatenate([a._seg_h, b._seg_h]),
        _seg_y0=np.concatenate([a._seg_y0, b._seg_y0]),
        _seg_q=np.concatenate([a._seg_q, b._seg_q]),
    )


def _origin_trajectory(family, params, A, cfg):
    """Integrate an origin launch f = y + A y^m in two phases.

    Near the origin the correction A y^m can sit dozens of orders of
    magnitude below y, so the state is the deviation (w, w') = (f - y,
    f' - 1), whose right-hand side preserves w = 0 exactly and keeps the
    launch information representable.  Once the predicted relative
    deviation |A| y^(m-1) reaches switch_rel the state is rotated into
    physical coordinates and integration continues with the usual zero and
    cap events (which cannot trigger while |w| << y).  The two pieces are
    stitched into one trajectory.
    """
    m = params.m_plus
    delta = cfg.delta
    w0 = A * delta**m
    v0 = m * A * delta ** (m - 1.0)
    if A == 0.0:
        y_sw = cfg.y_max
    else:
        y_sw = (cfg.switch_rel / abs(A)) ** (1.0 / (m - 1.0))
        y_sw = min(max(y_sw, 2.0 * delta), cfg.y_max)

    alpha = params.alpha
    if family == FAMILY_SHOCK:

        def fdev(t, s):
            return np.array([s[1], rhs_shock_dev(t, s[0], s[1])])

    else:

        def fdev(t, s):
            return np.array([s[1], rhs_blowup_dev(alpha, t, s[0], s[1])])

    def guard_dev(t, s):
        return t + s[0] < cfg.guard_floor

    dev_system = OdeSystem(f=fdev, dim=2, singular_guard=guard_dev)
    # pure relative control: an absolute floor of 1e-13 would swamp w
    tol_dev = Tolerances(
        rtol=cfg.rtol,
        atol=max(abs(w0) * 1e-3, 1e-290),
        max_step=cfg.max_step,
        value_cap=cfg.value_cap,
    )
    traj_dev = integrate(dev_system, delta, y_sw, np.array([w0, v0]), tol_dev)
    phys = _deviation_to_physical(traj_dev)
    if y_sw >= cfg.y_max or not traj_dev.complete:
        return phys

    state_sw = phys.y[-1]
    system = _make_system(family, params, cfg.guard_floor)
    try:
        tail = integrate(
            system, y_sw, cfg.y_max, state_sw, cfg.tolerances(), zero_cross=(0,)
        )
    except StepUnderflowError as exc:
        if exc.trajectory is None:
            raise
        raise StepUnderflowError(
            str(exc), trajectory=_concat_trajectories(phys, exc.trajectory)
        ) from exc
    return _concat_trajectories(phys, tail)


def _global_backward(params, F0, cfg):
    """Grow the smooth post-critical branch through F(0) = F0 backward.

    The shock point y = 0 is an irregular singular point of the
    post-critical ODE: deviations from the smooth branch evolve like
    exp(-c/y) with c = |alpha| F0 / beta^2, exploding toward increasing y
    and collapsing toward y -> 0+.  Forward series launches therefore leave
    the branch immediately at any series order.  Backward integration
    reverses the contraction, but the far-field power law F = C y^p,
    p = -alpha/(1 - alpha), is itself an exact solution terminating at
    F(0) = 0 with a vertical tangent, so a pure-power start just rides it
    (or roundoff folds it at finite y).  A slope offset s at y_max tips the
    start onto the basin of the smooth branch; the arrival value F0* grows
    monotonically with |s| on the completing side.  This bisects ln|s|
    until the arrival lands on F0.

    Returns (trajectory, passes, relative miss of F(0)).
    """
    p = params.tail_exponent
    beta2 = params.beta * params.beta
    system = _make_system(FAMILY_GLOBAL, params, cfg.guard_floor)
    tol = cfg.tolerances()
    C = F0 ** (1.0 - p)  # exact scaling power, order-one prefactor
    F_far = C * cfg.y_max**p
    Fp_far = p * F_far / cfg.y_max

    def shot(s):
        """One backward pass; (F0*, trajectory) or (None, _) when it never
        reaches delta (fold, zero hit, or cap)."""
        state = np.array([F_far, Fp_far + s])
        try:
            traj = integrate(
                system, cfg.y_max, cfg.delta, state, tol,
                zero_cross=(0,), cap_components=(1,),
            )
        except StepUnderflowError:
            return None, None
        if not traj.complete:
            return None, traj
        F_d = float(traj.y[-1, 0])
        # invert the shock-point series F(d) = F0 - d + beta^2 d^2/(2 a F0)
        F0_star = F_d + cfg.delta
        for _ in range(3):
            F0_star = F_d + cfg.delta - beta2 * cfg.delta**2 / (
                2.0 * params.alpha * F0_star
            )
        return F0_star, traj

    # completing side of the slope offset: probe both signs
    passes = 0
    sign = None
    for candidate in (-1.0, 1.0):
        F0_probe, _ = shot(candidate * 1e-9 * max(1.0, abs(Fp_far)))
        passes += 1
        if F0_probe is not None:
            sign = candidate
            break
    if sign is None:
        raise MatchFailureError(
            f"no backward pass reaches the shock point (alpha={params.alpha!r})"
        )

    # bracket |s|: lo just above the roundoff floor, hi grown until the
    # arrival overshoots F0 (folds past the bracket thin out as |s| grows)
    s_lo = 1e-13 * max(1.0, abs(Fp_far))
    F0_lo, traj_lo = shot(sign * s_lo)
    passes += 1
    if F0_lo is None:
        raise MatchFailureError(
            "backward pass at the roundoff floor no longer reaches the shock point"
        )
    if F0_lo >= F0:
        raise OutOfRangeError(
            f"F0={F0!r} sits below the smallest reachable arrival {F0_lo!r}; "
            "rescale the request through the scaling group instead"
        )
    s_hi, F0_hi = s_lo, F0_lo
    best = (abs(F0_lo - F0) / F0, traj_lo)
    while F0_hi < F0:
        s_hi *= 100.0
        if s_hi > 1e12:
            raise NoBracketError("arrival value never reaches F0 while growing |s|")
        F0_hi, traj_hi = shot(sign * s_hi)
        passes += 1
        if F0_hi is None:
            raise NoBracketError(
                f"backward pass stopped completing while bracketing (|s|={s_hi!r})"
            )
        gap = abs(F0_hi - F0) / F0
        if gap < best[0]:
            best = (gap, traj_hi)

    # refine by regula falsi on ln F0* against ln|s| (smooth and monotone),
    # falling back to plain midpoints for folds or stalled interpolants
    u_lo, u_hi = np.log(s_lo), np.log(s_hi)
    g_lo, g_hi = np.log(F0_lo / F0), np.log(F0_hi / F0)
    while u_hi - u_lo > 1e-9 and best[0] > 1e-12:
        if g_lo is not None and g_hi is not None and g_hi > g_lo:
            u_mid = u_lo + (u_hi - u_lo) * (-g_lo) / (g_hi - g_lo)
            width = u_hi - u_lo
            u_mid = min(max(u_mid, u_lo + 1e-3 * width), u_hi - 1e-3 * width)
        else:
            u_mid = 0.5 * (u_lo + u_hi)
        F0_mid, traj_mid = shot(sign * float(np.exp(u_mid)))
        passes += 1
        if F0_mid is None:
            # folds count as arriving below every positive target
            u_lo, g_lo = u_mid, None
            continue
        gap = abs(F0_mid - F0) / F0
        if gap < best[0]:
            best = (gap, traj_mid)
        if F0_mid < F0:
            u_lo, g_lo = u_mid, np.log(F0_mid / F0)
        else:
            u_hi, g_hi = u_mid, np.log(F0_mid / F0)
    miss, traj = best
    if miss > cfg.bvp_tol:
        raise MatchFailureError(
            f"shock-point calibration stalled at relative miss {miss:.3e}"
        )
    return traj, passes, miss


def _launch_and_classify(family, cfg, *, alpha=None, A=None, B=None, F0=None, F1=None):
    """Launch one integration for the requested family and classify it.

    Returns (Profile, Outcome).  The far-field flat-decay branch converts an
    expected near-interface step underflow (or guard stall, zero crossing, or
    a completed coast) with |f| below flat_floor into FlatDecayDetected.
    """
    tol = cfg.tolerances()
    if family == FAMILY_SHOCK:
        if A is None:
            raise ValueError("shock launch requires A")
        params = SimilarityParams.from_alpha(0.0)
        launch = ExpansionCoeffs(KIND_ORIGIN, float(A), params)
        traj = _origin_trajectory(family, params, float(A), cfg)
        return _profile_from_trajectory(family, params, traj, launch), classify(traj, cfg)

    if family == FAMILY_BLOWUP:
        if alpha is None or A is None:
            raise ValueError("pre-critical family launch requires alpha and A")
        if alpha == 0.0:
            raise ValueError("alpha = 0 is the shock family")
        params = SimilarityParams.from_alpha(alpha)
        launch = ExpansionCoeffs(KIND_ORIGIN, float(A), params)
        traj = _origin_trajectory(family, params, float(A), cfg)
        return _profile_from_trajectory(family, params, traj, launch), classify(traj, cfg)

    if family == FAMILY_FARFIELD:
        if B is None:
            raise ValueError("far-field launch requires B")
        params = SimilarityParams.from_alpha(0.0)
        y0 = cfg.farfield_start
        f0, fp0 = farfield_series(B, y0)
        launch = ExpansionCoeffs(KIND_FARFIELD, float(B), params)
        system = _make_system(FAMILY_SHOCK, params, cfg.guard_floor)
        try:
            traj = integrate(
                system, y0, cfg.y_max, [f0, fp0], tol, zero_cross=(0,)
            )
        except StepUnderflowError as exc:
            traj = exc.trajectory
            if traj is None or abs(float(traj.y[-1, 0])) >= cfg.flat_floor:
                raise
        profile = _profile_from_trajectory(FAMILY_SHOCK, params, traj, launch)
        outcome = classify(traj, cfg)
        if abs(float(traj.y[-1, 0])) < cfg.flat_floor:
            outcome = Outcome(
                OUTCOME_FLAT_DECAY, location=_first_flat_node(traj, cfg.flat_floor)
            )
        return profile, outcome

    if family == FAMILY_GLOBAL:
        if alpha is None or not alpha < 0.0:
            raise ValueError("post-critical family requires alpha < 0")
        F0 = 1.0 if F0 is None else float(F0)
        if F0 <= 0.0:
            raise ValueError("post-critical family requires F0 > 0")
        params = SimilarityParams.from_alpha(alpha)
        launch = ExpansionCoeffs(KIND_SHOCK_POINT, F0, params)
        if F1 is not None:
            # generic Cauchy run off the smooth branch; visibly singular
            # behaviour near 0 is the expected product, kept for diagnostics
            system = _make_system(family, params, cfg.guard_floor)
            traj = integrate(
                system, cfg.delta, cfg.y_max, [F0, float(F1)], tol, zero_cross=(0,)
            )
            return (
                _profile_from_trajectory(family, params, traj, launch),
                classify(traj, cfg),
            )
        traj, _, _ = _global_backward(params, F0, cfg)
        return _profile_from_trajectory(family, params, traj, launch), classify(traj, cfg)

    raise ValueError(f"unknown family {family!r}")


# ------------------------------------------------------------------ solvers


def solve_shock_bvp(config=None):
    """Find the origin coefficient A* whose profile settles on the
    equilibrium 1 at infinity.

    The far field behaves like f = L + B/y + B^2/(2 y^2), so the combination
    f + y f' equals the asymptotic limit L up to O(1/y^2); bisecting A over
    (bracket_lo, bracket_hi) on the sign of (f + y f')(y_max) - 1 targets
    the limit itself rather than the finite-span value.  Blow-ups count as
    above target, zero hits as below.  The returned profile satisfies
    |(f + y f')(y_max) - 1| < bvp_tol and increases strictly.

    Raises NoBracketError when both endpoints land on the same side and
    MatchFailureError when the converged shot misses the tolerance.
    """
    cfg = config if config is not None else ShootConfig()
    params = SimilarityParams.from_alpha(0.0)

    def shot(A):
        return _origin_trajectory(FAMILY_SHOCK, params, A, cfg)

    def limit_gap(traj):
        f_end, fp_end = traj.y[-1]
        return float(f_end + traj.t_end * fp_end) - 1.0

    def position(traj):
        # above target -> +1, below -> -1
        if traj.event_of_kind(EVENT_VALUE_CAP) is not None:
            return 1.0
        if traj.event_of_kind(EVENT_ZERO_CROSS) is not None:
            return -1.0
        if not traj.complete:
            return -1.0  # guard stall near f = 0 means the shot fell under
        gap = limit_gap(traj)
        if gap == 0.0:
            return 0.0
        return 1.0 if gap > 0.0 else -1.0

    lo, hi = cfg.bracket_lo, cfg.bracket_hi
    p_lo = position(shot(lo))
    p_hi = position(shot(hi))
    if p_lo == p_hi:
        raise NoBracketError(
            f"bracket endpoints A={lo!r} and A={hi!r} classify on the same side"
        )
    iterations = 2
    while hi - lo > cfg.param_tol:
        mid = 0.5 * (lo + hi)
        p_mid = position(shot(mid))
        iterations += 1
        if p_mid == 0.0:
            lo = hi = mid
            break
        if p_mid == p_lo:
            lo = mid
        else:
            hi = mid
    A_star = 0.5 * (lo + hi)
    traj = shot(A_star)
    iterations += 1
    if not traj.complete:
        raise MatchFailureError("converged shot did not span the full range")
    residual = abs(limit_gap(traj))
    if residual >= cfg.bvp_tol:
        raise MatchFailureError(
            f"converged shot misses the far limit: |f + y f' - 1| = {residual:.3e}"
        )
    if not np.all(np.diff(traj.y[:, 0]) > 0.0):
        raise MatchFailureError("converged profile is not strictly increasing")
    launch = ExpansionCoeffs(KIND_ORIGIN, A_star, params)
    profile = _profile_from_trajectory(FAMILY_SHOCK, params, traj, launch)
    return ShootResult(
        family=FAMILY_SHOCK,
        param_name="A",
        param_value=A_star,
        profile=profile,
        outcome=classify(traj, cfg),
        iterations=iterations,
        residual=residual,
    )


def solve_farfield(B, config=None):
    """Launch f = 1 + B/y from the far field and integrate rightward.

    B < 0 runs cross the singular point and settle on an equilibrium above 1
    (outcome ConvergesTo); B > 0 runs decay to the flat interface and stop
    near y = 0^- (outcome FlatDecayDetected)."""
    cfg = config if config is not None else ShootConfig()
    if B == 0.0:
        raise ValueError("B = 0 launches the constant equilibrium; nothing to solve")
    profile, outcome = _launch_and_classify(FAMILY_FARFIELD, cfg, B=float(B))
    return ShootResult(
        family=FAMILY_SHOCK,
        param_name="B",
        param_value=float(B),
        profile=profile,
        outcome=outcome,
    )


def solve_blowup_family(alpha, A, config=None):
    """Pre-critical profile for one (alpha, A): origin launch, span
    integration, and a free tail fit against the family power -alpha/(1-alpha).

    Raises PositivityLostError if the profile hits zero inside the span.
    Blow-up outcomes (possible for A > 0) come back without a tail fit.
    """
    cfg = config if config is not None else ShootConfig()
    profile, outcome = _launch_and_classify(
        FAMILY_BLOWUP, cfg, alpha=float(alpha), A=float(A)
    )
    if outcome.kind == OUTCOME_HITS_ZERO:
        raise PositivityLostError(
            f"profile hit zero at y = {outcome.location!r} (alpha={alpha}, A={A})"
        )
    if outcome.kind not in (OUTCOME_BLOWUP,):
        profile.tail = fit_tail(
            profile, expected_exponent=profile.params.tail_exponent, config=cfg
        )
    return ShootResult(
        family=FAMILY_BLOWUP,
        param_name="A",
        param_value=float(A),
        profile=profile,
        outcome=outcome,
    )


def solve_global(alpha, F0=1.0, config=None, F1=None):
    """Post-critical profile for alpha < 0 through F(0) = F0.

    With F1 omitted this constructs the unique smooth branch through the
    shock point (value F0, slope -1, curvature beta^2/(alpha F0) at 0) by
    backward integration from the far-field power law and an exact
    scaling-map calibration of its amplitude; see _global_backward for why
    forward launches cannot reach this branch.  Passing F1 runs a plain
    forward Cauchy launch from (delta, F0, F1) instead, which reaches the
    generic non-smooth bundle.  Completed runs carry a free tail fit
    against the family power |alpha|/(1+|alpha|).
    """
    cfg = config if config is not None else ShootConfig()
    alpha = float(alpha)
    if F1 is not None:
        profile, outcome = _launch_and_classify(
            FAMILY_GLOBAL, cfg, alpha=alpha, F0=F0, F1=F1
        )
        iterations, residual = 0, None
    else:
        if not alpha < 0.0:
            raise ValueError("post-critical family requires alpha < 0")
        F0 = float(F0)
        if F0 <= 0.0:
            raise ValueError("post-critical family requires F0 > 0")
        params = SimilarityParams.from_alpha(alpha)
        traj, iterations, residual = _global_backward(params, F0, cfg)
        launch = ExpansionCoeffs(KIND_SHOCK_POINT, F0, params)
        profile = _profile_from_trajectory(FAMILY_GLOBAL, params, traj, launch)
        outcome = classify(traj, cfg)
    if outcome.kind not in (OUTCOME_BLOWUP, OUTCOME_HITS_ZERO):
        profile.tail = fit_tail(
            profile, expected_exponent=profile.params.tail_exponent, config=cfg
        )
    return ShootResult(
        family=FAMILY_GLOBAL,
        param_name="F0" if F1 is None else "F1",
        param_value=float(F0 if F1 is None else F1),
        profile=profile,
        outcome=outcome,
        iterations=iterations,
        residual=residual,
    )


def sweep_parameter(family, param_name, values, config=None, fixed=None):
    """Run one launch per value of the swept parameter, in input order.

    family is one of shock / blowup / farfield / global; param_name names a
    launch parameter of that family (A, B, alpha, F0, F1); fixed supplies the
    non-swept ones.  Failures are recorded per entry, not raised.
    """
    cfg = config if config is not None else ShootConfig()
    base = dict(fixed or {})
    records = []
    for value in values:
        kw = dict(base)
        kw[param_name] = float(value)
        try:
            profile, outcome = _launch_and_classify(family, cfg, **kw)
        except SolverError as exc:
            records.append(
                SweepRecord(param_name, float(value), None,
                            Outcome(OUTCOME_INDETERMINATE), str(exc))
            )
            continue
        if (
            family in (FAMILY_BLOWUP, FAMILY_GLOBAL)
            and outcome.kind in (OUTCOME_CONVERGES, OUTCOME_INDETERMINATE)
        ):
            try:
                profile.tail = fit_tail(
                    profile,
                    expected_exponent=profile.params.tail_exponent,
                    config=cfg,
                )
            except SolverError:
                pass  # tails are a convenience in sweeps, not a contract
        records.append(SweepRecord(param_name, float(value), profile, outcome))
    return records


# ----------------------------------------------------------------- tail fit


def fit_tail(profile, expected_exponent=None, window=None, config=None,
             pin_exponent=False, n_samples=128, min_points=8):
    """Fit f ~ C * y^p on the trailing window by least squares in log-log.

    window defaults to the last tail_decades decades of the grid,
    (y_hi / 10^tail_decades, y_hi).  The window is resampled log-uniformly
    through profile.eval so dense output is used where the profile has it.
    With pin_exponent the slope is held at expected_exponent and only the
    amplitude is fitted.

    Raises WindowTooShortError for degenerate windows and
    NonPositiveValuesError when the window contains f <= 0.
    """
    cfg = config if config is not None else ShootConfig()
    y_hi = float(profile.grid[-1])
    if window is None:
        y_lo = y_hi / 10.0**cfg.tail_decades
    else:
        y_lo, y_hi = float(window[0]), float(window[1])
    if not (0.0 < y_lo < y_hi):
        raise WindowTooShortError(
            f"tail window ({y_lo!r}, {y_hi!r}) is empty or touches y <= 0"
        )
    y_lo = max(y_lo, float(profile.grid[0]))
    if y_hi / y_lo < 1.0001:
        raise WindowTooShortError("tail window spans less than 0.01% in y")
    ys = np.geomspace(y_lo, y_hi, n_samples)
    if ys.size < min_points:
        raise WindowTooShortError(f"tail window holds {ys.size} points")
    f, _ = profile.eval(ys)
    if np.any(f <= 0.0):
        raise NonPositiveValuesError("tail window contains non-positive values")
    X = np.log(ys)
    Z = np.log(f)
    if pin_exponent:
        if expected_exponent is None:
            raise ValueError("pin_exponent requires expected_exponent")
        slope = float(expected_exponent)
        intercept = float(np.mean(Z - slope * X))
    else:
        slope, intercept = np.polyfit(X, Z, 1)
        slope, intercept = float(slope), float(intercept)
    resid = Z - (slope * X + intercept)
    ss_tot = float(np.sum((Z - Z.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0.0 else 1.0
    return TailFit(
        amplitude=float(np.exp(intercept)),
        exponent=slope,
        expected_exponent=expected_exponent,
        window=(y_lo, y_hi),
        r_squared=r2,
        rms_residual=float(np.sqrt(np.mean(resid**2))),
        n=int(ys.size),
        pinned=bool(pin_exponent),
    )


# ------------------------------------------------------------------ gluing


def build_compact_profile(B, config=None):
    """Far-field launch with B > 0 glued to the identically-zero state.

    The launch decays to the flat interface near y = 0^-; the returned
    profile extends it by exact zeros on [0, y_max] (the profile of
    one-sided step-like data).  Also fits the flat decay constant a_flat
    from ln f against 1/y over the window 1e-12 <= f <= 1e-2.

    Returns (Profile, FlatFit, Outcome).
    """
    cfg = config if config is not None else ShootConfig()
    if B <= 0.0:
        raise ValueError("the compact gluing needs B > 0 (decaying branch)")
    result = solve_farfield(B, cfg)
    if result.outcome.kind != OUTCOME_FLAT_DECAY:
        raise MatchFailureError(
            f"far-field launch did not flat-decay (outcome {result.outcome.kind})"
        )
    base = result.profile
    keep = base.grid < 0.0
    grid_neg = base.grid[keep]
    f_neg = base.f[keep]
    fp_neg = base.fp[keep]
    if abs(float(f_neg[-1])) >= 1e-12:
        raise MatchFailureError(
            f"interface value {f_neg[-1]!r} too large for a continuous gluing"
        )
    ext = np.arange(0.0, cfg.y_max + 0.5, 1.0)
    grid = np.concatenate([grid_neg, ext])
    f = np.concatenate([f_neg, np.zeros(ext.size)])
    fp = np.concatenate([fp_neg, np.zeros(ext.size)])
    profile = Profile(
        family=FAMILY_COMPACT,
        params=base.params,
        grid=grid,
        f=f,
        fp=fp,
        launch=base.launch,
        trajectory=base.trajectory,
    )
    sel = (f_neg >= 1e-12) & (f_neg <= 1e-2)
    if np.count_nonzero(sel) < 8:
        raise WindowTooShortError("flat-decay window holds fewer than 8 nodes")
    X = 1.0 / grid_neg[sel]
    Z = np.log(f_neg[sel])
    slope, intercept = np.polyfit(X, Z, 1)
    resid = Z - (slope * X + intercept)
    r2 = 1.0 - float(np.sum(resid**2)) / float(np.sum((Z - Z.mean()) ** 2))
    flat = FlatFit(
        a_flat=float(slope),
        r_squared=r2,
        window=(float(grid_neg[sel][0]), float(grid_neg[sel][-1])),
        n=int(np.count_nonzero(sel)),
    )
    if not flat.a_flat > 0.0:
        raise MatchFailureError(f"fitted decay constant {flat.a_flat!r} not positive")
    return profile, flat, result.outcome


def reflect(profile):
    """Mirror a profile through f -> -f, mapping each family onto its
    reflection partner (shock <-> rarefaction, pre- <-> post-critical)."""
    partner = {
        FAMILY_SHOCK: FAMILY_RAREFACTION,
        FAMILY_RAREFACTION: FAMILY_SHOCK,
        FAMILY_BLOWUP: FAMILY_GLOBAL,
        FAMILY_GLOBAL: FAMILY_BLOWUP,
        FAMILY_COMPACT: FAMILY_RAREFACTION,
    }[profile.family]
    return replace(
        profile,
        family=partner,
        f=-profile.f,
        fp=-profile.fp,
        tail=None,
        traj_sign=-profile.traj_sign,
    )


# ------------------------------------------------------------ matched pair


def build_extension_pair(alpha, A, config=None):
    """Continue a pre-critical profile (alpha < 0, A < 0) past the critical
    time.

    Both sides grow the same final-time power law x^p, p = |alpha|/(1+|alpha|).
    The pre-critical side fixes the amplitude C0; the post-critical profile
    through F(0) = 1 has amplitude C, and the scaling symmetry moves it to
    C0 via a = (C0/C)^(1/(1-p)).  The rescaled side is refitted on its own
    trailing decade and must reproduce C0 to match_tol, else
    MatchFailureError.
    """
    cfg = config if config is not None else ShootConfig()
    alpha = float(alpha)
    if not alpha < 0.0:
        raise ValueError("the extension pair is defined for alpha < 0")
    if not A < 0.0:
        raise ValueError("the pre-critical side needs A < 0")
    minus_res = solve_blowup_family(alpha, A, cfg)
    if minus_res.profile.tail is None:
        raise MatchFailureError("pre-critical side has no tail to match")
    plus_res = solve_global(alpha, F0=1.0, config=cfg)
    if plus_res.profile.tail is None:
        raise MatchFailureError("post-critical side has no tail to match")
    p = minus_res.profile.params.tail_exponent
    pin_minus = fit_tail(
        minus_res.profile, expected_exponent=p, config=cfg, pin_exponent=True
    )
    pin_plus = fit_tail(
        plus_res.profile, expected_exponent=p, config=cfg, pin_exponent=True
    )
    C0 = pin_minus.amplitude
    C = pin_plus.amplitude
    scale_a = (C0 / C) ** (1.0 / (1.0 - p))
    plus_scaled = rescale(plus_res.profile, scale_a)
    pin_check = fit_tail(
        plus_scaled, expected_exponent=p, config=cfg, pin_exponent=True
    )
    rel = abs(pin_check.amplitude - C0) / C0
    if rel > cfg.match_tol:
        raise MatchFailureError(
            f"rescaled amplitude misses the pre-critical one by {rel:.3e} relative"
        )
    minus_profile = replace(minus_res.profile, tail=pin_minus)
    plus_profile = replace(plus_scaled, tail=pin_check)
    return ExtensionPair(
        minus=minus_profile,
        plus=plus_profile,
        scale_a=scale_a,
        tail_power=p,
        amplitude_minus=C0,
        amplitude_plus=pin_check.amplitude,
        match_rel_error=rel,
        free_fit_minus=minus_res.profile.tail,
        free_fit_plus=plus_res.profile.tail,
    )
