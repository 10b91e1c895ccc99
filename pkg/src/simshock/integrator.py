"""Adaptive embedded Runge-Kutta 5(4) integration with dense output and events.

The stepper is the Dormand-Prince pair: six fresh right-hand-side
evaluations per step, a fifth-order solution advanced with first-same-as-last
reuse, and the embedded fourth-order solution used only for the error
estimate.  Every accepted step also stores the coefficients of the free
fourth-order interpolant, so trajectories can be evaluated (and
differentiated) anywhere inside the integrated span after the fact.

Design constraints this module enforces:

* strict reproducibility: identical inputs produce bit-identical
  trajectories; nothing here depends on timing, hashing or threads,
* a hard minimum step: controllers that want to go below it raise
  ``StepUnderflowError`` instead of silently stalling,
* a singular guard: right-hand sides with removable or genuine
  singularities supply a predicate flagging states where they are
  undefined; the guard only flags, it never raises inside a step,
* event watchers for component sign changes and magnitude caps, located
  on the dense interpolant to sub-step accuracy.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GuardTrippedError, OutOfSpanError, StepUnderflowError

__all__ = [
    "EVENT_GUARD",
    "EVENT_SPAN_END",
    "EVENT_VALUE_CAP",
    "EVENT_ZERO_CROSS",
    "Event",
    "OdeSystem",
    "Tolerances",
    "Trajectory",
    "dense_eval",
    "integrate",
]

# ---------------------------------------------------------------- tableau

# Dormand-Prince 5(4) coefficients.  _E is (5th order weights) - (4th order
# weights) so the error estimate is h * (K^T @ _E).  _P holds the free
# quartic interpolant: y(theta) = y0 + h * (K^T @ _P) @ [theta, ..., theta^4].
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])

_A = (
    np.array([], dtype=float),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
)

_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])

_E = np.array(
    [
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    ]
)

_P = np.array(
    [
        [
            1.0,
            -8048581381 / 2820520608,
            8663915743 / 2820520608,
            -12715105075 / 11282082432,
        ],
        [0.0, 0.0, 0.0, 0.0],
        [
            0.0,
            131558114200 / 32700410799,
            -68118460800 / 10900136933,
            87487479700 / 32700410799,
        ],
        [
            0.0,
            -1754552775 / 470086768,
            14199869525 / 1410260304,
            -10690763975 / 1880347072,
        ],
        [
            0.0,
            127303824393 / 49829197408,
            -318862633887 / 49829197408,
            701980252875 / 199316789632,
        ],
        [
            0.0,
            -282668133 / 205662961,
            2019193451 / 616988883,
            -1453857185 / 822651844,
        ],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ERR_EXP = -0.2  # -1 / (order of the error estimator + 1)

EVENT_ZERO_CROSS = "ValueCrossesZero"
EVENT_VALUE_CAP = "ValueExceedsCap"
EVENT_GUARD = "SingularGuardTripped"
EVENT_SPAN_END = "ReachedSpanEnd"


# ------------------------------------------------------------------ types


@dataclass(frozen=True)
class Tolerances:
    """Error control and safety limits for one integration.

    min_step of None resolves to 1e-14 times the span length at call time.
    value_cap is the magnitude at which watched components count as blown up.
    """

    rtol: float = 1e-13
    atol: float = 1e-13
    max_step: float = np.inf
    min_step: float | None = None
    value_cap: float = 1e8

    def __post_init__(self):
        if not self.rtol > 0.0:
            raise ValueError("rtol must be positive")
        if not self.atol > 0.0:
            raise ValueError("atol must be positive")
        if not self.max_step > 0.0:
            raise ValueError("max_step must be positive")
        if self.min_step is not None:
            if not 0.0 < self.min_step < self.max_step:
                raise ValueError("need 0 < min_step < max_step")
        if not self.value_cap > 1.0:
            raise ValueError("value_cap must exceed 1")

    def resolve_min_step(self, span):
        if self.min_step is not None:
            return self.min_step
        return 1e-14 * abs(span)


@dataclass(frozen=True)
class OdeSystem:
    """First-order system y' = f(t, y) with an optional singularity predicate.

    f maps (t, state) to the state derivative, both of length dim.
    singular_guard(t, state) returns True where f is undefined; the stepper
    treats flagged states as impassable and shrinks toward them instead of
    evaluating f there.
    """

    f: callable
    dim: int
    singular_guard: callable = None


@dataclass(frozen=True)
class Event:
    """One located event: its kind tag, location, state, and the watched
    component index (None for guard and span-end events)."""

    kind: str
    t: float
    state: np.ndarray
    component: int | None = None


@dataclass
class Trajectory:
    """Result of one integration: nodes, states, dense segments, events.

    Nodes are chronological (ascending for t1 > t0, descending otherwise).
    ``complete`` is True only when the span end was reached; event-terminated
    and guard-terminated runs leave it False.
    """

    t: np.ndarray
    y: np.ndarray
    events: list
    complete: bool
    direction: float
    _seg_t0: np.ndarray = field(repr=False, default=None)
    _seg_h: np.ndarray = field(repr=False, default=None)
    _seg_y0: np.ndarray = field(repr=False, default=None)
    _seg_q: np.ndarray = field(repr=False, default=None)

    @property
    def t_end(self):
        return float(self.t[-1])

    @property
    def state_end(self):
        return self.y[-1]

    def _segment_index(self, t):
        lo, hi = (self.t[0], self.t[-1]) if self.direction > 0 else (self.t[-1], self.t[0])
        pad = 1e-12 * max(1.0, abs(hi - lo))
        if t < lo - pad or t > hi + pad:
            raise OutOfSpanError(
                f"t={t!r} outside integrated span [{lo!r}, {hi!r}]"
            )
        key = self.t if self.direction > 0 else -self.t
        i = int(np.searchsorted(key, t if self.direction > 0 else -t, side="right")) - 1
        return min(max(i, 0), len(self._seg_t0) - 1)

    def eval(self, t):
        """State at time t from the stored quartic interpolants.

        Exact stored states are returned at the nodes themselves.
        Accepts a scalar or an array; arrays come back with shape (n, dim).
        """
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((ts.size, self.y.shape[1]))
        for j, tj in enumerate(ts):
            hit = np.nonzero(self.t == tj)[0]
            if hit.size:
                out[j] = self.y[hit[0]]
                continue
            i = self._segment_index(tj)
            theta = (tj - self._seg_t0[i]) / self._seg_h[i]
            powers = np.array([theta, theta**2, theta**3, theta**4])
            out[j] = self._seg_y0[i] + self._seg_h[i] * (self._seg_q[i] @ powers)
        if np.isscalar(t) or np.asarray(t).ndim == 0:
            return out[0]
        return out

    def derivative(self, t, order=1):
        """First or second time derivative of the interpolant at t."""
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((ts.size, self.y.shape[1]))
        for j, tj in enumerate(ts):
            i = self._segment_index(tj)
            h = self._seg_h[i]
            theta = (tj - self._seg_t0[i]) / h
            if order == 1:
                powers = np.array([1.0, 2 * theta, 3 * theta**2, 4 * theta**3])
                out[j] = self._seg_q[i] @ powers
            else:
                powers = np.array([0.0, 2.0, 6 * theta, 12 * theta**2])
                out[j] = (self._seg_q[i] @ powers) / h
        if np.isscalar(t) or np.asarray(t).ndim == 0:
            return out[0]
        return out

    def event_of_kind(self, kind):
        for ev in self.events:
            if ev.kind == kind:
                return ev
        return None


def dense_eval(trajectory, t):
    """Evaluate a trajectory's dense output at t (scalar or array)."""
    return trajectory.eval(t)


# ------------------------------------------------------------- internals


class _GuardSignal(Exception):
    """Internal: a stage landed on a guarded state; retry with smaller h."""


def _initial_step(f, t0, y0, f0, direction, tol, span):
    # Hairer/Norsett/Wanner starting-step heuristic, clipped to the span.
    scale = tol.atol + tol.rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    try:
        f1 = np.asarray(f(t0 + h0 * direction, y1), dtype=float)
        d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    except (ZeroDivisionError, OverflowError, ValueError):
        d2 = np.inf
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, tol.max_step, span)


def _try_step(f, guard, t, y, h_signed, k1, tol):
    """One trial step.  Returns (y_new, err_norm, K); raises _GuardSignal."""
    dim = y.shape[0]
    K = np.empty((7, dim))
    K[0] = k1
    for i in range(1, 6):
        ti = t + _C[i] * h_signed
        yi = y + h_signed * (_A[i] @ K[:i])
        if guard is not None and guard(ti, yi):
            raise _GuardSignal
        try:
            K[i] = f(ti, yi)
        except (ZeroDivisionError, OverflowError, ValueError):
            return y, np.inf, K
    y_new = y + h_signed * (_B @ K[:6])
    t_new = t + h_signed
    if guard is not None and guard(t_new, y_new):
        raise _GuardSignal
    try:
        K[6] = f(t_new, y_new)
    except (ZeroDivisionError, OverflowError, ValueError):
        return y, np.inf, K
    err = h_signed * (K.T @ _E)
    scale = tol.atol + tol.rtol * np.maximum(np.abs(y), np.abs(y_new))
    with np.errstate(invalid="ignore", over="ignore"):
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
    return y_new, err_norm, K


def _interp(y0, h_signed, q, theta):
    powers = np.array([theta, theta**2, theta**3, theta**4])
    return y0 + h_signed * (q @ powers)


def _bisect_theta(y0, h_signed, q, g, lo, hi, theta_tol):
    """Root of g on the step interpolant, bracket width down to theta_tol."""
    glo = g(_interp(y0, h_signed, q, lo))
    while hi - lo > theta_tol:
        mid = 0.5 * (lo + hi)
        gm = g(_interp(y0, h_signed, q, mid))
        if gm == 0.0:
            return mid
        if (gm > 0.0) == (glo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _locate_step_events(y, y_new, h_signed, q, zero_cross, cap_components, cap, min_step):
    """Earliest watched event inside one accepted step, or None."""
    theta_tol = max(min_step / abs(h_signed), 1e-14)
    found = []
    for c in zero_cross:
        a, b = y[c], y_new[c]
        if a == 0.0:
            continue
        if b == 0.0 or (a > 0.0) != (b > 0.0):
            theta = _bisect_theta(
                y, h_signed, q, lambda s, c=c: s[c], 0.0, 1.0, theta_tol
            )
            found.append((theta, EVENT_ZERO_CROSS, c))
    for c in cap_components:
        a, b = abs(y[c]), abs(y_new[c])
        if a >= cap:
            continue
        if b >= cap:
            theta = _bisect_theta(
                y, h_signed, q, lambda s, c=c: abs(s[c]) - cap, 0.0, 1.0, theta_tol
            )
            found.append((theta, EVENT_VALUE_CAP, c))
    if not found:
        return None
    found.sort(key=lambda rec: rec[0])
    return found[0]


# ------------------------------------------------------------- integrate


def integrate(
    system,
    t0,
    t1,
    state0,
    tol=None,
    *,
    zero_cross=(),
    cap_components=None,
    max_steps=500_000,
):
    """Integrate system.f from (t0, state0) toward t1.

    Parameters
    ----------
    system : OdeSystem
    t0, t1 : floats, t1 != t0; descending spans are allowed.
    state0 : initial state, length system.dim.
    tol : Tolerances, defaults to Tolerances().
    zero_cross : component indices watched for sign changes (terminal).
    cap_components : component indices watched against tol.value_cap
        (terminal); default all components.
    max_steps : hard cap on accepted steps, a runaway diagnostic only.

    Returns
    -------
    Trajectory.  Ends at t1 (complete=True, final ReachedSpanEnd event) or
    at the first terminal event.  A singular-guard stall ends the
    trajectory at the last reachable node with a SingularGuardTripped
    event rather than an error.

    Raises
    ------
    GuardTrippedError    if state0 itself is flagged by the guard.
    StepUnderflowError   if error control demands a step below min_step
                         away from any guarded state; the partial
                         trajectory rides on the exception.
    """
    if t1 == t0:
        raise ValueError("integration span is empty (t1 == t0)")
    if tol is None:
        tol = Tolerances()
    y = np.array(state0, dtype=float)
    if y.shape != (system.dim,):
        raise ValueError(f"state0 must have shape ({system.dim},)")
    if cap_components is None:
        cap_components = tuple(range(system.dim))
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    min_step = tol.resolve_min_step(span)
    guard = system.singular_guard
    if guard is not None and guard(t0, y):
        raise GuardTrippedError(f"initial state at t={t0!r} is singular")

    nodes = [t0]
    states = [y.copy()]
    seg_t0, seg_h, seg_y0, seg_q = [], [], [], []
    events = []
    complete = False

    def _package():
        return Trajectory(
            t=np.array(nodes),
            y=np.array(states),
            events=events,
            complete=complete,
            direction=direction,
            _seg_t0=np.array(seg_t0) if seg_t0 else np.empty(0),
            _seg_h=np.array(seg_h) if seg_h else np.empty(0),
            _seg_y0=np.array(seg_y0) if seg_y0 else np.empty((0, system.dim)),
            _seg_q=np.array(seg_q) if seg_q else np.empty((0, system.dim, 4)),
        )

    try:
        k1 = np.asarray(system.f(t0, y), dtype=float)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise GuardTrippedError(f"right-hand side undefined at t0: {exc}") from exc
    t = t0
    h = _initial_step(system.f, t0, y, k1, direction, tol, span)
    h = max(h, min_step)
    guard_seen = False
    rejected_prev = False

    while True:
        if len(nodes) > max_steps:
            raise RuntimeError(f"exceeded {max_steps} accepted steps")
        remaining = direction * (t1 - t)
        last = h >= remaining
        h_eff = remaining if last else h

        try:
            y_new, err_norm, K = _try_step(
                system.f, guard, t, y, h_eff * direction, k1, tol
            )
        except _GuardSignal:
            guard_seen = True
            h = 0.5 * h_eff
            if h < min_step:
                events.append(Event(EVENT_GUARD, t, y.copy(), None))
                return _package()
            rejected_prev = True
            continue

        if not (err_norm <= 1.0):  # also catches nan/inf
            if np.isfinite(err_norm):
                factor = max(_MIN_FACTOR, _SAFETY * err_norm**_ERR_EXP)
            else:
                factor = _MIN_FACTOR
            h = h_eff * factor
            if h < min_step:
                if guard_seen:
                    events.append(Event(EVENT_GUARD, t, y.copy(), None))
                    return _package()
                raise StepUnderflowError(
                    f"step below min_step={min_step!r} at t={t!r}",
                    trajectory=_package(),
                )
            rejected_prev = True
            continue

        # accepted
        h_signed = h_eff * direction
        t_new = t1 if last else t + h_signed
        q = K.T @ _P
        seg_t0.append(t)
        seg_h.append(h_signed)
        seg_y0.append(y.copy())
        seg_q.append(q)

        hit = _locate_step_events(
            y, y_new, h_signed, q, zero_cross, cap_components,
            tol.value_cap, min_step,
        )
        if hit is not None:
            theta, kind, comp = hit
            t_e = t + theta * h_signed
            y_e = _interp(y, h_signed, q, theta)
            nodes.append(t_e)
            states.append(y_e)
            events.append(Event(kind, t_e, y_e, comp))
            return _package()

        nodes.append(t_new)
        states.append(y_new)
        guard_seen = False
        if last:
            events.append(Event(EVENT_SPAN_END, t_new, y_new.copy(), None))
            complete = True
            return _package()

        if err_norm == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = min(_MAX_FACTOR, _SAFETY * err_norm**_ERR_EXP)
        if rejected_prev:
            factor = min(1.0, factor)
        rejected_prev = False
        h = min(h_eff * factor, tol.max_step)
        h = max(h, min_step)
        t, y, k1 = t_new, y_new, K[6]
