import numpy as np

from .errors import NotPD


def projected_ascent(
    f,
    grad,
    x0,
    project=None,
    f0=None,
    max_steps=100,
    tol=1e-6,
    step0=1.0,
    shrink=0.5,
    slope=1e-4,
    min_step=1e-20,
    trace=None,
):
    """Projected gradient ascent with Armijo backtracking along the projection arc.

    ``f`` may raise :class:`NotPD` (or return a non-finite value) for points
    outside its domain; such trial points are treated as rejected steps.
    Stops once an accepted step improves ``f`` by less than ``tol``, after
    ``max_steps`` accepted steps, or when no step size is accepted.

    Accepted objective values are appended to ``trace`` when given.

    Returns ``(x, fx, n_steps, stalled)``.
    """
    x = np.array(x0, dtype=float)
    fx = f(x) if f0 is None else f0
    t = step0
    n = 0
    stalled = False
    while n < max_steps:
        g = grad(x)
        accepted = False
        stationary = False
        while t >= min_step:
            trial = x + t * g
            if project is not None:
                trial = project(trial)
            delta = trial - x
            ascent = float(np.sum(g * delta))
            if not np.any(delta):
                stationary = True
                break
            try:
                ft = f(trial)
            except NotPD:
                ft = -np.inf
            if np.isfinite(ft) and ft >= fx + slope * ascent:
                accepted = True
                break
            t *= shrink
        if stationary:
            break
        if not accepted:
            stalled = True
            break
        n += 1
        gain = ft - fx
        x, fx = trial, ft
        if trace is not None:
            trace.append(fx)
        t = min(step0, 2.0 * t)
        if gain < tol:
            break
    return x, fx, n, stalled
