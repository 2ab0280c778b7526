import numpy as np


def rk4_step(fn, t, x, dt):
    """
    One classical 4th order Runge-Kutta step

    Parameters
    ----------
    fn : function
        right hand side f(t, x), returns an array shaped like x

    t : float
        time at the start of the step

    x : numpy.ndarray
        state at the start of the step

    dt : float
        step length

    Returns
    -------
    numpy.ndarray
        state at t + dt
    """
    half = 0.5 * dt
    k1 = fn(t, x)
    k2 = fn(t + half, x + half * k1)
    k3 = fn(t + half, x + half * k2)
    k4 = fn(t + dt, x + dt * k3)

    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def all_finite(x):
    return bool(np.all(np.isfinite(x)))
