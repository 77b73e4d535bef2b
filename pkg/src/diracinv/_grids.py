"""Uniform-grid helpers shared by the solver modules."""

import numpy as np

from .errors import InputError


def uniform_step(xs, tol=1e-10):
    """Step of a uniform ascending grid; raises InputError otherwise."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 2:
        raise InputError("grid must be a 1-d array with at least two nodes")
    steps = np.diff(xs)
    h = steps[0]
    if h <= 0 or np.max(np.abs(steps - h)) > tol * max(1.0, abs(h)):
        raise InputError("grid must be uniform and ascending")
    return h


def trapezoid_weights(n_nodes, h):
    w = np.full(n_nodes, h)
    w[0] = w[-1] = 0.5 * h
    return w


def simpson_weights(n_nodes, h):
    """Composite Simpson weights; requires an even number of intervals."""
    if n_nodes < 3 or n_nodes % 2 == 0:
        raise InputError(f"Simpson rule needs an even interval count, got {n_nodes - 1}")
    w = np.full(n_nodes, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)
