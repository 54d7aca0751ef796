"""Shared numeric helpers for tests."""

import numpy as np


def f_alpha(alpha: float, x, y):
    """Second-difference kernel |x - y|^alpha + (x + y)^alpha - 2 x^alpha.

    The monotonicity and envelope bounds of this kernel (in x, for fixed
    y > 0) drive several decay arguments; tests probe it on dense grids.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return np.abs(x - y) ** alpha + (x + y) ** alpha - 2.0 * x**alpha
