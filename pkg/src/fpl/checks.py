"""Pointwise inequality checks on explicit distance tables.

These work for configurations taken from any metric space, including
samples of continuous maps on the line, so nothing here needs a
:class:`~fpl.metric.FiniteMetricSpace`.  Every check returns the slack
``RHS - LHS``; the inequality holds at the configuration iff slack >= 0.

A triple table is a 6x6 matrix over the points ``x, y, z, Tx, Ty, Tz`` (in
that order); a pair table is 4x4 over ``x, y, Tx, Ty``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .metric import FiniteMetricSpace

TRIPLE_LABELS = ("x", "y", "z", "Tx", "Ty", "Tz")
PAIR_LABELS = ("x", "y", "Tx", "Ty")


class ConfigurationError(ValueError):
    pass


def _check_table(d, size: int, distinct: int):
    if len(d) != size or any(len(row) != size for row in d):
        raise ConfigurationError(f"expected a {size}x{size} distance table")
    for i in range(size):
        if d[i][i] != 0:
            raise ConfigurationError(f"nonzero self-distance at {i}")
        for j in range(size):
            if d[i][j] < 0:
                raise ConfigurationError(f"negative distance at ({i},{j})")
            if d[i][j] != d[j][i]:
                raise ConfigurationError(f"asymmetric distance at ({i},{j})")
    names = TRIPLE_LABELS if size == 6 else PAIR_LABELS
    for i in range(distinct):
        for j in range(i + 1, distinct):
            if d[i][j] == 0:
                raise ConfigurationError(f"points {names[i]} and {names[j]} coincide")


def line_table(points: Sequence, images: Sequence) -> list:
    """Distance table for points on the real line and their images."""
    pts = list(points) + list(images)
    return [[abs(p - q) for q in pts] for p in pts]


def space_table(space: FiniteMetricSpace, T, indices: Sequence[int]) -> list:
    """Distance table for ``indices`` of a finite space followed by their images."""
    idx = list(indices) + [T[i] for i in indices]
    return [[space.dist[i][j] for j in idx] for i in idx]


def _perimeters(d):
    p_image = d[3][4] + d[4][5] + d[3][5]
    p_source = d[0][1] + d[1][2] + d[0][2]
    moves = (d[0][3], d[1][4], d[2][5])
    return p_image, p_source, moves


def check_gen_crr_triple(d6, alpha, lam) -> object:
    """Slack of the three-point CRR inequality at one triple."""
    _check_table(d6, 6, 3)
    p_image, p_source, moves = _perimeters(d6)
    return alpha * p_source + lam * sum(moves) - p_image


def check_crr_pair(d4, a, b, c):
    """Slack of ``d(Tx,Ty) <= a d(x,y) + b d(x,Tx) + c d(y,Ty)``."""
    _check_table(d4, 4, 2)
    return a * d4[0][1] + b * d4[0][2] + c * d4[1][3] - d4[2][3]


def check_consequence_pair(d4, alpha, lam, which: str):
    """Slack of one of the two-point consequences of the three-point inequality.

    ``w1``: ``d(Tx,Ty) <= alpha d(x,y) + lam (d(x,Tx) + d(y,Ty)/2)``, which
    holds when x is an accumulation point where T is continuous.
    ``q3``: the symmetrised form
    ``d(Tx,Ty) <= alpha d(x,y) + (3 lam / 4)(d(x,Tx) + d(y,Ty))``.
    """
    _check_table(d4, 4, 2)
    dxy, dxt, dyt, lhs = d4[0][1], d4[0][2], d4[1][3], d4[2][3]
    if which == "w1":
        return alpha * dxy + lam * (dxt + dyt / 2) - lhs
    if which == "q3":
        return alpha * dxy + 3 * lam / 4 * (dxt + dyt) - lhs
    raise ValueError(f"unknown inequality selector {which!r} (w1 or q3)")


def _call(f, *args):
    return f.evaluate(*args) if hasattr(f, "evaluate") else f(*args)


def check_f_triple(d6, alpha, F: Callable):
    """Slack with ``F(d(x,Tx), d(y,Ty), d(z,Tz))`` in place of the displacement term."""
    _check_table(d6, 6, 3)
    p_image, p_source, moves = _perimeters(d6)
    return alpha * p_source + _call(F, *moves) - p_image


def check_b_triple(d6, alpha, beta1: Callable, beta2: Callable, beta3: Callable):
    """Slack with a per-point weight ``beta_i(d_i) * d_i`` on each displacement."""
    _check_table(d6, 6, 3)
    p_image, p_source, moves = _perimeters(d6)
    weighted = sum(_call(b, m) * m for b, m in zip((beta1, beta2, beta3), moves))
    return alpha * p_source + weighted - p_image


def check_phif_triple(d6, phi: Callable, F: Callable):
    """Slack with ``phi(longest side) + F(displacements)`` on the right."""
    _check_table(d6, 6, 3)
    p_image, _, moves = _perimeters(d6)
    longest = max(d6[0][1], d6[1][2], d6[0][2])
    return _call(phi, longest) + _call(F, *moves) - p_image


def as_exact(table) -> list:
    return [[Fraction(v) for v in row] for row in table]
