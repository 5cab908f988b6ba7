"""Parameterized single-element families used in examples, probes and studies."""

from __future__ import annotations

import math

from .geometry import Simplex


def right_angled(s: float, eps: float = 2.0) -> Simplex:
    """(0,0), (s,0), (0,s^eps)."""
    return Simplex([[0.0, 0.0], [s, 0.0], [0.0, s**eps]])


def dagger(s: float, eps: float = 1.5, delta: float = 2.0) -> Simplex:
    """(0,0), (s,0), (s^delta, s^eps); good for 1 < eps < delta."""
    return Simplex([[0.0, 0.0], [s, 0.0], [s**delta, s**eps]])


def blade(s: float, eps: float = 2.0) -> Simplex:
    """(0,0), (2s,0), (s,s^eps)."""
    return Simplex([[0.0, 0.0], [2.0 * s, 0.0], [s, s**eps]])


def blade_delta(s: float, delta: float = 0.1) -> Simplex:
    """(0,0), (2s,0), (s, delta*s)."""
    return Simplex([[0.0, 0.0], [2.0 * s, 0.0], [s, delta * s]])


def sliver(s: float, eps1: float = 1.5, eps2: float = 1.0) -> Simplex:
    """(s^eps2,0,0), (-s^eps2,0,0), (0,-s,s^eps1), (0,s,s^eps1)."""
    a = s**eps2
    b = s**eps1
    return Simplex([[a, 0.0, 0.0], [-a, 0.0, 0.0], [0.0, -s, b], [0.0, s, b]])


def tet_case_I(s: float, eps: float = 3.0, delta: float = 2.0) -> Simplex:
    """(0,0,0), (s,0,0), (0,s^eps,0), (0,0,s^delta)."""
    return Simplex([[0.0, 0.0, 0.0], [s, 0.0, 0.0], [0.0, s**eps, 0.0], [0.0, 0.0, s**delta]])


def tet_case_II(s: float, eps: float = 3.0) -> Simplex:
    """(0,0,0), (s,0,0), (s/2,s^eps,0), (0,0,s)."""
    return Simplex([[0.0, 0.0, 0.0], [s, 0.0, 0.0], [s / 2.0, s**eps, 0.0], [0.0, 0.0, s]])


def good_tet(s: float, eps: float = 1.5, delta: float = 2.0, gamma: float = 2.5) -> Simplex:
    """Good anisotropic tetrahedron with 1 < eps < delta < gamma.

    (0,0,0), (2s,0,0), (2s - sqrt(4s^2 - s^(2 gamma)), s^gamma, 0), (s^delta, 0, s^eps).
    """
    x3 = 2.0 * s - math.sqrt(4.0 * s * s - s ** (2.0 * gamma))
    return Simplex([[0.0, 0.0, 0.0], [2.0 * s, 0.0, 0.0], [x3, s**gamma, 0.0], [s**delta, 0.0, s**eps]])
