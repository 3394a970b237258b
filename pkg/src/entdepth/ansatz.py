"""Product states of M separable groups, restricted to at most two excitations.

A group state is ``a|0 exc> + b|1 exc> + c|2 exc>`` with real amplitudes,
``a >= 0`` and ``c <= 0`` (the sign convention that minimizes the two-photon
probability; complex phases never help and are not represented).  The
one- and two-photon probabilities of the M-group product state are evaluated
exactly, including the degenerate cases where some group has ``a = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

NORM_TOL = 1e-12
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class GroupAmplitudes:
    """Amplitudes (a, b, c) of one group in the 0/1/2-excitation subspace.

    Invariants: a >= 0, c <= 0, and a^2 + b^2 + c^2 = 1 within 1e-12.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a >= 0.0):
            raise ValueError(f"a must be >= 0, got {self.a}")
        if not (self.c <= 0.0):
            raise ValueError(f"c must be <= 0, got {self.c}")
        norm = self.a * self.a + self.b * self.b + self.c * self.c
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"amplitudes not normalized: |a|^2+|b|^2+|c|^2 = {norm!r}")

    @classmethod
    def from_ab(cls, a: float, b: float) -> "GroupAmplitudes":
        """Build a normalized group with c = -sqrt(1 - a^2 - b^2)."""
        rem = 1.0 - a * a - b * b
        if rem < -NORM_TOL:
            raise ValueError(f"a^2 + b^2 = {a * a + b * b!r} exceeds 1")
        return cls(a, b, -math.sqrt(max(rem, 0.0)))


@dataclass(frozen=True)
class AnsatzState:
    """Ordered product of M >= 1 separable groups."""

    groups: tuple

    def __post_init__(self):
        groups = tuple(self.groups)
        object.__setattr__(self, "groups", groups)
        if len(groups) < 1:
            raise ValueError("state needs at least one group")
        for g in groups:
            if not isinstance(g, GroupAmplitudes):
                raise TypeError(f"expected GroupAmplitudes, got {type(g)!r}")

    @property
    def M(self) -> int:
        return len(self.groups)

    @classmethod
    def symmetric(cls, a: float, b: float, M: int) -> "AnsatzState":
        """M identical groups with c fixed by normalization."""
        g = GroupAmplitudes.from_ab(a, b)
        return cls((g,) * M)


@dataclass(frozen=True)
class ProbabilityPair:
    """One- and two-photon probabilities of a state."""

    p1: float
    p2: float

    def __post_init__(self):
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError(f"probabilities out of range: {self.p1!r}, {self.p2!r}")


def _amplitude_sums(state):
    """Pole-free building blocks of p1 and p2.

    Returns (one_amp, pair_amp, c_amp) where, with A = prod(a_i),
      one_amp  = A * sum_i b_i/a_i
      pair_amp = A * sum_{i<j} b_i b_j / (a_i a_j)
      c_amp    = A * sum_i c_i/a_i
    evaluated so that groups with a_i = 0 contribute their exact limits.
    """
    groups = state.groups
    zeros = [i for i, g in enumerate(groups) if g.a == 0.0]
    if not zeros:
        ts = [g.b / g.a for g in groups]
        A = math.prod(g.a for g in groups)
        S = math.fsum(ts)
        Q = math.fsum(t * t for t in ts)
        one = A * S
        pair = A * 0.5 * (S * S - Q)
        camp = A * math.fsum(g.c / g.a for g in groups)
        return one, pair, camp
    if len(zeros) == 1:
        z = zeros[0]
        rest = [g for i, g in enumerate(groups) if i != z]
        R = math.prod(g.a for g in rest)
        gz = groups[z]
        one = gz.b * R
        pair = gz.b * R * math.fsum(g.b / g.a for g in rest)
        camp = gz.c * R
        return one, pair, camp
    if len(zeros) == 2:
        z1, z2 = zeros
        R = math.prod(g.a for i, g in enumerate(groups) if i not in (z1, z2))
        return 0.0, groups[z1].b * groups[z2].b * R, 0.0
    return 0.0, 0.0, 0.0


def p1_of_state(state: AnsatzState) -> float:
    """Probability of exactly one collective excitation.

    Exact for any admissible state; states with two or more fully excited
    groups (a = 0) have no overlap with the one-excitation sector and give 0.
    """
    one, _, _ = _amplitude_sums(state)
    return one * one / state.M


def p2_of_state(state: AnsatzState, n_atoms: float | None = None,
                group_size: float | None = None) -> float:
    """Probability of exactly two collective excitations.

    By default the finite-size corrections are dropped (they only lower the
    value in the regime of interest).  Passing ``n_atoms`` restores the
    1/(1 - 1/N) prefactor and ``group_size`` the sqrt(1 - 1/K) weight on the
    doubly-excited group amplitudes.
    """
    _, pair, camp = _amplitude_sums(state)
    M = state.M
    cw = 1.0 if group_size is None else math.sqrt(1.0 - 1.0 / group_size)
    amp = _SQRT2 * pair + cw * camp
    p2 = amp * amp / (M * M)
    if n_atoms is not None:
        p2 /= 1.0 - 1.0 / n_atoms
    return p2


def probabilities(state: AnsatzState) -> ProbabilityPair:
    """Both photon probabilities of a state."""
    return ProbabilityPair(p1_of_state(state), p2_of_state(state))


def symmetric_probabilities(a: float, b: float, M: int) -> ProbabilityPair:
    """(p1, p2) of the M-fold symmetric state with amplitudes (a, b).

    Closed forms: p1 = M a^(2M-2) b^2 and
    p2 = ((M-1) b^2 a^(M-2)/sqrt(2) + c a^(M-1))^2 with c = -sqrt(1-a^2-b^2).
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not (0.0 < a <= 1.0):
        raise ValueError(f"a must lie in (0, 1], got {a}")
    rem = 1.0 - a * a - b * b
    if rem < -NORM_TOL:
        raise ValueError(f"a^2 + b^2 = {a * a + b * b!r} exceeds 1")
    c = -math.sqrt(max(rem, 0.0))
    b2 = b * b
    p1 = M * a ** (2 * M - 2) * b2
    if M == 1:
        amp = c
    else:
        amp = (M - 1) * b2 * a ** (M - 2) / _SQRT2 + c * a ** (M - 1)
    return ProbabilityPair(min(p1, 1.0), min(amp * amp, 1.0))
