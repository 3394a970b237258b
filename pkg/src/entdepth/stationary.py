"""Stationary structure of the constrained two-photon minimization.

For a seed group (a, b, c), every other group of an interior extremum must
satisfy the pair identities

    a_i c_i = a c                                  (product identity)
    b_i (1/c_i + sqrt2/a_i) = b (1/c + sqrt2/a)    (ratio identity)

together with normalization.  Eliminating b_i and c_i leaves a quartic in
a_i^2 whose four roots are available in closed form (one root is the seed
itself).  Assigning one of the four root branches to each group defines a
"configuration" (m1, m2, m3, m4); sweeping configurations reduces the global
minimization to a finite family of two-parameter problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _sp_minimize

from .ansatz import GroupAmplitudes
from .errors import BranchDegeneracyError

_SQRT2 = math.sqrt(2.0)
_OMEGA = complex(math.cos(2.0 * math.pi / 3.0), math.sin(2.0 * math.pi / 3.0))
_OMEGA_BAR = _OMEGA.conjugate()

RESIDUAL_TOL = 1e-9
IMAG_TOL = 1e-9
MAX_CONFIG_M = 200


@dataclass(frozen=True)
class BranchSolution:
    """One physical stationarity partner of a seed group.

    ``branch_index`` numbers the four closed-form roots (1 = the seed).
    ``residual`` is the maximum violation of the two pair identities.
    """

    branch_index: int
    amplitudes: GroupAmplitudes
    residual: float

    def __post_init__(self):
        if self.branch_index not in (1, 2, 3, 4):
            raise ValueError(f"branch_index must be 1..4, got {self.branch_index}")
        if not (0.0 <= self.residual <= RESIDUAL_TOL):
            raise ValueError(f"residual {self.residual!r} exceeds {RESIDUAL_TOL}")


@dataclass(frozen=True)
class Configuration:
    """Multiplicities of the four stationary branches across the M groups."""

    m1: int
    m2: int
    m3: int
    m4: int

    def __post_init__(self):
        counts = (self.m1, self.m2, self.m3, self.m4)
        if any(int(m) != m or m < 0 for m in counts):
            raise ValueError(f"multiplicities must be nonnegative integers: {counts}")
        if self.m1 < 1:
            raise ValueError("the seed branch must be occupied (m1 > 0)")

    @property
    def M(self) -> int:
        return self.m1 + self.m2 + self.m3 + self.m4

    @property
    def delta_m(self) -> int:
        """Number of groups off the seed branch."""
        return self.m2 + self.m3 + self.m4

    def as_tuple(self):
        return (self.m1, self.m2, self.m3, self.m4)


def _quartic_roots(a, b, c):
    """Complex closed-form values of the four a_i candidates (array-safe).

    The first root is the seed; the other three come from the resolvent cubic
    evaluated with principal complex square/cube roots and the unit factors
    exp(+-2i pi/3).  Realness is decided later by an |Im| filter.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    x0 = 1.0 - a * a - 2.0 * _SQRT2 * a * c
    x1 = 1.0 - 6.0 * c * c * (1.0 - c * c - _SQRT2 * a * c) / (x0 * x0)
    inner = (
        2.0 * a**2 * (1.0 - a**2) ** 2
        + 8.0 * c**2 * (1.0 - c**2) ** 2
        + 2.0 * _SQRT2 * a * c * (6.0 * a**4 + 12.0 * c**4 - 14.0 * c**2 + 3.0
                                  + 24.0 * a**2 * c**2 - 7.0 * a**2)
        + a**2 * (48.0 * c**4 - 36.0 * c**2 + 48.0 * a**2 * c**2)
        - b**2
    )
    x03 = x0**3
    x2 = (1.0
          - (3.0 * math.sqrt(3.0) * c * c * np.abs(b) / x03) * np.sqrt(inner.astype(complex))
          - (9.0 * c * c / x03) * (2.0 * a**2 * c**2
                                   + _SQRT2 * a * c * (a**2 + 2.0 * c**2 - 3.0)
                                   + b**2)) ** (1.0 / 3.0)
    ratio = x1 / x2
    base = x0 / 3.0
    r1 = np.sqrt((base * (1.0 + _OMEGA * ratio + _OMEGA_BAR * x2)).astype(complex))
    r2 = np.sqrt((base * (1.0 + ratio + x2)).astype(complex))
    r3 = np.sqrt((base * (1.0 + _OMEGA_BAR * ratio + _OMEGA * x2)).astype(complex))
    return np.stack([a.astype(complex), r1, r2, r3])


def _partner_bc(a, b, c, ai):
    """(b_i, c_i) rebuilt from the two pair identities for a given root a_i."""
    ci = a * c / ai
    k20 = b * (1.0 / c + _SQRT2 / a)
    bi = k20 / (1.0 / ci + _SQRT2 / ai)
    return bi, ci


def _norm_residual(a, b, c, ai):
    bi, ci = _partner_bc(a, b, c, ai)
    return ai * ai + bi * bi + ci * ci - 1.0


def _polish_root(a, b, c, ai, iters=60):
    """Newton refinement of a root of the normalization residual in a_i."""
    k19 = a * c
    k20 = b * (1.0 / c + _SQRT2 / a)
    x = ai
    for _ in range(iters):
        inv_d = 1.0 / (x / k19 + _SQRT2 / x)
        r = x * x + (k20 * inv_d) ** 2 + (k19 / x) ** 2 - 1.0
        d_inv_d = -(1.0 / k19 - _SQRT2 / (x * x)) * inv_d * inv_d
        dr = 2.0 * x + 2.0 * k20 * k20 * inv_d * d_inv_d - 2.0 * k19 * k19 / x**3
        if dr == 0.0:
            break
        step = r / dr
        nx = x - step
        if not (0.0 < nx <= 1.0):
            break
        x = nx
        if abs(step) < 1e-16:
            break
    return x


def verify_stationarity(seed: GroupAmplitudes, candidate: GroupAmplitudes) -> float:
    """Maximum violation of the two pair identities; 0 for an exact partner."""
    for g, name in ((seed, "seed"), (candidate, "candidate")):
        if not (g.a > 0.0 and g.c < 0.0):
            raise ValueError(f"{name} must have a > 0 and c < 0")
    r_prod = abs(seed.a * seed.c - candidate.a * candidate.c)
    lhs = candidate.b * (1.0 / candidate.c + _SQRT2 / candidate.a)
    rhs = seed.b * (1.0 / seed.c + _SQRT2 / seed.a)
    return max(r_prod, abs(lhs - rhs))


def branch_solutions(seed: GroupAmplitudes) -> list:
    """All physical stationarity partners of a seed group (at most four).

    Complex or unphysical roots (a_i outside [0, 1], |b_i| or |c_i| beyond
    normalization) are discarded; surviving roots are Newton-polished so the
    returned groups are normalized to machine precision.  Branch 1 is always
    the seed itself.
    """
    a, b, c = seed.a, seed.b, seed.c
    if not (0.0 < a < 1.0):
        raise BranchDegeneracyError(f"seed a must lie in (0, 1), got {a}")
    if b == 0.0 or c == 0.0:
        raise BranchDegeneracyError("seed with b = 0 or c = 0 has no branch structure")
    roots = _quartic_roots(a, b, c)
    out = [BranchSolution(1, seed, 0.0)]
    for k in (1, 2, 3):
        root = complex(roots[k])
        if abs(root.imag) > IMAG_TOL:
            continue
        ai = root.real
        if not (0.0 < ai <= 1.0):
            continue
        ai = _polish_root(a, b, c, ai)
        bi, ci = _partner_bc(a, b, c, ai)
        if abs(bi) > 1.0 or ci < -1.0 or ai * ai + bi * bi > 1.0:
            continue
        if abs(ai * ai + bi * bi + ci * ci - 1.0) > 1e-12:
            continue
        cand = GroupAmplitudes(ai, bi, ci)
        res = verify_stationarity(seed, cand)
        if res <= RESIDUAL_TOL:
            out.append(BranchSolution(k + 1, cand, res))
    return out


def branch_amplitude_arrays(a, b):
    """Vectorized branch partners for seed arrays (a, b) with c from norm.

    Returns (ai, bi, ci, valid) of shape (4,) + a.shape.  Entry 0 is the seed
    branch.  Invalid entries (complex or unphysical roots, or degenerate
    seeds) are masked out and hold NaN.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rem = 1.0 - a * a - b * b
    seed_ok = (a > 1e-12) & (a < 1.0) & (np.abs(b) > 1e-14) & (rem > 1e-14)
    c = -np.sqrt(np.clip(rem, 0.0, None))
    safe_a = np.where(seed_ok, a, 0.5)
    safe_b = np.where(seed_ok, b, 0.5)
    safe_c = np.where(seed_ok, c, -0.5)

    roots = _quartic_roots(safe_a, safe_b, safe_c)
    k19 = safe_a * safe_c
    k20 = safe_b * (1.0 / safe_c + _SQRT2 / safe_a)

    ai = np.real(roots)
    real_ok = np.abs(np.imag(roots)) <= IMAG_TOL
    ai = np.where(real_ok & (ai > 1e-12) & (ai <= 1.0), ai, np.nan)
    ai[0] = np.where(seed_ok, safe_a, np.nan)

    with np.errstate(invalid="ignore", divide="ignore"):
        # vectorized Newton polish of the nontrivial roots
        x = ai.copy()
        for _ in range(40):
            inv_d = 1.0 / (x / k19 + _SQRT2 / x)
            r = x * x + (k20 * inv_d) ** 2 + (k19 / x) ** 2 - 1.0
            d_inv_d = -(1.0 / k19 - _SQRT2 / (x * x)) * inv_d * inv_d
            dr = 2.0 * x + 2.0 * k20 * k20 * inv_d * d_inv_d - 2.0 * k19 * k19 / x**3
            step = np.where(dr != 0.0, r / dr, 0.0)
            nx = x - step
            ok = (nx > 0.0) & (nx <= 1.0)
            x = np.where(ok, nx, x)
        x[0] = ai[0]
        ci = k19 / x
        bi = k20 / (1.0 / ci + _SQRT2 / x)
        bi[0] = np.where(seed_ok, safe_b, np.nan)
        ci[0] = np.where(seed_ok, safe_c, np.nan)
        norm = x * x + bi * bi + ci * ci
        valid = (np.isfinite(x) & (x > 0.0) & (x <= 1.0)
                 & (np.abs(bi) <= 1.0) & (ci >= -1.0) & (ci < 0.0)
                 & (np.abs(norm - 1.0) <= 1e-10)) & seed_ok[None, ...]
    ai_out = np.where(valid, x, np.nan)
    bi_out = np.where(valid, bi, np.nan)
    ci_out = np.where(valid, ci, np.nan)
    return ai_out, bi_out, ci_out, valid


def enumerate_configurations(M: int) -> list:
    """All branch-multiplicity assignments (m1, m2, m3, m4) with m1 > 0.

    The count is the binomial C(M+2, 3).  Capped at M = 200: beyond the cap
    only the symmetric configuration is ever needed.
    """
    if not (1 <= M <= MAX_CONFIG_M):
        raise ValueError(f"M must lie in [1, {MAX_CONFIG_M}], got {M}")
    out = []
    for m1 in range(1, M + 1):
        rest = M - m1
        for m2 in range(rest + 1):
            for m3 in range(rest - m2 + 1):
                out.append(Configuration(m1, m2, m3, rest - m2 - m3))
    return out


def asymptotic_amplitudes(beta: float, gamma: float, M: int) -> tuple:
    """Leading-order (a_i, b_i) of the four branches for b = beta/sqrt(M),
    c = -gamma/sqrt(M) seeds at large M.

    Order: (seed branch, lower mid root, upper mid root, small root).  The mid
    roots scale as (2 gamma^2 / M)^(1/4) -+ beta/(2 sqrt(M)) and carry
    b_i ~ -+1; the small root is gamma/sqrt(M) with b_i = -beta/sqrt(2M).
    """
    if beta <= 0.0 or gamma <= 0.0:
        raise ValueError("beta and gamma must be positive")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    sM = math.sqrt(M)
    mid = (2.0 * gamma * gamma / M) ** 0.25
    shift = beta / (2.0 * sM)
    b_mid = 1.0 - 3.0 * gamma / (2.0 * math.sqrt(2.0 * M))
    b_shift = beta * math.sqrt(gamma) / (2.0 * (2.0 * M) ** 0.75)
    return (
        (math.sqrt(max(1.0 - (beta * beta + gamma * gamma) / M, 0.0)), beta / sM),
        (mid - shift, -(b_mid + b_shift)),
        (mid + shift, b_mid - b_shift),
        (gamma / sM, -beta / math.sqrt(2.0 * M)),
    )


def asymptotic_p1(config: Configuration, beta: float, gamma: float, M: int) -> float:
    """Leading large-M one-photon probability of a branch configuration:

        M^(-(m2+m3+2 m4)/2) * 2^((m2+m3)/2) * exp(-beta^2-gamma^2)
          * beta^2 * gamma^(m2+m3+2 m4)
    """
    if config.delta_m > 10:
        raise ValueError("expansion valid only for O(1) groups off the seed branch "
                         f"(m2+m3+m4 <= 10, got {config.delta_m})")
    if M < 100:
        raise ValueError(f"large-M expansion needs M >= 100, got {M}")
    if beta <= 0.0 or gamma <= 0.0:
        raise ValueError("beta and gamma must be positive")
    s = config.m2 + config.m3
    power = s + 2 * config.m4
    return (M ** (-0.5 * power) * 2.0 ** (0.5 * s)
            * math.exp(-beta * beta - gamma * gamma) * beta * beta * gamma**power)


def max_asymptotic_p1(M: int, dm_cap: int = 6) -> float:
    """Numerically maximized asymptotic p1 over nonsymmetric configurations.

    Maximizes over beta, gamma > 0 and all configurations with
    1 <= m2+m3+m4 <= dm_cap.  The result only depends on (m2+m3, m4).
    """
    best = 0.0
    betas = np.linspace(1e-3, 3.0, 481)
    gammas = np.linspace(1e-3, 3.0, 481)
    B, G = np.meshgrid(betas, gammas, indexing="ij")
    for s in range(0, dm_cap + 1):
        for t in range(0, dm_cap - s + 1):
            if s + t == 0:
                continue
            power = s + 2 * t
            vals = (M ** (-0.5 * power) * 2.0 ** (0.5 * s)
                    * np.exp(-B * B - G * G) * B * B * G**power)
            i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)

            def neg(x, power=power, s=s):
                b_, g_ = x
                if b_ <= 0 or g_ <= 0:
                    return 0.0
                return -(M ** (-0.5 * power) * 2.0 ** (0.5 * s)
                         * math.exp(-b_ * b_ - g_ * g_) * b_ * b_ * g_**power)

            r = _sp_minimize(neg, [betas[i], gammas[j]], method="Nelder-Mead",
                             options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 2000})
            best = max(best, float(vals[i, j]), float(-r.fun))
    return best


def _config_p1_exact(a, b, config, M):
    """Exact p1 of a branch configuration on seed arrays (a, b); NaN if any
    occupied branch is unphysical."""
    ai, bi, ci, valid = branch_amplitude_arrays(a, b)
    log_a2 = np.zeros_like(np.asarray(a, dtype=float))
    S = np.zeros_like(log_a2)
    ok = np.ones(log_a2.shape, dtype=bool)
    for j, mj in enumerate(config.as_tuple()):
        if mj == 0:
            continue
        ok &= valid[j]
        with np.errstate(invalid="ignore", divide="ignore"):
            log_a2 = log_a2 + 2.0 * mj * np.log(ai[j])
            S = S + mj * bi[j] / ai[j]
    with np.errstate(invalid="ignore", over="ignore"):
        p1 = np.exp(log_a2) / M * S * S
    return np.where(ok, p1, np.nan)


def max_nonsymmetric_p1(M: int, dm_cap: int = 2, grid: int = 400) -> float:
    """Exact maximal p1 reachable by any nonsymmetric configuration with at
    most ``dm_cap`` groups off the seed branch, maximized over seeds (a, b).

    Comparing this against the symmetric zero-probability limit decides
    whether nonsymmetric configurations can enter the nontrivial interval.
    """
    if M < 2:
        raise ValueError(f"need M >= 2, got {M}")
    avals = np.linspace(1e-3, 1.0 - 1e-9, grid)
    bvals = np.linspace(1e-5, 1.0 - 1e-9, grid)
    A, B = np.meshgrid(avals, bvals, indexing="ij")
    mask = A * A + B * B < 1.0 - 1e-12
    best = 0.0
    configs = []
    for m2 in range(dm_cap + 1):
        for m3 in range(dm_cap - m2 + 1):
            for m4 in range(dm_cap - m2 - m3 + 1):
                dm = m2 + m3 + m4
                if 1 <= dm <= dm_cap:
                    configs.append(Configuration(M - dm, m2, m3, m4))
    for cfg in configs:
        vals = _config_p1_exact(np.where(mask, A, 0.5), np.where(mask, B, 0.5), cfg, M)
        vals = np.where(mask, vals, np.nan)
        if not np.any(np.isfinite(vals)):
            continue
        flat = np.nanargmax(vals)
        i, j = np.unravel_index(int(flat), vals.shape)

        def neg(x, cfg=cfg):
            if not (0.0 < x[0] < 1.0 and 0.0 < x[1] and x[0] ** 2 + x[1] ** 2 < 1.0):
                return 1.0
            v = _config_p1_exact(np.array(x[0]), np.array(x[1]), cfg, M)
            v = float(v)
            return -v if np.isfinite(v) else 1.0

        r = _sp_minimize(neg, [avals[i], bvals[j]], method="Nelder-Mead",
                         options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 4000})
        best = max(best, float(np.nanmax(vals)), float(-r.fun))
    return best
