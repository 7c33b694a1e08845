"""Harmonic-balance solution of the driven power-perturbation equation.

The power perturbation obeys

    d(dp)/dt = mu*C1*cos(w_m t) + (mu*C2*cos(w_m t) - Gamma_p) * 2*dp

and is expanded as dp = A0 + sum_n [A_n sin(n w_m t) + B_n cos(n w_m t)].
Collecting harmonics (the cos(w_m t)*dp product couples neighboring
harmonics) gives, with the shorthand g = 2*Gamma_p and e = mu*C2:

    DC:        0        = e*B1 - g*A0
    n=1 cos:   w*A1     = mu*C1 + 2*e*A0 + e*B2 - g*B1
    n=1 sin:  -w*B1     = e*A2 - g*A1
    n>=2 cos:  n*w*A_n  = e*(B_{n-1} + B_{n+1}) - g*B_n
    n>=2 sin: -n*w*B_n  = e*(A_{n-1} + A_{n+1}) - g*A_n

The series is truncated by A_{N+1} = B_{N+1} = 0 and solved either as one
(2N+1)-unknown linear system (matrix method) or by marching upward in n
with the n+1 couplings dropped (recursive method).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, SingularSystemError
from .model import ModulationConfig, OperatingPoint, warn_if_fast_modulation

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Residual acceptance for the assembled balance equations, relative to the
# natural rate scale max(|mu*C1|, Gamma_p).
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class FourierSolution:
    """Fourier coefficients of the steady-state power perturbation."""

    a0: float
    a: np.ndarray  # A_1 .. A_N
    b: np.ndarray  # B_1 .. B_N
    n_harmonics: int
    op: OperatingPoint
    modcfg: ModulationConfig

    @property
    def x(self) -> np.ndarray:
        """Complex harmonics X_n = B_n + i A_n, n = 1..N."""
        return self.b + 1j * self.a

    def x_abs(self, n: int) -> float:
        return float(abs(self.x[n - 1]))

    def psi(self, n: int) -> float:
        return math.atan2(float(self.a[n - 1]), float(self.b[n - 1]))


@dataclass(frozen=True)
class HarmonicDescriptor:
    """Per-harmonic magnitude, phase, FM index and peak deviation."""

    n: int
    x_abs: float
    psi: float
    beta: float
    delta_f: float


def _assemble(op: OperatingPoint, modcfg: ModulationConfig) -> tuple[np.ndarray, np.ndarray]:
    n_h = modcfg.n_harmonics
    w = modcfg.omega_m
    g = 2.0 * op.gamma_p
    e = modcfg.mu * op.c2
    size = 2 * n_h + 1
    mat = np.zeros((size, size))
    rhs = np.zeros(size)

    def ia(n: int) -> int:
        return n  # A_n at index n; A0 at index 0

    def ib(n: int) -> int:
        return n_h + n

    # DC balance
    mat[0, 0] = -g
    mat[0, ib(1)] = e
    # n = 1, cos component
    mat[1, ia(1)] = w
    mat[1, 0] = -2.0 * e
    mat[1, ib(1)] = g
    if n_h >= 2:
        mat[1, ib(2)] = -e
    rhs[1] = modcfg.mu * op.c1
    # n = 1, sin component
    mat[2, ia(1)] = g
    mat[2, ib(1)] = -w
    if n_h >= 2:
        mat[2, ia(2)] = -e
    # n >= 2
    for n in range(2, n_h + 1):
        r = 2 * n - 1
        mat[r, ia(n)] = n * w
        mat[r, ib(n)] = g
        mat[r, ib(n - 1)] -= e
        if n + 1 <= n_h:
            mat[r, ib(n + 1)] -= e
        r = 2 * n
        mat[r, ia(n)] = g
        mat[r, ib(n)] = -n * w
        mat[r, ia(n - 1)] -= e
        if n + 1 <= n_h:
            mat[r, ia(n + 1)] -= e
    return mat, rhs


def _finish(
    op: OperatingPoint,
    modcfg: ModulationConfig,
    a0: float,
    a: np.ndarray,
    b: np.ndarray,
) -> FourierSolution:
    sol = FourierSolution(
        a0=a0, a=a, b=b, n_harmonics=modcfg.n_harmonics, op=op, modcfg=modcfg
    )
    xa = np.abs(sol.x)
    if xa[-1] > xa[0] > 0.0:
        logger.warning(
            "harmonic coefficients do not decay (|X_%d|=%.3e > |X_1|=%.3e); "
            "truncation order N=%d may be too small",
            modcfg.n_harmonics, xa[-1], xa[0], modcfg.n_harmonics,
        )
    return sol


def solve_coefficients_matrix(
    op: OperatingPoint, modcfg: ModulationConfig
) -> FourierSolution:
    """Solve the truncated harmonic-balance system exactly (direct solve)."""
    warn_if_fast_modulation(op, modcfg)
    n_h = modcfg.n_harmonics
    if modcfg.mu == 0.0:
        return _finish(op, modcfg, 0.0, np.zeros(n_h), np.zeros(n_h))
    mat, rhs = _assemble(op, modcfg)
    try:
        sol_vec = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            f"harmonic-balance system is singular (gamma_p={op.gamma_p}, "
            f"omega_m={modcfg.omega_m})"
        ) from exc
    scale = max(abs(modcfg.mu * op.c1), op.gamma_p)
    residual = np.max(np.abs(mat @ sol_vec - rhs))
    if scale > 0.0 and residual > RESIDUAL_RTOL * scale:
        raise NumericalError(
            f"harmonic-balance residual {residual:.3e} exceeds "
            f"{RESIDUAL_RTOL:.0e} * {scale:.3e}"
        )
    return _finish(op, modcfg, float(sol_vec[0]), sol_vec[1 : n_h + 1], sol_vec[n_h + 1 :])


def solve_coefficients_recursive(
    op: OperatingPoint, modcfg: ModulationConfig
) -> FourierSolution:
    """Approximate solve marching upward in n with n+1 couplings dropped.

    The n = 1 pair is seeded with A2, B2 dropped (and A0 eliminated via the
    DC balance); each subsequent pair is a 2x2 solve forced only by the
    previous harmonic.  Cheap and usually close to the matrix method, but
    degrades near sideband minima.
    """
    warn_if_fast_modulation(op, modcfg)
    n_h = modcfg.n_harmonics
    a = np.zeros(n_h)
    b = np.zeros(n_h)
    if modcfg.mu == 0.0:
        return _finish(op, modcfg, 0.0, a, b)
    w = modcfg.omega_m
    g = 2.0 * op.gamma_p
    e = modcfg.mu * op.c2
    # Seed: w*A1 = mu*C1 + 2e*A0 - g*B1 with A0 = e*B1/g, and w*B1 = g*A1.
    denom = w * w + g * g - 2.0 * e * e
    if denom == 0.0 or g == 0.0:
        raise SingularSystemError("degenerate seed system in recursive solve")
    b[0] = g * modcfg.mu * op.c1 / denom
    a[0] = w * b[0] / g
    a0 = e * b[0] / g
    for n in range(2, n_h + 1):
        rhs_c = e * b[n - 2]
        rhs_s = e * a[n - 2]
        nw = n * w
        det = nw * nw + g * g
        a[n - 1] = (nw * rhs_c + g * rhs_s) / det
        b[n - 1] = (g * rhs_c - nw * rhs_s) / det
    return _finish(op, modcfg, a0, a, b)


def carrier_shift(sol: FourierSolution) -> float:
    """Carrier frequency shift f_s in Hz.

    The DC balance ties the shift 2*nu*Gamma_p*A0 to the first cosine
    coefficient: 2*pi*f_s = mu*nu*C2*B1.
    """
    return sol.op.nu * sol.op.gamma_p * sol.a0 / math.pi


def harmonic_descriptors(sol: FourierSolution) -> list[HarmonicDescriptor]:
    """Magnitude, phase, FM index beta_n and peak deviation per harmonic."""
    out = []
    nu_gp = sol.op.nu * sol.op.gamma_p
    for n in range(1, sol.n_harmonics + 1):
        x_abs = sol.x_abs(n)
        beta = 2.0 * nu_gp * x_abs / (n * sol.modcfg.omega_m)
        out.append(
            HarmonicDescriptor(
                n=n,
                x_abs=x_abs,
                psi=sol.psi(n),
                beta=beta,
                delta_f=nu_gp * x_abs / math.pi,
            )
        )
    return out


def truncation_error(
    op: OperatingPoint,
    modcfg: ModulationConfig,
    n_values: list[int],
    n_ref: int,
) -> list[tuple[int, float]]:
    """Total truncation error (percent) of each order N against order n_ref.

    The metric is the relative L1 distance of the harmonic magnitudes
    |X_n|, with harmonics absent from the smaller solution counted at their
    reference magnitude.
    """
    if n_ref <= max(n_values):
        raise ValueError(f"n_ref={n_ref} must exceed max(n_values)={max(n_values)}")
    from dataclasses import replace

    ref = solve_coefficients_matrix(op, replace(modcfg, n_harmonics=n_ref))
    ref_x = ref.x
    ref_total = float(np.sum(np.abs(ref_x)))
    out = []
    for n_val in n_values:
        sol = solve_coefficients_matrix(op, replace(modcfg, n_harmonics=n_val))
        shared = min(n_val, n_ref)
        err = float(np.sum(np.abs(sol.x[:shared] - ref_x[:shared])))
        err += float(np.sum(np.abs(ref_x[shared:])))
        out.append((n_val, 100.0 * err / ref_total if ref_total > 0.0 else 0.0))
    return out


def solution_difference(sol: FourierSolution, ref: FourierSolution) -> float:
    """Relative L1 distance (percent) between two solutions' harmonics.

    Used for the recursive-vs-matrix comparison at equal truncation order.
    """
    if sol.n_harmonics != ref.n_harmonics:
        raise ValueError("solutions must share the truncation order")
    ref_total = float(np.sum(np.abs(ref.x)))
    if ref_total == 0.0:
        return 0.0
    return 100.0 * float(np.sum(np.abs(sol.x - ref.x))) / ref_total
