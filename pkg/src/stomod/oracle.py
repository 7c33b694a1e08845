"""Brute-force ground truth: fixed-step RK4 integration of the coupled
power/phase equations, plus harmonic projection of the settled trace.

Everything here is deliberately independent of the harmonic-balance solver
so the two paths can be compared coefficient by coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridCoverageError, StepSizeError
from .fourier import FourierSolution
from .model import DeviceParams, ModulationConfig, OperatingPoint, derive_operating_point
from .spectrum import TimeTrace

TWO_PI = 2.0 * math.pi

# Step must resolve both the modulation period and the relaxation rate.
_STEPS_PER_PERIOD_MIN = 200
_GAMMA_P_DT_MAX = 0.1
_TRANSIENT_GAMMA_P_MIN = 10.0


@dataclass(frozen=True)
class IntegrationConfig:
    """Fixed-step integration window.

    transient_cut must be long enough for the 2*Gamma_p relaxation to die
    out; the window after it should span whole modulation periods if the
    trace is to be projected.
    """

    dt: float
    t_end: float
    transient_cut: float
    initial_delta_p: float = 0.0
    initial_phase: float = 0.0

    def validate(self, op: OperatingPoint, modcfg: ModulationConfig) -> None:
        period = TWO_PI / modcfg.omega_m
        if self.dt > period / _STEPS_PER_PERIOD_MIN:
            raise StepSizeError(
                f"dt={self.dt:.3e} exceeds period/{_STEPS_PER_PERIOD_MIN} "
                f"= {period / _STEPS_PER_PERIOD_MIN:.3e}"
            )
        if op.gamma_p > 0.0 and self.dt > _GAMMA_P_DT_MAX / op.gamma_p:
            raise StepSizeError(
                f"dt={self.dt:.3e} exceeds {_GAMMA_P_DT_MAX}/gamma_p "
                f"= {_GAMMA_P_DT_MAX / op.gamma_p:.3e}"
            )
        if op.gamma_p > 0.0 and self.transient_cut < _TRANSIENT_GAMMA_P_MIN / op.gamma_p:
            raise StepSizeError(
                f"transient_cut={self.transient_cut:.3e} is shorter than "
                f"{_TRANSIENT_GAMMA_P_MIN}/gamma_p = "
                f"{_TRANSIENT_GAMMA_P_MIN / op.gamma_p:.3e}"
            )
        if self.t_end <= self.transient_cut:
            raise StepSizeError("t_end must exceed transient_cut")

    @classmethod
    def for_steady_state(
        cls,
        op: OperatingPoint,
        modcfg: ModulationConfig,
        samples_per_period: int = 512,
        n_periods: int = 8,
        transient_factor: float = 15.0,
        initial_delta_p: float = 0.0,
        initial_phase: float = 0.0,
    ) -> "IntegrationConfig":
        """Window aligned to the modulation period for clean projection."""
        period = TWO_PI / modcfg.omega_m
        dt = period / samples_per_period
        if op.gamma_p > 0.0:
            transient_periods = math.ceil(transient_factor / op.gamma_p / period)
        else:
            transient_periods = 1
        transient_cut = transient_periods * period
        return cls(
            dt=dt,
            t_end=transient_cut + n_periods * period,
            transient_cut=transient_cut,
            initial_delta_p=initial_delta_p,
            initial_phase=initial_phase,
        )


def integrate_reduced(
    op: OperatingPoint, modcfg: ModulationConfig, icfg: IntegrationConfig
) -> TimeTrace:
    """RK4 integration of the reduced power/phase equations.

    Returns the post-transient samples; the phase is demodulated at
    omega_sto + 2*nu*Gamma_p*<delta_p> with the mean taken over the
    retained window.
    """
    icfg.validate(op, modcfg)
    mu, w = modcfg.mu, modcfg.omega_m
    c1, c2, gp = op.c1, op.c2, op.gamma_p
    wsto = op.omega_sto
    nu_gp2 = 2.0 * op.nu * op.gamma_p
    h = icfg.dt
    n_steps = int(round(icfg.t_end / h))

    def dpdot(t: float, dp: float) -> float:
        drive = mu * math.cos(w * t)
        return c1 * drive + 2.0 * dp * (c2 * drive - gp)

    t_arr = np.empty(n_steps + 1)
    dp_arr = np.empty(n_steps + 1)
    phi_arr = np.empty(n_steps + 1)
    dp = icfg.initial_delta_p
    phi = icfg.initial_phase
    t_arr[0], dp_arr[0], phi_arr[0] = 0.0, dp, phi
    for i in range(n_steps):
        t = i * h
        k1 = dpdot(t, dp)
        k2 = dpdot(t + 0.5 * h, dp + 0.5 * h * k1)
        k3 = dpdot(t + 0.5 * h, dp + 0.5 * h * k2)
        k4 = dpdot(t + h, dp + h * k3)
        # phase rate is affine in delta_p, so its RK4 stages reuse the k's
        phi += h * (wsto + nu_gp2 * (dp + (h / 6.0) * (k1 + k2 + k3)))
        dp += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_arr[i + 1] = (i + 1) * h
        dp_arr[i + 1] = dp
        phi_arr[i + 1] = phi
    keep = t_arr >= icfg.transient_cut - 0.5 * h
    # drop the final sample so the window is endpoint-exclusive
    keep[-1] = False
    t_keep = t_arr[keep]
    dp_keep = dp_arr[keep]
    phi_keep = phi_arr[keep]
    demod = wsto + nu_gp2 * float(dp_keep.mean())
    return TimeTrace(
        t=t_keep,
        delta_p=dp_keep,
        phi=phi_keep - demod * t_keep,
        demod_freq=demod,
    )


def integrate_full(
    params: DeviceParams, modcfg: ModulationConfig, icfg: IntegrationConfig
) -> TimeTrace:
    """Exploratory RK4 integration of the unreduced power/phase pair.

    Integrates dp/dt = 2*(Gamma_minus(p, t) - Gamma_G)*p with the same
    first-order damping model, without linearizing about p0.  No acceptance
    claim is attached to this path; it exists for cross-checking the
    reduced equations at small mu.
    """
    op = derive_operating_point(params)
    icfg.validate(op, modcfg)
    mu, w = modcfg.mu, modcfg.omega_m
    gamma_g = params.alpha * op.omega_o
    sigma_i = gamma_g * params.xi
    p0 = op.p0
    nu_over_p0 = params.nu * op.gamma_p / p0
    h = icfg.dt
    n_steps = int(round(icfg.t_end / h))

    def pdot(t: float, p: float) -> float:
        gm = sigma_i * (1.0 + mu * math.cos(w * t)) * (1.0 - p)
        return 2.0 * (gm - gamma_g) * p

    p = p0 * (1.0 + 2.0 * icfg.initial_delta_p)
    phi = icfg.initial_phase
    t_arr = np.empty(n_steps + 1)
    p_arr = np.empty(n_steps + 1)
    phi_arr = np.empty(n_steps + 1)
    t_arr[0], p_arr[0], phi_arr[0] = 0.0, p, phi
    for i in range(n_steps):
        t = i * h
        k1 = pdot(t, p)
        k2 = pdot(t + 0.5 * h, p + 0.5 * h * k1)
        k3 = pdot(t + 0.5 * h, p + 0.5 * h * k2)
        k4 = pdot(t + h, p + h * k3)
        phi += h * (op.omega_o + nu_over_p0 * (p + (h / 6.0) * (k1 + k2 + k3)))
        p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_arr[i + 1] = (i + 1) * h
        p_arr[i + 1] = p
        phi_arr[i + 1] = phi
    keep = t_arr >= icfg.transient_cut - 0.5 * h
    keep[-1] = False
    dp_keep = (p_arr[keep] / p0 - 1.0) / 2.0
    t_keep = t_arr[keep]
    demod = op.omega_o + params.nu * op.gamma_p * (1.0 + 2.0 * float(dp_keep.mean()))
    return TimeTrace(
        t=t_keep,
        delta_p=dp_keep,
        phi=phi_arr[keep] - demod * t_keep,
        demod_freq=demod,
    )


def project_harmonics(
    trace: TimeTrace,
    modcfg: ModulationConfig,
    n_harmonics: int,
    op: OperatingPoint | None = None,
) -> FourierSolution:
    """Extract A0, A_n, B_n from a settled trace by harmonic projection.

    The trace must span whole modulation periods on a uniform grid; the
    projections use absolute time so the result is directly comparable to
    the harmonic-balance coefficients.
    """
    n_samples = trace.t.size
    if n_samples < 2:
        raise GridCoverageError("trace too short to project")
    dt = trace.t[1] - trace.t[0]
    period = TWO_PI / modcfg.omega_m
    span = n_samples * dt
    n_per = span / period
    if abs(n_per - round(n_per)) > 1e-9 * max(n_per, 1.0) or round(n_per) < 1:
        raise GridCoverageError(
            f"trace spans {n_per} modulation periods; an integer count is required"
        )
    a0 = float(trace.delta_p.mean())
    a = np.empty(n_harmonics)
    b = np.empty(n_harmonics)
    for n in range(1, n_harmonics + 1):
        theta = n * modcfg.omega_m * trace.t
        a[n - 1] = 2.0 * float(np.mean(trace.delta_p * np.sin(theta)))
        b[n - 1] = 2.0 * float(np.mean(trace.delta_p * np.cos(theta)))
    return FourierSolution(
        a0=a0, a=a, b=b, n_harmonics=n_harmonics, op=op, modcfg=modcfg
    )
