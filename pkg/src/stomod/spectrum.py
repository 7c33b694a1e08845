"""Modulated output spectrum: analytic line convolution and FFT cross-check.

The complex baseband signal is s(t) = (1 + dp(t)) * exp(i*dphi(t)), where
dphi is the phase with the shifted-carrier ramp removed.  Its line spectrum
is the convolution of an amplitude (NAM) factor

    {0: 1 + A0,  +n: conj(X_n)/2,  -n: X_n/2}

with one FM factor per harmonic n,

    {0: J_0(beta_n),  +n*j: J_j(beta_n) * (conj(X_n)/|X_n|)^j,
                      -n*j: (-1)^j * J_j(beta_n) * (X_n/|X_n|)^j}.

Line powers are squared moduli, normalized so the unmodulated carrier has
power 1.  The FFT path synthesizes s(t) over whole modulation periods and
must agree with the convolution line by line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import jv

from .errors import GridCoverageError, NumericalError, SeedBandError
from .fourier import FourierSolution, solve_coefficients_matrix
from .model import ModulationConfig, OperatingPoint

TWO_PI = 2.0 * math.pi

DEFAULT_J_MAX = 10
DEFAULT_K_MAX = 40
DEFAULT_SAMPLES_PER_PERIOD = 256
DEFAULT_N_PERIODS = 8

# Lines below this fraction of the strongest line are considered numerical
# noise (FFT floor) and dropped.
_LINE_POWER_FLOOR = 1e-22


@dataclass(frozen=True)
class LineSpectrum:
    """Discrete line spectrum on the harmonic grid k * omega_m.

    carrier_freq is the shifted carrier omega_sto' in rad/s; offsets are
    integer harmonic offsets from it.
    """

    carrier_freq: float
    offsets: np.ndarray  # int, sorted ascending
    amps: np.ndarray  # complex
    powers: np.ndarray  # |amp|^2, carrier-normalized

    def power_at(self, k: int) -> float:
        idx = np.nonzero(self.offsets == k)[0]
        return float(self.powers[idx[0]]) if idx.size else 0.0

    def total_power(self) -> float:
        return float(np.sum(self.powers))


@dataclass(frozen=True)
class TimeTrace:
    """Sampled power perturbation and baseband phase.

    demod_freq is the ramp frequency (rad/s) removed from the phase.
    """

    t: np.ndarray
    delta_p: np.ndarray
    phi: np.ndarray
    demod_freq: float


def shifted_carrier(sol: FourierSolution) -> float:
    """Shifted carrier omega_sto' = omega_sto + 2*nu*Gamma_p*A0, rad/s."""
    return sol.op.omega_sto + 2.0 * sol.op.nu * sol.op.gamma_p * sol.a0


def synthesize_time_trace(
    sol: FourierSolution,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    n_periods: int = DEFAULT_N_PERIODS,
) -> TimeTrace:
    """Evaluate the steady-state dp(t) and baseband phase on a uniform grid.

    The grid covers exactly n_periods modulation periods, endpoint excluded,
    so projections and FFTs are leak-free.
    """
    if samples_per_period < 16:
        raise ValueError(f"samples_per_period must be >= 16, got {samples_per_period}")
    if n_periods < 1:
        raise ValueError(f"n_periods must be >= 1, got {n_periods}")
    w = sol.modcfg.omega_m
    period = TWO_PI / w
    t = np.arange(samples_per_period * n_periods) * (period / samples_per_period)
    delta_p = np.full_like(t, sol.a0)
    phi = np.zeros_like(t)
    nu_gp2 = 2.0 * sol.op.nu * sol.op.gamma_p
    for n in range(1, sol.n_harmonics + 1):
        x_abs = sol.x_abs(n)
        if x_abs == 0.0:
            continue
        psi = sol.psi(n)
        theta = n * w * t - psi
        delta_p += x_abs * np.cos(theta)
        phi += (nu_gp2 * x_abs / (n * w)) * np.sin(theta)
    return TimeTrace(t=t, delta_p=delta_p, phi=phi, demod_freq=shifted_carrier(sol))


def _fm_factor(x_n: complex, beta: float, n: int, j_max: int, k_max: int) -> np.ndarray:
    fm = np.zeros(2 * k_max + 1, dtype=complex)
    fm[k_max] = jv(0, beta)
    u = np.conj(x_n) / abs(x_n)
    for j in range(1, j_max + 1):
        if n * j > k_max:
            break
        bj = jv(j, beta)
        fm[k_max + n * j] += bj * u**j
        fm[k_max - n * j] += (-1) ** j * bj * np.conj(u) ** j
    return fm


def psd_analytic(
    sol: FourierSolution,
    j_max: int = DEFAULT_J_MAX,
    k_max: int = DEFAULT_K_MAX,
    include_p0: bool = False,
) -> LineSpectrum:
    """Line spectrum from the Bessel-convolution expansion."""
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    amps = np.zeros(2 * k_max + 1, dtype=complex)
    amps[k_max] = 1.0 + sol.a0
    x = sol.x
    for n in range(1, sol.n_harmonics + 1):
        if n > k_max:
            break
        amps[k_max + n] += np.conj(x[n - 1]) / 2.0
        amps[k_max - n] += x[n - 1] / 2.0
    nu_gp2 = 2.0 * sol.op.nu * sol.op.gamma_p
    for n in range(1, sol.n_harmonics + 1):
        x_abs = abs(x[n - 1])
        if x_abs == 0.0:
            continue  # identity FM factor
        beta = nu_gp2 * x_abs / (n * sol.modcfg.omega_m)
        fm = _fm_factor(complex(x[n - 1]), beta, n, j_max, k_max)
        amps = np.convolve(amps, fm)[k_max : 3 * k_max + 1]
    return _build_spectrum(sol, amps, k_max, include_p0)


def psd_fft(
    trace: TimeTrace,
    sol: FourierSolution,
    k_max: int = DEFAULT_K_MAX,
    include_p0: bool = False,
) -> LineSpectrum:
    """Line spectrum from the FFT of the synthesized baseband signal.

    The trace must cover an integer number of modulation periods on a
    uniform grid; anything else is rejected rather than windowed.
    """
    n_samples = trace.t.size
    if n_samples < 2:
        raise GridCoverageError("trace too short for an FFT")
    dt = trace.t[1] - trace.t[0]
    if not np.allclose(np.diff(trace.t), dt, rtol=1e-9, atol=0.0):
        raise GridCoverageError("trace is not uniformly sampled")
    period = TWO_PI / sol.modcfg.omega_m
    span = n_samples * dt
    n_per = span / period
    if abs(n_per - round(n_per)) > 1e-9 * n_per or round(n_per) < 1:
        raise GridCoverageError(
            f"trace spans {n_per} modulation periods; an integer count is required"
        )
    n_per = int(round(n_per))
    if n_samples % n_per:
        raise GridCoverageError("samples do not divide evenly into periods")
    signal = (1.0 + trace.delta_p) * np.exp(1j * trace.phi)
    coeffs = np.fft.fft(signal) / n_samples
    # Phase-reference the bins to absolute time t[0] (the synthesis and the
    # oracle both drive with cos(omega_m * t) in absolute time).
    k_lim = min(k_max, n_samples // (2 * n_per) - 1)
    amps = np.zeros(2 * k_max + 1, dtype=complex)
    for k in range(-k_lim, k_lim + 1):
        c = coeffs[(k * n_per) % n_samples]
        amps[k_max + k] = c * np.exp(-1j * k * sol.modcfg.omega_m * trace.t[0])
    return _build_spectrum(sol, amps, k_max, include_p0)


def _build_spectrum(
    sol: FourierSolution, amps: np.ndarray, k_max: int, include_p0: bool
) -> LineSpectrum:
    powers = np.abs(amps) ** 2
    if include_p0:
        powers = powers * sol.op.p0
    peak = powers.max()
    keep = powers > _LINE_POWER_FLOOR * peak if peak > 0.0 else powers > 0.0
    offsets = np.arange(-k_max, k_max + 1)[keep]
    return LineSpectrum(
        carrier_freq=shifted_carrier(sol),
        offsets=offsets,
        amps=amps[keep],
        powers=powers[keep],
    )


def sideband_asymmetry(spec: LineSpectrum) -> float:
    """Normalized power difference of the first sidebands, P(+1) - P(-1)."""
    return spec.power_at(+1) - spec.power_at(-1)


def peak_frequency_deviation(sol: FourierSolution, method: str = "index-based") -> float:
    """Peak frequency deviation in Hz.

    "index-based" evaluates nu*Gamma_p*|X_1|/pi (first-harmonic FM index);
    "instantaneous" takes the swing of the instantaneous frequency over one
    modulation period.
    """
    nu_gp = sol.op.nu * sol.op.gamma_p
    if method == "index-based":
        return abs(nu_gp) * sol.x_abs(1) / math.pi
    if method == "instantaneous":
        trace = synthesize_time_trace(sol, samples_per_period=4096, n_periods=1)
        dev = trace.delta_p - sol.a0
        return abs(nu_gp) * float(dev.max() - dev.min()) / (2.0 * math.pi)
    raise ValueError(f"unknown method {method!r}")


def first_harmonic_index(
    op: OperatingPoint, mu: float, omega_m: float, n_harmonics: int = 10
) -> float:
    """Modulation index beta_1 at the given drive settings."""
    sol = solve_coefficients_matrix(
        op, ModulationConfig(mu=mu, omega_m=omega_m, n_harmonics=n_harmonics)
    )
    return 2.0 * abs(op.nu) * op.gamma_p * sol.x_abs(1) / omega_m


def modulation_bandwidth(
    op: OperatingPoint,
    mu0: float,
    omega_m0: float,
    n_harmonics: int = 10,
    freq_rtol: float = 1e-3,
) -> float:
    """Modulation bandwidth in Hz: where beta_1 falls to 1/sqrt(2) of its
    flat-band value, scanning omega_m upward at constant mu/omega_m.
    """
    if mu0 <= 0.0 or omega_m0 <= 0.0:
        raise ValueError("mu0 and omega_m0 must be positive")
    beta_i = first_harmonic_index(op, mu0, omega_m0, n_harmonics)
    beta_2x = first_harmonic_index(op, 2.0 * mu0, 2.0 * omega_m0, n_harmonics)
    if beta_i - beta_2x > 0.01 * beta_i:
        raise SeedBandError(
            f"seed omega_m0={omega_m0:.3e} rad/s is not in the flat band "
            f"(beta_1 drops {100.0 * (beta_i - beta_2x) / beta_i:.2f}% by 2*omega_m0)"
        )
    target = beta_i / math.sqrt(2.0)

    def beta_at(w: float) -> float:
        return first_harmonic_index(op, mu0 * w / omega_m0, w, n_harmonics)

    lo, hi = omega_m0, 2.0 * omega_m0
    for _ in range(60):
        if beta_at(hi) < target:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise SeedBandError("beta_1 never fell below the half-power target")
    while (hi - lo) > freq_rtol * lo:
        mid = 0.5 * (lo + hi)
        if beta_at(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) / TWO_PI


def solve_mu_for_beta1(
    op: OperatingPoint,
    beta1: float,
    omega_m: float,
    n_harmonics: int = 10,
    mu_max: float = 0.5,
    tol: float = 1e-10,
) -> float:
    """Back-solve the modulation strength that produces a given beta_1."""
    if beta1 < 0.0:
        raise ValueError(f"beta1 must be >= 0, got {beta1}")
    if beta1 == 0.0:
        return 0.0
    # March upward to bracket the target; beta_1(mu) is monotone at small mu
    # but the truncated series misbehaves once mu*C2 rivals Gamma_p, so a
    # decrease before the target is reported rather than bisected through.
    mu_lo, beta_lo = 0.0, 0.0
    mu_hi = min(1e-6, mu_max)
    while True:
        beta_hi = first_harmonic_index(op, mu_hi, omega_m, n_harmonics)
        if beta_hi >= beta1:
            break
        if beta_hi < beta_lo:
            raise NumericalError(
                f"beta1={beta1} unreachable: beta_1(mu) turns non-monotone near "
                f"mu={mu_lo:.4g} (max reached {beta_lo:.4f})"
            )
        mu_lo, beta_lo = mu_hi, beta_hi
        if mu_hi >= mu_max:
            raise NumericalError(
                f"beta1={beta1} not reachable with mu <= {mu_max} "
                f"(beta_1({mu_max}) = {beta_hi:.4f})"
            )
        mu_hi = min(1.25 * mu_hi, mu_max)
    while mu_hi - mu_lo > tol:
        mid = 0.5 * (mu_lo + mu_hi)
        if first_harmonic_index(op, mid, omega_m, n_harmonics) < beta1:
            mu_lo = mid
        else:
            mu_hi = mid
    return 0.5 * (mu_lo + mu_hi)
