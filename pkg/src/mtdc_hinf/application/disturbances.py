"""Disturbance profiles for the load deviations of each grid and the wind-speed deviation."""

from typing import Optional, Sequence

import numpy as np

from mtdc_hinf.domain.enums import DisturbanceKind
from mtdc_hinf.domain.exceptions import ParameterError
from mtdc_hinf.domain.scenario import DISTURBANCE_CHANNELS, DisturbanceProfile

REGULATION_PERIOD = 0.1
CORRELATION_TIME = 2.0


def _length(duration: float, sample_period: float) -> int:
    if duration <= 0.0:
        raise ParameterError("duration", f"must be positive, got {duration}")
    if sample_period <= 0.0:
        raise ParameterError("sample_period", f"must be positive, got {sample_period}")
    return int(np.ceil(duration / sample_period - 1e-9))


def step_profile(
    amplitudes: Sequence[float],
    onset: float,
    duration: float,
    sample_period: float = 0.01,
) -> DisturbanceProfile:
    """Every channel steps from zero to its amplitude at ``onset``."""
    if len(amplitudes) != len(DISTURBANCE_CHANNELS):
        raise ParameterError("amplitudes", f"need {len(DISTURBANCE_CHANNELS)} values, got {len(amplitudes)}")
    time = np.arange(_length(duration, sample_period)) * sample_period
    active = (time >= onset - 1e-12)[:, None]
    return DisturbanceProfile(
        kind=DisturbanceKind.STEP,
        sample_period=sample_period,
        duration=duration,
        values=active * np.asarray(amplitudes, dtype=float)[None, :],
        onset=onset,
        amplitudes=tuple(float(value) for value in amplitudes),
    )


def load_step(amplitude: float = 0.1, onset: float = 10.0, duration: float = 60.0) -> DisturbanceProfile:
    """The same load step on every grid, no wind deviation."""
    return step_profile((amplitude, amplitude, amplitude, 0.0), onset, duration)


def validation_step(duration: float = 90.0) -> DisturbanceProfile:
    """Load steps of 0.1 pu in grid 1 and 0.15 pu in grid 2 at 45 s."""
    return step_profile((0.1, 0.15, 0.0, 0.0), onset=45.0, duration=duration)


def square_wave(
    amplitude: float = 0.1,
    half_period: float = 40.0,
    duration: float = 200.0,
    sample_period: float = 0.01,
) -> DisturbanceProfile:
    """Load deviations alternating between +amplitude and -amplitude on every grid."""
    if half_period <= 0.0:
        raise ParameterError("half_period", f"must be positive, got {half_period}")
    time = np.arange(_length(duration, sample_period)) * sample_period
    sign = np.where(np.floor(time / half_period + 1e-9) % 2 == 0, 1.0, -1.0)
    values = np.zeros((time.size, len(DISTURBANCE_CHANNELS)))
    values[:, :3] = amplitude * sign[:, None]
    return DisturbanceProfile(
        kind=DisturbanceKind.PIECEWISE,
        sample_period=sample_period,
        duration=duration,
        values=values,
    )


def gen_regd_like(
    seed: int,
    duration: float = 200.0,
    amplitude: float = 0.1,
    wind_amplitude: Optional[float] = None,
) -> DisturbanceProfile:
    """Synthetic regulation-like series: independent first-order filtered noise per channel.

    Samples every 100 ms with a 2 s correlation time, shifted to zero mean and scaled so
    the peak magnitude equals ``amplitude`` (``wind_amplitude`` for the wind channel).
    """
    if amplitude < 0.0:
        raise ParameterError("amplitude", f"must be non-negative, got {amplitude}")
    wind_amplitude = amplitude if wind_amplitude is None else wind_amplitude
    length = _length(duration, REGULATION_PERIOD)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((length, len(DISTURBANCE_CHANNELS)))
    pole = np.exp(-REGULATION_PERIOD / CORRELATION_TIME)
    series = np.zeros_like(noise)
    for index in range(1, length):
        series[index] = pole * series[index - 1] + np.sqrt(1.0 - pole**2) * noise[index]
    series -= series.mean(axis=0)
    peaks = np.max(np.abs(series), axis=0)
    peaks[peaks == 0.0] = 1.0
    targets = np.array([amplitude, amplitude, amplitude, wind_amplitude])
    return DisturbanceProfile(
        kind=DisturbanceKind.SAMPLED,
        sample_period=REGULATION_PERIOD,
        duration=duration,
        values=series / peaks * targets,
    )


def from_samples(time: np.ndarray, values: np.ndarray) -> DisturbanceProfile:
    """Profile from a uniformly sampled series starting at t = 0.

    Raises:
        ParameterError: If the time column is not uniform from zero or the shapes disagree.
    """
    time = np.asarray(time, dtype=float)
    values = np.asarray(values, dtype=float)
    if time.size < 2:
        raise ParameterError("t", "at least two samples are required")
    step = float(time[1] - time[0])
    if step <= 0.0 or abs(time[0]) > 1e-9 or not np.allclose(np.diff(time), step, rtol=1e-6, atol=1e-9):
        raise ParameterError("t", "samples must be uniformly spaced starting at zero")
    if values.shape != (time.size, len(DISTURBANCE_CHANNELS)):
        raise ParameterError("values", f"expected shape ({time.size}, {len(DISTURBANCE_CHANNELS)}), got {values.shape}")
    return DisturbanceProfile(
        kind=DisturbanceKind.SAMPLED,
        sample_period=step,
        duration=step * time.size,
        values=values,
        synthetic=False,
    )
