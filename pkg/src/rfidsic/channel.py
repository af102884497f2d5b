"""Backscatter channel: superposition, leakage, AWGN, low-pass envelope.

Amplitudes follow the 1-ohm complex-baseband convention: a carrier of power
P watts has baseband amplitude sqrt(2P), and the power carried by a complex
sample x is |x|^2 / 2.  The reader front end is an ideal brick-wall low-pass
filter followed by envelope (magnitude) detection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import TagParams
from .errors import ConfigError, InputError, ParameterError
from .waveform import SampledSignal, edge_index

SPEED_OF_LIGHT = 299792458.0

# EPCglobal tolerance on the backscatter link frequency.
FREQ_TOLERANCE = 0.22


def dbm_to_watts(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


def amplitude_for_power(watts: float) -> float:
    """Complex-baseband amplitude of a carrier with the given power."""
    return np.sqrt(2.0 * watts)


def friis_amplitude(carrier_freq: float, distance_m: float) -> float:
    """One-way free-space field gain for unity antenna gains."""
    wavelength = SPEED_OF_LIGHT / carrier_freq
    return wavelength / (4.0 * np.pi * distance_m)


@dataclass(frozen=True)
class PopulationModel:
    """Statistics of the tag population and its geometry.

    Link frequencies are Gaussian around the nominal BLF with a 3-sigma
    spread equal to the allowed tolerance, so 99.73% of draws are legal;
    draws outside the window are rejected and redrawn.  Reply delays are
    uniform over ``[0, delay_window]``.
    """

    nominal_blf: float = 50e3
    freq_sigma: float | None = None
    delay_window: float = 24e-6
    distance_m: float = 1.0
    carrier_freq: float = 915e6

    def __post_init__(self):
        if self.nominal_blf <= 0 or self.distance_m <= 0 or self.carrier_freq <= 0:
            raise ParameterError("population parameters must be positive")
        if self.delay_window < 0:
            raise ParameterError("delay window must be nonnegative")
        if self.freq_sigma is None:
            object.__setattr__(self, "freq_sigma", FREQ_TOLERANCE * self.nominal_blf / 3.0)
        if 3.0 * self.freq_sigma > FREQ_TOLERANCE * self.nominal_blf + 1e-9:
            raise ParameterError("3*freq_sigma must stay within the legal frequency window")


@dataclass(frozen=True)
class ReceiverConfig:
    """Reader front-end: low-pass bandwidth, sample rate, and AWGN power at
    the antenna (``None`` disables noise)."""

    bandwidth: float = 1.5e6
    fs: float = 8e6
    noise_power_dbm: float | None = -50.0

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ParameterError("bandwidth must be positive")
        if self.fs <= 2.0 * self.bandwidth:
            raise ParameterError("sample rate must exceed twice the low-pass bandwidth")

    @property
    def noise_power_watts(self) -> float:
        if self.noise_power_dbm is None:
            return 0.0
        return dbm_to_watts(self.noise_power_dbm)


@dataclass(frozen=True)
class ChannelRealization:
    """One flat-fading draw for a slot: per-tag round-trip coefficients, the
    reader-to-reader fading term, constant antenna leakage, carrier
    amplitude, and the tag backscatter power fraction."""

    h_rtr: tuple
    h_rr: complex = 0j
    l_ant: complex = 0j
    carrier_amplitude: float = amplitude_for_power(1.0)
    backscatter_fraction: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.backscatter_fraction <= 1.0:
            raise ParameterError("backscatter fraction must be in (0, 1]")

    @property
    def leak(self) -> complex:
        """Unmodulated component at the reader: H_RR * A + L_ant."""
        return self.h_rr * self.carrier_amplitude + self.l_ant

    def tag_gain(self, p: int) -> complex:
        """Complex amplitude multiplying tag p's control signal."""
        return self.h_rtr[p] * self.carrier_amplitude * self.backscatter_fraction

    def envelope_step(self, p: int) -> float:
        """Signed envelope step an isolated ON level of tag p produces."""
        return abs(self.leak + self.tag_gain(p)) - abs(self.leak)


def draw_tag_params(rng: np.random.Generator, model: PopulationModel) -> TagParams:
    """Draw a tag's link frequency (truncated Gaussian) and reply delay."""
    limit = FREQ_TOLERANCE * model.nominal_blf
    if model.freq_sigma == 0.0:
        freq = model.nominal_blf
    else:
        while True:
            freq = rng.normal(model.nominal_blf, model.freq_sigma)
            if abs(freq - model.nominal_blf) <= limit:
                break
    delay = rng.uniform(0.0, model.delay_window) if model.delay_window > 0 else 0.0
    return TagParams(a=1.0 / freq, b=delay)


def draw_channel(rng: np.random.Generator, model: PopulationModel, n_tags: int,
                 carrier_power_w: float = 1.0, backscatter_fraction: float = 0.5,
                 l_ant: complex = 0j, reader_fade_scale: float = 0.0) -> ChannelRealization:
    """Draw a flat-fading slot realization.

    Tag path magnitudes come from free-space Friis at the model's distance
    with a uniform round-trip phase; reciprocity is encoded by squaring a
    single one-way coefficient.  H_RR is complex Gaussian (Rayleigh
    magnitude) with ``E|H_RR|^2 = reader_fade_scale**2``.
    """
    amp = friis_amplitude(model.carrier_freq, model.distance_m)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_tags)
    h_rt = amp * np.exp(1j * phases)
    h_rtr = tuple(h_rt * h_rt)
    if reader_fade_scale > 0.0:
        gauss = rng.normal(size=2)
        h_rr = reader_fade_scale * (gauss[0] + 1j * gauss[1]) / np.sqrt(2.0)
    else:
        h_rr = 0j
    return ChannelRealization(
        h_rtr=h_rtr,
        h_rr=h_rr,
        l_ant=complex(l_ant),
        carrier_amplitude=amplitude_for_power(carrier_power_w),
        backscatter_fraction=backscatter_fraction,
    )


def superpose(replies, ch: ChannelRealization, rx: ReceiverConfig,
              rng: np.random.Generator | None = None,
              n_samples: int | None = None) -> SampledSignal:
    """Sum delayed tag replies plus leakage plus AWGN (pre-envelope).

    ``replies`` is a sequence of ``(control: SampledSignal, params: TagParams,
    h_rtr: complex)`` triples sharing the receiver sample rate.  Noise is
    complex white Gaussian with total power ``rx.noise_power_dbm`` spread
    over the full sampling bandwidth.
    """
    replies = list(replies)
    for control, _, _ in replies:
        if control.fs != rx.fs:
            raise ConfigError("all replies must share the receiver sample rate")
    if n_samples is None:
        if not replies:
            raise ParameterError("n_samples is required for an empty slot")
        n_samples = int(max(edge_index(params.b, rx.fs) + len(control)
                            for control, params, _ in replies))
    z = np.full(n_samples, ch.leak, dtype=np.complex128)
    scale = ch.carrier_amplitude * ch.backscatter_fraction
    for control, params, h_rtr in replies:
        offset = int(edge_index(params.b, rx.fs))
        if offset + len(control) > n_samples:
            raise InputError("record too short for a delayed reply")
        z[offset:offset + len(control)] += h_rtr * scale * control.samples
    power = rx.noise_power_watts
    if power > 0.0:
        if rng is None:
            raise ParameterError("rng is required when noise is enabled")
        sigma = np.sqrt(power)
        z += rng.normal(0.0, sigma, n_samples) + 1j * rng.normal(0.0, sigma, n_samples)
    return SampledSignal(z, rx.fs)


def lowpass_envelope(zprime: SampledSignal, rx: ReceiverConfig) -> SampledSignal:
    """Brick-wall low-pass filter then envelope (magnitude) detection.

    The filter is applied in the frequency domain over an edge-padded copy
    of the record, which avoids circular-wrap artifacts at the ends.
    """
    x = np.asarray(zprime.samples, dtype=np.complex128)
    pad = max(16, int(4.0 * zprime.fs / rx.bandwidth))
    padded = np.concatenate([np.full(pad, x[0]), x, np.full(pad, x[-1])])
    spectrum = np.fft.fft(padded)
    freqs = np.fft.fftfreq(len(padded), d=1.0 / zprime.fs)
    spectrum[np.abs(freqs) > rx.bandwidth] = 0.0
    filtered = np.fft.ifft(spectrum)[pad:pad + len(x)]
    return SampledSignal(np.abs(filtered), zprime.fs, zprime.t0)


def inband_noise_power(rx: ReceiverConfig) -> float:
    """Noise power (watts) surviving the brick-wall low-pass filter."""
    return rx.noise_power_watts * min(1.0, 2.0 * rx.bandwidth / rx.fs)


def envelope_noise_std(rx: ReceiverConfig, leak_amplitude: float = 0.0) -> float:
    """Approximate standard deviation of the envelope in a tag-free record.

    With a dominant leak the envelope fluctuation is the in-phase noise
    component; with no leak it is a Rayleigh magnitude.
    """
    mean_sq = 2.0 * inband_noise_power(rx)
    if mean_sq == 0.0:
        return 0.0
    if leak_amplitude > 3.0 * np.sqrt(mean_sq / 2.0):
        return float(np.sqrt(mean_sq / 2.0))
    return float(np.sqrt((1.0 - np.pi / 4.0) * mean_sq))
