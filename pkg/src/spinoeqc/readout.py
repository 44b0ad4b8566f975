"""Simulated NMR detection: probing pulses, FID synthesis, spectra and
reconstruction of population differences from peak integrals.

Detection model. In the Zeeman-free rotating frame each nucleus's single-
quantum coherences precess only under the J-coupling, giving a doublet at
±J/2. The detected signal per channel is

    s(t) = A_plus * exp(+i 2π (J/2) t) + A_minus * exp(-i 2π (J/2) t),

damped by exp(-t/T2), where for the H channel A_plus = rho[2,0] (coupled
partner C in |0>) and A_minus = rho[3,1] (partner in |1>), and for the C
channel A_plus = rho[1,0], A_minus = rho[3,2]. The +J/2 line therefore
always belongs to the coupled partner in |0>: that is the fixed frequency
convention of this package. Receiver phase is exact, so a positive real
coherence produces a positive absorption peak, and the sign rule "positive
peak means the observed spin's |0>-population exceeds its |1>-population"
holds by construction.

Probing. A simultaneous small-tip pulse (phase y) on both spins converts
the deviation populations d into line amplitudes

    A = sin(tip)/2 * (cos²(tip/2) * Δ_same + sin²(tip/2) * Δ_other)

with Δ the population differences of the observed spin for each partner
state. Those four relations plus tracelessness are linear in d, so a
least-squares solve recovers the full deviation diagonal from one probe;
the overall receiver constant is calibrated once against a thermal
reference run.

Processing fixes: the first FID point is halved before the transform (the
standard baseline correction for one-sided decays; without it window
integrals pick up a large flat offset).
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .quantum import DensityMatrix, apply_unitary
from .spins import PulseSpec, PulseTarget, SpinSystemConfig, pulse_unitary, thermal_state

PROBE_TIP_MAX = 25.0
MIN_FID_SAMPLES = 256
RECONSTRUCTION_RESIDUAL_FRAC = 0.05

# channel -> ((row, col) of the +J/2 and -J/2 coherences in |HC> indexing)
_COHERENCE_INDEX = {
    "H": ((2, 0), (3, 1)),
    "C": ((1, 0), (3, 2)),
}


class Channel(enum.Enum):
    H = "H"
    C = "C"


class ReadoutError(ValueError):
    pass


@dataclass(frozen=True)
class Fid:
    """Complex time-domain signal for one channel."""

    channel: Channel
    dt: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dwell time must be positive")
        s = np.array(self.samples, dtype=complex)
        if s.ndim != 1 or s.size < MIN_FID_SAMPLES:
            raise ValueError(f"FID needs at least {MIN_FID_SAMPLES} samples")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class Spectrum:
    """Frequency-domain signal; freqs in Hz relative to the carrier."""

    channel: Channel
    freqs: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        f = np.array(self.freqs, dtype=float)
        v = np.array(self.values, dtype=complex)
        if f.shape != v.shape or f.ndim != 1:
            raise ValueError("freqs and values must be 1-d and the same length")
        steps = np.diff(f)
        if f.size > 1 and not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
            raise ValueError("frequency axis must be uniformly spaced")
        f.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "values", v)

    @property
    def df(self) -> float:
        return float(self.freqs[1] - self.freqs[0])


@dataclass(frozen=True)
class PeakLine:
    frequency: float
    integral: float
    partner_state: int


@dataclass(frozen=True)
class PeakTable:
    """The two doublet line integrals of one channel (partner 0 entry first)."""

    channel: Channel
    lines: tuple[PeakLine, PeakLine]

    def integral(self, partner_state: int) -> float:
        for line in self.lines:
            if line.partner_state == partner_state:
                return line.integral
        raise KeyError(partner_state)


def synthesize_fid(
    rho_after_pulse: DensityMatrix,
    cfg: SpinSystemConfig,
    channel: Channel,
    n_samples: int = 4096,
    dt: float = 1e-3,
) -> Fid:
    """Quadrature FID of one channel from the state's doublet coherences."""
    (rp, cp), (rm, cm) = _COHERENCE_INDEX[channel.value]
    a_plus = rho_after_pulse.matrix[rp, cp]
    a_minus = rho_after_pulse.matrix[rm, cm]
    t = np.arange(n_samples) * dt
    f0 = cfg.j_coupling / 2.0
    samples = (
        a_plus * np.exp(2j * np.pi * f0 * t) + a_minus * np.exp(-2j * np.pi * f0 * t)
    ) * np.exp(-t / cfg.t2)
    return Fid(channel=channel, dt=dt, samples=samples)


def spectrum(fid: Fid) -> Spectrum:
    """Discrete Fourier transform with absorption phasing.

    Linear in the input; the first point is halved (one-sided decay
    baseline correction) so peaks sit on a flat baseline.
    """
    x = fid.samples.copy()
    x[0] *= 0.5
    values = np.fft.fftshift(np.fft.fft(x))
    freqs = np.fft.fftshift(np.fft.fftfreq(x.size, fid.dt))
    return Spectrum(channel=fid.channel, freqs=freqs, values=values)


def integrate_peaks(spec: Spectrum, cfg: SpinSystemConfig) -> PeakTable:
    """Integrate the real part over windows of width J/2 centered on ±J/2."""
    j = cfg.j_coupling
    lines = []
    for center, partner in ((j / 2.0, 0), (-j / 2.0, 1)):
        lo, hi = center - j / 4.0, center + j / 4.0
        if lo < spec.freqs[0] or hi > spec.freqs[-1]:
            raise ReadoutError(
                "peak window exceeds the spectral width; decrease the dwell time"
            )
        mask = (spec.freqs >= lo) & (spec.freqs <= hi)
        if mask.sum() < 4:
            raise ReadoutError("spectral resolution too coarse for peak windows")
        integral = float(np.sum(spec.values[mask].real) * spec.df)
        lines.append(PeakLine(frequency=center, integral=integral, partner_state=partner))
    return PeakTable(channel=spec.channel, lines=(lines[0], lines[1]))


def _maybe_add_noise(samples: np.ndarray, noise_amp: float, rng) -> np.ndarray:
    if noise_amp <= 0:
        return samples
    if rng is None:
        rng = np.random.default_rng(0)
    noise = rng.normal(0.0, noise_amp, samples.size) + 1j * rng.normal(
        0.0, noise_amp, samples.size
    )
    return samples + noise


def probe(
    rho: DensityMatrix,
    cfg: SpinSystemConfig,
    tip_angle_deg: float,
    n_samples: int = 4096,
    dt: float = 1e-3,
    noise_amp: float = 0.0,
    rng: np.random.Generator | None = None,
) -> tuple[Spectrum, Spectrum]:
    """Probing experiment: simultaneous small-tip y-pulses, both spectra.

    Small tips leave the state essentially intact while the doublet
    integrals expose the deviation populations; tips above 25° void the
    linear reconstruction contract and are rejected.
    """
    if not 0 < tip_angle_deg <= PROBE_TIP_MAX:
        raise ValueError(f"probe tip must be in (0, {PROBE_TIP_MAX}] degrees")
    pulsed = apply_unitary(
        rho, pulse_unitary(PulseSpec(PulseTarget.BOTH, tip_angle_deg, phase=90.0))
    )
    spectra = []
    for channel in (Channel.H, Channel.C):
        fid = synthesize_fid(pulsed, cfg, channel, n_samples, dt)
        samples = _maybe_add_noise(fid.samples, noise_amp, rng)
        spectra.append(spectrum(Fid(channel=channel, dt=dt, samples=samples)))
    return spectra[0], spectra[1]


def readout_spectra(
    rho: DensityMatrix,
    cfg: SpinSystemConfig,
    tip_angle_deg: float = 90.0,
    n_samples: int = 4096,
    dt: float = 1e-3,
    noise_amp: float = 0.0,
    rng: np.random.Generator | None = None,
) -> tuple[Spectrum, Spectrum]:
    """Per-channel readout: a y-pulse on one spin at a time, that spin observed.

    Used after a computation. Unlike the two-spin probe, a single-spin
    pulse maps populations to line amplitudes with no cross-partner mixing
    at any tip angle, so 90° gives maximum signal and a clean one-line
    signature for pure-like states. Both channels come from one simulated
    run (detection here is non-destructive).
    """
    spectra = []
    for channel, target in ((Channel.H, PulseTarget.H), (Channel.C, PulseTarget.C)):
        pulsed = apply_unitary(
            rho, pulse_unitary(PulseSpec(target, tip_angle_deg, phase=90.0))
        )
        fid = synthesize_fid(pulsed, cfg, channel, n_samples, dt)
        samples = _maybe_add_noise(fid.samples, noise_amp, rng)
        spectra.append(spectrum(Fid(channel=channel, dt=dt, samples=samples)))
    return spectra[0], spectra[1]


def _probe_response_matrix(tip_angle_deg: float) -> np.ndarray:
    """Exact linear map from deviation diagonal to the four line amplitudes.

    Rows: H partner 0, H partner 1, C partner 0, C partner 1.
    """
    theta = np.radians(tip_angle_deg)
    s, c = np.sin(theta / 2.0), np.cos(theta / 2.0)
    sc = s * c
    a, b = sc * c * c, sc * s * s
    return np.array(
        [
            [a, b, -a, -b],
            [b, a, -b, -a],
            [a, -a, b, -b],
            [b, -b, a, -a],
        ]
    )


def _stack_integrals(peaks_h: PeakTable, peaks_c: PeakTable) -> np.ndarray:
    return np.array(
        [
            peaks_h.integral(0),
            peaks_h.integral(1),
            peaks_c.integral(0),
            peaks_c.integral(1),
        ]
    )


def calibrate(
    cfg: SpinSystemConfig,
    tip_angle_deg: float,
    n_samples: int = 4096,
    dt: float = 1e-3,
) -> float:
    """Receiver constant from a thermal reference probe.

    Returns K such that measured integrals equal K times the probe
    response applied to the deviation diagonal. Must be produced with the
    same acquisition settings later used for reconstruction.
    """
    ref = thermal_state(cfg)
    dev = ref.matrix.diagonal().real - 0.25
    spec_h, spec_c = probe(ref, cfg, tip_angle_deg, n_samples, dt)
    y = _stack_integrals(integrate_peaks(spec_h, cfg), integrate_peaks(spec_c, cfg))
    m = _probe_response_matrix(tip_angle_deg) @ dev
    denom = float(m @ m)
    if denom == 0.0:
        raise ReadoutError("thermal reference produced no signal")
    return float(y @ m) / denom


def reconstruct_diagonal(
    peaks_h: PeakTable,
    peaks_c: PeakTable,
    tip_angle_deg: float,
    calibration: float,
) -> np.ndarray:
    """Deviation diagonal from one probe's four line integrals.

    Least-squares solve of the four probe-response relations plus the
    traceless constraint. The four relations are rank 3 with one internal
    redundancy, so inconsistent peak data shows up as a residual; residuals
    above 5% of the largest integral are rejected.
    """
    y = _stack_integrals(peaks_h, peaks_c)
    a = calibration * _probe_response_matrix(tip_angle_deg)
    row_scale = np.abs(a).max()
    design = np.vstack([a, np.full(4, row_scale)])
    target = np.concatenate([y, [0.0]])
    diag, *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = float(np.linalg.norm(a @ diag - y))
    ymax = float(np.abs(y).max())
    if ymax > 0 and residual > RECONSTRUCTION_RESIDUAL_FRAC * ymax:
        raise ReadoutError(
            f"inconsistent peak data (residual {residual:.3e} vs max integral {ymax:.3e})"
        )
    return diag


def spectrum_to_csv(spec: Spectrum, path) -> None:
    """Write a spectrum as CSV with columns freq_hz, real, imag."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["freq_hz", "real", "imag"])
        for f, v in zip(spec.freqs, spec.values):
            writer.writerow([repr(float(f)), repr(float(v.real)), repr(float(v.imag))])


def peak_table_to_csv(peaks: PeakTable, path) -> None:
    """Write a peak table as CSV with columns freq_hz, integral, partner_state."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["freq_hz", "integral", "partner_state"])
        for line in peaks.lines:
            writer.writerow([repr(line.frequency), repr(line.integral), line.partner_state])
