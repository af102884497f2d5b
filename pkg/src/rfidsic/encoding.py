"""Tag-side line coding: FM0 and Miller control-signal synthesis.

A tag communicates by switching its antenna load between absorb (0) and
reflect (1).  Each symbol is one of four square waveforms s_0..s_3 built from
two unit-energy basis functions; which waveform encodes a symbol depends on
the previous symbol (one-symbol memory), captured by the per-bit transition
matrices H_0 and H_1.  A reply is preamble + 16 data symbols + one postamble
symbol, all at the tag's own subcarrier period.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, ParameterError
from .waveform import PiecewiseConstant, SampledSignal, edge_index

FM0 = "FM0"
MILLER = "Miller"

RN16_BITS = 16

# Preamble length in symbols, keyed by (kind, trext).
_PREAMBLE_SYMBOLS = {
    (FM0, False): 6,
    (FM0, True): 18,
    (MILLER, False): 10,
    (MILLER, True): 26,
}

# Preamble state sequences (indices into s_0..s_3).  The short FM0 preamble
# is s_1 s_2 s_3 s_0 s_3 s_1; the extended variants prepend a pilot run of
# s_0 symbols (12 for FM0, 16 for Miller).
_PREAMBLE_STATES = {
    (FM0, False): (1, 2, 3, 0, 3, 1),
    (FM0, True): (0,) * 12 + (1, 2, 3, 0, 3, 1),
    (MILLER, False): (0, 0, 0, 0, 0, 1, 2, 3, 1, 3),
    (MILLER, True): (0,) * 16 + (0, 0, 0, 0, 0, 1, 2, 3, 1, 3),
}

_H_MATRICES = {
    FM0: (
        ((1, 0, 0, 1), (0, 0, 0, 0), (0, 1, 1, 0), (0, 0, 0, 0)),
        ((0, 0, 0, 0), (1, 0, 0, 1), (0, 0, 0, 0), (0, 1, 1, 0)),
    ),
    MILLER: (
        ((0, 0, 1, 1), (0, 0, 0, 0), (1, 1, 0, 0), (0, 0, 0, 0)),
        ((0, 0, 0, 0), (1, 0, 0, 1), (0, 0, 0, 0), (0, 1, 1, 0)),
    ),
}


@dataclass(frozen=True)
class EncodingScheme:
    """Line-code selection: FM0 (M=1) or Miller with M in {2, 4, 8} subcarrier
    cycles per symbol, plus the TRext flag choosing the short or extended
    (pilot-tone) preamble."""

    kind: str
    m: int = 1
    trext: bool = False

    def __post_init__(self):
        if self.kind == FM0:
            if self.m != 1:
                raise ParameterError("FM0 requires M=1")
        elif self.kind == MILLER:
            if self.m not in (2, 4, 8):
                raise ParameterError("Miller requires M in {2, 4, 8}")
        else:
            raise ParameterError(f"unknown encoding kind {self.kind!r}")

    @classmethod
    def fm0(cls, trext: bool = False) -> "EncodingScheme":
        return cls(FM0, 1, trext)

    @classmethod
    def miller(cls, m: int = 2, trext: bool = False) -> "EncodingScheme":
        return cls(MILLER, m, trext)

    @property
    def n_preamble_symbols(self) -> int:
        return _PREAMBLE_SYMBOLS[(self.kind, self.trext)]

    @property
    def initial_state_index(self) -> int:
        """State of the last preamble symbol: s_1 for FM0, s_3 for Miller."""
        return 1 if self.kind == FM0 else 3

    @property
    def flipped_initial_state_index(self) -> int:
        """Initial state seen under a channel phase flip (s_1 <-> s_3)."""
        return 3 if self.kind == FM0 else 1

    @property
    def label(self) -> str:
        base = self.kind if self.kind == FM0 else f"{MILLER}{self.m}"
        return f"{base}/TRext{int(self.trext)}"


@dataclass(frozen=True)
class TagParams:
    """One tag's reply parameters: subcarrier period ``a`` (1/link frequency)
    and reply delay ``b``, both in seconds."""

    a: float
    b: float = 0.0

    def __post_init__(self):
        if self.a <= 0:
            raise ParameterError("subcarrier period must be positive")
        if self.b < 0:
            raise ParameterError("reply delay must be nonnegative")

    @property
    def link_frequency(self) -> float:
        return 1.0 / self.a


@dataclass(frozen=True)
class StateSelectMatrix:
    """Column-coordinate-vector matrix recording which waveform s_k encodes
    each symbol; ``states`` holds the 0-based indices k."""

    states: tuple

    def __post_init__(self):
        if len(self.states) == 0:
            raise ParameterError("state select matrix needs at least one column")
        if any(k not in (0, 1, 2, 3) for k in self.states):
            raise ParameterError("state indices must be in 0..3")

    def __len__(self):
        return len(self.states)

    def as_matrix(self) -> np.ndarray:
        """4 x N matrix whose columns are the coordinate vectors e_{k+1}."""
        mat = np.zeros((4, len(self.states)), dtype=np.int64)
        mat[list(self.states), np.arange(len(self.states))] = 1
        return mat


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.int64).ravel()
    if arr.size == 0:
        raise ParameterError("message must contain at least one bit")
    if not np.all((arr == 0) | (arr == 1)):
        raise ParameterError("message bits must be 0 or 1")
    return arr


def transition_matrices(scheme: EncodingScheme):
    """Return (H_0, H_1, H) where H_m[k, k'] = 1 marks the valid transition
    from state s_k' to state s_k when symbol m is sent, and H = H_0 + H_1."""
    h0, h1 = (np.array(m, dtype=np.int64) for m in _H_MATRICES[scheme.kind])
    return h0, h1, h0 + h1


@lru_cache(maxsize=None)
def _next_state_table(kind: str) -> np.ndarray:
    """NEXT[m, k] = state reached from s_k when bit m is sent."""
    h0, h1 = (np.array(m) for m in _H_MATRICES[kind])
    return np.stack([np.argmax(h0, axis=0), np.argmax(h1, axis=0)])


def initial_state(scheme: EncodingScheme) -> np.ndarray:
    """Coordinate vector of the state preceding the first data symbol."""
    vec = np.zeros(4, dtype=np.int64)
    vec[scheme.initial_state_index] = 1
    return vec


def build_state_select(bits, scheme: EncodingScheme) -> StateSelectMatrix:
    """Chain the message through H_{m_n} starting from the scheme's initial
    state and append the postamble column (a forced symbol-1 transition)."""
    arr = _as_bits(bits)
    nxt = _next_state_table(scheme.kind)
    states = []
    cur = scheme.initial_state_index
    for m in arr:
        cur = int(nxt[m, cur])
        states.append(cur)
    states.append(int(nxt[1, cur]))
    return StateSelectMatrix(tuple(states))


def preamble_select(scheme: EncodingScheme) -> StateSelectMatrix:
    return StateSelectMatrix(_PREAMBLE_STATES[(scheme.kind, scheme.trext)])


@lru_cache(maxsize=None)
def _half_period_signs(kind: str, m: int):
    """Half-subcarrier-period sign patterns (+1/-1) of the two basis
    functions over one symbol; each pattern has 2M entries."""
    if kind == FM0:
        phi0 = (1, -1)
        phi1 = (1, 1)
    else:
        phi0 = (1, -1) * m
        phi1 = (1, -1) * (m // 2) + (-1, 1) * (m // 2)
    return np.array(phi0, dtype=np.float64), np.array(phi1, dtype=np.float64)


def basis_segments(scheme: EncodingScheme, k: int, period: float) -> PiecewiseConstant:
    """Unit-energy basis function phi_k over its support [0, M*period)."""
    if k not in (0, 1):
        raise ParameterError("basis index must be 0 or 1")
    if period <= 0:
        raise ParameterError("period must be positive")
    signs = _half_period_signs(scheme.kind, scheme.m)[k]
    amp = 1.0 / np.sqrt(scheme.m * period)
    bounds = np.arange(len(signs) + 1) * (period / 2.0)
    return PiecewiseConstant(bounds, signs * amp)


def basis_waveform(scheme: EncodingScheme, k: int, period: float, t):
    return basis_segments(scheme, k, period)(t)


def signal_segments(scheme: EncodingScheme, k: int, period: float) -> PiecewiseConstant:
    """Signal waveform s_k with levels +-1/2 (before the on-off offset)."""
    if k not in (0, 1, 2, 3):
        raise ParameterError("signal index must be in 0..3")
    base = basis_segments(scheme, k % 2, period)
    coeff = np.sqrt(scheme.m * period) / 2.0
    if k >= 2:
        coeff = -coeff
    return PiecewiseConstant(base.bounds, base.values * coeff)


def signal_waveform(scheme: EncodingScheme, k: int, period: float, t):
    return signal_segments(scheme, k, period)(t)


@lru_cache(maxsize=None)
def _control_patterns(kind: str, m: int) -> np.ndarray:
    """PATTERN[k] = on/off levels {0,1} per half period for state s_k."""
    phi0, phi1 = _half_period_signs(kind, m)
    rows = [phi0, phi1, -phi0, -phi1]
    return np.stack([0.5 + 0.5 * r for r in rows])


def reply_duration(a: float, scheme: EncodingScheme, n_bits: int = RN16_BITS) -> float:
    """Duration of preamble + data + postamble at subcarrier period ``a``."""
    return a * scheme.m * (scheme.n_preamble_symbols + n_bits + 1)


def generate_control_signal(params: TagParams, scheme: EncodingScheme, bits,
                            fs: float) -> SampledSignal:
    """Synthesize the on-off control signal c(t) of one complete reply.

    The reply starts at t=0 (the delay is applied by the channel) and spans
    the preamble, the message, and the symbol-1 postamble.  Samples are
    exactly 0.0 or 1.0; edges land on the shared quantization grid.
    """
    if fs * params.a / 2.0 < 4.0:
        raise ConfigError("sample rate too low: need at least 4 samples per half subcarrier period")
    states = preamble_select(scheme).states + build_state_select(bits, scheme).states
    patterns = _control_patterns(scheme.kind, scheme.m)
    values = np.concatenate([patterns[k] for k in states])
    half = params.a / 2.0
    bounds = np.arange(len(values) + 1) * half
    n_samples = int(edge_index(bounds[-1], fs))
    samples = PiecewiseConstant(bounds, values).sample(fs, n_samples)
    return SampledSignal(samples, fs)
