"""Trigonometric polynomials on the circle and their Sobolev geometry.

A state is u(x) = mean + sum_{k=1}^N a_k cos(kx) + b_k sin(kx).  All inner
products use the plain L2 pairing <f, g> = int_0^{2pi} f(x) g(x) dx, so
||cos(kx)||_{L2}^2 = pi.  Mean-zero states form the phase space; on it we
use the weighted norm

    ||u||_Z^2 = pi * sum_k ((1 + k^2)/k) (a_k^2 + b_k^2),

for which the scaled modes sqrt(n / (pi (n^2+1))) cos(nx) and sin(nx) are an
exact orthonormal basis.  The coordinates of u in that basis are the
canonical pair coordinates (p_n, q_n) used by the flow map and by the
squeezing experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Mean magnitudes below this count as zero for phase-space preconditions.
MEAN_TOL = 1e-12


class ResolutionError(ValueError):
    """Sample grid too coarse for the requested truncation (aliasing risk)."""


def _coeffs(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError("coefficient list must be one-dimensional")
    return arr


@dataclass(frozen=True)
class TrigState:
    """Real trigonometric polynomial: mean value plus (a_k, b_k) mode pairs.

    Immutable value type.  The truncation N is the length of the coefficient
    arrays; trailing zeros are kept, never dropped silently.
    """

    mean: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _coeffs(self.a).copy()
        b = _coeffs(self.b).copy()
        if len(a) != len(b):
            raise ValueError(
                f"cos/sin coefficient lists differ in length: {len(a)} vs {len(b)}"
            )
        if len(a) < 1:
            raise ValueError("truncation must be at least 1")
        mean = float(self.mean)
        if not (math.isfinite(mean) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("state coefficients must be finite")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n_modes(self) -> int:
        return len(self.a)

    @classmethod
    def zero(cls, n_modes: int) -> "TrigState":
        return cls(0.0, np.zeros(n_modes), np.zeros(n_modes))

    @classmethod
    def mean_zero(cls, a, b) -> "TrigState":
        """Phase-space constructor: mean pinned to exactly 0."""
        return cls(0.0, a, b)

    @classmethod
    def single_mode(cls, k: int, n_modes: int, a_k: float = 0.0, b_k: float = 0.0) -> "TrigState":
        if not 1 <= k <= n_modes:
            raise ValueError(f"mode {k} outside truncation {n_modes}")
        a = np.zeros(n_modes)
        b = np.zeros(n_modes)
        a[k - 1] = a_k
        b[k - 1] = b_k
        return cls(0.0, a, b)

    def padded(self, n_modes: int) -> "TrigState":
        """Same state with trailing zero modes appended (never truncates)."""
        if n_modes < self.n_modes:
            raise ValueError("padding target smaller than current truncation")
        if n_modes == self.n_modes:
            return self
        extra = np.zeros(n_modes - self.n_modes)
        return TrigState(self.mean, np.concatenate([self.a, extra]), np.concatenate([self.b, extra]))

    def __add__(self, other: "TrigState") -> "TrigState":
        n = max(self.n_modes, other.n_modes)
        u, v = self.padded(n), other.padded(n)
        return TrigState(u.mean + v.mean, u.a + v.a, u.b + v.b)

    def __sub__(self, other: "TrigState") -> "TrigState":
        return self + (-1.0) * other

    def __mul__(self, c: float) -> "TrigState":
        return TrigState(c * self.mean, c * self.a, c * self.b)

    __rmul__ = __mul__

    def __neg__(self) -> "TrigState":
        return (-1.0) * self


@dataclass(frozen=True)
class SymplecticCoords:
    """Canonical pair coordinates (p_n, q_n) of a mean-zero state."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = _coeffs(self.p).copy()
        q = _coeffs(self.q).copy()
        if len(p) != len(q):
            raise ValueError("p/q coordinate lists differ in length")
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def n_modes(self) -> int:
        return len(self.p)

    def norm(self) -> float:
        """Euclidean norm, equal to the Z norm of the state it represents."""
        return math.sqrt(float(np.sum(self.p ** 2) + np.sum(self.q ** 2)))


@dataclass(frozen=True)
class GridSamples:
    """Values of u at the equispaced points x_j = 2 pi j / M."""

    values: np.ndarray

    def __post_init__(self):
        vals = _coeffs(self.values).copy()
        if len(vals) < 1:
            raise ValueError("empty sample grid")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return len(self.values)


def require_mean_zero(state: TrigState, op: str) -> None:
    if abs(state.mean) > MEAN_TOL:
        raise ValueError(f"{op} requires a mean-zero state (mean = {state.mean!r})")


def wavenumbers(n_modes: int) -> np.ndarray:
    return np.arange(1, n_modes + 1, dtype=float)


def dispersion_symbol(k) -> np.ndarray:
    """phi(k) = k / (1 + k^2), the linear BBM dispersion multiplier."""
    k = np.asarray(k, dtype=float)
    return k / (1.0 + k * k)


def basis_scale(n_modes: int) -> np.ndarray:
    """c_n = sqrt(n / (pi (n^2+1))): cos/sin prefactor of the Z-orthonormal modes."""
    k = wavenumbers(n_modes)
    return np.sqrt(k / (math.pi * (k * k + 1.0)))


def unit_cos_mode(k: int, n_modes: int) -> TrigState:
    """Z-normalized cosine mode: sqrt(k/(pi(k^2+1))) cos(kx)."""
    c = float(basis_scale(n_modes)[k - 1])
    return TrigState.single_mode(k, n_modes, a_k=c)


def unit_sin_mode(k: int, n_modes: int) -> TrigState:
    """Z-normalized sine mode: sqrt(k/(pi(k^2+1))) sin(kx)."""
    c = float(basis_scale(n_modes)[k - 1])
    return TrigState.single_mode(k, n_modes, b_k=c)


def synthesize(state: TrigState, m: int, method: str = "fft") -> GridSamples:
    """Evaluate the state at x_j = 2 pi j / M, j = 0..M-1.

    Requires M >= 2N+1 so that the analysis of the samples is exact.  The
    fft and direct methods agree to 1e-12 and exist to cross-check each
    other.
    """
    n = state.n_modes
    if m < 2 * n + 1:
        raise ResolutionError(f"resolution too low: M = {m} < 2N+1 = {2 * n + 1}")
    if method == "fft":
        spec = np.zeros(m // 2 + 1, dtype=complex)
        spec[0] = m * state.mean
        spec[1:n + 1] = 0.5 * m * (state.a - 1j * state.b)
        return GridSamples(np.fft.irfft(spec, m))
    if method == "direct":
        x = 2.0 * math.pi * np.arange(m) / m
        kx = np.outer(wavenumbers(n), x)
        vals = state.mean + state.a @ np.cos(kx) + state.b @ np.sin(kx)
        return GridSamples(vals)
    raise ValueError(f"unknown synthesis method {method!r}")


def analyze(samples: GridSamples, n_modes: int) -> TrigState:
    """Exact trigonometric interpolation coefficients for modes <= n_modes.

    The grid must satisfy M >= 2N+1; coarser grids alias and are rejected.
    """
    m = samples.m
    if m < 2 * n_modes + 1:
        raise ResolutionError(
            f"aliasing risk: M = {m} < 2N+1 = {2 * n_modes + 1} samples for N = {n_modes} modes"
        )
    spec = np.fft.rfft(samples.values)
    mean = float(spec[0].real) / m
    a = 2.0 * spec[1:n_modes + 1].real / m
    b = -2.0 * spec[1:n_modes + 1].imag / m
    return TrigState(mean, a, b)


def sobolev_norm(state: TrigState, s: float) -> float:
    """H^s norm: (sum_k <k>^{2s} pi (a_k^2+b_k^2) + 2 pi mean^2)^{1/2}.

    <k> = (1+k^2)^{1/2}; s may be negative.
    """
    k = wavenumbers(state.n_modes)
    w = (1.0 + k * k) ** s
    total = math.pi * float(np.sum(w * (state.a ** 2 + state.b ** 2)))
    total += 2.0 * math.pi * state.mean ** 2
    return math.sqrt(total)


def _z_weights(n_modes: int) -> np.ndarray:
    k = wavenumbers(n_modes)
    return math.pi * (1.0 + k * k) / k


def z_norm(state: TrigState) -> float:
    """Phase-space norm (pi sum_k ((1+k^2)/k)(a_k^2+b_k^2))^{1/2}.

    Exactly 1 on the scaled basis modes.  Defined on mean-zero states only.
    """
    require_mean_zero(state, "z_norm")
    w = _z_weights(state.n_modes)
    return math.sqrt(float(np.sum(w * (state.a ** 2 + state.b ** 2))))


def z_inner(u: TrigState, v: TrigState) -> float:
    """Inner product associated with z_norm."""
    require_mean_zero(u, "z_inner")
    require_mean_zero(v, "z_inner")
    n = max(u.n_modes, v.n_modes)
    u, v = u.padded(n), v.padded(n)
    w = _z_weights(n)
    return float(np.sum(w * (u.a * v.a + u.b * v.b)))


def dispersion_multiplier(state: TrigState) -> TrigState:
    """Apply the Fourier multiplier phi(k) = k/(1+k^2) mode by mode.

    phi(0) = 0, so the mean is annihilated.
    """
    phi = dispersion_symbol(wavenumbers(state.n_modes))
    return TrigState(0.0, phi * state.a, phi * state.b)


def project(state: TrigState, n_max: int) -> TrigState:
    """Zero out every mode above n_max (coefficient arrays keep their length)."""
    if n_max < 1:
        raise ValueError("projection cutoff must be >= 1")
    if n_max >= state.n_modes:
        return state
    a = state.a.copy()
    b = state.b.copy()
    a[n_max:] = 0.0
    b[n_max:] = 0.0
    return TrigState(state.mean, a, b)


def truncate(state: TrigState, n_modes: int) -> TrigState:
    """Shorten the coefficient arrays to n_modes; the dropped tail must be zero."""
    if n_modes >= state.n_modes:
        return state.padded(n_modes)
    tail_a = state.a[n_modes:]
    tail_b = state.b[n_modes:]
    if np.any(tail_a != 0.0) or np.any(tail_b != 0.0):
        raise ValueError("refusing to truncate nonzero modes; project first")
    return TrigState(state.mean, state.a[:n_modes], state.b[:n_modes])


def apply_J(state: TrigState) -> TrigState:
    """The complex structure J: in pair coordinates (p_n, q_n) -> (q_n, -p_n).

    Sends the scaled cosine mode to minus the scaled sine mode and vice
    versa; J o J = -identity.  Mean-zero states only.
    """
    require_mean_zero(state, "apply_J")
    return TrigState(0.0, state.b.copy(), -state.a)


def to_symplectic(state: TrigState) -> SymplecticCoords:
    """Coordinates in the Z-orthonormal basis: p_n = a_n sqrt(pi(n^2+1)/n)."""
    require_mean_zero(state, "to_symplectic")
    scale = basis_scale(state.n_modes)
    return SymplecticCoords(state.a / scale, state.b / scale)


def from_symplectic(coords: SymplecticCoords) -> TrigState:
    scale = basis_scale(coords.n_modes)
    return TrigState(0.0, coords.p * scale, coords.q * scale)
