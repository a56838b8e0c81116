"""Deterministic random-state factories.

All randomness in the package flows from one 64-bit seed through
SeedSequence spawn keys, so every sample is identified by (seed, path) and
is reproducible regardless of evaluation order or worker scheduling.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

from .spectral import TrigState, sobolev_norm, wavenumbers, z_norm

_MASK64 = (1 << 64) - 1


def _path_id(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & _MASK64
    digest = hashlib.blake2s(str(part).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, *path) -> np.random.Generator:
    """Generator for the sub-experiment identified by (seed, *path)."""
    key = tuple(_path_id(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=key))


def gaussian_modes(rng: np.random.Generator, n_modes: int, decay: float) -> TrigState:
    """Mean-zero state with a_k, b_k ~ N(0,1) scaled by <k>^{-decay}."""
    k = wavenumbers(n_modes)
    w = (1.0 + k * k) ** (-decay / 2.0)
    a = rng.standard_normal(n_modes) * w
    b = rng.standard_normal(n_modes) * w
    return TrigState.mean_zero(a, b)


def sobolev_ball_state(
    rng: np.random.Generator,
    n_modes: int,
    reg: float,
    radius: float,
    decay: float | None = None,
) -> TrigState:
    """Random state with H^reg norm exactly `radius`.

    The default spectral decay <k>^{-(reg + 1/2 + 0.01)} concentrates mass
    near the critical regularity, which is where the bilinear estimates are
    tightest; pass a larger `decay` for smoother draws.
    """
    if decay is None:
        decay = reg + 0.5 + 0.01
    u = gaussian_modes(rng, n_modes, decay)
    nrm = sobolev_norm(u, reg)
    if nrm == 0.0:
        raise ValueError("degenerate zero draw")
    return (radius / nrm) * u


def z_sphere_state(rng: np.random.Generator, radius: float, n_modes: int, n_active: int) -> TrigState:
    """Uniform direction on the Z sphere of the first n_active mode pairs."""
    if not 1 <= n_active <= n_modes:
        raise ValueError(f"n_active = {n_active} outside 1..{n_modes}")
    from .spectral import SymplecticCoords, from_symplectic  # local to avoid cycle noise

    p = np.zeros(n_modes)
    q = np.zeros(n_modes)
    p[:n_active] = rng.standard_normal(n_active)
    q[:n_active] = rng.standard_normal(n_active)
    nrm = math.sqrt(float(np.sum(p * p + q * q)))
    if nrm == 0.0:
        raise ValueError("degenerate zero draw")
    return from_symplectic(SymplecticCoords(radius * p / nrm, radius * q / nrm))


def smooth_profile(n_modes: int, k_max: int = 20) -> TrigState:
    """The shipped smooth initial state: sum_{k<=k_max} k^{-2}(cos kx + sin kx), Z-normalized."""
    km = min(k_max, n_modes)
    a = np.zeros(n_modes)
    b = np.zeros(n_modes)
    k = np.arange(1, km + 1, dtype=float)
    a[:km] = k ** -2.0
    b[:km] = k ** -2.0
    u = TrigState.mean_zero(a, b)
    return (1.0 / z_norm(u)) * u
