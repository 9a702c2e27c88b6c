"""Coupling spectrum, communication modes, and threshold mode counting.

The SVD of the discrete coupling operator gives singular triplets
(s_n, phi_n, psi_n): transmit current patterns phi_n, received field
patterns psi_n, and coupling amplitudes s_n with

    (K phi_n)(r) = s_n psi_n(r),   n = 0, 1, 2, ...   (0-based)

The effective number of degrees of freedom at threshold gamma is

    n_edof(gamma) = min { N : s_N^2 <= gamma },

i.e. the number of modes whose squared coupling strictly exceeds gamma.
The width s_N also equals the Kolmogorov N-width of the set of receivable
fields generated by unit-power transmit currents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DimensionError, NumericalError
from .geometry import QuadratureGrid
from .kernel import DiscreteOperator, WaveConfig

GAMMA_MODES = ("absolute", "relative")


@dataclass(frozen=True)
class CouplingSpectrum:
    """Squared singular values of a discrete coupling operator, descending."""

    values: np.ndarray          # (N,) real, s_n^2 sorted descending
    grid_shape: tuple           # (n_rx_points, n_tx_points)
    wave: WaveConfig

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or self.values.size == 0:
            raise NumericalError("spectrum must hold at least one value")
        if np.any(self.values < 0.0) or np.any(np.diff(self.values) > 0.0):
            raise NumericalError("spectrum values must be nonnegative and descending")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class ModeBasis:
    """Leading singular triplets of a discrete coupling operator.

    Mode arrays hold physical (de-weighted) samples at the grid nodes,
    orthonormal under the weighted inner product sum(w_i x_i conj(y_i)).
    Column n of ``tx_modes`` maps to column n of ``rx_modes`` scaled by
    ``couplings[n]``.  The common phase of each pair is fixed by making the
    largest-modulus entry of the transmit mode real and positive.
    """

    tx_modes: np.ndarray     # (N_tx, n_modes) complex
    rx_modes: np.ndarray     # (N_rx, n_modes) complex
    couplings: np.ndarray    # (n_modes,) real, descending
    tx_grid: QuadratureGrid
    rx_grid: QuadratureGrid

    @property
    def n_modes(self) -> int:
        return self.couplings.size


@dataclass(frozen=True)
class EdofReport:
    """Effective-DoF estimate from one method, with its threshold context."""

    method: str              # "svd" | "cutset" | "landau" | "landau-gamma"
    n_edof: float            # integer-valued for "svd", real for the others
    gamma_mode: str | None = None
    gamma_value: float | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)


def coupling_spectrum(operator: DiscreteOperator) -> CouplingSpectrum:
    """Squared singular values of the operator matrix, descending."""
    try:
        s = np.linalg.svd(operator.matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc
    return CouplingSpectrum(values=s * s,
                            grid_shape=operator.matrix.shape,
                            wave=operator.wave)


def _resolve_threshold(spectrum: CouplingSpectrum, gamma: float, mode: str) -> float:
    if mode not in GAMMA_MODES:
        raise ValueError(f"gamma mode must be one of {GAMMA_MODES}, got {mode!r}")
    if not gamma >= 0.0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    if mode == "relative":
        return gamma * float(spectrum.values[0])
    return float(gamma)


def count_edof(spectrum: CouplingSpectrum, gamma: float,
               mode: str = "absolute") -> int:
    """Number of modes with squared coupling strictly above the threshold.

    In relative mode the threshold is gamma * s_0^2.  Counting stops at the
    first value <= threshold; if every resolved value exceeds it, the count
    saturates at the spectrum length (the grid-resolvable rank).
    """
    threshold = _resolve_threshold(spectrum, gamma, mode)
    return int(np.sum(spectrum.values > threshold))


def kolmogorov_width(spectrum: CouplingSpectrum, n: int) -> float:
    """N-width d_n = s_n (0-based); zero past the resolved spectrum."""
    if n < 0 or int(n) != n:
        raise ValueError(f"mode index must be a nonnegative integer, got {n}")
    if n >= len(spectrum):
        return 0.0
    return float(np.sqrt(spectrum.values[int(n)]))


def extract_modes(operator: DiscreteOperator, n_modes: int) -> ModeBasis:
    """Leading ``n_modes`` singular triplets as physical mode samples."""
    n_rx, n_tx = operator.matrix.shape
    rank = min(n_rx, n_tx)
    if n_modes < 1 or n_modes > rank:
        raise DimensionError(
            f"n_modes must be in [1, {rank}] for a {n_rx} x {n_tx} operator, "
            f"got {n_modes}")
    try:
        u, s, vh = np.linalg.svd(operator.matrix, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc
    u = u[:, :n_modes]
    s = s[:n_modes]
    v = vh.conj().T[:, :n_modes]
    # de-weight: physical samples = weighted coefficients / sqrt(w)
    tx_modes = v / np.sqrt(operator.tx_grid.weights)[:, None]
    rx_modes = u / np.sqrt(operator.rx_grid.weights)[:, None]
    # common phase per pair: largest-modulus tx entry becomes real positive
    anchor_rows = np.argmax(np.abs(tx_modes), axis=0)
    anchors = tx_modes[anchor_rows, np.arange(n_modes)]
    phases = anchors / np.abs(anchors)
    tx_modes = tx_modes * phases.conj()[None, :]
    rx_modes = rx_modes * phases.conj()[None, :]
    return ModeBasis(tx_modes=tx_modes, rx_modes=rx_modes, couplings=s,
                     tx_grid=operator.tx_grid, rx_grid=operator.rx_grid)


def expand_field(field_samples, basis: ModeBasis, side: str) -> np.ndarray:
    """Weighted-inner-product coefficients of a sampled field in the basis.

    coefficients[n] = sum_i w_i field[i] conj(mode_n[i]) for the chosen side.
    """
    if side == "tx":
        modes, grid = basis.tx_modes, basis.tx_grid
    elif side == "rx":
        modes, grid = basis.rx_modes, basis.rx_grid
    else:
        raise ValueError(f"side must be 'tx' or 'rx', got {side!r}")
    f = np.asarray(field_samples)
    if f.shape != (modes.shape[0],):
        raise DimensionError(
            f"field has shape {f.shape}, expected ({modes.shape[0]},)")
    return modes.conj().T @ (grid.weights * f)
