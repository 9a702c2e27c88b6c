"""Scalar free-space coupling kernel and its quadrature discretization.

A current distribution J on a transmit aperture produces the received field

    E(r) = integral over tx of  k(r, t) J(t) dt,
    k(r, t) = j * eta * exp(-j * k0 * |r - t|) / (2 * lambda * |r - t|),

with k0 = 2*pi/lambda and eta the wave impedance of the medium.  With
quadrature grids on both apertures the operator becomes the matrix

    A[m, n] = sqrt(w_rx[m]) * k(r_m, t_n) * sqrt(w_tx[n]),

whose plain SVD approximates the singular system of the continuous operator:
the square-root weighting makes Euclidean inner products of coefficient
vectors equal the discrete weighted L2 inner products of the fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, GeometryError, SingularKernelError
from .geometry import QuadratureGrid, surfaces_intersect

# Wave impedance of free space, ohms.
VACUUM_IMPEDANCE_OHM = 376.730313668

# Apertures whose closest quadrature nodes are nearer than this fraction of a
# wavelength produce a near-singular matrix the quadrature cannot resolve.
MIN_SEPARATION_WAVELENGTHS = 0.1

# Row-chunk size for assembling large matrices without huge temporaries.
_ASSEMBLY_CHUNK = 512


@dataclass(frozen=True)
class WaveConfig:
    """Wavelength (m) and medium impedance (ohm); k0 is derived as 2*pi/lambda."""

    wavelength: float
    impedance: float = VACUUM_IMPEDANCE_OHM

    def __post_init__(self):
        if not self.wavelength > 0.0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if not self.impedance > 0.0:
            raise ValueError(f"impedance must be positive, got {self.impedance}")

    @property
    def k0(self) -> float:
        return 2.0 * np.pi / self.wavelength


@dataclass(frozen=True)
class DiscreteOperator:
    """Quadrature discretization of the aperture-to-aperture coupling operator."""

    matrix: np.ndarray  # complex, (N_rx, N_tx)
    tx_grid: QuadratureGrid
    rx_grid: QuadratureGrid
    wave: WaveConfig
    weighting: str = field(default="symmetric-sqrt")

    @property
    def shape(self):
        return self.matrix.shape


def green_kernel(r_rx, r_tx, wave: WaveConfig):
    """Evaluate the scalar coupling kernel; broadcasts over leading axes.

    Parameters
    ----------
    r_rx, r_tx : array_like, shape (..., 3)
        Observation and source points in meters.
    wave : WaveConfig

    Returns
    -------
    complex scalar or ndarray of the broadcast shape.
    """
    r = np.asarray(r_rx, dtype=float)
    t = np.asarray(r_tx, dtype=float)
    d = np.linalg.norm(r - t, axis=-1)
    if np.any(d == 0.0):
        raise SingularKernelError("kernel evaluated at coincident points")
    value = (1j * wave.impedance / (2.0 * wave.wavelength)) \
        * np.exp(-1j * wave.k0 * d) / d
    if np.ndim(value) == 0:
        return complex(value)
    return value


def assemble_operator(tx_grid: QuadratureGrid, rx_grid: QuadratureGrid,
                      wave: WaveConfig) -> DiscreteOperator:
    """Assemble the weighted kernel matrix between two aperture grids.

    Rejects intersecting apertures and apertures whose closest grid nodes
    are nearer than ``MIN_SEPARATION_WAVELENGTHS`` wavelengths.
    """
    if surfaces_intersect(tx_grid.surface, rx_grid.surface):
        raise GeometryError("transmit and receive surfaces intersect")
    rx = rx_grid.points
    tx = tx_grid.points
    n_rx, n_tx = rx.shape[0], tx.shape[0]
    scale = 1j * wave.impedance / (2.0 * wave.wavelength)
    sq_w_rx = np.sqrt(rx_grid.weights)
    sq_w_tx = np.sqrt(tx_grid.weights)
    matrix = np.empty((n_rx, n_tx), dtype=complex)
    min_sep = MIN_SEPARATION_WAVELENGTHS * wave.wavelength
    for start in range(0, n_rx, _ASSEMBLY_CHUNK):
        stop = min(start + _ASSEMBLY_CHUNK, n_rx)
        diff = rx[start:stop, None, :] - tx[None, :, :]
        d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        if d.min() < min_sep:
            raise SingularKernelError(
                f"closest grid nodes are {d.min():.3e} m apart, below "
                f"{MIN_SEPARATION_WAVELENGTHS} wavelengths "
                f"({min_sep:.3e} m)")
        matrix[start:stop] = (sq_w_rx[start:stop, None]
                              * (scale * np.exp(-1j * wave.k0 * d) / d)
                              * sq_w_tx[None, :])
    return DiscreteOperator(matrix=matrix, tx_grid=tx_grid, rx_grid=rx_grid,
                            wave=wave)


def apply(operator: DiscreteOperator, coefficients) -> np.ndarray:
    """Apply the discrete operator to a weighted transmit coefficient vector.

    The input lives in the sqrt(w_tx)-scaled coordinate space (a physical
    current sampled at the tx nodes times sqrt(w_tx)); the output is the
    received field samples times sqrt(w_rx).
    """
    x = np.asarray(coefficients)
    n_rx, n_tx = operator.matrix.shape
    if x.shape != (n_tx,):
        raise DimensionError(
            f"coefficient vector has shape {x.shape}, operator expects ({n_tx},)")
    return operator.matrix @ x


def adjoint_identity_residual(operator: DiscreteOperator, f, g) -> float:
    """| <A f, g> - <f, A* g> | for the discrete weighted inner products.

    Exact adjointness holds by construction; the residual is pure round-off
    and should be at the 1e-12 * |f| * |g| * ||A|| level or below.
    """
    a = operator.matrix
    n_rx, n_tx = a.shape
    fv = np.asarray(f)
    gv = np.asarray(g)
    if fv.shape != (n_tx,) or gv.shape != (n_rx,):
        raise DimensionError(
            f"expected shapes ({n_tx},) and ({n_rx},), got {fv.shape} and {gv.shape}")
    lhs = np.vdot(gv, a @ fv)          # <A f, g> with <x, y> = sum x conj(y)
    rhs = np.vdot(a.conj().T @ gv, fv)  # <f, A* g>
    return float(abs(lhs - rhs))


def hilbert_schmidt_norm(operator: DiscreteOperator) -> float:
    """Squared Hilbert-Schmidt norm: sum over entries of |A[m, n]|^2.

    Discrete approximation of the double aperture integral of |k|^2, and
    equal to the sum of squared singular values.
    """
    return float(np.sum(np.abs(operator.matrix) ** 2))
