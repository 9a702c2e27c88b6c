"""Spectrum extraction, mode bases, and threshold counting."""

import numpy as np
import pytest

from edof.errors import DimensionError, NumericalError
from edof.geometry import discretize, make_surface
from edof.kernel import WaveConfig, assemble_operator, green_kernel, hilbert_schmidt_norm
from edof.spectrum import (
    CouplingSpectrum,
    count_edof,
    coupling_spectrum,
    expand_field,
    extract_modes,
    kolmogorov_width,
)


def _synthetic(values):
    return CouplingSpectrum(values=np.asarray(values, dtype=float),
                            grid_shape=(len(values), len(values)),
                            wave=WaveConfig(wavelength=0.01))


def test_count_is_strictly_above_threshold():
    spec = _synthetic([4.0, 3.0, 1.0, 0.1])
    assert count_edof(spec, 0.5) == 3
    assert count_edof(spec, 1.0) == 2      # the value 1.0 itself is excluded
    assert count_edof(spec, 0.0) == 4      # saturates at the resolved rank


def test_count_single_value_at_its_own_level():
    assert count_edof(_synthetic([0.1]), 0.1) == 0


def test_count_relative_mode_scales_by_leading_value():
    spec = _synthetic([4.0, 3.0, 1.0, 0.1])
    assert count_edof(spec, 0.5, mode="relative") == 2  # threshold 2.0


def test_count_monotone_in_gamma():
    spec = _synthetic([4.0, 3.0, 1.0, 0.1])
    counts = [count_edof(spec, g) for g in np.linspace(0.0, 5.0, 40)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_count_rejects_bad_threshold_arguments():
    spec = _synthetic([1.0])
    with pytest.raises(ValueError):
        count_edof(spec, 0.5, mode="median")
    with pytest.raises(ValueError):
        count_edof(spec, -0.1)


def test_kolmogorov_width_reads_the_spectrum():
    spec = _synthetic([4.0, 3.0, 1.0, 0.1])
    assert kolmogorov_width(spec, 0) == pytest.approx(2.0, rel=1e-15)
    assert kolmogorov_width(spec, 2) == pytest.approx(1.0, rel=1e-15)
    assert kolmogorov_width(spec, 10) == 0.0
    with pytest.raises(ValueError):
        kolmogorov_width(spec, -1)


def test_spectrum_container_enforces_order_and_sign():
    wave = WaveConfig(wavelength=0.01)
    with pytest.raises(NumericalError):
        CouplingSpectrum(values=np.array([1.0, 2.0]), grid_shape=(2, 2), wave=wave)
    with pytest.raises(NumericalError):
        CouplingSpectrum(values=np.array([1.0, -0.5]), grid_shape=(2, 2), wave=wave)
    with pytest.raises(NumericalError):
        CouplingSpectrum(values=np.array([]), grid_shape=(0, 0), wave=wave)


def test_spectrum_sum_equals_squared_frobenius(small_operator):
    spec = coupling_spectrum(small_operator)
    assert float(np.sum(spec.values)) == pytest.approx(
        hilbert_schmidt_norm(small_operator), rel=1e-10)


def test_gram_eigenvalues_agree_between_sides(small_operator):
    a = small_operator.matrix
    tx_eigs = np.linalg.eigvalsh(a.conj().T @ a)[::-1]
    rx_eigs = np.linalg.eigvalsh(a @ a.conj().T)[::-1]
    spec = coupling_spectrum(small_operator).values
    k = min(len(tx_eigs), len(rx_eigs))
    assert np.allclose(tx_eigs[:k], rx_eigs[:k], rtol=1e-10, atol=1e-10 * spec[0])
    assert np.allclose(spec[:k], tx_eigs[:k], rtol=1e-8, atol=1e-10 * spec[0])


def test_anchor_count_in_paraxial_band(anchor_spectrum):
    n = count_edof(anchor_spectrum, 0.5, mode="relative")
    assert 4 <= n <= 9


def test_modes_orthonormal_under_weighted_inner_product(small_operator):
    basis = extract_modes(small_operator, 12)
    for modes, grid in ((basis.tx_modes, basis.tx_grid),
                        (basis.rx_modes, basis.rx_grid)):
        gram = modes.conj().T @ (grid.weights[:, None] * modes)
        assert np.max(np.abs(gram - np.eye(12))) < 1e-10


def test_modes_satisfy_the_coupling_relation(small_operator):
    basis = extract_modes(small_operator, 8)
    s0 = basis.couplings[0]
    w_tx = np.sqrt(small_operator.tx_grid.weights)
    w_rx = np.sqrt(small_operator.rx_grid.weights)
    for n in range(8):
        lhs = small_operator.matrix @ (w_tx * basis.tx_modes[:, n])
        rhs = basis.couplings[n] * (w_rx * basis.rx_modes[:, n])
        assert np.linalg.norm(lhs - rhs) <= 1e-8 * s0


def test_modes_do_not_cross_couple(small_operator):
    basis = extract_modes(small_operator, 8)
    u = np.sqrt(small_operator.rx_grid.weights)[:, None] * basis.rx_modes
    v = np.sqrt(small_operator.tx_grid.weights)[:, None] * basis.tx_modes
    coupling = u.conj().T @ small_operator.matrix @ v
    off = coupling - np.diag(basis.couplings)
    assert np.max(np.abs(off)) < 1e-8 * basis.couplings[0]


def test_mode_phase_anchored_real_positive(small_operator):
    basis = extract_modes(small_operator, 5)
    anchors = basis.tx_modes[np.argmax(np.abs(basis.tx_modes), axis=0),
                             np.arange(5)]
    assert np.all(anchors.real > 0.0)
    assert np.max(np.abs(anchors.imag)) < 1e-12 * np.max(np.abs(anchors.real))


def test_extract_modes_rejects_out_of_range_requests(small_operator):
    rank = min(small_operator.shape)
    with pytest.raises(DimensionError):
        extract_modes(small_operator, 0)
    with pytest.raises(DimensionError):
        extract_modes(small_operator, rank + 1)


def test_single_point_mode_pair():
    wave = WaveConfig(wavelength=0.01)
    tx = make_surface((0.0, 0.0, 0.0), np.eye(3), 1.0, 1.0)
    rx = make_surface((0.0, 0.0, 2.0), np.eye(3), 1.0, 1.0)
    op = assemble_operator(discretize(tx, 1, 1), discretize(rx, 1, 1), wave)
    basis = extract_modes(op, 1)
    k = green_kernel(op.rx_grid.points[0], op.tx_grid.points[0], wave)
    assert basis.couplings[0] == pytest.approx(abs(k), rel=1e-12)
    assert basis.tx_modes[0, 0] == pytest.approx(1.0, rel=1e-12)
    assert abs(basis.rx_modes[0, 0]) == pytest.approx(1.0, rel=1e-12)


def test_expand_field_recovers_mode_coefficients(small_operator):
    basis = extract_modes(small_operator, 6)
    coeffs = expand_field(basis.tx_modes[:, 2], basis, side="tx")
    expected = np.zeros(6)
    expected[2] = 1.0
    assert np.allclose(coeffs, expected, atol=1e-10)
    assert np.all(expand_field(np.zeros(basis.rx_modes.shape[0]), basis, side="rx")
                  == 0.0)


def test_expand_field_full_basis_reconstruction():
    wave = WaveConfig(wavelength=0.01)
    tx = make_surface((0.0, 0.0, 0.0), np.eye(3), 0.5, 0.5)
    rx = make_surface((0.0, 0.0, 10.0), np.eye(3), 0.5, 0.5)
    op = assemble_operator(discretize(tx, 6, 6), discretize(rx, 6, 6), wave)
    basis = extract_modes(op, 36)
    rng = np.random.default_rng(3)
    f = rng.standard_normal(36) + 1j * rng.standard_normal(36)
    coeffs = expand_field(f, basis, side="tx")
    reconstructed = basis.tx_modes @ coeffs
    assert np.linalg.norm(reconstructed - f) <= 1e-9 * np.linalg.norm(f)


def test_expand_field_validates_inputs(small_operator):
    basis = extract_modes(small_operator, 3)
    with pytest.raises(ValueError):
        expand_field(np.zeros(basis.tx_modes.shape[0]), basis, side="middle")
    with pytest.raises(DimensionError):
        expand_field(np.zeros(basis.tx_modes.shape[0] + 1), basis, side="tx")
