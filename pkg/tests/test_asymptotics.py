"""Outer/band/Airy-edge formulas, parametrices, and zero diagnostics."""

import math

import numpy as np
import pytest
from mpmath import mp

from oscgauss import asymptotics as asym
from oscgauss import opq, scurve
from oscgauss.errors import OnCutError, OutsideDiskError, RegionError
from oscgauss.precision import PrecisionContext

SQRT2 = math.sqrt(2.0)


def test_global_parametrix_det_and_infinity(phase):
    npar = asym.GlobalParametrix(phase)
    for z in (3 + 4j, -0.5 - 1.5j, -3 + 0.2j):
        det = np.linalg.det(npar.n_matrix(z))
        assert abs(det - 1.0) <= 1e-12
    # N -> I at infinity
    far = npar.n_matrix(1e6 + 1e6j)
    assert np.max(np.abs(far - np.eye(2))) <= 1e-5


def test_beta_jump_ratio_is_i(phase):
    z = complex(scurve.curve_points_at_mass(
        phase.gamma, 0.5 * phase.gamma.total_mass)[0])
    q = scurve.q_sqrt_chord(z)
    nrm = q.conjugate() / abs(q)
    npar = asym.GlobalParametrix(phase)

    def ratio(h):
        return npar.beta_eval(z + h * nrm) / npar.beta_eval(z - h * nrm)

    # offsets must clear the on-cut guard; the O(h) drift is removed by
    # one Richardson step, leaving the boundary-value ratio itself
    h = 4.0 * phase.gamma.resolution
    extrapolated = 2.0 * ratio(h / 2.0) - ratio(h)
    assert abs(extrapolated - 1j) <= 5e-3


def test_beta_on_cut_raises(phase):
    npar = asym.GlobalParametrix(phase)
    mid = complex(phase.gamma.points_complex()[len(phase.gamma) // 2])
    with pytest.raises(OnCutError):
        npar.beta_eval(mid)


def test_conformal_map_derivative_and_modulus(phase):
    airy = asym.AiryParametrix(phase)
    z2 = complex(phase.qd.z2)
    h = 1e-6
    der = (airy.conformal_f(z2 + h) - airy.conformal_f(z2 - h)) / (2 * h)
    assert abs(der - asym.FC) <= 1e-5
    assert abs(abs(asym.FC) - 18.0 ** (1.0 / 6.0)) <= 1e-12


def test_conformal_map_aligns_cut_and_extension(phase):
    airy = asym.AiryParametrix(phase)
    # points of gamma inside the disk map to the negative real axis
    pts = phase.gamma.points_complex()
    sel = np.abs(pts - complex(phase.qd.z2)) < 0.4
    for z in pts[sel][:: max(1, sel.sum() // 6)]:
        f = airy.conformal_f(complex(z))
        assert abs(f.imag) <= 1e-6
        if abs(z - complex(phase.qd.z2)) > 1e-3:
            assert f.real < 0
    # points of the outgoing extension map to the positive real axis
    pts2 = phase.gamma2.points_complex()
    sel2 = np.abs(pts2 - complex(phase.qd.z2)) < 0.4
    for z in pts2[sel2][:: max(1, sel2.sum() // 6)]:
        f = airy.conformal_f(complex(z))
        assert abs(f.imag) <= 1e-6
        if abs(z - complex(phase.qd.z2)) > 1e-3:
            assert f.real > 0


def test_conformal_map_winding(phase):
    airy = asym.AiryParametrix(phase)
    assert airy.boundary_winding() == 1


def test_outside_disk_raises(phase):
    airy = asym.AiryParametrix(phase)
    with pytest.raises(OutsideDiskError):
        airy.conformal_f(complex(phase.qd.z2) + 0.7)


def test_region_classification(phase):
    assert asym.region_classify(3 + 4j, phase) == "outer"
    assert asym.region_classify(complex(phase.qd.z2) + 0.1, phase) == "disk2"
    assert asym.region_classify(complex(phase.qd.z1) + 0.1j, phase) == "disk1"
    mid = complex(scurve.curve_points_at_mass(
        phase.gamma, 0.5 * phase.gamma.total_mass)[0])
    assert asym.region_classify(mid + 0.05j, phase) == "band"
    with pytest.raises(RegionError):
        asym.pn_band(20, 3 + 4j, phase)


def test_outer_formula_accuracy(phase):
    _, err = asym.pn_relative_error(20, 3 + 4j, phase)
    assert err <= 5e-3


def test_band_formula_accuracy_on_and_off_curve(phase):
    z = complex(scurve.curve_points_at_mass(
        phase.gamma, 0.5 * phase.gamma.total_mass)[0])
    q = scurve.q_sqrt_chord(z)
    nrm = q.conjugate() / abs(q)
    for probe in (z, z + 0.1 * nrm, z - 0.1 * nrm):
        region, err = asym.pn_relative_error(20, probe, phase)
        assert region == "band"
        assert err <= 2e-2


def test_airy_formula_accuracy_both_disks(phase):
    for center, angles in ((complex(phase.qd.z2), (0.41, 2.0)),
                           (complex(phase.qd.z1), (2.73, 1.1))):
        for th in angles:
            probe = center + 0.25 * np.exp(1j * th)
            region, err = asym.pn_relative_error(20, probe, phase)
            assert region in ("disk1", "disk2")
            assert err <= 5e-3


def test_disk1_reflection_consistency(phase):
    # the P_n symmetry P_n(z) = (-1)^n conj(P_n(-conj(z))) carries disk2 to disk1
    z = complex(phase.qd.z1) + 0.2 * np.exp(2.5j)
    a = asym.pn_airy(21, z, phase)
    b = (-1) ** 21 * np.conj(asym.pn_airy(21, -np.conj(z), phase))
    assert abs(a - b) <= 1e-12 * abs(a)


def test_exact_pn_dual_route(ctx30):
    # recurrence evaluation vs explicit monic coefficients, n = 5
    n = 5
    mom = opq.moment_sequence(opq.WeightSpec(r=3), 2 * n, PrecisionContext(40))
    rec = opq.build_recurrence(mom, n)
    coeffs = opq.monic_coefficients(rec)
    lam = opq.lambda_n(n, 3, PrecisionContext(40))
    for z in (0.3 + 0.8j, -1.1 + 0.4j):
        direct = asym.exact_pn(n, z, PrecisionContext(40))
        with PrecisionContext(40).working():
            zz = lam * mp.mpmathify(z)
            horner = mp.mpc(1)
            for c in reversed(coeffs):
                horner = horner * zz + c
            horner = horner / lam ** n
            dev = abs(mp.mpc(direct) - horner) / abs(horner)
        assert float(dev) <= 1e-25


def test_zero_distribution_report_frozen(phase):
    rep = asym.zero_distribution_report(10, phase)
    assert rep["n"] == 10 and len(rep["zeros"]) == 10
    assert abs(rep["max_distance"] - 0.010354677748) <= 1e-6
    assert abs(rep["ks_statistic"] - 0.0653) <= 5e-4
    assert rep["reflection_mismatch"] <= 1e-10


def test_airy_model_matrix_unimodular():
    for zeta in (0.3 + 0.2j, 2.0 - 1.0j, -0.5 + 0.9j):
        det = np.linalg.det(asym.airy_model_matrix(zeta))
        assert abs(det - 1.0) <= 1e-10


def test_airy_model_matching_residual():
    bound = 5.0 * 8.0 ** (-1.5)
    assert asym.airy_model_residual(radius=8.0) <= bound


def test_airy_connection_identity(ctx30):
    for zeta in (0.7 + 0.3j, -1.2 + 2.0j):
        assert float(asym.airy_connection_residual(zeta, ctx30)) <= 1e-12
