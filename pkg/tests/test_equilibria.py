import numpy as np
import pytest

from pursuit_lab import (ControlParams, alpha_star, classify_degenerate,
                         constraint_residuals, enumerate_equilibria,
                         equilibrium_shape, extract_shape, shape_derivative)
from pursuit_lab.equilibria import (BranchAssignment, DegenerateClass,
                                    common_curvature, embed_world,
                                    format_equilibrium_report)
from pursuit_lab.errors import (DegenerateAlphaSumError,
                                DegenerateBranchError, EnumerationSizeError)
from pursuit_lab.numerics import wrap_angle

from conftest import reference_equilibrium


class TestAlphaStar:
    def test_leftmost_branch_formula(self, reference_params):
        # all sigma = +1 reduces to m*pi/n - mean(alpha)
        branch = BranchAssignment(sigma=(1, 1, 1), m=1)
        assert abs(alpha_star(branch, reference_params) - np.pi / 6) < 1e-12

    def test_two_agents(self):
        params = ControlParams.homogeneous(2, mu=1.0, lam=0.5,
                                           alpha=np.pi / 4, alpha0=0.3)
        value = alpha_star(BranchAssignment(sigma=(1, 1), m=1), params)
        assert abs(value - np.pi / 4) < 1e-12

    def test_degenerate_branch_rejected(self):
        params = ControlParams.homogeneous(2, mu=1.0, lam=0.5, alpha=0.2,
                                           alpha0=0.3)
        with pytest.raises(DegenerateBranchError):
            alpha_star(BranchAssignment(sigma=(1, -1), m=0), params)


class TestEnumerate:
    def test_reference_equilibrium_values(self, reference_params):
        eq = reference_equilibrium(reference_params)
        assert np.max(np.abs(eq.kappa - np.pi / 3)) < 1e-9
        assert eq.kappa_b == np.pi / 2
        assert abs(eq.rho_b - 0.82843) < 1e-4
        assert np.max(np.abs(eq.rho - 1.43488)) < 1e-4

    def test_no_equilibria_when_radius_condition_fails(self):
        # lambda*cos(alpha0) dominates and is negative for every branch
        params = ControlParams.homogeneous(3, mu=1.0, lam=0.9,
                                           alpha=np.pi / 6, alpha0=np.pi)
        assert enumerate_equilibria(params, direction=1) == []
        assert enumerate_equilibria(params, direction=-1) == []

    def test_winding_identity_and_margins(self, reference_params):
        for direction in (1, -1):
            for eq in enumerate_equilibria(reference_params, direction):
                total = np.sum(eq.kappa) - eq.branch.m * np.pi
                assert abs(wrap_angle(total)) < 1e-9
                assert np.all(eq.margins > 0)
                assert np.all(eq.rho > 0) and eq.rho_b > 0

    def test_fixed_points_and_equidistance(self, reference_params):
        for direction in (1, -1):
            for eq in enumerate_equilibria(reference_params, direction):
                shape = equilibrium_shape(eq, reference_params)
                assert shape_derivative(shape, reference_params).max_abs() \
                    < 1e-9
                assert constraint_residuals(shape).max_abs() < 1e-9
                assert np.max(np.abs(shape.rho_b - eq.rho_b)) == 0.0

    def test_common_curvature_identity(self, reference_params):
        eq = reference_equilibrium(reference_params)
        gamma = common_curvature(eq)
        assert np.max(np.abs(gamma - gamma[0])) < 1e-12
        assert abs(gamma[0] - eq.direction * 1.0 / eq.rho_b) < 1e-12

    def test_radius_scales_inversely_with_gain(self):
        radii = []
        for mu in (0.5, 1.0, 2.0):
            params = ControlParams.homogeneous(3, mu=mu, lam=0.5,
                                               alpha=np.pi / 6,
                                               alpha0=np.pi / 4)
            eq = reference_equilibrium(params)
            radii.append(eq.rho_b)
        assert abs(radii[0] - 2.0 * radii[1]) < 1e-12
        assert abs(radii[2] - 0.5 * radii[1]) < 1e-12

    def test_heterogeneous_alpha_supported(self):
        params = ControlParams.homogeneous(
            3, mu=1.0, lam=0.5, alpha=[np.pi / 6, np.pi / 7, np.pi / 8],
            alpha0=np.pi / 4)
        found = enumerate_equilibria(params, direction=1)
        assert found
        for eq in found:
            shape = equilibrium_shape(eq, params)
            assert shape_derivative(shape, params).max_abs() < 1e-9

    def test_direction_mirror(self, reference_params):
        ccw = enumerate_equilibria(reference_params, direction=1)
        cw = enumerate_equilibria(reference_params, direction=-1)
        assert len(ccw) == len(cw)
        key = lambda eq: (round(eq.rho_b, 10), tuple(np.round(
            np.sort(eq.rho), 10)))
        assert sorted(map(key, ccw)) == sorted(map(key, cw))
        assert all(eq.kappa_b == -np.pi / 2 for eq in cw)

    def test_alpha_sum_gate(self):
        params = ControlParams.homogeneous(3, mu=1.0, lam=0.5,
                                           alpha=np.pi / 3, alpha0=0.4)
        with pytest.raises(DegenerateAlphaSumError):
            enumerate_equilibria(params, direction=1)

    def test_enumeration_cap(self):
        params = ControlParams.homogeneous(17, mu=1.0, lam=0.5, alpha=0.1,
                                           alpha0=0.2)
        with pytest.raises(EnumerationSizeError):
            enumerate_equilibria(params, direction=1)


class TestEmbedding:
    def test_roundtrip(self, reference_params):
        for direction in (1, -1):
            for eq in enumerate_equilibria(reference_params, direction):
                world = embed_world(eq, beacon=(0.5, -0.25), base_angle=0.3)
                shape = extract_shape(world)
                target = equilibrium_shape(eq, reference_params)
                assert np.max(np.abs(shape.rho - target.rho)) < 1e-9
                assert np.max(np.abs(shape.rho_b - target.rho_b)) < 1e-9
                for f in ("kappa", "theta", "kappa_b"):
                    assert np.max(np.abs(wrap_angle(
                        getattr(shape, f) - getattr(target, f)))) < 1e-9


class TestDegenerate:
    def test_continuum(self):
        params = ControlParams.homogeneous(2, mu=1.0, lam=0.5,
                                           alpha=[np.pi / 3, 2 * np.pi / 3],
                                           alpha0=0.4)
        assert classify_degenerate(params) is DegenerateClass.CONTINUUM

    def test_no_branch_equilibria(self):
        params = ControlParams.homogeneous(2, mu=1.0, lam=0.5,
                                           alpha=[np.pi / 4, np.pi / 4],
                                           alpha0=0.4)
        assert classify_degenerate(params) \
            is DegenerateClass.NO_BRANCH_EQUILIBRIA

    def test_odd_n_not_applicable(self, reference_params):
        assert classify_degenerate(reference_params) \
            is DegenerateClass.NOT_APPLICABLE


def test_report_contains_records(reference_params):
    found = enumerate_equilibria(reference_params, direction=1)
    text = format_equilibrium_report(found, reference_params,
                                     direction_label="counter-clockwise")
    assert "sigma" in text and "rho_b" in text
    assert "0.828427" in text
