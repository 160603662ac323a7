import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccpj.chain import straight_chain, with_joints
from ccpj.geometry import BeadSpec, ContactMode, manifold_disp
from ccpj.metrics import hysteresis_energies
from ccpj.solver import (
    Indenter,
    NonConvergence,
    SolverConfig,
    axial_protocol,
    bead_loads,
    bending_protocol,
    equilibrate,
    generalized_forces,
    pretension,
)
from ccpj.string_model import NYLON_OGDEN, LinearSpring, OgdenUniaxial, route_tendon

from oracle import minimise


def loading_work(curve):
    x, f = np.array(curve.loading).T
    return float(np.trapezoid(f, x))


def jammed(theta_deg, mu, n=10, T=50.0, model=None):
    spec = BeadSpec(cone_angle=math.radians(theta_deg), friction=mu)
    return pretension(straight_chain(spec, n), model or OgdenUniaxial(), T)


# -- equilibrium ---------------------------------------------------------------


def test_straight_chain_without_gravity_is_a_fixed_point():
    chain = straight_chain(BeadSpec(), 6, gravity=0.0)
    ch, _, tendon = pretension(chain, OgdenUniaxial(), 50.0)
    eq = equilibrate(ch, tendon)
    assert eq.converged and eq.iterations == 0 and eq.residual == 0.0
    assert np.array_equal(eq.chain.phi, ch.phi) and np.array_equal(eq.chain.disp, ch.disp)
    assert all(m is ContactMode.SURFACE for m in eq.chain.modes)


def _balanced_one_point(mu):
    """Two 80 deg beads, joint 1 half way below the two-point limit, loaded so it has no net moment."""
    spec = BeadSpec(cone_angle=math.radians(80.0), friction=mu)
    ch, _, tendon = pretension(straight_chain(spec, 2), LinearSpring(2000.0), 20.0)
    state = with_joints(ch, [0.05, 0.0], [0.5 * manifold_disp(spec, 0.05), 0.0])
    ind = Indenter()
    fr = generalized_forces(state, bead_loads(state, route_tendon(state, tendon)), ind.location(state), ind.bead_index(state))
    F = -fr.q_phi[0] / fr.g_phi[0]
    Qd = fr.q_disp[0] + F * fr.g_disp[0]
    N = fr.normal[0] + F * fr.g_normal[0]
    return state, tendon, F, Qd, N


def test_one_point_stick_inside_friction_cone():
    state, tendon, F, Qd, N = _balanced_one_point(1.0)
    assert state.modes[0] is ContactMode.ONE_POINT
    assert 0.0 < Qd < 1.0 * N
    eq = equilibrate(state, tendon, force=F)
    assert eq.converged
    assert np.array_equal(eq.chain.phi, state.phi)
    assert np.array_equal(eq.chain.disp, state.disp)
    assert eq.dissipation == 0.0


ORACLE_LEVELS = [(0.04, 3e-4), (0.006, 4.5e-5), (9e-4, 7e-6)]


def test_two_bead_frictionless_matches_energy_oracle():
    spec = BeadSpec(friction=0.0)
    ch, _, tendon = pretension(straight_chain(spec, 2), LinearSpring(2000.0), 20.0)
    eq = equilibrate(ch, tendon, force=10.0)
    assert eq.converged
    phi, gap, _ = minimise(ch, tendon, Indenter(), 10.0, ORACLE_LEVELS, phi0=0.28, phi_half=7)
    disp = [manifold_disp(spec, p) - g for p, g in zip(phi, gap)]
    assert eq.chain.phi[0] > 0.1
    assert np.allclose(eq.chain.phi, phi, atol=1e-3)
    assert np.allclose(eq.chain.disp, disp, atol=2e-6)


@settings(max_examples=25)
@given(F=st.floats(0.0, 12.0), mu=st.sampled_from([0.0, 0.1, 0.5]))
def test_equilibria_respect_constraints(F, mu):
    spec = BeadSpec(friction=mu)
    ch, _, tendon = pretension(straight_chain(spec, 2), LinearSpring(2000.0), 20.0)
    eq = equilibrate(ch, tendon, force=F)
    assert eq.converged
    assert np.all(eq.chain.phi >= 0.0)
    # accumulated rotation never decreases towards the free end
    assert np.all(np.diff(np.cumsum(eq.chain.phi)) >= 0.0)
    for p, d in zip(eq.chain.phi, eq.chain.disp):
        assert d <= manifold_disp(spec, p) + 1e-12


def test_nonconvergence_carries_the_state():
    spec = BeadSpec(friction=0.0)
    ch, _, tendon = pretension(straight_chain(spec, 2), LinearSpring(2000.0), 20.0)
    cfg = SolverConfig(max_iters=3)
    eq = equilibrate(ch, tendon, cfg, force=10.0)
    assert not eq.converged and eq.iterations == 3
    with pytest.raises(NonConvergence) as info:
        equilibrate(ch, tendon, cfg, force=10.0, raise_on_failure=True)
    assert info.value.state.chain.n_beads == 2
    assert info.value.residual > 1.0


def test_bending_nonconvergence_reports_step():
    ch, _, tendon = jammed(40.0, 0.1, n=4)
    with pytest.raises(NonConvergence) as info:
        bending_protocol(ch, tendon, depth_max=5e-3, config=SolverConfig(max_iters=2))
    assert info.value.step is not None
    assert info.value.state.converged is False


@pytest.mark.parametrize(
    "kwargs",
    [dict(rotation_gain=0.0), dict(fine_scale=1.0), dict(force_tol=-1.0), dict(max_iters=0)],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


# -- pretension ----------------------------------------------------------------


def _straight_path(n, model, T):
    chain = straight_chain(BeadSpec(), n)
    _, _, tendon = pretension(chain, model, T)
    return route_tendon(chain, tendon), tendon


def test_zero_pretension_means_zero_stretch():
    path, tendon = _straight_path(5, OgdenUniaxial(), 0.0)
    assert path.length == pytest.approx(tendon.rest_length, abs=1e-12)
    assert path.tension == 0.0


def test_linear_pretension_stretch():
    k = 2500.0
    path, tendon = _straight_path(5, LinearSpring(k), 50.0)
    assert path.length - tendon.rest_length == pytest.approx(50.0 / k, rel=1e-9)
    assert path.tension == pytest.approx(50.0, rel=1e-9)


def _ogden_tension(stretch, rest, diameter):
    mpmath.mp.dps = 40
    lam = (mpmath.mpf(rest) + stretch) / rest
    P = sum(
        2 * mpmath.mpf(m) / a * (lam ** (mpmath.mpf(a) - 1) - lam ** (-mpmath.mpf(a) / 2 - 1))
        for m, a in zip(NYLON_OGDEN.mu, NYLON_OGDEN.alpha)
    )
    return P * mpmath.pi * mpmath.mpf(diameter) ** 2 / 4


def test_ogden_pretension_against_bisection():
    model = OgdenUniaxial()
    path, tendon = _straight_path(5, model, 50.0)
    rest = tendon.rest_length
    lo, hi = mpmath.mpf(0), mpmath.mpf(rest)
    for _ in range(200):
        mid = (lo + hi) / 2
        if _ogden_tension(mid, rest, model.diameter) < 50:
            lo = mid
        else:
            hi = mid
    assert path.length - rest == pytest.approx(float(lo), rel=1e-6)
    assert abs(path.tension - 50.0) < 0.1


def test_negative_pretension_rejected():
    with pytest.raises(ValueError):
        pretension(straight_chain(BeadSpec(), 3), OgdenUniaxial(), -1.0)


# -- bending -------------------------------------------------------------------


def test_zero_depth_gives_single_point():
    ch, _, tendon = jammed(40.0, 0.1, n=4)
    curve = bending_protocol(ch, tendon, depth_max=0.0)
    assert curve.loading == [(0.0, 0.0)] and curve.unloading == [(0.0, 0.0)]


@pytest.fixture(scope="module")
def curve_40():
    ch, _, tendon = jammed(40.0, 0.15)
    return bending_protocol(ch, tendon, depth_max=20e-3)


def test_branches_share_turning_point_and_are_monotone(curve_40):
    xl = [x for x, _ in curve_40.loading]
    xu = [x for x, _ in curve_40.unloading]
    assert np.all(np.diff(xl) > 0) and np.all(np.diff(xu) < 0)
    assert curve_40.loading[-1] == curve_40.unloading[0]
    assert curve_40.unloading[-1] == (0.0, 0.0)


@pytest.mark.parametrize("theta", [40.0, 60.0])
def test_frictionless_cycle_has_no_hysteresis(theta):
    ch, _, tendon = jammed(theta, 0.0)
    curve = bending_protocol(ch, tendon, depth_max=20e-3)
    W_D, _ = hysteresis_energies(curve)
    assert 0.0 <= W_D < 0.01 * loading_work(curve)


@pytest.mark.parametrize("theta", [40.0, 60.0])
def test_energy_bookkeeping_closes(theta):
    ch, _, tendon = jammed(theta, 0.15)
    curve = bending_protocol(ch, tendon, depth_max=20e-3)
    assert curve.converged
    assert max(r.balance_error for r in curve.records) < 0.02
    assert all(r.dissipation >= 0.0 for r in curve.records)
    # dissipation never decreases
    assert np.all(np.diff([r.dissipation for r in curve.records]) >= 0.0)


def test_hysteresis_area_non_negative(curve_40):
    assert hysteresis_energies(curve_40)[0] >= 0.0


def test_bending_is_deterministic(curve_40):
    ch, _, tendon = jammed(40.0, 0.15)
    again = bending_protocol(ch, tendon, depth_max=20e-3)
    assert again.loading == curve_40.loading and again.unloading == curve_40.unloading
    assert again.events == curve_40.events


def test_event_lines(curve_40):
    assert curve_40.events
    ev = curve_40.events[0]
    assert ev.line() == f"step={ev.step} interface={ev.interface} {ev.old.value}->{ev.new.value}"


def test_force_drive_ramps_in_fixed_increments():
    ch, _, tendon = jammed(40.0, 0.1, n=4)
    cfg = SolverConfig()
    curve = bending_protocol(ch, tendon, depth_max=2e-3, drive="force", config=cfg)
    x = [p[0] for p in curve.loading]
    assert np.all(np.diff(x) > 0) and x[-1] >= 2e-3
    f = [p[1] for p in curve.loading[1:]]
    steps = np.round(np.array(f) / cfg.force_increment, 6)
    assert np.allclose(steps, np.round(steps))


def test_bending_argument_errors():
    ch, _, tendon = jammed(40.0, 0.1, n=3)
    with pytest.raises(ValueError):
        bending_protocol(ch, tendon, depth_max=-1e-3)
    with pytest.raises(ValueError):
        bending_protocol(ch, tendon, depth_max=1e-3, drive="velocity")


# -- axial ---------------------------------------------------------------------


@pytest.fixture(scope="module")
def linear_chain():
    return pretension(straight_chain(BeadSpec(), 5), LinearSpring(3000.0), 30.0)


def test_axial_zero_displacement(linear_chain):
    ch, _, tendon = linear_chain
    curve = axial_protocol(ch, tendon, "tension", depth_max=0.0)
    assert curve.loading == [(0.0, 0.0)]


def test_axial_tension_is_linear(linear_chain):
    ch, _, tendon = linear_chain
    curve = axial_protocol(ch, tendon, "tension", depth_max=1e-3)
    for d, f in curve.loading:
        assert f == pytest.approx(3000.0 * d, rel=1e-9, abs=1e-12)


def test_axial_compression_switches_to_column(linear_chain):
    ch, _, tendon = linear_chain
    k_col = 1e6
    slack = 30.0 / 3000.0
    curve = axial_protocol(ch, tendon, "compression", depth_max=2 * slack, column_stiffness=k_col)
    x, f = np.array(curve.loading).T
    slope = np.diff(f) / np.diff(x)
    before, after = x[1:] <= slack - 1e-9, x[:-1] >= slack + 1e-9
    assert np.allclose(slope[before], 3000.0, rtol=1e-6)
    assert np.allclose(slope[after], k_col, rtol=1e-6)


def test_axial_direction_checked(linear_chain):
    ch, _, tendon = linear_chain
    with pytest.raises(ValueError):
        axial_protocol(ch, tendon, "shear")
