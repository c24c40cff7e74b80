import math

import numpy as np
import pytest

from banach.exceptions import MalformedObjectiveError, UnsupportedComputationError
from banach.optimize import (
    BOUND_EXACT,
    LOWER_BOUND,
    NESTED_RESTARTS,
    ConvexObjective,
    OptConfig,
    brute_force_sup,
    discretization_band,
    map_ordered,
    maximize_over_ball,
    maximize_over_seq_ball,
    oracle_upper,
    sphere_grid,
    _ball_starts,
)
from banach.seqnorm import ClassId, pairing_objective
from banach.space import INF, Space

G = np.array([1.0, 2.0])


def linear_abs(g):
    return ConvexObjective(
        func=lambda v: abs(float(v @ g)),
        subgradient=lambda v: np.sign(float(v @ g)) * g,
        batch=lambda vs: np.abs(vs @ g),
    )


def test_config_validation():
    with pytest.raises(ValueError):
        OptConfig(tol=0)
    with pytest.raises(ValueError):
        OptConfig(method="newton")
    with pytest.raises(ValueError):
        OptConfig(workers=0)


def test_config_from_settings():
    cfg = OptConfig.from_settings({"SEED": 5, "GRID": 100, "UNRELATED": 1}, seed=None, restarts=9)
    assert (cfg.seed, cfg.grid_resolution, cfg.restarts) == (5, 100, 9)
    assert OptConfig.from_settings({"SEED": 5}, seed=7).seed == 7


def test_nested_config_resets_method():
    cfg = OptConfig(method="ascent")
    assert cfg.nested().method == "auto"
    assert cfg.nested().restarts == NESTED_RESTARTS
    auto = OptConfig(restarts=NESTED_RESTARTS)
    assert auto.nested() is auto
    assert OptConfig(restarts=1).nested().restarts == 1


def test_smooth_ball_ascent_is_seeded_from_the_grid():
    objective = linear_abs(G)
    starts = _ball_starts(Space.pnorm(2, 2), OptConfig(restarts=3), include_vertices=True, objective=objective)
    assert len(starts) == 3
    assert objective(starts[0]) == pytest.approx(math.sqrt(5.0), rel=0.05)
    assert not any(np.allclose(starts[0], -s) for s in starts[1:])


def test_vertex_enumeration_is_exact():
    cert = maximize_over_ball(linear_abs(G), Space.pnorm(2, 1))
    assert cert.value == pytest.approx(2.0)
    assert cert.bound == BOUND_EXACT


def test_ascent_reaches_dual_norm():
    cert = maximize_over_ball(linear_abs(G), Space.pnorm(2, 2))
    assert cert.value == pytest.approx(math.sqrt(5.0), rel=1e-9)
    assert cert.bound == LOWER_BOUND
    assert cert.method == "ascent"


def test_forced_ascent_on_vertex_space():
    cert = maximize_over_ball(linear_abs(G), Space.pnorm(2, INF), OptConfig(method="ascent"))
    assert cert.value == pytest.approx(3.0, rel=1e-9)


def test_exact_method_without_exact_path():
    with pytest.raises(UnsupportedComputationError):
        maximize_over_ball(linear_abs(G), Space.pnorm(2, 2), OptConfig(method="exact"))


def test_objective_without_subgradient_uses_finite_differences():
    objective = ConvexObjective(func=lambda v: float(np.linalg.norm(v * np.array([2.0, 1.0]))))
    cert = maximize_over_ball(objective, Space.pnorm(2, 2))
    assert cert.value == pytest.approx(2.0, rel=1e-4)


def test_non_finite_objective():
    with pytest.raises(MalformedObjectiveError):
        maximize_over_ball(lambda v: float("nan"), Space.pnorm(2, 1))


def test_bruteforce_method_reports_band():
    cert = maximize_over_ball(linear_abs(G), Space.pnorm(2, 2), OptConfig(method="bruteforce"))
    assert cert.method == "brute-force"
    assert cert.value <= math.sqrt(5.0) + 1e-12
    assert math.sqrt(5.0) <= oracle_upper(cert.value, cert.details["band"]) + 1e-12


def test_brute_force_sup_bracket():
    space = Space.pnorm(2, 2)
    brute = brute_force_sup(linear_abs(G), space, 360)
    band = discretization_band(space, 360)
    assert brute <= math.sqrt(5.0) + 1e-12
    assert math.sqrt(5.0) <= oracle_upper(brute, band)


def test_oracle_upper():
    assert oracle_upper(1.0, 0.1) == pytest.approx(1.1 / 0.9)
    assert oracle_upper(1.0, 1.0) == math.inf


def test_band_vanishes_in_dimension_one():
    assert discretization_band(Space.pnorm(1, 2), 10) == 0.0


def test_sphere_grid_points_on_sphere():
    space = Space.pnorm(3, 1)
    points = sphere_grid(space, 20)
    assert np.allclose(space.norms(points), 1.0)


def test_sphere_grid_dimension_cap():
    with pytest.raises(UnsupportedComputationError):
        sphere_grid(Space.pnorm(4, 2), 10)


def test_map_ordered_keeps_order():
    assert map_ordered(lambda x: x * x, list(range(10)), workers=3) == [x * x for x in range(10)]


def test_seq_ball_vertex_enumeration():
    X = np.array([[1.0, 2.0], [3.0, -1.0]])
    cert = maximize_over_seq_ball(pairing_objective(X), ClassId.lp(1), Space.pnorm(2, 1), 2)
    assert cert.value == pytest.approx(3.0)
    assert cert.bound == BOUND_EXACT


def test_seq_ball_linear_oracle_ascent():
    X = np.array([[1.0, 2.0], [2.0, -2.0]])
    cert = maximize_over_seq_ball(pairing_objective(X), ClassId.lp(2), Space.pnorm(2, 2), 2)
    # sup of sum_j |<z_j, x_j>| over the lp:2 ball is the lp:2 norm of the row norms
    assert cert.value == pytest.approx(float(np.linalg.norm(X)), rel=1e-9)
