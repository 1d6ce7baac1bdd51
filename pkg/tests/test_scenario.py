import math
import textwrap

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anetf.errors import ScenarioError
from anetf.scenario import (
    dumps,
    fixture_names,
    load_scenario,
    loads,
    make_scenario,
    parse_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from anetf.signal_model import FirPath

MINIMAL = textwrap.dedent(
    """\
    dimensions: {actuators: 1, sensors: 1, tones: 1}
    tones: [0.25]
    noise: {amplitude: [[1.0]]}
    paths: {true: [[[1.0, 0.2]]]}
    equalizer: {beta: [[0.5]], mu: 0.01}
    """
)


def minimal_dict(**over):
    d = {
        "dimensions": {"actuators": 1, "sensors": 2, "tones": 2},
        "tones": [0.1, 0.2],
        "noise": {"amplitude": [[1.0, 1.0], [1.0, 1.0]]},
        "paths": {"true": [[[1.0], [1.0]]]},
        "equalizer": {"beta": [[0.5, 0.5], [0.5, 0.5]], "mu": [0.01, 0.01]},
    }
    d.update(over)
    return d


def problems_of(data):
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(data)
    return info.value.problems


class TestParse:
    def test_minimal_defaults(self, tmp_path):
        p = tmp_path / "s.yaml"
        p.write_text(MINIMAL)
        sc = parse_scenario(p)
        assert (sc.n_actuators, sc.n_sensors, sc.n_tones) == (1, 1, 1)
        assert sc.gamma.tolist() == [[0.0]]
        assert sc.primary == (FirPath((1.0,)),)
        assert sc.paths.perfect_estimates and sc.paths.estimated == sc.paths.true
        assert sc.reference.amplitudes == (1.0,) and sc.reference.phases == (0.0,)
        assert sc.strategy == "common"

    def test_beta_one_itemized(self):
        eq = {"beta": [[0.5, 0.5], [1.0, 0.5]], "mu": 0.01}
        probs = problems_of(minimal_dict(equalizer=eq))
        assert "equalizer.beta[1][0] = 1.0 violates beta != 1" in probs

    def test_missing_noise_row(self):
        probs = problems_of(minimal_dict(noise={"amplitude": [[1.0, 1.0]]}))
        assert any("noise.amplitude has 1 rows, expected 2" in p for p in probs)

    def test_all_violations_reported_at_once(self):
        data = minimal_dict(
            tones=[0.1, 0.6],
            equalizer={"beta": [[1.0, 0.5], [0.5, 0.5]], "gamma": [[2.0], [0.0]], "mu": [-1.0, 0.01]},
        )
        probs = problems_of(data)
        joined = "\n".join(probs)
        for fragment in ("tones[1]", "beta[0][0]", "gamma[0][0]", "mu[0]"):
            assert fragment in joined
        assert len(probs) >= 4

    def test_syntax_error_line_and_column(self):
        with pytest.raises(ScenarioError, match=r"line 2, column \d+"):
            loads("dimensions: {actuators: 1\ntones: [0.25]]\n")

    @pytest.mark.parametrize(
        "override, fragment",
        [
            ({"tones": [0.2, 0.2]}, "pairwise distinct"),
            ({"tones": [0.0, 0.2]}, "outside (0, 0.5)"),
            ({"paths": {"true": [[[0.0], [1.0]]]}}, "all zero"),
            ({"paths": {"true": [[[1.0], [1.0]]], "perfect_estimates": False}}, "paths.estimated is required"),
            ({"primary_paths": [[1.0]]}, "primary_paths must list 2"),
            ({"bogus": 1}, "unknown section"),
            ({"reference": {"amplitude": [1.0, 0.0]}}, "reference.amplitude[1]"),
        ],
    )
    def test_semantic_errors(self, override, fragment):
        assert any(fragment in p for p in problems_of(minimal_dict(**override)))

    def test_phases_wrapped(self):
        sc = scenario_from_dict(minimal_dict(noise={"amplitude": [[1, 1], [1, 1]], "phase": [[4.0, -4.0], [0, 7.0]]}))
        for row in sc.noise.phases:
            assert all(-math.pi < p <= math.pi for p in row)

    def test_gain_table_path(self):
        data = minimal_dict(paths={"true": [[{"gains": [[1.0, 0.1], [2.0, 0.2]]}, "identity"]]})
        sc = scenario_from_dict(data)
        assert sc.paths.true[0][1] == FirPath((1.0,))


class TestRoundTrip:
    @pytest.mark.parametrize("name", fixture_names())
    def test_fixture_round_trip(self, name):
        sc = load_scenario(name)
        again = loads(dumps(sc))
        assert again == sc
        assert dumps(again) == dumps(sc)

    @given(
        L=st.integers(1, 3), K=st.integers(1, 3), J=st.integers(1, 3),
        seed=st.integers(0, 2**32 - 1), strategy=st.sampled_from(["common", "multiple"]),
        perfect=st.booleans(),
    )
    def test_random_round_trip(self, L, K, J, seed, strategy, perfect):
        rng = np.random.default_rng(seed)
        tones = np.sort(rng.choice(np.arange(1, 50), L, replace=False) / 100.0)
        beta = rng.uniform(-2, 0.9, (L, K))
        paths = [[rng.uniform(-1, 1, rng.integers(1, 5)) for _ in range(K)] for _ in range(J)]
        est = None if perfect else [[rng.uniform(-1, 1, 3) for _ in range(K)] for _ in range(J)]
        sc = make_scenario(
            tones, beta, rng.uniform(0, 0.05, L), paths_true=paths, paths_est=est,
            noise_amplitude=rng.uniform(0, 2, (K, L)), noise_phase=rng.uniform(-7, 7, (K, L)),
            gamma=rng.uniform(0, 1, (L, J)), strategy=strategy,
            ref_amplitude=rng.uniform(0.5, 2, L), ref_phase=rng.uniform(-3, 3, L),
        )
        again = loads(dumps(sc))
        assert again == sc
        assert scenario_to_dict(again) == scenario_to_dict(sc)


class TestFixtures:
    def test_fig2_parameters(self):
        sc = load_scenario("fig2")
        assert sc.tones == (0.125,) and sc.beta[0, 0] == 0.5 and sc.gamma[0, 0] == 0.0
        assert sc.paths.perfect_estimates and sc.paths.true[0][0] == FirPath((1.0,))

    @pytest.mark.parametrize("name, beta", [("fig3_beta0", 0.0), ("fig3_beta05", 0.5), ("fig3_beta15", 1.5)])
    def test_fig3_family(self, name, beta):
        sc = load_scenario(name)
        assert sc.tones == (0.25,) and sc.beta.tolist() == [[beta]]
        assert sc.paths.perfect_estimates
        assert all(len(p.coeffs) == 4 for row in sc.paths.true for p in row)

    def test_fig4(self):
        sc = load_scenario("fig4")
        assert (sc.n_actuators, sc.n_sensors, sc.tones) == (4, 4, (0.1,))
        assert sc.beta.tolist() == [[1.3, 0.8, 0.0, 0.2]]
        assert sc.paths.perfect_estimates

    def test_fig5(self, fig5):
        assert (fig5.n_actuators, fig5.n_sensors, fig5.n_tones) == (2, 2, 5)
        np.testing.assert_allclose(fig5.tones, [0.05, 0.15, 0.25, 0.35, 0.45])
        assert fig5.beta[:, 0].tolist() == [0.1, 0.3, 0.5, 0.7, 0.9]
        assert fig5.beta[:, 1].tolist() == [0.9, 0.7, 0.5, 0.3, 0.1]
        assert fig5.paths.perfect_estimates
        assert all(len(p.coeffs) == 4 for row in fig5.paths.true for p in row)

    def test_unknown_fixture(self):
        with pytest.raises(FileNotFoundError, match="fixtures"):
            load_scenario("no_such_fixture")


class TestScenarioHelpers:
    def test_with_mu_broadcasts(self, fig5):
        assert fig5.with_mu(0.0).mu.tolist() == [0.0] * 5

    def test_with_strategy(self, fig5):
        assert fig5.with_strategy("multiple").strategy == "multiple"
        assert fig5.with_strategy(None) is fig5
        with pytest.raises(ValueError):
            fig5.with_strategy("other")
