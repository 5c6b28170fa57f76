"""Scenario files: parsing, validation, round-trip, and builders."""

import numpy as np
import pytest

from conftest import scenario_path
from vortexflow import scenario as sc

MINIMAL = b"""
[scenario]
name = minimal
horizon = 1.0
dt = 0.1

[field]
u1 = 0
u2 = 0
sup_norm = 0

[path]
z1 = 0
z2 = 0
lipschitz_bound = 0

[ensemble]
radius = 2.0
spacing = 0.5
"""

SHIPPED = ["pure_kernel.scn", "rotating_path.scn", "uniform_drift.scn",
           "annulus.scn"]


class TestParsing:
    def test_minimal_scenario_with_defaults(self):
        s = sc.parse_scenario(MINIMAL)
        assert s.name == "minimal"
        assert s.levels == sc.DEFAULT_LEVELS
        assert s.reference_level == sc.DEFAULT_REFERENCE
        assert s.output_times == sc.DEFAULT_OUTPUT_TIMES
        assert s.ensemble.center == (0.0, 0.0)
        assert s.path.kind == "expression"

    def test_missing_horizon(self):
        text = MINIMAL.replace(b"horizon = 1.0", b"")
        with pytest.raises(sc.ScenarioSemanticError, match="horizon T required"):
            sc.parse_scenario(text)

    def test_negative_radius_names_invariant(self):
        text = MINIMAL.replace(b"radius = 2.0", b"radius = -2.0")
        with pytest.raises(sc.ScenarioSemanticError,
                           match="ensemble invariant"):
            sc.parse_scenario(text)

    def test_level_at_reference_rejected(self):
        text = MINIMAL + b"\n[levels]\nlevels = 64\nreference = 64\n"
        with pytest.raises(sc.ScenarioSemanticError, match="reference_level"):
            sc.parse_scenario(text)

    def test_syntax_error_reports_line(self):
        bad = b"[scenario]\nname = x\nnot a key value line\n"
        with pytest.raises(sc.ScenarioSyntaxError, match="line 3"):
            sc.parse_scenario(bad)

    def test_key_outside_section(self):
        with pytest.raises(sc.ScenarioSyntaxError, match="outside"):
            sc.parse_scenario(b"name = x\n")

    def test_comments_ignored(self):
        s = sc.parse_scenario(b"# leading comment\n" + MINIMAL)
        assert s.name == "minimal"

    def test_bad_expression_position(self):
        text = MINIMAL.replace(b"u1 = 0", b"u1 = sin(")
        with pytest.raises(sc.ExpressionSyntaxError):
            sc.parse_scenario(text)

    def test_from_vortexwave_requires_section(self):
        text = MINIMAL.replace(
            b"z1 = 0\nz2 = 0\nlipschitz_bound = 0",
            b"kind = from_vortexwave")
        with pytest.raises(sc.ScenarioSemanticError, match="vortexwave"):
            sc.parse_scenario(text)


class TestRoundTrip:
    @pytest.mark.parametrize("name", SHIPPED)
    def test_shipped_scenarios_round_trip(self, name):
        with open(scenario_path(name), "rb") as fh:
            s = sc.parse_scenario(fh.read())
        again = sc.parse_scenario(sc.emit_scenario(s))
        assert again == s
        assert sc.scenario_hash(again) == sc.scenario_hash(s)

    def test_hash_sensitive_to_content(self):
        s = sc.parse_scenario(MINIMAL)
        renamed = sc.parse_scenario(MINIMAL.replace(b"name = minimal",
                                                    b"name = other"))
        assert sc.scenario_hash(s) != sc.scenario_hash(renamed)


class TestBuilders:
    def test_expression_path_matches_closed_form(self):
        with open(scenario_path("rotating_path.scn"), "rb") as fh:
            s = sc.parse_scenario(fh.read())
        path = sc.build_path(s)
        for t in (0.0, 0.25, 1.0):
            np.testing.assert_allclose(
                path.at(t), [0.5 * np.cos(t), 0.5 * np.sin(t)], atol=1e-6)
        assert path.lipschitz_bound == pytest.approx(0.5)

    def test_path_lipschitz_certified_when_omitted(self):
        text = MINIMAL.replace(b"z1 = 0\nz2 = 0\nlipschitz_bound = 0",
                               b"z1 = 2*t\nz2 = 0")
        path = sc.build_path(sc.parse_scenario(text))
        assert path.lipschitz_bound == pytest.approx(2.0, rel=1e-6)

    def test_sampled_path(self):
        text = MINIMAL.replace(
            b"z1 = 0\nz2 = 0\nlipschitz_bound = 0",
            b"kind = samples\nsample = 0, 0, 0\nsample = 1, 1, 0\n")
        path = sc.build_path(sc.parse_scenario(text))
        np.testing.assert_allclose(path.at(0.5), [0.5, 0.0])

    def test_smooth_field_evaluates_expressions(self):
        with open(scenario_path("rotating_path.scn"), "rb") as fh:
            s = sc.parse_scenario(fh.read())
        field = sc.build_smooth_field(s)
        assert field.jit_ok
        out = field.velocity(0.0, np.array([[1.0, 0.0]]))
        np.testing.assert_allclose(out, [[0.0, 0.1 * np.exp(-1.0)]],
                                   atol=1e-12)
        assert field.div_sup_integral == 0.0

    def test_build_ensemble_and_output_times(self):
        s = sc.parse_scenario(MINIMAL)
        ens = sc.build_ensemble(s)
        assert np.all(np.linalg.norm(ens.points, axis=1) < 2.0)
        times = sc.build_output_times(s)
        assert times[0] == 0.0 and times[-1] == pytest.approx(s.horizon)
        assert len(times) == s.output_times

    def test_build_blob_ensemble(self):
        with open(scenario_path("annulus.scn"), "rb") as fh:
            s = sc.parse_scenario(fh.read())
        blobs = sc.build_blob_ensemble(s)
        assert len(blobs.weights) == 4096
        assert blobs.core == pytest.approx(0.0625)
        # Radially symmetric ring: weights peak near |x| = 0.6.
        r = np.linalg.norm(blobs.positions, axis=1)
        peak = r[np.argmax(blobs.weights)]
        assert 0.55 <= peak <= 0.65

    def test_build_blob_ensemble_requires_section(self):
        s = sc.parse_scenario(MINIMAL)
        with pytest.raises(sc.ScenarioSemanticError):
            sc.build_blob_ensemble(s)
