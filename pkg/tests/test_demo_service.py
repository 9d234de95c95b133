import pytest

from config import DemoConfig
from services import DemoService
from utils import InvalidConfig


class TestNaiveSignaling:

    def test_alice_follows_bob(self):
        outcome = DemoService.run("naive-signaling", rounds=3000, seed=5)
        metrics = outcome.metrics
        assert metrics["Alice input = Bob outcome on y=1 rounds"] == 1.0
        assert metrics["forced rate (Alice)"] == pytest.approx(0.5, abs=0.05)
        assert metrics["MI(Bob outcome; Alice input | y=1) [bits]"] == pytest.approx(1.0,
                                                                                     abs=0.05)
        assert all(log.ordering == (1, 0) for log in outcome.logs)

    def test_render(self):
        text = DemoService.render(DemoService.run("naive-signaling", rounds=400))
        assert text.startswith("== naive-signaling ==")
        assert "-- stored assignment (every round)" in text
        assert "Alice input = Bob outcome on y=1 rounds: 1" in text


class TestUpgradedFix:

    def test_no_violations(self):
        outcome = DemoService.run("upgraded-fix", rounds=3000, seed=5)
        assert outcome.metrics["violation rate"] == 0.0
        assert outcome.metrics["CHSH estimate"] == pytest.approx(4.0)
        assert len(outcome.tables["upgraded table"]) == 5
        assert not any(log.any_forced for log in outcome.logs)

    def test_render_lists_the_tests(self):
        text = DemoService.render(DemoService.run("upgraded-fix", rounds=2000))
        assert "-- upgraded table" in text and "-- stored in round 0" in text
        assert "chi2 inputs vs lambda" in text
        assert "t_B < t_A" in text


class TestEdges:

    def test_zero_rounds(self):
        text = DemoService.render(DemoService.run("upgraded-fix", rounds=0))
        assert "rounds: 0, completed: 0" in text
        assert "insufficient data" in text

    def test_unknown_demo(self):
        with pytest.raises(InvalidConfig):
            DemoService.run("teleport")

    def test_demo_config_checks(self):
        with pytest.raises(ValueError):
            DemoConfig(bob_time=2.0, alice_time=1.0)
        with pytest.raises(ValueError):
            DemoConfig(rounds=-1)
