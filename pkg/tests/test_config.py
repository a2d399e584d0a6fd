import math
import unittest

import pytest

from torsionlab.config import (
    ConfigError,
    RunConfig,
    alpha_from_nu,
    max_workers,
    parse_betti,
)
from torsionlab.constants import (
    THREADS_ENV_VAR,
    Command,
    OutputFormat,
    Representation,
    RTorsionVariant,
)


def test_max_workers_default(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
    assert 1 <= max_workers() <= 4


def test_max_workers_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(THREADS_ENV_VAR, "7")
    assert max_workers() == 7


@pytest.mark.parametrize("raw", ["many", "0", "-2"])
def test_max_workers_rejects(monkeypatch: pytest.MonkeyPatch, raw: str) -> None:
    monkeypatch.setenv(THREADS_ENV_VAR, raw)
    with pytest.raises(ConfigError):
        max_workers()


class ParseTest(unittest.TestCase):
    def test_parse_betti(self) -> None:
        self.assertEqual(parse_betti("1,1"), (1, 1))
        self.assertEqual(parse_betti("1, 0, 1"), (1, 0, 1))
        with self.assertRaises(ConfigError):
            parse_betti("1,x")
        with self.assertRaises(ConfigError):
            parse_betti("1,-1")

    def test_alpha_from_nu(self) -> None:
        self.assertAlmostEqual(alpha_from_nu(2.0), math.pi / 6, places=15)
        for nu in (1.0, 0.5):
            with self.assertRaisesRegex(ConfigError, "must be > 1"):
                alpha_from_nu(nu)


class RunConfigTest(unittest.TestCase):
    def test_defaults(self) -> None:
        config = RunConfig(Command.VERIFY, alpha=math.pi / 6)
        self.assertEqual((config.l1, config.l2), (1.0, 2.0))
        self.assertAlmostEqual(config.nu, 2.0, places=14)

    def test_rejects_radii(self) -> None:
        with self.assertRaises(ConfigError):
            RunConfig(Command.VERIFY, l1=2.0, l2=2.0, alpha=0.5)

    def test_rejects_angle(self) -> None:
        with self.assertRaises(ConfigError):
            RunConfig(Command.VERIFY, alpha=math.pi / 2)

    def test_variant_needs_trivial_representation(self) -> None:
        RunConfig(Command.RTORSION, alpha=0.5, variant=RTorsionVariant.REL)
        RunConfig(Command.RTORSION, alpha=0.5, representation=Representation.SIGN)
        with self.assertRaises(ConfigError):
            RunConfig(
                Command.RTORSION,
                alpha=0.5,
                representation=Representation.SIGN,
                variant=RTorsionVariant.PAIR_W2,
            )

    def test_betti_must_match_dimension(self) -> None:
        with self.assertRaises(ConfigError):
            RunConfig(Command.RTORSION, tau_w=0.0, m=2, betti=(1, 1))

    def test_csv_only_for_zeros(self) -> None:
        RunConfig(Command.ZEROS, output_format=OutputFormat.CSV)
        with self.assertRaises(ConfigError):
            RunConfig(Command.VERIFY, alpha=0.5, output_format=OutputFormat.CSV)

    def test_angle_required(self) -> None:
        for command in (Command.ANALYTIC, Command.VERIFY, Command.LIMITS):
            with self.assertRaises(ConfigError):
                RunConfig(command)
        with self.assertRaises(ConfigError):
            RunConfig(Command.RTORSION)
        with self.assertRaises(ConfigError):
            RunConfig(Command.ZEROS).nu

    def test_zero_settings(self) -> None:
        with self.assertRaises(ConfigError):
            RunConfig(Command.ZEROS, zero_count=0)
        with self.assertRaises(ConfigError):
            RunConfig(Command.ZEROS, tol=0.0)
        with self.assertRaises(ConfigError):
            RunConfig(Command.ZEROS, nu_n=-1.0)
