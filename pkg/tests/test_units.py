import numpy as np
import pytest

from becqnd.errors import ConfigError
from becqnd.units import parse_config_text, parse_quantity


def test_plain_number_is_rad_per_s():
    q = parse_quantity("1.5e5")
    assert q.suffix == "" and q.resolve() == 1.5e5


def test_two_pi_suffixes():
    assert parse_quantity("13 2pi*MHz").resolve() == pytest.approx(2 * np.pi * 13e6)
    assert parse_quantity("3.77 2pi*kHz").resolve() == pytest.approx(2 * np.pi * 3770)
    assert parse_quantity("1 2pi*Hz").resolve() == pytest.approx(2 * np.pi)


def test_bare_cyclic_unit_rejected():
    with pytest.raises(ConfigError, match="ambiguous"):
        parse_quantity("13 MHz", key="kappa")
    with pytest.raises(ConfigError, match="ambiguous"):
        parse_quantity("3.77kHz")


def test_glued_relative_suffix():
    q = parse_quantity("0.655kappa")
    assert q.suffix == "kappa"
    assert q.resolve(kappa=100.0) == pytest.approx(65.5)


def test_omega_r_suffix_needs_context():
    q = parse_quantity("3 omega_R")
    assert q.is_relative
    with pytest.raises(ConfigError):
        q.resolve()
    assert q.resolve(omega_R=2.0) == 6.0


def test_length_and_mass_units():
    assert parse_quantity("178 um").resolve() == pytest.approx(178e-6)
    assert parse_quantity("5.3 nm").resolve() == pytest.approx(5.3e-9)
    assert parse_quantity("86.9 u").resolve() == pytest.approx(86.9 * 1.66053906892e-27)


def test_unknown_suffix_rejected():
    with pytest.raises(ConfigError, match="unknown unit"):
        parse_quantity("5 parsec")


def test_config_text_parsing():
    cfg = parse_config_text("""
# comment
kappa = 13 2pi*MHz
gamma = 0.001 kappa   # inline comment
N = 5e4
""")
    assert cfg == {"kappa": "13 2pi*MHz", "gamma": "0.001 kappa", "N": "5e4"}


def test_config_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("a = 1\na = 2\n")


def test_config_malformed_line_rejected():
    with pytest.raises(ConfigError, match="key = value"):
        parse_config_text("this is not a config line\n")
