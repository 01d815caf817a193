from fractions import Fraction

import pytest
from pydantic import ValidationError

from kmeis.config import load_job_config, parse_job_config
from kmeis.errors import ConfigError, InvalidGCM
from kmeis.settings import Settings

HYPERBOLIC_33 = [[2, -3], [-3, 2]]


def _job(**extra):
    payload = {"cartan": HYPERBOLIC_33}
    payload.update(extra)
    return payload


def test_parse_full_config():
    job = parse_job_config(_job(**{
        "lambda": {"coroot_pairings": ["2", "5/2"]},
        "point": {"alpha_values": [1, "1/3"]},
        "mu": {"coroot_pairings": [1, 1]},
        "precision_digits": 40,
        "max_length": 12,
        "M": "4.5",
        "N": 1000,
        "caps": {"tits_cap": 500},
    }))
    assert job.lambda_.values == (2, Fraction(5, 2))
    assert job.point.values == (1, Fraction(1, 3))
    assert job.m_value == Fraction(9, 2)
    assert job.n_value == 1000
    assert job.caps.tits_cap == 500
    assert job.caps.string_cap is None
    assert job.cartan_matrix().symmetrizer == (1, 1)
    assert job.sample_points() == [(1, Fraction(1, 3))]


def test_points_take_precedence_over_point():
    job = parse_job_config(_job(
        point={"alpha_values": ["1", "1"]},
        points=[{"alpha_values": ["1", "2"]}, {"alpha_values": ["3", "1"]}],
    ))
    assert job.sample_points() == [(1, 2), (3, 1)]
    assert parse_job_config(_job()).sample_points() == []


@pytest.mark.parametrize(
    "payload,path",
    [
        (_job(bogus=1), "bogus"),
        (_job(**{"lambda": {"coroot_pairings": [1.5, 2]}}), "lambda.coroot_pairings"),
        (_job(**{"lambda": {"coroot_pairings": ["1.5", "2"]}}), "lambda.coroot_pairings"),
        (_job(point={"alpha_values": ["1", "x"]}), "point.alpha_values"),
        (_job(caps={"tits_cap": 0}), "caps.tits_cap"),
        (_job(caps={"depth": 3}), "caps.depth"),
        (_job(precision_digits=5), "precision_digits"),
        (_job(M="-1"), "M"),
        (_job(N="0"), "N"),
        ({"cartan": [[2, -1.0], [-1, 2]]}, "cartan.0.1"),
        ({"lambda": {"coroot_pairings": ["2", "2"]}}, "cartan"),
    ],
)
def test_invalid_config_names_field(payload, path):
    with pytest.raises(ConfigError) as info:
        parse_job_config(payload)
    assert info.value.path.startswith(path)
    assert str(info.value).startswith(path)


def test_rank_mismatch():
    with pytest.raises(ConfigError) as info:
        parse_job_config(_job(point={"alpha_values": ["1", "1", "1"]}))
    assert "point.alpha_values has 3 entries, expected rank 2" in str(info.value)


def test_cartan_validation_is_deferred():
    job = parse_job_config({"cartan": [[2, 1], [1, 2]]})
    with pytest.raises(InvalidGCM):
        job.cartan_matrix()


def test_load_job_config(write_config):
    job = load_job_config(write_config(_job(max_length=3)))
    assert job.max_length == 3


def test_load_job_config_errors(tmp_path):
    missing = tmp_path / "missing.json"
    with pytest.raises(ConfigError) as info:
        load_job_config(missing)
    assert info.value.path == str(missing)

    broken = tmp_path / "broken.json"
    broken.write_text('{"cartan": [[2, -1], ', encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_job_config(broken)
    assert "invalid JSON" in str(info.value)


def test_settings_from_env(monkeypatch):
    monkeypatch.setenv("KMEIS_PRECISION_DIGITS", "50")
    monkeypatch.setenv("KMEIS_LOG_LEVEL", "debug")
    monkeypatch.setenv("KMEIS_THREADS", "")
    monkeypatch.delenv("KMEIS_DATABASE_URL", raising=False)
    settings = Settings.from_env()
    assert settings.precision_digits == 50
    assert settings.log_level == "DEBUG"
    assert settings.threads == 1
    assert settings.database_url is None


def test_settings_reject_low_precision(monkeypatch):
    monkeypatch.setenv("KMEIS_PRECISION_DIGITS", "5")
    with pytest.raises(ValidationError):
        Settings.from_env()


def test_settings_reject_unknown_log_level(monkeypatch):
    monkeypatch.setenv("KMEIS_LOG_LEVEL", "chatty")
    with pytest.raises(ValidationError, match="log level"):
        Settings.from_env()
