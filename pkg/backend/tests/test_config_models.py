import logging
import pytest
from pydantic import ValidationError


class TestSettings:
    """Test configuration validation and logging setup"""

    def test_defaults_validate(self):
        from app.config import Settings

        settings = Settings()

        assert settings.validate()
        assert settings.DENOMINATOR_CAP >= 1

    @pytest.mark.parametrize("name,value", [
        ("THREADS", 0),
        ("DENOMINATOR_CAP", 0),
        ("FP_TOLERANCE", 0.0),
        ("LOG_LEVEL", "LOUD"),
    ])
    def test_invalid_values(self, name, value):
        from app.config import Settings

        settings = Settings()
        setattr(settings, name, value)

        with pytest.raises(ValueError):
            settings.validate()

    def test_get_settings_cached(self):
        from app.config import get_settings

        assert get_settings() is get_settings()

    def test_setup_logging(self):
        from app.config import setup_logging

        logger = setup_logging("DEBUG")

        assert logger.name == "app"
        assert logging.getLogger().level == logging.DEBUG
        assert logging.getLogger("sympy").level == logging.WARNING
        setup_logging("INFO")


class TestJobSpec:
    """Test JobSpec validation"""

    def test_canonical_entries(self):
        from app.models import JobSpec

        spec = JobSpec(field="real_quadratic", d=15, a="w+4", b="2/4")

        assert spec.a == "4+w"
        assert spec.b == "1/2"

    def test_d_required(self):
        from app.models import JobSpec

        with pytest.raises(ValidationError):
            JobSpec(field="real_quadratic")

    def test_d_rejected_over_rationals(self):
        from app.models import JobSpec

        with pytest.raises(ValidationError):
            JobSpec(d=5)

    def test_non_squarefree_d(self):
        from app.models import JobSpec

        with pytest.raises(ValidationError):
            JobSpec(field="real_quadratic", d=12)

    def test_empty_ideal(self):
        from app.models import JobSpec

        with pytest.raises(ValidationError):
            JobSpec(ideal="   ")

    def test_bad_ideal(self):
        from app.models import JobSpec

        with pytest.raises(ValidationError):
            JobSpec(ideal="prime:4")

    def test_bounds(self):
        from app.models import JobSpec

        with pytest.raises(ValidationError):
            JobSpec(threads=0)
        with pytest.raises(ValidationError):
            JobSpec(denominator_cap=0)


class TestReport:
    def test_rational_str(self):
        from app.models import rational_str

        assert rational_str("6/4") == "3/2"
        assert rational_str(3) == "3"

    def test_failed(self):
        from app.models import CheckResult, CheckStatus, Report

        passing = CheckResult(name="a", status=CheckStatus.PASS)
        failing = CheckResult(name="b", status=CheckStatus.FAIL, detail="x")

        assert not Report.model_construct(checks=[passing]).failed()
        assert Report.model_construct(checks=[passing, failing]).failed()
