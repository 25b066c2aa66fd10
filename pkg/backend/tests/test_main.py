import json
import logging
import pytest
from unittest.mock import patch


class TestParseJob:
    """Test command line parsing into a JobSpec"""

    def test_defaults(self):
        from app.main import parse_job
        from app.models import FieldKind, OutputFormat, Target

        spec, log_level = parse_job(["genus"])

        assert spec.target == Target.GENUS
        assert spec.field == FieldKind.RATIONALS
        assert spec.output == OutputFormat.JSON
        assert spec.ideal == "unit"
        assert log_level is None

    def test_real_quadratic(self):
        from app.main import parse_job

        spec, _ = parse_job(["mass", "--field", "real_quadratic", "--d", "15", "--a", "4+w"])

        assert spec.d == 15
        assert spec.a == "4+w"

    def test_missing_d(self):
        from app.main import parse_job
        from app.errors import UsageError

        with pytest.raises(UsageError):
            parse_job(["genus", "--field", "real_quadratic"])

    def test_unknown_target(self):
        from app.main import parse_job
        from app.errors import UsageError

        with pytest.raises(UsageError):
            parse_job(["bogus"])

    def test_unknown_log_level(self):
        from app.main import parse_job
        from app.errors import UsageError

        with pytest.raises(UsageError, match="log level"):
            parse_job(["mass", "--log-level", "chatty"])


class TestMain:
    """Test commands end to end and their exit codes"""

    def test_mass_json(self, capsys):
        from app.main import main, EXIT_OK

        code = main(["mass"])
        report = json.loads(capsys.readouterr().out)

        assert code == EXIT_OK
        assert report["results"]["eichler_mass"] == "1/12"
        assert report["results"]["siegel_mass"] == "1/576"
        assert report["checks"][0]["status"] == "PASS"

    def test_genus_table(self, capsys):
        from app.main import main, EXIT_OK

        code = main(["genus", "--output", "table"])
        out = capsys.readouterr().out

        assert code == EXIT_OK
        assert "1 classes" in out
        assert "[PASS] genus_mass_closure" in out

    def test_genus_json_gram(self, capsys):
        from app.main import main

        main(["genus"])
        report = json.loads(capsys.readouterr().out)
        row = report["results"]["classes"][0]

        assert row["aut_plus_order"] == 576
        assert row["rescaled_minimum"] == 2
        assert row["trace_gram"]["determinant"] == 4

    def test_ideal_classes(self, capsys):
        from app.main import main, EXIT_OK

        code = main(["ideal-classes", "--b", "11"])
        report = json.loads(capsys.readouterr().out)

        assert code == EXIT_OK
        assert report["results"]["class_number"] == 2
        assert report["results"]["eichler_mass"] == "5/6"

    def test_orders(self, capsys):
        from app.main import main, EXIT_OK

        code = main(["orders", "--b", "11"])
        report = json.loads(capsys.readouterr().out)

        assert code == EXIT_OK
        assert sorted(row["unit_index"] for row in report["results"]["types"]) == [2, 3]

    def test_verify(self, capsys):
        from app.main import main, EXIT_OK

        code = main(["verify"])
        report = json.loads(capsys.readouterr().out)

        assert code == EXIT_OK
        assert all(check["status"] == "PASS" for check in report["checks"])

    def test_usage_error(self, capsys):
        from app.main import main, EXIT_USAGE

        assert main(["genus", "--d", "5"]) == EXIT_USAGE
        assert "usage error" in capsys.readouterr().err

    def test_not_totally_definite(self):
        from app.main import main, EXIT_USAGE

        assert main(["mass", "--a", "-1"]) == EXIT_USAGE

    def test_search_cap_exit_code(self):
        from app.main import main, EXIT_SEARCH_CAP
        from app.errors import SearchCapExceeded

        with patch('app.main.run', side_effect=SearchCapExceeded("cap 2")):
            assert main(["genus"]) == EXIT_SEARCH_CAP

    def test_consistency_exit_code(self):
        from app.main import main, EXIT_CONSISTENCY
        from app.errors import ConsistencyError

        with patch('app.main.run', side_effect=ConsistencyError("mass overshoot")):
            assert main(["genus"]) == EXIT_CONSISTENCY

    @pytest.mark.parametrize("debug", [True, False])
    def test_traceback_only_in_debug(self, caplog, debug):
        from app.config import get_settings
        from app.main import main, EXIT_CONSISTENCY
        from app.errors import ConsistencyError

        with patch('app.main.setup_logging'), \
                patch.object(get_settings(), "DEBUG", debug), \
                patch('app.main.run', side_effect=ConsistencyError("mass overshoot")):
            with caplog.at_level(logging.ERROR, logger="app.main"):
                assert main(["genus"]) == EXIT_CONSISTENCY

        (record,) = [r for r in caplog.records if "Consistency failure" in r.getMessage()]
        assert (record.exc_info is not None) is debug

    def test_version(self, capsys):
        from app.config import get_settings
        from app.main import main

        with pytest.raises(SystemExit) as exc:
            main(["--version"])

        assert exc.value.code == 0
        assert capsys.readouterr().out.strip() == f"quaternary-genus {get_settings().APP_VERSION}"

    @pytest.mark.slow
    def test_verify_real_quadratic(self, capsys):
        from app.main import main, EXIT_OK

        code = main(["verify", "--field", "real_quadratic", "--d", "15", "--output", "table"])
        lines = [line for line in capsys.readouterr().out.splitlines() if line.startswith("[")]

        assert code == EXIT_OK
        assert lines
        assert all(line.startswith("[PASS]") for line in lines)

    def test_failed_check_exit_code(self, capsys):
        from app.main import main, EXIT_CONSISTENCY
        from app.models import CheckResult, CheckStatus

        failing = [CheckResult(name="eichler_mass_closure", status=CheckStatus.FAIL, detail="sum=1/6")]
        with patch('app.main.verify_algebra', return_value=failing):
            code = main(["verify", "--output", "table"])

        assert code == EXIT_CONSISTENCY
        assert "[FAIL] eichler_mass_closure" in capsys.readouterr().out

    def test_config_error(self):
        from app.main import main, EXIT_USAGE

        with patch('app.config.Settings.validate', side_effect=ValueError("THREADS must be a positive integer")):
            assert main(["mass"]) == EXIT_USAGE
