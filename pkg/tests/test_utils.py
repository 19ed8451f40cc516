"""
Test suite for utils.py
Tests configuration, formatting helpers and the error hierarchy
"""

import json
import os
import sys
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils import (
    CapExceededError, ConfigError, ConfigManager, InvalidTwistError, KottwitzError, ParseError,
    PreconditionError, ResponseFormatter, UnsupportedTypeError, default_cap, format_fraction,
    format_vector, jsonable, read_table,
)


class TestConfigManager:
    """Test ConfigManager utility class"""

    @pytest.fixture(autouse=True)
    def clean_environment(self, monkeypatch):
        monkeypatch.delenv("KOTTWITZ_CAP", raising=False)
        monkeypatch.delenv("KOTTWITZ_LOG_LEVEL", raising=False)

    def test_load_default_config(self):
        """Test loading default configuration"""
        config = ConfigManager.load_config()
        assert config['orbit_cap'] == 10 ** 6
        assert config['output_format'] is None
        assert os.path.isdir(config['golden_path'])
        assert os.path.isdir(config['schema_path'])

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("KOTTWITZ_CAP", "10**3")
        monkeypatch.setenv("KOTTWITZ_LOG_LEVEL", "DEBUG")
        config = ConfigManager.load_config()
        assert config['orbit_cap'] == config['weight_cap'] == 1000
        assert config['log_level'] == "DEBUG"
        assert default_cap('weight_cap') == 1000

    def test_save_and_load_config(self, tmp_path):
        """Test saving and loading configuration"""
        path = tmp_path / "config.json"
        assert ConfigManager.save_config({'coset_cap': 42, 'output_format': 'tsv'}, str(path))
        config = ConfigManager.load_config(str(path))
        assert config['coset_cap'] == 42
        assert config['output_format'] == 'tsv'
        assert config['orbit_cap'] == 10 ** 6

    def test_malformed_config_is_ignored(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json")
        assert ConfigManager.load_config(str(path)) == ConfigManager.load_config()

    @pytest.mark.parametrize("text,expected", [("1000", 1000), ("10**6", 10 ** 6), ("1e4", 10000), ("1_000", 1000)])
    def test_parse_cap(self, text, expected):
        assert ConfigManager.parse_cap(text) == expected

    @pytest.mark.parametrize("text", ["abc", "0", "-5", "2**x"])
    def test_parse_cap_invalid(self, text):
        with pytest.raises(ConfigError):
            ConfigManager.parse_cap(text)


class TestFormatting:
    """Test exact formatting helpers"""

    def test_format_fraction(self):
        assert format_fraction(3) == "3"
        assert format_fraction(Fraction(1, 2)) == "1/2"
        assert format_fraction(Fraction(-4, 2)) == "-2"

    def test_format_vector(self):
        assert format_vector((1, Fraction(1, 2), 0)) == "(1,1/2,0)"
        assert format_vector(()) == "()"

    def test_jsonable(self):
        value = {'a': (Fraction(1, 2), Fraction(2)), 3: {2, 1}}
        assert jsonable(value) == {'a': ['1/2', 2], '3': [1, 2]}


class TestResponseFormatter:
    """Test ResponseFormatter utility class"""

    def test_format_table(self):
        rows = [{'coweight': 'w1', 'primes': '{2}', 'very_good': 'l != 2,3'}]
        table = ResponseFormatter.format_table(rows, ['coweight', 'primes', 'very_good'])
        assert table == "coweight\tprimes\tvery_good\nw1\t{2}\tl != 2,3\n"

    def test_format_empty_table(self):
        assert ResponseFormatter.format_table([], ['a', 'b']) == "a\tb\n"

    def test_format_error_response(self):
        """Test error response formatting"""
        response = ResponseFormatter.format_error_response("Bad input", "--mu")
        assert response['error'] is True
        assert response['message'] == "Bad input"
        assert response['details'] == "--mu"

    def test_dumps_is_sorted(self):
        text = ResponseFormatter.dumps({'b': 1, 'a': Fraction(3, 4)})
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {'a': '3/4', 'b': 1}

    def test_read_table(self, tmp_path):
        path = tmp_path / "table.tsv"
        path.write_text(ResponseFormatter.format_table(
            [{'coweight': 'w1', 'primes': '{}', 'very_good': 'l != 2'}], ['coweight', 'primes', 'very_good']))
        frame = read_table(path)
        assert list(frame.columns) == ['coweight', 'primes', 'very_good']
        assert frame.iloc[0]['primes'] == '{}'


class TestErrors:
    """Test the exception hierarchy"""

    @pytest.mark.parametrize("error", [
        UnsupportedTypeError("x"), InvalidTwistError("x"), CapExceededError("Orbit", 10),
        PreconditionError("x"), ConfigError("x"), ParseError("x"),
    ])
    def test_hierarchy(self, error):
        assert isinstance(error, KottwitzError)
        assert isinstance(error, ValueError)

    def test_cap_message(self):
        error = CapExceededError("Weyl group enumeration", 100)
        assert error.cap == 100
        assert "100" in str(error)

    def test_parse_error_token(self):
        error = ParseError("Missing required option", "--mu")
        assert error.token == "--mu"
        assert str(error) == "Missing required option: '--mu'"
        assert ParseError("Bad").token is None


if __name__ == "__main__":
    pytest.main([__file__])
