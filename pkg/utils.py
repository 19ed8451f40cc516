"""
Utility functions for the Kottwitz toolkit
Provides configuration, logging setup, error types and output formatting
"""

import os
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd
from dotenv import load_dotenv

logger = logging.getLogger(__name__)


class KottwitzError(ValueError):
    """Base class for every error raised by the toolkit"""


class UnsupportedTypeError(KottwitzError):
    """Group or type descriptor that the toolkit cannot build"""


class InvalidTwistError(KottwitzError):
    """Lattice automorphism that is not a diagram automorphism of finite order"""


class CapExceededError(KottwitzError):
    """An enumeration grew past the configured cap"""

    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeds the configured cap of {cap} elements")
        self.what = what
        self.cap = cap


class PreconditionError(KottwitzError):
    """An operation was called outside of its domain"""


class ConfigError(KottwitzError):
    """Invalid configuration value"""


class ParseError(KottwitzError):
    """Command-line or document input that does not follow the grammar"""

    def __init__(self, message: str, token: Optional[str] = None):
        super().__init__(message if token is None else f"{message}: {token!r}")
        self.token = token


class ConfigManager:
    """Configuration management"""

    DEFAULT_CONFIG = {
        'orbit_cap': 10 ** 6,
        'weight_cap': 10 ** 6,
        'coset_cap': 10 ** 6,
        'output_format': None,
        'log_level': 'WARNING',
        'golden_path': str(Path(__file__).resolve().parent / 'data' / 'golden'),
        'schema_path': str(Path(__file__).resolve().parent / 'schemas'),
    }

    @classmethod
    def load_config(cls, config_path: Optional[str] = None) -> Dict[str, Any]:
        """Load configuration from file and environment, falling back to defaults"""
        config = cls.DEFAULT_CONFIG.copy()

        if config_path and Path(config_path).exists():
            try:
                with open(config_path, 'r') as f:
                    user_config = json.load(f)
                config.update(user_config)
            except Exception as e:
                logger.warning(f"Failed to load config from {config_path}: {e}")

        load_dotenv()
        cap = os.getenv("KOTTWITZ_CAP")
        if cap:
            config['orbit_cap'] = config['weight_cap'] = cls.parse_cap(cap)
        level = os.getenv("KOTTWITZ_LOG_LEVEL")
        if level:
            config['log_level'] = level

        return config

    @staticmethod
    def parse_cap(value: Union[str, int]) -> int:
        """Parse a positive enumeration cap ("10**6" and "1e6" are accepted)"""
        text = str(value).strip().replace('_', '')
        try:
            if '**' in text:
                base, exponent = text.split('**')
                cap = int(base) ** int(exponent)
            elif 'e' in text.lower():
                cap = int(float(text))
            else:
                cap = int(text)
        except ValueError:
            raise ConfigError(f"Invalid cap value {value!r}")
        if cap <= 0:
            raise ConfigError(f"Cap must be positive, got {cap}")
        return cap

    @classmethod
    def save_config(cls, config: Dict[str, Any], config_path: str) -> bool:
        """Save configuration to file"""
        try:
            with open(config_path, 'w') as f:
                json.dump(config, f, indent=2)
            return True
        except Exception as e:
            logger.error(f"Failed to save config to {config_path}: {e}")
            return False


def default_cap(kind: str = 'orbit_cap') -> int:
    """Cap used when a caller does not pass one explicitly"""
    return ConfigManager.load_config()[kind]


def format_fraction(value: Union[int, Fraction]) -> str:
    """Render an exact rational as "3" or "1/2" """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_vector(vector: Sequence[Union[int, Fraction]]) -> str:
    """Render a vector as "(1,1/2,0)" """
    return "(" + ",".join(format_fraction(x) for x in vector) + ")"


def jsonable(value: Any) -> Any:
    """Convert nested tuples, fractions and sets into JSON-friendly values"""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else format_fraction(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    return value


class ResponseFormatter:
    """Format documents emitted by the command-line front end"""

    @staticmethod
    def format_table(rows: Iterable[Dict[str, Any]], columns: List[str]) -> str:
        """Format rows as a TSV table with a header line"""
        frame = pd.DataFrame(list(rows), columns=columns)
        return frame.to_csv(sep="\t", index=False)

    @staticmethod
    def format_error_response(error: str, details: Optional[str] = None) -> Dict[str, Any]:
        """Format error response"""
        return {
            'error': True,
            'message': error,
            'details': details,
        }

    @staticmethod
    def dumps(document: Dict[str, Any]) -> str:
        """Serialize a document deterministically"""
        return json.dumps(jsonable(document), indent=2, sort_keys=True)


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    """Read a TSV fixture, keeping every column as text"""
    return pd.read_csv(path, sep="\t", dtype=str, keep_default_na=False)


# Logging utilities
def setup_logging(level: str = 'INFO', log_file: Optional[str] = None):
    """Set up logging configuration"""
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=log_format,
        handlers=[
            logging.StreamHandler(),
            *([] if log_file is None else [logging.FileHandler(log_file)])
        ],
        force=True,
    )
