#! /usr/bin/env python3
import os
import sys
import json

import numpy as np

from time import time
from pathlib import Path
from fractions import Fraction
from textwrap import dedent, fill
from typing import Any, NamedTuple, Optional, Union

CONFIG_PATH = Path.home() / '.qlat.json'
INT64_MAX = 2 ** 63 - 1


class QlatError(Exception):
    """Base class for domain failures"""


class ResourceError(QlatError):
    """A configured cap was exceeded"""


class PrecisionError(QlatError):
    """Local precision escalation did not reach a certified answer"""


class MarginError(QlatError):
    """The Jacobian valuation violates the Newton lifting hypothesis"""


class NotFoundError(QlatError):
    """A search budget was exhausted.

    This never means that no solution exists; only that none was found within
    the budget.
    """


class UnresolvedError(QlatError):
    """A reflection factorization degenerated"""


class PreconditionError(QlatError, ValueError):
    """Well-formed input outside the domain of an operation"""


class Caps(NamedTuple):
    short_vectors: int = 1000000
    classes: int = 200
    modpe: int = 10000000
    local_nodes: int = 2000000
    precision_steps: int = 4
    greenberg_budget: int = 20000
    kgen_budget: int = 2000
    discriminant_group: int = 200000
    spinor_retries: int = 4
    n_jobs: int = 1


def _mywrap(text: str) -> str:
    text = dedent(text)
    lines = text.split('\n')
    lines = [
        fill(x, replace_whitespace=False, subsequent_indent='    ')
        for x in lines]
    text = '\n'.join(lines)
    return text


def _report(msg: str, t0: Optional[float] = None) -> None:
    """Print a wrapped status message to stderr

    stdout is reserved for command output, which has to stay byte-identical
    between runs.
    """
    if t0 is not None:
        msg += f'- time in function: {(time() - t0) / 60:.2f} minutes\n'
    print(_mywrap(msg), file=sys.stderr)


def load_config(path: Union[str, Path, None] = None) -> dict:
    """Read the user configuration file

    Args:
        path: location of the JSON config. Defaults to ``~/.qlat.json``.
    Returns:
        ``dict`` with the parsed configuration, empty if the file doesn't
        exist.
    """
    path = CONFIG_PATH if path is None else Path(path).expanduser()
    try:
        with open(path) as f:
            conf = json.load(f)
    except FileNotFoundError:
        return {}

    if not isinstance(conf, dict):
        raise ValueError(f'Config file {path} must hold a JSON object')

    return conf


def save_caps(path: Union[str, Path, None] = None, **caps) -> None:
    """Persist cap overrides to the user configuration file"""
    path = CONFIG_PATH if path is None else Path(path).expanduser()
    conf = load_config(path)
    conf['caps'] = conf.get('caps', {})
    for key, val in caps.items():
        if key not in Caps._fields:
            raise ValueError(f'Unknown cap: {key}')
        conf['caps'][key] = int(val)

    with open(path, 'w') as f:
        json.dump(conf, f, sort_keys=True, indent=4)


def get_caps(config_path: Union[str, Path, None] = None, **overrides) -> Caps:
    """Resolve resource caps

    Later sources win: built-in defaults, then the ``caps`` object in
    ``~/.qlat.json``, then ``QLAT_CAP_<NAME>`` environment variables, then
    keyword arguments. ``None`` keyword values are ignored.

    Examples:

        .. code-block:: python

            >>> from qlat.utils import get_caps
            >>> get_caps(classes=50).classes
            50
    """
    values = Caps()._asdict()

    for key, val in load_config(config_path).get('caps', {}).items():
        if key not in values:
            raise ValueError(f'Unknown cap in config file: {key}')
        values[key] = int(val)

    for key in values:
        env = os.environ.get(f'QLAT_CAP_{key.upper()}')
        if env is not None:
            try:
                values[key] = int(env)
            except ValueError:
                msg = f'QLAT_CAP_{key.upper()} must be an integer, got {env!r}'
                raise ValueError(msg)

    for key, val in overrides.items():
        if key not in values:
            raise ValueError(f'Unknown cap: {key}')
        if val is not None:
            values[key] = int(val)

    for key, val in values.items():
        if val < 1:
            raise ValueError(f'Cap {key} must be positive, got {val}')

    return Caps(**values)


def encode_int(x: int) -> Union[int, str]:
    """Integers beyond 64 bits are written as decimal strings"""
    if abs(x) > INT64_MAX:
        return str(x)
    return x


def decode_int(x: Any) -> int:
    if isinstance(x, bool):
        raise TypeError('Expected an integer, got a boolean')
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            pass
    raise TypeError(f'Expected an integer or decimal string, got {x!r}')


def encode_fraction(x: Union[int, Fraction]) -> str:
    """Exact rationals serialize as ``"num/den"``"""
    x = Fraction(x)
    return f'{x.numerator}/{x.denominator}'


def decode_fraction(x: Any) -> Fraction:
    if isinstance(x, bool):
        raise TypeError('Expected a rational, got a boolean')
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            pass
    raise TypeError(f'Expected an integer or "num/den" string, got {x!r}')


def to_jsonable(obj: Any) -> Any:
    """Recursively convert results to JSON-safe values"""
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return encode_int(obj)
    if isinstance(obj, Fraction):
        return encode_fraction(obj)
    if hasattr(obj, 'to_json'):
        return to_jsonable(obj.to_json())
    if hasattr(obj, '_asdict'):
        return to_jsonable(obj._asdict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f'Cannot serialize object of type {type(obj).__name__}')
