"""Utility helpers for the command line: input parsing and report rendering."""

from __future__ import annotations

import json
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import InvalidParameterError
from .models import Density, ReferenceDistribution
from .services.reference import load_tabulated, make_builtin


SAMPLE_COUNT = 512


def read_tabulated(path: str) -> ReferenceDistribution:
    """Load a ``x<TAB>q`` file; lines starting with ``#`` are comments."""
    try:
        frame = pd.read_csv(path, sep='\t', comment='#', header=None, names=['x', 'q'],
                            dtype=float, skip_blank_lines=True)
    except OSError as exc:
        raise InvalidParameterError('ref', f'cannot read {path}: {exc}') from exc
    except (ValueError, pd.errors.ParserError) as exc:
        raise InvalidParameterError('ref', f'{path} is not a two-column tab-separated table: {exc}') from exc
    if frame.isna().any().any():
        raise InvalidParameterError('ref', f'{path} has missing or non-numeric entries')
    return load_tabulated(frame.itertuples(index=False, name=None), label=path)


def parse_ref_spec(text: str) -> ReferenceDistribution:
    """``family:p1,p2`` for a built-in reference, ``@path`` for a tabulated file."""
    text = text.strip()
    if text.startswith('@'):
        return read_tabulated(text[1:])
    family, _, raw = text.partition(':')
    try:
        params = tuple(float(p) for p in raw.split(',') if p.strip())
    except ValueError as exc:
        raise InvalidParameterError('ref', f'parameters of {text!r} must be numbers') from exc
    return make_builtin(family.strip().lower(), params)


def parse_pair(text: Optional[str], name: str) -> Optional[Tuple[float, float]]:
    if text is None:
        return None
    parts = text.split(',')
    if len(parts) != 2:
        raise InvalidParameterError(name, f'expected "lo,hi", got {text!r}')
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise InvalidParameterError(name, f'expected two numbers, got {text!r}') from exc


def density_samples(density: Density, count: int = SAMPLE_COUNT) -> List[List[float]]:
    lo, hi = density.support.bounds
    xs = np.linspace(lo, hi, count)
    return [[float(x), float(p)] for x, p in zip(xs, density(xs))]


def _clean(value: Any) -> Any:
    """Plain Python types for JSON; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _format_float(value: float) -> str:
    text = f'{value:.17g}'
    return text if any(c in text for c in '.en') else text + '.0'


def _encode(value: Any, depth: int) -> str:
    """``json.dumps(sort_keys=True, indent=2)`` layout with floats at 17 significant digits."""
    pad, close = '  ' * (depth + 1), '  ' * depth
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f'{pad}{json.dumps(k)}: {_encode(value[k], depth + 1)}' for k in sorted(value)]
        return '{\n' + ',\n'.join(items) + '\n' + close + '}'
    if isinstance(value, list):
        if not value:
            return '[]'
        return '[\n' + ',\n'.join(pad + _encode(v, depth + 1) for v in value) + '\n' + close + ']'
    if isinstance(value, float):
        return _format_float(value)
    return json.dumps(value)


def render_json(record: Dict[str, Any]) -> str:
    """Sorted, indented JSON; rendering the parsed text again gives the same bytes."""
    return _encode(_clean(record), 0) + '\n'


def render_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]], summary: Dict[str, Any]) -> str:
    """Header row and data rows, then ``# key: value`` summary lines."""
    frame = pd.DataFrame(list(rows), columns=list(columns))
    text = frame.to_csv(index=False, float_format='%.12g', lineterminator='\n')
    lines = [text.rstrip('\n')]
    for key in sorted(summary):
        lines.append(f'# {key}: {_format_summary(summary[key])}')
    return '\n'.join(lines) + '\n'


def _format_summary(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f'{float(value):.12g}'
    if isinstance(value, (list, tuple)):
        if value and isinstance(value[0], (list, tuple)):
            return '; '.join(_format_summary(v) for v in value)
        return '[' + ', '.join(_format_summary(v) for v in value) + ']'
    return str(value)
