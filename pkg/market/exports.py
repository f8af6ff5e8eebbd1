"""
Run artifacts on disk.

A run directory holds prices.csv, trades.csv, profits.json, config.json,
agents.json, ga_trace.csv and summary.json. Directories are written under
a temporary name and renamed into place so a crash never leaves half a run.
"""

import json
import math
import os
import shutil
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .orderbook import tape_frame


def json_safe(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None"""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_json(path, data):
    Path(path).write_text(json.dumps(json_safe(data), indent=2, sort_keys=True) + '\n')


def read_json(path):
    return json.loads(Path(path).read_text())


def write_csv(path, frame):
    frame.to_csv(path, index=False, float_format='%.10g', lineterminator='\n')


def provenance(config):
    return {'config': config.to_dict(), 'code_version': __version__}


def prices_frame(result):
    steps = len(result.prices) - 1
    gamma = np.full(steps + 1, np.nan)
    if result.gamma is not None:
        gamma[1:] = result.gamma
    return pd.DataFrame({
        't': np.arange(steps + 1),
        'v': result.fundamental,
        'p': result.prices,
        'log_ret_v': np.concatenate(([np.nan], result.fundamental_returns)),
        'log_ret_p': np.concatenate(([np.nan], result.price_returns)),
        'gamma': gamma,
    })


def read_prices(path):
    """prices.csv as a frame; raises FileNotFoundError for a missing file"""
    return pd.read_csv(path)


class atomic_directory:
    """Context manager yielding a temporary directory renamed to ``target`` on success"""

    def __init__(self, target):
        self.target = Path(target)
        self.tmp = self.target.with_name(f'.{self.target.name}.tmp')

    def __enter__(self):
        if self.tmp.exists():
            shutil.rmtree(self.tmp)
        self.tmp.mkdir(parents=True)
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            shutil.rmtree(self.tmp, ignore_errors=True)
            return False
        if self.target.exists():
            shutil.rmtree(self.target)
        os.replace(self.tmp, self.target)
        return False


def write_run(result, target):
    """Persist every artifact of one run; returns the directory"""
    tick = result.config.tick
    with atomic_directory(target) as tmp:
        write_csv(tmp / 'prices.csv', prices_frame(result))
        write_csv(tmp / 'trades.csv', tape_frame(result.tape, tick))
        write_csv(tmp / 'ga_trace.csv', result.ga_trace.frame())
        write_json(tmp / 'profits.json', result.profits)
        write_json(tmp / 'config.json', provenance(result.config))
        write_json(tmp / 'agents.json', result.agents)
        write_json(tmp / 'summary.json', result.summary())
    return Path(target)
