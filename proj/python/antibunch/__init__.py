"""Photon statistics of states mixed on a beamsplitter, and driven Kerr cavities."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, _run_figure


def run_figure(name, config=None, out_dir=None):
    """Compute a figure dataset.

    Returns (table, meta): table maps column names to lists, meta is the
    metadata dict also written next to the CSV when out_dir is given.
    """
    table, meta = _run_figure(name, _json.dumps(config) if config else "", str(out_dir) if out_dir else "")
    return table, _json.loads(meta)
