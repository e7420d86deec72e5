"""CSV/JSON writers shared by the CLI.

Data files are a pure function of their inputs: the only wall-clock value
(the run timestamp) goes to a ``<output>.meta.json`` sidecar.
"""
import datetime as _dt
import io
import json

import numpy as np

from . import __version__

TOOL = "seqdisc"


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def header_block(config):
    return {"tool": TOOL, "version": __version__, "config": _jsonable(config),
            "seed": config.get("seed")}


def render_csv(header, rows, config):
    buf = io.StringIO(newline="")
    buf.write(f"# tool: {TOOL} {__version__}\n")
    buf.write(f"# config: {json.dumps(_jsonable(config), sort_keys=True)}\n")
    buf.write(f"# seed: {config.get('seed')}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def render_json(data, config):
    payload = dict(header_block(config))
    payload["data"] = _jsonable(data)
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_sidecar(path, config):
    meta = header_block(config)
    meta["created"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    meta["data_file"] = str(path)
    write_text(f"{path}.meta.json", json.dumps(meta, indent=2) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
