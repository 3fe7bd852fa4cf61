"""TOML experiment configuration.

Example::

    [experiment]
    dimension = 10
    runs = 25
    budget_multiplier = 10000
    master_seed = 0
    diagnostics = false

    [functions]
    sphere = {}
    rastrigin = { shift = true, rotate = true }

    [[algorithm]]
    baseline = "de"

    [[algorithm]]
    label = "SCSS-DE"
    baseline = "de"
    scss = true
    M = 2
    scheme = "scheme1"
    gd = 1.0
    F = 0.7
"""

from __future__ import annotations

import dataclasses
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .baselines import BASELINES
from .bench.runner import AlgorithmConfig, ConfigInvalid, ExperimentSpec, FunctionSpec
from .scss import SCSSConfig, parse_scheme

EXPERIMENT_KEYS = {"dimension", "runs", "budget_multiplier", "master_seed", "diagnostics"}
FUNCTION_KEYS = {"shift", "rotate"}
SCSS_KEYS = {"label", "baseline", "scss", "M", "scheme", "gd"}
PARAM_ALIASES = {"lambda": "lam"}


def _baseline_fields(name: str) -> dict:
    """Lower-cased key -> dataclass field name for a baseline's parameters."""
    fields = {f.name.lower(): f.name for f in dataclasses.fields(BASELINES[name][1])}
    for alias, target in PARAM_ALIASES.items():
        if target in fields.values():
            fields[alias] = target
    return fields


def _check_type(key, value, kinds):
    if isinstance(value, bool) and bool not in kinds:
        raise ConfigInvalid(f"{key}: expected {kinds[0].__name__}, got a boolean")
    if not isinstance(value, kinds):
        raise ConfigInvalid(f"{key}: expected {kinds[0].__name__}, got {value!r}")
    return value


def parse_algorithm(block: dict, index: int) -> AlgorithmConfig:
    if "baseline" not in block:
        raise ConfigInvalid(f"algorithm block {index + 1}: missing 'baseline'")
    baseline = str(block["baseline"]).lower()
    if baseline not in BASELINES:
        raise ConfigInvalid(f"algorithm block {index + 1}: unknown baseline {baseline!r}")
    use_scss = _check_type("scss", block.get("scss", False), (bool,))
    fields = _baseline_fields(baseline)
    params = {}
    for key, value in block.items():
        if key in SCSS_KEYS:
            continue
        target = fields.get(key.lower())
        if target is None:
            raise ConfigInvalid(f"algorithm block {index + 1}: unknown key {key!r}")
        params[target] = _check_type(key, value, (int, float))
    scss = None
    if use_scss:
        M = _check_type("M", block.get("M", 2), (int,))
        gd = block.get("gd")
        try:
            scheme = parse_scheme(str(block.get("scheme", "scheme2")), gd)
            scss = SCSSConfig(M, scheme)
        except ValueError as exc:
            raise ConfigInvalid(f"algorithm block {index + 1}: {exc}") from exc
    elif any(k in block for k in ("M", "scheme", "gd")):
        raise ConfigInvalid(f"algorithm block {index + 1}: M/scheme/gd given but scss is off")
    default_label = ("SCSS-" if scss else "") + baseline.upper()
    label = str(block.get("label", default_label))
    return AlgorithmConfig(label, baseline, params, scss).validate()


def parse_config(text: str, seed: int | None = None) -> ExperimentSpec:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"malformed config: {exc}") from exc
    unknown = set(doc) - {"experiment", "functions", "algorithm"}
    if unknown:
        raise ConfigInvalid(f"unknown section(s): {', '.join(sorted(unknown))}")
    exp = doc.get("experiment", {})
    bad = set(exp) - EXPERIMENT_KEYS
    if bad:
        raise ConfigInvalid(f"[experiment]: unknown key(s) {', '.join(sorted(bad))}")
    functions = []
    for name, flags in doc.get("functions", {}).items():
        if not isinstance(flags, dict):
            raise ConfigInvalid(f"[functions] {name}: expected a table of flags")
        bad = set(flags) - FUNCTION_KEYS
        if bad:
            raise ConfigInvalid(f"[functions] {name}: unknown key(s) {', '.join(sorted(bad))}")
        try:
            functions.append(FunctionSpec(name, _check_type("shift", flags.get("shift", True), (bool,)),
                                          _check_type("rotate", flags.get("rotate", False), (bool,))))
        except ValueError as exc:
            raise ConfigInvalid(str(exc)) from exc
    blocks = doc.get("algorithm", [])
    if not isinstance(blocks, list):
        raise ConfigInvalid("algorithms must be given as [[algorithm]] blocks")
    algorithms = [parse_algorithm(b, k) for k, b in enumerate(blocks)]
    master_seed = _check_type("master_seed", exp.get("master_seed", 0), (int,))
    spec = ExperimentSpec(
        algorithms=algorithms,
        functions=functions,
        dim=_check_type("dimension", exp.get("dimension", 10), (int,)),
        runs=_check_type("runs", exp.get("runs", 25), (int,)),
        budget_multiplier=_check_type("budget_multiplier", exp.get("budget_multiplier", 10_000), (int,)),
        master_seed=master_seed if seed is None else seed,
        diagnostics=_check_type("diagnostics", exp.get("diagnostics", False), (bool,)),
    )
    return spec.validate()


def load_config(path, seed: int | None = None) -> ExperimentSpec:
    with open(path, "rb") as fh:
        text = fh.read().decode()
    return parse_config(text, seed)
