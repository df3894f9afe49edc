import configparser
import dataclasses
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from oplab.spectra import SchattenIndex
from oplab.kernels.fourier import DEFAULT_DS, DEFAULT_SMAX, DEFAULT_SHARPNESS
from oplab.kernels import function_catalog
from oplab.utils import ConfigException, InvalidIndexException


COMMANDS = ("verify", "estimate", "decompose", "growth", "duhamel")

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_OUT_DIR = 3
EXIT_ALPHA = 4
EXIT_CONFIG = 5

DEFAULT_OUT_DIR = "oplab-out"

# per-command defaults; anything not listed falls back to the field default
COMMAND_DEFAULTS = {
    "verify": {"dims": [2, 4, 8, 16, 32, 64], "alpha_list": ["1", "4/3", "2", "4", "inf"],
               "trials": 8, "steps": 20},
    "estimate": {"dims": [16], "alpha_list": ["2"], "trials": 16},
    "decompose": {},
    "growth": {"dims": [8, 32, 128], "alpha_list": ["1", "2"], "trials": 64},
    "duhamel": {"dims": [4, 8, 16]},
}


def default_tolerances():
    return {"identity": 1e-9, "identity_relaxed": 1e-6, "sharp": 1e-9,
            "reconstruction": 1e-5, "integral": 1e-6, "moment": 1e-4,
            "duhamel": 1e-8, "dyadic": 1e-10, "decomposition": 1e-5,
            "commutator": 1e-10, "band": 0.05, "convergence": 1e-3}


def default_grid():
    return {"ds": DEFAULT_DS, "smax": DEFAULT_SMAX, "sharpness": DEFAULT_SHARPNESS}


@dataclass
class RunConfig:
    command: str = "verify"
    alpha_list: list = field(default_factory=lambda: ["2"])
    dims: list = field(default_factory=lambda: [8])
    trials: int = 16
    seed: int = 0
    tolerances: dict = field(default_factory=default_tolerances)
    grid: dict = field(default_factory=default_grid)
    out_dir: str = DEFAULT_OUT_DIR
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    functions: list = field(default_factory=lambda: ["abs"])
    kind: str = "lipschitz"
    timestamp: bool = True
    steps: int = 200
    n: int = 4
    r_values: list = field(default_factory=lambda: [0.5, 1., 2., 4.])
    t_steps: list = field(default_factory=lambda: [4, 8, 16, 32, 64])

    @property
    def alphas(self):
        return [SchattenIndex.parse(a) for a in self.alpha_list]

    def to_json(self):
        return dataclasses.asdict(self)

    def config_hash(self):
        """sha256 of the canonical JSON without out_dir and threads."""
        data = self.to_json()
        del data["out_dir"]
        del data["threads"]
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("ascii")).hexdigest()


def _int_list(value):
    return [int(v) for v in str(value).replace(" ", "").split(",") if v]


def _float_list(value):
    return [float(v) for v in str(value).replace(" ", "").split(",") if v]


def _str_list(value):
    return [v for v in str(value).replace(" ", "").split(",") if v]


def _bool(value):
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: {!r}".format(value))


PARSERS = {
    "alpha_list": _str_list,
    "alpha": _str_list,
    "dims": _int_list,
    "trials": int,
    "seed": int,
    "out_dir": str,
    "threads": int,
    "functions": _str_list,
    "f": _str_list,
    "kind": str,
    "timestamp": _bool,
    "steps": int,
    "n": int,
    "r_values": _float_list,
    "r": _float_list,
    "t_steps": _int_list,
    "ds": float,
    "smax": float,
    "sharpness": float,
}

ALIASES = {"alpha": "alpha_list", "f": "functions", "r": "r_values"}
GRID_KEYS = ("ds", "smax", "sharpness")


def parse_config_text(text):
    """
    key = value lines with # comments; tolerance entries are written as
    tol.<name> = value.
    """
    parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    try:
        parser.read_string("[oplab]\n" + text)
    except configparser.Error as ex:
        raise ConfigException("Cannot parse config file: {}".format(ex), EXIT_CONFIG)
    values = {}
    for key, raw in parser["oplab"].items():
        key = key.replace("-", "_")
        if key.startswith("tol."):
            try:
                values.setdefault("tolerances", {})[key[4:]] = float(raw)
            except ValueError:
                raise ConfigException("Invalid tolerance {}: {!r}".format(key, raw), EXIT_CONFIG)
            continue
        if key not in PARSERS:
            raise ConfigException("Unknown config key: {}".format(key), EXIT_CONFIG)
        try:
            values[ALIASES.get(key, key)] = PARSERS[key](raw)
        except ValueError:
            raise ConfigException("Invalid value for {}: {!r}".format(key, raw), EXIT_CONFIG)
    return values


def read_config_file(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as ex:
        raise ConfigException("Cannot read config file {}: {}".format(path, ex), EXIT_CONFIG)
    return parse_config_text(text)


def _apply(config, values):
    for key, value in values.items():
        if key in GRID_KEYS:
            config.grid[key] = value
        elif key == "tolerances":
            config.tolerances.update(value)
        else:
            setattr(config, key, value)


def build_config(command, file_values=None, flag_values=None, environ=None):
    """
    Defaults, then OUT_DIR from the environment, then the config file, then
    command-line flags; the result is validated.
    """
    environ = os.environ if environ is None else environ
    config = RunConfig(command=command)
    _apply(config, COMMAND_DEFAULTS.get(command, {}))
    if environ.get("OUT_DIR"):
        config.out_dir = environ["OUT_DIR"]
    _apply(config, file_values or {})
    _apply(config, {ALIASES.get(k, k): v for k, v in (flag_values or {}).items() if v is not None})
    validate(config)
    return config


def validate(config):
    if config.command not in COMMANDS:
        raise ConfigException("Unknown command {!r}".format(config.command), EXIT_USAGE)
    try:
        alphas = config.alphas
    except InvalidIndexException as ex:
        raise ConfigException(ex.message(), EXIT_ALPHA)
    if not alphas:
        raise ConfigException("At least one alpha is required", EXIT_ALPHA)
    if config.trials < 1:
        raise ConfigException("trials must be >= 1", EXIT_CONFIG)
    if not config.dims or any(d < 1 for d in config.dims):
        raise ConfigException("dims must all be >= 1", EXIT_CONFIG)
    if config.steps < 0 or config.n < 1 or config.threads < 1:
        raise ConfigException("steps must be >= 0, n and threads >= 1", EXIT_CONFIG)
    if config.kind not in ("lipschitz", "multiplier"):
        raise ConfigException("kind must be lipschitz or multiplier", EXIT_CONFIG)
    unknown = [name for name in config.functions if name not in function_catalog.names()]
    if unknown:
        raise ConfigException("Unknown functions: {}; known: {}".format(
            ", ".join(unknown), ", ".join(function_catalog.sorted())), EXIT_CONFIG)
    if any(t < 1 for t in config.t_steps):
        raise ConfigException("t_steps must all be >= 1", EXIT_CONFIG)
    if not (config.grid["ds"] > 0 and config.grid["smax"] > 0 and config.grid["sharpness"] > 0):
        raise ConfigException("grid ds, smax and sharpness must be positive", EXIT_CONFIG)
    check_out_dir(config.out_dir)


def check_out_dir(out_dir):
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        with tempfile.TemporaryFile(dir=path):
            pass
    except OSError as ex:
        raise ConfigException("Output directory {} is not writable: {}".format(out_dir, ex),
                              EXIT_OUT_DIR)
