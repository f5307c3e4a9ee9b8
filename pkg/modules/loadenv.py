import os
import logging
from dataclasses import dataclass

from dotenv import load_dotenv

TRUTHY = {"1", "true", "yes", "on"}
DEFAULT_MAX_GROUP_ORDER = 1_000_000
DEFAULT_SCAN_CHUNK = 262_144
FORMATS = ("json", "dot", "summary")
HEXAGON_MODES = ("absolute", "moving")


class ConfigError(ValueError):
    pass


def load_env(dotenv_path=None):
    """
    Load environment variables from a .env file if one exists.
    Returns the TRIALITY_* values found afterwards.
    """
    # Default to project root .env (one level up from modules/)
    if dotenv_path is None:
        dotenv_path = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), ".env")

    logging.info(f"Checking for .env at: {dotenv_path}")
    if os.path.isfile(dotenv_path):
        load_dotenv(dotenv_path=dotenv_path, override=False)
        logging.info(f".env file loaded successfully from: {dotenv_path}")
    else:
        logging.info(f"No .env file at {dotenv_path}, using process environment")

    return {k: v for k, v in os.environ.items() if k.startswith("TRIALITY_")}


def _env_int(name, default, env):
    raw = env.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.replace("_", ""))
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value <= 0:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class RunConfig:
    command: str
    q: int
    mode: str = "moving"
    triple: object = "all"
    output_format: str = "summary"
    output: object = None
    allow_large: bool = False
    max_group_order: int = DEFAULT_MAX_GROUP_ORDER
    scan_chunk: int = DEFAULT_SCAN_CHUNK

    def validate(self):
        if self.command not in ("hexagon", "class3"):
            raise ConfigError(f"unknown command: {self.command}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"unknown format: {self.output_format}")
        if self.command == "hexagon" and self.mode not in HEXAGON_MODES:
            raise ConfigError(f"unknown mode: {self.mode}")
        if self.triple != "all" and (not isinstance(self.triple, int) or self.triple < 0):
            raise ConfigError(f"triple must be 'all' or a non-negative index, got {self.triple!r}")
        return self


def build_config(args, env=None):
    """RunConfig from parsed argparse args plus TRIALITY_* environment knobs."""
    env = os.environ if env is None else env
    triple = getattr(args, "triple", "all")
    if triple is None:
        triple = "all"
    if triple != "all":
        try:
            triple = int(triple)
        except (TypeError, ValueError):
            raise ConfigError(f"triple must be 'all' or an index, got {triple!r}")

    allow_large = bool(getattr(args, "large", False)) or env.get("TRIALITY_ALLOW_LARGE", "").strip().lower() in TRUTHY
    max_order = _env_int("TRIALITY_MAX_GROUP_ORDER", DEFAULT_MAX_GROUP_ORDER, env)

    return RunConfig(
        command=args.command,
        q=args.q,
        mode=getattr(args, "mode", "moving"),
        triple=triple,
        output_format=args.format,
        output=getattr(args, "output", None),
        allow_large=allow_large,
        max_group_order=max_order,
        scan_chunk=_env_int("TRIALITY_SCAN_CHUNK", DEFAULT_SCAN_CHUNK, env),
    ).validate()
