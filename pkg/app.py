import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from src.core.errors import ConfigError, TurboxError
from src.core.runner import EXIT_IO, EXIT_MODEL, Runner
from src.core.settings import log_level
from src.models.run_config import COMMANDS, FORMATS, RunConfig
from src.services.file_service import FileService
from src.services.zoo_service import ZooService
from src.version import __version__

MODEL_FLAGS = (
    "p", "R", "g", "delta", "omega", "r0", "r_ratio", "p_ratio",
    "p0", "p1", "p2", "p3", "R0", "R1", "R2", "R3", "E0", "E1", "E2",
    "omega_d", "omega1", "omega2", "omega3", "T0", "T1",
)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="turbox", description="Thermodynamic uncertainty of virtual-qubit machines")
    parser.add_argument("--version", action="version", version=f"turbox {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--model", choices=ZooService.families(), default=argparse.SUPPRESS)
    parser.add_argument("--model-file", dest="model_file", default=argparse.SUPPRESS, help="inline ModelSpec JSON")
    parser.add_argument("--config", default=None, help="RunConfig JSON; explicit flags override it")
    parser.add_argument("--out", dest="output", default=argparse.SUPPRESS)
    parser.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--reservoir", default=argparse.SUPPRESS)
    parser.add_argument("--chi-max", dest="chi_max", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--chi-num", dest="chi_num", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--starts", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--grid", action="append", default=argparse.SUPPRESS, metavar="NAME=START:STOP:NUM")
    parser.add_argument("--free", action="append", default=argparse.SUPPRESS, metavar="NAME=MIN:MAX")
    scalars = parser.add_argument_group("model parameters")
    for name in MODEL_FLAGS:
        scalars.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=argparse.SUPPRESS)
    return parser.parse_args(argv)


def _split(text: str, parts: int, flag: str):
    name, _, values = text.partition("=")
    fields = values.split(":")
    if not name or len(fields) != parts:
        raise ConfigError(f"Malformed --{flag} {text!r}")
    try:
        return name, [float(v) for v in fields]
    except ValueError as e:
        raise ConfigError(f"Malformed --{flag} {text!r}: {e}") from e


def build_config(args: argparse.Namespace) -> RunConfig:
    flags = vars(args)
    data: Dict[str, Any] = FileService.load_json(flags["config"]) if flags.get("config") else {}
    data["command"] = flags["command"]
    if "model" in flags:
        data["family"] = flags["model"]
    if "model_file" in flags:
        data["model_spec"] = FileService.load_json(flags["model_file"])
    for name in ("output", "format", "seed", "reservoir", "chi_max", "chi_num"):
        if name in flags:
            data[name] = flags[name]
    params = {name: flags[name] for name in MODEL_FLAGS if name in flags}
    data["params"] = {**data.get("params", {}), **params}

    spec = data.get("spec")
    if spec is not None or any(name in flags for name in ("grid", "free", "starts")):
        spec = dict(spec or {"family": data.get("family")})
        spec["fixed"] = {**spec.get("fixed", {}), **params}
        if "seed" in flags:
            spec["seed"] = flags["seed"]
        if "starts" in flags:
            spec["starts"] = flags["starts"]
        if "grid" in flags:
            spec["grid"] = []
            for text in flags["grid"]:
                name, (start, stop, num) = _split(text, 3, "grid")
                spec["grid"].append({"name": name, "start": start, "stop": stop, "num": int(num)})
        if "free" in flags:
            spec["free"] = []
            for text in flags["free"]:
                name, (low, high) = _split(text, 2, "free")
                spec["free"].append({"name": name, "min": low, "max": high})
        data["spec"] = spec
    return RunConfig.from_dict(data)


def main(argv: Optional[List[str]] = None) -> int:
    set_logging()
    args = parse_args(argv)
    output = getattr(args, "output", None)
    try:
        config = build_config(args)
        output = config.output
        return Runner(config).run()
    except TurboxError as e:
        logging.error(f"{type(e).__name__}: {e}")
        try:
            FileService().save_json({"error": type(e).__name__, "message": str(e)}, output)
        except OSError as io_error:
            logging.error(f"Failed to write error report: {io_error}")
            return EXIT_IO
        return EXIT_MODEL
    except OSError as e:
        logging.error(f"I/O failure: {e}")
        return EXIT_IO


def set_logging():
    os.makedirs("logs", exist_ok=True)
    logging.basicConfig(
        level=log_level(),
        datefmt="%H:%M:%S",
        format="[%(levelname)s] [%(asctime)s]: %(message)s",
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler("logs/latest.log", encoding="utf-8", mode="a"),
        ],
    )


if __name__ == "__main__":
    sys.exit(main())
