"""Run manifests: the resolved configuration of one CLI run and its re-execution."""

import hashlib
import logging
import tempfile
from dataclasses import dataclass
from pathlib import Path

import click
from pydantic import BaseModel, Field, ValidationError

from zerotap import __version__
from zerotap.config import MANIFEST_NAME, SCHEMA_VERSION
from zerotap.errors import InputFormatError
from zerotap.io import read_json, validation_message, write_json

logger = logging.getLogger(__name__)


class RunConfig(BaseModel):
    """Everything needed to reproduce a run; written next to its outputs."""

    schema_version: int = SCHEMA_VERSION
    version: str = __version__
    command: str
    global_arguments: list[str] = Field(default_factory=list)
    arguments: list[str] = Field(default_factory=list)
    family: dict | None = None
    grid: dict | None = None
    residual_tol_log: float
    seed: int
    out: str
    settings: dict
    inputs: dict[str, str] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list)

    def argv(self, out: Path) -> list[str]:
        return ["--out", str(out), *self.global_arguments, self.command, *self.arguments]


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _token(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def command_arguments(command: click.Command, values: dict, skip: tuple[str, ...] = ()) -> list[str]:
    """Rebuild an argument vector from parsed click parameters.

    Parameters left at None are omitted so defaults resolve the same way on replay.
    """
    args: list[str] = []
    for param in command.params:
        value = values.get(param.name)
        if param.name in skip or value is None:
            continue
        if isinstance(param, click.Argument):
            args.append(_token(value))
        elif param.is_flag:
            if value:
                args.append(param.opts[0])
        elif param.multiple:
            for item in value:
                args += [param.opts[0], _token(item)]
        else:
            args += [param.opts[0], _token(value)]
    return args


def write_manifest(out: Path, config: RunConfig) -> Path:
    path = write_json(Path(out) / MANIFEST_NAME, config.model_dump(mode="json"))
    logger.info(f"Manifest written to {path}")
    return path


def load_manifest(path: Path) -> RunConfig:
    data = read_json(path)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise InputFormatError(f"{path}: {validation_message(e)}") from e


@dataclass(frozen=True)
class FileCheck:
    name: str
    status: str  # identical | differs | missing | changed-input

    @property
    def ok(self) -> bool:
        return self.status == "identical"


def rerun(config: RunConfig, group: click.Group, out: Path) -> int:
    """Invoke ``group`` with the manifest's arguments, writing into ``out``."""
    try:
        result = group.main(args=config.argv(out), prog_name="zerotap", standalone_mode=False)
    except SystemExit as e:
        return int(e.code or 0)
    except click.ClickException as e:
        logger.error(f"Replay rejected its arguments: {e.format_message()}")
        return e.exit_code
    return int(result or 0)


def verify(manifest_path: Path, group: click.Group) -> list[FileCheck]:
    """Re-run a manifest into a temporary directory and compare every output byte for byte."""
    manifest_path = Path(manifest_path)
    config = load_manifest(manifest_path)
    original = manifest_path.parent

    checks: list[FileCheck] = []
    for name, digest in sorted(config.inputs.items()):
        if not Path(name).exists() or sha256_of(Path(name)) != digest:
            checks.append(FileCheck(name, "changed-input"))
    if checks:
        return checks

    with tempfile.TemporaryDirectory(prefix="zerotap-verify-") as tmp:
        code = rerun(config, group, Path(tmp))
        if code != 0:
            logger.warning(f"Replay of {config.command} exited with {code}")
        for name in config.outputs:
            ours, theirs = original / name, Path(tmp) / name
            if not ours.exists() or not theirs.exists():
                checks.append(FileCheck(name, "missing"))
            elif ours.read_bytes() == theirs.read_bytes():
                checks.append(FileCheck(name, "identical"))
            else:
                checks.append(FileCheck(name, "differs"))
    return checks
