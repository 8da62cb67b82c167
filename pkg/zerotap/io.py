"""Reading and writing CoeffSeq files and reports."""

import json
import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from zerotap.errors import InputFormatError, ZeroTapError
from zerotap.series import CoeffSeq
from zerotap.xnum import ExtArray

logger = logging.getLogger(__name__)


class ExtPartModel(BaseModel):
    """One real part ``m * 2**e``."""

    m: float
    e: int

    @field_validator("m")
    @classmethod
    def validate_m(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError(f"mantissa must be finite, got: {v}")
        return v


class ExtComplexModel(BaseModel):
    re: ExtPartModel
    im: ExtPartModel


class PointModel(BaseModel):
    re: float
    im: float


class CoeffSeqModel(BaseModel):
    """On-disk CoeffSeq: {label, n, V, degree, coeffs: [{re: {m, e}, im: {m, e}}]}."""

    label: str
    n: int
    V: float
    degree: int
    truncated: bool = False
    normalized: bool = True
    coeffs: list[ExtComplexModel] = Field(min_length=1)
    roots: list[PointModel] | None = None

    @field_validator("V")
    @classmethod
    def validate_V(cls, v: float) -> float:
        if not (np.isfinite(v) and v > 0):
            raise ValueError(f"V must be a positive real, got: {v}")
        return v

    @field_validator("degree")
    @classmethod
    def validate_degree(cls, v: int) -> int:
        if v < 0:
            raise ValueError(f"degree must be >= 0, got: {v}")
        return v

    def to_coeffseq(self) -> CoeffSeq:
        coeffs = ExtArray.from_json([c.model_dump() for c in self.coeffs])
        roots = None
        if self.roots is not None:
            roots = np.array([complex(p.re, p.im) for p in self.roots], dtype=np.complex128)
        try:
            f = CoeffSeq(
                label=self.label,
                n=self.n,
                V=self.V,
                coeffs=coeffs,
                truncated=self.truncated,
                normalized=self.normalized,
                roots=roots,
            )
        except ZeroTapError as e:
            raise InputFormatError(f"field coeffs: {e}") from e
        if f.degree != self.degree:
            raise InputFormatError(
                f"field degree: declared {self.degree} but the last nonzero coefficient has index {f.degree}"
            )
        return f


def read_json(path: Path) -> dict:
    """Parse a JSON file, reporting the line and column of syntax errors."""
    path = Path(path)
    try:
        with path.open() as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise InputFormatError(f"{path}: file not found") from e
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e


def validation_message(e: ValidationError) -> str:
    first = e.errors()[0]
    where = ".".join(str(p) for p in first["loc"]) or "<root>"
    return f"field {where}: {first['msg']}"


def load_coeffseq(path: Path) -> CoeffSeq:
    """Load and validate a CoeffSeq file."""
    data = read_json(path)
    try:
        model = CoeffSeqModel.model_validate(data)
    except ValidationError as e:
        raise InputFormatError(f"{path}: {validation_message(e)}") from e
    try:
        f = model.to_coeffseq()
    except InputFormatError as e:
        raise InputFormatError(f"{path}: {e}") from e
    logger.info(f"Loaded {f.label} from {path}: degree {f.degree}, V = {f.V}")
    return f


def _encode(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(data) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, default=_encode) + "\n"


def write_json(path: Path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data))
    logger.debug(f"Wrote {path}")
    return path


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.debug(f"Wrote {path}")
    return path
