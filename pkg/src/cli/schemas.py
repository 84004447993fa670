"""JSON payloads accepted by the command line"""

from fractions import Fraction
from pathlib import Path
from typing import List, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, model_validator

from src.algebra.exact_linalg import RatMatrix, to_rational
from src.algebra.quaternion_core import QuatMatrix
from src.services.nilpotent_classifier import JordanData
from src.utils.exceptions import ParseError

Entry = Union[int, str]

Model = TypeVar("Model", bound=BaseModel)

_VECTOR = TypeAdapter(List[Entry])


class MatrixPayload(BaseModel):
    """{"rows": r, "cols": c, "entries": [[...], ...]} with integers or "p/q" strings"""

    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    entries: List[List[Entry]]

    @model_validator(mode="after")
    def check_shape(self) -> "MatrixPayload":
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            if self.rows and self.cols:
                raise ValueError("declared shape does not match entries")
        return self

    def to_matrix(self) -> RatMatrix:
        return RatMatrix.from_json(self.model_dump())


class JordanDataPayload(BaseModel):
    """{"parts": [[n_i, q_i], ...], "d": d}"""

    parts: List[Tuple[int, int]]
    d: int = Field(ge=0)

    def to_jordan_data(self) -> JordanData:
        return JordanData(tuple(self.parts), self.d)


class QuaternionMatrixPayload(BaseModel):
    """Square nested array of ["x", "y", "z", "w"] quaternions"""

    entries: List[List[List[Entry]]]

    def to_quat_matrix(self) -> QuatMatrix:
        return QuatMatrix.from_json(self.entries)


def read_source(source: str) -> str:
    """Inline JSON text, or the contents of a file when source names one"""
    stripped = source.strip()
    if stripped.startswith(("{", "[")):
        return stripped
    path = Path(stripped)
    if not path.is_file():
        raise ParseError(f"no such file: {source}", position=None)
    return path.read_text()


def load_payload(model: Type[Model], source: str) -> Model:
    try:
        return model.model_validate_json(read_source(source))
    except ValidationError as e:
        first = e.errors()[0]
        raise ParseError(f"invalid {model.__name__}: {first['msg']}", position=None, location=first["loc"]) from e


def load_matrix(source: str) -> RatMatrix:
    return load_payload(MatrixPayload, source).to_matrix()


def load_vector(source: str) -> List[Entry]:
    """JSON array or comma-separated list"""
    text = source.strip()
    if text.startswith("["):
        try:
            return _VECTOR.validate_json(text)
        except ValidationError as e:
            raise ParseError(f"invalid vector: {e.errors()[0]['msg']}", position=None) from e
    return [item.strip() for item in text.split(",") if item.strip()]


def load_quaternion_matrix(source: str) -> QuatMatrix:
    text = read_source(source)
    if text.lstrip().startswith("["):
        text = f'{{"entries": {text}}}'
    return load_payload(QuaternionMatrixPayload, text).to_quat_matrix()


def parse_real(text: str) -> Union[Fraction, float]:
    """Exact rational when possible, otherwise a float"""
    value = text.strip()
    if any(ch in value.lower() for ch in ".e"):
        try:
            return float(value)
        except ValueError as e:
            raise ParseError(f"not a real number: {text!r}", position=0) from e
    return to_rational(value)
