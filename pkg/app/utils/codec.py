"""
JSON reading and writing with stable bytes.

Output is canonical (sorted keys, fixed indentation, trailing newline) so a
rerun with the same inputs produces byte-identical files.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from app.exceptions import InstanceParseError

M = TypeVar("M", bound=BaseModel)


def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(e.msg, f"{source}:{e.lineno}:{e.colno}") from e


def read_json(path: Path) -> tuple[Any, str]:
    """Parsed document plus the SHA-256 digest of its bytes."""
    try:
        raw = Path(path).read_bytes()
        text = raw.decode("utf-8")
    except OSError as e:
        raise InstanceParseError(str(e), str(path)) from e
    except UnicodeDecodeError as e:
        raise InstanceParseError(f"not UTF-8 text: byte {raw[e.start]:#04x} at offset {e.start}", str(path)) from e
    return loads(text, str(path)), digest(raw)


def parse_model(model: type[M], data: Any, source: str = "<input>") -> M:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"])
        raise InstanceParseError(first["msg"], f"{source}: field {field}" if field else source) from e


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: Path, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def digest_json(obj: Any) -> str:
    return digest(dumps(obj).encode("utf-8"))
