import logging
from typing import Any, Dict, Type, TypeVar

import yaml
from pydantic import BaseModel, ValidationError

from lffusion.errors import ConfigError
from lffusion.formats.atomic import PathLike

logger = logging.getLogger(__name__)

Model = TypeVar("Model", bound=BaseModel)


def load_yaml(path: PathLike) -> Dict[str, Any]:
    """Parse a YAML mapping; an empty document is an empty mapping."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"Cannot read {path}: {exc.strerror or exc}") from exc
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark is not None else None
        raise ConfigError(f"{path}: YAML parse error at line {line}: {exc.problem}", line=line) from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level, got {type(data).__name__}")
    return data


def validate_document(model: Type[Model], data: Dict[str, Any], source: str) -> Model:
    """Validate ``data`` against ``model`` and turn the first problem into a ConfigError naming the key."""
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or None
        if first["type"] == "extra_forbidden":
            message = f"{source}: unknown key '{key}'"
        elif key is None:
            message = f"{source}: {first['msg']}"
        else:
            message = f"{source}: invalid value for '{key}': {first['msg']}"
        logger.error(message)
        raise ConfigError(message, key=key) from exc
