import json
from functools import lru_cache
from importlib import resources
from typing import Any, Dict

import jsonschema

from torsionlab.constants import SCHEMA_FILES


class SchemaError(Exception):
    pass


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    """Loads one of the packaged JSON schemas.

    Args:
        name (str): Schema name, e.g. "chain-complex".

    Returns:
        Dict[str, Any]: The parsed schema.
    """
    try:
        file_name = SCHEMA_FILES[name]
    except KeyError as e:
        raise SchemaError(f"Unknown schema {name!r}") from e
    with resources.files("torsionlab.schemas").joinpath(file_name).open() as stream:
        schema: Dict[str, Any] = json.load(stream)
    return schema


def validate_document(name: str, document: Any) -> None:
    """Raises SchemaError if ``document`` does not match schema ``name``."""
    schema = load_schema(name)
    try:
        jsonschema.validate(instance=document, schema=schema)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"{name} at {path}: {e.message}") from e
