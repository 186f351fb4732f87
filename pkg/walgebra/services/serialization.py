"""Canonical JSON, content hashes and the on-disk stage cache."""
import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, List, Optional, Sequence

from pydantic import ValidationError

from walgebra.exceptions import CacheError
from walgebra.models.schemas import StageArtifact
from walgebra.services.algebraic import AlgebraicFn
from walgebra.services.symcore import Poly, format_rat

logger = logging.getLogger(__name__)


def canonical_json(data: Any) -> str:
    """Key-sorted, whitespace-free JSON; equal values give equal text."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def content_hash(data: Any) -> str:
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def stage_path(cache_dir: Path, orbit_key: str, stage: str) -> Path:
    return Path(cache_dir) / orbit_key / f"{stage}.json"


def write_artifact(path: Path, artifact: StageArtifact) -> Path:
    """Write an artifact atomically: temporary file in the target directory, then ``os.replace``.

    Args:
        path: Destination file
        artifact: Stage output to store
    """
    path = Path(path)
    os.makedirs(path.parent, exist_ok=True)
    text = json.dumps(artifact.model_dump(), sort_keys=True, indent=1)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.stem}-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("Wrote %s", path)
    return path


def load_artifact(path: Path) -> StageArtifact:
    """Decode an artifact file.

    Raises:
        CacheError: if the file is missing, not JSON or not a StageArtifact
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        return StageArtifact.model_validate(data)
    except FileNotFoundError:
        raise CacheError(f"no artifact at {path}")
    except (json.JSONDecodeError, UnicodeDecodeError, ValidationError) as exc:
        raise CacheError(f"cannot decode {path}: {exc}")


def read_artifact(path: Path, input_hash: str) -> Optional[StageArtifact]:
    """Cached artifact for ``input_hash``, or None when it must be recomputed."""
    path = Path(path)
    if not path.exists():
        return None
    try:
        artifact = load_artifact(path)
    except CacheError as exc:
        logger.warning("Ignoring corrupt cache entry: %s", exc)
        return None
    if artifact.input_hash != input_hash:
        logger.warning("Cache entry %s is stale (input hash mismatch)", path)
        return None
    return artifact


# value encoders for stage payloads

def poly_text(p: Poly) -> str:
    return str(p.as_expr()) if p else "0"


def fn_text(a: AlgebraicFn) -> str:
    if a.den == a.ring.full.one:
        return poly_text(a.num)
    return f"({poly_text(a.num)})/({poly_text(a.den)})"


def rat_list(values: Sequence) -> List[str]:
    return [format_rat(v) for v in values]
