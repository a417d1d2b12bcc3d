"""
Utilidades generales para el toolkit.
"""
import hashlib
import json
from typing import Any

import numpy as np


def canonical_json(data: Any) -> str:
    """Serializar a JSON canónico (claves ordenadas, sin espacios)."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=str)


def stable_hash(data: Any) -> str:
    """Calcular un hash estable (blake2b, 128 bits) del JSON canónico de ``data``."""
    return hashlib.blake2b(canonical_json(data).encode("utf-8"), digest_size=16).hexdigest()


def stable_int(*parts: Any) -> int:
    """Derivar un entero de 64 bits estable entre plataformas a partir de ``parts``."""
    digest = hashlib.blake2b(canonical_json(list(parts)).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def hash_array(values: np.ndarray) -> str:
    """Hash del contenido de un arreglo (dtype, forma y bytes)."""
    array = np.ascontiguousarray(values)
    h = hashlib.blake2b(digest_size=16)
    h.update(str(array.dtype).encode("utf-8"))
    h.update(str(array.shape).encode("utf-8"))
    h.update(array.tobytes())
    return h.hexdigest()

