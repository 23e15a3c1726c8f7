"""Stable content hashes for configs and model weights.

Hashes are used to stamp artifacts with the producing configuration and to
verify that a generative interpreter is never mixed with a different
classifier than the one it was trained against.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def config_hash(obj: Any) -> str:
    """SHA-256 of a JSON-serializable object with sorted keys."""
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def state_dict_hash(state_dict) -> str:
    """SHA-256 over a torch state dict, independent of insertion order.

    Tensor bytes are hashed on CPU in contiguous layout so the digest is
    stable across save/load round trips.
    """
    h = hashlib.sha256()
    for key in sorted(state_dict.keys()):
        tensor = state_dict[key]
        h.update(key.encode("utf-8"))
        t = tensor.detach().cpu().contiguous()
        h.update(str(t.dtype).encode("utf-8"))
        h.update(str(tuple(t.shape)).encode("utf-8"))
        h.update(t.numpy().tobytes())
    return h.hexdigest()
