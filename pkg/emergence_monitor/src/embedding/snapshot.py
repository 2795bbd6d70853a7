import os
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

SNAPSHOT_MAGIC = "CENDSNAP1"


class ModelTag(Enum):
    """Embedding family that produced a snapshot."""

    SVD = "svd"
    SGNS = "sgns"


@dataclass(frozen=True)
class EmbeddingSnapshot:
    """
    Word vectors (V x D) for one time slice.

    ``aligned`` is set once the matrix has been rotated onto its predecessor;
    ``alignment_degenerate`` flags a fallback to the identity rotation.
    """

    matrix: np.ndarray
    time_index: int
    model_tag: ModelTag
    aligned: bool = False
    alignment_degenerate: bool = False
    singular_values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.matrix.ndim != 2:
            raise ValueError(f"Snapshot matrix must be 2-D, got shape {self.matrix.shape}")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError(f"Snapshot for slice {self.time_index} contains non-finite values")

    @property
    def shape(self):
        return self.matrix.shape

    def restamped(self, time_index: int) -> "EmbeddingSnapshot":
        """Same vectors attributed to another slice."""
        return replace(self, matrix=self.matrix.copy(), time_index=time_index)


def write_snapshot(snapshot: EmbeddingSnapshot, path: str) -> None:
    """
    Header ``CENDSNAP1 <V> <D> <model_tag> <time_index>`` then V*D little-endian float32.
    """
    V, D = snapshot.shape
    header = f"{SNAPSHOT_MAGIC} {V} {D} {snapshot.model_tag.value} {snapshot.time_index}\n"
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(np.ascontiguousarray(snapshot.matrix, dtype="<f4").tobytes())


def read_snapshot(path: str) -> EmbeddingSnapshot:
    """
    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the header or payload size is malformed
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Snapshot file {path} not found")

    with open(path, "rb") as f:
        header = f.readline().decode("ascii").split()
        payload = f.read()

    if len(header) != 5 or header[0] != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: not a snapshot file")
    V, D = int(header[1]), int(header[2])
    if len(payload) != V * D * 4:
        raise ValueError(f"{path}: expected {V * D * 4} payload bytes, got {len(payload)}")

    matrix = np.frombuffer(payload, dtype="<f4").reshape(V, D).copy()
    return EmbeddingSnapshot(
        matrix=matrix,
        time_index=int(header[4]),
        model_tag=ModelTag(header[3]),
    )
