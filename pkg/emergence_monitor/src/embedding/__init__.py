from .snapshot import EmbeddingSnapshot, ModelTag
from .base_embedder import BaseEmbedder
from .svd_embedder import SvdEmbedder
from .sgns_embedder import SgnsEmbedder

__all__ = [
    'EmbeddingSnapshot',
    'ModelTag',
    'BaseEmbedder',
    'SvdEmbedder',
    'SgnsEmbedder',
]
