"""Edge-universal graphs and size-universal circuit templates."""
from .graphs import (EU_SIZE_CONSTANT, EdgeEmbedding, EmbeddingError, EUGraph, Gamma2Graph, GraphError,
                     WireLabels, build_edge_universal, check_embedding, circuit_to_gamma2,
                     embed, random_gamma2, split_gamma2)
from .template import (DEFAULT_PALETTE, SIZE_CONSTANT, PaletteError, SizeUniversalTemplate,
                       build_size_universal, controlled_swap, decompose_for_size_universality,
                       encode_size, encoding_length)
