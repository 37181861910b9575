"""N-most and Top-K closed itemset mining on vertical bit-vectors with projected bit regions."""

from .dataset import (ParseError, TransactionDataset, generate_quest, generate_synthetic,
                      item_supports, load_fimi, parse_fimi, remap_for_density, serialize_fimi)
from .nmost import NMostConfig, NMostResult, mine_nmost
from .search import Itemset
from .topk import TopKConfig, TopKResult, mine_topk

__all__ = [
    "Itemset", "NMostConfig", "NMostResult", "ParseError", "TopKConfig", "TopKResult",
    "TransactionDataset", "generate_quest", "generate_synthetic", "item_supports",
    "load_fimi", "mine_nmost", "mine_topk", "parse_fimi", "remap_for_density",
    "serialize_fimi",
]
