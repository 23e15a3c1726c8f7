from .stats import LatentStats, compute_latent_stats, latent_stats_from_values
from .ranking import FeatureRanking, RankEntry, pearson_r, rank_features
from .traversal import TraversalResult, traverse
from .ssim import AlterationMap, local_ssim_map, ssim_alteration
from .montage import alteration_to_rgb, gray_to_rgb, make_montage, montage_layout

__all__ = [
    "LatentStats",
    "compute_latent_stats",
    "latent_stats_from_values",
    "FeatureRanking",
    "RankEntry",
    "pearson_r",
    "rank_features",
    "TraversalResult",
    "traverse",
    "AlterationMap",
    "local_ssim_map",
    "ssim_alteration",
    "alteration_to_rgb",
    "gray_to_rgb",
    "make_montage",
    "montage_layout",
]
