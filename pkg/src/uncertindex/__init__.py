"""News-based uncertainty index and Toda-Yamamoto Granger causality tests."""

from .corpus import (
    Article,
    DailyCount,
    aggregate_monthly,
    article_matches,
    daily_counts,
    parse_articles,
    standardize,
)
from .embedding import (
    EmbeddingTable,
    Lexicon,
    Neighbor,
    build_lexicon,
    distance_profile,
    distance_stats,
    euclidean_distance,
    nearest_neighbors,
    parse_embedding_file,
)
from .granger import GrangerReport, TYConfig, causality_matrix, toda_yamamoto, wald_exclusion
from .series import AlignedSeries, MonthlySeries, align, read_series_csv, write_series_csv

__version__ = "0.1.0"

__all__ = [
    "AlignedSeries",
    "Article",
    "DailyCount",
    "EmbeddingTable",
    "GrangerReport",
    "Lexicon",
    "MonthlySeries",
    "Neighbor",
    "TYConfig",
    "aggregate_monthly",
    "align",
    "article_matches",
    "build_lexicon",
    "causality_matrix",
    "daily_counts",
    "distance_profile",
    "distance_stats",
    "euclidean_distance",
    "nearest_neighbors",
    "parse_articles",
    "parse_embedding_file",
    "read_series_csv",
    "standardize",
    "toda_yamamoto",
    "wald_exclusion",
    "write_series_csv",
]
