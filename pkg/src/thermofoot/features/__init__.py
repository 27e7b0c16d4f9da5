from .catalog import (CATALOG_VERSION, FEATURE_NAMES, REGIONS, FeatureTable, FeatureVector,
                      FootFeatureExtractor, assemble_features, build_feature_table)
from .histogram import (CLASS_BOUNDARIES, CLASS_CENTERS, TemperatureHistogram,
                        estimate_temperature, estimated_temperature_difference,
                        hot_spot_estimator, temperature_histogram)
from .indices import NtrConfig, ReferencePattern, compute_tci, ntr_fractions, summary_stats
from .pruning import CorrelationPruner, FeatureCatalog, correlation_prune, pearson_matrix

__all__ = [
    "CATALOG_VERSION", "CLASS_BOUNDARIES", "CLASS_CENTERS", "FEATURE_NAMES", "REGIONS",
    "CorrelationPruner", "FeatureCatalog", "FeatureTable", "FeatureVector",
    "FootFeatureExtractor", "NtrConfig", "ReferencePattern", "TemperatureHistogram",
    "assemble_features", "build_feature_table", "compute_tci", "correlation_prune",
    "estimate_temperature", "estimated_temperature_difference", "hot_spot_estimator",
    "ntr_fractions", "pearson_matrix", "summary_stats", "temperature_histogram",
]
