"""PSO based K-means clustering with baselines, validity indices and ANOVA."""
from .dataset import Dataset, Metric, distance, load_csv, normalize_minmax
from .density_hier import DbscanConfig, HierConfig, dbscan_run, hierarchical_run
from .kmeans import KMeansConfig, kmeans_run, sse_fitness
from .partition import NOISE, Partition, assign_nearest, compute_centroids, contingency
from .stats import anova_from_sums, anova_oneway, boxplot_stats, f_cdf
from .swarm import PsoConfig, clerc_constriction, pso_kmeans_run
from .validity import IndexReport, accuracy, davies_bouldin, dunn, evaluate, mirkin, rand_index, silhouette

__version__ = "0.1.0"

__all__ = [
    "NOISE",
    "Dataset",
    "DbscanConfig",
    "HierConfig",
    "IndexReport",
    "KMeansConfig",
    "Metric",
    "Partition",
    "PsoConfig",
    "accuracy",
    "anova_from_sums",
    "anova_oneway",
    "assign_nearest",
    "boxplot_stats",
    "clerc_constriction",
    "compute_centroids",
    "contingency",
    "davies_bouldin",
    "dbscan_run",
    "distance",
    "dunn",
    "evaluate",
    "f_cdf",
    "hierarchical_run",
    "kmeans_run",
    "load_csv",
    "mirkin",
    "normalize_minmax",
    "pso_kmeans_run",
    "rand_index",
    "silhouette",
    "sse_fitness",
]
