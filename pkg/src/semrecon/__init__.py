"""semrecon: 3D RSS-map reconstruction from sparse, optimally placed samples.

Pipeline: build a scenario (scenario), ray-trace its cube-to-cube gain
dictionary (raytrace, dictionary), pick sampling cubes (sampling), recover
the sparse sources from the measurements (sbl, clustering, swomp, recovery)
and score everything over seeded sweeps (metrics, evaluation).
"""
from .clustering import ClusterReport, mmd_cluster, refine_clusters, sparsify
from .dictionary import (GainDictionary, build_dictionary, ground_truth_map,
                         load_dictionary, save_dictionary)
from .evaluation import ALGORITHMS, ExperimentSpec, MetricRecord, run_experiment
from .metrics import mse_db, rmse, sample_complexity_check, support_distortion
from .raytrace import RtParams, channel_gain, field_superposition, trace_paths
from .recovery import RecoveredMap, recover, synthesize_map
from .sampling import (MeasurementVector, SamplingPlan, greedy_mmi_plan, measure,
                       mmi_objective, mutual_information, random_plan)
from .sbl import (SblHyperparams, SblPosterior, alpha_update, beta_update,
                  gaussian_entropy, marginal_objective, posterior_update, prune,
                  sbl_solve)
from .scenario import (AxisAlignedBox, ScenarioConfig, Transmitter, cube_center,
                       cube_centers, default_scenario, euclidean_distance,
                       free_space_rss, sparse_truth, total_rss_at)
from .swomp import swomp_solve

__all__ = [
    "ALGORITHMS", "AxisAlignedBox", "ClusterReport", "ExperimentSpec",
    "GainDictionary", "MeasurementVector", "MetricRecord", "RecoveredMap",
    "RtParams", "SamplingPlan", "SblHyperparams", "SblPosterior",
    "ScenarioConfig", "Transmitter", "alpha_update", "beta_update",
    "build_dictionary", "channel_gain", "cube_center", "cube_centers",
    "default_scenario", "euclidean_distance", "field_superposition",
    "free_space_rss", "gaussian_entropy", "greedy_mmi_plan",
    "ground_truth_map", "load_dictionary", "marginal_objective", "measure",
    "mmd_cluster", "mmi_objective", "mse_db", "mutual_information",
    "posterior_update", "prune", "random_plan", "recover", "refine_clusters",
    "rmse", "run_experiment", "sample_complexity_check", "save_dictionary",
    "sbl_solve", "sparse_truth", "sparsify", "support_distortion",
    "swomp_solve", "synthesize_map", "total_rss_at", "trace_paths",
]
