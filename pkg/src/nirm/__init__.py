"""Learned node ranking for network dismantling, with classical baselines."""

from nirm.centrality import RANKERS, corehd_order, ranking
from nirm.dismantle import METHODS, STRATEGIES, DismantleTrace, dismantle
from nirm.generators import GeneratorSpec, dataset_specs, default_spec, generate
from nirm.graph import Graph, gcc_size, parse_edge_list, read_edge_list, write_edge_list
from nirm.kernels import BACKEND
from nirm.model import ModelConfig, ModelParameters, count_parameters, init_parameters, nirm_rank
from nirm.oracle import OracleConfig, TrainingSample, find_all_min_tas, label_sample
from nirm.train import TrainConfig, train

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DismantleTrace", "GeneratorSpec", "Graph", "METHODS", "ModelConfig",
    "ModelParameters", "OracleConfig", "RANKERS", "STRATEGIES", "TrainConfig", "TrainingSample",
    "corehd_order", "count_parameters", "dataset_specs", "default_spec", "dismantle",
    "find_all_min_tas", "gcc_size", "generate", "init_parameters", "label_sample", "nirm_rank",
    "parse_edge_list", "ranking", "read_edge_list", "train", "write_edge_list",
]
