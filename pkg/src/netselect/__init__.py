"""Generative-model selection for networks from structural features."""

from .classifier import (AdtModel, LabeledDataset, cross_validate, evaluate, load_model,
                         predict, save_model, train_greedy_tree, train_ladtree)
from .experiments import ExperimentConfig, __version__, select
from .features import FEATURE_NAMES, FeatureVector, feature_vector
from .generators import MODELS, DatasetSpec, GeneratorParams, build_dataset, calibrate_density
from .graph import Graph, density, load_edge_list, read_edge_list, rewire_random, save_edge_list
from .graphlets import GRAPHLET_NAMES, GraphletCounts, brute_force_graphlets, count_graphlets
