"""Learning primitives: softmax regression, a small MLP, Gini trees and k-means."""
from .dtree import DecisionTree, train_tree
from .kmeans import KMeansResult, kmeans
from .linear import LinearClassifier, softmax, train_linear
from .mlp import FeedForwardNet, init_mlp, train_mlp
from .serial import dump_arrays, load_arrays, parse_arrays, save_arrays

__all__ = [
    "DecisionTree", "train_tree", "KMeansResult", "kmeans", "LinearClassifier", "softmax",
    "train_linear", "FeedForwardNet", "init_mlp", "train_mlp", "dump_arrays", "load_arrays",
    "parse_arrays", "save_arrays",
]
