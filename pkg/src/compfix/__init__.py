"""Learning-based repair of single-line C compilation errors."""
from .bundle import ModelBundle, train_bundle
from .corpus import ClassCatalog, RepairClass, TrainPair, load_corpus, mine_corpus, mine_pair
from .engine import repair_program, suggest
from .evaluate import EvalReport, evaluate

__version__ = "0.1.0"

__all__ = ["ModelBundle", "train_bundle", "ClassCatalog", "RepairClass", "TrainPair", "load_corpus",
           "mine_corpus", "mine_pair", "repair_program", "suggest", "EvalReport", "evaluate"]
