from .checkpoint import run_inspect
from .compare import run_compare
from .evaluate import run_eval
from .train import run_train

__all__ = ["run_compare", "run_eval", "run_inspect", "run_train"]
