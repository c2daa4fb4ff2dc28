"""BERT-backed model service for the event extraction scoring protocol."""

from .app import create_app
from .checkpoint import LoadedModel, load_checkpoint, write_task_file
from .labels import CANDIDATE_LABELS, ROLE_LABELS, TAG_LABELS, TASK_LABELS, TASKS
from .train import TrainingConfig, TrainingDataError, TrainResult, train

__version__ = "0.1.0"

__all__ = [
    "CANDIDATE_LABELS",
    "LoadedModel",
    "ROLE_LABELS",
    "TAG_LABELS",
    "TASK_LABELS",
    "TASKS",
    "TrainResult",
    "TrainingConfig",
    "TrainingDataError",
    "create_app",
    "load_checkpoint",
    "train",
    "write_task_file",
]
