from .kernels import BACKEND
from .losses import (
    SIGMOID_WEIGHTED,
    SOFTMAX,
    SOFTMAX_WEIGHTED,
    STRATEGIES,
    LossBatch,
    loss_j1,
    loss_j2,
    loss_j3,
)
from .model import (
    SIGMOID_HEAD,
    SOFTMAX_HEAD,
    TaggerModel,
    build_vocabulary,
    decode,
    repair_bio,
    sentence_gradients,
    strategy_head,
)

__all__ = [
    "BACKEND", "LossBatch", "SIGMOID_HEAD", "SIGMOID_WEIGHTED", "SOFTMAX",
    "SOFTMAX_HEAD", "SOFTMAX_WEIGHTED", "STRATEGIES", "TaggerModel",
    "build_vocabulary", "decode", "loss_j1", "loss_j2", "loss_j3",
    "repair_bio", "sentence_gradients", "strategy_head",
]
