from .model import (PAD, UNK, Batch, BranchInput, ModelConfig, Prediction, SiameseBiLSTM,
                    Vocab, bce_loss, bilstm, embed, forward, fuse, init_params, lstm_step,
                    sigmoid)
from .train import Adam, EpochStats, TrainConfig, TrainResult, train

__all__ = [
    "PAD", "UNK", "Adam", "Batch", "BranchInput", "EpochStats", "ModelConfig", "Prediction",
    "SiameseBiLSTM", "TrainConfig", "TrainResult", "Vocab", "bce_loss", "bilstm", "embed",
    "forward", "fuse", "init_params", "lstm_step", "sigmoid", "train",
]
