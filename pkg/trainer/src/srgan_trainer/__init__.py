from srgan_trainer.formats import (
    FormatError,
    ImageBlock,
    Sample,
    load_image,
    load_sample,
    load_split,
    save_image,
)
from srgan_trainer.losses import bce, loss_adv_d, loss_adv_g, loss_p2p, loss_perc
from srgan_trainer.model import (
    Discriminator,
    Generator,
    GeneratorSpec,
    dense_param_count,
    separable_param_count,
)
from srgan_trainer.train import (
    TrainerConfig,
    TrainingDiverged,
    TrainResult,
    evaluate,
    infer,
    load_checkpoint,
    save_checkpoint,
    train,
)

__all__ = [
    "FormatError", "ImageBlock", "Sample", "load_image", "load_sample",
    "load_split", "save_image",
    "bce", "loss_adv_d", "loss_adv_g", "loss_p2p", "loss_perc",
    "Discriminator", "Generator", "GeneratorSpec",
    "dense_param_count", "separable_param_count",
    "TrainerConfig", "TrainingDiverged", "TrainResult", "evaluate", "infer",
    "load_checkpoint", "save_checkpoint", "train",
]
