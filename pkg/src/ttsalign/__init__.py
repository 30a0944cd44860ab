"""Alignment learning, duration modelling and loss mathematics for joint E2E TTS training."""

__version__ = "0.1.0"

from .binarize import HardAlignment, alignment_loss, binarization_loss, mas
from .features import (
    FrameVariance,
    MelSpectrogram,
    StftConfig,
    extract_energy,
    extract_f0,
    mel_spectrogram,
)
from .forward_sum import ForwardSumResult, enumerate_alignments, forward_sum
from .gan_losses import (
    DiscriminatorOutputs,
    LossWeights,
    feature_matching_loss,
    generator_loss,
    lsgan_discriminator_loss,
    lsgan_generator_loss,
    mel_l1_loss,
    total_loss,
)
from .io import Waveform, load_wav, read_feature, write_feature, write_wav
from .metrics import MetricReport, log_f0_rmse, mcd, mel_cepstra
from .soft_alignment import (
    BetaBinomialPrior,
    SoftAlignment,
    beta_binomial_prior,
    distance_matrix,
    soft_align,
)
from .variance import (
    TokenVariance,
    UpsampleConfig,
    gaussian_upsample,
    token_average,
    variance_loss,
)
