"""Time-frequency representations and their post-processing."""

from rsl.features.cochlea import (
    CochleaConfig,
    gammatone_filter,
    cochleogram,
    erb,
    erb_number,
    erb_number_to_hz,
    gammatone_bandwidth,
    gammatone_filterbank,
    gammatone_impulse_response,
    impulse_response_duration,
)
from rsl.features.cqt import AtomTooLongError, CQTConfig, cqt, cqt_atoms
from rsl.features.post import (
    LOG_COMPRESS_REF,
    condition,
    decode_tfm,
    encode_tfm,
    load_tfm,
    log_compress_normalize,
    minmax_normalize,
    quantize_f32,
    render_viridis,
    resize_to_grid,
    save_tfm,
    viridis_image,
    viridis_rgb,
)
from rsl.features.spectral import (
    LOG_ENERGY_FLOOR,
    TF_KINDS,
    DegenerateFilterbankError,
    MelConfig,
    TFMatrix,
    mel_cepstrum,
    mel_edge_frequencies,
    mel_filterbank,
    mel_scale,
    mel_spectrogram,
    mel_to_hz,
    mfcc,
    stft,
)

REPRESENTATIONS = ("stft", "mfcc", "cqt", "cochleogram")


def extract(representation: str, w, config=None) -> TFMatrix:
    """Dispatch to one of the four classifier front ends with its default configuration."""
    from rsl.audio import FramePlan

    if representation == "stft":
        return stft(w, config or FramePlan(256, 128, "hann"))
    if representation == "mfcc":
        return mfcc(w, config or MelConfig())
    if representation == "cqt":
        return cqt(w, config or CQTConfig())
    if representation == "cochleogram":
        return cochleogram(w, config or CochleaConfig())
    raise ValueError(f"unknown representation {representation!r}; expected one of {REPRESENTATIONS}")


__all__ = [
    "AtomTooLongError",
    "CochleaConfig",
    "cochleogram",
    "condition",
    "cqt",
    "cqt_atoms",
    "CQTConfig",
    "decode_tfm",
    "DegenerateFilterbankError",
    "encode_tfm",
    "erb",
    "erb_number",
    "erb_number_to_hz",
    "extract",
    "gammatone_bandwidth",
    "gammatone_filter",
    "gammatone_filterbank",
    "gammatone_impulse_response",
    "impulse_response_duration",
    "load_tfm",
    "log_compress_normalize",
    "LOG_COMPRESS_REF",
    "LOG_ENERGY_FLOOR",
    "mel_cepstrum",
    "mel_edge_frequencies",
    "mel_filterbank",
    "mel_scale",
    "mel_spectrogram",
    "mel_to_hz",
    "MelConfig",
    "mfcc",
    "minmax_normalize",
    "quantize_f32",
    "render_viridis",
    "REPRESENTATIONS",
    "resize_to_grid",
    "save_tfm",
    "stft",
    "TF_KINDS",
    "TFMatrix",
    "viridis_image",
    "viridis_rgb",
]
