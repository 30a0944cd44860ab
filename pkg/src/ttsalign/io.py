"""WAV reading/writing and the raw feature file format.

Feature files come in pairs: ``<name>.bin`` holds row-major little-endian
float32 values and ``<name>.json`` is a sidecar describing them::

    {"rows": 87, "cols": 80, "dtype": "f32le", "kind": "mel",
     "sample_rate": 22050, "hop_size": 256}
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import (
    EmptyAudioError,
    FeatureFileError,
    MalformedWavError,
    UnsupportedEncodingError,
)

PathLike = Union[str, Path]

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

FEATURE_KINDS = ("mel", "pitch", "energy", "voicing", "matrix")


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64).reshape(-1))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


def _iter_chunks(data: bytes, start: int):
    pos = start
    while pos + 8 <= len(data):
        chunk_id, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise MalformedWavError(f"malformed WAV: chunk {chunk_id!r} truncated")
        yield chunk_id, body
        pos += 8 + size + (size & 1)


def parse_wav(data: bytes) -> Waveform:
    """Decode an in-memory RIFF/WAVE file (PCM16 or float32) to a Waveform."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWavError("malformed WAV: missing RIFF/WAVE header")

    fmt = None
    payload = None
    for chunk_id, body in _iter_chunks(data, 12):
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise MalformedWavError("malformed WAV: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == WAVE_FORMAT_EXTENSIBLE:
                if len(body) < 26:
                    raise MalformedWavError("malformed WAV: extensible fmt chunk too short")
                # first two bytes of the SubFormat GUID carry the real format tag
                (sub_tag,) = struct.unpack_from("<H", body, 24)
                fmt = (sub_tag,) + fmt[1:]
        elif chunk_id == b"data":
            payload = body
            break
    if fmt is None:
        raise MalformedWavError("malformed WAV: no fmt chunk")
    if payload is None:
        raise MalformedWavError("malformed WAV: no data chunk")

    tag, channels, sample_rate, _, block_align, bits = fmt
    if channels < 1 or sample_rate < 1:
        raise MalformedWavError("malformed WAV: invalid channel count or sample rate")
    if tag == WAVE_FORMAT_PCM and bits == 16:
        dtype, scale = np.dtype("<i2"), 32768.0
    elif tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype, scale = np.dtype("<f4"), 1.0
    else:
        raise UnsupportedEncodingError(
            f"unsupported WAV encoding: format tag {tag:#06x}, {bits} bits per sample"
        )

    frame_bytes = channels * dtype.itemsize
    n_frames = len(payload) // frame_bytes
    if n_frames == 0:
        raise EmptyAudioError("WAV file contains no audio frames")
    raw = np.frombuffer(payload[: n_frames * frame_bytes], dtype=dtype).reshape(n_frames, channels)
    samples = raw[:, 0].astype(np.float64) / scale
    if tag == WAVE_FORMAT_IEEE_FLOAT:
        samples = np.clip(samples, -1.0, 1.0)
    return Waveform(samples, sample_rate)


def load_wav(path: PathLike) -> Waveform:
    return parse_wav(Path(path).read_bytes())


def write_wav(path: PathLike, wave: Waveform, encoding: str = "pcm16") -> None:
    """Write a mono WAV file. ``encoding`` is ``"pcm16"`` or ``"float32"``."""
    x = np.clip(wave.samples, -1.0, 1.0)
    if encoding == "pcm16":
        tag, bits = WAVE_FORMAT_PCM, 16
        payload = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2").tobytes()
    elif encoding == "float32":
        tag, bits = WAVE_FORMAT_IEEE_FLOAT, 32
        payload = x.astype("<f4").tobytes()
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    block_align = bits // 8
    fmt = struct.pack(
        "<HHIIHH", tag, 1, wave.sample_rate, wave.sample_rate * block_align, block_align, bits
    )
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) & 1:
        body += b"\x00"
    Path(path).write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)


def _stem(path: PathLike) -> Path:
    p = Path(path)
    return p.with_suffix("") if p.suffix in (".bin", ".json") else p


def write_feature(
    path: PathLike,
    values: np.ndarray,
    kind: str,
    sample_rate: Optional[int] = None,
    hop_size: Optional[int] = None,
) -> Path:
    """Write ``values`` as ``<stem>.bin`` + ``<stem>.json``; returns the stem.

    1-D arrays are stored as a single column. Boolean arrays become 0.0/1.0.
    """
    if kind not in FEATURE_KINDS:
        raise FeatureFileError(f"unknown feature kind {kind!r}")
    arr = np.asarray(values)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise FeatureFileError(f"feature values must be 1-D or 2-D, got shape {arr.shape}")
    arr = np.ascontiguousarray(arr.astype("<f4"))
    stem = _stem(path)
    stem.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "dtype": "f32le",
        "kind": kind,
        "sample_rate": sample_rate,
        "hop_size": hop_size,
    }
    stem.with_suffix(".bin").write_bytes(arr.tobytes())
    stem.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")
    return stem


def read_feature(path: PathLike) -> tuple[np.ndarray, dict]:
    """Read a feature file pair given either file or the common stem.

    Returns a float32 ``rows x cols`` array and the sidecar metadata.
    """
    stem = _stem(path)
    try:
        meta = json.loads(stem.with_suffix(".json").read_text())
        raw = stem.with_suffix(".bin").read_bytes()
    except FileNotFoundError as exc:
        raise FeatureFileError(f"missing feature file: {exc.filename}") from exc
    except json.JSONDecodeError as exc:
        raise FeatureFileError(f"invalid sidecar JSON for {stem}: {exc}") from exc

    for key in ("rows", "cols", "dtype", "kind"):
        if key not in meta:
            raise FeatureFileError(f"sidecar for {stem} lacks field {key!r}")
    if meta["dtype"] != "f32le":
        raise FeatureFileError(f"unsupported dtype {meta['dtype']!r}")
    rows, cols = int(meta["rows"]), int(meta["cols"])
    if len(raw) != rows * cols * 4:
        raise FeatureFileError(
            f"{stem}.bin holds {len(raw)} bytes, sidecar implies {rows * cols * 4}"
        )
    return np.frombuffer(raw, dtype="<f4").reshape(rows, cols).copy(), meta
