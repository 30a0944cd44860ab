import struct

import numpy as np
import pytest

from ttsalign.errors import (
    EmptyAudioError,
    FeatureFileError,
    MalformedWavError,
    UnsupportedEncodingError,
)
from ttsalign.io import Waveform, load_wav, parse_wav, read_feature, write_feature, write_wav


def _wav_bytes(tag, channels, sr, bits, payload):
    block = channels * bits // 8
    fmt = struct.pack("<HHIIHH", tag, channels, sr, sr * block, block, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", len(body)) + body


class TestLoadWav:
    def test_pcm16_scaling(self):
        payload = np.array([0, 16384, -16384], dtype="<i2").tobytes()
        w = parse_wav(_wav_bytes(1, 1, 22050, 16, payload))
        np.testing.assert_array_equal(w.samples, [0.0, 0.5, -0.5])
        assert w.sample_rate == 22050

    def test_one_second_length(self, tmp_path):
        write_wav(tmp_path / "a.wav", Waveform(np.zeros(22050), 22050))
        assert len(load_wav(tmp_path / "a.wav")) == 22050

    def test_float32(self):
        payload = np.array([0.25, -1.0, 0.5], dtype="<f4").tobytes()
        w = parse_wav(_wav_bytes(3, 1, 16000, 32, payload))
        np.testing.assert_array_equal(w.samples, [0.25, -1.0, 0.5])

    def test_first_channel_of_stereo(self):
        payload = np.array([100, -5, 200, -5], dtype="<i2").tobytes()
        w = parse_wav(_wav_bytes(1, 2, 8000, 16, payload))
        np.testing.assert_allclose(w.samples, [100 / 32768, 200 / 32768])

    def test_skips_unknown_chunks(self):
        raw = _wav_bytes(1, 1, 8000, 16, np.array([1, 2], dtype="<i2").tobytes())
        extra = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
        raw = raw[:12] + extra + raw[12:]
        assert len(parse_wav(raw)) == 2

    @pytest.mark.parametrize("encoding", ["pcm16", "float32"])
    def test_write_roundtrip(self, tmp_path, encoding):
        x = np.linspace(-0.9, 0.9, 101)
        write_wav(tmp_path / "x.wav", Waveform(x, 8000), encoding=encoding)
        np.testing.assert_allclose(load_wav(tmp_path / "x.wav").samples, x, atol=1 / 32768)

    def test_truncated_header(self):
        with pytest.raises(MalformedWavError, match="malformed WAV"):
            parse_wav(b"RIFF\x10\x00\x00\x00WAV")

    def test_truncated_chunk(self):
        raw = _wav_bytes(1, 1, 8000, 16, b"\x00\x00" * 10)
        with pytest.raises(MalformedWavError):
            parse_wav(raw[:-4])

    def test_unsupported_encoding(self):
        with pytest.raises(UnsupportedEncodingError):
            parse_wav(_wav_bytes(1, 1, 8000, 8, b"\x80\x80"))

    def test_empty_audio(self):
        with pytest.raises(EmptyAudioError):
            parse_wav(_wav_bytes(1, 1, 8000, 16, b""))

    def test_error_types_are_distinct(self):
        assert len({MalformedWavError, UnsupportedEncodingError, EmptyAudioError}) == 3
        assert not issubclass(MalformedWavError, EmptyAudioError)


class TestFeatureFiles:
    @pytest.mark.parametrize("kind", ["mel", "pitch", "energy", "voicing", "matrix"])
    def test_bit_identical_roundtrip(self, tmp_path, rng, kind):
        values = rng.standard_normal((13, 5)) if kind in ("mel", "matrix") else rng.random(13)
        if kind == "voicing":
            values = values > 0.5
        stem = write_feature(tmp_path / kind, values, kind, sample_rate=22050, hop_size=256)
        back, meta = read_feature(stem.with_suffix(".bin"))
        expected = np.asarray(values, dtype=np.float32).reshape(back.shape)
        assert back.tobytes() == expected.tobytes()
        assert meta == {"rows": 13, "cols": back.shape[1], "dtype": "f32le", "kind": kind,
                        "sample_rate": 22050, "hop_size": 256}
        write_feature(tmp_path / "again", back, kind, sample_rate=22050, hop_size=256)
        assert (tmp_path / "again.bin").read_bytes() == stem.with_suffix(".bin").read_bytes()

    def test_size_mismatch(self, tmp_path):
        stem = write_feature(tmp_path / "m", np.ones((2, 2)), "matrix")
        stem.with_suffix(".bin").write_bytes(b"\x00" * 4)
        with pytest.raises(FeatureFileError):
            read_feature(stem)

    def test_missing(self, tmp_path):
        with pytest.raises(FeatureFileError):
            read_feature(tmp_path / "nope.bin")

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(FeatureFileError):
            write_feature(tmp_path / "x", np.ones(3), "spectrum")
