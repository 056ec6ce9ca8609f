from __future__ import annotations

import hashlib
import json

import numpy as np
import pytest

from affectfuse.audio import compute_snr_db, load_wav
from affectfuse.core import dominant_emotion
from affectfuse.corpus import generate_synthetic_corpus
from affectfuse.text import load_lemma_dictionary, load_lexicon, text_emotion


def read_manifest(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").strip().splitlines()]


def test_same_seed_is_byte_identical(tmp_path):
    m1 = generate_synthetic_corpus(str(tmp_path / "a"), seed=99, size=18)
    m2 = generate_synthetic_corpus(str(tmp_path / "b"), seed=99, size=18)
    assert m1.read_bytes() == m2.read_bytes()
    w1 = sorted((tmp_path / "a" / "wav").iterdir())
    w2 = sorted((tmp_path / "b" / "wav").iterdir())
    for f1, f2 in zip(w1, w2):
        assert hashlib.sha256(f1.read_bytes()).digest() == hashlib.sha256(f2.read_bytes()).digest()


def test_different_seed_differs(tmp_path):
    m1 = generate_synthetic_corpus(str(tmp_path / "a"), seed=1, size=12)
    m2 = generate_synthetic_corpus(str(tmp_path / "b"), seed=2, size=12)
    assert m1.read_bytes() != m2.read_bytes()


def test_clean_rows_decode_to_gold_label(tmp_path):
    manifest = generate_synthetic_corpus(str(tmp_path), seed=31, size=60)
    lexicon = load_lexicon()
    lemmas = load_lemma_dictionary()
    rows = read_manifest(manifest)
    # reproduce the generator's corruption draw is not possible from the
    # manifest alone, so check the decodable property on high-confidence rows
    # and assert the construction guarantee on every label at least once
    checked = 0
    for row in rows:
        result = text_emotion(row["transcript"], lexicon, lemmas)
        # conf = 0.98 - 0.5 * corruption - 0.75 * u^2 and corrupted rows have
        # corruption >= 0.15, so conf >= 0.91 guarantees corruption == 0
        if row["asr_confidence"] >= 0.91:
            assert dominant_emotion(result.probs)[0] == row["label"]
            checked += 1
    assert checked >= 5


def test_requested_snr_matches_measured(tmp_path):
    manifest = generate_synthetic_corpus(str(tmp_path), seed=7, size=12, noise_levels_db=[20.0])
    for row in read_manifest(manifest):
        buf = load_wav(str(tmp_path / row["audio"]))
        measured = compute_snr_db(buf, block_size=512)
        assert measured == pytest.approx(20.0, abs=3.0), row["id"]


def test_confidence_negatively_correlated_with_corruption(tmp_path):
    # corruption is latent; use the documented proxy: high-conf rows must be
    # clean while the lowest-conf band is dominated by corrupted rows. The
    # construction conf = 0.98 - 0.5*corruption - 0.75*u^2 bounds clean rows
    # to conf >= 0.23, so anything below is necessarily corrupted.
    manifest = generate_synthetic_corpus(str(tmp_path), seed=3, size=120)
    rows = read_manifest(manifest)
    assert sum(1 for r in rows if r["asr_confidence"] < 0.23) >= 5


def test_labels_cycle_all_six(tmp_path):
    manifest = generate_synthetic_corpus(str(tmp_path), seed=5, size=12)
    labels = [r["label"] for r in read_manifest(manifest)]
    assert labels[:6] == ["joy", "sadness", "anger", "fear", "disgust", "neutral"]


def test_size_validated(tmp_path):
    with pytest.raises(ValueError):
        generate_synthetic_corpus(str(tmp_path), seed=1, size=0)


def test_wav_files_are_valid_and_bounded(tmp_path):
    manifest = generate_synthetic_corpus(str(tmp_path), seed=17, size=6)
    for row in read_manifest(manifest):
        buf = load_wav(str(tmp_path / row["audio"]))
        assert 1.0 <= buf.duration <= 3.0
        assert float(np.abs(buf.samples).max()) <= 1.0
