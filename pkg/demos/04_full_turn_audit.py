"""One conversational turn, end to end, with a verifiable audit trail.

Synthesizes a short audio turn, runs the full pipeline (audio + text
emotion, fuzzy-weighted fusion, guardrails, templated response), seals the
explanation into a canonical audit event, anchors its SHA-256 txid in the
simulated ledger, and then plays the independent verifier: first against the
untouched event, then after flipping a single byte.
"""

import tempfile
import time
import wave
from pathlib import Path

import numpy as np

from affectfuse import PipelineConfig, Pipeline, TurnInput
from affectfuse.audit import verify_anchorage

workdir = Path(tempfile.mkdtemp(prefix="affectfuse-demo-"))
print(f"working under {workdir}")

rate = 16000
t = np.arange(2 * rate) / rate
samples = 0.25 * np.sin(2 * np.pi * 330 * t) * (np.sin(2 * np.pi * 1.5 * t) > 0)
samples = np.clip(samples + np.random.default_rng(1).normal(0, 0.004, t.size), -1, 1)
wav_path = workdir / "turn.wav"
with wave.open(str(wav_path), "wb") as handle:
    handle.setnchannels(1)
    handle.setsampwidth(2)
    handle.setframerate(rate)
    handle.writeframes(np.round(samples * 32767).astype("<i2").tobytes())

config = PipelineConfig()
config.audit.log_path = str(workdir / "audit" / "events.jsonl")
config.audit.artifacts_dir = str(workdir / "audit" / "fired_rules")
config.anchoring.ledger_path = str(workdir / "audit" / "ledger.json")
config.anchoring.pending_path = str(workdir / "audit" / "pending.json")
config.anchoring.block_interval = 0.5

with Pipeline(config) as pipeline:
    result = pipeline.run_turn(
        TurnInput(
            audio_path=str(wav_path),
            transcript="la verdad estoy muy contenta, aunque mi correo ana@ejemplo.com no funciona",
            asr_confidence=0.88,
            session_id="demo",
        )
    )
    print()
    print(f"response : {result.response}")
    print(f"dominant : {result.event['final']['dominant']}")
    print(f"mode     : {result.event['mode']}  w_text={result.event['weights']['w_text']:.4f}")
    print(f"redaction: {result.event['redaction']} (the address never reaches disk)")
    print(f"txid     : {result.txid}")

    # anchoring is asynchronous; give the sealer a moment
    while pipeline.ledger.status(result.txid).status != "anchored":
        time.sleep(0.05)
    record = pipeline.ledger.status(result.txid)
    print(f"anchored : block {record.block_number}, tx_hash {record.tx_hash[:16]}..., gas {record.gas_used}")

    stored = (workdir / "audit" / "events.jsonl").read_bytes().splitlines()[0]
    verdict = verify_anchorage(stored, result.txid, pipeline.ledger)
    print(f"verify untouched event  -> {verdict.kind}")

    tampered = bytearray(stored)
    tampered[42] ^= 0x01
    verdict = verify_anchorage(bytes(tampered), result.txid, pipeline.ledger)
    print(f"verify after 1-byte flip -> {verdict.kind}")

print()
print(f"explainability artifacts: {sorted(p.name for p in (workdir / 'audit' / 'fired_rules').iterdir())}")
