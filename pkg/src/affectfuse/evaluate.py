"""Batch evaluation over a JSONL manifest.

Variants: text_only and audio_only use a single channel; linear mixes with
w_text equal to the manifest ASR confidence; fuzzy runs the full pipeline
(including auditing). Ablations reuse the channel outputs with a forced
weight: no_text (0), no_audio (1), no_gating (raw confidence), fixed_weight
(0.5). The report carries per-class and macro/weighted precision/recall/F1,
accuracy, class-normalized confusion matrices, and a disagreement analysis
counting rows where the fuzzy variant is correct and a baseline is wrong.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import audio as audio_mod
from . import text as text_mod
from .config import PipelineConfig
from .core import LABELS, canonical_label, dominant_emotion
from .fusion import fuse_distributions
from .metrics import MetricsRegistry
from .pipeline import Clock, Pipeline, TurnInput

VARIANTS = ("text_only", "audio_only", "linear", "fuzzy")
ABLATIONS = ("no_text", "no_audio", "no_gating", "fixed_weight")

_ABLATION_WEIGHT = {"no_text": 0.0, "no_audio": 1.0, "fixed_weight": 0.5}


@dataclass(frozen=True)
class ManifestRow:
    row_id: str
    audio: str
    transcript: str
    asr_confidence: float
    label: str


def load_manifest(path: str) -> List[ManifestRow]:
    """Read manifest rows {id, audio, transcript, asr_confidence, label}.

    Relative audio paths resolve against the manifest directory; Spanish
    label aliases are accepted.
    """
    base = Path(path).resolve().parent
    rows: List[ManifestRow] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                audio_path = Path(raw["audio"])
                if not audio_path.is_absolute():
                    audio_path = base / audio_path
                rows.append(
                    ManifestRow(
                        row_id=str(raw["id"]),
                        audio=str(audio_path),
                        transcript=str(raw["transcript"]),
                        asr_confidence=float(raw["asr_confidence"]),
                        label=canonical_label(str(raw["label"])),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad manifest row: {exc}") from exc
    return rows


def classification_metrics(
    golds: Sequence[str],
    preds: Sequence[str],
    labels: Sequence[str] = LABELS,
) -> Dict[str, object]:
    """Accuracy, per-class / macro / weighted P-R-F1, and confusion matrices."""
    if len(golds) != len(preds):
        raise ValueError("golds and preds must have equal length")
    n = len(golds)
    index = {label: i for i, label in enumerate(labels)}
    confusion = [[0 for _ in labels] for _ in labels]
    for gold, pred in zip(golds, preds):
        confusion[index[gold]][index[pred]] += 1

    per_class: Dict[str, Dict[str, float]] = {}
    for label in labels:
        i = index[label]
        tp = confusion[i][i]
        fp = sum(confusion[r][i] for r in range(len(labels))) - tp
        fn = sum(confusion[i]) - tp
        precision = tp / (tp + fp) if (tp + fp) else 0.0
        recall = tp / (tp + fn) if (tp + fn) else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        per_class[label] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": tp + fn,
        }

    def average(metric: str, weighted: bool) -> float:
        if weighted:
            total = sum(per_class[label]["support"] for label in labels)
            if total == 0:
                return 0.0
            return sum(per_class[label][metric] * per_class[label]["support"] for label in labels) / total
        return sum(per_class[label][metric] for label in labels) / len(labels)

    accuracy = sum(confusion[i][i] for i in range(len(labels))) / n if n else 0.0
    normalized = []
    for row in confusion:
        total = sum(row)
        normalized.append([value / total if total else 0.0 for value in row])

    return {
        "n": n,
        "accuracy": accuracy,
        "per_class": per_class,
        "macro": {m: average(m, weighted=False) for m in ("precision", "recall", "f1")},
        "weighted": {m: average(m, weighted=True) for m in ("precision", "recall", "f1")},
        "confusion": confusion,
        "confusion_normalized": normalized,
    }


def _write_confusion_csv(path: Path, matrix: Sequence[Sequence[float]], labels: Sequence[str]) -> None:
    lines = ["gold\\pred," + ",".join(labels)]
    for label, row in zip(labels, matrix):
        lines.append(label + "," + ",".join(f"{value:.6f}" for value in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_batch_eval(
    manifest_path: str,
    config: PipelineConfig,
    variants: Sequence[str] = VARIANTS,
    ablations: Sequence[str] = (),
    out_dir: Optional[str] = None,
    clock: Optional[Clock] = None,
    metrics: Optional[MetricsRegistry] = None,
) -> Dict[str, object]:
    """Evaluate every requested variant over the manifest.

    The fuzzy variant runs the full pipeline with one session per row, so
    rows stay independent of each other. Rows whose audio file is missing are
    skipped and counted.
    """
    for name in variants:
        if name not in VARIANTS:
            raise ValueError(f"unknown variant {name!r}")
    for name in ablations:
        if name not in ABLATIONS:
            raise ValueError(f"unknown ablation {name!r}")

    rows = load_manifest(manifest_path)
    if not rows:
        raise ValueError(f"manifest {manifest_path} is empty")

    lexicon = text_mod.load_lexicon(config.text.lexicon_path)
    lemmas = text_mod.load_lemma_dictionary(config.text.lemmas_path)

    pipeline: Optional[Pipeline] = None
    if "fuzzy" in variants:
        pipeline_config = config
        if out_dir is not None:
            # Keep the evaluation self-contained: audit output lands in out_dir.
            pipeline_config = copy.deepcopy(config)
            pipeline_config.audit.log_path = str(Path(out_dir) / "audit" / "events.jsonl")
            pipeline_config.audit.artifacts_dir = str(Path(out_dir) / "audit" / "fired_rules")
            pipeline_config.anchoring.ledger_path = str(Path(out_dir) / "audit" / "ledger.json")
            pipeline_config.anchoring.pending_path = str(Path(out_dir) / "audit" / "pending.json")
        pipeline = Pipeline(pipeline_config, clock=clock, metrics=metrics)

    golds: List[str] = []
    predictions: Dict[str, List[str]] = {name: [] for name in (*variants, *ablations)}
    row_records: List[Dict[str, object]] = []
    skipped: List[str] = []

    try:
        for row in rows:
            if not Path(row.audio).is_file():
                skipped.append(row.row_id)
                continue
            buffer = audio_mod.load_wav(row.audio)
            audio_result = audio_mod.audio_emotion(
                buffer,
                audio_mod.ArousalSmoother(alpha=config.audio.alpha_ema),
                norm_factor=config.audio.norm_factor,
                use_mfcc=config.audio.use_mfcc,
                snr_block_size=config.audio.snr_block_size,
                base_valence=config.audio.base_valence,
            )
            text_result = text_mod.text_emotion(
                row.transcript,
                lexicon=lexicon,
                lemma_dictionary=lemmas,
                negation_markers=config.text.negation_markers,
                intensifiers=config.text.intensifiers,
            )

            record: Dict[str, object] = {"id": row.row_id, "gold": row.label}
            for name in (*variants, *ablations):
                if name == "text_only":
                    pred = dominant_emotion(text_result.probs)[0]
                elif name == "audio_only":
                    pred = dominant_emotion(audio_result.probs)[0]
                elif name in ("linear", "no_gating"):
                    mixed = fuse_distributions(
                        text_result.probs, audio_result.probs, row.asr_confidence
                    )
                    pred = dominant_emotion(mixed)[0]
                elif name == "fuzzy":
                    result = pipeline.run_turn(
                        TurnInput(
                            audio_path=row.audio,
                            transcript=row.transcript,
                            asr_confidence=row.asr_confidence,
                            session_id=row.row_id,
                        )
                    )
                    pred = str(result.event["final"]["dominant"])
                else:
                    mixed = fuse_distributions(
                        text_result.probs, audio_result.probs, _ABLATION_WEIGHT[name]
                    )
                    pred = dominant_emotion(mixed)[0]
                predictions[name].append(pred)
                record[name] = pred
            golds.append(row.label)
            row_records.append(record)
    finally:
        if pipeline is not None:
            pipeline.close()

    report: Dict[str, object] = {
        "manifest": str(manifest_path),
        "rows": len(golds),
        "skipped": len(skipped),
        "skipped_ids": skipped,
        "run_id": config.run_id,
        "model_size": config.model_size,
        "variants": {name: classification_metrics(golds, predictions[name]) for name in variants},
        "ablations": {name: classification_metrics(golds, predictions[name]) for name in ablations},
        "predictions": row_records,
    }

    if "fuzzy" in variants:
        fuzzy_preds = predictions["fuzzy"]
        disagreements: Dict[str, object] = {}
        for name in variants:
            if name == "fuzzy":
                continue
            corrected = [
                row_records[i]["id"]
                for i in range(len(golds))
                if fuzzy_preds[i] == golds[i] and predictions[name][i] != golds[i]
            ]
            disagreements[f"fuzzy_corrects_{name}"] = len(corrected)
            disagreements[f"fuzzy_corrects_{name}_ids"] = corrected
        if "text_only" in variants and "linear" in variants:
            both = [
                row_records[i]["id"]
                for i in range(len(golds))
                if fuzzy_preds[i] == golds[i]
                and predictions["text_only"][i] != golds[i]
                and predictions["linear"][i] != golds[i]
            ]
            disagreements["fuzzy_corrects_text_and_linear"] = len(both)
            disagreements["fuzzy_corrects_text_and_linear_ids"] = both
        report["disagreements"] = disagreements

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        for name in (*variants, *ablations):
            section = report["variants"] if name in variants else report["ablations"]
            _write_confusion_csv(
                out / f"confusion_{name}.csv",
                section[name]["confusion_normalized"],
                list(LABELS),
            )
    return report
