"""Post-fusion risk detection, escalation, and templated responses.

Guardrails run strictly after fusion and before response planning. Risk is
flagged by per-emotion probability thresholds and by case/diacritic
insensitive keyword matching over the transcript. Responses come from a
plain-text template table; low dominant probability or low cross-modal
coherence selects the hedged variant, and a triggered escalation always
returns the safe-handoff template.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence

import requests

from .core import dominant_emotion
from .fusion import FusionOutcome

log = logging.getLogger(__name__)

DEFAULT_THRESHOLDS: Dict[str, float] = {"fear": 0.7, "sadness": 0.85}
HEDGE_PROBABILITY = 0.5
HEDGE_COHERENCE = 0.4

STATUS_SKIPPED = "skipped"
STATUS_DELIVERED = "delivered"
STATUS_FAILED = "failed"

_FALLBACK_TEMPLATE = "Gracias por contarme. ¿Querés seguir hablando de cómo te sentís?"


@dataclass
class Escalation:
    triggered: bool
    reasons: List[str] = field(default_factory=list)
    notified: bool = False
    timestamp: str = ""

    def as_dict(self) -> Dict[str, object]:
        return {
            "triggered": self.triggered,
            "reasons": list(self.reasons),
            "notified": self.notified,
            "timestamp": self.timestamp,
        }


def _normalize_for_matching(text: str) -> str:
    decomposed = unicodedata.normalize("NFD", text.lower())
    return "".join(ch for ch in decomposed if unicodedata.category(ch) != "Mn")


def evaluate_guardrails(
    fused: FusionOutcome,
    transcript: str,
    thresholds: Optional[Mapping[str, float]] = None,
    keywords: Sequence[str] = (),
    timestamp: str = "",
) -> Escalation:
    """Flag risk from fused probabilities and sensitive keywords.

    Triggered exactly when at least one reason exists: a probability above
    its configured threshold ("fear>0.7") or a keyword substring match over
    the normalized transcript ("keyword:...").
    """
    limits = DEFAULT_THRESHOLDS if thresholds is None else thresholds
    reasons: List[str] = []
    for label, limit in limits.items():
        if fused.probs.get(label, 0.0) > limit:
            reasons.append(f"{label}>{limit:g}")
    haystack = _normalize_for_matching(transcript)
    for keyword in keywords:
        if keyword and _normalize_for_matching(keyword) in haystack:
            reasons.append(f"keyword:{keyword}")
    return Escalation(triggered=bool(reasons), reasons=reasons, timestamp=timestamp)


def notify_escalation(
    escalation: Escalation,
    webhook_url: Optional[str],
    txid: str = "",
    run_id: str = "",
    timeout: float = 3.0,
) -> str:
    """POST the escalation to the configured webhook.

    Returns "skipped" when no webhook is configured, "delivered" on a 2xx
    response (also setting ``notified``), and "failed" otherwise. Failures
    are never fatal to the pipeline.
    """
    if not webhook_url:
        return STATUS_SKIPPED
    payload = {
        "txid": txid,
        "reasons": list(escalation.reasons),
        "timestamp": escalation.timestamp,
        "run_id": run_id,
    }
    try:
        response = requests.post(webhook_url, json=payload, timeout=timeout)
    except requests.RequestException:
        log.warning("escalation webhook unreachable", exc_info=True)
        return STATUS_FAILED
    if 200 <= response.status_code < 300:
        escalation.notified = True
        return STATUS_DELIVERED
    log.warning("escalation webhook returned %s", response.status_code)
    return STATUS_FAILED


def plan_response(
    fused: FusionOutcome,
    escalation: Escalation,
    templates: Mapping[str, str],
    hedge_probability: float = HEDGE_PROBABILITY,
    hedge_coherence: float = HEDGE_COHERENCE,
) -> str:
    """Pick the response template for the dominant emotion.

    A triggered escalation overrides everything with the safe handoff. The
    hedged variant applies when the dominant probability or the coherence is
    low, to avoid escalatory replies on shaky evidence. Total: some non-empty
    string is always returned.
    """
    if escalation.triggered:
        return templates.get("handoff", _FALLBACK_TEMPLATE)
    label, probability = dominant_emotion(fused.probs)
    variant = "hedged" if (probability < hedge_probability or fused.coherence < hedge_coherence) else "plain"
    return (
        templates.get(f"{label}.{variant}")
        or templates.get(f"{label}.plain")
        or _FALLBACK_TEMPLATE
    )


def _parse_templates(lines: Sequence[str], origin: str) -> Dict[str, str]:
    templates: Dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ValueError(f"{origin}:{lineno}: expected 'key: text'")
        key, text = line.split(":", 1)
        templates[key.strip()] = text.strip()
    return templates


def load_templates(path: Optional[str] = None) -> Dict[str, str]:
    """Load the response template table (keys like "joy.plain", "handoff")."""
    if path is None:
        text = resources.files("affectfuse.data").joinpath("templates_es.txt").read_text("utf-8")
        return _parse_templates(text.splitlines(), "templates_es.txt")
    with open(path, encoding="utf-8") as handle:
        return _parse_templates(handle.read().splitlines(), str(path))


def load_keywords(path: Optional[str] = None) -> List[str]:
    """Load the sensitive keyword list, one phrase per line."""
    if path is None:
        text = resources.files("affectfuse.data").joinpath("keywords_es.txt").read_text("utf-8")
        lines = text.splitlines()
    else:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith("#")]
