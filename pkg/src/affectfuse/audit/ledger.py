"""Simulated append-only anchoring ledger.

Reproduces the semantics of anchoring an event digest on a public chain
behind a local interface: submitted txids are queued, sealed into hash-chained
blocks (every ``block_interval`` seconds or ``max_block_entries`` entries,
whichever first), and can afterwards be independently verified from the block
data alone. Sealing runs in a background thread and never blocks or fails the
response path.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from .canonical import canonicalize

STATUS_DISABLED = "disabled"
STATUS_SUBMITTED = "submitted"
STATUS_ANCHORED = "anchored"

VERDICT_VERIFIED = "verified"
VERDICT_TAMPER_DETECTED = "tamper_detected"
VERDICT_NOT_ANCHORED = "not_anchored"
VERDICT_UNAVAILABLE = "unavailable"

#: Flat gas charge per anchored txid, mirroring a single hash-write call.
GAS_PER_ANCHOR = 47000

GENESIS_HASH = "0" * 64
DEFAULT_SENDER = "sim-account-001"
DEFAULT_BLOCK_INTERVAL = 2.0
DEFAULT_MAX_BLOCK_ENTRIES = 128

_TXID_RE = re.compile(r"^[0-9a-f]{64}$")


class AnchorError(RuntimeError):
    """The ledger store is corrupt or an anchoring operation failed."""


@dataclass(frozen=True)
class AnchorRecord:
    txid: str
    status: str
    block_number: Optional[int] = None
    tx_hash: Optional[str] = None
    sender: Optional[str] = None
    gas_used: Optional[int] = None

    def as_dict(self) -> Dict[str, object]:
        return {
            "txid": self.txid,
            "status": self.status,
            "block_number": self.block_number,
            "tx_hash": self.tx_hash,
            "sender": self.sender,
            "gas_used": self.gas_used,
        }


@dataclass(frozen=True)
class BlockEntry:
    txid: str
    sender: str
    tx_hash: str

    def as_dict(self) -> Dict[str, str]:
        return {"txid": self.txid, "sender": self.sender, "tx_hash": self.tx_hash}


@dataclass(frozen=True)
class LedgerBlock:
    block_number: int
    timestamp: str
    entries: Tuple[BlockEntry, ...]
    previous_block_hash: str
    block_hash: str

    def as_dict(self) -> Dict[str, object]:
        return {
            "block_number": self.block_number,
            "timestamp": self.timestamp,
            "entries": [entry.as_dict() for entry in self.entries],
            "previous_block_hash": self.previous_block_hash,
            "block_hash": self.block_hash,
        }


@dataclass(frozen=True)
class Verdict:
    kind: str
    block_number: Optional[int] = None
    tx_hash: Optional[str] = None
    sender: Optional[str] = None
    detail: str = ""

    def as_dict(self) -> Dict[str, object]:
        return {
            "verdict": self.kind,
            "block_number": self.block_number,
            "tx_hash": self.tx_hash,
            "sender": self.sender,
            "detail": self.detail,
        }


def validate_txid(txid: str) -> str:
    if not _TXID_RE.match(txid):
        raise ValueError(f"txid must be 64 lowercase hex characters: {txid!r}")
    return txid


def entry_tx_hash(block_number: int, txid: str, sender: str, index: int) -> str:
    """Deterministic per-entry transaction hash (stands in for a chain receipt)."""
    material = f"{block_number}:{txid}:{sender}:{index}".encode("utf-8")
    return hashlib.sha256(material).hexdigest()


def block_content_hash(
    block_number: int,
    timestamp: str,
    entries: Tuple[BlockEntry, ...],
    previous_block_hash: str,
) -> str:
    content = {
        "block_number": block_number,
        "timestamp": timestamp,
        "entries": [entry.as_dict() for entry in entries],
        "previous_block_hash": previous_block_hash,
    }
    return hashlib.sha256(canonicalize(content)).hexdigest()


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


class SimulatedLedger:
    """Local stand-in for the anchoring chain.

    Producers call :meth:`submit` concurrently; one consumer seals pending
    entries into blocks. Reads see only sealed blocks, so verification is
    safe while sealing runs.
    """

    def __init__(
        self,
        ledger_path: str,
        pending_path: str,
        sender: str = DEFAULT_SENDER,
        block_interval: float = DEFAULT_BLOCK_INTERVAL,
        max_block_entries: int = DEFAULT_MAX_BLOCK_ENTRIES,
        clock: Optional[Callable[[], str]] = None,
        auto_seal: bool = False,
    ) -> None:
        if block_interval <= 0:
            raise ValueError("block_interval must be > 0")
        if max_block_entries < 1:
            raise ValueError("max_block_entries must be >= 1")
        self.ledger_path = Path(ledger_path)
        self.pending_path = Path(pending_path)
        self.sender = sender
        self.block_interval = block_interval
        self.max_block_entries = max_block_entries
        self._clock = clock or (lambda: time.strftime("%Y-%m-%dT%H:%M:%S+00:00", time.gmtime()))
        self._lock = threading.Lock()
        self._blocks: List[LedgerBlock] = []
        self._pending: List[str] = []
        self._anchored: Dict[str, Tuple[int, str, str]] = {}
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._load()
        if auto_seal:
            self._thread = threading.Thread(target=self._seal_loop, daemon=True)
            self._thread.start()

    def _load(self) -> None:
        if self.ledger_path.exists():
            try:
                raw = json.loads(self.ledger_path.read_text(encoding="utf-8"))
                for stored in raw["blocks"]:
                    entries = tuple(
                        BlockEntry(e["txid"], e["sender"], e["tx_hash"]) for e in stored["entries"]
                    )
                    block = LedgerBlock(
                        block_number=int(stored["block_number"]),
                        timestamp=str(stored["timestamp"]),
                        entries=entries,
                        previous_block_hash=str(stored["previous_block_hash"]),
                        block_hash=str(stored["block_hash"]),
                    )
                    self._blocks.append(block)
                    for entry in entries:
                        self._anchored[entry.txid] = (
                            block.block_number,
                            entry.tx_hash,
                            entry.sender,
                        )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise AnchorError(f"corrupt ledger file {self.ledger_path}: {exc}") from exc
        if self.pending_path.exists():
            try:
                self._pending = list(json.loads(self.pending_path.read_text(encoding="utf-8"))["pending"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise AnchorError(f"corrupt pending file {self.pending_path}: {exc}") from exc

    def _persist(self) -> None:
        self.ledger_path.parent.mkdir(parents=True, exist_ok=True)
        self.pending_path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(
            self.ledger_path,
            canonicalize({"blocks": [block.as_dict() for block in self._blocks]}),
        )
        _atomic_write(self.pending_path, canonicalize({"pending": list(self._pending)}))

    def submit(self, txid: str) -> AnchorRecord:
        """Queue a txid for anchoring; returns immediately with the current status."""
        validate_txid(txid)
        with self._lock:
            if txid in self._anchored:
                return self._record_locked(txid)
            if txid not in self._pending:
                self._pending.append(txid)
                self._persist()
            return AnchorRecord(txid=txid, status=STATUS_SUBMITTED)

    def status(self, txid: str) -> AnchorRecord:
        """Current record for a txid; never-submitted txids report "disabled"."""
        validate_txid(txid)
        with self._lock:
            return self._record_locked(txid)

    def _record_locked(self, txid: str) -> AnchorRecord:
        if txid in self._anchored:
            block_number, tx_hash, sender = self._anchored[txid]
            return AnchorRecord(
                txid=txid,
                status=STATUS_ANCHORED,
                block_number=block_number,
                tx_hash=tx_hash,
                sender=sender,
                gas_used=GAS_PER_ANCHOR,
            )
        if txid in self._pending:
            return AnchorRecord(txid=txid, status=STATUS_SUBMITTED)
        return AnchorRecord(txid=txid, status=STATUS_DISABLED)

    def lookup(self, txid: str) -> Optional[Tuple[int, str, str]]:
        """(block_number, tx_hash, sender) for an anchored txid, else None."""
        with self._lock:
            return self._anchored.get(txid)

    def seal_pending(self) -> Optional[LedgerBlock]:
        """Seal queued txids into the next block; None when the queue is empty."""
        with self._lock:
            if not self._pending:
                return None
            batch = self._pending[: self.max_block_entries]
            self._pending = self._pending[self.max_block_entries:]
            block_number = len(self._blocks)
            previous = self._blocks[-1].block_hash if self._blocks else GENESIS_HASH
            timestamp = self._clock()
            entries = tuple(
                BlockEntry(txid, self.sender, entry_tx_hash(block_number, txid, self.sender, i))
                for i, txid in enumerate(batch)
            )
            block = LedgerBlock(
                block_number=block_number,
                timestamp=timestamp,
                entries=entries,
                previous_block_hash=previous,
                block_hash=block_content_hash(block_number, timestamp, entries, previous),
            )
            self._blocks.append(block)
            for entry in entries:
                self._anchored[entry.txid] = (block_number, entry.tx_hash, entry.sender)
            self._persist()
            return block

    def _seal_loop(self) -> None:
        last_seal = time.monotonic()
        while not self._stop.is_set():
            self._stop.wait(min(0.05, self.block_interval / 4.0))
            with self._lock:
                pending = len(self._pending)
            due = (time.monotonic() - last_seal) >= self.block_interval
            if pending >= self.max_block_entries or (pending > 0 and due):
                self.seal_pending()
                last_seal = time.monotonic()

    @property
    def blocks(self) -> Tuple[LedgerBlock, ...]:
        with self._lock:
            return tuple(self._blocks)

    @property
    def pending(self) -> Tuple[str, ...]:
        with self._lock:
            return tuple(self._pending)

    def verify_chain(self) -> Tuple[bool, Optional[int]]:
        """Recompute every block hash from genesis.

        Returns (True, None) for a valid chain, else (False, block_number) of
        the first block whose stored hash or back-link no longer matches.
        """
        previous = GENESIS_HASH
        for block in self.blocks:
            if block.previous_block_hash != previous:
                return False, block.block_number
            recomputed = block_content_hash(
                block.block_number, block.timestamp, block.entries, block.previous_block_hash
            )
            if recomputed != block.block_hash:
                return False, block.block_number
            previous = block.block_hash
        return True, None

    def close(self) -> None:
        """Stop the sealing thread and drain the queue.

        A graceful shutdown anchors everything that was submitted; after a
        crash the persisted pending file is picked up by the next instance.
        """
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None
        while self.seal_pending() is not None:
            pass

    def __enter__(self) -> "SimulatedLedger":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def anchor_txid(txid: str, ledger: Optional[SimulatedLedger], enabled: bool = True) -> AnchorRecord:
    """Anchor a txid, or report the disabled status when anchoring is off."""
    if not enabled or ledger is None:
        return AnchorRecord(txid=txid, status=STATUS_DISABLED)
    return ledger.submit(txid)


def verify_anchorage(
    event_bytes: bytes,
    claimed_txid: str,
    ledger: Optional[SimulatedLedger],
) -> Verdict:
    """Third-party verification of one stored event.

    Recomputes SHA-256 over the exact file bytes; a mismatch with the claimed
    txid is TAMPER_DETECTED regardless of ledger state. Otherwise the ledger
    is scanned for the txid.
    """
    digest = hashlib.sha256(event_bytes).hexdigest()
    if digest != claimed_txid:
        return Verdict(
            kind=VERDICT_TAMPER_DETECTED,
            detail=f"recomputed digest {digest} does not match claimed txid",
        )
    if ledger is None:
        return Verdict(kind=VERDICT_UNAVAILABLE, detail="no ledger available")
    try:
        found = ledger.lookup(claimed_txid)
    except AnchorError as exc:
        return Verdict(kind=VERDICT_UNAVAILABLE, detail=str(exc))
    if found is None:
        return Verdict(kind=VERDICT_NOT_ANCHORED, detail="digest matches but txid is not anchored")
    block_number, tx_hash, sender = found
    return Verdict(
        kind=VERDICT_VERIFIED,
        block_number=block_number,
        tx_hash=tx_hash,
        sender=sender,
        detail="event bytes match and txid is anchored",
    )


def estimate_anchor_cost(
    gas_units: float,
    gas_price_gwei: float,
    eth_usd: float,
    batch_size: int = 1,
) -> float:
    """USD cost per event: gas * price(gwei) * 1e-9 * ETHUSD / batch_size."""
    if gas_units <= 0 or gas_price_gwei < 0 or eth_usd < 0 or batch_size <= 0:
        raise ValueError("cost inputs must be positive (gas price may be zero on a testnet)")
    return gas_units * gas_price_gwei * 1e-9 * eth_usd / batch_size
