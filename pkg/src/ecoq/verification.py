"""QR payload encoding/validation and the waste-type classifier contract.

The QR payload is plain text; rendering it as an image is a UI concern.
Grammar (bit-exact, UTF-8, no surrounding whitespace)::

    ECOQ1|<event_id>|<bag_id>|<WASTE_TYPE>|<crc32hex-lowercase-8>

The checksum is CRC-32 (IEEE 802.3 polynomial) over the first four fields
joined with ``|``. CRC-32 guards against scan errors and typos, not
against a determined forger; anti-cheat is out of scope here.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

from ecoq.errors import ChecksumMismatch, InvalidId, MalformedPayload
from ecoq.errors import UnknownWasteType as UnknownWasteTypeError
from ecoq.model import WasteType

PAYLOAD_VERSION = "ECOQ1"

#: Confidence at or above which a disagreeing classifier wins.
DEFAULT_OVERRIDE_THRESHOLD = 0.8

#: Confidence reported by the deterministic stub classifier.
STUB_CONFIDENCE = 0.9


@dataclass(frozen=True)
class BagClaim:
    """Decoded, checksum-verified content of a bag QR payload."""

    version: str
    event_id: str
    bag_id: str
    waste_type: WasteType
    checksum: str


@dataclass(frozen=True)
class ClassifierVerdict:
    """A classifier's opinion about one bag photo."""

    predicted: WasteType
    confidence: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence out of [0, 1]: {self.confidence}")


class TypeCheckAction(str, Enum):
    """Outcome of comparing a claimed type against a classifier verdict."""

    ACCEPT = "accept"
    OVERRIDE = "override"
    FLAG = "flag"


@dataclass(frozen=True)
class TypeCheckResult:
    """What to record: the effective type and whether to mark for review."""

    action: TypeCheckAction
    effective_type: WasteType


class WasteClassifier(Protocol):
    """Pluggable image-recognition contract; implementations classify a
    bag photo referenced by an opaque string (path, URL, upload id)."""

    def classify(self, image_ref: str) -> ClassifierVerdict: ...


class StubClassifier:
    """Deterministic stand-in for a real model.

    Predicts the first waste-type label embedded in the image reference
    (case-insensitive), with fixed confidence. References without a label
    come back as MIXED at zero confidence, which downstream policy treats
    as "no usable verdict".
    """

    def classify(self, image_ref: str) -> ClassifierVerdict:
        lowered = image_ref.lower()
        hits = [
            (lowered.index(wt.value.lower()), wt)
            for wt in WasteType
            if wt.value.lower() in lowered
        ]
        if not hits:
            return ClassifierVerdict(WasteType.MIXED, 0.0)
        hits.sort()
        return ClassifierVerdict(hits[0][1], STUB_CONFIDENCE)


def _checksum(body: str) -> str:
    return format(zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF, "08x")


def encode_bag_qr(event_id: str, bag_id: str, waste_type: WasteType) -> str:
    """Build the QR payload text for one bag."""
    for label, value in (("event_id", event_id), ("bag_id", bag_id)):
        if not value or "|" in value:
            raise InvalidId(f"{label} must be non-empty and free of '|': {value!r}")
    body = f"{PAYLOAD_VERSION}|{event_id}|{bag_id}|{waste_type.value}"
    return f"{body}|{_checksum(body)}"


def decode_bag_qr(payload: str) -> BagClaim:
    """Parse and checksum-verify a QR payload.

    Raises MalformedPayload on structural problems, UnknownWasteType for a
    label outside the enumeration, and ChecksumMismatch when the content
    does not hash to the trailing checksum (comparison is case-sensitive;
    only lowercase hex is valid).
    """
    fields = payload.split("|")
    if len(fields) != 5:
        raise MalformedPayload(f"expected 5 fields, got {len(fields)}")
    version, event_id, bag_id, type_label, checksum = fields
    if version != PAYLOAD_VERSION:
        raise MalformedPayload(f"unsupported payload version {version!r}")
    if not event_id or not bag_id:
        raise MalformedPayload("empty event_id or bag_id")
    try:
        waste_type = WasteType(type_label)
    except ValueError:
        raise UnknownWasteTypeError(f"unknown waste type {type_label!r}") from None
    body = f"{version}|{event_id}|{bag_id}|{type_label}"
    if checksum != _checksum(body):
        raise ChecksumMismatch(f"checksum {checksum!r} does not match content")
    return BagClaim(version, event_id, bag_id, waste_type, checksum)


def verify_waste_type(
    claimed: WasteType,
    verdict: ClassifierVerdict,
    threshold: float = DEFAULT_OVERRIDE_THRESHOLD,
) -> TypeCheckResult:
    """Reconcile a participant's claimed type with a classifier verdict.

    Agreement is accepted at any confidence. A confident disagreement
    (>= threshold) overrides the claim; a hesitant one keeps the claim but
    flags the record for review. Total over its input grid: never raises
    for valid inputs.
    """
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"threshold out of [0, 1]: {threshold}")
    if verdict.predicted is claimed:
        return TypeCheckResult(TypeCheckAction.ACCEPT, claimed)
    if verdict.confidence >= threshold:
        return TypeCheckResult(TypeCheckAction.OVERRIDE, verdict.predicted)
    return TypeCheckResult(TypeCheckAction.FLAG, claimed)
