"""EventBus: synchronous progress broadcast for long-running suites."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

logger = logging.getLogger(__name__)


class EventType(str, Enum):
    # Suite lifecycle
    SUITE_STARTED = "suite_started"
    SUITE_COMPLETED = "suite_completed"

    # Per-schema / per-corpus
    SCHEMA_CHECKED = "schema_checked"
    CORPUS_CHECKED = "corpus_checked"

    # A check that must always pass did not
    FAILURE = "failure"


@dataclass
class Event:
    type: EventType
    suite: str
    data: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"type": self.type.value, "suite": self.suite, "data": self.data})


Subscriber = Callable[[Event], None]


class EventBus:
    """Simple pub/sub bus. Subscribers receive all events, in emit order."""

    def __init__(self) -> None:
        self._subscribers: list[Subscriber] = []

    def subscribe(self, callback: Subscriber) -> None:
        self._subscribers.append(callback)

    def unsubscribe(self, callback: Subscriber) -> None:
        self._subscribers = [s for s in self._subscribers if s is not callback]

    def emit(self, event: Event) -> None:
        for sub in list(self._subscribers):
            try:
                sub(event)
            except Exception:
                logger.exception("EventBus subscriber error")


# Singleton
event_bus = EventBus()
