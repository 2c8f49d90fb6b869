"""Configuration: environment variables and generator defaults."""

from __future__ import annotations

import os
from pathlib import Path

from dotenv import load_dotenv

# ── Load .env ──────────────────────────────────────────────────────
load_dotenv(Path(__file__).resolve().parent.parent / ".env")

# ── Output ─────────────────────────────────────────────────────────
LOG_LEVEL: str = os.environ.get("INI_LOG_LEVEL", "WARNING").upper()
COLOR_ENABLED: bool = os.environ.get("INI_COLOR", "1") != "0"

# ── Server ─────────────────────────────────────────────────────────
PORT: int = int(os.environ.get("PORT", "8000"))

# ── Paths ──────────────────────────────────────────────────────────
PROJECT_ROOT: Path = Path(__file__).resolve().parent.parent
PROGRAMS_DIR: Path = PROJECT_ROOT / "programs"

# ── Evaluation defaults ────────────────────────────────────────────
DEFAULT_MODEL: str = os.environ.get("INI_MODEL", "dist")

# ── Generator defaults ─────────────────────────────────────────────
DEFAULT_SEED: int = int(os.environ.get("INI_SEED", "7"))
DEFAULT_COUNT: int = int(os.environ.get("INI_COUNT", "50"))
DEFAULT_DEPTH: int = int(os.environ.get("INI_DEPTH", "4"))
MAX_ATTEMPTS: int = int(os.environ.get("INI_MAX_ATTEMPTS", "200"))
GEN_BUDGET: int = int(os.environ.get("INI_GEN_BUDGET", "4000"))

# Relative weights of the constructs the generator may pick at a node.
# Binders and sample dominate so corpora exercise context splitting and
# the pairing of boxed computations.
GEN_WEIGHTS: dict[str, float] = {
    "var": 3.0,
    "leaf": 2.0,
    "prim": 1.5,
    "intro": 3.0,
    "let": 3.0,
    "let_tensor": 3.0,
    "proj": 1.0,
    "case": 2.0,
    "app": 2.0,
    "sample": 4.0,
}

# Probability that the relaxed (non-affine) generator leaves a used
# variable available for reuse.
REUSE_PROBABILITY: float = 0.35
