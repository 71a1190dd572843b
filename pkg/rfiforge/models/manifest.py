from __future__ import annotations

from typing import Any

from pydantic import Field

from rfiforge.models.model import DocumentModel


class RunManifest(DocumentModel):
    """
    Record of one command line run, written next to its outputs as `manifest.json`.

    Parameters
    ----------
    command : str
        The subcommand that was run
    tool_version : str
        The rfiforge version
    config_hash : str
        SHA-256 of the canonical configuration document, before command line overrides
    base_seed : int
        The seed actually used, after overrides
    files : dict[str, str]
        SHA-256 of every emitted file, keyed by file name
    timings : dict[str, float]
        Wall-clock seconds per stage
    metadata : dict[str, Any]
        Estimator choices and scenario details
    """

    command: str
    tool_version: str
    config_hash: str
    base_seed: int = Field(ge=0)
    files: dict[str, str] = Field(default_factory=dict)
    timings: dict[str, float] = Field(default_factory=dict)
    metadata: dict[str, Any] = Field(default_factory=dict)
