from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict


class Model(BaseModel):
    """
    Base of every rfiforge model.

    Fields may hold numpy arrays through the annotated types in `rfiforge.types.arrays`,
    and assignments are validated like construction.
    """

    model_config = ConfigDict(
        extra="allow",
        validate_assignment=True,
        arbitrary_types_allowed=True,
    )


class ResultModel(Model, frozen=True):
    """
    Immutable output of an operation or a study. Derive a changed copy with `model_copy`.
    """


class DocumentModel(Model, extra="forbid"):
    """
    A section of a JSON document read or written by the command line front end.
    Unknown keys are rejected.
    """

    def dump_json(self, **kwargs) -> dict[str, Any]:
        """
        Dump the document to JSON-compatible types

        Parameters
        ----------
        kwargs : dict[str, Any]
            Passed on to `model_dump`

        Returns
        -------
        dict[str, Any]
            The document, with enums as their values and arrays as nested lists
        """
        return self.model_dump(mode="json", **kwargs)
