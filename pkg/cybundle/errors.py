from typing import Any


class CyBundleError(Exception):
    """Base class for every domain error raised by the library."""

    kind = "error"

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "message": self.message}
        if self.details:
            d["details"] = self.details
        return d


class LatticeError(CyBundleError, ValueError):
    kind = "lattice"


class FgaError(CyBundleError, ValueError):
    kind = "fga"


class PicardError(CyBundleError):
    kind = "picard"


class BundleError(CyBundleError):
    kind = "bundle"


class ToricError(CyBundleError):
    kind = "toric"


class RmError(CyBundleError):
    kind = "rm"


class ConfigError(CyBundleError):
    kind = "config"


class InputError(CyBundleError):
    kind = "input"
