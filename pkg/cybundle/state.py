from enum import Enum


class RigidityOutcome(Enum):
    FOUND = "FOUND"
    ABSENT = "ABSENT"
    UNDECIDED = "UNDECIDED"
    UNSUPPORTED = "UNSUPPORTED"


class Verdict(Enum):
    SUFFICIENT = "SUFFICIENT"
    INSUFFICIENT = "INSUFFICIENT"
    UNKNOWN = "UNKNOWN"


class ProvenanceKind(Enum):
    WHITNEY_SUM = "whitney-sum"
    UNIVERSAL_COVER = "universal-cover"
    INDUCED = "induced"
    TWIST = "twist"
    DIRECT_SUM = "direct-sum"
    CUSTOM = "custom"
