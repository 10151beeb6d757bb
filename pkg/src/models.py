from enum import Enum


class LabelKind(str, Enum):
    BRANCHING = "branching"
    ASSIGNMENT = "assignment"
    CALL = "call"
    NONDETERMINISTIC = "nondeterministic"
    TERMINAL = "terminal"


class Action(str, Enum):
    TAU = "tau"
    THEN = "th"
    ELSE = "el"


class Branch(str, Enum):
    TRUE = "true"
    FALSE = "false"
    THEN = "then"
    ELSE = "else"


class SchedulerKind(str, Enum):
    GREEDY_MAX = "greedy-max"
    GREEDY_MIN = "greedy-min"
    ALWAYS_THEN = "always-then"
    ALWAYS_ELSE = "always-else"
    UNIFORM = "uniform"

    @property
    def needs_certificate(self) -> bool:
        return self in (SchedulerKind.GREEDY_MAX, SchedulerKind.GREEDY_MIN)


class CertKind(str, Enum):
    RANKING = "ranking"
    CDB = "cdb"
    DB = "db"
    SUPER = "super"


class LabTag(str, Enum):
    NONNEGATIVITY = "nonnegativity"
    CBOUNDED = "cbounded"
    NONCONCENTRATION = "noconcentration"
    RANDOMWALK = "randomwalk"
    POSITIVITY = "positivity"


class LabQuery(str, Enum):
    PROB_NONTERM = "prob_nonterm"
    EXPECTED_T = "expected_T"
    TAIL = "tail"


class OutputFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


class Command(str, Enum):
    PARSE = "parse"
    CFG = "cfg"
    SIMULATE = "simulate"
    CHECK = "check"
    BOUNDS = "bounds"
    LAB = "lab"


class WalkEncoding(str, Enum):
    LOOP = "loop"
    RECURSION = "recursion"
