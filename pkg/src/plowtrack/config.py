"""Run configuration: defaults, key=value config files, flag overrides.

Every report embeds the resolved configuration so a run can be reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from zoneinfo import ZoneInfo

from .errors import FormatError
from .matching import MatchThresholds


@dataclass
class RunConfig:
    timezone: str = "America/Indiana/Indianapolis"
    precision: int = 5
    interstate_m: float = 200.0
    state_m: float = 100.0
    local_m: float = 50.0
    hint_m: float = 250.0
    cap_seconds: float = 600.0
    abs_tol: float = 0.25
    rel_tol: float = 0.10

    def validate(self) -> None:
        try:
            ZoneInfo(self.timezone)
        except Exception as exc:
            raise ValueError(f"unknown timezone {self.timezone!r}") from exc
        if not 4 <= self.precision <= 7:
            raise ValueError(f"precision must be in [4, 7], got {self.precision}")
        self.thresholds()  # raises on bad threshold combinations
        if self.cap_seconds <= 0:
            raise ValueError("cap_seconds must be positive")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")

    def thresholds(self) -> MatchThresholds:
        return MatchThresholds(
            interstate_m=self.interstate_m,
            state_m=self.state_m,
            local_m=self.local_m,
            hint_m=self.hint_m,
        )

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def header_lines(self) -> list[str]:
        return [f"# {name} = {value}" for name, value in self.as_dict().items()]


_INT_KEYS = {"precision"}
_FLOAT_KEYS = {"interstate_m", "state_m", "local_m", "hint_m", "cap_seconds", "abs_tol", "rel_tol"}


def load_config(path) -> RunConfig:
    """Read ``key = value`` lines; '#' starts a comment, blanks are skipped."""
    config = RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    known = {f.name for f in fields(RunConfig)}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"expected 'key = value', got {raw!r}", file=str(path), line=line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise FormatError(f"unknown config key {key!r}", file=str(path), line=line_no)
        try:
            if key in _INT_KEYS:
                setattr(config, key, int(value))
            elif key in _FLOAT_KEYS:
                setattr(config, key, float(value))
            else:
                setattr(config, key, value)
        except ValueError as exc:
            raise FormatError(f"bad value for {key}: {value!r}", file=str(path), line=line_no) from exc
    return config
