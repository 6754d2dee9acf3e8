"""Experiment configuration file (JSON, or YAML by extension).

Units live in the key names: ``t1_us``, ``t_gate_ns``, ``zz_khz`` (xi / 2pi).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..circuit import Circuit, build_h2_ansatz, build_ldca
from ..noise import NoiseConfig
from ..pauli import Observable

SCENARIOS = ("scan_L", "scan_pi", "compare")


class ConfigError(Exception):
    """Invalid configuration; ``str()`` lists one ``field.path: message`` per line."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class H2Ansatz(_Strict):
    kind: Literal["h2"]
    theta0: float = -6.057


class LdcaAnsatz(_Strict):
    kind: Literal["ldca"]
    thetas: list[float] = Field(
        default=[-1.491, 1.838, 1.977, 2.305, -3.124, 2.049, 1.254, -1.791],
        min_length=8,
        max_length=8,
    )


class NoiseSection(_Strict):
    t1_us: float = Field(84.0, gt=0)
    t2_us: float = Field(110.0, gt=0)
    t_step_ns: float = Field(100.0, gt=0)
    t_gate_ns: float = Field(400.0, gt=0)
    zz_khz: float = Field(0.0, ge=0)
    zz_pairs: Optional[list[tuple[int, int]]] = None
    incoherent: bool = True
    coherent: bool = True

    def build(self, n: int) -> NoiseConfig:
        return NoiseConfig.from_units(n, **self.model_dump())


class ExperimentConfig(_Strict):
    scenario: Optional[Literal["scan_L", "scan_pi", "compare"]] = None
    ansatz: Annotated[Union[H2Ansatz, LdcaAnsatz], Field(discriminator="kind")] = H2Ansatz(kind="h2")
    observable: str = "XXXX"
    noise: Optional[NoiseSection] = None
    M: int = Field(20000, ge=1)
    L_max: int = Field(8, ge=0)
    L: int = Field(1, ge=0)
    lmax_values: list[int] = Field(default=[1, 2, 3, 4, 5], min_length=1)
    N: int = Field(50, ge=1)
    B: int = Field(64, ge=1)
    grid: tuple[int, int] = (2001, 501)
    repeats: int = Field(50, ge=1)
    sweep_points: int = Field(200, ge=3)
    seed: int = Field(2022, ge=0, lt=2**64)
    n_o: Optional[int] = Field(None, ge=0)
    workers: int = Field(1, ge=1)
    output: str = "results"

    @field_validator("observable")
    @classmethod
    def _pauli_label(cls, v: str) -> str:
        label = v.strip().upper()
        if not label or any(ch not in "IXYZ" for ch in label) or set(label) == {"I"}:
            raise ValueError("must be a non-identity Pauli label over I, X, Y, Z")
        return label

    @field_validator("lmax_values")
    @classmethod
    def _lmax_values(cls, v: list[int]) -> list[int]:
        if any(x < 0 for x in v):
            raise ValueError("layer counts must be non-negative")
        if len(set(v)) != len(v):
            raise ValueError("layer counts must be distinct")
        return sorted(v)

    @field_validator("grid")
    @classmethod
    def _grid(cls, v: tuple[int, int]) -> tuple[int, int]:
        if v[0] < 3 or v[1] < 3:
            raise ValueError("grid needs at least 3 points per axis")
        return v

    @model_validator(mode="after")
    def _consistent(self) -> ExperimentConfig:
        n = 4 if self.ansatz.kind == "h2" else 2
        if len(self.observable) != n:
            raise ValueError(
                f"observable {self.observable} acts on {len(self.observable)} qubits, "
                f"ansatz {self.ansatz.kind} on {n}"
            )
        return self

    def num_qubits(self) -> int:
        return 4 if self.ansatz.kind == "h2" else 2

    def build_ansatz(self, theta0: float | None = None) -> Circuit:
        if self.ansatz.kind == "h2":
            return build_h2_ansatz(self.ansatz.theta0 if theta0 is None else theta0)
        return build_ldca(self.ansatz.thetas)

    def build_observable(self) -> Observable:
        return Observable.from_label(self.observable)

    def build_noise(self) -> NoiseConfig | None:
        return None if self.noise is None else self.noise.build(self.num_qubits())

    def check_scenario(self, scenario: str) -> None:
        problems = []
        if self.scenario is not None and self.scenario != scenario:
            problems.append(f"scenario: config declares {self.scenario!r} but {scenario!r} was requested")
        if scenario == "scan_pi" and self.ansatz.kind != "h2":
            problems.append("ansatz.kind: scan_pi sweeps theta0 and needs the h2 ansatz")
        shots = self.M
        if scenario == "compare":
            shots = self.M // (max(self.lmax_values) + 1)
        if shots < self.N:
            problems.append(f"N: {self.N} duplicates exceed the {shots} shots per circuit")
        if problems:
            raise ConfigError("\n".join(problems))


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        path = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{path}: {e['msg']}")
    return "\n".join(lines)


def parse_config(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_format_errors(err)) from None


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"<file>: cannot read {path}: {err.strerror}") from None
    try:
        if path.suffix in (".yaml", ".yml"):
            import yaml

            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except Exception as err:  # noqa: BLE001 - any parse failure is a config error
        raise ConfigError(f"<file>: cannot parse {path}: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>: config must be a mapping")
    return parse_config(data)
