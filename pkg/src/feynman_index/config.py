"""Experiment configuration: one JSON document per CLI command.

Numbers whose bits matter (fluxes, ``beta`` values) may be written as
decimal strings; complex values as ``{"re": ..., "im": ...}``.
"""

from __future__ import annotations

import json
import math
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PositiveFloat,
    PositiveInt,
    TypeAdapter,
    ValidationError,
    field_validator,
    model_validator,
)

from .errors import ErrorCode, OperationError

__all__ = [
    "COMMANDS",
    "ExperimentConfig",
    "EtaConfig",
    "IndexConfig",
    "PropagatorConfig",
    "DistConfig",
    "HadamardConfig",
    "FullSuiteConfig",
    "TestFunctionConfig",
    "load_config",
    "parse_config",
]

COMMANDS = ("eta", "xi", "index", "propagator-check", "dist-check", "hadamard", "full-suite")


def _to_real(value) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number")
    if isinstance(value, str):
        try:
            return float(Decimal(value.strip()))
        except InvalidOperation as exc:
            raise ValueError(f"not a decimal string: {value!r}") from exc
    if isinstance(value, (int, float)):
        return float(value)
    raise ValueError("expected a number or decimal string")


def _to_complex(value) -> complex:
    if isinstance(value, complex):
        return value
    if isinstance(value, dict):
        extra = set(value) - {"re", "im"}
        if extra:
            raise ValueError(f"unexpected keys {sorted(extra)} in complex value")
        return complex(_to_real(value.get("re", 0.0)), _to_real(value.get("im", 0.0)))
    return complex(_to_real(value), 0.0)


def _finite_complex(value) -> complex:
    z = _to_complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("value must be finite")
    return z


def _finite_real(value) -> float:
    x = _to_real(value)
    if not math.isfinite(x):
        raise ValueError("value must be finite")
    return x


ComplexNumber = Annotated[complex, BeforeValidator(_finite_complex)]
RealNumber = Annotated[float, BeforeValidator(_finite_real)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, validate_default=True)


class FourierTerm(_Strict):
    """Coefficient ``V_m`` of ``e^{i m theta}``; a nested list for rank above one."""

    freq: int
    value: Union[ComplexNumber, list[list[ComplexNumber]]]


class _CircleModel(_Strict):
    K: PositiveInt = 200
    rank: PositiveInt = 1
    potential: list[FourierTerm] = Field(default_factory=list)

    @model_validator(mode="after")
    def _potential_shapes(self):
        for i, term in enumerate(self.potential):
            shape = (1, 1) if not isinstance(term.value, list) else (len(term.value), len(term.value[0]))
            if shape != (self.rank, self.rank):
                raise ValueError(f"potential[{i}].value has shape {shape}, expected {(self.rank, self.rank)}")
        return self

    def potential_coeffs(self) -> tuple:
        out = []
        for term in self.potential:
            value = term.value if isinstance(term.value, list) else [[term.value]]
            out.append((term.freq, value))
        return tuple(out)


class EtaConfig(_CircleModel):
    """Configuration of the ``eta`` and ``xi`` commands."""

    command: Literal["eta", "xi"]
    flux: ComplexNumber = complex(0.25)
    methods: list[Literal["zeta", "heat_fit", "smeared"]] = Field(
        default_factory=lambda: ["zeta", "heat_fit", "smeared"], min_length=1
    )
    ray_angle: RealNumber = math.pi
    tolerance: PositiveFloat = 1e-3
    reference: Optional[ComplexNumber] = None


class IndexConfig(_CircleModel):
    """Configuration of the ``index`` command."""

    command: Literal["index"] = "index"
    start: ComplexNumber
    end: ComplexNumber
    K: PositiveInt = 128
    t_minus: RealNumber = 0.0
    t_plus: RealNumber = 1.0
    margin: PositiveFloat = 0.1
    expected_index: Optional[int] = None
    index_tolerance: PositiveFloat = 1e-3
    boundary_tolerance: PositiveFloat = 2e-3
    duality_tolerance: PositiveFloat = 1e-8
    density: bool = True
    density_tolerance: PositiveFloat = 1e-4

    @model_validator(mode="after")
    def _interval(self):
        if not self.t_plus > self.t_minus:
            raise ValueError("t_plus must exceed t_minus")
        if not 2 * self.margin < self.t_plus - self.t_minus:
            raise ValueError("margin leaves no room for the gauge ramp")
        return self


class PropagatorConfig(_CircleModel):
    """Configuration of the ``propagator-check`` command."""

    command: Literal["propagator-check"] = "propagator-check"
    flux: ComplexNumber = complex(0.25)
    K: PositiveInt = 3
    jordan: bool = True
    jordan_K: PositiveInt = 2
    refinements: list[PositiveInt] = Field(default_factory=lambda: [100, 200, 400], min_length=3)
    t_span: PositiveFloat = 4.0
    order_tolerance: PositiveFloat = 0.1
    splitting_tolerance: PositiveFloat = 1e-12
    sample_times: list[RealNumber] = Field(default_factory=lambda: [0.35, 0.7, 1.9])

    @field_validator("refinements")
    @classmethod
    def _doubling(cls, value):
        if any(b != 2 * a for a, b in zip(value[:-1], value[1:])):
            raise ValueError("each refinement must double the previous number of steps")
        return value

    @field_validator("sample_times")
    @classmethod
    def _positive_times(cls, value):
        if any(t <= 0 for t in value):
            raise ValueError("sample times must be positive; their negatives are used as well")
        return value


class TestFunctionConfig(_Strict):
    """Isotropic Gaussian times a polynomial in the displacement from ``center``."""

    __test__ = False

    center: list[RealNumber] = Field(min_length=1)
    width: PositiveFloat = 1.0
    poly: Optional[list] = None


class DeltaCheckConfig(_Strict):
    family: Literal["F", "G"]
    beta: RealNumber
    n: PositiveInt
    Lambda: RealNumber = 1.0
    tolerance: PositiveFloat = 1e-3
    test_functions: Optional[list[TestFunctionConfig]] = None


class DistConfig(_Strict):
    """Configuration of the ``dist-check`` command."""

    command: Literal["dist-check"] = "dist-check"
    n: Literal[2, 3] = 2
    betas: list[RealNumber] = Field(default_factory=lambda: [0.5, 1.0, 1.5], min_length=1)
    Lambda: RealNumber = 1.0
    tolerance: PositiveFloat = 1e-6
    identities: Optional[list[str]] = None
    test_functions: Optional[list[TestFunctionConfig]] = None
    delta_checks: list[DeltaCheckConfig] = Field(default_factory=list)
    constants: bool = True
    constant_tolerance: PositiveFloat = 1e-12

    @model_validator(mode="after")
    def _dimensions(self):
        for i, tf in enumerate(self.test_functions or []):
            if len(tf.center) != self.n:
                raise ValueError(f"test_functions[{i}].center has {len(tf.center)} entries, expected n = {self.n}")
        for j, dc in enumerate(self.delta_checks):
            for i, tf in enumerate(dc.test_functions or []):
                if len(tf.center) != dc.n:
                    raise ValueError(f"delta_checks[{j}].test_functions[{i}].center has the wrong dimension")
        return self


class HadamardConfig(_Strict):
    """Configuration of the ``hadamard`` command."""

    command: Literal["hadamard"] = "hadamard"
    n: PositiveInt = 2
    B: list[list[ComplexNumber]] = Field(default_factory=lambda: [[0.7, 0.2], [-0.1, 0.4]])
    k_max: int = Field(default=3, ge=0, le=6)
    points: list[list[RealNumber]] = Field(default_factory=lambda: [[0.1, -0.2], [0.4, 0.3]])
    tolerance: PositiveFloat = 1e-8
    residual_tolerance: PositiveFloat = 1e-8

    @model_validator(mode="after")
    def _shapes(self):
        if any(len(row) != len(self.B) for row in self.B):
            raise ValueError("B must be square")
        for i, p in enumerate(self.points):
            if len(p) != self.n:
                raise ValueError(f"points[{i}] has {len(p)} coordinates, expected n = {self.n}")
        return self


class FullSuiteConfig(_Strict):
    """Configuration of the ``full-suite`` command; every field has a default."""

    command: Literal["full-suite"] = "full-suite"
    random_matrices: PositiveInt = 200
    matrix_size: PositiveInt = 8
    criteria: list[int] = Field(default_factory=lambda: list(range(1, 12)))

    @field_validator("criteria")
    @classmethod
    def _known(cls, value):
        bad = [c for c in value if not 1 <= c <= 11]
        if bad:
            raise ValueError(f"unknown criteria {bad}")
        return sorted(set(value))


_Payload = Annotated[
    Union[EtaConfig, IndexConfig, PropagatorConfig, DistConfig, HadamardConfig, FullSuiteConfig],
    Field(discriminator="command"),
]


class ExperimentConfig(_Strict):
    """Validated configuration plus the run-level settings.

    Attributes
    ----------
    payload : one of the command models
    seed : int
        Seed for the random-matrix property checks (unsigned 64 bit).
    out : str, optional
        Output directory.
    """

    payload: _Payload
    seed: int = Field(default=0, ge=0, lt=2**64)
    out: Optional[str] = None

    @property
    def command(self) -> str:
        return self.payload.command


_ADAPTER = TypeAdapter(ExperimentConfig)


def _field_path(loc) -> str:
    out = ""
    for item in loc:
        out += f"[{item}]" if isinstance(item, int) else ("." if out else "") + str(item)
    return out or "<root>"


def parse_config(data: dict, command: str | None = None, seed: int | None = None,
                 out: str | None = None) -> ExperimentConfig:
    """Validate a configuration mapping.

    ``command``, ``seed`` and ``out`` given here take precedence over the
    mapping. Errors are raised as ``CONFIG_INVALID`` naming the field.
    """
    if not isinstance(data, dict):
        raise OperationError(ErrorCode.CONFIG_INVALID, "<root>: configuration must be a JSON object")
    payload = dict(data)
    run_seed = payload.pop("seed", 0) if seed is None else seed
    run_out = payload.pop("out", None) if out is None else out
    payload.pop("seed", None)
    payload.pop("out", None)
    if command is not None:
        if "command" in payload and payload["command"] != command:
            raise OperationError(
                ErrorCode.CONFIG_INVALID, f"command: config says {payload['command']!r} but {command!r} was requested"
            )
        payload["command"] = command
    if payload.get("command") not in COMMANDS:
        raise OperationError(ErrorCode.CONFIG_INVALID, f"command: must be one of {', '.join(COMMANDS)}")
    try:
        return _ADAPTER.validate_python({"payload": payload, "seed": run_seed, "out": run_out})
    except ValidationError as exc:
        messages = []
        for err in exc.errors():
            loc = [p for p in err["loc"] if p not in ("payload", payload["command"])]
            # drop pydantic's union-branch labels such as "function-after[...]"
            loc = [p for p in loc if not (isinstance(p, str) and "[" in p)]
            messages.append(f"{_field_path(loc)}: {err['msg']}")
        raise OperationError(ErrorCode.CONFIG_INVALID, "; ".join(messages)) from None


def load_config(path, command: str | None = None, seed: int | None = None, out: str | None = None) -> ExperimentConfig:
    """Read a UTF-8 JSON file and validate it with :func:`parse_config`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OperationError(ErrorCode.CONFIG_INVALID, f"<file>: cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OperationError(ErrorCode.CONFIG_INVALID, f"<file>: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_config(data, command, seed, out)
