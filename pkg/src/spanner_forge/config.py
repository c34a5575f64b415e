"""Runtime settings for spanner-forge.

The settings are a QCoDeS instrument-like object: every knob is a manual
QCoDeS ``Parameter`` with a validator, so values are checked on assignment,
appear in snapshots and can be printed with ``print_readable_snapshot``.

Every knob can be overridden from the environment with
``SPANNER_FORGE_<NAME>`` (e.g. ``SPANNER_FORGE_THREADS=8``).
"""

import math
import os
import typing as t
from contextlib import contextmanager

from qcodes.instrument import InstrumentBase
from qcodes.parameters import Parameter
from qcodes.validators import Enum, Ints, MultiType, Numbers, Validator

from spanner_forge.exceptions import InputError

ENV_PREFIX = "SPANNER_FORGE_"


class OpenInterval(Validator):
    """Validator for real numbers in an open interval ``(low, high)``.

    Args:
        low: Exclusive lower bound.
        high: Exclusive upper bound (may be ``math.inf``).
    """

    is_numeric = True

    def __init__(self, low: float, high: float = math.inf):
        self._low = low
        self._high = high
        sample = low + 1 if math.isinf(high) else (low + high) / 2
        self._valid_values = (sample,)

    def validate(self, value: t.Any, context: str = "") -> None:
        """Validate ``value``.

        Args:
            value: Value to check.
            context: Context information added to the error message.

        Raises:
            TypeError: If the value is not a real number.
            ValueError: If the value is outside the interval.
        """
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(f"{value!r} is not a real number; {context}")
        if not self._low < value < self._high or math.isnan(value):
            raise ValueError(
                f"{value!r} is not in the open interval "
                f"({self._low}, {self._high}); {context}"
            )

    def __repr__(self) -> str:
        return f"<OpenInterval({self._low}, {self._high})>"

    @property
    def low(self) -> float:
        """Exclusive lower bound."""
        return self._low

    @property
    def high(self) -> float:
        """Exclusive upper bound."""
        return self._high


def check_open_interval(
    value: float, low: float, high: float = math.inf, name: str = "value"
) -> float:
    """Validate a number against an open interval and raise ``InputError``.

    Args:
        value: Number to check.
        low: Exclusive lower bound.
        high: Exclusive upper bound.
        name: Name used in the error message.

    Returns:
        The value as float.

    Raises:
        InputError: If the value is not a real number inside ``(low, high)``.
    """
    try:
        OpenInterval(low, high).validate(value, name)
    except (TypeError, ValueError) as error:
        raise InputError(str(error)) from error
    return float(value)


def _parse_env(raw: str, default: t.Any) -> t.Any:
    if raw.strip().lower() in ("none", ""):
        return None
    if isinstance(default, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    try:
        return int(raw)
    except ValueError:
        return raw


class ForgeSettings(InstrumentBase):
    """Container of all tunable settings.

    Args:
        name: Name of the settings object in snapshots.
        environ: Mapping used for overrides. (default = ``os.environ``)
    """

    def __init__(
        self, name: str = "spanner_forge", environ: t.Optional[t.Mapping] = None
    ):
        super().__init__(name)
        self._defaults: t.Dict[str, t.Any] = {}
        self._add_knob(
            "threads",
            4,
            Ints(1, 256),
            "Upper bound on worker threads for batch and per-class fan out.",
        )
        self._add_knob(
            "tolerance",
            1e-9,
            Numbers(0, 1e-3),
            "Relative tolerance of every distance comparison.",
        )
        self._add_knob(
            "cluster_g",
            29,
            Ints(6, 10_000),
            "Diameter constant g: clusters at scale l have diameter at most g * l.",
        )
        self._add_knob(
            "credit_safety",
            1.0,
            OpenInterval(0),
            "Safety factor a of the credit rate a * max(W_s / eps^2, g / eps^3).",
        )
        self._add_knob(
            "calibration_queries",
            4,
            Ints(0, 1000),
            "Number of oracle queries used to estimate the weak sparsity.",
        )
        self._add_knob(
            "degree_threshold",
            None,
            MultiType(Ints(1), Enum(None)),
            "High-degree threshold in the cluster graph (None: 2g/eps + 1).",
        )
        self._add_knob(
            "net_divisor",
            96.0,
            OpenInterval(0),
            "Net radius divisor of the doubling oracle (r = eps * l / divisor).",
        )
        self._add_knob(
            "band_divisor",
            16.0,
            OpenInterval(1),
            "Lower band divisor of the doubling oracle (edges in [l/div, 2l]).",
        )
        self._add_knob(
            "depth_factor",
            4.0,
            OpenInterval(0),
            "Recursion depth cap factor of ell_close_spanner (cap = f * log2 n).",
        )
        self._add_knob(
            "held_karp_cap",
            20,
            Ints(1, 30),
            "Largest terminal count accepted by Held-Karp.",
        )
        self._add_knob(
            "matching_exact_cap",
            20,
            Ints(0, 200),
            "Largest odd-vertex count fixed by exact minimum-weight matching.",
        )
        self._add_knob(
            "dp_width_cap",
            6,
            Ints(1, 50),
            "Largest heuristic treewidth accepted by the subset-TSP DP.",
        )
        self._add_knob(
            "reduction",
            "rank",
            Enum("rank", "keep-all"),
            "Representative-set reduction of the subset-TSP DP.",
        )
        self._apply_environment(os.environ if environ is None else environ)

    def _add_knob(
        self, name: str, default: t.Any, vals: Validator, docstring: str
    ) -> None:
        self.add_parameter(
            name,
            parameter_class=Parameter,
            initial_value=default,
            set_cmd=None,
            vals=vals,
            docstring=docstring,
        )
        self._defaults[name] = default

    def _apply_environment(self, environ: t.Mapping) -> None:
        for name, default in self._defaults.items():
            raw = environ.get(ENV_PREFIX + name.upper())
            if raw is None:
                continue
            try:
                self.parameters[name](_parse_env(raw, default))
            except (TypeError, ValueError) as error:
                raise InputError(
                    f"Invalid value {raw!r} for {ENV_PREFIX + name.upper()}: {error}"
                ) from error

    def get(self, name: str) -> t.Any:
        """Current value of a knob.

        Args:
            name: Name of the knob.

        Returns:
            Current value.
        """
        return self.parameters[name]()

    def resolve(self, name: str, value: t.Any) -> t.Any:
        """Return ``value`` unless it is None, then the configured knob value."""
        return self.get(name) if value is None else value

    def as_dict(self) -> t.Dict[str, t.Any]:
        """Plain dictionary of all knob values (for reports)."""
        return {name: param() for name, param in sorted(self.parameters.items())}

    def reset(self) -> None:
        """Restore all knobs to their built-in defaults."""
        for name, default in self._defaults.items():
            self.parameters[name](default)

    @contextmanager
    def override(self, **values: t.Any) -> t.Iterator["ForgeSettings"]:
        """Temporarily change knobs inside a ``with`` block.

        Examples:
            >>> with settings.override(degree_threshold=3):
                    build_subset_spanner(graph, terminals, oracle, 0.02)
        """
        unknown = sorted(set(values) - set(self.parameters))
        if unknown:
            raise InputError(f"Unknown settings {unknown}")
        previous = {name: self.get(name) for name in values}
        try:
            for name, value in values.items():
                self.parameters[name](value)
            yield self
        finally:
            for name, value in previous.items():
                self.parameters[name](value)


settings = ForgeSettings()

__all__ = [
    "ENV_PREFIX",
    "ForgeSettings",
    "OpenInterval",
    "check_open_interval",
    "settings",
]
