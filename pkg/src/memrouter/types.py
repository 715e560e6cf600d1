"""Shared domain types, validation and the JSON configuration schema.

All quantities are in SI base units (ohm, volt, ampere, second). Prose units
(kOhm, uA, ns) are never used in the data model, only in messages, to avoid
silent 1e3 scaling mistakes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "DeviceParams",
    "TransistorParams",
    "ChannelConfig",
    "SwitchMatrix",
    "SpikeTrainSet",
    "ChannelSolution",
    "ConfigError",
    "validate_config",
    "default_config",
    "config_to_dict",
    "config_from_dict",
    "load_config",
    "save_config",
    "apply_overrides",
]


class ConfigError(ValueError):
    """Raised when a configuration document cannot be used."""


@dataclass(frozen=True)
class DeviceParams:
    """Binary memristor abstraction: LRS/HRS resistances plus optional spread.

    sigma_log is the lognormal spread applied per cell when device
    variability is enabled; 0 means deterministic resistances.
    """

    r_on: float
    r_off: float
    sigma_log: float = 0.0

    @property
    def k(self) -> float:
        """Device on/off ratio r_off / r_on."""
        return self.r_off / self.r_on


@dataclass(frozen=True)
class TransistorParams:
    """Access FET in routing mode: on-state series resistance and off leakage.

    i_leak_per_fet is the off-state current of a single FET at the configured
    read voltage; the solvers convert it to an equivalent linear off
    resistance v_read / i_leak_per_fet.
    """

    r_t: float = 0.0
    i_leak_per_fet: float = 0.0


@dataclass(frozen=True)
class ChannelConfig:
    """Geometry and electrical operating point of one routing channel."""

    n_rows: int
    r_line: float
    v_read: float
    i_ref: float
    device: DeviceParams
    transistor: TransistorParams = field(default_factory=TransistorParams)


@dataclass(frozen=True)
class SwitchMatrix:
    """Binary routing table of an n_wl x n_ch crossbar.

    state[i, c] is True when the cell connecting word line i to channel c is
    programmed to LRS ("on", spike propagates).
    """

    n_wl: int
    n_ch: int
    state: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.state, dtype=bool)
        if arr.shape != (self.n_wl, self.n_ch):
            raise ValueError(
                f"state shape {arr.shape} does not match "
                f"({self.n_wl}, {self.n_ch})"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "state", arr)


@dataclass(frozen=True)
class SpikeTrainSet:
    """Rectangular pulse trains, one sorted array of start times per input."""

    n_inputs: int
    pulses: tuple
    t_pw: float
    duration: float

    def __post_init__(self):
        if len(self.pulses) != self.n_inputs:
            raise ValueError("pulses length must equal n_inputs")
        frozen = []
        for starts in self.pulses:
            arr = np.asarray(starts, dtype=float)
            if arr.size and (np.any(np.diff(arr) <= 0)):
                raise ValueError("pulse start times must be strictly increasing")
            if arr.size and (arr[0] < 0 or arr[-1] > self.duration):
                raise ValueError("pulse start times must lie in [0, duration]")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "pulses", tuple(frozen))


@dataclass(frozen=True)
class ChannelSolution:
    """Solved electrical state of one channel.

    node_voltages are the source-line node potentials (node n is the sense
    terminal, held at virtual ground). branch_currents are per-row currents,
    positive toward the source line. i_sl is the sensed terminal current.
    """

    node_voltages: np.ndarray
    branch_currents: np.ndarray
    i_sl: float


def validate_config(cfg: ChannelConfig) -> list[str]:
    """Check every config invariant; returns violation messages (empty = ok).

    Total on any finite numeric input: violations are data, not exceptions.
    """
    v: list[str] = []
    d, t = cfg.device, cfg.transistor
    if not d.r_on > 0:
        v.append(f"device.r_on must be > 0 (got {d.r_on})")
    if not d.r_off > d.r_on:
        v.append(
            f"device on/off ratio k must exceed 1: r_off={d.r_off} "
            f"is not greater than r_on={d.r_on}"
        )
    if not d.sigma_log >= 0:
        v.append(f"device.sigma_log must be >= 0 (got {d.sigma_log})")
    if not t.r_t >= 0:
        v.append(f"transistor.r_t must be >= 0 (got {t.r_t})")
    if not t.i_leak_per_fet >= 0:
        v.append(f"transistor.i_leak_per_fet must be >= 0 (got {t.i_leak_per_fet})")
    if not cfg.n_rows >= 1:
        v.append(f"channel.n_rows must be >= 1 (got {cfg.n_rows})")
    if not cfg.r_line >= 0:
        v.append(f"channel.r_line must be >= 0 (got {cfg.r_line})")
    if not cfg.v_read > 0:
        v.append(f"channel.v_read must be > 0 (got {cfg.v_read})")
    if not cfg.i_ref > 0:
        v.append(f"channel.i_ref must be > 0 (got {cfg.i_ref})")
    return v


def default_config() -> ChannelConfig:
    """Defaults calibrated to the 4K ReRAM chip and 22 nm FDSOI numbers."""
    return ChannelConfig(
        n_rows=1024,
        r_line=2.5,
        v_read=0.2,
        i_ref=6e-6,
        device=DeviceParams(r_on=10e3, r_off=200e3, sigma_log=0.0),
        transistor=TransistorParams(r_t=1.7e3, i_leak_per_fet=10e-9 / 256),
    )


def config_to_dict(cfg: ChannelConfig, extras: dict | None = None) -> dict:
    """Serialize to the external JSON document layout."""
    doc = {
        "channel": {
            "n_rows": cfg.n_rows,
            "r_line": cfg.r_line,
            "v_read": cfg.v_read,
            "i_ref": cfg.i_ref,
        },
        "device": {
            "r_on": cfg.device.r_on,
            "r_off": cfg.device.r_off,
            "sigma_log": cfg.device.sigma_log,
        },
        "transistor": {
            "r_t": cfg.transistor.r_t,
            "i_leak_per_fet": cfg.transistor.i_leak_per_fet,
        },
    }
    if extras:
        doc.update(extras)
    return doc


def config_from_dict(doc: dict) -> ChannelConfig:
    """Parse the external JSON document layout; unknown top-level keys
    (simulation, sweep, ...) are ignored here and read by their consumers."""
    try:
        ch = doc["channel"]
        dev = doc["device"]
    except KeyError as exc:
        raise ConfigError(f"missing top-level config section: {exc}") from exc
    tr = doc.get("transistor", {})
    try:
        return ChannelConfig(
            n_rows=int(ch["n_rows"]),
            r_line=float(ch["r_line"]),
            v_read=float(ch["v_read"]),
            i_ref=float(ch["i_ref"]),
            device=DeviceParams(
                r_on=float(dev["r_on"]),
                r_off=float(dev["r_off"]),
                sigma_log=float(dev.get("sigma_log", 0.0)),
            ),
            transistor=TransistorParams(
                r_t=float(tr.get("r_t", 0.0)),
                i_leak_per_fet=float(tr.get("i_leak_per_fet", 0.0)),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc


def load_config(path) -> tuple[ChannelConfig, dict]:
    """Load a JSON config file; returns (ChannelConfig, full document)."""
    with open(path) as fh:
        doc = json.load(fh)
    return config_from_dict(doc), doc


def save_config(cfg: ChannelConfig, path, extras: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(config_to_dict(cfg, extras), fh, indent=2)
        fh.write("\n")


def apply_overrides(doc: dict, assignments: list[str]) -> dict:
    """Apply dotted-path overrides of the form 'channel.n_rows=512'.

    Values are parsed as JSON when possible, otherwise kept as strings.
    The path must resolve into the document schema (existing sections).
    """
    out = json.loads(json.dumps(doc))  # deep copy, JSON-only content
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value: {item!r}")
        path, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        parts = path.strip().split(".")
        node = out
        for p in parts[:-1]:
            if not isinstance(node, dict) or p not in node:
                raise ConfigError(f"unknown config path: {path!r}")
            node = node[p]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise ConfigError(f"unknown config path: {path!r}")
        node[parts[-1]] = value
    return out


def with_device(cfg: ChannelConfig, **kw) -> ChannelConfig:
    """Convenience: replace device fields on an existing config."""
    return replace(cfg, device=replace(cfg.device, **kw))


def with_transistor(cfg: ChannelConfig, **kw) -> ChannelConfig:
    """Convenience: replace transistor fields on an existing config."""
    return replace(cfg, transistor=replace(cfg.transistor, **kw))
