"""Experiment configuration: JSON files binding scenarios to campaigns.

The schema is strict: unknown keys anywhere are rejected, and every submodule
invariant is enforced at load time by constructing the actual objects.
Loading, serializing, and re-loading a config is the identity.
"""

import json
import math
from dataclasses import dataclass, field

from .channel import ChannelProfile
from .constellation import qpsk
from .errors import ConfigurationError
from .experiments import CHANNEL_PER_TRIAL, SimScenario, log_grid, make_scenario
from .phasefn import PhaseFunction

CAMPAIGNS = ("ber-vs-mismatch", "ber-vs-snr", "c2-sweep", "eavesdrop-search",
             "bound-report")

_SCENARIO_KEYS = {"n", "c1", "cpp_len", "snr_db", "trials", "master_seed",
                  "constellation", "channel_draw", "phase", "channel"}
_PHASE_KEYS = {"kind", "c2", "kappa", "a", "b"}
_CHANNEL_KEYS = {"powers", "delays", "dopplers", "nu_max", "coefficient_model"}
_GRID_KEYS = {"start", "stop", "points_per_decade", "values"}


def _check_keys(d: dict, allowed: set, ctx: str) -> None:
    if not isinstance(d, dict):
        raise ConfigurationError(f"{ctx}: expected an object, got {type(d).__name__}")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigurationError(f"{ctx}: unknown keys {sorted(unknown)}")


def _parse_snr(value) -> float:
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigurationError(f"snr_db string must be 'inf', got {value!r}")
    return float(value)


def parse_grid(d, ctx: str = "grid") -> tuple:
    """Either an explicit {"values": [...]} list or a log-spaced description."""
    _check_keys(d, _GRID_KEYS, ctx)
    if "values" in d:
        extra = set(d) - {"values"}
        if extra:
            raise ConfigurationError(f"{ctx}: 'values' excludes {sorted(extra)}")
        return tuple(float(v) for v in d["values"])
    try:
        return log_grid(float(d["start"]), float(d["stop"]),
                        int(d.get("points_per_decade", 10)))
    except KeyError as exc:
        raise ConfigurationError(f"{ctx}: missing {exc}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated campaign description plus its canonical dict form."""

    campaign: str
    scenario: SimScenario
    campaign_params: dict
    output: str
    raw: dict = field(repr=False, compare=False, default_factory=dict)


def _build_phase(d: dict, ctx: str = "phase") -> PhaseFunction:
    _check_keys(d, _PHASE_KEYS, ctx)
    try:
        return PhaseFunction.from_dict(d)
    except TypeError as exc:
        raise ConfigurationError(f"{ctx}: {exc}") from exc


def _build_scenario(d: dict) -> SimScenario:
    _check_keys(d, _SCENARIO_KEYS, "scenario")
    for key in ("n", "trials", "master_seed", "snr_db", "phase", "channel"):
        if key not in d:
            raise ConfigurationError(f"scenario: missing required key {key!r}")
    constellation = d.get("constellation", "qpsk")
    if constellation != "qpsk":
        raise ConfigurationError(
            f"scenario: only the 'qpsk' constellation ships, got {constellation!r}"
        )
    _check_keys(d["channel"], _CHANNEL_KEYS, "scenario.channel")
    profile = ChannelProfile.from_dict(d["channel"])
    phase = _build_phase(d["phase"], "scenario.phase")
    return make_scenario(
        phase,
        profile,
        n=int(d["n"]),
        snr_db=_parse_snr(d["snr_db"]),
        trials=int(d["trials"]),
        master_seed=int(d["master_seed"]),
        c1=None if d.get("c1") is None else float(d["c1"]),
        cpp_len=None if d.get("cpp_len") is None else int(d["cpp_len"]),
        constellation=qpsk(),
        channel_draw=d.get("channel_draw", CHANNEL_PER_TRIAL),
    )


def _validate_curves(curves, scenario_phase_dict, ctx: str) -> list:
    out = []
    for i, cd in enumerate(curves):
        _check_keys(cd, {"label", "phase", "delta"}, f"{ctx}[{i}]")
        if "label" not in cd:
            raise ConfigurationError(f"{ctx}[{i}]: missing 'label'")
        phase = _build_phase(cd.get("phase", scenario_phase_dict), f"{ctx}[{i}].phase")
        out.append({"label": str(cd["label"]), "phase": phase,
                    "delta": float(cd.get("delta", 0.0))})
    if len({c["label"] for c in out}) != len(out):
        raise ConfigurationError(f"{ctx}: duplicate curve labels")
    return out


def _parse_campaign_params(campaign: str, d: dict, scenario: SimScenario) -> dict:
    phase_dict = scenario.afdm.phase.to_dict()
    if campaign == "ber-vs-mismatch":
        _check_keys(d, {"delta_grid", "curves", "axis", "threshold",
                        "early_stop_errors"}, "campaign_params")
        if "delta_grid" not in d:
            raise ConfigurationError("ber-vs-mismatch: missing 'delta_grid'")
        early = d.get("early_stop_errors")
        params = {
            "delta_grid": parse_grid(d["delta_grid"], "delta_grid"),
            "axis": d.get("axis", "c2"),
            "threshold": float(d.get("threshold", 1e-3)),
            "early_stop_errors": None if early is None else int(early),
        }
        if params["axis"] not in ("c2", "kappa"):
            raise ConfigurationError(f"unknown axis {params['axis']!r}")
        curves = d.get("curves", [{"label": "default", "phase": phase_dict}])
        params["curves"] = _validate_curves(curves, phase_dict, "curves")
        return params
    if campaign == "ber-vs-snr":
        _check_keys(d, {"snr_grid", "curves"}, "campaign_params")
        if "snr_grid" not in d:
            raise ConfigurationError("ber-vs-snr: missing 'snr_grid'")
        curves = d.get("curves", [{"label": "default", "phase": phase_dict}])
        return {
            "snr_grid": tuple(_parse_snr(v) for v in d["snr_grid"]),
            "curves": _validate_curves(curves, phase_dict, "curves"),
        }
    if campaign == "c2-sweep":
        _check_keys(d, {"c2_values", "b", "delta_grid", "threshold",
                        "early_stop_errors"}, "campaign_params")
        for key in ("c2_values", "b", "delta_grid"):
            if key not in d:
                raise ConfigurationError(f"c2-sweep: missing {key!r}")
        if not d["c2_values"]:
            raise ConfigurationError("c2-sweep: c2_values is empty")
        early = d.get("early_stop_errors")
        return {
            "c2_values": tuple(float(v) for v in d["c2_values"]),
            "b": float(d["b"]),
            "delta_grid": parse_grid(d["delta_grid"], "delta_grid"),
            "threshold": float(d.get("threshold", 1e-3)),
            "early_stop_errors": None if early is None else int(early),
        }
    if campaign == "eavesdrop-search":
        _check_keys(d, {"axes", "pilot_frames", "threshold"}, "campaign_params")
        if "axes" not in d or not d["axes"]:
            raise ConfigurationError("eavesdrop-search: missing 'axes'")
        axes = []
        for i, ax in enumerate(d["axes"]):
            _check_keys(ax, {"name", "start", "stop", "points"}, f"axes[{i}]")
            for key in ("name", "start", "stop", "points"):
                if key not in ax:
                    raise ConfigurationError(f"axes[{i}]: missing {key!r}")
            axes.append({"name": ax["name"], "start": float(ax["start"]),
                         "stop": float(ax["stop"]), "points": int(ax["points"])})
        return {
            "axes": axes,
            "pilot_frames": int(d.get("pilot_frames", 8)),
            "threshold": float(d.get("threshold", 1e-3)),
        }
    if campaign == "bound-report":
        _check_keys(d, {"epsilon", "include_kappa", "kappa_range"}, "campaign_params")
        return {
            "epsilon": float(d.get("epsilon", 0.1)),
            "include_kappa": bool(d.get("include_kappa", False)),
            "kappa_range": tuple(float(v) for v in d.get("kappa_range", (0.0, 1.0))),
        }
    raise ConfigurationError(f"unknown campaign {campaign!r}")


def parse_config(raw: dict) -> ExperimentConfig:
    _check_keys(raw, {"campaign", "scenario", "campaign_params", "output"}, "config")
    for key in ("campaign", "scenario", "output"):
        if key not in raw:
            raise ConfigurationError(f"config: missing required key {key!r}")
    campaign = raw["campaign"]
    if campaign not in CAMPAIGNS:
        raise ConfigurationError(
            f"unknown campaign {campaign!r}; expected one of {CAMPAIGNS}"
        )
    scenario = _build_scenario(raw["scenario"])
    params = _parse_campaign_params(campaign, raw.get("campaign_params", {}), scenario)
    return ExperimentConfig(
        campaign=campaign,
        scenario=scenario,
        campaign_params=params,
        output=str(raw["output"]),
        raw=raw,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


def serialize_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.raw, indent=2, sort_keys=True) + "\n"


def save_config(cfg: ExperimentConfig, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_config(cfg))
