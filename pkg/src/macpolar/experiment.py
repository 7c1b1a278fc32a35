"""Experiment configuration and the synthesize -> construct -> simulate pipeline.

A config is a JSON document::

    {
      "channel": {"source": "builtin", "name": "xor2"},
      "depth": 4,
      "synthesis": {"mode": "exact", "samples": 2000,
                    "merge": {"mode": "exact", "max_alphabet": 4096, "tolerance": 0.0}},
      "eps": {"policy": "fixed", "value": 0.01},
      "trials": 1000,
      "seed": 0,
      "output": {"dir": "out"}
    }

``channel.source`` is one of ``builtin`` (``name``, optional ``m`` and
``param``), ``file`` (``path`` to a MAC JSON file) or ``awgn`` (``m``,
``snr_db``, optional ``bins``, ``span``, ``power``).  ``n`` may replace
``depth``.  The ``eps`` policy is ``fixed`` (``value``) or ``schedule``
(``alpha``; eps = 2^-(n^alpha)).
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .channels import AwgnSpec, awgn_to_bmac, builtin
from .code import (construct_code, eps_schedule, simulate, stats_csv,
                   synthesize_channel_stats)
from .mac import Mac, rank_profile
from .transform import MergePolicy

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


_OUTPUT_NAMES = {"code": "code.json", "stats": "stats.csv", "trials": "trials.csv",
                 "report": "report.json"}


@dataclass
class ExperimentConfig:
    channel: dict
    depth: int
    synthesis_mode: str = "exact"
    samples: int = 2000
    merge: MergePolicy = field(default_factory=MergePolicy)
    eps_policy: str = "fixed"
    eps_value: float = 0.01
    eps_alpha: float = 0.4
    trials: int = 1000
    seed: int = 0
    out_dir: str = "out"
    outputs: dict = field(default_factory=lambda: dict(_OUTPUT_NAMES))

    @property
    def n(self) -> int:
        return 1 << self.depth

    def eps(self) -> float:
        if self.eps_policy == "fixed":
            return self.eps_value
        return eps_schedule(self.n, self.eps_alpha)

    def output_path(self, key: str) -> Path:
        return Path(self.out_dir) / self.outputs[key]

    @classmethod
    def from_dict(cls, d: dict, base: Path | None = None) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - {"channel", "depth", "n", "synthesis", "eps", "trials", "seed",
                            "output"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        ch = d.get("channel")
        if not isinstance(ch, dict) or ch.get("source") not in ("builtin", "file", "awgn"):
            raise ConfigError("channel.source must be builtin, file or awgn")
        ch = dict(ch)
        if ch["source"] == "file":
            if "path" not in ch:
                raise ConfigError("file channel needs a path")
            if base is not None and not Path(ch["path"]).is_absolute():
                ch["path"] = str(base / ch["path"])
        if ("depth" in d) == ("n" in d):
            raise ConfigError("give exactly one of depth or n")
        if "n" in d:
            n = int(d["n"])
            if n < 1 or n & (n - 1):
                raise ConfigError(f"n={n} is not a power of two")
            depth = n.bit_length() - 1
        else:
            depth = int(d["depth"])
        if not 0 <= depth <= 20:
            raise ConfigError(f"depth {depth} out of range")

        syn = d.get("synthesis", {})
        mode = syn.get("mode", "exact")
        if mode not in ("exact", "sampled"):
            raise ConfigError(f"synthesis.mode must be exact or sampled, not {mode!r}")
        mg = syn.get("merge", {})
        try:
            merge = MergePolicy(mg.get("mode", "exact"), float(mg.get("tolerance", 0.0)),
                                int(mg.get("max_alphabet", 4096)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

        ep = d.get("eps", {})
        policy = ep.get("policy", "fixed")
        if policy not in ("fixed", "schedule"):
            raise ConfigError("eps.policy must be fixed or schedule")
        trials = int(d.get("trials", 1000))
        if trials < 0:
            raise ConfigError("trials must be non-negative")
        out = d.get("output", {})
        names = dict(_OUTPUT_NAMES)
        names.update({k: v for k, v in out.items() if k in names})
        out_dir = out.get("dir", "out")
        if base is not None and not Path(out_dir).is_absolute():
            out_dir = str(base / out_dir)
        return cls(ch, depth, mode, int(syn.get("samples", 2000)), merge, policy,
                   float(ep.get("value", 0.01)), float(ep.get("alpha", 0.4)), trials,
                   int(d.get("seed", 0)), out_dir, names)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        return cls.from_dict(d, base=path.parent)

    def to_dict(self) -> dict:
        return {
            "channel": self.channel, "depth": self.depth,
            "synthesis": {"mode": self.synthesis_mode, "samples": self.samples,
                          "merge": asdict(self.merge)},
            "eps": {"policy": self.eps_policy, "value": self.eps_value, "alpha": self.eps_alpha},
            "trials": self.trials, "seed": self.seed,
            "output": {"dir": self.out_dir, **self.outputs},
        }


def load_channel(spec: dict) -> Mac:
    src = spec["source"]
    if src == "builtin":
        return builtin(spec["name"], spec.get("m"), spec.get("param"))
    if src == "file":
        return Mac.load(spec["path"])
    if src == "awgn":
        try:
            aw = AwgnSpec.from_snr(int(spec["m"]), float(spec["snr_db"]),
                                   int(spec.get("bins", 64)), float(spec.get("span", 6.0)),
                                   float(spec.get("power", 1.0)))
        except KeyError as exc:
            raise ConfigError(f"awgn channel needs {exc.args[0]}") from None
        return awgn_to_bmac(aw)
    raise ConfigError(f"unknown channel source {src!r}")


def stage_seeds(master: int) -> dict:
    """Independent integer seeds for each pipeline stage."""
    kids = np.random.SeedSequence(master).spawn(3)
    return {name: int(ss.generate_state(1)[0])
            for name, ss in zip(("synthesis", "frozen", "simulation"), kids)}


def run_experiment(config: ExperimentConfig, backend=None) -> dict:
    """Run the pipeline and write the four output files; return the report."""
    mac = load_channel(config.channel)
    seeds = stage_seeds(config.seed)
    log.info("m=%d |Y|=%d n=%d", mac.m, mac.n_outputs, config.n)
    stats = synthesize_channel_stats(mac, config.depth, config.synthesis_mode, config.merge,
                                     seed=seeds["synthesis"], samples=config.samples,
                                     backend=backend)
    eps = config.eps()
    spec = construct_code(stats, eps=eps, seed=seeds["frozen"])
    sim = simulate(spec, mac, config.trials, seed=seeds["simulation"], stats=stats,
                   backend=backend)

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec.save(config.output_path("code"))
    config.output_path("stats").write_text(stats_csv(stats))
    config.output_path("trials").write_text(sim.trials_csv())
    report = {
        "config": config.to_dict(),
        "seeds": seeds,
        "channel": {"m": mac.m, "outputs": mac.n_outputs,
                    "rank_profile": rank_profile(mac).tolist()},
        "eps": eps,
        "code": {"n": spec.n, "sum_rate": spec.sum_rate(),
                 "info_sizes": spec.info_sizes(),
                 "unpolarized_fraction": spec.unpolarized_fraction(),
                 "notes": spec.notes},
        "simulation": sim.to_dict(),
    }
    config.output_path("report").write_text(json.dumps(report, indent=1) + "\n")
    return report
