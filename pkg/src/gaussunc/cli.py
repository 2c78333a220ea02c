"""Command-line entry point.

Settings come from the shipped ``defaults.ini``, then an optional
``--config`` file, then command-line flags. Every output carries the
effective settings so that a run can be repeated exactly.

Exit codes: 0 success, 1 suite failure or refusal, 2 usage or invalid
configuration, 3 input/output failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from . import experiments as ex
from .adversary import CASES, STRATEGIES, AliceBindingAttack, concealment_attack_views
from .errors import ParameterError, ProtocolViolation, Refusal
from .protocol import (ProtocolParams, RevealClaim, Transcript, desk_params, honest_run,
                       replay, shared_code)
from .rates import ChannelParams, Flag, SweepGrid, commit_rate, rate_report, sweep_rate_curves

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

COMMANDS = ("rates", "sweep", "simulate", "attack", "reduce-check", "experiment", "replay")


class ConfigError(Exception):
    """Aggregated configuration errors."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass
class RunConfig:
    """Validated settings for one invocation."""

    command: str
    settings: dict
    seed: int
    fmt: str
    out: Optional[str]
    channel: Optional[ChannelParams] = None
    protocol: Optional[ProtocolParams] = None
    extra: dict = field(default_factory=dict)


# configuration

def load_defaults() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=None)
    text = resources.files("gaussunc").joinpath("defaults.ini").read_text()
    cp.read_string(text)
    return cp


def _flag(p, option, key, **kw):
    kw.setdefault("metavar", option.lstrip("-").upper())
    p.add_argument(option, dest=key, default=argparse.SUPPRESS, **kw)


def _channel_flags(p, section="channel"):
    _flag(p, "--gamma2", f"{section}.gamma2", help="lower noise variance")
    _flag(p, "--delta2", f"{section}.delta2", help="upper noise variance")


def _protocol_flags(p, section="protocol"):
    _flag(p, "--n", f"{section}.n", help="blocklength")
    _flag(p, "--power", "protocol.power", help="input power P")
    for name in ("alpha1", "beta1", "beta2", "beta3", "eta"):
        _flag(p, f"--{name}", f"{section}.{name}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _flag(common, "--config", "config", help="settings file overriding the defaults")
    _flag(common, "--seed", "run.seed", help="master seed")
    _flag(common, "--out", "out", help="output file (default stdout)")
    _flag(common, "--format", "run.format", help="json or csv")

    parser = argparse.ArgumentParser(prog="gaussunc", parents=[common],
                                     description="Commitment over Gaussian unfair noisy channels.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("rates", parents=[common], help="rate formulas at one operating point")
    _channel_flags(p)
    _flag(p, "--power", "protocol.power", help="input power P")
    _flag(p, "--beta3", "protocol.beta3", help="extractor slack for the commitment rate")

    p = sub.add_parser("sweep", parents=[common], help="rate curve over a grid")
    _channel_flags(p)
    _flag(p, "--kind", "sweep.kind", help="power or gamma2")
    _flag(p, "--lo", "sweep.lo")
    _flag(p, "--hi", "sweep.hi")
    _flag(p, "--num", "sweep.num")

    p = sub.add_parser("simulate", parents=[common], help="one honest commit and reveal")
    _channel_flags(p)
    _protocol_flags(p)
    _flag(p, "--theta2", "simulate.theta2", help="channel variance (default gamma2)")
    _flag(p, "--message", "simulate.message", help="committed value (default random)")
    _flag(p, "--trial", "simulate.trial", help="trial index for the random streams")

    p = sub.add_parser("attack", parents=[common], help="binding attack success estimate")
    _channel_flags(p)
    _protocol_flags(p, "binding")
    _flag(p, "--kind", "attack.kind", help="binding, concealment or reduction")
    _flag(p, "--strategy", "attack.strategy", help=", ".join(STRATEGIES))
    _flag(p, "--m", "concealment.m", help="message bits for the concealment oracle")
    _flag(p, "--l", "concealment.l", help="extractor output bits for the concealment oracle")
    _flag(p, "--case", "reduction.case", help=", ".join(CASES))
    _flag(p, "--samples", "reduction.samples")
    _flag(p, "--s2", "attack.s2", help="variance chosen by Alice (default gamma2)")
    _flag(p, "--trials", "run.trials")
    p.add_argument("--no-g2", dest="attack.no_g2", action="store_true", default=argparse.SUPPRESS,
                   help="ablate the second hash challenge")

    p = sub.add_parser("reduce-check", parents=[common], help="channel reduction equivalence")
    _channel_flags(p, "reduction")
    _flag(p, "--case", "reduction.case", help=", ".join(CASES))
    _flag(p, "--samples", "reduction.samples")
    _flag(p, "--alpha", "run.alpha", help="significance level")

    p = sub.add_parser("experiment", parents=[common], help="acceptance suites and tables")
    esub = p.add_subparsers(dest="action", metavar="action")
    esub.required = True
    r = esub.add_parser("run", parents=[common], help="run one suite or all")
    r.add_argument("suite", choices=ex.SUITES + ("all",))
    _flag(r, "--trials", "run.trials")
    r = esub.add_parser("report", parents=[common], help="rate table in figure layout")
    r.add_argument("table", choices=("power", "gamma2"))
    _channel_flags(r)
    _flag(r, "--lo", "sweep.lo")
    _flag(r, "--hi", "sweep.hi")
    _flag(r, "--num", "sweep.num")

    p = sub.add_parser("replay", parents=[common], help="re-verify a saved simulate output")
    p.add_argument("input", help="JSON written by `simulate`")
    return parser


def _merge(cp: configparser.ConfigParser, ns: dict) -> None:
    for key, value in ns.items():
        if "." not in key:
            continue
        section, name = key.split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, str(value))


def _effective(cp: configparser.ConfigParser) -> dict:
    return {f"{s}.{k}": cp.get(s, k) for s in cp.sections() for k in cp.options(s)}


class _Reader:
    """Typed access to config values that records, rather than raises, errors."""

    def __init__(self, cp: configparser.ConfigParser):
        self.cp = cp
        self.errors: list[str] = []

    def _raw(self, section, key):
        return self.cp.get(section, key, fallback="").strip()

    def num(self, section, key, kind=float, optional=False):
        raw = self._raw(section, key)
        if raw == "" and optional:
            return None
        try:
            v = kind(raw)
        except ValueError:
            self.errors.append(f"{section}.{key}: expected {kind.__name__}, got {raw!r}")
            return None
        if kind is float and not math.isfinite(v):
            self.errors.append(f"{section}.{key}: must be finite, got {raw!r}")
            return None
        return v

    def text(self, section, key):
        return self._raw(section, key)

    def nums(self, section, key, kind=float):
        raw = self._raw(section, key)
        if raw == "":
            return None
        try:
            return tuple(kind(s) for s in raw.split(","))
        except ValueError:
            self.errors.append(f"{section}.{key}: expected a comma-separated list, got {raw!r}")
            return None


def _channel(rd: _Reader, section="channel") -> Optional[ChannelParams]:
    g = rd.num(section, "gamma2")
    d = rd.num(section, "delta2")
    if g is None or d is None:
        return None
    try:
        return ChannelParams(g, d)
    except ValueError as exc:
        rd.errors.append(f"{section}: {exc} (channel definition)")
        return None


def _protocol(rd: _Reader, channel: Optional[ChannelParams],
              section="protocol") -> Optional[ProtocolParams]:
    kw = {}
    for key, kind in (("n", int), ("power", float), ("rate_margin", float), ("alpha1", float),
                      ("beta1", float), ("beta2", float), ("beta3", float), ("eta", float),
                      ("beta_tilde", float), ("max_message_bits", int)):
        v = rd.num(section if rd.cp.has_option(section, key) else "protocol", key, kind)
        if v is None:
            return None
        kw["p" if key == "power" else key] = v
    if channel is None:
        return None
    if channel.delta2 <= channel.gamma2:
        rd.errors.append("protocol: elasticity E = delta2 - gamma2 must be positive")
        return None
    try:
        return desk_params(gamma2=channel.gamma2, delta2=channel.delta2, **kw)
    except (ParameterError, ValueError) as exc:
        rd.errors.extend(f"{section}: {e}" for e in getattr(exc, "errors", [str(exc)]))
        return None


def _theta_in_range(rd, channel, value, label):
    if channel is not None and value is not None and \
            not channel.gamma2 <= value <= channel.delta2:
        rd.errors.append(f"{label}={value} outside the channel range "
                         f"[gamma2, delta2] = [{channel.gamma2}, {channel.delta2}]")


def parse_and_validate(argv=None) -> RunConfig:
    """Parse flags, merge them over the config files and validate everything.

    Raises
    ------
    ConfigError
        Listing every violated constraint.
    SystemExit
        For argparse usage errors (exit status 2).
    OSError
        When the ``--config`` file cannot be read.
    """
    ns = vars(build_parser().parse_args(argv))
    cp = load_defaults()
    if "config" in ns:
        with open(ns["config"], encoding="utf-8") as fh:
            cp.read_file(fh)
    _merge(cp, ns)
    rd = _Reader(cp)
    command = ns["command"]
    seed = rd.num("run", "seed", int)
    fmt = rd.text("run", "format")
    if fmt not in ("json", "csv"):
        rd.errors.append(f"run.format must be json or csv, got {fmt!r}")
    if seed is not None and seed < 0:
        rd.errors.append("run.seed must be non-negative")
    cfg = RunConfig(command, {}, seed or 0, fmt, ns.get("out"))
    extra = cfg.extra

    if command == "rates":
        cfg.channel = _channel(rd)
        extra["power"] = rd.num("protocol", "power")
        extra["beta3"] = rd.num("protocol", "beta3")
        if extra["power"] is not None and not extra["power"] > 0:
            rd.errors.append("protocol.power must be positive")
        if extra["beta3"] is not None and not extra["beta3"] > 0:
            rd.errors.append("protocol.beta3 must be positive")
    elif command in ("sweep", "experiment") and ns.get("action", "report") == "report":
        cfg.channel = _channel(rd)
        kind = ns.get("table") or rd.text("sweep", "kind")
        if kind not in ("power", "gamma2"):
            rd.errors.append(f"sweep.kind must be power or gamma2, got {kind!r}")
        extra.update(kind=kind, lo=rd.num("sweep", "lo"), hi=rd.num("sweep", "hi"),
                     num=rd.num("sweep", "num", int))
        if extra["num"] is not None and extra["num"] < 1:
            rd.errors.append("sweep.num must be at least 1")
        if kind == "power" and extra["lo"] is not None and extra["lo"] <= 0:
            rd.errors.append("sweep.lo must be positive for a power sweep (P > 0)")
        if kind == "gamma2" and extra["lo"] is not None and extra["lo"] <= 0:
            rd.errors.append("sweep.lo must be positive for a gamma2 sweep (0 < gamma2)")
        if kind == "gamma2" and cfg.channel is not None and extra["hi"] is not None \
                and extra["hi"] > cfg.channel.delta2:
            rd.errors.append("sweep.hi must not exceed delta2 for a gamma2 sweep "
                             "(0 < gamma2 <= delta2)")
    elif command == "simulate":
        cfg.channel = _channel(rd)
        cfg.protocol = _protocol(rd, cfg.channel)
        t = rd.num("simulate", "theta2", optional=True)
        if t is None and cfg.channel is not None:
            t = cfg.channel.gamma2
        _theta_in_range(rd, cfg.channel, t, "simulate.theta2")
        extra["theta2"] = t
        extra["message"] = rd.num("simulate", "message", int, optional=True)
        extra["trial"] = rd.num("simulate", "trial", int, optional=True) or 0
        if cfg.protocol is not None and extra["message"] is not None and \
                not 0 <= extra["message"] < (1 << cfg.protocol.l_ext):
            rd.errors.append(f"simulate.message must fit in {cfg.protocol.l_ext} bits")
    elif command == "attack":
        cfg.channel = _channel(rd)
        cfg.protocol = _protocol(rd, cfg.channel, "binding")
        strat = rd.text("attack", "strategy") or "midpoint"
        if strat not in STRATEGIES:
            rd.errors.append(f"attack.strategy must be one of {', '.join(STRATEGIES)}")
        s2 = rd.num("attack", "s2", optional=True)
        if s2 is None and cfg.channel is not None:
            s2 = cfg.channel.gamma2
        _theta_in_range(rd, cfg.channel, s2, "attack.s2")
        kind = rd.text("attack", "kind") or "binding"
        if kind not in ("binding", "concealment", "reduction"):
            rd.errors.append(f"attack.kind must be binding, concealment or reduction, got {kind!r}")
        extra.update(kind=kind, strategy=strat, s2=s2, trials=rd.num("run", "trials", int),
                     no_g2=rd.text("attack", "no_g2") == "True",
                     m=rd.num("concealment", "m", int), l=rd.num("concealment", "l", int),
                     case=rd.text("reduction", "case"),
                     samples=rd.num("reduction", "samples", int), alpha=rd.num("run", "alpha"))
        if kind == "concealment" and None not in (extra["m"], extra["l"]) and \
                not 0 <= extra["l"] <= extra["m"]:
            rd.errors.append("concealment: need 0 <= l <= m")
        if kind == "reduction":
            cfg.channel = _channel(rd, "reduction")
            if extra["case"] not in CASES:
                rd.errors.append(f"reduction.case must be one of {', '.join(CASES)}")
    elif command == "reduce-check":
        cfg.channel = _channel(rd, "reduction")
        case = rd.text("reduction", "case")
        if case not in CASES:
            rd.errors.append(f"reduction.case must be one of {', '.join(CASES)}")
        extra.update(case=case, samples=rd.num("reduction", "samples", int),
                     alpha=rd.num("run", "alpha"))
    elif command == "experiment":
        extra["suite"] = ns["suite"]
        cfg.channel = _channel(rd)
        cfg.protocol = _protocol(rd, cfg.channel)
        extra["binding"] = _protocol(rd, cfg.channel, "binding")
        extra["reduction_channel"] = _channel(rd, "reduction")
        extra["trials"] = rd.num("run", "trials", int)
        extra["alpha"] = rd.num("run", "alpha")
        extra["code_seed"] = rd.num("run", "code_seed", int)
        extra["samples"] = rd.num("reduction", "samples", int)
        extra["strategies"] = tuple(s for s in rd.text("binding", "strategies").split(",") if s)
        bad = [s for s in extra["strategies"] if s not in STRATEGIES]
        if bad:
            rd.errors.append(f"binding.strategies: unknown {', '.join(bad)}")
        extra["s2"] = rd.nums("binding", "s2")
        extra["level"] = rd.num("binding", "level")
        extra["spoof_trials"] = rd.num("spoof", "trials", int)
        extra["fit_trials"] = rd.num("spoof", "fit_trials", int)
        extra["n_values"] = rd.nums("spoof", "n_values", int)
        extra["m"] = rd.num("concealment", "m", int)
        extra["l_values"] = rd.nums("concealment", "l_values", int)
        extra["k"] = rd.num("impossibility", "k", int)
        extra["eps1"] = rd.num("impossibility", "eps1")
        extra["eps3"] = rd.num("impossibility", "eps3")
        if extra["s2"] and cfg.channel is not None:
            for s in extra["s2"]:
                _theta_in_range(rd, cfg.channel, s, "binding.s2")
    elif command == "replay":
        extra["input"] = ns["input"]

    for key in ("trials", "samples"):
        if isinstance(extra.get(key), int) and extra[key] < 0:
            rd.errors.append(f"{key} must be non-negative")
    if rd.errors:
        raise ConfigError(rd.errors)
    cfg.settings = _effective(cp)
    return cfg


# dispatch

def _rate(v):
    return str(v) if isinstance(v, Flag) else v


def run_rates(cfg: RunConfig) -> dict:
    rep = rate_report(cfg.extra["power"], cfg.channel).to_dict()
    rep["elasticity"] = cfg.channel.elasticity
    rep["commit_rate"] = _rate(commit_rate(cfg.extra["power"], cfg.channel, cfg.extra["beta3"]))
    return rep


def run_sweep(cfg: RunConfig) -> dict:
    e = cfg.extra
    fixed = {"delta2": cfg.channel.delta2}
    if e["kind"] == "power":
        fixed["gamma2"] = cfg.channel.gamma2
    grid = SweepGrid.linear(e["kind"], e["lo"], e["hi"], e["num"], **fixed)
    rows = [(x, _rate(v)) for x, v in sweep_rate_curves(grid)]
    return {"columns": list(grid.columns), "rows": rows}


def run_simulate(cfg: RunConfig) -> dict:
    p = cfg.protocol
    code_seed = int(cfg.settings["run.code_seed"])
    code = shared_code(p, code_seed)
    va, vb, verdict = honest_run(p, code, cfg.extra["theta2"], cfg.seed, cfg.extra["trial"],
                                 cfg.extra["message"])
    return {"accepted": verdict.accepted, "reason": verdict.reason, "c": va.c, "u": va.u,
            "list_size": len(vb.decode_list), "theta2": cfg.extra["theta2"],
            "params": p.to_dict(), "derived": p.derived(), "code_seed": code_seed,
            "transcript": va.transcript.to_dict(), "y": [float(v) for v in vb.y],
            "pass": verdict.accepted}


def run_attack(cfg: RunConfig) -> dict:
    e = cfg.extra
    if e["kind"] == "concealment":
        return concealment_attack_views(e["m"], e["l"], e["s2"],
                                        gamma2=cfg.protocol.gamma2).to_dict()
    if e["kind"] == "reduction":
        return ex.reduction_equivalence(e["case"], cfg.channel, e["samples"], cfg.seed,
                                        e["alpha"])
    p = cfg.protocol
    if cfg.extra["no_g2"]:
        p = p.with_(beta2=0.0)
    code = shared_code(p, int(cfg.settings["run.code_seed"]))
    att = AliceBindingAttack(cfg.extra["s2"], cfg.extra["strategy"])
    r = ex.estimate_binding(p, att, cfg.extra["trials"], cfg.seed, code).to_dict()
    r["derived"] = p.derived()
    # the command reports the estimate; a successful break is not a tool failure
    r["pass"] = True
    return r


def run_reduce(cfg: RunConfig) -> dict:
    e = cfg.extra
    return ex.reduction_equivalence(e["case"], cfg.channel, e["samples"], cfg.seed, e["alpha"])


def run_experiment(cfg: RunConfig) -> dict:
    e = cfg.extra
    seed, cs = cfg.seed, e["code_seed"]

    def one(name):
        if name == "hashing":
            return ex.suite_hashing()
        if name == "concealment":
            return ex.suite_concealment(e["m"], e["l_values"])
        if name == "impossibility":
            return ex.suite_impossibility(e["k"], e["eps1"], e["eps3"])
        if name == "soundness":
            return ex.suite_soundness(cfg.protocol, e["trials"], seed, code_seed=cs)
        if name == "binding":
            return ex.suite_binding(e["binding"], e["trials"], seed,
                                    e["strategies"], e["s2"], cs, level=e["level"])
        if name == "spoof":
            return ex.suite_spoof(e["binding"], e["spoof_trials"], seed, e["n_values"],
                                  e["fit_trials"], cs)
        return ex.suite_reduction(e["reduction_channel"], e["samples"], seed, e["alpha"])

    if e["suite"] != "all":
        return one(e["suite"])
    parts = {name: one(name) for name in ex.SUITES}
    return {"suites": parts, "pass": all(v["pass"] for v in parts.values())}


def run_replay(cfg: RunConfig) -> dict:
    with open(cfg.extra["input"], encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        res = doc["result"]
        p = ProtocolParams.from_dict(res["params"])
        code = shared_code(p, int(res["code_seed"]))
        t = Transcript.from_dict(res["transcript"])
        v = replay(p, code, np.array(res["y"], dtype=float), t, RevealClaim(res["c"], res["u"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError([f"replay input is not a simulate output: {exc}"]) from exc
    same = v.accepted == res["accepted"] and v.reason == res["reason"]
    return {"accepted": v.accepted, "reason": v.reason, "matches_original": same,
            "pass": bool(same and v.accepted)}


HANDLERS = {"rates": run_rates, "sweep": run_sweep, "simulate": run_simulate,
            "attack": run_attack, "reduce-check": run_reduce, "replay": run_replay}


def dispatch(cfg: RunConfig) -> tuple[int, str]:
    """Run the command; returns ``(exit status, rendered output)``."""
    table = cfg.command == "experiment" and "suite" not in cfg.extra
    if table:
        result = run_sweep(cfg)
    elif cfg.command == "experiment":
        result = run_experiment(cfg)
    else:
        result = HANDLERS[cfg.command](cfg)
    if table:
        text = render_table(cfg, result)
    elif cfg.command == "sweep":
        text = render_param_value(cfg, result) if cfg.fmt == "csv" else render_json(cfg, result)
    else:
        text = render_csv(cfg, result) if cfg.fmt == "csv" else render_json(cfg, result)
    ok = result.get("pass", True)
    return (EXIT_OK if ok else EXIT_FAIL), text


# rendering

def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    return o


def render_json(cfg: RunConfig, result: dict) -> str:
    doc = {"command": cfg.command, "config": cfg.settings, "result": result}
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _header(cfg: RunConfig) -> str:
    return "".join(f"# {k}={v}\n" for k, v in sorted(cfg.settings.items()))


def _flatten(o, prefix=""):
    if isinstance(o, dict):
        for k in sorted(o):
            yield from _flatten(o[k], f"{prefix}{k}.")
    elif isinstance(o, (list, tuple)):
        for i, v in enumerate(o):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], o


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def render_csv(cfg: RunConfig, result: dict) -> str:
    rows = [("param", "value")] + list(_flatten(_jsonable(result)))
    return _header(cfg) + _csv(rows)


def render_param_value(cfg: RunConfig, result: dict) -> str:
    x, y = result["columns"]
    return _header(cfg) + f"# columns={x},{y}\n" + _csv([("param", "value")] + result["rows"])


def render_table(cfg: RunConfig, result: dict) -> str:
    return _header(cfg) + _csv([tuple(result["columns"])] + result["rows"])


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    try:
        cfg = parse_and_validate(argv)
    except ConfigError as exc:
        print("invalid configuration:", file=sys.stderr)
        for e in exc.errors:
            print(f"  - {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except OSError as exc:
        print(f"cannot read configuration: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        status, text = dispatch(cfg)
    except Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ConfigError as exc:
        print("invalid input:", *exc.errors, sep="\n  - ", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, ProtocolViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        _write(text, cfg.out)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
