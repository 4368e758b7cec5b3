"""Command-line driver: ``ipslab {run,check,sweep,calibrate,report}``."""
from __future__ import annotations

import argparse
import csv
import inspect
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .criteria import CRITERIA, Check, SuiteContext, run_criterion
from .errors import ConfigError, IpsLabError
from .fingerprint import calibrate_c
from .harness import Scenario, csv_summary, expand_input, report_line, run_trials, scaling_probe
from .langspace import LanguageSpec
from .protocols import base_id, get_protocol
from .provers import get_cheat
from .runtime import ResourceBudget

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2
SHIPPED_SUITES = ("paper-bounds",)
_FRACTION_PARAMS = {"y"}
_INT_PARAMS = {"c", "q", "r", "max_rounds", "repetitions", "batch"}


def _load_json(path: str | Path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None


def load_suite(name_or_path: str) -> dict:
    if name_or_path in SHIPPED_SUITES:
        text = resources.files("ipslab").joinpath("suites", f"{name_or_path}.json").read_text(encoding="utf-8")
        return json.loads(text)
    return _load_json(name_or_path)


# --- scenario configs ---------------------------------------------------------

@dataclass
class ScenarioConfig:
    protocol: str
    input: object
    spec: dict | None = None
    prover: str = "honest"
    prover_params: dict = field(default_factory=dict)
    trials: int = 100
    seed: int = 0
    budget: dict | None = None
    params: dict = field(default_factory=dict)
    name: str = ""

    _KEYS = ("protocol", "input", "spec", "prover", "trials", "seed", "budget", "params", "name")

    @classmethod
    def from_dict(cls, data) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("a scenario must be a JSON object")
        unknown = set(data) - set(cls._KEYS)
        if unknown:
            raise ConfigError(f"unknown scenario keys {sorted(unknown)}")
        for key in ("protocol", "input"):
            if key not in data:
                raise ConfigError(f"scenario is missing {key!r}")
        prover = data.get("prover", "honest")
        if isinstance(prover, str):
            prover = {"id": prover}
        if not isinstance(prover, dict) or not isinstance(prover.get("id"), str):
            raise ConfigError("prover must be an id or {\"id\": ..., \"params\": {...}}")
        cfg = cls(protocol=data["protocol"], input=data["input"], spec=data.get("spec"), prover=prover["id"],
                  prover_params=dict(prover.get("params", {})), trials=data.get("trials", 100),
                  seed=data.get("seed", 0), budget=data.get("budget"), params=dict(data.get("params", {})),
                  name=data.get("name", ""))
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = {"protocol": self.protocol, "input": self.input, "prover": {"id": self.prover,
                                                                          "params": self.prover_params},
               "trials": self.trials, "seed": self.seed, "params": self.params}
        if self.spec is not None:
            out["spec"] = self.spec
        if self.budget is not None:
            out["budget"] = self.budget
        if self.name:
            out["name"] = self.name
        return out

    def _typed_params(self) -> tuple[str, dict]:
        params = dict(self.params)
        protocol = self.protocol
        for key, value in params.items():
            if key in _FRACTION_PARAMS:
                try:
                    params[key] = Fraction(str(value))
                except (ValueError, ZeroDivisionError):
                    raise ConfigError(f"parameter {key} must be a rational, got {value!r}") from None
            elif key in _INT_PARAMS and (isinstance(value, bool) or not isinstance(value, int)):
                raise ConfigError(f"parameter {key} must be an integer, got {value!r}")
        r = params.pop("r", None)
        if r is not None:
            if r < 1:
                raise ConfigError("r must be at least 1")
            if r > 1:
                protocol = f"{base_id(protocol)}^{r}"
        return protocol, params

    def validate(self) -> None:
        for key in ("trials", "seed"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key} must be an integer")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        self.to_scenario()

    def to_scenario(self) -> Scenario:
        try:
            protocol, params = self._typed_params()
            get_protocol(protocol)
            if self.prover != "honest":
                get_cheat(base_id(protocol), self.prover)
            spec = LanguageSpec.from_dict(self.spec) if self.spec is not None else None
            budget = ResourceBudget.from_dict(self.budget) if self.budget is not None else None
            w = expand_input(self.input)
            info = get_protocol(protocol)
            source = spec or info.fixed_spec
            alphabet = info.alphabet or (source.alphabet if source is not None else None)
            if alphabet is not None:
                alphabet.check(w)
            return Scenario(protocol, w, spec, self.prover, self.prover_params, params, budget,
                            name=self.name or f"{self.protocol}/{self.prover}/{self.input}")
        except ConfigError:
            raise
        except IpsLabError as exc:
            raise ConfigError(str(exc)) from None


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trials is not None:
        cfg.trials = args.trials
    if args.budget_steps is not None:
        cfg.budget = {**(cfg.budget or {}), "max_steps": args.budget_steps}
    cfg.validate()
    return cfg


def _scenario_list(data) -> list:
    if isinstance(data, dict) and "scenarios" in data:
        items = data["scenarios"]
        if not isinstance(items, list):
            raise ConfigError("scenarios must be a list")
        return items
    return [data]


def _out_dir(args) -> Path:
    out = Path(args.out or "ipslab-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- subcommands ----------------------------------------------------------------

def cmd_run(args) -> int:
    data = _load_json(args.config)
    configs = [_apply_overrides(ScenarioConfig.from_dict(item), args) for item in _scenario_list(data)]
    if not configs:
        raise ConfigError("no scenarios to run")
    rows = []
    for cfg in configs:
        sc = cfg.to_scenario()
        rows.append((sc, run_trials(sc, N=cfg.trials, seed=cfg.seed, workers=args.workers)))
    out = _out_dir(args)
    (out / "report.jsonl").write_text("".join(report_line(sc, st) + "\n" for sc, st in rows), encoding="utf-8")
    summary = csv_summary(rows)
    (out / "summary.csv").write_text(summary, encoding="utf-8", newline="")
    sys.stdout.write(summary.replace("\r\n", "\n"))
    return EXIT_OK


_OPS = (">=", ">", "<=", "<", "==")
_METRICS = ("accept_rate", "reject_rate", "timeout_rate", "mean_steps", "max_work_cells")


def _parse_suite(suite) -> tuple[dict, list, list]:
    if not isinstance(suite, dict):
        raise ConfigError("a suite must be a JSON object")
    unknown = set(suite) - {"name", "seed", "workers", "trials", "criteria", "assertions", "description"}
    if unknown:
        raise ConfigError(f"unknown suite keys {sorted(unknown)}")
    criteria = suite.get("criteria", [])
    assertions = suite.get("assertions", [])
    if not isinstance(criteria, list) or not isinstance(assertions, list):
        raise ConfigError("criteria and assertions must be lists")
    if not criteria and not assertions:
        raise ConfigError("the suite is empty")
    parsed_criteria = []
    for item in criteria:
        if isinstance(item, str):
            item = {"id": item}
        if not isinstance(item, dict) or item.get("id") not in CRITERIA:
            raise ConfigError(f"unknown criterion {item!r}")
        params = item.get("params", {})
        try:
            inspect.signature(CRITERIA[item["id"]]).bind(None, **params)
        except TypeError as exc:
            raise ConfigError(f"bad parameters for {item['id']}: {exc}") from None
        parsed_criteria.append((item["id"], params))
    parsed_assertions = []
    for item in assertions:
        if not isinstance(item, dict):
            raise ConfigError("an assertion must be a JSON object")
        cfg = ScenarioConfig.from_dict(item.get("scenario"))
        metric, op = item.get("metric", "accept_rate"), item.get("op", ">=")
        if metric not in _METRICS or op not in _OPS:
            raise ConfigError(f"bad assertion metric/op {metric!r} {op!r}")
        bound = item.get("bound")
        if isinstance(bound, bool) or not isinstance(bound, (int, float, str)):
            raise ConfigError("assertion bound must be a number")
        try:
            bound = float(Fraction(str(bound)))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad bound {bound!r}") from None
        tol = item.get("tolerance", "ci")
        if tol != "ci" and (isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol < 0):
            raise ConfigError("tolerance must be \"ci\" or a nonnegative number")
        parsed_assertions.append((cfg, metric, op, bound, tol, item.get("label", "")))
    return suite, parsed_criteria, parsed_assertions


def _assertion_check(cfg, metric, op, bound, tol, label, args, seed) -> Check:
    from .harness import ci_slack
    sc = cfg.to_scenario()
    st = run_trials(sc, N=cfg.trials, seed=seed, workers=args.workers)
    value = {"accept_rate": st.accept_rate, "reject_rate": st.reject_rate, "timeout_rate": st.timeouts / st.trials,
             "mean_steps": st.mean_steps, "max_work_cells": st.max_work_cells}[metric]
    if tol == "ci":
        hits = {"accept_rate": st.accepts, "reject_rate": st.rejects}.get(metric)
        tol = ci_slack(hits, st.decided) if hits is not None else 0.0
    check = Check(label or f"{sc.label()} {metric}", value, op, bound, float(tol))
    if metric.endswith("_rate") and not 0 <= bound <= 1:
        check.passed = False  # no probability meets a bound outside [0, 1], whatever the slack
    return check


def cmd_check(args) -> int:
    suite, criteria, assertions = _parse_suite(load_suite(args.config))
    seed = args.seed if args.seed is not None else suite.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    ctx = SuiteContext(seed=seed, workers=args.workers, trials=args.trials or suite.get("trials"))
    lines, rows, ok = [], [], True
    t0 = time.perf_counter()
    for cid, params in criteria:
        res = run_criterion(cid, ctx, **params)
        ok &= res.passed
        lines.append(json.dumps(res.to_dict(), sort_keys=True))
        rows.append((cid, res.passed, len(res.checks), len(res.failures()), f"{res.seconds:.2f}"))
        print(f"{'PASS' if res.passed else 'FAIL'} {cid} ({len(res.checks)} checks, {res.seconds:.1f}s)")
        for c in res.failures():
            print("    " + c.line())
    for i, (cfg, metric, op, bound, tol, label) in enumerate(assertions):
        if args.trials:
            cfg.trials = args.trials
        check = _assertion_check(cfg, metric, op, bound, tol, label, args, ctx.sub_seed(99, i))
        ok &= check.passed
        lines.append(json.dumps({"id": f"assertion-{i}", "passed": check.passed, "checks": [check.__dict__]},
                                sort_keys=True))
        rows.append((f"assertion-{i}", check.passed, 1, int(not check.passed), ""))
        print(("PASS " if check.passed else "FAIL ") + check.line())
    elapsed = time.perf_counter() - t0
    out = _out_dir(args)
    (out / "check.jsonl").write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    with open(out / "check.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(("id", "passed", "checks", "failures", "seconds"))
        writer.writerows(rows)
    print(f"suite {suite.get('name', args.config)}: {'PASS' if ok else 'FAIL'} in {elapsed:.1f}s (seed {seed})")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_sweep(args) -> int:
    data = _load_json(args.config)
    if not isinstance(data, dict):
        raise ConfigError("a sweep config must be a JSON object")
    inputs = data.get("inputs")
    if not isinstance(inputs, list) or len(inputs) < 3:
        raise ConfigError("a sweep needs a list of at least three inputs")
    base = {k: v for k, v in data.items() if k != "inputs"}
    configs = [_apply_overrides(ScenarioConfig.from_dict({**base, "input": item}), args) for item in inputs]
    scs = [c.to_scenario() for c in configs]
    first = configs[0]
    result = scaling_probe(scs[0].protocol, [sc.w for sc in scs], first.prover, first.trials, first.seed,
                           spec=scs[0].spec, params=scs[0].params, strategy_params=first.prover_params,
                           budget=scs[0].budget, workers=args.workers)
    out = _out_dir(args)
    (out / "sweep.json").write_text(json.dumps(result.to_dict(), indent=2), encoding="utf-8")
    with open(out / "sweep.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(("n", "mean_steps"))
        writer.writerows(zip(result.sizes, result.mean_steps))
    for n, s in zip(result.sizes, result.mean_steps):
        print(f"{n:>10} {s:>14.1f}")
    print(f"fitted exponent {result.exponent:.4f}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    m, eps = args.m, args.epsilon
    if args.config:
        data = _load_json(args.config)
        if not isinstance(data, dict):
            raise ConfigError("a calibrate config must be a JSON object")
        m, eps = data.get("m", m), data.get("epsilon", eps)
    if m is None or eps is None:
        raise ConfigError("calibrate needs m and epsilon")
    try:
        eps = Fraction(str(eps))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad epsilon {eps!r}") from None
    if isinstance(m, bool) or not isinstance(m, int):
        raise ConfigError("m must be an integer")
    try:
        res = calibrate_c(m, eps)
    except IpsLabError as exc:
        raise ConfigError(str(exc)) from None
    text = json.dumps({"m": res.m, "epsilon": str(res.epsilon), "c": res.c, "ratio": str(res.ratio)})
    if args.out:
        out = _out_dir(args)
        (out / "calibrate.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_report(args) -> int:
    path = Path(args.config or Path(args.out or "ipslab-out") / "report.jsonl")
    try:
        lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    except FileNotFoundError:
        raise ConfigError(f"report {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not JSON lines: {exc}") from None
    for rec in lines:
        if "scenario" in rec:
            sc, st = rec["scenario"], rec["stats"]
            lo, hi = st["accept_ci"]
            print(f"{sc['name']:<48} trials={st['trials']:<6} accept={st['accept_rate']:.4f} "
                  f"[{lo:.4f}, {hi:.4f}] timeouts={st['timeouts']} mean_steps={st['mean_steps']:.1f}")
        elif "checks" in rec:
            fails = [c for c in rec["checks"] if not c["passed"]]
            print(f"{'PASS' if rec['passed'] else 'FAIL'} {rec['id']} ({len(rec['checks'])} checks, "
                  f"{len(fails)} failed)")
        else:
            raise ConfigError(f"unrecognised report line in {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario, suite, sweep or report file")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--budget-steps", type=int, dest="budget_steps")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="output directory")
    parser = argparse.ArgumentParser(prog="ipslab", description="Simulate space-bounded interactive proofs.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run the scenarios in --config")
    sub.add_parser("check", parents=[common], help="evaluate a suite (file or 'paper-bounds')")
    sub.add_parser("sweep", parents=[common], help="fit a step-count power law over input sizes")
    cal = sub.add_parser("calibrate", parents=[common], help="smallest fingerprint constant c")
    cal.add_argument("--m", type=int)
    cal.add_argument("--epsilon")
    sub.add_parser("report", parents=[common], help="print a table from a JSON-lines report")
    return parser


COMMANDS = {"run": cmd_run, "check": cmd_check, "sweep": cmd_sweep, "calibrate": cmd_calibrate,
            "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command in ("run", "check", "sweep") and not args.config:
        print(f"error: {args.command} needs --config", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1 or (args.trials is not None and args.trials < 1) or \
            (args.budget_steps is not None and args.budget_steps < 1):
        print("error: --workers, --trials and --budget-steps must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
