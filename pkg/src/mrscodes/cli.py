"""``mrs`` command line: simulate, region, sweep, rerun.

Exit codes: 0 success / PASS / feasible, 2 FAIL / infeasible / digest
mismatch, 1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, exact, region
from .channel import ChannelSpec, TrialConfig, estimate_admissibility, judge, run_trials, sweep, sweep_csvs
from .channel import _with_seed, to_csv, trial_header, trial_rows, trial_seed
from .codes import spec_from_json, spec_to_json
from .plot import step_plot_svg
from .stepfn import StepFunction, integral_check, is_achievable

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
CHECKS = ("superposition", "one-or-all", "example3", "example3-sup", "two-sum", "mdc", "integral")


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    env = os.environ.get("MRS_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"MRS_SEED must be an integer, got {env!r}") from None


def _load_json(path: str, what: str):
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"{what} file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{what} file {path} is not valid JSON: {e}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(out_dir: Path, name: str, text: str, digests: dict) -> None:
    data = text.encode()
    (out_dir / name).write_bytes(data)
    digests[name] = hashlib.sha256(data).hexdigest()


def _manifest(command: str, config: dict, seed, digests: dict) -> str:
    return _dump({
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "outputs": digests,
    })


# ---------------------------------------------------------------- simulate


def _simulate(config: dict, out_dir: Path) -> tuple[int, dict]:
    try:
        spec = spec_from_json(config["code"])
        ch = ChannelSpec.from_json(config["channel"])
        cfg = TrialConfig(int(config["n"]), float(config["epsilon"]), int(config["seed"]), config.get("warmup"))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad simulate config: {e}") from None
    if spec.d != ch.d:
        raise ConfigError(f"code has {spec.d} transmitters but channel 'capacities' has {ch.d}")
    trials = int(config["trials"])
    if trials < 1:
        raise ConfigError("--trials must be >= 1")
    jobs = [(spec, ch, _with_seed(cfg, trial_seed(cfg.seed, j))) for j in range(trials)]
    results = run_trials(jobs, int(config.get("parallel", 1)))
    rate = config.get("rate")
    rate = exact.from_json(rate) if rate is not None else None
    digests: dict = {}
    _write(out_dir, "trials.csv", to_csv(trial_header(ch.d), trial_rows(results, rate, cfg.epsilon)), digests)
    code = EXIT_OK
    if rate is not None:
        verdict = judge(results, rate, cfg)
        body = verdict.to_json()
        body["warmup_steps"] = results[0].warmup_steps
        _write(out_dir, "verdict.json", _dump(body), digests)
        code = EXIT_OK if verdict.passed else EXIT_FAIL
        print(f"{body['verdict']}: error {verdict.error_rate:.4g} "
              f"(Wilson 95% [{verdict.ci[0]:.4g}, {verdict.ci[1]:.4g}]), "
              f"mean rate {verdict.mean_final_rate:.4g}")
    else:
        mean = sum(r.final_rate for r in results) / len(results)
        print(f"mean final rate {mean:.6g} over {len(results)} trial(s)")
    return code, digests


# ---------------------------------------------------------------- region


def _pairs(obj) -> list:
    return [region.RatePair.from_json(p) for p in obj]


def region_verdict(check: str, data) -> dict:
    """Evaluate one region check on parsed JSON input; returns the verdict body."""
    try:
        if check == "superposition":
            if isinstance(data, list):
                data = {"pairs": data}
            if "network" in data:
                pairs = [p for p in region.OnOffNetwork.from_json(data["network"]).pairs() if p.rate > 0]
            else:
                pairs = _pairs(data["pairs"])
            xi = exact.from_json(data.get("xi", 0))
            d = data.get("d")
            v = region.superposition_feasible(pairs, d, xi)
            return v.to_json()
        if check in ("one-or-all", "mdc"):
            w = [exact.from_json(x) for x in data["w"]]
            r = [exact.from_json(x) for x in data["r"]]
            r0 = exact.from_json(data["r0"])
            if check == "mdc":
                ok = region.mdc_one_or_all_check(w, r0, r)
                return {"feasible": ok, "margin": None, "violated_constraints": [] if ok else
                        ["r0 + sum(r) - max(r) <= sum(w) and r_k <= w_k"]}
            v = region.one_or_all_check(w, r0, r)
            body = v.to_json()
            if v.feasible:
                body["witness"] = region.one_or_all_g(w, r0, r).to_json()
            return body
        if check in ("example3", "example3-sup"):
            w = [exact.from_json(x) for x in data["w"]]
            r1, r2 = exact.from_json(data["r1"]), exact.from_json(data["r2"])
            fn = region.example3_check if check == "example3" else region.example3_superposition_check
            return fn(w, r1, r2).to_json()
        if check == "two-sum":
            dec = _pairs(data["decomposition"])
            total = region.RatePair.from_json(data["total"])
            value = region.two_sum_value(dec, total)
            ok = exact.geq(value, 1)
            return {"feasible": ok, "status": "necessary-condition-passed" if ok else "necessary-condition-failed",
                    "value": exact.to_json(value), "margin": exact.to_json(value - 1),
                    "violated_constraints": [] if ok else ["sum_k (S(c_k) - r_k)/(r - r_k) >= 1"]}
        if check == "integral":
            r = StepFunction.from_json(data.get("r", data) if isinstance(data, dict) else data)
            value = integral_check(r)
            ok = is_achievable(r)
            return {"feasible": ok, "achievable": ok, "integral": exact.to_json(value),
                    "margin": exact.to_json(1 - value), "violated_constraints": [] if ok else ["integral <= 1"]}
    except KeyError as e:
        raise ConfigError(f"region input for --check {check} is missing field {e.args[0]!r}") from None
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"bad region input for --check {check}: {e}") from None
    raise ConfigError(f"unknown check {check!r}")


def _region(config: dict, out_dir: Path | None) -> tuple[int, dict]:
    body = region_verdict(config["check"], config["input"])
    text = _dump(body)
    sys.stdout.write(text)
    digests: dict = {}
    if out_dir is not None:
        _write(out_dir, "verdict.json", text, digests)
    return (EXIT_OK if body["feasible"] else EXIT_FAIL), digests


# ---------------------------------------------------------------- sweep


def parse_grid(obj) -> list[ChannelSpec]:
    """A list of channel objects, or {"values": [...], "d": n, ...} for the diagonal c_1 = ... = c_d."""
    if isinstance(obj, dict) and "values" in obj:
        d = int(obj.get("d", 1))
        return [ChannelSpec((exact.from_json(v),) * d, obj.get("symbol_rates"), obj.get("mode", "random"))
                for v in obj["values"]]
    if isinstance(obj, dict) and "grid" in obj:
        obj = obj["grid"]
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list) or not obj:
        raise ConfigError("sweep grid must be a non-empty list of channel objects")
    return [ChannelSpec.from_json(g) for g in obj]


def _sweep(config: dict, out_dir: Path) -> tuple[int, dict]:
    try:
        spec = spec_from_json(config["code"])
        grid = parse_grid(config["channel"])
        cfg = TrialConfig(int(config["n"]), float(config["epsilon"]), int(config["seed"]), config.get("warmup"))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad sweep config: {e}") from None
    if any(g.d != spec.d for g in grid):
        raise ConfigError(f"every grid point needs {spec.d} capacities")
    res = sweep(spec, grid, cfg, int(config["trials"]), not config.get("independent", False),
                int(config.get("parallel", 1)))
    rate = config.get("rate")
    rate = exact.from_json(rate) if rate is not None else None
    per_trial, agg = sweep_csvs(res, rate, cfg.epsilon)
    digests: dict = {}
    _write(out_dir, "sweep_trials.csv", per_trial, digests)
    _write(out_dir, "sweep_summary.csv", agg, digests)
    theory = config.get("theory")
    if theory is not None or spec.d == 1:
        th = StepFunction.from_json(theory) if theory is not None else None
        pts = [(float(sum(g.link_rates()) / g.d), res.mean(p), res.std(p)) for p, g in enumerate(grid)]
        _write(out_dir, "sweep.svg", step_plot_svg(pts, th), digests)
    for p, g in enumerate(grid):
        caps = ",".join(str(exact.to_json(c)) for c in g.capacities)
        print(f"c=({caps}) mean {res.mean(p):.4g} std {res.std(p):.3g}")
    return EXIT_OK, digests


# ---------------------------------------------------------------- driver

RUNNERS = {"simulate": _simulate, "sweep": _sweep}


def _execute(command: str, config: dict, out_dir: Path | None) -> tuple[int, dict]:
    if command == "region":
        return _region(config, out_dir)
    if out_dir is None:
        raise ConfigError("--out-dir is required")
    return RUNNERS[command](config, out_dir)


def _run_and_record(command: str, config: dict, out_dir: Path | None) -> int:
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    code, digests = _execute(command, config, out_dir)
    if out_dir is not None:
        (out_dir / "manifest.json").write_text(_manifest(command, config, config.get("seed"), digests))
    return code


def _sim_config(args, command: str) -> dict:
    if args.code is None or args.channel is None:
        raise ConfigError("--code and --channel are required")
    return {
        "code": spec_to_json(spec_from_json(_load_json(args.code, "code"))),
        "channel": _load_json(args.channel, "channel"),
        "n": args.n,
        "epsilon": args.epsilon,
        "rate": args.rate,
        "trials": args.trials,
        "seed": args.seed if args.seed is not None else _default_seed(),
        "warmup": args.warmup,
        "parallel": args.parallel,
        **({"theory": _load_json(args.theory, "theory")} if getattr(args, "theory", None) else {}),
        **({"independent": True} if getattr(args, "independent", False) else {}),
    }


def _rerun(args) -> int:
    man = _load_json(args.manifest, "manifest")
    for key in ("command", "config", "outputs"):
        if key not in man:
            raise ConfigError(f"manifest is missing field {key!r}")
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.manifest).resolve().parent / "rerun"
    out_dir.mkdir(parents=True, exist_ok=True)
    _, digests = _execute(man["command"], man["config"], out_dir)
    bad = sorted(k for k in set(man["outputs"]) | set(digests) if man["outputs"].get(k) != digests.get(k))
    if bad:
        print(f"digest mismatch: {', '.join(bad)}", file=sys.stderr)
        return EXIT_FAIL
    print(f"reproduced {len(digests)} output(s) bit-exactly")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mrs", description="Multi-rate sequential erasure codes: simulation and region analysis.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, need_rate: bool):
        sp.add_argument("--code", help="code spec JSON file")
        sp.add_argument("--channel", help="channel JSON file (a grid for sweep)")
        sp.add_argument("--n", type=int, default=20000, help="horizon N in time steps")
        sp.add_argument("--epsilon", type=float, default=0.05)
        sp.add_argument("--rate", default=None, help="rate r for the admissibility verdict" if need_rate
                        else "rate used for the err_bits column")
        sp.add_argument("--trials", type=int, default=1)
        sp.add_argument("--seed", type=int, default=None, help="base seed (default: $MRS_SEED or 0)")
        sp.add_argument("--warmup", type=int, default=None, help="lossless warmup slots")
        sp.add_argument("--parallel", type=int, default=1, help="worker processes for trials")
        sp.add_argument("--out-dir", required=True)

    common(sub.add_parser("simulate", help="run trials and optionally judge admissibility"), True)
    sw = sub.add_parser("sweep", help="sweep a grid of channels")
    common(sw, False)
    sw.add_argument("--theory", help="step function JSON to overlay in the SVG")
    sw.add_argument("--independent", action="store_true", help="fresh seeds per grid point")

    rg = sub.add_parser("region", help="evaluate a feasibility check")
    rg.add_argument("input", help="JSON file with pairs, network or rates")
    rg.add_argument("--check", choices=CHECKS, default="superposition")
    rg.add_argument("--out-dir", default=None)

    rr = sub.add_parser("rerun", help="replay a manifest and compare output digests")
    rr.add_argument("manifest")
    rr.add_argument("--out-dir", default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "rerun":
            return _rerun(args)
        if args.command == "region":
            config = {"check": args.check, "input": _load_json(args.input, "region input")}
            out = Path(args.out_dir) if args.out_dir else None
            return _run_and_record("region", config, out)
        config = _sim_config(args, args.command)
        return _run_and_record(args.command, config, Path(args.out_dir))
    except ConfigError as e:
        print(f"mrs: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as e:
        print(f"mrs: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
