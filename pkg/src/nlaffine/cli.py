"""Command line front end.

    nlaffine <subcommand> --config <file.json> [--out <path>]
             [--format csv|json] [--seed N] [--force]

Subcommands: validate, price, bond-curve, model-risk, figure.  Exit codes
are fixed so harnesses can assert failure modes: 0 ok, 1 validation
reject, 2 malformed config, 3 closed-form regime not applicable,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import figures, payoffs
from .errors import AdmissibilityError, ConfigError, NlaffineError
from .params import ModelSpec, ParameterBox, StateDomain, validate
from .pdesolver import Grid
from .pricing import Method, PricingResult, bond_curve, price, price_curve
from .simulate import SimConfig, SimScheme
from .util import format_float, write_csv

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_NUMERICAL = 4


def _check_keys(obj: dict, allowed: set, required: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def _load_config(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return data


def _parse_model(data: dict, force_flag: bool) -> tuple[ModelSpec, list[str]]:
    _check_keys(data, {"box", "domain", "force"}, {"box", "domain"}, "model")
    box, warnings = ParameterBox.from_mapping(data["box"])
    domain = StateDomain.from_string(data["domain"])
    force = bool(data.get("force", False)) or force_flag
    model = ModelSpec.create(box, domain, force=force)
    return model, warnings


def _parse_x0(value):
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, list):
        return [float(v) for v in value]
    if isinstance(value, dict):
        _check_keys(value, {"start", "stop", "step"}, {"start", "stop", "step"}, "x0")
        start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
        if step <= 0 or stop < start:
            raise ConfigError("x0 range needs step > 0 and stop >= start")
        n = int(round((stop - start) / step)) + 1
        return [round(start + k * step, 10) for k in range(n)]
    raise ConfigError("x0 must be a number, a list, or {start, stop, step}")


def _parse_grid(data: dict, T: float) -> Grid:
    _check_keys(data, {"x_min", "x_max", "n_x", "n_t"}, {"x_min", "x_max", "n_x", "n_t"}, "grid")
    return Grid(
        x_min=float(data["x_min"]),
        x_max=float(data["x_max"]),
        n_x=int(data["n_x"]),
        T=T,
        n_t=int(data["n_t"]),
    )


def _parse_sim(data: dict, seed: int) -> SimConfig:
    _check_keys(
        data,
        {"n_paths", "n_steps", "scheme", "antithetic"},
        {"n_paths", "n_steps"},
        "sim",
    )
    scheme = SimScheme(data.get("scheme", "euler"))
    return SimConfig(
        n_paths=int(data["n_paths"]),
        n_steps=int(data["n_steps"]),
        seed=seed,
        scheme=scheme,
        antithetic=bool(data.get("antithetic", True)),
    )


_TOP_KEYS = {
    "model",
    "payoff",
    "x0",
    "maturity",
    "maturities",
    "method",
    "grid",
    "sim",
    "output",
    "seed",
}


def _parse_common(args) -> dict:
    cfg = _load_config(args.config)
    _check_keys(cfg, _TOP_KEYS, {"model"}, "config")
    out = {"raw": cfg}
    out["seed"] = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    out["model"], out["box_warnings"] = _parse_model(cfg["model"], args.force)
    output = cfg.get("output", {})
    _check_keys(output, {"path", "format", "surface_path"}, set(), "output")
    out["out_path"] = args.out or output.get("path")
    out["format"] = args.format or output.get("format") or "json"
    if out["format"] not in ("csv", "json"):
        raise ConfigError(f"unknown output format {out['format']!r}")
    out["surface_path"] = output.get("surface_path")
    out["method"] = Method(cfg.get("method", "auto"))
    return out


def _emit_warnings(warnings) -> None:
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)


def _write_result_scalar(result: PricingResult, x0, path, fmt):
    if path is None:
        return
    if fmt == "json":
        with open(path, "w") as fh:
            fh.write(result.to_json() + "\n")
    else:
        write_csv(
            path,
            ("x0", "upper", "lower", "model_risk", "method_upper", "method_lower"),
            [(x0, result.upper, result.lower, result.model_risk, result.method_upper, result.method_lower)],
        )


def cmd_validate(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, _TOP_KEYS, {"model"}, "config")
    model_cfg = cfg["model"]
    _check_keys(model_cfg, {"box", "domain", "force"}, {"box", "domain"}, "model")
    box, warnings = ParameterBox.from_mapping(model_cfg["box"])
    _emit_warnings(warnings)
    domain = StateDomain.from_string(model_cfg["domain"])
    report = validate(box, domain)
    force = bool(model_cfg.get("force", False)) or args.force
    print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    if report.accepted or force:
        if not report.accepted:
            print("accepted by force: no uniqueness guarantee", file=sys.stderr)
        return EXIT_OK
    return EXIT_REJECTED


def cmd_price(args) -> int:
    common = _parse_common(args)
    cfg = common["raw"]
    if "payoff" not in cfg:
        raise ConfigError("price needs a payoff")
    payoff = payoffs.from_config(cfg["payoff"])
    if "x0" not in cfg or "maturity" not in cfg:
        raise ConfigError("price needs x0 and maturity")
    x0 = _parse_x0(cfg["x0"])
    if not isinstance(x0, float):
        raise ConfigError("price takes a scalar x0; use model-risk for ranges")
    T = float(cfg["maturity"])
    grid = _parse_grid(cfg["grid"], T) if "grid" in cfg else None
    sim = _parse_sim(cfg["sim"], common["seed"]) if "sim" in cfg else None
    _emit_warnings(common["box_warnings"])
    result = price(
        common["model"], payoff, x0, T, method=common["method"], grid=grid, sim=sim
    )
    _emit_warnings(result.diagnostics.get("warnings", []))
    if common["surface_path"]:
        from .pdesolver import SolveConfig, solve
        from .pricing import auto_grid

        g = grid or auto_grid(common["model"], [x0], T)
        surface = solve(common["model"], payoff, g, SolveConfig())
        surface.to_csv(common["surface_path"])
    _write_result_scalar(result, x0, common["out_path"], common["format"])
    print(
        f"upper={format_float(result.upper)} lower={format_float(result.lower)} "
        f"mu={format_float(result.model_risk)}"
    )
    return EXIT_OK


def cmd_bond_curve(args) -> int:
    common = _parse_common(args)
    cfg = common["raw"]
    if "x0" not in cfg or "maturities" not in cfg:
        raise ConfigError("bond-curve needs x0 and maturities")
    x0 = _parse_x0(cfg["x0"])
    if not isinstance(x0, float):
        raise ConfigError("bond-curve takes a scalar x0")
    maturities = [float(m) for m in cfg["maturities"]]
    if not maturities:
        raise ConfigError("maturities must be non-empty")
    _emit_warnings(common["box_warnings"])
    quotes, diag = bond_curve(common["model"], x0, maturities, method=common["method"])
    _emit_warnings(diag.get("warnings", []))
    if common["out_path"]:
        if common["format"] == "csv":
            write_csv(
                common["out_path"],
                ("maturity", "p_upper", "p_lower"),
                [(q.maturity, q.upper, q.lower) for q in quotes],
            )
        else:
            payload = {
                "x0": x0,
                "method": diag.get("method"),
                "quotes": [
                    {"maturity": q.maturity, "upper": q.upper, "lower": q.lower} for q in quotes
                ],
            }
            with open(common["out_path"], "w") as fh:
                json.dump(payload, fh, sort_keys=True, indent=2)
                fh.write("\n")
    q = quotes[-1]
    print(
        f"upper={format_float(q.upper)} lower={format_float(q.lower)} "
        f"mu={format_float(q.upper - q.lower)} (maturity {format_float(q.maturity)})"
    )
    return EXIT_OK


def cmd_model_risk(args) -> int:
    common = _parse_common(args)
    cfg = common["raw"]
    if "payoff" not in cfg or "x0" not in cfg or "maturity" not in cfg:
        raise ConfigError("model-risk needs payoff, x0 and maturity")
    payoff = payoffs.from_config(cfg["payoff"])
    x0 = _parse_x0(cfg["x0"])
    T = float(cfg["maturity"])
    sim = _parse_sim(cfg["sim"], common["seed"]) if "sim" in cfg else None
    _emit_warnings(common["box_warnings"])
    model = common["model"]
    if isinstance(x0, float):
        result = price(model, payoff, x0, T, method=common["method"], sim=sim)
        _emit_warnings(result.diagnostics.get("warnings", []))
        _write_result_scalar(result, x0, common["out_path"], common["format"])
        print(
            f"upper={format_float(result.upper)} lower={format_float(result.lower)} "
            f"mu={format_float(result.model_risk)}"
        )
        return EXIT_OK
    if common["method"] in (Method.AUTO, Method.PDE):
        grid = _parse_grid(cfg["grid"], T) if "grid" in cfg else None
        uppers, lowers, _ = price_curve(model, payoff, x0, T, grid=grid)
        rows = [(x, u, lo, u - lo) for x, u, lo in zip(x0, uppers, lowers)]
    else:
        rows = []
        for x in x0:
            res = price(model, payoff, x, T, method=common["method"], sim=sim)
            rows.append((x, res.upper, res.lower, res.model_risk))
    if common["out_path"]:
        write_csv(common["out_path"], ("x0", "upper", "lower", "model_risk"), rows)
    last = rows[-1]
    print(
        f"rows={len(rows)} last: upper={format_float(last[1])} "
        f"lower={format_float(last[2])} mu={format_float(last[3])}"
    )
    return EXIT_OK


def cmd_figure(args) -> int:
    name = args.name
    if name not in figures.FIGURE_NAMES:
        raise ConfigError(f"unknown figure {name!r}; have {list(figures.FIGURE_NAMES)}")
    dataset = figures.build_figure(name)
    _emit_warnings(dataset.metadata.get("warnings", []))
    out = args.out or f"{name}.csv"
    dataset.to_csv(out)
    print(f"wrote {out} rows={len(dataset.rows)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlaffine",
        description="Robust pricing for affine short-rate models under parameter uncertainty",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--format", default=None, choices=["csv", "json"])
        p.add_argument("--seed", default=None, type=int)
        p.add_argument("--force", action="store_true", help="run outside uniqueness regimes")

    p = sub.add_parser("validate", help="check model admissibility")
    add_common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("price", help="upper/lower payoff price at one start state")
    add_common(p)
    p.set_defaults(fn=cmd_price)

    p = sub.add_parser("bond-curve", help="upper/lower zero-coupon prices per maturity")
    add_common(p)
    p.set_defaults(fn=cmd_bond_curve)

    p = sub.add_parser("model-risk", help="price gap, scalar x0 or an x0 range")
    add_common(p)
    p.set_defaults(fn=cmd_model_risk)

    p = sub.add_parser("figure", help="regenerate an embedded experiment dataset")
    p.add_argument("name", choices=list(figures.FIGURE_NAMES))
    add_common(p, config_required=False)
    p.set_defaults(fn=cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except AdmissibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except NlaffineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
