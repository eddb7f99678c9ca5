"""Batch entry point: ``qmcg <command> [flags]``.

Exit codes: 0 ok, 1 usage, 2 domain error, 3 precision failure.
Settings come from defaults, then a ``key = value`` config file, then flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import spectra, su2_tqft, verlinde
from .errors import DomainError, PrecisionError

OUTDIR_ENV = "QMCG_OUTPUT_DIR"
COMMANDS = ("verlinde", "theta-decay", "toeplitz", "tqft", "report")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = ""
    g: int = 2
    k: str = "8:128:pow2"
    k_max: int = 8
    tau: str = "0,1"
    tau1: str = "1,1"
    point: str = "0,0"
    point2: str = "0.5,0"
    m: int = 2
    generator: str = "S"
    experiment: str = "toeplitz_product"
    modes: str = ""
    modes2: str = ""
    source: str = "tqft_genus2"
    output: str = ""
    format: str = "csv"
    precision: str = "double"
    workers: int = 1
    integrality_tol: float = verlinde.INTEGRALITY_TOL
    commutant_tol: float = 1e-10
    slope_min: float = -1.4
    slope_max: float = -0.7
    r2_min: float = 0.9

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")
        if self.precision not in ("double", "extended"):
            raise UsageError(f"precision must be double or extended, got {self.precision!r}")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        return self

    def header(self) -> list[str]:
        return [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]


FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def _cast(key: str, raw: str):
    kind = FIELD_TYPES[key]
    kind = kind if isinstance(kind, str) else kind.__name__
    try:
        return _CASTS[kind](raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {raw!r}") from exc


def read_config(path: str) -> dict:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in FIELD_TYPES or key == "command":
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = _cast(key, raw)
    return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmcg", description="quantum mapping class group laboratory")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config")
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        flag = "--" + f.name.replace("_", "-")
        p.add_argument(flag, dest=f.name, default=None, type=str)
    return p


def build_config(argv) -> RunConfig:
    ns = _parser().parse_args(argv)
    cfg = asdict(RunConfig())
    if ns.config:
        cfg.update(read_config(ns.config))
    for f in fields(RunConfig):
        raw = getattr(ns, f.name, None)
        if raw is not None and f.name != "command":
            cfg[f.name] = _cast(f.name, raw)
    cfg["command"] = ns.command
    return RunConfig(**cfg).validate()


def _pair(text: str) -> tuple[float, float]:
    parts = [s for s in text.replace(" ", "").split(",") if s]
    if len(parts) != 2:
        raise UsageError(f"expected 're,im' or 'a,b', got {text!r}")
    return float(parts[0]), float(parts[1])


def _modes(text: str):
    """``p:q:c;p:q:c`` with c real or written like ``0.5j``."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        p, q, c = chunk.split(":")
        out.append((int(p), int(q), complex(c.replace(" ", ""))))
    if not out:
        raise UsageError(f"no Fourier modes in {text!r}")
    return tuple(out)


def _out_path(cfg: RunConfig, default_name: str, suffix: str) -> Path:
    if cfg.output:
        base = Path(cfg.output)
    else:
        base = Path(os.environ.get(OUTDIR_ENV, ".")) / default_name
    base.parent.mkdir(parents=True, exist_ok=True)
    return base.with_suffix(suffix)


def _table(header, rows, cfg: RunConfig) -> str:
    buf = io.StringIO()
    for line in cfg.header():
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write(path: Path, text: str) -> Path:
    path.write_text(text)
    return path


def cmd_verlinde(cfg: RunConfig) -> list[str]:
    opts = {"tol": cfg.integrality_tol, "extended": cfg.precision == "extended"}
    rows = []
    for k in range(1, cfg.k_max + 1):
        # the twisted count needs g >= 2; genus one leaves the column empty
        tw = verlinde.twisted_dim(cfg.g, k, **opts) if cfg.g >= 2 else ""
        rows.append((cfg.g, k, tw, verlinde.untwisted_dim(cfg.g, k, **opts)))
    header = ["g", "k", "twisted_dim", "untwisted_dim"]
    if cfg.format == "json":
        blob = {"config": asdict(cfg), "rows": [dict(zip(header, r)) for r in rows]}
        path = _write(_out_path(cfg, f"verlinde_g{cfg.g}", ".json"), json.dumps(blob, indent=2) + "\n")
    else:
        path = _write(_out_path(cfg, f"verlinde_g{cfg.g}", ".csv"), _table(header, rows, cfg))
    return [f"verlinde g={cfg.g} k=1..{cfg.k_max}: {len(rows)} rows -> {path}"]


def _run_sweep(cfg: RunConfig, experiment: str, params: dict, name: str) -> list[str]:
    ks = spectra.parse_k_spec(cfg.k)
    records = spectra.sweep(experiment, ks, params, workers=cfg.workers)
    csv_path = _write(_out_path(cfg, name, ".csv"), spectra.records_csv(records, cfg.header()))
    lines = [f"{experiment}: {len(records)} records -> {csv_path}"]
    odd = spectra.odd_levels(ks)
    if odd:
        lines.append(f"warning: odd levels {odd} carry metaplectic sign ambiguity")
    fit = spectra.safe_fit(records) if len(records) >= 4 else None
    if fit is None:
        lines.append(f"{experiment}: no log-log fit (fewer than 4 points or a non-positive value)")
        return lines
    bundle = dict(fit.bundle(), config=cfg.header())
    json_path = _write(_out_path(cfg, name + "_fit", ".json"), json.dumps(bundle, indent=2, sort_keys=True) + "\n")
    lines.append(spectra.summarize(fit, (cfg.slope_min, cfg.slope_max), cfg.r2_min) + f" -> {json_path}")
    return lines


def cmd_theta_decay(cfg: RunConfig) -> list[str]:
    tau = _pair(cfg.tau)
    if cfg.generator.lower() == "transport":
        params = {"x": _pair(cfg.point), "tau0": tau, "tau1": _pair(cfg.tau1)}
        return _run_sweep(cfg, "transport_defect", params, "transport_defect")
    params = {"generator": cfg.generator.upper(), "m": cfg.m, "tau": tau}
    return _run_sweep(cfg, "invariance_defect", params, f"invariance_defect_{cfg.generator.upper()}")


def cmd_toeplitz(cfg: RunConfig) -> list[str]:
    exp = cfg.experiment
    tau = _pair(cfg.tau)
    params: dict = {}
    if exp == "toeplitz_product":
        params = {"tau": tau}
        if cfg.modes:
            params["f1"] = _modes(cfg.modes)
        if cfg.modes2:
            params["f2"] = _modes(cfg.modes2)
    elif exp == "toeplitz_two_structure":
        params = {"tau0": tau, "tau1": _pair(cfg.tau1)}
        if cfg.modes:
            params["f"] = _modes(cfg.modes)
    elif exp == "toeplitz_norm":
        params = {"tau": tau}
        if cfg.modes:
            params["f"] = _modes(cfg.modes)
    elif exp == "coherent_overlap":
        params = {"tau": tau, "x": _pair(cfg.point), "y": _pair(cfg.point2)}
    else:
        raise UsageError(f"unknown toeplitz experiment {exp!r}")
    return _run_sweep(cfg, exp, params, exp)


def cmd_tqft(cfg: RunConfig) -> list[str]:
    ks = spectra.parse_k_spec(cfg.k)
    header = ["g", "k", "dim", "commutant_dim", "fixed_dim", "min_gram_eig", "max_relation_residual"]
    rows = [su2_tqft.summary_row(cfg.g, k) for k in ks]
    table = [[r[h] if not isinstance(r[h], float) else repr(r[h]) for h in header] for r in rows]
    path = _write(_out_path(cfg, f"tqft_g{cfg.g}", ".csv"), _table(header, table, cfg))
    return [f"tqft g={cfg.g} k={r['k']}: dim={r['dim']} commutant_dim={r['commutant_dim']} fixed_dim={r['fixed_dim']}" for r in rows] + [
        f"-> {path}"
    ]


def cmd_report(cfg: RunConfig) -> list[str]:
    ks = spectra.parse_k_spec(cfg.k)
    header = ["source", "k", "dim", "fixed_dim", "commutant_dim", "gap"]
    rows = []
    for k in ks:
        r = spectra.fixed_subspace_report(cfg.source, k, tol=cfg.commutant_tol).row()
        rows.append([r["source"], r["k"], r["dim"], r["fixed_dim"], r["commutant_dim"], repr(r["gap"])])
    path = _write(_out_path(cfg, f"report_{cfg.source}", ".csv"), _table(header, rows, cfg))
    return [f"report {r[0]} k={r[1]}: fixed_dim={r[3]} commutant_dim={r[4]}" for r in rows] + [f"-> {path}"]


DISPATCH = {
    "verlinde": cmd_verlinde,
    "theta-decay": cmd_theta_decay,
    "toeplitz": cmd_toeplitz,
    "tqft": cmd_tqft,
    "report": cmd_report,
}


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = build_config(argv)
        lines = DISPATCH[cfg.command](cfg)
    except SystemExit as exc:  # argparse
        return 0 if exc.code == 0 else 1
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except PrecisionError as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    for line in lines:
        print(line)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
