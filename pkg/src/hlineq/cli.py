"""Command-line front end: ``hlineq <command> ...``.

Exit codes: 0 success (``admissible``: admissible), 1 inadmissible or a
failed check, 2 unknown, 64 usage or parse error, 65 oracle budget
exceeded, 66 instance rejected by ``verify``/``refute``.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

from hlineq import __version__
from hlineq.admissibility import (
    InequalityInstance,
    Outcome,
    admissibility,
    all_verdicts,
    rational_range,
    region_grid,
)
from hlineq.exponents import ExtendedExponent, parse_exponents
from hlineq.experiments import (
    InstanceRejected,
    ksz_scaling_check,
    make_witness,
    refute_instance,
    sup_sharpness_probe,
    verify_instance,
)
from hlineq.norms import AscentConfig, BudgetExceeded, bracket, brute_force_norm
from hlineq.tensor import load_tensor, mixed_norm, save_tensor

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_BUDGET, EXIT_REJECTED = 64, 65, 66

CONFIG_SCHEMA = "hlineq-run-config"
CONFIG_VERSION = 1
OUTPUT_ENV = "HLINEQ_OUTPUT_ROOT"


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- literal parsing -----------------------------------------------------------


def exponent_list(text: str) -> list[str]:
    """Validate a comma list of ``inf`` / ``a/b`` literals; returns canonical strings."""
    try:
        return [str(q) for q in parse_exponents(text)]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def n_list(text: str) -> list[int]:
    """``a..b`` (inclusive) or a comma list of positive integers."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            out = list(range(lo, hi + 1))
        else:
            out = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n list {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"n list {text!r} must contain positive integers")
    return sorted(set(out))


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _check_m(m: Optional[int], *lists):
    for lst in lists:
        if m is not None and lst is not None and len(lst) != m:
            raise UsageError(f"-m {m} does not match a list of length {len(lst)}")


# --- canonical json ------------------------------------------------------------


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, ExtendedExponent):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


# --- run execution -------------------------------------------------------------


def _ascent(params: dict) -> AscentConfig:
    return AscentConfig(params["restarts"], params["max_sweeps"], params["rel_tol"], params["ascent_seed"])


def _tensor_from(params: dict):
    if params.get("tensor"):
        path = Path(params["tensor"])
        data = path.read_bytes()
        if params.get("tensor_sha256") and hashlib.sha256(data).hexdigest() != params["tensor_sha256"]:
            raise UsageError(f"tensor file {path} changed since the run was configured")
        return load_tensor(path)
    return make_witness(params["family"], params["m"], params["n"], params["seed"],
                        params.get("p") or ["inf"] * params["m"]).tensor


def _sample_rows(samples) -> list[dict]:
    return [s.to_dict() for s in samples]


def _fit_rows(fit) -> list[dict]:
    return [{"log_n": x, "log_value": y} for x, y in fit.points]


def execute(config: dict) -> tuple[dict, list[dict], list[dict]]:
    """Run a stored configuration; returns ``(results, sample rows, fit rows)``."""
    if config.get("schema") != CONFIG_SCHEMA:
        raise UsageError("not an hlineq run configuration")
    if config.get("schema_version") != CONFIG_VERSION:
        raise UsageError(f"unsupported config version {config.get('schema_version')}")
    cmd, prm = config["command"], config["params"]
    if cmd == "opnorm":
        t = _tensor_from(prm)
        b = bracket(t, prm["p"], _ascent(prm))
        payload = {"m": t.m, "n": t.n, "lower": b.lower, "upper": b.upper,
                   "sweeps": b.sweeps, "restarts": b.restarts, "converged": b.converged,
                   "witness": [list(map(float, x)) for x in b.witness]}
        if prm.get("exact"):
            o = brute_force_norm(t, prm["p"], budget_bits=prm["budget_bits"])
            payload["oracle"] = {"value": o.value, "upper": o.upper, "exact": o.exact,
                                 "method": o.method, "mesh": o.mesh}
        return payload, [], []
    if cmd == "mixednorm":
        t = _tensor_from(prm)
        return {"m": t.m, "n": t.n, "q": prm["q"], "value": mixed_norm(t, prm["q"])}, [], []
    if cmd in ("verify", "refute"):
        inst = InequalityInstance(prm["p"], prm["q"])
        common = dict(samples=prm["samples"], seed=prm["seed"], cfg=_ascent(prm),
                      exploratory=prm["exploratory"], workers=prm["workers"])
        if cmd == "verify":
            rep = verify_instance(inst, prm["n"], source=prm["witness"], tolerance=prm["tolerance"],
                                  constant=prm.get("constant"), **common)
            return rep.to_dict(), _sample_rows(rep.samples), []
        rep = refute_instance(inst, prm["n"], witness=prm["witness"], **common)
        return rep.to_dict(), _sample_rows(rep.samples), _fit_rows(rep.fit)
    if cmd == "ksz":
        rep = ksz_scaling_check(prm["m"], prm["p"], prm["n"], prm["samples"], prm["seed"],
                                _ascent(prm), prm["workers"])
        rows = [{"n": n, "mean_norm": v, "method": k} for (n, v), k in zip(rep.means, rep.methods)]
        return rep.to_dict(), rows, _fit_rows(rep.fit)
    if cmd == "probe":
        rep = sup_sharpness_probe(prm["m"], prm["p"], prm["s"], prm["inner"], prm["r"], prm["n"], prm.get("j"))
        return rep.to_dict(), [], _fit_rows(rep.fit)
    raise UsageError(f"unknown run command {cmd!r}")


def results_text(config: dict, payload: dict) -> str:
    return canonical_json({"command": config["command"], "config_digest": config_digest(config),
                           "version": __version__, "payload": payload}) + "\n"


def config_digest(config: dict) -> str:
    return digest(canonical_json({"config": config, "version": __version__}))


def _write_csv(path: Path, rows: list[dict]):
    if not rows:
        path.write_text("")
        return
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def output_root(cli_value: Optional[str] = None) -> Path:
    return Path(cli_value or os.environ.get(OUTPUT_ENV) or "runs")


def persist(config: dict, root: Path) -> tuple[Path, dict, str]:
    """Execute ``config`` and store the run; returns ``(run dir, results, results digest)``."""
    started = _now()
    payload, samples, fit = execute(config)
    text = results_text(config, payload)
    cdig = config_digest(config)
    run_dir = root / f"{config['command']}-{cdig[:16]}"
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.json").write_text(canonical_json(config) + "\n")
    (run_dir / "results.json").write_text(text)
    _write_csv(run_dir / "samples.csv", samples)
    _write_csv(run_dir / "fit.csv", fit)
    rdig = digest(text)
    record = {
        "config": config,
        "config_digest": cdig,
        "version": __version__,
        "started": started,
        "finished": _now(),
        "results_digest": rdig,
        "seeds": _seed_ledger(config, samples),
    }
    (run_dir / "record.json").write_text(canonical_json(record) + "\n")
    with (root / "runs.jsonl").open("a") as fh:
        fh.write(canonical_json({"run": run_dir.name, "command": config["command"],
                                 "config_digest": cdig, "results_digest": rdig,
                                 "finished": record["finished"]}) + "\n")
    return run_dir, json.loads(text), rdig


def _seed_ledger(config: dict, samples: list[dict]) -> dict:
    prm = config["params"]
    out = {k: prm[k] for k in ("seed", "ascent_seed") if k in prm}
    if samples and "seed" in samples[0]:
        out["samples"] = [[r["n"], r["source"], r["seed"]] for r in samples]
    return out


def load_config(path: Path) -> dict:
    if path.is_dir():
        path = path / "config.json"
    return json.loads(path.read_text())


def replay(path: Path) -> tuple[bool, str, Optional[str]]:
    """Re-execute a stored run; returns ``(identical, new digest, stored digest)``."""
    config = load_config(path)
    payload, _, _ = execute(config)
    new = digest(results_text(config, payload))
    stored_file = (path if path.is_dir() else path.parent) / "results.json"
    stored = digest(stored_file.read_text()) if stored_file.exists() else None
    return new == stored, new, stored


# --- config builders -----------------------------------------------------------


def _ascent_params(a) -> dict:
    return {"restarts": a.restarts, "max_sweeps": a.max_sweeps, "rel_tol": a.rel_tol,
            "ascent_seed": a.ascent_seed}


def _source_params(a) -> dict:
    if a.tensor:
        data = Path(a.tensor).read_bytes()
        return {"tensor": str(Path(a.tensor).resolve()), "tensor_sha256": hashlib.sha256(data).hexdigest()}
    if a.family is None or a.n is None or a.m is None:
        raise UsageError("give --tensor FILE, or --family with -m and --n")
    return {"family": a.family, "m": a.m, "n": a.n, "seed": a.seed}


def build_config(a) -> dict:
    cmd = a.command
    if cmd == "opnorm":
        prm = {"p": a.p, "exact": a.exact, "budget_bits": a.budget_bits, **_ascent_params(a), **_source_params(a)}
        _check_m(a.m, a.p)
    elif cmd == "mixednorm":
        prm = {"q": a.q, **_source_params(a)}
        _check_m(a.m, a.q)
    elif cmd in ("verify", "refute"):
        _check_m(a.m, a.p, a.q)
        prm = {"p": a.p, "q": a.q, "n": a.n, "witness": a.witness.split(","), "samples": a.samples,
               "seed": a.seed, "exploratory": a.exploratory, "workers": a.workers, **_ascent_params(a)}
        if cmd == "verify":
            prm.update(tolerance=a.tolerance, constant=a.constant)
    elif cmd == "ksz":
        _check_m(a.m, a.p)
        prm = {"m": a.m, "p": a.p, "n": a.n, "samples": a.samples, "seed": a.seed,
               "workers": a.workers, **_ascent_params(a)}
    elif cmd == "probe":
        _check_m(a.m, a.p)
        prm = {"m": a.m, "p": a.p, "s": a.s, "inner": a.inner, "r": a.r, "n": a.n, "j": a.j}
    else:
        raise UsageError(f"{cmd} does not produce a run")
    return {"schema": CONFIG_SCHEMA, "schema_version": CONFIG_VERSION, "command": cmd, "params": prm}


# --- summaries -----------------------------------------------------------------


def _summary(cmd: str, res: dict) -> str:
    p = res["payload"]
    if cmd == "opnorm":
        line = f"norm in [{p['lower']!r}, {p['upper']!r}] after {p['sweeps']} sweeps"
        if "oracle" in p:
            o = p["oracle"]
            line += f"\noracle ({o['method']}): {o['value']!r}" + ("" if o["exact"] else f" <= {o['upper']!r}")
        return line
    if cmd == "mixednorm":
        return f"mixed norm ({','.join(p['q'])}) = {p['value']!r}"
    if cmd == "verify":
        v = p["verdict"]
        return (f"verdict {v['outcome']} ({v['rule']}), samples {len(p['samples'])}\n"
                f"max ratio {p['max_ratio']!r}, constant {p['constant']!r}, passed {p['passed']}")
    if cmd == "refute":
        f = p["fit"]
        return (f"verdict {p['verdict']['outcome']} ({p['verdict']['rule']})\n"
                f"slope {f['slope']!r} (tolerance {p['tolerance']}), n-dependent {p['n_dependent']}")
    if cmd == "ksz":
        return f"slope {p['fit']['slope']!r} vs predicted {p['predicted']!r}"
    if cmd == "probe":
        return f"slope {p['fit']['slope']!r} vs expected {p['expected_slope']!r}"
    return ""


def _exit_for(cmd: str, res: dict) -> int:
    if cmd == "verify" and res["payload"]["passed"] is False:
        return EXIT_FAIL
    return EXIT_OK


# --- commands ------------------------------------------------------------------


def cmd_admissible(a) -> int:
    _check_m(a.m, a.p, a.q)
    inst = InequalityInstance(a.p, a.q)
    if a.all:
        out = [v.to_dict() for v in all_verdicts(inst)]
        print(json.dumps(out, indent=2))
    v = admissibility(inst)
    if not a.all:
        print(json.dumps(dict(v.to_dict(), instance=str(inst)), indent=2))
    return {Outcome.ADMISSIBLE: EXIT_OK, Outcome.INADMISSIBLE: EXIT_FAIL, Outcome.UNKNOWN: EXIT_UNKNOWN}[v.outcome]


def _range(text: str) -> list[ExtendedExponent]:
    try:
        lo, hi, step = text.split(":")
        return rational_range(lo, hi, step)
    except ValueError as exc:
        raise UsageError(f"bad range {text!r} (want lo:hi:step): {exc}") from None


def cmd_region(a) -> int:
    raw = a.q.split(",")
    _check_m(a.m, a.p, raw)
    if a.axes:
        axes = a.axes
    else:
        axes = [i + 1 for i, t in enumerate(raw) if t.strip() == "_"]
    if len(axes) != 2:
        raise UsageError("give two axes (mark them with '_' in -q or use --axes)")
    template = [None if (i + 1) in axes or t.strip() == "_" else t for i, t in enumerate(raw)]
    xs = _range(a.x)
    ys = _range(a.y if a.y else a.x)
    cells = region_grid(a.p, template, tuple(axes), xs, ys)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q_axis1", "q_axis2", "outcome", "rule"])
    for c in cells:
        w.writerow([str(c.x), str(c.y), c.verdict.outcome.value, c.verdict.rule or ""])
    if a.out:
        Path(a.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_witness(a) -> int:
    w = make_witness(a.family, a.m, a.n, a.seed, a.p or ["inf"] * a.m)
    path = save_tensor(a.out, w.tensor, a.format)
    print(f"wrote {path} (m={w.tensor.m}, n={w.tensor.n})")
    return EXIT_OK


def cmd_run(a) -> int:
    config = load_config(Path(a.config)) if a.command == "run" else build_config(a)
    run_dir, res, rdig = persist(config, output_root(a.output))
    if a.json:
        print(canonical_json(res))
    else:
        print(_summary(config["command"], res))
        print(f"run {run_dir} results sha256 {rdig}")
    return _exit_for(config["command"], res)


def cmd_replay(a) -> int:
    same, new, stored = replay(Path(a.run))
    print(f"replayed sha256 {new}\nstored   sha256 {stored}\n{'identical' if same else 'DIFFERENT'}")
    return EXIT_OK if same else EXIT_FAIL


# --- parser --------------------------------------------------------------------


def _add_ascent(sp):
    g = sp.add_argument_group("ascent")
    g.add_argument("--restarts", type=int, default=16)
    g.add_argument("--max-sweeps", type=int, default=500)
    g.add_argument("--rel-tol", type=float, default=1e-12)
    g.add_argument("--ascent-seed", type=int, default=0)


def _add_output(sp):
    sp.add_argument("--output", help=f"output root (default ${OUTPUT_ENV} or ./runs)")
    sp.add_argument("--json", action="store_true", help="print results as JSON")


def _add_source(sp):
    sp.add_argument("--tensor", help="tensor file written by `hlineq witness`")
    sp.add_argument("--family", help="witness family: diagonal[:k], littlewood, rademacher, gaussian")
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hlineq", description="Hardy-Littlewood type inequalities for multilinear forms.")
    ap.add_argument("--version", action="version", version=f"hlineq {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("admissible", help="classify an exponent tuple")
    sp.add_argument("-m", type=int)
    sp.add_argument("-p", type=exponent_list, required=True)
    sp.add_argument("-q", type=exponent_list, required=True)
    sp.add_argument("--all", action="store_true", help="list every rule that decides")
    sp.set_defaults(func=cmd_admissible)

    sp = sub.add_parser("region", help="CSV grid of verdicts over two exponents")
    sp.add_argument("-m", type=int)
    sp.add_argument("-p", type=exponent_list, required=True)
    sp.add_argument("-q", required=True, help="template; '_' marks the two varying exponents")
    sp.add_argument("--axes", type=int_list, help="1-based varying axes (default: the '_' entries)")
    sp.add_argument("--x", required=True, help="lo:hi:step for the first axis")
    sp.add_argument("--y", help="lo:hi:step for the second axis (default: same as --x)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("opnorm", help="bracket the operator norm of a tensor")
    sp.add_argument("-m", type=int)
    sp.add_argument("-p", type=exponent_list, required=True)
    sp.add_argument("--exact", action="store_true", help="also run the enumeration/grid oracle")
    sp.add_argument("--budget-bits", type=float, default=26)
    _add_source(sp)
    _add_ascent(sp)
    _add_output(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("mixednorm", help="nested mixed norm of a tensor")
    sp.add_argument("-m", type=int)
    sp.add_argument("-q", type=exponent_list, required=True)
    _add_source(sp)
    _add_output(sp)
    sp.set_defaults(func=cmd_run)

    for name, wit, samples, hint in (("verify", "rademacher", 8, "check a constant on an admissible tuple"),
                                     ("refute", "diagonal", 4, "fit ratio growth on an inadmissible tuple")):
        sp = sub.add_parser(name, help=hint)
        sp.add_argument("-m", type=int)
        sp.add_argument("-p", type=exponent_list, required=True)
        sp.add_argument("-q", type=exponent_list, required=True)
        sp.add_argument("--witness", default=wit, help="comma list of witness families")
        sp.add_argument("--n", type=n_list, default=[2, 4, 8])
        sp.add_argument("--samples", type=int, default=samples)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--exploratory", action="store_true", help="allow instances with unknown verdict")
        if name == "verify":
            sp.add_argument("--tolerance", type=float, default=0.05)
            sp.add_argument("--constant", type=float, help="override the verdict's constant")
        _add_ascent(sp)
        _add_output(sp)
        sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("ksz", help="growth of random +-1 form norms")
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("-p", type=exponent_list, required=True)
    sp.add_argument("--n", type=n_list, default=list(range(2, 13)))
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_ascent(sp)
    _add_output(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("probe", help="replace a sup by an l_r sum and fit the growth")
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("-p", type=exponent_list, required=True)
    sp.add_argument("--s", type=int_list, required=True, help="1-based index set S")
    sp.add_argument("--inner", type=exponent_list, required=True)
    sp.add_argument("--r", required=True, type=lambda t: exponent_list(t)[0])
    sp.add_argument("--j", type=int, help="replaced axis (default: first outside S)")
    sp.add_argument("--n", type=n_list, default=[2, 4, 8, 16, 32])
    _add_output(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("witness", help="write a witness tensor to a file")
    sp.add_argument("--family", required=True)
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-p", type=exponent_list, help="domain (only used for the analytic norm)")
    sp.add_argument("--format", choices=("json", "bin"))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("run", help="execute a stored config.json")
    sp.add_argument("config")
    _add_output(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("replay", help="re-execute a run and compare results digests")
    sp.add_argument("run", help="run directory or config.json")
    sp.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"hlineq: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InstanceRejected as exc:
        print(f"hlineq: {exc} (rule {exc.verdict.rule})", file=sys.stderr)
        return EXIT_REJECTED
    except (UsageError, ValueError, IndexError, KeyError, FileNotFoundError) as exc:
        print(f"hlineq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
