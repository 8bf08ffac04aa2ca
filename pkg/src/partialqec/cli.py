"""Command-line front end: ``partialqec {bounds,rb,mirror,tomography,compile}``.

Options come from a ``key = value`` config file (``--config``) and flags;
flags win.  Every run writes its CSV/JSON/text artifacts plus a
``manifest.json`` into ``--out``; ``--replay manifest.json`` re-runs it.
Exit codes: 0 ok, 2 usage, 3 resource limit, 4 fit failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__

log = logging.getLogger("partialqec")

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_FIT = 0, 2, 3, 4


class UsageError(ValueError):
    pass


# option schema -------------------------------------------------------------------

@dataclass(frozen=True)
class Opt:
    name: str
    kind: str          # int float str ints floats strs flag
    default: Any = None
    help: str = ""


def _convert(kind: str, raw):
    if raw is None:
        return None
    if kind == "flag":
        if isinstance(raw, bool):
            return raw
        return str(raw).strip().lower() in ("1", "true", "yes", "on")
    if isinstance(raw, (list, tuple)):
        items = list(raw)
    else:
        items = [s for s in str(raw).replace(" ", "").split(",") if s]
    base = {"int": int, "ints": int, "float": float, "floats": float, "str": str, "strs": str}[kind]
    try:
        vals = [base(v) for v in items]
    except ValueError:
        raise UsageError(f"cannot parse {raw!r} as {kind}") from None
    if kind in ("int", "float", "str"):
        if len(vals) != 1:
            raise UsageError(f"expected a single value, got {raw!r}")
        return vals[0]
    return vals


def resolve(schema: list[Opt], flags: dict, config: dict) -> dict:
    out = {}
    for o in schema:
        raw = flags.get(o.name)
        if raw is None or raw is False and o.kind == "flag":
            raw = config.get(o.name, raw)
        val = _convert(o.kind, raw)
        out[o.name] = o.default if val is None else val
    unknown = set(config) - {o.name for o in schema} - {"seed", "out"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return out


# output helpers -------------------------------------------------------------------

def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.8e}"
    return str(v)


def csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


# commands ---------------------------------------------------------------------------

Artifacts = dict[str, str]   # file name -> contents


def _rng(seed):
    if seed is None:
        raise UsageError("this command needs --seed")
    return np.random.default_rng(seed)


BOUNDS_OPTS = [
    Opt("n", "ints", [4], "register counts (even)"),
    Opt("L", "ints", [2], "layer counts (even)"),
    Opt("nc", "ints", [0], "clean register counts"),
    Opt("nb", "ints", None, "clean-noisy boundary counts (default: 2 if 0<n_c<n else 0)"),
    Opt("eps_c", "floats", None, "clean rates (default eps_d)"),
    Opt("eps_d", "floats", [0.1], "noisy rates"),
    Opt("eps_b", "floats", None, "boundary rates (default eps_d)"),
    Opt("all_noisy", "flag", False, "only the all-noisy case n_c = n_b = 0"),
    Opt("threshold", "flag", False, "print the clean threshold for (nb, eps_c, eps_d, eps_b)"),
    Opt("verify", "flag", False, "append dense Monte Carlo columns"),
    Opt("circuits", "int", 200, "Monte Carlo circuits per point"),
]


def cmd_bounds(cfg: dict, seed) -> tuple[Artifacts, dict]:
    from .bounds import BoundError, BoundParams, bound_row, clean_threshold, mc_average_tvd, params_layout, BOUND_COLUMNS

    eps_d = cfg["eps_d"]
    eps_c = cfg["eps_c"] or eps_d
    eps_b = cfg["eps_b"] or eps_d
    summary: dict = {}
    if cfg["threshold"]:
        nbs = cfg["nb"] or [2]
        rows = []
        for nb in nbs:
            for ec in eps_c:
                for ed in eps_d:
                    for eb in eps_b:
                        try:
                            t = clean_threshold(nb, ec, ed, eb)
                        except (BoundError, ZeroDivisionError) as e:
                            raise UsageError(str(e)) from None
                        rows.append({"n_b": nb, "eps_c": ec, "eps_d": ed, "eps_b": eb, "threshold": t})
                        print(f"clean_threshold(n_b={nb}, eps_c={ec:g}, eps_d={ed:g}, eps_b={eb:g}) = {t:.2f}")
        summary["thresholds"] = rows
        return {"threshold.csv": csv_text(rows, ["n_b", "eps_c", "eps_d", "eps_b", "threshold"])}, summary
    rng = _rng(seed) if cfg["verify"] else None
    rows = []
    for n in cfg["n"]:
        for L in cfg["L"]:
            for nc in ([0] if cfg["all_noisy"] else cfg["nc"]):
                nbs = [0] if cfg["all_noisy"] else (cfg["nb"] or [2 if 0 < nc < n else 0])
                for nb in nbs:
                    for ed in eps_d:
                        for ec in ([ed] if cfg["all_noisy"] else eps_c):
                            for eb in ([ed] if cfg["all_noisy"] else eps_b):
                                try:
                                    p = BoundParams(n, L, nc, nb, ec, ed, eb)
                                except BoundError as e:
                                    raise UsageError(str(e)) from None
                                mc = None
                                if cfg["verify"]:
                                    mc = mc_average_tvd(n, L, params_layout(p), cfg["circuits"], rng)
                                rows.append(bound_row(p, mc))
    for r in rows:
        extra = f" mc={r['mc_mean']:.4e}+-{r['mc_se']:.1e}" if cfg["verify"] else ""
        print(f"n={r['n']} L={r['L']} n_c={r['n_c']} n_b={r['n_b']} lower={r['lower']:.4e} "
              f"upper={r['upper']:.4e}{extra}")
    summary["rows"] = len(rows)
    if cfg["verify"]:
        summary["all_mc_above_lower_minus_2se"] = all(r["mc_mean"] >= r["lower"] - 2 * r["mc_se"] for r in rows)
    return {"bounds.csv": csv_text(rows, list(BOUND_COLUMNS))}, summary


RB_OPTS = [
    Opt("types", "strs", ["noisy-noisy"], "type pairs: noisy-noisy, clean-noisy, clean-clean"),
    Opt("eps1", "float", 2.425e-5, "single-qubit depolarizing rate"),
    Opt("eps2", "float", 2.425e-4, "two-qubit depolarizing rate"),
    Opt("m_grid", "ints", None, "sequence lengths (default per type)"),
    Opt("sequences", "int", 9, "sequences per length"),
    Opt("shots", "int", 1024, "shots per sequence"),
    Opt("code", "str", "steane", "code for clean registers"),
    Opt("companion", "flag", True, "add a noisy-noisy run for the rate ratio"),
    Opt("weighted", "flag", False, "weight the decay fit by the spread at each length"),
    Opt("backend", "str", "frame", "frame or tableau"),
]


def cmd_rb(cfg: dict, seed) -> tuple[Artifacts, dict]:
    from .experiments.rb import RBConfig, fit_rb, parse_types, run_rb, types_label

    _rng(seed)
    types = [parse_types(t) for t in cfg["types"]]
    if cfg["companion"] and ("noisy", "noisy") not in types:
        types.append(("noisy", "noisy"))
    all_rows, fits = [], {}
    for t in types:
        rc = RBConfig(t, cfg["m_grid"], cfg["sequences"], cfg["shots"], (cfg["eps1"], cfg["eps2"]), seed,
                      cfg["code"], cfg["backend"])
        rows = run_rb(rc)
        res = fit_rb(rows, weighted=cfg["weighted"])
        all_rows += rows
        fits[types_label(t)] = {**res.fit.as_dict(), "r": res.r, "r_se": res.r_se, "m_grid": list(rc.m_grid)}
        print(f"{types_label(t)}: r = {res.r:.4e} +- {res.r_se:.1e} (eps = {res.fit.eps:.6f})")
    summary = {"fits": fits}
    if "noisy-noisy" in fits:
        rd = fits["noisy-noisy"]["r"]
        for k, v in fits.items():
            if k != "noisy-noisy" and rd > 0:
                summary[f"ratio_{k}_over_noisy-noisy"] = v["r"] / rd
                print(f"r({k}) / r(noisy-noisy) = {v['r'] / rd:.3f}")
    cols = ["types", "m", "seq_index", "shots", "successes", "p0"]
    return {"rb.csv": csv_text(all_rows, cols)}, summary


MIRROR_OPTS = [
    Opt("n", "ints", [10], "register counts"),
    Opt("nc", "ints", None, "clean counts (default 0..n)"),
    Opt("L", "ints", [4, 8, 12, 16], "layer counts of V"),
    Opt("circuits", "int", 25, "circuits per point"),
    Opt("q", "float", 0.01, "gate noise scale"),
    Opt("qI", "floats", [0.0], "idle noise scales"),
    Opt("backend", "str", "logical", "logical, physical or dense"),
    Opt("shots", "int", 20000, "trajectory shots per circuit"),
    Opt("code", "str", "steane", "code for clean registers"),
]


def cmd_mirror(cfg: dict, seed) -> tuple[Artifacts, dict]:
    from .experiments.mirror import MirrorConfig, mean_fidelity, run_mirror
    from .experiments.threshold import find_threshold, fit_threshold_model
    from .noise import device_model

    _rng(seed)
    rows, thr_rows = [], []
    table: dict[float, dict[int, float]] = {}
    for qI in cfg["qI"]:
        mc = MirrorConfig(cfg["n"], cfg["nc"], cfg["L"], cfg["circuits"], cfg["q"], qI, seed, cfg["backend"],
                          cfg["shots"], cfg["code"])
        part = run_mirror(mc)
        for r in part:
            r["q_I"] = qI
        rows += part
        ratio = device_model(cfg["q"], qI).idle_to_cnot_ratio
        for n in cfg["n"]:
            nt = find_threshold(part, n)
            thr_rows.append({"ratio": ratio, "n": n, "n_threshold": nt})
            table.setdefault(ratio, {})[n] = nt
            print(f"q_I={qI:g} (eps_I/eps_CNOT={ratio:.4f}) n={n}: n_threshold = {nt}")
    summary: dict = {"thresholds": thr_rows,
                     "mean_fidelity": [dict(r) for qI in cfg["qI"]
                                       for r in mean_fidelity([x for x in rows if x["q_I"] == qI])]}
    if 0.0 in table and len(table) >= 2 and all(len(v) >= 3 for v in table.values()):
        model = fit_threshold_model(table)
        summary["model"] = {"b": model.b, "a": model.a, "c": model.c, "r_squared": model.r_squared}
        print(f"model: b = {model.b:.3f}, c = {model.c:.3f}, R^2 = {model.r_squared:.3f}")
    arts = {"mirror.csv": csv_text(rows, ["n", "n_c", "L", "circuit_index", "fidelity"]),
            "thresholds.csv": csv_text(thr_rows, ["ratio", "n", "n_threshold"])}
    return arts, summary


TOMO_GATES = {
    "i": ("I", ("noisy",)), "x": ("X", ("noisy",)), "y": ("Y", ("noisy",)), "z": ("Z", ("noisy",)),
    "h": ("H", ("noisy",)), "s": ("S", ("noisy",)), "sdg": ("SDG", ("noisy",)),
    "ibar": ("I", ("clean",)), "xbar": ("X", ("clean",)), "ybar": ("Y", ("clean",)),
    "zbar": ("Z", ("clean",)), "hbar": ("H", ("clean",)), "sbar": ("S", ("clean",)),
    "sdgbar": ("SDG", ("clean",)),
    "cnot": ("CNOT", ("noisy", "noisy")), "cnot-bar": ("CNOT", ("clean", "clean")),
    "cnot-tilde": ("CNOT", ("clean", "noisy")), "cnot-tilde-cd": ("CNOT", ("clean", "noisy")),
    "cnot-tilde-dc": ("CNOT", ("noisy", "clean")),
}

TOMO_OPTS = [
    Opt("gate", "strs", ["all"], f"gates: {', '.join(TOMO_GATES)} or all"),
    Opt("q", "float", 0.01, "gate noise scale"),
    Opt("qI", "float", 0.01, "idle noise scale"),
    Opt("backend", "str", "auto", "auto, dense or pauli"),
    Opt("haar", "int", 0, "also average the infidelity over this many Haar states"),
    Opt("code", "str", "steane", "code for clean registers"),
]


def cmd_tomography(cfg: dict, seed) -> tuple[Artifacts, dict]:
    from .codes import get_code
    from .density import (DENSE_QUBIT_CAP, average_gate_infidelity, ideal_logical_ptm, logical_process_tomography,
                          sampled_infidelity)
    from .experiments.effective import LogicalNoiseTable
    from .noise import device_model

    names = list(TOMO_GATES) if cfg["gate"] == ["all"] else [g.lower() for g in cfg["gate"]]
    if "cnot-tilde" in names and "cnot-tilde-cd" in names:
        names.remove("cnot-tilde")
    bad = [g for g in names if g not in TOMO_GATES]
    if bad:
        raise UsageError(f"unknown gates: {', '.join(bad)}")
    code = get_code(cfg["code"])
    table = LogicalNoiseTable(device_model(cfg["q"], cfg["qI"]), code)
    rng = np.random.default_rng(seed) if cfg["haar"] else None
    rows, arts = [], {}
    for g in names:
        kind, tags = TOMO_GATES[g]
        phys = table.compiled(kind, tags)
        back = cfg["backend"]
        if back == "dense" and phys.n_qubits > DENSE_QUBIT_CAP:
            raise MemoryError(f"{g}: {phys.n_qubits} physical qubits exceed the dense cap of {DENSE_QUBIT_CAP}")
        R = logical_process_tomography(phys, table.noise, {code.name: code}, backend=back)
        ideal = ideal_logical_ptm(kind)
        row = {"gate": g, "tags": "-".join(tags), "infidelity": average_gate_infidelity(R, ideal),
               "depth": table.depth(kind, tags), "physical_qubits": phys.n_qubits}
        if rng is not None:
            mean, se = sampled_infidelity(R, ideal, cfg["haar"], rng)
            row.update(haar_infidelity=mean, haar_se=se)
        rows.append(row)
        k = R.shape[0]
        arts[f"ptm_{g}.csv"] = csv_text([{f"c{j}": R[i, j] for j in range(k)} for i in range(k)],
                                        [f"c{j}" for j in range(k)])
        print(f"{g:14s} infidelity {row['infidelity']:.3e}  depth {row['depth']}")
    cols = ["gate", "tags", "infidelity", "depth", "physical_qubits"]
    if rng is not None:
        cols += ["haar_infidelity", "haar_se"]
    arts["infidelities.csv"] = csv_text(rows, cols)
    return arts, {"gates": rows}


COMPILE_OPTS = [
    Opt("circuit", "str", None, "logical circuit file (tags line, then one layer per line)"),
    Opt("gate", "str", None, "single logical gate instead of a file, e.g. cnot-tilde"),
    Opt("native", "str", "device", "device or clifford"),
    Opt("idle", "flag", True, "insert idle gates and idle QEC rounds"),
    Opt("code", "str", "steane", "code for clean registers"),
]


def cmd_compile(cfg: dict, seed) -> tuple[Artifacts, dict]:
    from .codes import get_code
    from .compiler import LogicalCircuit, LogicalGate, compile_circuit

    if bool(cfg["circuit"]) == bool(cfg["gate"]):
        raise UsageError("give exactly one of --circuit or --gate")
    if cfg["circuit"]:
        circ = LogicalCircuit.from_text(Path(cfg["circuit"]).read_text())
    else:
        g = cfg["gate"].lower()
        if g not in TOMO_GATES:
            raise UsageError(f"unknown gate {g}")
        kind, tags = TOMO_GATES[g]
        circ = LogicalCircuit(tags, [[LogicalGate(kind, tuple(range(len(tags))))]])
    codes = get_code(cfg["code"]) if "clean" in circ.tags else None
    phys = compile_circuit(circ, codes, native=cfg["native"], idle_accounting=cfg["idle"])
    real = [s for s in phys.steps if not s.virtual]
    report = {"logical_layers": len(circ.layers), "physical_qubits": phys.n_qubits, "depth": phys.depth,
              "steps": len(phys.steps), "virtual_steps": len(phys.steps) - len(real),
              "counts": {name: phys.count(name) for name in ("CNOT", "SX", "RZ", "I", "H", "S", "X", "Y", "Z")
                         if phys.count(name)},
              "qec_rounds": sum(len(s.qec) for s in phys.steps)}
    print(phys.to_text(), end="")
    print(f"# depth {report['depth']}, {report['physical_qubits']} physical qubits")
    return {"circuit.txt": phys.to_text()}, report


COMMANDS: dict[str, tuple[list[Opt], Callable]] = {
    "bounds": (BOUNDS_OPTS, cmd_bounds),
    "rb": (RB_OPTS, cmd_rb),
    "mirror": (MIRROR_OPTS, cmd_mirror),
    "tomography": (TOMO_OPTS, cmd_tomography),
    "compile": (COMPILE_OPTS, cmd_compile),
}


# argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="partialqec", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"partialqec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (schema, _) in COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value config file")
        sp.add_argument("--seed", type=int, help="base RNG seed")
        sp.add_argument("--out", help="output directory (default out/<command>)")
        sp.add_argument("--replay", help="re-run the command recorded in a manifest")
        sp.add_argument("-v", "--verbose", action="store_true")
        for o in schema:
            flag = "--" + o.name.replace("_", "-")
            aliases = [flag]
            if o.name == "qI":
                aliases.append("--q-i")
            if o.name == "nc":
                aliases.append("--n-c")
            if o.kind == "flag":
                sp.add_argument(*aliases, dest=o.name, action="store_const", const=True, default=None,
                                help=o.help)
                sp.add_argument("--no-" + o.name.replace("_", "-"), dest=o.name, action="store_const",
                                const=False, help=argparse.SUPPRESS)
            else:
                sp.add_argument(*aliases, dest=o.name, help=o.help)
    return ap


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    from .experiments.fitting import FitError
    from .noise import read_config

    try:
        schema, fn = COMMANDS[args.command]
        flags = {o.name: getattr(args, o.name) for o in schema}
        config: dict = {}
        seed = args.seed
        if args.replay:
            man = json.loads(Path(args.replay).read_text())
            if man.get("command") != args.command:
                raise UsageError(f"manifest is for {man.get('command')!r}, not {args.command!r}")
            config = {k: v for k, v in man["config"].items()}
            flags = {}
            seed = man.get("seed") if seed is None else seed
        elif args.config:
            config = read_config(args.config)
            if seed is None and "seed" in config:
                seed = int(config["seed"])
        cfg = resolve(schema, flags, config)
        out = Path(args.out or config.get("out") or Path("out") / args.command)
        t0 = time.time()
        arts, summary = fn(cfg, seed)
        wall = time.time() - t0
        summary = {"command": args.command, "seed": seed, "config": cfg, **summary}
        arts["summary.json"] = json_text(summary)
        for name, text in arts.items():
            write_atomic(out / name, text)
        manifest = {"command": args.command, "config": cfg, "seed": seed, "version": __version__,
                    "outputs": sorted(str(out / n) for n in arts), "wall_clock_s": wall}
        write_atomic(out / "manifest.json", json_text(manifest))
        log.info("wrote %d files to %s", len(arts) + 1, out)
        return EXIT_OK
    except FitError as e:
        print(f"fit failure: {e}", file=sys.stderr)
        return EXIT_FIT
    except MemoryError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ValueError, KeyError, FileNotFoundError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
