"""Command-line front end: metric, periods, scan and verify."""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import jsonschema
import numpy as np

from . import checks
from .ak import (AkConfiguration, ak_period_matrix, contour_potential, gh_connection, multi_center_gh,
                 multi_center_potential)
from .dk import (DkConfiguration, E2Solver, NoSolutionError, atiyah_hitchin_closed_form,
                 atiyah_hitchin_pipeline, dk_metric, dk_period_matrix)
from .elliptic import PoleError
from .glt import DegeneracyError, SignatureError, unrotated_forms
from .spin import DomainError, Quaternion, quaternion_from_euler

FORMAT_VERSION = "1.0"

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3

# checked in order, so subclasses come before their bases
ERROR_CODES = (
    (NoSolutionError, "NO_SOLUTION"),
    (PoleError, "POLE"),
    (DegeneracyError, "DEGENERATE"),
    (SignatureError, "SIGNATURE"),
    (DomainError, "DOMAIN"),
    (ArithmeticError, "NUMERICAL"),
    (np.linalg.LinAlgError, "NUMERICAL"),
)


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------- serialization

def _num(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == 0:
        return "0.0"
    return format(x, ".17g")


def to_plain(obj):
    """numpy and complex values to nested lists/dicts of floats; complex -> [re, im]."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj, indent: int = 1, level: int = 0) -> str:
    """JSON with every float written to 17 significant digits and sorted keys."""
    obj = to_plain(obj) if level == 0 else obj
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_num(v) if isinstance(v, float) else str(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return _num(obj)
    if obj is None:
        return "null"
    return json.dumps(obj)


# ------------------------------------------------------------------- config

def _schema():
    return json.loads(resources.files("hkinstanton").joinpath("config_schema.json").read_text())


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config does not match schema: {exc.message}") from exc
    cfg = dict(raw)
    cfg.setdefault("n_prime", 2)
    cfg.setdefault("shift", [0, 0])
    tol = {"constraint": 1e-10, "n_scan": 64, "contour": 1e-12}
    tol.update(cfg.get("tolerances", {}))
    cfg["tolerances"] = tol
    try:
        cfg["model"] = build_model(cfg)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def build_model(cfg: dict):
    fam = cfg["family"]
    if fam == "Ak":
        if "centers" not in cfg:
            raise ConfigError("family Ak needs 'centers'")
        if "k" in cfg and cfg["k"] != len(cfg["centers"]) - 1:
            raise ConfigError("k must equal the number of centers minus one")
        return AkConfiguration(tuple(map(tuple, cfg["centers"])), cfg.get("alpha", 0.0))
    if fam == "Dk":
        if "k" not in cfg:
            raise ConfigError("family Dk needs 'k'")
        if "alpha" not in cfg:
            raise ConfigError("family Dk needs 'alpha'")
        return DkConfiguration(cfg["k"], tuple(map(tuple, cfg.get("moduli", []))), cfg["alpha"],
                               cfg["n_prime"], tuple(cfg["shift"]))
    # Atiyah-Hitchin: k = 0 with alpha either given or fixed by the constraint at each e2
    if cfg.get("k", 0) != 0 or cfg.get("moduli"):
        raise ConfigError("family AtiyahHitchin has k = 0 and no moduli")
    if "alpha" in cfg:
        return DkConfiguration(0, (), cfg["alpha"], cfg["n_prime"], tuple(cfg["shift"]))
    return None


def _quaternion(pt: dict) -> Quaternion:
    if "quaternion" in pt:
        q = Quaternion.from_array(pt["quaternion"])
        if q.norm() == 0:
            raise ConfigError("zero quaternion")
        return q.normalized()
    return quaternion_from_euler(*pt.get("euler", (0.0, 0.0, 0.0)))


def sample_points(cfg: dict, rng: np.random.Generator) -> list:
    pts = [dict(p) for p in cfg.get("points", [])]
    rp = cfg.get("random_points")
    if rp:
        for _ in range(rp["count"]):
            if cfg["family"] == "Ak":
                pts.append({"r": (rng.normal(size=3) * rp.get("radius", 2.0)).tolist()})
            else:
                lo, hi = rp.get("rho", (1.0, 3.0))
                p = {"rho": float(rng.uniform(lo, hi)),
                     "euler": [float(rng.uniform(0, 2 * np.pi)), float(rng.uniform(0.2, np.pi - 0.2)),
                               float(rng.uniform(0, 2 * np.pi))]}
                if cfg["family"] == "AtiyahHitchin" and cfg["model"] is None:
                    p["e2"] = float(rng.uniform(-0.9, 0.9) * p["rho"] / 3)
                pts.append(p)
    for p in pts:
        _check_point(cfg, p)
    return pts


def _check_point(cfg: dict, p: dict):
    if cfg["family"] == "Ak":
        if "r" not in p:
            raise ConfigError("Ak points need 'r'")
        return
    if "rho" not in p:
        raise ConfigError("Dk and AtiyahHitchin points need 'rho'")
    if "e2" in p and not abs(p["e2"]) < p["rho"] / 3:
        raise ConfigError("point e2 must satisfy |e2| < rho/3")
    if cfg["family"] == "AtiyahHitchin" and cfg["model"] is None and "e2" not in p:
        raise ConfigError("AtiyahHitchin points need 'e2' unless 'alpha' is given")


# ------------------------------------------------------------------ points

def _geometry_fields(geo) -> dict:
    sq, prod = geo.hyperkahler_defects()
    pos, neg = geo.signature()
    return {"lambda": geo.lam, "G": geo.G, "W": geo.W, "coframe": list(geo.coframe),
            "signature": [pos, neg], "residuals": {"I_squared": sq, "I1I2_plus_I3": prod}}


def _error_code(exc: Exception) -> str:
    for cls, code in ERROR_CODES:
        if isinstance(exc, cls):
            return code
    raise exc


def evaluate_point(cfg: dict, p: dict, solver: E2Solver | None = None) -> dict:
    fam, model = cfg["family"], cfg["model"]
    out = {"input": p, "error": None}
    try:
        if fam == "Ak":
            r = np.asarray(p["r"], dtype=float)
            geo = multi_center_gh(r, model)
            out.update(_geometry_fields(geo))
            out["V"] = multi_center_potential(r, model)
            out["A"] = gh_connection(r, model)
            out["residuals"]["contour_V"] = abs(contour_potential(r, model) - out["V"]) / out["V"]
            return out
        q = _quaternion(p)
        rho = float(p["rho"])
        if fam == "AtiyahHitchin" and "e2" in p:
            alpha, geo = atiyah_hitchin_pipeline(q, rho, float(p["e2"]), cfg["n_prime"])
            e2, residual = float(p["e2"]), 0.0
        else:
            solver = solver or E2Solver(cfg["tolerances"]["n_scan"], cfg["tolerances"]["constraint"])
            pt = dk_metric(q, rho, model, solver, e2=p.get("e2"))
            alpha, geo, e2, residual = model.alpha, pt.geometry, pt.e2, pt.residual
            out["h"] = pt.h.h
        out.update(_geometry_fields(geo))
        out["e2"] = e2
        out["residuals"]["constraint"] = residual
        if fam == "AtiyahHitchin":
            f = -2 * alpha
            ref = atiyah_hitchin_closed_form(rho, e2)
            W0 = unrotated_forms(geo.W, q)
            out["alpha"] = alpha
            out["closed_form"] = {"G": f * ref.G, "W": f * ref.W}
            out["W_unrotated"] = W0
            out["residuals"]["closed_form"] = max(
                np.abs(geo.G - f * ref.G).max() / np.abs(f * ref.G).max(),
                np.abs(W0 - f * ref.W).max() / np.abs(f * ref.W).max())
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        if isinstance(exc, ConfigError):
            raise
        return {"input": p, "error": {"code": _error_code(exc), "message": str(exc)}}
    return out


def _run_line(args):
    """Points sharing a solver, so the constraint root is continued along the line."""
    cfg, pts = args
    solver = None
    if cfg["family"] != "Ak" and cfg["model"] is not None:
        solver = E2Solver(cfg["tolerances"]["n_scan"], cfg["tolerances"]["constraint"])
    return [evaluate_point(cfg, p, solver) for p in pts]


def run_points(cfg: dict, lines: list, jobs: int = 1) -> list:
    tasks = [(cfg, line) for line in lines]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_line, tasks))
    else:
        results = [_run_line(t) for t in tasks]
    out = []
    for chunk in results:
        out.extend(chunk)
    for i, rec in enumerate(out):
        rec["index"] = i
    return out


def grid_lines(cfg: dict) -> list:
    """Grid points grouped into lines along the first axis, in row-major order."""
    g = cfg.get("grid")
    if not g:
        raise ConfigError("scan needs a 'grid'")

    def axis(name, default):
        lo, hi, n = g.get(name, default)
        return np.linspace(lo, hi, n) if n > 1 else np.array([lo])

    if cfg["family"] == "Ak":
        xs, ys, zs = axis("x", (0, 0, 1)), axis("y", (0, 0, 1)), axis("z", (0, 0, 1))
        return [[{"r": [float(x), float(y), float(z)]} for x in xs] for y, z in itertools.product(ys, zs)]
    if "rho" not in g:
        raise ConfigError("scan grid needs a 'rho' axis")
    rhos = axis("rho", None)
    angles = itertools.product(axis("phi", (0, 0, 1)), axis("theta", (1.0, 1.0, 1)), axis("psi", (0, 0, 1)))
    fracs = axis("e2_fraction", (0.5, 0.5, 1)) if cfg["family"] == "AtiyahHitchin" and cfg["model"] is None else [None]
    lines = []
    for (ph, th, ps), fr in itertools.product(angles, fracs):
        line = []
        for r in rhos:
            p = {"rho": float(r), "euler": [float(ph), float(th), float(ps)]}
            if fr is not None:
                p["e2"] = float(fr * r / 3)
            _check_point(cfg, p)
            line.append(p)
        lines.append(line)
    return lines


# ---------------------------------------------------------------- commands

def _envelope(cmd: str, cfg: dict | None, seed: int, body: dict) -> dict:
    out = {"format_version": FORMAT_VERSION, "command": cmd, "seed": seed}
    if cfg is not None:
        out["config"] = {k: v for k, v in cfg.items() if k != "model"}
    out.update(body)
    return out


def _points_exit(records) -> int:
    return EXIT_DEGENERATE if any(r["error"] for r in records) else EXIT_OK


def records_to_csv(records) -> str:
    """Flat metric components: upper-triangular G and W entries per point."""
    buf = io.StringIO()
    tri = [(i, j) for i in range(4) for j in range(i, 4)]
    wtri = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    coord_keys = ["r_x", "r_y", "r_z", "rho", "phi", "theta", "psi", "e2"]
    head = (["index"] + coord_keys + ["lambda", "signature_pos", "signature_neg"]
            + [f"G{i}{j}" for i, j in tri]
            + [f"W{k + 1}_{i}{j}" for k in range(3) for i, j in wtri] + ["error"])
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(head)
    for rec in records:
        p = rec["input"]
        r = p.get("r", [None] * 3)
        eu = p.get("euler", [None] * 3)
        row = [rec["index"], *r, p.get("rho"), *eu, rec.get("e2", p.get("e2"))]
        if rec["error"]:
            row += [None] * (3 + len(tri) + 3 * len(wtri)) + [rec["error"]["code"]]
        else:
            G, W = np.asarray(rec["G"]), np.asarray(rec["W"])
            row += [rec.get("lambda"), *rec["signature"]] + [G[i, j] for i, j in tri]
            row += [W[k][i, j] for k in range(3) for i, j in wtri] + [""]
        writer.writerow(["" if v is None else (_num(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def cmd_metric(args) -> tuple:
    cfg = load_config(args.config)
    rng = np.random.default_rng(args.seed)
    pts = sample_points(cfg, rng)
    # sample points are independent: each gets a fresh solver whatever --jobs is
    records = run_points(cfg, [[p] for p in pts], args.jobs)
    if args.format == "csv":
        return records_to_csv(records), _points_exit(records)
    return dumps(_envelope("metric", cfg, args.seed, {"points": records})), _points_exit(records)


def cmd_scan(args) -> tuple:
    cfg = load_config(args.config)
    records = run_points(cfg, grid_lines(cfg), args.jobs)
    if args.format == "csv":
        return records_to_csv(records), _points_exit(records)
    return dumps(_envelope("scan", cfg, args.seed, {"points": records})), _points_exit(records)


def cmd_periods(args) -> tuple:
    cfg = load_config(args.config)
    fam, model = cfg["family"], cfg["model"]
    if fam == "Ak":
        if model.k < 1:
            raise ConfigError("periods need k >= 1 for A_k")
        vecs = ak_period_matrix(model)
    elif fam == "Dk":
        if model.k < 2:
            raise ConfigError("periods are unsupported for D_k with k < 2: the k = 1 entry needs a "
                              "modulus r_0 that does not exist")
        vecs = dk_period_matrix(model)
    else:
        raise ConfigError("periods are unsupported for the Atiyah-Hitchin family (k = 0)")
    return dumps(_envelope("periods", cfg, args.seed, {"periods": vecs})), EXIT_OK


def cmd_verify(args) -> tuple:
    names = checks.SUITES if args.suite == "all" else (args.suite,)
    report = {}
    ok = True
    for name in names:
        results = checks.run_suite(name, args.seed)
        passed = all(c.passed for c in results)
        ok &= passed
        report[name] = {"passed": passed, "checks": [c.as_dict() for c in results]}
    body = {"suite": args.suite, "passed": ok, "suites": report}
    return dumps(_envelope("verify", None, args.seed, body)), EXIT_OK if ok else EXIT_VERIFY_FAILED


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be an integer") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hkinstanton", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("metric", "metric and forms at sample points"),
                           ("scan", "metric components over a grid"),
                           ("periods", "period vectors of the three forms")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--config", required=True)
        if name != "periods":
            p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("suite", nargs="?", default="all", choices=checks.SUITES + ("all",))
    return ap


COMMANDS = {"metric": cmd_metric, "scan": cmd_scan, "periods": cmd_periods, "verify": cmd_verify}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.format is None:
            args.format = "json"
            if getattr(args, "config", None):
                try:
                    with open(args.config) as fh:
                        args.format = json.load(fh).get("format", "json")
                except (OSError, json.JSONDecodeError, AttributeError):
                    pass
        if args.format == "csv" and args.command in ("periods", "verify"):
            raise ConfigError(f"{args.command} output is JSON only")
        text, code = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"hkinstanton: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
