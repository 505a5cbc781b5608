"""Workspace, ingestion and the ``rankinpadic`` command line.

The workspace root comes from ``--workspace``, else ``$RANKINPADIC_WORKSPACE``,
else ``./rankinpadic-workspace``.  It holds ``manifest.json`` (ingested
datasets with content hashes), ``datasets/``, ``cache/`` and ``reports/``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import threading
from fractions import Fraction
from pathlib import Path
from typing import Optional

ENV_WORKSPACE = "RANKINPADIC_WORKSPACE"
DEFAULT_SEED = 7


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=str)


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class Workspace:
    """Root directory with a manifest and a key-addressed cache.

    Writes go through a temporary file and ``os.replace`` under a lock, so
    concurrent writers never leave a torn file behind.
    """

    _lock = threading.Lock()

    def __init__(self, root=None):
        root = root or os.environ.get(ENV_WORKSPACE) or "rankinpadic-workspace"
        self.root = Path(root)
        for sub in ("datasets", "cache", "reports"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self.cache_enabled = True

    # manifest
    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def manifest(self) -> dict:
        if self.manifest_path.exists():
            return json.loads(self.manifest_path.read_text())
        return {"datasets": {}}

    def _write(self, path: Path, text: str):
        with self._lock:
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)

    def register(self, kind: str, name: str, raw: bytes) -> dict:
        h = content_hash(raw)
        dest = self.root / "datasets" / f"{kind}-{h[:12]}.json"
        if not dest.exists():
            self._write(dest, raw.decode())
        man = self.manifest()
        entry = {"kind": kind, "name": name, "sha256": h, "file": str(dest.relative_to(self.root))}
        man["datasets"][h[:12]] = entry
        self._write(self.manifest_path, _dumps(man))
        return {"handle": h[:12], **entry}

    def load(self, handle: str):
        entry = self.manifest()["datasets"].get(handle)
        if entry is None:
            raise KeyError(f"no dataset {handle!r} in {self.manifest_path}")
        raw = (self.root / entry["file"]).read_bytes()
        if content_hash(raw) != entry["sha256"]:
            raise ValueError(f"dataset {handle} does not match its manifest hash")
        return entry["kind"], json.loads(raw)

    # cache
    def cache_key(self, op: str, inputs, budgets: dict) -> str:
        return content_hash(_dumps({"op": op, "inputs": inputs, "budgets": budgets}).encode())

    def cached(self, op: str, inputs, budgets: dict, compute):
        """JSON-serialisable result of ``compute()``, stored under (op, inputs, budgets)."""
        key = self.cache_key(op, inputs, budgets)
        path = self.root / "cache" / f"{key}.json"
        if self.cache_enabled and path.exists():
            return json.loads(path.read_text())
        result = compute()
        text = _dumps(result)
        if self.cache_enabled:
            self._write(path, text)
        return json.loads(text)

    def write_report(self, name: str, report: dict) -> Path:
        path = self.root / "reports" / f"{name}.json"
        self._write(path, _dumps(report))
        self._write(path.with_suffix(".tsv"), report_tsv(report))
        return path


def report_tsv(report: dict) -> str:
    lines = ["suite\tcheck\tok"]
    for c in report.get("checks", []):
        lines.append(f"{report.get('suite', '')}\t{c['name']}\t{'pass' if c['ok'] else 'FAIL'}")
    for s in report.get("skipped", []):
        lines.append(f"{report.get('suite', '')}\t{s}\tskip")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# ingestion


def detect_kind(obj) -> str:
    if isinstance(obj, list):
        if all(isinstance(o, dict) and "frob_inv" in o for o in obj):
            return "weil-deligne"
        raise ValueError("unrecognised list schema (expected Weil-Deligne records)")
    if "an" in obj:
        return "newform"
    if "basis" in obj:
        return "space"
    if "frob_inv" in obj:
        return "weil-deligne"
    if "f" in obj and "g" in obj:
        return "point"
    raise ValueError("the file matches none of the schemas: newform, space, weil-deligne, point")


def validate(kind: str, obj):
    """Run the type invariants; return the parsed object."""
    from .forms import NewformData
    from .localfactors import WeilDeligneDatum
    from .padicL import OrdinarySpace
    if kind == "newform":
        return NewformData.from_json(obj)
    if kind == "space":
        return OrdinarySpace.from_json(obj)
    if kind == "weil-deligne":
        recs = obj if isinstance(obj, list) else [obj]
        return [WeilDeligneDatum.from_json(r) for r in recs]
    if kind == "point":
        return load_point(obj)
    raise ValueError(f"unknown kind {kind}")


def ingest(path, ws: Workspace) -> dict:
    raw = Path(path).read_bytes()
    obj = json.loads(raw)
    kind = detect_kind(obj)
    parsed = validate(kind, obj)
    name = getattr(parsed, "label", None) or Path(path).stem
    return ws.register(kind, name, raw)


def resolve_newform(ref: str, ws: Optional[Workspace] = None):
    """A packaged label, a workspace handle or a path."""
    from . import datasets
    from .forms import NewformData
    if ref in datasets.NEWFORMS:
        return datasets.newform(ref)
    if ws is not None and ref in ws.manifest()["datasets"]:
        kind, obj = ws.load(ref)
        return NewformData.from_json(obj)
    return NewformData.from_json(json.loads(Path(ref).read_text()))


def resolve_space(ref: Optional[str], ws: Optional[Workspace] = None):
    from . import datasets
    from .padicL import OrdinarySpace
    if ref in (None, "M12_11"):
        return datasets.space_12_11()
    if ws is not None and ref in ws.manifest()["datasets"]:
        return OrdinarySpace.from_json(ws.load(ref)[1])
    return OrdinarySpace.from_json(json.loads(Path(ref).read_text()))


def load_point(obj, ws=None, p=None, N=None):
    from .forms import PointSpec
    f = resolve_newform(obj["f"], ws)
    g = resolve_newform(obj["g"], ws)
    return PointSpec(f, g, int(obj.get("t", 0)), int(obj.get("p", p or 11)), int(obj.get("N", N or 1)))


# ---------------------------------------------------------------------------
# commands


def _emit(obj, out=None):
    text = _dumps(obj)
    (out or sys.stdout).write(text + "\n")


def cmd_ingest(args, ws):
    handles = [ingest(p, ws) for p in args.paths]
    _emit({"ingested": handles})
    return 0


def cmd_qexp(args, ws):
    from .coefficients import scalar_to_json
    f = resolve_newform(args.form, ws)
    n = min(args.qprec, f.prec)
    _emit({"label": f.label, "weight": f.weight, "level": f.level,
           "coeffs": [scalar_to_json(f.a(i)) for i in range(n)]})
    return 0


def cmd_eis(args, ws):
    from .coefficients import DirichletCharacter, scalar_to_json
    from .eisenstein import eis_E, eis_F, eis_F_tilde
    p, N, m = args.p, args.N, args.m
    chars = DirichletCharacter.all_mod(p ** args.r)
    chi = chars[args.chi]
    if args.family == "F":
        F = eis_F(m, None if chi.is_trivial() else chi, N, p, args.qprec)
    elif args.family == "Ftilde":
        F = eis_F_tilde(m, chi, N, p, args.qprec, args.r)
    else:
        F = eis_E(m, N, p, args.qprec)
    _emit({"family": args.family, "m": m, "p": p, "N": N, "chi": chi.to_json(),
           "coeffs": [scalar_to_json(c) for c in F.coeffs]})
    return 0


def cmd_euler(args, ws):
    import random
    from .localfactors import crys_identities, modified_factor, modified_factor_ratio, random_crys_data
    rng = random.Random(args.seed)
    out = []
    for _ in range(args.samples):
        d = random_crys_data(rng, args.p)
        ids = crys_identities(d)
        mf = modified_factor(d)
        out.append({"k": d.k, "l": d.l, "t": d.t, "alpha": str(d.alpha), "b_p": str(d.bp),
                    "identities": {k: v["ok"] for k, v in ids.items()},
                    "modified_factor": str(mf), "proposition": mf == modified_factor_ratio(d)})
    ok = all(all(r["identities"].values()) and r["proposition"] for r in out)
    _emit({"p": args.p, "seed": args.seed, "samples": out, "ok": ok})
    return 0 if ok else 1


def cmd_gamma(args, ws):
    from .localfactors import WeilDeligneDatum, tame_gamma
    from . import datasets
    if args.wd:
        obj = json.loads(Path(args.wd).read_text())
        reps = [WeilDeligneDatum.from_json(o) for o in (obj if isinstance(obj, list) else [obj])]
    else:
        reps = datasets.wd_samples()
    X = Fraction(args.X) if args.X is not None else None
    out = []
    for rep in reps:
        rf = tame_gamma(rep)
        rec = {"dim": rep.dim, "residue": rep.residue, "gamma": repr(rf)}
        if X is not None:
            rec["value"] = str(rf(X))
        out.append(rec)
    _emit({"gamma": out})
    return 0


def _budgets(args):
    from .padicL import Budgets
    return Budgets(args.qprec, args.pprec)


def _point_from_args(args, ws):
    if getattr(args, "point", None):
        return load_point(json.loads(Path(args.point).read_text()), ws, args.p, args.N)
    return load_point({"f": args.f, "g": args.g, "t": args.t, "p": args.p, "N": args.N}, ws)


def cmd_lvalue(args, ws, dual=False):
    from .padicL import dual_padic_L_at, padic_L_at, result_record
    point = _point_from_args(args, ws)
    space = resolve_space(args.space, ws)
    budgets = _budgets(args)

    def compute():
        fn = dual_padic_L_at if dual else padic_L_at
        val, prov = fn(point, space, budgets, with_provenance=True)
        return result_record(point, val, prov, "L'" if dual else "L")

    rec = ws.cached("dual-lvalue" if dual else "lvalue", point.describe(),
                    {"qprec": budgets.qprec, "pprec": budgets.pprec}, compute)
    _emit(rec)
    return 0


def _read_gamma(path):
    if path is None:
        return Fraction(1), "empty product (no primes divide N)"
    obj = json.loads(Path(path).read_text())
    if "gamma" in obj:
        return Fraction(obj["gamma"]), "ingested"
    from .localfactors import WeilDeligneDatum, gamma_product
    data = {int(nu): WeilDeligneDatum.from_json(rep) for nu, rep in obj.get("local_data", {}).items()}
    return gamma_product(data), "product of rank-4 tame gamma factors"


def cmd_fe(args, ws):
    from .padicL import dual_padic_L_at, fe_report, padic_L_at
    point = _point_from_args(args, ws)
    space = resolve_space(args.space, ws)
    budgets = _budgets(args)
    gamma, source = _read_gamma(args.gamma)
    L = padic_L_at(point, space, budgets)
    Ld = dual_padic_L_at(point, space, budgets)
    rep = fe_report(point, L, Ld, gamma, Fraction(1 + point.p) if args.tamper else None)
    ok = rep["zero"] and rep["precision"] >= args.min_digits
    if args.tamper:
        ok = ok and rep["tamper"]["detected"]
    out = {"point": point.describe(), "gamma": str(gamma), "gamma_source": source, **rep,
           "verdict": "pass" if ok else "fail"}
    ws.write_report("fe", {"suite": "fe", "ok": ok, "checks": [{"name": "fe residual", "ok": ok}]})
    _emit(out)
    return 0 if ok else 1


def cmd_check(args, ws):
    from . import suites
    from .padicL import Budgets
    name = args.suite
    if name == "eisenstein":
        rep = suites.eisenstein_suite(args.p, args.N, args.m, args.r, args.prec, args.w_prec)
    elif name == "euler":
        rep = suites.euler_suite(args.samples, args.seed)
        kl = suites.key_lemma_suite()
        rep["checks"] += kl["checks"]
        rep["ok"] = rep["ok"] and kl["ok"]
    elif name == "gamma":
        rep = suites.gamma_suite(args.samples, args.seed)
    elif name == "pipeline":
        b = Budgets(args.qprec, args.pprec)
        rep = suites.pipeline_suite(b, args.seed)
        pr = suites.projector_suite(seed=args.seed, prec=args.pprec)
        rep["checks"] += pr["checks"]
        rep["ok"] = rep["ok"] and pr["ok"]
    elif name == "fe":
        rep = suites.fe_suite(Budgets(args.qprec, args.pprec))
    else:
        raise ValueError(name)
    path = ws.write_report(name, rep)
    rep["report_file"] = str(path)
    _emit(rep)
    return 0 if rep["ok"] else 1


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults so that a
    # flag given before the subcommand is not overwritten
    common = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common.add_argument("--p", type=int, default=d(None), help="the prime p")
    common.add_argument("--N", type=int, default=d(None), help="tame level N")
    common.add_argument("--qprec", type=int, default=d(220), help="q-expansion precision budget")
    common.add_argument("--pprec", type=int, default=d(30), help="p-adic precision budget (digits)")
    common.add_argument("--seed", type=int, default=d(DEFAULT_SEED),
                        help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--workspace", default=d(None), help=f"workspace root (or ${ENV_WORKSPACE})")
    return common


def build_parser() -> argparse.ArgumentParser:
    top = _global_flags(False)
    common = _global_flags(True)

    ap = argparse.ArgumentParser(prog="rankinpadic", parents=[top],
                                 description="p-adic Rankin-Selberg computations and identity checks")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[common], help="validate and register JSON datasets")
    s.add_argument("paths", nargs="+")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("qexp", parents=[common], help="print stored q-expansion coefficients")
    s.add_argument("form", help="packaged label (11a, Delta, E4), workspace handle or path")
    s.set_defaults(func=cmd_qexp)

    s = sub.add_parser("eis", parents=[common], help="q-expansion of an Eisenstein family member")
    s.add_argument("--family", choices=["F", "Ftilde", "E"], default="F")
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--chi", type=int, default=0, help="index into the characters mod p^r")
    s.set_defaults(func=cmd_eis)

    s = sub.add_parser("euler", parents=[common], help="crystalline identities on random local data")
    s.add_argument("--samples", type=int, default=5)
    s.set_defaults(func=cmd_euler)

    s = sub.add_parser("gamma", parents=[common], help="tame gamma factors of Weil-Deligne data")
    s.add_argument("--wd", default=None, help="JSON file of Weil-Deligne records (default: packaged samples)")
    s.add_argument("--X", default=None, help="evaluate at this rational X")
    s.set_defaults(func=cmd_gamma)

    for name, dual in (("lvalue", False), ("dual-lvalue", True)):
        s = sub.add_parser(name, parents=[common], help=("value of the dual p-adic L-function" if dual
                                                          else "value of the p-adic L-function"))
        s.add_argument("--f", default="Delta")
        s.add_argument("--g", default="E4")
        s.add_argument("--t", type=int, default=0)
        s.add_argument("--point", default=None, help="point JSON {f, g, t, p, N}")
        s.add_argument("--space", default=None, help="space JSON/handle (default: packaged M_12(Gamma_0(11)))")
        s.set_defaults(func=(lambda a, w, d=dual: cmd_lvalue(a, w, d)))

    s = sub.add_parser("fe", parents=[common], help="functional-equation residual at a point")
    s.add_argument("--point", default=None)
    s.add_argument("--f", default="Delta")
    s.add_argument("--g", default="E4")
    s.add_argument("--t", type=int, default=0)
    s.add_argument("--gamma", default=None, help='JSON {"gamma": value} or {"local_data": {nu: datum}}')
    s.add_argument("--space", default=None)
    s.add_argument("--tamper", action="store_true", help="also run the (1+p) perturbation control")
    s.add_argument("--min-digits", type=int, default=20)
    s.set_defaults(func=cmd_fe)

    s = sub.add_parser("check", parents=[common], help="run an identity suite")
    s.add_argument("suite", choices=["eisenstein", "euler", "gamma", "pipeline", "fe"])
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--prec", type=int, default=100)
    s.add_argument("--w-prec", type=int, default=60)
    s.add_argument("--samples", type=int, default=None)
    s.set_defaults(func=cmd_check)
    return ap


_DEFAULTS = {"eisenstein": {"p": 3, "N": 4}, "euler": {"samples": 100}, "gamma": {"samples": 50},
             "fe": {"p": 11, "N": 1}}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    defaults = {"p": 11, "N": 1}
    if args.command == "check":
        defaults.update(_DEFAULTS.get(args.suite, {}))
    elif args.command == "eis":
        defaults.update({"p": 3, "N": 4})
    elif args.command == "euler":
        defaults.update({"p": 5})
    for key, val in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)
    ws = Workspace(args.workspace)
    try:
        return args.func(args, ws)
    except (ValueError, KeyError, ArithmeticError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
