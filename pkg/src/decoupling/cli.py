"""Command-line verification campaigns.

    decouple exponent -d 3 -v +- -p 4 -q 4
    decouple diagram -d 2 --bound 4 --format csv
    decouple verify-moments --M 8,16,32,64,128 -p 2,4,10
    decouple verify-extremizer --kind hyperplane -d 3 -v +- -p 4,6 -q 4,2

Reports are JSON (``{schema_version, command, config, results, verdicts}``)
or CSV.  The exit status is 0 iff every verdict passes.  Numerical values
are cached in an append-only CSV file given by ``--cache`` or
``$DECOUPLE_CACHE``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exponents as ex
from . import harness, weyl
from .cache import Cache, CacheRecord, now_stamp, resolve_path
from .fitting import FitResult, ScalingSeries, Verdict, compare, compare_one_sided, fit_exponent, log_growth_fit

SCHEMA_VERSION = 1

_VERDICT = {
    "type": "object",
    "required": ["label", "verdict"],
    "properties": {
        "label": {"type": "string"},
        "verdict": {"enum": [v.value for v in Verdict]},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "command", "config", "results", "verdicts"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"enum": ["exponent", "diagram", "verify-moments", "verify-extremizer"]},
        "config": {
            "type": "object",
            "required": ["command", "d", "signs", "p", "q", "M", "tol", "format"],
        },
        "results": {"type": "array", "items": {"type": "object"}},
        "verdicts": {"type": "array", "items": _VERDICT},
    },
}

MOMENT_TOL = {Fraction(2): 1e-6, Fraction(4): 0.03, Fraction(10): 0.05}
DEFAULT_MOMENT_TOL = 0.05


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    command: str
    d: int = 2
    signs: str = ""
    p: tuple[str, ...] = ()
    q: tuple[str, ...] = ()
    M: tuple[int, ...] = ()
    ox: int | None = None
    oy: int | None = None
    tol: float | None = None
    cap_tol: float = 0.15
    kind: str | None = None
    bound: int = 4
    all_denominators: bool = False
    format: str = "json"
    cache: str | None = field(default=None, compare=False)
    force: bool = field(default=False, compare=False)

    @property
    def spec(self) -> ex.ParaboloidSpec:
        return ex.ParaboloidSpec.from_signs(self.d, self.signs)

    def to_dict(self) -> dict:
        out = asdict(self)
        # where results are cached does not change them
        out.pop("cache")
        out.pop("force")
        out["p"] = list(self.p)
        out["q"] = list(self.q)
        out["M"] = list(self.M)
        return out


def _split(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _normalize_signs(text: str | None, d: int) -> str:
    if not text:
        return "+" * (d - 1)
    return text.replace("p", "+").replace("m", "-")


def _exponent_text(text: str) -> str:
    val = weyl.as_exponent(text)
    if val == math.inf:
        return "inf"
    val = Fraction(val)
    return str(val.numerator) if val.denominator == 1 else f"{val.numerator}/{val.denominator}"


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = ns.d
    signs = _normalize_signs(ns.signs, d)
    ex.ParaboloidSpec.from_signs(d, signs)  # validate early
    p = tuple(_exponent_text(t) for t in _split(ns.p))
    q = tuple(_exponent_text(t) for t in _split(ns.q))
    Ms = tuple(int(t) for t in _split(ns.M))
    if any(m < 1 for m in Ms):
        raise ValueError("M values must be positive")
    return RunConfig(
        command=ns.command, d=d, signs=signs, p=p, q=q, M=Ms, ox=ns.ox, oy=ns.oy,
        tol=ns.tol, cap_tol=ns.cap_tol, kind=getattr(ns, "kind", None), bound=ns.bound,
        all_denominators=ns.all_denominators, format=ns.format, cache=ns.cache, force=ns.force,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _ratio_text(x: Fraction) -> str:
    return ex.format_rational(Fraction(x))


def _fit_dict(fit: FitResult, **extra) -> dict:
    out = fit.to_dict()
    out.update(extra)
    return out


def cmd_exponent(cfg: RunConfig, cache: Cache) -> dict:
    if len(cfg.p) != 1 or len(cfg.q) != 1:
        raise ValueError("exponent needs exactly one -p and one -q")
    spec = cfg.spec
    pt = ex.DiagramPoint.from_pq(cfg.p[0], cfg.q[0])
    br = ex.sharp_exponent(spec, pt)
    row = br.to_dict()
    row["reference_upper_bounds"] = [
        {"name": name, "exponent": _ratio_text(val)} for name, val in ex.reference_upper_bounds(spec, pt)
    ]
    return {"results": [row], "verdicts": []}


def cmd_diagram(cfg: RunConfig, cache: Cache) -> dict:
    spec = cfg.spec
    if cfg.bound < 2:
        raise ValueError("--bound must be at least 2")
    if cfg.all_denominators:
        coords = ex.rational_grid(cfg.bound)
    else:
        coords = [Fraction(k, cfg.bound) for k in range(cfg.bound // 2 + 1)]
    names = {pt: name for name, pt in ex.anchors(spec).items()}
    rows = []
    for rp in coords:
        for rq in coords:
            pt = ex.DiagramPoint(rp, rq)
            br = ex.sharp_exponent(spec, pt)
            rows.append({
                "rp": _ratio_text(rp),
                "rq": _ratio_text(rq),
                "p": pt.p_text,
                "q": pt.q_text,
                "region": br.region.region.value,
                "regions": "|".join(br.region.names()),
                "sharp": _ratio_text(br.sharp),
                "anchor": names.get(pt, ""),
            })
    return {"results": rows, "verdicts": []}


def _moment(cache: Cache, M: int, p, grid: weyl.GridSpec | None) -> weyl.MomentSample:
    tag = "exact" if grid is None else f"ox={grid.ox},oy={grid.oy}"
    kind = f"moment_2d[{tag}]"
    key = CacheRecord(kind, 2, "+", M, p, None, 0.0).key
    hit = cache.get(key)
    if hit is not None:
        return weyl.MomentSample("moment_2d", M, p, hit.value, hit.err)
    with_error = weyl.even_half(p) is None
    s = weyl.moment_2d(M, p, grid, with_error=with_error)
    cache.put(CacheRecord(kind, 2, "+", M, p, None, s.value, s.err, now_stamp()))
    return s


def _moment_prediction(p) -> Fraction:
    if p == math.inf:
        return Fraction(1)
    return Fraction(1, 2) if p <= 6 else 1 - 3 / Fraction(p)


def cmd_verify_moments(cfg: RunConfig, cache: Cache) -> dict:
    Ms = cfg.M or (8, 16, 32, 64, 128)
    ps = [weyl.as_exponent(t) for t in (cfg.p or ("2", "4", "10"))]
    grid = None
    if cfg.ox is not None or cfg.oy is not None:
        grid = weyl.GridSpec(cfg.ox or 4, cfg.oy or 4)
    results, verdicts = [], []
    for p in ps:
        samples = [_moment(cache, M, p, grid) for M in Ms]
        for s in samples:
            results.append({"kind": "moment_2d", "M": s.M, "p": _exponent_text(str(p)),
                            "value": s.value, "err": s.err})
        if len(Ms) >= 3:
            tol = cfg.tol if cfg.tol is not None else MOMENT_TOL.get(p, DEFAULT_MOMENT_TOL)
            fit = fit_exponent(ScalingSeries(Ms, [s.value for s in samples], f"moment p={p}"))
            fit = compare(fit, _moment_prediction(p), tol)
            verdicts.append(_fit_dict(fit, check="slope vs M"))
    # exact oracles: Plancherel on the ladder, brute-force counts at small M
    for M in Ms:
        s = _moment(cache, M, Fraction(2), None)
        rel = abs(s.value**2 - M) / M
        verdicts.append({"label": f"oracle p=2 M={M}", "rel_err": rel,
                         "verdict": (Verdict.PASS if rel <= 1e-10 else Verdict.FAIL).value})
    for M in [m for m in Ms if m <= 32]:
        s = _moment(cache, M, Fraction(4), None)
        exact = weyl.fourth_moment_count(M) if M <= 12 else 2 * M * M - M
        rel = abs(s.power - exact) / exact
        verdicts.append({"label": f"oracle p=4 M={M}", "rel_err": rel, "exact": exact,
                         "verdict": (Verdict.PASS if rel <= 1e-8 else Verdict.FAIL).value})
    if len(Ms) >= 3:
        table = [(M, _moment(cache, M, Fraction(6), None).power / M**3) for M in Ms]
        vals = [v for _, v in table]
        a, b = log_growth_fit(Ms, vals)
        increasing = all(y > x for x, y in zip(vals, vals[1:]))
        for M, v in table:
            results.append({"kind": "sixth_moment_normalized", "M": M, "p": "6", "value": v, "err": None})
        verdicts.append({"label": "sixth moment log growth", "a": a, "b": b, "increasing": increasing,
                         "verdict": (Verdict.PASS if increasing and b > 0 else Verdict.FAIL).value})
    return {"results": results, "verdicts": verdicts}


def _pairs(cfg: RunConfig) -> list[tuple[str, str]]:
    ps, qs = cfg.p, cfg.q
    if not ps or not qs:
        raise ValueError("verify-extremizer needs -p and -q")
    if len(qs) == 1:
        qs = qs * len(ps)
    elif len(ps) == 1:
        ps = ps * len(qs)
    if len(ps) != len(qs):
        raise ValueError("-p and -q lists must have equal length (or one of them a single value)")
    return list(zip(ps, qs))


def _ratio_sample(cache: Cache, kind: str, spec: ex.ParaboloidSpec, M: int, p, q, ox: int) -> float:
    tag = "h=0.5" if kind == "constant" else f"ox={ox}"
    ckind = f"{kind}[{tag}]"
    key = CacheRecord(ckind, spec.d, spec.signs, M, p, q, 0.0).key
    hit = cache.get(key)
    if hit is not None:
        return hit.value
    kwargs = {} if kind == "constant" else {"ox": ox}
    s = harness.ratio(kind, spec, M, p, q, **kwargs)
    cache.put(CacheRecord(ckind, spec.d, spec.signs, M, p, q, s.ratio, s.err, now_stamp()))
    return s.ratio


def _dirichlet(cache: Cache, d: int, M: int, p, ox: int) -> float:
    kind = f"dirichlet_factor[ox={ox}]"
    key = CacheRecord(kind, d, "", M, p, None, 0.0).key
    hit = cache.get(key)
    if hit is not None:
        return hit.value
    val = harness.dirichlet_factor(M, p, ox)
    cache.put(CacheRecord(kind, d, "", M, p, None, val, None, now_stamp()))
    return val


def cmd_verify_extremizer(cfg: RunConfig, cache: Cache) -> dict:
    if cfg.kind is None:
        raise ValueError("verify-extremizer needs --kind")
    spec = cfg.spec
    Ms = cfg.M or harness.DEFAULT_LADDER
    tol = 0.1 if cfg.tol is None else cfg.tol
    ox = cfg.ox or 4
    results, verdicts = [], []
    for p_text, q_text in _pairs(cfg):
        p, q = weyl.as_exponent(p_text), weyl.as_exponent(q_text)
        ratios = [_ratio_sample(cache, cfg.kind, spec, M, p, q, ox) for M in Ms]
        Ns = [M ** (spec.d - 1) for M in Ms]
        for M, N, r in zip(Ms, Ns, ratios):
            results.append({"kind": cfg.kind, "d": spec.d, "signs": spec.signs, "M": M, "N": N,
                            "p": p_text, "q": q_text, "ratio": r})
        if len(Ms) < 3:
            continue
        lower = harness.predicted_lower_bound(cfg.kind, spec, p, q)
        sharp = harness.predicted_sharp(spec, p, q)
        fit = fit_exponent(ScalingSeries(Ns, ratios, f"{cfg.kind} p={p_text} q={q_text}"))
        fit = compare_one_sided(fit, lower, sharp, tol, cfg.cap_tol)
        verdicts.append(_fit_dict(fit, check="slope vs N, one-sided",
                                  sharp=_ratio_text(sharp), cap_tol=cfg.cap_tol))
    if cfg.kind == "hyperplane" and len(Ms) >= 3:
        for p_text in sorted({p for p, _ in _pairs(cfg) if p != "inf"}, key=lambda t: Fraction(t)):
            p = weyl.as_exponent(p_text)
            vals = [_dirichlet(cache, spec.d, M, p, ox) for M in Ms]
            inv_delta = [M * M for M in Ms]
            fit = fit_exponent(ScalingSeries(inv_delta, vals, f"dirichlet factor p={p_text}"))
            fit = compare(fit, (Fraction(p) + 3) / 2, tol)
            verdicts.append(_fit_dict(fit, check="slope vs 1/delta"))
    return {"results": results, "verdicts": verdicts}


COMMANDS = {
    "exponent": cmd_exponent,
    "diagram": cmd_diagram,
    "verify-moments": cmd_verify_moments,
    "verify-extremizer": cmd_verify_extremizer,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def build_report(cfg: RunConfig, body: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg.to_dict(),
        "results": body["results"],
        "verdicts": body["verdicts"],
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "|".join(json.dumps(x, sort_keys=True) if isinstance(x, dict) else str(x) for x in v)
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_csv(rows: Sequence[dict]) -> str:
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def all_pass(report: dict) -> bool:
    return all(v["verdict"] == Verdict.PASS.value for v in report["verdicts"])


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-d", type=int, default=2, help="dimension d >= 2 (default 2)")
    common.add_argument("-v", "--signs", default=None,
                        help="sign vector of length d-1 as + and - (or p and m); default all +")
    common.add_argument("-p", default=None, help="comma-separated p values: integers, num/den or inf")
    common.add_argument("-q", default=None, help="comma-separated q values: integers, num/den or inf")
    common.add_argument("--M", default=None, help="comma-separated M ladder")
    common.add_argument("--ox", type=int, default=None, help="x oversampling (default: exact grid or 4)")
    common.add_argument("--oy", type=int, default=None, help="y oversampling (default: exact grid or 4)")
    common.add_argument("--tol", type=float, default=None,
                        help="slope tolerance (default 0.1 for ratios; 1e-6/0.03/0.05 for p=2/4/10 moments)")
    common.add_argument("--cap-tol", type=float, default=0.15, help="slack above the sharp exponent (default 0.15)")
    common.add_argument("--bound", type=int, default=4, help="diagram grid denominator (default 4)")
    common.add_argument("--all-denominators", action="store_true",
                        help="diagram over all fractions with denominator <= bound")
    common.add_argument("--cache", default=None, help="CSV cache path (default $DECOUPLE_CACHE, else none)")
    common.add_argument("--force", action="store_true", help="recompute and append even when cached")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format (default json)")

    parser = argparse.ArgumentParser(prog="decouple", description="Decoupling exponent verification.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("exponent", parents=[common], help="sharp exponent and lower bounds at (p, q)")
    sub.add_parser("diagram", parents=[common], help="region and exponent over a rational grid")
    sub.add_parser("verify-moments", parents=[common], help="Weyl-sum moment scalings and oracles")
    ext = sub.add_parser("verify-extremizer", parents=[common], help="decoupling-ratio slope fits")
    ext.add_argument("--kind", choices=[k.value for k in harness.Kind], required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        cache = Cache(resolve_path(cfg.cache), force=cfg.force)
        body = COMMANDS[cfg.command](cfg, cache)
    except (ValueError, ZeroDivisionError, weyl.ResourceError) as exc:
        print(f"decouple: error: {exc}", file=sys.stderr)
        return 2
    report = build_report(cfg, body)
    if cfg.format == "json":
        sys.stdout.write(render_json(report))
    else:
        sys.stdout.write(render_csv(report["results"]))
        if report["verdicts"]:
            sys.stdout.write("\n" + render_csv(report["verdicts"]))
    return 0 if all_pass(report) else 1


if __name__ == "__main__":
    sys.exit(main())
