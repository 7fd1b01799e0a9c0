"""Command-line driver: sweeps, optimization, scaling studies, report emission.

Config files are flat UTF-8 text, one ``key=value`` per line, ``#`` comments
allowed. Grid keys take comma-separated lists; exactly one of ``a`` or ``b``
must be present. ``dt`` is either an explicit grid or the single literal
``auto``, which solves the cancellation spacing b / (2 k a) per point.

    b=10            # or a=0.99,0.999
    delta=0.01,0.001
    dt=auto         # or dt=0.5,1.0
    k=1,5,20
    xi=0.5
    mode=both       # exact | paper | both
    out=results/study

Reports are a CSV (fixed header, LF endings) plus a plain-text adjudication
summary; identical configs produce byte-identical files. Numbers are printed
with 17 significant digits so fourth-order-in-delta differences survive a
round trip.

Exit codes: 0 success, 1 validation error, 2 numerical failure at top level.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path

from . import protocol, series
from .helstrom import guess_only_cost, helstrom_cost
from .protocol import Mode, ProtocolParams
from .qcore import DegenerateBranchError, DegenerateVectorError, ValidationError

DEFAULT_DIGITS = 17

_GRID_KEYS = ("a", "b", "delta", "dt", "k", "xi")
_SCALAR_KEYS = ("mode", "e0", "e1", "digits", "out")

CSV_COLUMNS = (
    "a", "b", "delta", "dt", "k", "xi", "mode",
    "total_cost", "baseline_exact", "baseline_paper", "paper_new_cost",
    "final_overlap", "overlap_exponent",
    "verdict_vs_baseline_exact", "verdict_vs_baseline_paper", "error",
)

SCALING_COLUMNS = (
    "quantity", "b", "k", "xi", "dt_rule",
    "exponent", "intercept", "n_floored", "indeterminate", "flag",
    "deltas", "residuals",
)

# Scaling quantities whose series side is one of the flagged expressions.
_QUANTITY_FLAGS = {
    "overlap_vs_series": "overlap_k_paper",
    "final_overlap": "overlap_k_paper",
    "survival_k": "survival_k_paper",
}


@dataclass(frozen=True)
class SweepConfig:
    """Validated sweep definition; grids are tuples, dt=None means auto."""

    a: tuple[float, ...] | None
    b: tuple[float, ...] | None
    delta: tuple[float, ...]
    dt: tuple[float, ...] | None
    k: tuple[int, ...]
    xi: tuple[float, ...]
    modes: tuple[Mode, ...]
    e0: float = 1.0
    e1: float = 2.0
    digits: int = DEFAULT_DIGITS
    out: str | None = None

    @property
    def auto_dt(self) -> bool:
        return self.dt is None


@dataclass(frozen=True)
class ReportRow:
    """One protocol evaluation, or one failed point with its error message."""

    a: float
    b: float
    delta: float
    dt: float
    k: int
    xi: float
    mode: str
    total_cost: float | None = None
    baseline_exact: float | None = None
    baseline_paper: float | None = None
    paper_new_cost: float | None = None
    final_overlap: float | None = None
    overlap_exponent: float | None = None
    verdict_vs_baseline_exact: float | None = None
    verdict_vs_baseline_paper: float | None = None
    error: str = ""


def _where(lineno: int) -> str:
    return f"line {lineno}: " if lineno else ""


def _parse_floats(raw: str, key: str, lineno: int) -> tuple[float, ...]:
    vals = []
    for piece in raw.split(","):
        piece = piece.strip()
        if not piece:
            raise ValidationError(f"{_where(lineno)}empty entry in grid for '{key}'")
        try:
            vals.append(float(piece))
        except ValueError:
            raise ValidationError(f"{_where(lineno)}'{piece}' is not a number for '{key}'") from None
    return tuple(vals)


def parse_config(text: str) -> SweepConfig:
    """Parse and validate the flat key=value sweep format."""
    seen: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValidationError(f"line {lineno}: expected key=value, got '{stripped}'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _GRID_KEYS and key not in _SCALAR_KEYS:
            raise ValidationError(f"line {lineno}: unknown key '{key}'")
        if key in seen:
            raise ValidationError(f"line {lineno}: duplicate key '{key}'")
        if not raw:
            raise ValidationError(f"line {lineno}: empty value for '{key}'")
        seen[key] = (raw, lineno)
    return _build_config(seen)


def _build_config(seen: dict[str, tuple[str, int]]) -> SweepConfig:
    def take(key):
        return seen.pop(key, None)

    a_entry, b_entry = take("a"), take("b")
    if (a_entry is None) == (b_entry is None):
        raise ValidationError("exactly one of 'a' or 'b' must be given")
    a_grid = b_grid = None
    if a_entry is not None:
        a_grid = _parse_floats(a_entry[0], "a", a_entry[1])
        for v in a_grid:
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{_where(a_entry[1])}a={v} outside [0, 1]")
    if b_entry is not None:
        b_grid = _parse_floats(b_entry[0], "b", b_entry[1])
        for v in b_grid:
            if v < 0.0:
                raise ValidationError(f"{_where(b_entry[1])}b={v} must be nonnegative")

    delta_entry = take("delta")
    if delta_entry is None:
        raise ValidationError("missing required key 'delta'")
    delta = _parse_floats(delta_entry[0], "delta", delta_entry[1])
    for v in delta:
        if v < 0.0:
            raise ValidationError(f"{_where(delta_entry[1])}delta={v} must be nonnegative")

    dt_entry = take("dt")
    dt: tuple[float, ...] | None
    if dt_entry is None or dt_entry[0] == "auto":
        dt = None
    else:
        if "auto" in (p.strip() for p in dt_entry[0].split(",")):
            raise ValidationError(f"{_where(dt_entry[1])}dt grid cannot mix 'auto' with numbers")
        dt = _parse_floats(dt_entry[0], "dt", dt_entry[1])
        for v in dt:
            if v <= 0.0:
                raise ValidationError(f"{_where(dt_entry[1])}dt={v} must be positive")

    k_entry = take("k")
    k_grid = (1,)
    if k_entry is not None:
        ks = []
        for piece in k_entry[0].split(","):
            piece = piece.strip()
            if not piece.lstrip("+").isdigit():
                raise ValidationError(f"{_where(k_entry[1])}k entries must be positive integers, got '{piece}'")
            val = int(piece)
            if val < 1:
                raise ValidationError(f"{_where(k_entry[1])}k={val} must be >= 1")
            ks.append(val)
        k_grid = tuple(ks)

    xi_entry = take("xi")
    xi = (0.5,)
    if xi_entry is not None:
        xi = _parse_floats(xi_entry[0], "xi", xi_entry[1])
        for v in xi:
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{_where(xi_entry[1])}xi={v} outside [0, 1]")

    mode_entry = take("mode")
    modes = (Mode.EXACT,)
    if mode_entry is not None:
        modes = _parse_modes(mode_entry[0], lineno=mode_entry[1])

    def scalar_float(key, default):
        entry = take(key)
        if entry is None:
            return default
        try:
            return float(entry[0])
        except ValueError:
            raise ValidationError(f"{_where(entry[1])}'{entry[0]}' is not a number for '{key}'") from None

    e0 = scalar_float("e0", 1.0)
    e1 = scalar_float("e1", 2.0)
    digits_entry = take("digits")
    digits = DEFAULT_DIGITS
    if digits_entry is not None:
        if not digits_entry[0].isdigit() or not (6 <= int(digits_entry[0]) <= 17):
            raise ValidationError(f"{_where(digits_entry[1])}digits must be an integer in [6, 17]")
        digits = int(digits_entry[0])
    out_entry = take("out")
    out = out_entry[0] if out_entry is not None else None

    return SweepConfig(a=a_grid, b=b_grid, delta=delta, dt=dt, k=k_grid,
                       xi=xi, modes=modes, e0=e0, e1=e1, digits=digits, out=out)


def _parse_modes(raw: str, lineno: int | None = None) -> tuple[Mode, ...]:
    where = f"line {lineno}: " if lineno is not None else ""
    name = raw.strip().lower()
    if name == "both":
        return (Mode.EXACT, Mode.PAPER)
    try:
        return (Mode(name),)
    except ValueError:
        raise ValidationError(f"{where}mode must be exact, paper, or both, got '{raw}'") from None


def _fmt(value, digits: int) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


def _point_params(config: SweepConfig, ab: float, delta: float, dt: float | None,
                  k: int, xi: float, mode: Mode) -> ProtocolParams:
    common = dict(e0=config.e0, e1=config.e1, prior=xi, mode=mode)
    if config.b is not None:
        return ProtocolParams.from_b(ab, delta, k, dt=dt, **common)
    return ProtocolParams.from_a(ab, delta, k, dt=dt, **common)


class _ExponentCache:
    """Per-sweep cache of final-overlap scaling fits; the fit is mode-blind."""

    def __init__(self, auto_dt: bool):
        self.auto_dt = auto_dt
        self._fits: dict[tuple, float | None] = {}

    def exponent(self, params: ProtocolParams) -> float | None:
        key = (params.b, params.k, params.prior, params.e0, params.e1,
               "auto" if self.auto_dt else params.dt)
        if key not in self._fits:
            self._fits[key] = self._fit(params)
        return self._fits[key]

    def _fit(self, params: ProtocolParams) -> float | None:
        if params.b * max(series.DEFAULT_DELTAS) >= 1.0:
            return None  # default grid would leave the valid amplitude range
        try:
            fit = series.fit_scaling("final_overlap", series.DEFAULT_DELTAS,
                                     params, auto_dt=self.auto_dt)
        except (ValidationError, DegenerateBranchError, DegenerateVectorError):
            return None
        return fit.exponent


def _evaluate_point(config: SweepConfig, cache: _ExponentCache, ab: float,
                    delta: float, dt: float | None, k: int, xi: float,
                    mode: Mode) -> ReportRow:
    base = dict(delta=delta, k=k, xi=xi, mode=mode.value)
    base["a" if config.a is not None else "b"] = ab
    try:
        params = _point_params(config, ab, delta, dt, k, xi, mode)
    except (ValidationError, DegenerateBranchError, DegenerateVectorError) as exc:
        return ReportRow(a=base.get("a", math.nan), b=base.get("b", math.nan),
                         delta=delta, dt=dt if dt is not None else math.nan,
                         k=k, xi=xi, mode=mode.value, error=str(exc))
    try:
        report = protocol.run(params)
    except (ValidationError, DegenerateBranchError, DegenerateVectorError) as exc:
        return ReportRow(a=params.a, b=params.b, delta=delta, dt=params.dt,
                         k=k, xi=xi, mode=mode.value, error=str(exc))
    return ReportRow(
        a=params.a, b=params.b, delta=delta, dt=params.dt, k=k, xi=xi,
        mode=mode.value,
        total_cost=report.total_cost,
        baseline_exact=report.baseline_exact,
        baseline_paper=report.baseline_paper,
        paper_new_cost=report.paper_new_cost,
        final_overlap=report.final_overlap,
        overlap_exponent=cache.exponent(params),
        verdict_vs_baseline_exact=report.verdict_vs_exact,
        verdict_vs_baseline_paper=report.verdict_vs_paper,
    )


def _row_sort_key(row: ReportRow):
    def clean(x):
        return math.inf if x is None or (isinstance(x, float) and math.isnan(x)) else x

    return (clean(row.delta), clean(row.dt), row.k, clean(row.xi),
            clean(row.a), clean(row.b), row.mode)


def run_sweep(config: SweepConfig) -> list[ReportRow]:
    """Evaluate the Cartesian product of the config grids.

    Per-point failures become rows with a populated error column; the sweep
    itself never aborts. Rows come back sorted by parameter tuple, so equal
    configs produce identical row lists.
    """
    ab_grid = config.a if config.a is not None else config.b
    dt_grid: tuple[float | None, ...] = config.dt if config.dt is not None else (None,)
    cache = _ExponentCache(config.auto_dt)
    rows = [
        _evaluate_point(config, cache, ab, delta, dt, k, xi, mode)
        for ab, delta, dt, k, xi, mode in product(
            sorted(ab_grid), sorted(config.delta),
            sorted(dt_grid, key=lambda v: -1.0 if v is None else v),
            sorted(config.k), sorted(config.xi), config.modes)
    ]
    rows.sort(key=_row_sort_key)
    return rows


def render_csv(rows: list[ReportRow], digits: int = DEFAULT_DIGITS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, col), digits) for col in CSV_COLUMNS])
    return buf.getvalue()


def _group_rows(rows: list[ReportRow]):
    groups: dict[tuple, dict[str, ReportRow]] = {}
    order = []
    for row in rows:
        key = (row.a, row.b, row.delta, row.dt, row.k, row.xi)
        if key not in groups:
            groups[key] = {}
            order.append(key)
        groups[key][row.mode] = row
    return [(key, groups[key]) for key in order]


def render_summary(rows: list[ReportRow], digits: int = DEFAULT_DIGITS) -> str:
    """Human-readable adjudication of every parameter set in the sweep."""
    fmt = lambda v: _fmt(v, digits) or "(not run)"
    lines = []
    push = lines.append
    push("adjudication summary")
    push("====================")
    groups = _group_rows(rows)
    push(f"rows evaluated : {len(rows)}")
    push(f"parameter sets : {len(groups)}")
    push("flagged series expressions (evaluated verbatim, never corrected):")
    for name in sorted(series.SUSPECT_FLAGS):
        push(f"  {name}: {series.SUSPECT_FLAGS[name]}")
    push("")
    for idx, (key, by_mode) in enumerate(groups, start=1):
        a, b, delta, dt, k, xi = key
        push(f"set {idx}: a={fmt(a)} b={fmt(b)} delta={fmt(delta)} "
             f"dt={fmt(dt)} k={k} xi={fmt(xi)}")
        errors = {m: r.error for m, r in by_mode.items() if r.error}
        if errors:
            for mode_name, msg in sorted(errors.items()):
                push(f"  error[{mode_name}]: {msg}")
            push("")
            continue
        exact = by_mode.get(Mode.EXACT.value)
        paper = by_mode.get(Mode.PAPER.value)
        any_row = exact or paper
        push(f"  total_cost[exact]       = {fmt(exact.total_cost if exact else None)}")
        push(f"  total_cost[paper]       = {fmt(paper.total_cost if paper else None)}")
        push(f"  baseline_exact          = {fmt(any_row.baseline_exact)}")
        push(f"  baseline_paper          = {fmt(any_row.baseline_paper)}")
        baseline_ratio = (any_row.baseline_exact / any_row.baseline_paper
                          if any_row.baseline_paper else math.nan)
        push(f"  baseline exact/paper    = {fmt(baseline_ratio)}")
        push(f"  paper_new_cost          = {fmt(any_row.paper_new_cost)}")
        push(f"  final_overlap           = {fmt(any_row.final_overlap)}")
        push(f"  overlap delta-exponent  = {fmt(any_row.overlap_exponent)}")
        if exact and exact.total_cost is not None:
            ok = exact.total_cost >= exact.baseline_exact - 1e-10
            push(f"  exact-ledger sanity (total >= baseline_exact): "
                 f"{'holds' if ok else 'VIOLATED'}  margin={fmt(exact.verdict_vs_baseline_exact)}")
        if paper and paper.total_cost is not None:
            ok = paper.total_cost < paper.baseline_paper
            ratio = (paper.total_cost / paper.baseline_paper
                     if paper.baseline_paper else math.nan)
            push(f"  paper-ledger claim (total < baseline_paper): "
                 f"{'holds' if ok else 'fails'}  ratio={fmt(ratio)}")
        push("")
    return "\n".join(lines) + "\n"


def emit_report(rows: list[ReportRow], out: str, digits: int = DEFAULT_DIGITS
                ) -> tuple[Path, Path]:
    """Write <out>.csv and <out>.txt; returns the two paths."""
    if not rows:
        raise ValidationError("no rows to report")
    csv_path = Path(out + ".csv")
    txt_path = Path(out + ".txt")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(render_csv(rows, digits), encoding="utf-8", newline="")
    txt_path.write_text(render_summary(rows, digits), encoding="utf-8", newline="")
    return csv_path, txt_path


def scaling_study(config: SweepConfig, quantity: str = "all") -> list[dict]:
    """One power-law fit per quantity per non-delta parameter tuple.

    The config delta grid is the fit grid and needs at least 3 points over a
    decade. With an ``a`` grid, b is derived at the largest delta and then
    held fixed across the fit. Indeterminate fits are flagged in their row,
    not raised.
    """
    if quantity == "all":
        quantities = sorted(series.SCALING_QUANTITIES)
    elif quantity in series.SCALING_QUANTITIES:
        quantities = [quantity]
    else:
        raise ValidationError(
            f"unknown scaling quantity '{quantity}'; options: all, "
            + ", ".join(sorted(series.SCALING_QUANTITIES)))
    deltas = tuple(sorted(config.delta, reverse=True))
    ab_grid = config.a if config.a is not None else config.b
    dt_grid: tuple[float | None, ...] = config.dt if config.dt is not None else (None,)
    out_rows = []
    for ab, dt, k, xi in product(sorted(ab_grid),
                                 sorted(dt_grid, key=lambda v: -1.0 if v is None else v),
                                 sorted(config.k), sorted(config.xi)):
        template = _point_params(config, ab, max(deltas), dt, k, xi, Mode.EXACT)
        for q in quantities:
            fit = series.fit_scaling(q, deltas, template, auto_dt=config.auto_dt)
            out_rows.append({
                "quantity": q, "b": template.b, "k": k, "xi": xi,
                "dt_rule": "auto" if config.auto_dt else template.dt,
                "exponent": fit.exponent, "intercept": fit.intercept,
                "n_floored": fit.n_floored, "indeterminate": fit.indeterminate,
                "flag": _QUANTITY_FLAGS.get(q, ""),
                "deltas": ";".join(_fmt(d, config.digits) for d in fit.sample_deltas),
                "residuals": ";".join(_fmt(r, config.digits) for r in fit.residuals),
            })
    return out_rows


def render_scaling_csv(rows: list[dict], digits: int = DEFAULT_DIGITS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCALING_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[col], digits) for col in SCALING_COLUMNS])
    return buf.getvalue()


def _golden_section(f, lo: float, hi: float, tol: float = 1e-10,
                    max_iter: int = 200) -> tuple[float, float]:
    """Deterministic golden-section minimize; returns the best point evaluated."""
    evaluations: list[tuple[float, float]] = [(f(lo), lo), (f(hi), hi)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    evaluations += [(f1, x1), (f2, x2)]
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
            evaluations.append((f1, x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
            evaluations.append((f2, x2))
    best_f, best_x = min(evaluations, key=lambda e: (e[0], e[1]))
    return best_x, best_f


def optimize(config: SweepConfig, mode: Mode) -> tuple[ProtocolParams, ReportRow]:
    """Minimize the selected ledger's total cost over the free parameters.

    k is searched over its config grid; dt is golden-section refined inside
    [min, max] of its grid when that grid has more than one point, evaluated
    per grid point otherwise, and bound to the cancellation condition under
    dt=auto. All remaining grids must be singletons. Ties break toward
    smaller k, then smaller dt.
    """
    ab_grid = config.a if config.a is not None else config.b
    for name, grid in (("a/b", ab_grid), ("delta", config.delta), ("xi", config.xi)):
        if len(grid) != 1:
            raise ValidationError(f"optimize requires a single value for {name}, got {len(grid)}")
    ab, delta, xi = ab_grid[0], config.delta[0], config.xi[0]

    def objective(k: int, dt: float | None) -> float:
        params = _point_params(config, ab, delta, dt, k, xi, mode)
        return protocol.run(params).total_cost

    best: tuple[float, int, float] | None = None
    for k in sorted(config.k):
        if config.auto_dt:
            dt_solved = _point_params(config, ab, delta, None, k, xi, mode).dt
            candidates = [(objective(k, None), k, dt_solved)]
        elif len(config.dt) == 1:
            candidates = [(objective(k, config.dt[0]), k, config.dt[0])]
        else:
            lo, hi = min(config.dt), max(config.dt)
            seeds = [(objective(k, dt), k, dt) for dt in sorted(config.dt)]
            dt_star, f_star = _golden_section(lambda dt: objective(k, dt), lo, hi)
            candidates = seeds + [(f_star, k, dt_star)]
        for cand in candidates:
            if best is None or (cand[0], cand[1], cand[2]) < best:
                best = cand
    assert best is not None
    _, k_best, dt_best = best
    params = _point_params(config, ab, delta, dt_best, k_best, xi, mode)
    cache = _ExponentCache(config.auto_dt)
    row = _evaluate_point(config, cache, ab, delta, dt_best, k_best, xi, mode)
    return params, row


def _baseline_lines(xi: float, b: float, delta: float, digits: int) -> list[str]:
    overlap = (b * delta) ** 2
    return [
        f"overlap |<psi0|psi1>|        = {_fmt(overlap, digits)}",
        f"transition prob (standard)   = {_fmt(overlap ** 2, digits)}",
        f"baseline_exact               = {_fmt(helstrom_cost(xi, overlap ** 2), digits)}",
        f"baseline_paper               = {_fmt(helstrom_cost(xi, overlap), digits)}",
        f"quadratic form b^2 delta^2/4 = {_fmt(0.25 * overlap, digits)}",
        f"guess_only_cost              = {_fmt(guess_only_cost(xi), digits)}",
    ]


def _render_run_report(report, digits: int) -> str:
    p = report.params
    lines = [
        f"mode={p.mode.value} a={_fmt(p.a, digits)} b={_fmt(p.b, digits)} "
        f"delta={_fmt(p.delta, digits)} dt={_fmt(p.dt, digits)} k={p.k} xi={_fmt(p.prior, digits)}",
        f"total_cost       = {_fmt(report.total_cost, digits)}",
        f"baseline_exact   = {_fmt(report.baseline_exact, digits)}",
        f"baseline_paper   = {_fmt(report.baseline_paper, digits)}",
        f"paper_new_cost   = {_fmt(report.paper_new_cost, digits)}",
        f"final_overlap    = {_fmt(report.final_overlap, digits)}",
        f"verdict_vs_exact = {_fmt(report.verdict_vs_exact, digits)}",
        f"verdict_vs_paper = {_fmt(report.verdict_vs_paper, digits)}",
        "leaves (kind, step, p|h0, p|h1, marginal, posterior, cost):",
    ]
    for leaf in report.leaves:
        step_txt = "-" if leaf.step is None else str(leaf.step)
        lines.append(
            f"  {leaf.kind:<8} {step_txt:>3} "
            f"{_fmt(leaf.p_given_h0, digits)} {_fmt(leaf.p_given_h1, digits)} "
            f"{_fmt(leaf.marginal, digits)} {_fmt(leaf.posterior, digits)} "
            f"{_fmt(leaf.leaf_cost, digits)}")
    return "\n".join(lines) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; keep 1 for validation
        raise ValidationError(message)


def _add_common(sub: argparse.ArgumentParser, point_flags: bool = False):
    sub.add_argument("--config", help="path to a key=value config file")
    sub.add_argument("--out", help="output path prefix (.csv/.txt appended)")
    sub.add_argument("--mode", choices=["exact", "paper", "both"],
                     help="cost ledger (overrides config)")
    sub.add_argument("--quiet", action="store_true", help="suppress stdout")
    if point_flags:
        for flag in ("--a", "--b", "--delta", "--xi", "--e0", "--e1"):
            sub.add_argument(flag, type=float)
        sub.add_argument("--dt", help="spacing, or 'auto'")
        sub.add_argument("--k", type=int)


def _config_from_args(args, need_dt_k: bool) -> SweepConfig:
    if args.config is not None:
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = parse_config(text)
    else:
        entries: dict[str, tuple[str, int]] = {}
        for key in ("a", "b", "delta", "xi", "e0", "e1"):
            val = getattr(args, key, None)
            if val is not None:
                entries[key] = (repr(float(val)), 0)
        if getattr(args, "dt", None) is not None:
            entries["dt"] = (args.dt, 0)
        if getattr(args, "k", None) is not None:
            entries["k"] = (str(args.k), 0)
        if need_dt_k and "k" not in entries:
            entries["k"] = ("1", 0)
        cfg = _build_config(entries)
    overrides = {}
    if getattr(args, "mode", None):
        overrides["modes"] = _parse_modes(args.mode)
    if args.out is not None:
        overrides["out"] = args.out
    return replace(cfg, **overrides) if overrides else cfg


def _require_singletons(cfg: SweepConfig, command: str) -> tuple[float, float, float]:
    ab_grid = cfg.a if cfg.a is not None else cfg.b
    for name, grid in (("a/b", ab_grid), ("delta", cfg.delta), ("xi", cfg.xi)):
        if len(grid) != 1:
            raise ValidationError(f"{command} requires a single value for {name}")
    return ab_grid[0], cfg.delta[0], cfg.xi[0]


def _cmd_baseline(args) -> int:
    cfg = _config_from_args(args, need_dt_k=False)
    ab, delta, xi = _require_singletons(cfg, "baseline")
    if cfg.a is not None:
        b = math.sqrt(max(1.0 - ab * ab, 0.0)) / delta if delta > 0 else 0.0
    else:
        b = ab
    lines = _baseline_lines(xi, b, delta, cfg.digits)
    text = "\n".join(lines) + "\n"
    if not args.quiet:
        sys.stdout.write(text)
    if cfg.out:
        Path(cfg.out + ".txt").write_text(text, encoding="utf-8", newline="")
    return 0


def _cmd_run(args) -> int:
    cfg = _config_from_args(args, need_dt_k=True)
    ab, delta, xi = _require_singletons(cfg, "run")
    if not cfg.auto_dt and len(cfg.dt) != 1:
        raise ValidationError("run requires a single dt (or auto)")
    if len(cfg.k) != 1:
        raise ValidationError("run requires a single k")
    chunks = []
    for mode in cfg.modes:
        params = _point_params(cfg, ab, delta, None if cfg.auto_dt else cfg.dt[0],
                               cfg.k[0], xi, mode)
        chunks.append(_render_run_report(protocol.run(params), cfg.digits))
    text = "\n".join(chunks)
    if not args.quiet:
        sys.stdout.write(text)
    if cfg.out:
        Path(cfg.out + ".txt").write_text(text, encoding="utf-8", newline="")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args, need_dt_k=True)
    rows = run_sweep(cfg)
    if cfg.out:
        emit_report(rows, cfg.out, cfg.digits)
    if not args.quiet:
        sys.stdout.write(render_csv(rows, cfg.digits))
        sys.stdout.write(render_summary(rows, cfg.digits))
    return 0


def _cmd_scaling(args) -> int:
    cfg = _config_from_args(args, need_dt_k=True)
    rows = scaling_study(cfg, args.quantity)
    text = render_scaling_csv(rows, cfg.digits)
    if cfg.out:
        path = Path(cfg.out + ".csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    if not args.quiet:
        sys.stdout.write(text)
    return 0


def _cmd_optimize(args) -> int:
    cfg = _config_from_args(args, need_dt_k=True)
    if len(cfg.modes) != 1:
        raise ValidationError("optimize requires a single mode (exact or paper)")
    params, row = optimize(cfg, cfg.modes[0])
    text = (f"optimum: k={params.k} dt={_fmt(params.dt, cfg.digits)} "
            f"total_cost={_fmt(row.total_cost, cfg.digits)}\n")
    if cfg.out:
        emit_report([row], cfg.out, cfg.digits)
    if not args.quiet:
        sys.stdout.write(text)
        sys.stdout.write(render_csv([row], cfg.digits))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zenodisc",
                     description="Exact laboratory for repeated-null-measurement state discrimination.")
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "baseline": (_cmd_baseline, True, "print both Helstrom baselines for a candidate pair"),
        "run": (_cmd_run, True, "evaluate one protocol configuration"),
        "sweep": (_cmd_sweep, False, "evaluate a parameter grid and emit CSV + summary"),
        "scaling": (_cmd_scaling, False, "fit delta-scaling exponents of series residuals"),
        "optimize": (_cmd_optimize, False, "search k and dt for the lowest total cost"),
    }
    for name, (handler, point_flags, help_text) in handlers.items():
        cmd = sub.add_parser(name, help=help_text)
        _add_common(cmd, point_flags=point_flags)
        if name == "scaling":
            cmd.add_argument("--quantity", default="all",
                             help="one of %s, or all" % ", ".join(sorted(series.SCALING_QUANTITIES)))
        cmd.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DegenerateBranchError, DegenerateVectorError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
