"""Command line front end.

Three subcommands:

* ``analyze``: read an evaluation CSV (column ``z`` plus one 0/1 column
  per rule), compute estimates and confidence intervals for the chosen
  measures, print JSON or an aligned table.
* ``coverage``: run a coverage study described by a key=value config
  file (with flag overrides) and print the aggregated result.
* ``quantile``: simulate the equicoordinate max-|z| quantile for a
  correlation matrix given inline, as a CSV file, or as an identity
  dimension.

Exit codes: 0 on full success, 2 when some (but not all) targets failed
and their errors are reported inline, 1 on hard errors such as a
malformed table or an unknown measure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .dataset import make_targets, read_csv
from .errors import NoUsableTargetsError, PerfciError
from .intervals import IntervalReport, IntervalSpec, analyze
from .measures import resolve_measure
from .quantiles import DEFAULT_DRAWS, QuantileRequest, max_abs_quantile
from .simulation import (
    CoverageConfig,
    EmpiricalBootstrapProcess,
    FixedPredictionRule,
    GaussianMixtureProcess,
    OneNNRule,
    ThresholdRule,
    run_coverage,
)

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_HARD = 1
EXIT_PARTIAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perfci",
        description="Confidence intervals for performance measures of binary rules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="intervals for rules in an evaluation CSV")
    pa.add_argument("table", help="CSV with a 'z' column and one 0/1 column per rule")
    pa.add_argument(
        "--measures",
        default="accuracy,f1",
        help="comma-separated measure ids, e.g. accuracy,f_beta(0.5) (default: accuracy,f1)",
    )
    pa.add_argument("--alpha", type=float, default=0.05, help="miscoverage level (default 0.05)")
    pa.add_argument(
        "--choice",
        type=int,
        choices=(1, 2),
        default=2,
        help="variance estimate: 1 plug-in, 2 corrected (default 2)",
    )
    pa.add_argument(
        "--joint",
        default="per-rule",
        help="joint sets: 'all', 'per-rule' (default), 'none' for individual "
        "intervals, or explicit index groups like '0,1;2,3'",
    )
    pa.add_argument("--draws", type=int, default=DEFAULT_DRAWS, help="quantile simulation draws (default 200000)")
    pa.add_argument("--seed", type=int, default=0, help="quantile simulation seed (default 0)")
    pa.add_argument("--format", choices=("json", "table"), default="table", dest="fmt")
    pa.add_argument("--clamp", action="store_true", help="truncate unit-range intervals to [0, 1]")
    pa.add_argument("--output", default=None, help="write to this path instead of stdout")

    pc = sub.add_parser("coverage", help="coverage study from a config file")
    pc.add_argument("--config", default=None, help="key=value config file")
    pc.add_argument("--process", default=None, help="gaussian_mixture | bootstrap")
    pc.add_argument("--population", default=None, help="population CSV (bootstrap process)")
    pc.add_argument("--rules", default=None, help="comma list: threshold(0.3), one_nn(500), or column names")
    pc.add_argument("--measures", default=None, help="comma-separated measure ids")
    pc.add_argument("--n", type=int, default=None, help="test-set size per replication")
    pc.add_argument("--replications", type=int, default=None)
    pc.add_argument("--alpha", type=float, default=None)
    pc.add_argument("--choice", type=int, choices=(1, 2), default=None)
    pc.add_argument("--joint", default=None, help="all | per-rule | combinations (default per-rule)")
    pc.add_argument("--draws", type=int, default=None)
    pc.add_argument("--seed", type=int, default=None)
    pc.add_argument("--format", choices=("json", "table"), default="table", dest="fmt")
    pc.add_argument("--output", default=None)

    pq = sub.add_parser("quantile", help="simulate the equicoordinate max-|z| quantile")
    pq.add_argument("--alpha", type=float, default=0.05)
    group = pq.add_mutually_exclusive_group(required=True)
    group.add_argument("--dim", type=int, default=None, help="identity correlation of this dimension")
    group.add_argument(
        "--corr",
        default=None,
        help="correlation matrix: inline rows '1,.5;.5,1' or a headerless CSV path",
    )
    pq.add_argument("--draws", type=int, default=DEFAULT_DRAWS)
    pq.add_argument("--seed", type=int, default=0)
    pq.add_argument("--format", choices=("json", "table"), default="table", dest="fmt")
    pq.add_argument("--output", default=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _analyze_cmd(args)
        if args.command == "coverage":
            return _coverage_cmd(args)
        return _quantile_cmd(args)
    except (PerfciError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HARD


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _split_csv_list(raw: str) -> list[str]:
    return [tok.strip() for tok in raw.split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _analyze_cmd(args) -> int:
    data = read_csv(args.table)
    measure_ids = [resolve_measure(m).id for m in _split_csv_list(args.measures)]
    if not measure_ids:
        raise ValueError("--measures must name at least one measure")
    targets = make_targets(data.rule_ids, measure_ids)

    mode, sets = _parse_joint_option(args.joint, data.rule_ids, targets)
    reports: list[IntervalReport] = []
    for target_set in sets:
        spec = IntervalSpec(
            alpha=args.alpha,
            mode=mode,
            choice=args.choice,
            target_set=target_set,
            draws=args.draws,
            seed=args.seed,
            clamp=args.clamp,
        )
        try:
            reports.append(analyze(data, targets, spec))
        except NoUsableTargetsError as exc:
            reports.append(_failed_report(data.n, spec, targets, exc))

    if args.fmt == "json":
        payload = [_report_dict(r) for r in reports]
        text = _dump_json(payload[0] if len(payload) == 1 else payload)
    else:
        text = _report_table(reports, measure_ids)
    _emit(text, args.output)

    rows = [row for r in reports for row in r.rows]
    if all(row.ok for row in rows):
        return EXIT_OK
    if any(row.ok for row in rows):
        return EXIT_PARTIAL
    return EXIT_HARD


def _parse_joint_option(raw: str, rule_ids, targets):
    token = raw.strip()
    if token == "none":
        return "individual", [tuple(range(len(targets)))]
    if token == "all":
        return "joint", [tuple(range(len(targets)))]
    if token == "per-rule":
        sets = []
        for rid in rule_ids:
            sets.append(tuple(k for k, t in enumerate(targets) if t.rule_id == rid))
        return "joint", sets
    sets = []
    for group in token.split(";"):
        group = group.strip()
        if not group:
            continue
        try:
            idx = tuple(int(tok) for tok in group.split(","))
        except ValueError:
            raise ValueError(
                f"--joint must be 'all', 'per-rule', 'none' or index groups; got {raw!r}"
            ) from None
        if any(k < 0 or k >= len(targets) for k in idx):
            raise ValueError(f"--joint indices {idx} out of range for {len(targets)} targets")
        sets.append(idx)
    if not sets:
        raise ValueError(f"--joint produced no target sets from {raw!r}")
    return "joint", sets


def _failed_report(n, spec, targets, exc: NoUsableTargetsError) -> IntervalReport:
    from .intervals import TargetInterval

    indices = spec.target_set if spec.target_set is not None else range(len(targets))
    rows = []
    for i in indices:
        t = targets[i]
        rows.append(
            TargetInterval(
                rule_id=t.rule_id,
                measure_id=t.measure_id,
                error=exc.failures.get(t.label(), "failed"),
            )
        )
    return IntervalReport(
        n=n,
        alpha=spec.alpha,
        mode=spec.mode,
        choice=spec.choice,
        q=float("nan"),
        mc_stderr=float("nan"),
        seed=spec.seed,
        rows=tuple(rows),
    )


def _report_dict(report: IntervalReport) -> dict:
    targets = []
    for row in report.rows:
        entry: dict = {"rule": row.rule_id, "measure": row.measure_id}
        if row.ok:
            entry.update(
                estimate=row.estimate,
                lower=row.lower,
                upper=row.upper,
                half_width=row.half_width,
            )
        else:
            entry["error"] = row.error
        targets.append(entry)
    q = report.q
    mc = report.mc_stderr
    return {
        "meta": {
            "n": report.n,
            "alpha": report.alpha,
            "choice": report.choice,
            "mode": report.mode,
            "q": None if q != q else q,  # NaN -> null
            "mc_stderr": None if mc != mc else mc,
            "seed": report.seed,
        },
        "targets": targets,
    }


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _report_table(reports: Sequence[IntervalReport], measure_ids: Sequence[str]) -> str:
    first = reports[0]
    lines = [
        f"n={first.n}  alpha={first.alpha:g}  choice={first.choice}  mode={first.mode}"
    ]
    cells: dict[tuple[str, str], str] = {}
    q_of_rule: dict[str, float] = {}
    rule_order: list[str] = []
    for report in reports:
        for row in report.rows:
            if row.rule_id not in rule_order:
                rule_order.append(row.rule_id)
            q_of_rule.setdefault(row.rule_id, report.q)
            if row.ok:
                cells[(row.rule_id, row.measure_id)] = (
                    f"({row.lower:.4f}, {row.upper:.4f})"
                )
            else:
                kind = (row.error or "error").split(":")[0]
                cells[(row.rule_id, row.measure_id)] = f"error({kind})"
    single_q = len({round(q, 12) for q in q_of_rule.values() if q == q}) <= 1
    header = ["rule"] + (["q"] if not single_q else []) + list(measure_ids)
    if single_q and first.q == first.q:
        lines.append(f"q={first.q:.4f}  mc_stderr={first.mc_stderr:.4f}")
    table_rows = []
    for rid in rule_order:
        row = [rid]
        if not single_q:
            q = q_of_rule.get(rid, float("nan"))
            row.append(f"{q:.4f}" if q == q else "-")
        for mid in measure_ids:
            row.append(cells.get((rid, mid), "-"))
        table_rows.append(row)
    widths = [
        max(len(header[j]), *(len(r[j]) for r in table_rows)) if table_rows else len(header[j])
        for j in range(len(header))
    ]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in table_rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------

_COVERAGE_DEFAULTS = {
    "process": "gaussian_mixture",
    "replace": "true",
    "measures": "accuracy,f1",
    "replications": "2000",
    "alpha": "0.05",
    "choice": "1",
    "joint": "per-rule",
    "draws": "20000",
    "seed": "0",
    "true_mc_size": "1000000",
}


def _read_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line.strip()!r}")
            key, value = text.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _coverage_cmd(args) -> int:
    settings = dict(_COVERAGE_DEFAULTS)
    if args.config:
        settings.update(_read_config_file(args.config))
    for key in ("process", "population", "rules", "measures", "joint"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    for key in ("n", "replications", "alpha", "choice", "draws", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = str(value)

    if "n" not in settings:
        raise ValueError("coverage needs n (config key n= or flag --n)")
    if "rules" not in settings:
        raise ValueError("coverage needs rules (config key rules= or flag --rules)")

    process, rules = _build_process_and_rules(settings)
    config = CoverageConfig(
        process=process,
        rules=tuple(rules),
        measure_ids=tuple(
            resolve_measure(m).id for m in _split_csv_list(settings["measures"])
        ),
        n=int(settings["n"]),
        replications=int(settings["replications"]),
        alpha=float(settings["alpha"]),
        choice=int(settings["choice"]),
        joint_sets=settings["joint"],
        draws=int(settings["draws"]),
        seed=int(settings["seed"]),
        true_mc_size=int(settings["true_mc_size"]),
    )
    result = run_coverage(config)

    if args.fmt == "json":
        text = _dump_json(result.as_dict())
    else:
        text = _coverage_table(result)
    _emit(text, args.output)
    return EXIT_OK


def _build_process_and_rules(settings: dict[str, str]):
    kind = settings["process"].strip().lower()
    rule_tokens = _split_csv_list(settings["rules"])
    seed = int(settings["seed"])
    if kind in ("gaussian_mixture", "mixture"):
        process = GaussianMixtureProcess()
        rules = []
        for pos, token in enumerate(rule_tokens):
            if token.startswith("threshold(") and token.endswith(")"):
                rules.append(ThresholdRule(float(token[len("threshold(") : -1])))
            elif token.startswith("one_nn(") and token.endswith(")"):
                size = int(token[len("one_nn(") : -1])
                rule_id = "one_nn" if rule_tokens.count(token) == 1 else f"one_nn_{pos}"
                rules.append(
                    OneNNRule.train(
                        process, size, seed=seed + 0x51_000 + pos, rule_id=rule_id
                    )
                )
            else:
                raise ValueError(
                    f"rule {token!r} not valid for the mixture process; "
                    "use threshold(x) or one_nn(train_size)"
                )
        return process, rules
    if kind in ("empirical_bootstrap", "bootstrap"):
        if "population" not in settings:
            raise ValueError("bootstrap process needs population=<csv path>")
        population = read_csv(settings["population"])
        replace = settings["replace"].strip().lower() not in ("false", "0", "no")
        process = EmpiricalBootstrapProcess(population, with_replacement=replace)
        rules = [FixedPredictionRule(token) for token in rule_tokens]
        return process, rules
    raise ValueError(f"unknown process {settings['process']!r}")


def _coverage_table(result) -> str:
    lines = [
        f"n={result.n}  replications={result.replications}  alpha={result.alpha:g}  "
        f"choice={result.choice}  seed={result.seed}"
    ]
    header = ["target", "true", "indiv_cov", "avg_len", "errors"]
    rows = []
    for k, t in enumerate(result.targets):
        rows.append(
            [
                t.label(),
                f"{result.true_values[k]:.4f}",
                f"{result.individual_coverage[k]:.4f}",
                f"{result.avg_individual_length[k]:.4f}",
                str(int(result.target_error_counts[k])),
            ]
        )
    widths = [max(len(header[j]), *(len(r[j]) for r in rows)) for j in range(len(header))]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    lines.append(f"joint-of-individual: {result.joint_of_individual:.4f}")
    for js in result.joint_sets:
        lines.append(
            f"joint[{js.label}]: coverage={js.coverage:.4f}  avg_q={js.avg_q:.4f}  "
            f"error_rate={js.error_rate:.4f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# quantile
# ---------------------------------------------------------------------------


def _parse_corr_argument(raw: str) -> np.ndarray:
    import os

    if os.path.exists(raw):
        rows = []
        with open(raw) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([float(tok) for tok in line.split(",")])
        return np.asarray(rows, dtype=float)
    rows = []
    for group in raw.split(";"):
        group = group.strip()
        if group:
            rows.append([float(tok) for tok in group.split(",")])
    if not rows:
        raise ValueError(f"could not parse correlation matrix from {raw!r}")
    return np.asarray(rows, dtype=float)


def _quantile_cmd(args) -> int:
    if args.dim is not None:
        corr = np.eye(args.dim)
    else:
        corr = _parse_corr_argument(args.corr)
    request = QuantileRequest(
        alpha=args.alpha, corr=corr, draws=args.draws, seed=args.seed
    )
    result = max_abs_quantile(request)
    if args.fmt == "json":
        text = _dump_json(
            {
                "q": result.q,
                "mc_stderr": result.mc_stderr,
                "alpha": result.alpha,
                "dim": result.dim,
                "draws": result.draws,
                "seed": result.seed,
                "jitter": result.jitter,
            }
        )
    else:
        text = (
            f"q={result.q:.6f}  mc_stderr={result.mc_stderr:.6f}  "
            f"alpha={result.alpha:g}  dim={result.dim}  draws={result.draws}  "
            f"seed={result.seed}\n"
        )
    _emit(text, args.output)
    return EXIT_OK
