"""Command line entry point: ``nested-adrc run|compare|verify-bounds|demo``."""
from __future__ import annotations

import argparse
import csv
import sys
from importlib import resources
from pathlib import Path

from ..analysis.verification import lemma2_check, verify_theorem1
from ..ode import IntegrationError
from .compare import compare_variants
from .export import export_comparison_csv, export_csv, export_svg
from .runner import SimulationFailed, run_scenario
from .scenario import ScenarioError, load_scenario

DEFAULT_SCENARIO = "benchmark.scn"


def default_scenario_text() -> str:
    return resources.files("nested_adrc").joinpath(DEFAULT_SCENARIO).read_text(encoding="utf-8")


def _formats(choice: str) -> tuple[str, ...]:
    return ("csv", "svg") if choice == "both" else (choice,)


def _load(args):
    scen = load_scenario(args.scenario)
    if args.seed is not None:
        scen = scen.with_noise(scen.noise.enabled, args.seed)
    return scen


def cmd_run(args) -> int:
    scen = _load(args)
    result = run_scenario(scen)
    out = Path(args.out_dir)
    stem = f"{scen.name}_{scen.variant.kind}"
    if "csv" in _formats(args.format):
        export_csv(result, out / f"{stem}.csv")
    if "svg" in _formats(args.format):
        export_svg(result, out / f"{stem}.svg")
    m = result.metrics
    print(f"{result.label}: ITAE={m.itae:.6f} ISU={m.isu:.6f}")
    for name, value in result.error_metrics.items():
        print(f"  ITAE({name}) = {value:.6f}")
    return 0


def cmd_compare(args) -> int:
    scen = _load(args)
    comp = compare_variants(scen, seed=args.seed)
    out = Path(args.out_dir)
    if "csv" in _formats(args.format):
        export_comparison_csv(comp, out / f"{scen.name}_comparison.csv")
    if "svg" in _formats(args.format):
        export_svg(comp, out / f"{scen.name}_comparison.svg")
    print(comp.format())
    return 0


def cmd_verify(args) -> int:
    scen = _load(args)
    report = verify_theorem1(scen, args.omega0)
    rows = report.table()
    out = Path(args.out_dir)
    with open(out / f"{scen.name}_bounds.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: f"{v:.9g}" for k, v in row.items()})
    for row in rows:
        mark = "ok" if row["empirical"] <= row["bound"] else "VIOLATED"
        print(f"omega0={row['omega0']:g} i={row['i']} empirical={row['empirical']:.3e} "
              f"bound={row['bound']:.3e} {mark}")
    for i, slope in report.slopes.items():
        print(f"slope e{i}: {slope:.3f}")
    lemma = lemma2_check(run_scenario(scen.with_variant("conventional").with_noise(False)).trace)
    print(f"derivative inequality holds at {100 * lemma.fraction:.2f}% of steady samples")
    return 0 if report.holds else 1


def cmd_demo(args) -> int:
    text = default_scenario_text()
    if args.out_dir is None:
        sys.stdout.write(text)
    else:
        path = Path(args.out_dir) / DEFAULT_SCENARIO
        path.write_text(text, encoding="utf-8")
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nested-adrc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help="scenario file (flat dotted keys)")
        p.add_argument("--out-dir", default=".", help="directory for CSV/SVG output")
        p.add_argument("--seed", type=int, default=None, help="override noise.seed")
        p.add_argument("--format", choices=("csv", "svg", "both"), default="csv")

    common(sub.add_parser("run", help="simulate one scenario"))
    common(sub.add_parser("compare", help="C-ADRC vs N-ADRC, with and without noise"))
    p = sub.add_parser("verify-bounds", help="check observer error bounds over an omega0 sweep")
    common(p)
    p.add_argument("--omega0", type=float, nargs="+", default=[5.0, 10.0, 20.0, 40.0])
    p = sub.add_parser("demo", help="print (or write) the default benchmark scenario")
    p.add_argument("--out-dir", default=None)
    return parser


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "verify-bounds": cmd_verify, "demo": cmd_demo}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "out_dir", None) is not None:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SimulationFailed, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
