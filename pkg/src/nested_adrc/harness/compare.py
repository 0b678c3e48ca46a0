"""Side-by-side comparison of the two ADRC variants with and without noise."""
from __future__ import annotations

from dataclasses import dataclass

from .runner import RunResult, run_scenario
from .scenario import Scenario

CONDITIONS = (("without noise", False), ("with noise", True))


def reduction(baseline: float, candidate: float) -> float:
    """Percentage reduction ``100 * (baseline - candidate) / baseline``."""
    if baseline == 0:
        return 0.0 if candidate == 0 else float("-inf")
    return 100.0 * (baseline - candidate) / baseline


@dataclass
class Comparison:
    baseline: str
    candidate: str
    runs: dict[tuple[str, str], RunResult]

    def cell(self, variant: str, condition: str, metric: str) -> float:
        return getattr(self.runs[(variant, condition)].metrics, metric)

    def reductions(self) -> dict[tuple[str, str], float]:
        return {
            (cond, metric): reduction(
                self.cell(self.baseline, cond, metric), self.cell(self.candidate, cond, metric)
            )
            for cond, _ in CONDITIONS
            for metric in ("itae", "isu")
        }

    def rows(self) -> list[list]:
        """Header plus one row per variant and a reduction row."""
        header = ["controller"] + [f"{m.upper()} {c}" for c, _ in CONDITIONS for m in ("itae", "isu")]
        out = [header]
        for variant in (self.baseline, self.candidate):
            out.append([_label(variant)] + [
                self.cell(variant, c, m) for c, _ in CONDITIONS for m in ("itae", "isu")
            ])
        red = self.reductions()
        out.append(["reduction(%)"] + [red[(c, m)] for c, _ in CONDITIONS for m in ("itae", "isu")])
        return out

    def format(self) -> str:
        rows = self.rows()
        lines = ["  ".join(f"{h:>18}" for h in rows[0])]
        for row in rows[1:]:
            lines.append(f"{row[0]:>18}  " + "  ".join(f"{v:18.6f}" for v in row[1:]))
        return "\n".join(lines)


def _label(kind: str) -> str:
    return {"conventional": "C-ADRC", "nested": "N-ADRC"}.get(kind, kind)


def compare_variants(base: Scenario, variants=("conventional", "nested"),
                     seed: int | None = None) -> Comparison:
    """Run both variants with noise off and on (one shared seed)."""
    baseline, candidate = variants
    runs = {}
    for cond, noisy in CONDITIONS:
        for kind in dict.fromkeys(variants):
            scen = base.with_variant(kind).with_noise(noisy, seed)
            runs[(kind, cond)] = run_scenario(scen)
    return Comparison(baseline, candidate, runs)
