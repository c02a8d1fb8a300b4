"""Estimate reports: fitted constants with verdicts, serializable to CSV/JSON."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


def classify_ratios(ratios, tol: float = 0.05, growth_factor: float = 1.5) -> str:
    """Classify a ratio sequence along a refinement axis.

    ``growing`` means every step increases beyond the tolerance and the total
    growth exceeds ``growth_factor``; anything else counts as ``bounded``.
    """
    r = np.asarray(ratios, dtype=float)
    if r.size < 2:
        return "bounded"
    steps_increase = np.all(r[1:] > r[:-1] * (1.0 + tol))
    if steps_increase and r[-1] > growth_factor * r[0]:
        return "growing"
    return "bounded"


@dataclass
class EstimateReport:
    """Samples of an inequality lhs <= C * rhs with the fitted constant.

    ``samples`` is a list of dicts, each with at least ``lhs``, ``rhs`` and
    ``ratio`` keys plus free coordinate keys (radius, center, scenario id...).
    ``fitted_constant`` is the maximal finite ratio, so the inequality holds
    with it by construction; ``verdict`` says whether ratios stay bounded
    along the declared refinement axis.
    """

    name: str
    samples: list = field(default_factory=list)
    fitted_constant: float = 0.0
    verdict: str = "bounded"
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, name: str, samples: list, axis_key: str | None = None,
                     metadata: dict | None = None) -> "EstimateReport":
        if not samples:
            raise ParameterError("an estimate report needs at least one sample")
        ratios = [s["ratio"] for s in samples if np.isfinite(s["ratio"])]
        fitted = float(max(ratios)) if ratios else 0.0
        verdict = "bounded"
        if axis_key is not None:
            ordered = sorted((s for s in samples if np.isfinite(s["ratio"])),
                             key=lambda s: -s[axis_key])
            verdict = classify_ratios([s["ratio"] for s in ordered])
        return cls(name=name, samples=list(samples), fitted_constant=fitted,
                   verdict=verdict, metadata=dict(metadata or {}))

    def to_summary(self) -> dict:
        return {
            "name": self.name,
            "fitted_constant": self.fitted_constant,
            "verdict": self.verdict,
            "n_samples": len(self.samples),
            "metadata": self.metadata,
        }

    def to_csv(self, path) -> None:
        keys: list[str] = []
        for s in self.samples:
            for k in s:
                if k not in keys:
                    keys.append(k)
        lines = [",".join(keys)]
        for s in self.samples:
            cells = []
            for k in keys:
                v = s.get(k, "")
                cells.append(f"{v:.12e}" if isinstance(v, (int, float, np.floating)) else str(v))
            lines.append(",".join(cells))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
