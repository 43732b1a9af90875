"""Forecast evaluation: Pearson correlation and all-season correlation skill.

The skill groups samples by target calendar month, computes the Pearson
correlation inside each group, and averages over the months. Months with
fewer than two samples or zero variance are excluded from the mean and
flagged rather than failing the evaluation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesError, LengthMismatchError

MONTH_ABBREV = (
    "jan", "feb", "mar", "apr", "may", "jun",
    "jul", "aug", "sep", "oct", "nov", "dec",
)


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient, clipped into [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise LengthMismatchError("pearson expects two 1-d series")
    if x.shape != y.shape:
        raise LengthMismatchError(f"series lengths differ: {x.size} vs {y.size}")
    if x.size < 2:
        raise DegenerateSeriesError("need at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sx2 = (dx * dx).sum()
    sy2 = (dy * dy).sum()
    if sx2 == 0.0 or sy2 == 0.0:
        raise DegenerateSeriesError("zero variance series")
    # single sqrt of the product keeps pearson(x, x) exactly 1.0; rounding
    # can still push |r| a hair past 1 for general inputs, so clip
    return float(np.clip((dx * dy).sum() / np.sqrt(sx2 * sy2), -1.0, 1.0))


@dataclass
class SkillReport:
    """Per-month correlations and their mean; NaN marks an excluded month."""

    per_month_r: np.ndarray   # 12 floats, NaN where undefined
    all_season_skill: float
    mse: float
    n_per_month: np.ndarray   # 12 ints, counts every sample
    lead_h: int = 0

    @property
    def months_excluded(self) -> list[int]:
        """1-based months that did not contribute to the mean."""
        return [m + 1 for m in range(12) if math.isnan(self.per_month_r[m])]

    @property
    def incomplete(self) -> bool:
        return bool(self.months_excluded)


def all_season_skill(preds, targets, target_months, lead_h: int = 0) -> SkillReport:
    """Mean Pearson correlation over target calendar months.

    ``target_months`` holds 1..12 per sample. MSE covers all samples;
    n_per_month counts all samples so the partition always sums to the total.
    """
    preds = np.asarray(preds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    months = np.asarray(target_months, dtype=np.int64)
    if not (preds.shape == targets.shape == months.shape) or preds.ndim != 1:
        raise LengthMismatchError(
            f"aligned 1-d series required, got {preds.shape}/{targets.shape}/{months.shape}"
        )
    if preds.size == 0:
        raise DegenerateSeriesError("nothing to evaluate")
    if months.min() < 1 or months.max() > 12:
        raise ValueError("target months must lie in 1..12")

    per_month = np.full(12, np.nan)
    counts = np.zeros(12, dtype=np.int64)
    for m in range(1, 13):
        mask = months == m
        counts[m - 1] = int(mask.sum())
        if counts[m - 1] < 2:
            continue
        try:
            per_month[m - 1] = pearson(preds[mask], targets[mask])
        except DegenerateSeriesError:
            pass  # excluded, stays NaN
    defined = per_month[~np.isnan(per_month)]
    if defined.size == 0:
        raise DegenerateSeriesError("no month has enough samples with variance")
    skill = float(defined.mean())
    mse = float(np.mean((preds - targets) ** 2))
    return SkillReport(per_month, skill, mse, counts, lead_h)


def skill_report_json(report: SkillReport) -> str:
    """JSON document; excluded months appear as null correlations."""
    obj = {
        "lead_h": report.lead_h,
        "all_season_skill": report.all_season_skill,
        "mse": report.mse,
        "per_month_r": [
            None if math.isnan(r) else r for r in report.per_month_r.tolist()
        ],
        "n_per_month": report.n_per_month.tolist(),
        "months_excluded": report.months_excluded,
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def skill_report_csv(report: SkillReport) -> str:
    """Header plus one data line: lead_h,skill,mse,r_jan..r_dec (nan if excluded)."""
    header = "lead_h,skill,mse," + ",".join(f"r_{m}" for m in MONTH_ABBREV)
    cells = [str(report.lead_h), f"{report.all_season_skill:.6f}", f"{report.mse:.6f}"]
    cells += [
        "nan" if math.isnan(r) else f"{r:.6f}" for r in report.per_month_r.tolist()
    ]
    return header + "\n" + ",".join(cells) + "\n"
