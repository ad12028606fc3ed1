"""Precision-versus-threshold reporting over manually labeled candidates.

Labels arrive as a CSV (one row per reviewed candidate) so they can be
produced in a spreadsheet.  Each row must resolve to exactly one stored
candidate; the resolved candidate contributes its replacement count, which
is what the threshold sweep bins on.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Optional, Union

from .detector import CandidateReplacement
from .errors import SchemaError, UnresolvedLabel

TRUE_POSITIVE = "TP"
FALSE_POSITIVE = "FP"

LABEL_COLUMNS = ("repo", "sha", "method_signature", "api", "label")


@dataclass(frozen=True)
class LabeledCandidate:
    repo_id: str
    sha: str
    method_signature: str
    api_simple_name: str
    label: str  # TRUE_POSITIVE or FALSE_POSITIVE
    replacement_count: int
    annotator_ids: tuple[str, ...] = ()
    conflict_resolved: bool = False

    @property
    def is_true_positive(self) -> bool:
        return self.label == TRUE_POSITIVE


@dataclass(frozen=True)
class PrecisionRow:
    threshold: int
    instances: int
    true_positives: int

    @property
    def precision_pct(self) -> Optional[Decimal]:
        """Percentage to one decimal, round-half-up; None when empty."""
        if self.instances == 0:
            return None
        exact = Decimal(self.true_positives * 100) / Decimal(self.instances)
        return exact.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def import_labels(
    path: Union[str, Path], candidates: list[CandidateReplacement]
) -> list[LabeledCandidate]:
    """Parse a label CSV and resolve every row against stored candidates.

    Raises SchemaError for a malformed file and UnresolvedLabel for a row
    that matches zero or several candidates.
    """
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return []
    header = tuple(name.strip() for name in reader.fieldnames)
    missing = [c for c in LABEL_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"label file is missing columns: {', '.join(missing)}")

    labeled: list[LabeledCandidate] = []
    for row in reader:
        if all(not (v or "").strip() for v in row.values()):
            continue  # blank line
        label = (row["label"] or "").strip().upper()
        if label not in (TRUE_POSITIVE, FALSE_POSITIVE):
            raise SchemaError(f"label must be TP or FP, got {row['label']!r}")
        matches = [
            c
            for c in candidates
            if c.repo_id == (row["repo"] or "").strip()
            and c.sha == (row["sha"] or "").strip()
            and c.custom_method.signature_text == (row["method_signature"] or "").strip()
            and c.api_simple_name == (row["api"] or "").strip()
        ]
        if len(matches) != 1:
            raise UnresolvedLabel(dict(row))
        cand = matches[0]
        annotators = tuple(
            a.strip() for a in (row.get("annotators") or "").split(";") if a.strip()
        )
        labeled.append(
            LabeledCandidate(
                repo_id=cand.repo_id,
                sha=cand.sha,
                method_signature=cand.custom_method.signature_text,
                api_simple_name=cand.api_simple_name,
                label=label,
                replacement_count=cand.replacement_count,
                annotator_ids=annotators,
                conflict_resolved=(row.get("conflict_resolved") or "").strip().lower()
                == "true",
            )
        )
    return labeled


def precision_report(
    labeled: list[LabeledCandidate], thresholds: list[int]
) -> list[PrecisionRow]:
    """One row per threshold: how many labeled candidates clear it, and of
    those how many a reviewer called genuine."""
    rows = []
    for t in thresholds:
        hits = [lc for lc in labeled if lc.replacement_count >= t]
        rows.append(
            PrecisionRow(
                threshold=t,
                instances=len(hits),
                true_positives=sum(1 for lc in hits if lc.is_true_positive),
            )
        )
    return rows


def _fmt_precision(row: PrecisionRow) -> str:
    pct = row.precision_pct
    return "-" if pct is None else str(pct)


def render_table(rows: list[PrecisionRow]) -> str:
    headers = ("t", "instances", "true_positives", "precision_pct")
    cells = [
        (f">= {r.threshold}", str(r.instances), str(r.true_positives), _fmt_precision(r))
        for r in rows
    ]
    widths = [
        max(len(headers[i]), *(len(c[i]) for c in cells)) if cells else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for c in cells:
        lines.append("  ".join(c[i].ljust(widths[i]) for i in range(len(c))).rstrip())
    return "\n".join(lines) + "\n"


def render_csv(rows: list[PrecisionRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["threshold", "instances", "true_positives", "precision_pct"])
    for r in rows:
        writer.writerow([r.threshold, r.instances, r.true_positives, _fmt_precision(r)])
    return out.getvalue()
