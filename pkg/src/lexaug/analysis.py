"""Score-effect analysis: OLS of per-language score deltas on lexicon entry
counts, and grouped delta tables over resourcedness classes."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import InsufficientDataError, SingularMatrixError
from .metrics import Resourcedness

PREDICTOR_NAMES = ("n_panlex", "n_gatitos", "n_mono_sentences")


@dataclass(frozen=True)
class LangRow:
    """Per-language regression inputs."""

    lang: str
    delta_chrf: float
    n_panlex: int
    n_gatitos: int
    n_mono_sentences: int
    resourcedness: Resourcedness

    def __post_init__(self):
        for name in ("n_panlex", "n_gatitos", "n_mono_sentences"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class OlsFit:
    beta: tuple[float, ...]
    intercept: float
    r_squared: float
    residual_se: float


def ols_fit(X, y) -> OlsFit:
    """Ordinary least squares with an intercept, via an orthogonal
    decomposition (np.linalg.lstsq).

    Needs strictly more rows than fitted parameters. A rank-deficient design
    raises SingularMatrixError naming the first linearly dependent predictor
    column (0-based).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
    m, p = X.shape
    if y.shape != (m,):
        raise ValueError(f"y must have shape ({m},), got {y.shape}")
    if m <= p + 1:
        raise InsufficientDataError(f"need more than {p + 1} rows to fit {p} predictors, got {m}")
    design = np.column_stack([np.ones(m), X])
    rank = np.linalg.matrix_rank(design)
    if rank < p + 1:
        for column in range(p):
            without = np.delete(design, column + 1, axis=1)
            if np.linalg.matrix_rank(without) == rank:
                raise SingularMatrixError(
                    f"design matrix is rank deficient: predictor column {column} is "
                    "linearly dependent on the others",
                    column=column,
                )
        raise SingularMatrixError("design matrix is rank deficient", column=None)
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    residuals = y - fitted
    ssr = float(residuals @ residuals)
    sst = float(((y - y.mean()) ** 2).sum())
    if sst > 0.0:
        r_squared = 1.0 - ssr / sst
    else:
        # Constant outcome: the intercept-only fit is exact.
        r_squared = 1.0 if ssr <= 1e-12 else 0.0
    residual_se = math.sqrt(ssr / (m - p - 1))
    return OlsFit(
        beta=tuple(float(b) for b in coef[1:]),
        intercept=float(coef[0]),
        r_squared=r_squared,
        residual_se=residual_se,
    )


@dataclass(frozen=True)
class RegressionReport:
    coefficients: Mapping[str, float]
    intercept: float
    r_squared: float
    residual_se: float
    n_rows: int

    def to_json_obj(self) -> dict:
        return {
            "coefficients": dict(self.coefficients),
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "residual_se": self.residual_se,
            "n_rows": self.n_rows,
        }


def regress_delta_chrf(rows: Iterable[LangRow], min_rows: int = 5) -> RegressionReport:
    """Fit score delta on (panlex, gatitos, monolingual) counts.

    Only unsupervised (URL) languages enter the fit, which removes parallel
    data volume as a confound.
    """
    url_rows = [r for r in rows if r.resourcedness is Resourcedness.URL]
    if len(url_rows) < min_rows:
        raise InsufficientDataError(
            f"need at least {min_rows} URL rows, got {len(url_rows)}"
        )
    X = [[r.n_panlex, r.n_gatitos, r.n_mono_sentences] for r in url_rows]
    y = [r.delta_chrf for r in url_rows]
    try:
        fit = ols_fit(X, y)
    except SingularMatrixError as exc:
        if exc.column is not None:
            raise SingularMatrixError(
                f"predictor {PREDICTOR_NAMES[exc.column]!r} is linearly dependent "
                "on the other predictors",
                column=PREDICTOR_NAMES[exc.column],
            ) from exc
        raise
    return RegressionReport(
        coefficients=dict(zip(PREDICTOR_NAMES, fit.beta)),
        intercept=fit.intercept,
        r_squared=fit.r_squared,
        residual_se=fit.residual_se,
        n_rows=len(url_rows),
    )


@dataclass(frozen=True)
class DeltaTable:
    """Per-language deltas with unweighted class means."""

    deltas: Mapping[str, float]
    per_class: Mapping[Resourcedness, float]
    class_counts: Mapping[Resourcedness, int]
    overall: float

    def to_json_obj(self) -> dict:
        return {
            "per_class": {cls.value: mean for cls, mean in self.per_class.items()},
            "class_counts": {cls.value: n for cls, n in self.class_counts.items()},
            "overall": self.overall,
            "deltas": dict(self.deltas),
        }

    def format_table(self) -> str:
        lines = [f"{'class':<8}{'langs':>7}{'mean delta':>12}"]
        for cls, mean in self.per_class.items():
            lines.append(f"{cls.value:<8}{self.class_counts[cls]:>7}{mean:>12.2f}")
        lines.append(f"{'all':<8}{len(self.deltas):>7}{self.overall:>12.2f}")
        return "\n".join(lines)


def delta_table(
    baseline: Mapping[str, float],
    candidate: Mapping[str, float],
    classes: Mapping[str, Resourcedness],
) -> DeltaTable:
    """Candidate minus baseline per language, grouped by resourcedness.

    The three mappings must cover the same languages; mismatches raise with
    the symmetric difference listed.
    """
    base_langs = set(baseline)
    cand_langs = set(candidate)
    if base_langs != cand_langs:
        diff = sorted(base_langs ^ cand_langs)
        raise ValueError(f"baseline and candidate language sets differ: {diff}")
    missing_classes = sorted(base_langs - set(classes))
    if missing_classes:
        raise ValueError(f"languages without a resourcedness class: {missing_classes}")
    deltas = {lang: candidate[lang] - baseline[lang] for lang in sorted(base_langs)}
    grouped: dict[Resourcedness, list[float]] = {}
    for lang, delta in deltas.items():
        grouped.setdefault(classes[lang], []).append(delta)
    ordered = sorted(grouped.items(), key=lambda item: item[0].value)
    per_class = {cls: sum(values) / len(values) for cls, values in ordered}
    class_counts = {cls: len(values) for cls, values in ordered}
    overall = sum(deltas.values()) / len(deltas)
    return DeltaTable(deltas=deltas, per_class=per_class, class_counts=class_counts, overall=overall)


def load_lang_rows(path: str) -> list[LangRow]:
    """Read the regression table CSV: lang,delta_chrf,n_panlex,n_gatitos,
    n_mono,class."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        required = {"lang", "delta_chrf", "n_panlex", "n_gatitos", "n_mono", "class"}
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing CSV columns: {sorted(missing)}")
        for record in reader:
            rows.append(
                LangRow(
                    lang=record["lang"],
                    delta_chrf=float(record["delta_chrf"]),
                    n_panlex=int(record["n_panlex"]),
                    n_gatitos=int(record["n_gatitos"]),
                    n_mono_sentences=int(record["n_mono"]),
                    resourcedness=Resourcedness(record["class"].strip().upper()),
                )
            )
    return rows
