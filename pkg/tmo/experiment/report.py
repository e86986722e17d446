"""
Ausgabe von Experimentberichten: maschinenlesbare JSON-Zeilen und eine
Vergleichstabelle (Mittelwert ± Standardabweichung pro Algorithmus).
"""
import json
from typing import Any, Dict, List, Sequence, Union
from tmo.constants import REPORT_FORMATS, STD_KIND
from tmo.errors import ReportError
from tmo.experiment.runner import RunReport, SeedResult
from tmo.utils import format_percent

Reports = Union[RunReport, Sequence[RunReport]]


def _as_list(reports: Reports) -> List[RunReport]:
    if isinstance(reports, RunReport):
        return [reports]
    return list(reports)


def _dumps(record: Dict[str, Any]) -> str:
    # Feste Schlüsselreihenfolge, damit gleiche Läufe byte-identische Zeilen ergeben
    return json.dumps(record, sort_keys=True)


def emit_records(reports: Reports, include_timings: bool = False) -> str:
    """Drei Satzarten pro Bericht: 'run', eine 'seed'-Zeile pro Seed und 'summary'."""
    lines = []
    for report in _as_list(reports):
        lines.append(_dumps({
            "kind": "run",
            "dataset": report.dataset,
            "algorithm": report.algorithm,
            "max_depth": report.max_depth,
            "n": report.n,
            "p": report.p,
            "config": report.config,
            "std": STD_KIND,
        }))
        for result in report.results:
            record = {
                "kind": "seed",
                "algorithm": report.algorithm,
                "max_depth": report.max_depth,
                "seed": result.seed,
                "train": result.train_accuracy,
                "val": result.val_accuracy,
                "test": result.test_accuracy,
            }
            if include_timings and result.seconds is not None:
                record["seconds"] = result.seconds
            lines.append(_dumps(record))
        lines.append(_dumps({
            "kind": "summary",
            "algorithm": report.algorithm,
            "max_depth": report.max_depth,
            "mean_test": report.mean_test,
            "std_test": report.std_test,
        }))
    return "\n".join(lines) + "\n"


def emit_table(reports: Reports, include_timings: bool = False) -> str:
    """
    Menschenlesbare Tabelle, eine Zeile pro (Algorithmus, Tiefe), Werte in Prozent.
    Die Spalte "Sekunden" erscheint nur mit `include_timings`.
    """
    reports = _as_list(reports)
    header = f"{'Algorithmus':<12}{'Tiefe':>6}  {'Train':>16}  {'Test':>16}"
    if include_timings:
        header += f"  {'Sekunden':>9}"
    lines = []
    current_dataset = None
    for report in reports:
        if report.dataset != current_dataset:
            if current_dataset is not None:
                lines.append("")
            current_dataset = report.dataset
            lines.append(f"Datensatz: {report.dataset} ({report.n} x {report.p}), "
                         f"Seeds: {','.join(str(s) for s in report.seeds)}")
            lines.append(header)
            lines.append("-" * len(header))
        train = f"{format_percent(report.mean_train)} ± {format_percent(report.std_train)}"
        test = f"{format_percent(report.mean_test)} ± {format_percent(report.std_test)}"
        line = f"{report.algorithm:<12}{report.max_depth:>6}  {train:>16}  {test:>16}"
        if include_timings:
            seconds = report.mean_seconds
            seconds_text = f"{seconds:.1f}" if seconds is not None else "-"
            line += f"  {seconds_text:>9}"
        lines.append(line)
    lines.append(f"(Standardabweichung: {STD_KIND})")
    return "\n".join(lines) + "\n"


def emit_report(reports: Reports, fmt: str = "records", include_timings: bool = False) -> str:
    """Rendert Berichte als 'records', 'table' oder 'both' (Zeilen, dann Tabelle)."""
    if fmt not in REPORT_FORMATS:
        raise ReportError(f"Unbekanntes Format '{fmt}', erlaubt: {', '.join(REPORT_FORMATS)}")
    if fmt == "records":
        return emit_records(reports, include_timings)
    if fmt == "table":
        return emit_table(reports, include_timings)
    return emit_records(reports, include_timings) + "\n" + emit_table(reports, include_timings)


def parse_report(text: str) -> List[RunReport]:
    """Liest das 'records'-Format zurück in RunReport-Objekte."""
    reports: List[RunReport] = []
    header = None
    results: List[SeedResult] = []

    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            kind = record["kind"]
        except (ValueError, KeyError, TypeError) as e:
            raise ReportError(f"Zeile {line_number} ist kein Berichtssatz: {e}") from e

        if kind == "run":
            if header is not None:
                raise ReportError(f"Zeile {line_number}: 'run' ohne vorheriges 'summary'")
            header = record
            results = []
        elif kind == "seed":
            if header is None:
                raise ReportError(f"Zeile {line_number}: 'seed' ohne 'run'")
            results.append(SeedResult(record["seed"], record["train"], record["val"],
                                      record["test"], record.get("seconds")))
        elif kind == "summary":
            if header is None:
                raise ReportError(f"Zeile {line_number}: 'summary' ohne 'run'")
            report = RunReport(dataset=header["dataset"], algorithm=header["algorithm"],
                               max_depth=header["max_depth"], n=header["n"], p=header["p"],
                               results=results, config=header["config"])
            if abs(report.mean_test - record["mean_test"]) > 1e-12 or \
                    abs(report.std_test - record["std_test"]) > 1e-12:
                raise ReportError(f"Zeile {line_number}: Zusammenfassung passt nicht zu den Seeds")
            reports.append(report)
            header = None
        else:
            raise ReportError(f"Zeile {line_number}: unbekannte Satzart '{kind}'")

    if header is not None:
        raise ReportError("Bericht endet ohne 'summary'")
    return reports
