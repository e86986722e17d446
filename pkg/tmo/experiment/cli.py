"""
Kommandozeile für Experimente. Einstellungen werden in der Reihenfolge
Standardwerte -> Einstellungsdatei (--config oder settings.json) -> Optionen aufgelöst.
"""
import argparse
import json
import logging
import sys
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional
from tmo.constants import *
from tmo.errors import ConfigError, TmoError
from tmo.experiment.report import emit_report
from tmo.experiment.runner import ExperimentSpec, run_comparison
from tmo.utils import parse_float_list, parse_int_list

logger = logging.getLogger(__name__)


def load_settings(path: Optional[str]) -> Dict[str, Any]:
    """
    Standard-Einstellungen, überschrieben durch eine JSON-Datei. Ohne Pfad wird
    SETTINGS_FILE im Arbeitsverzeichnis gelesen, sofern vorhanden.
    """
    settings = DEFAULT_SETTINGS.copy()
    if path is None:
        if not Path(SETTINGS_FILE).is_file():
            return settings
        path = SETTINGS_FILE
        logger.debug("Lade Einstellungen aus %s", path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            loaded = json.load(handle)
    except (OSError, ValueError) as e:
        raise ConfigError(f"Einstellungsdatei {path} nicht lesbar: {e}") from e
    if not isinstance(loaded, dict):
        raise ConfigError(f"Einstellungsdatei {path} muss ein JSON-Objekt enthalten")

    unknown = sorted(set(loaded) - set(DEFAULT_SETTINGS) - {"dataset", "out"})
    if unknown:
        raise ConfigError(f"Unbekannte Einstellungen: {', '.join(unknown)}")
    # Listen dürfen auch als JSON-Arrays angegeben werden
    for key in ("algo", "depth", "seeds", "split"):
        if isinstance(loaded.get(key), list):
            loaded[key] = ",".join(str(item) for item in loaded[key])
    settings.update(loaded)
    return settings


def build_parser(settings: Dict[str, Any]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmo",
        description="Lernt Klassifikationsbäume mit CART, TAO oder TMO und vergleicht sie.")
    parser.add_argument("--config", help=f"JSON-Einstellungsdatei (Standard: {SETTINGS_FILE}, falls vorhanden)")
    parser.add_argument("--dataset", required="dataset" not in settings,
                        default=settings.get("dataset"), help="Pfad zu einer LIBSVM-Datei")
    parser.add_argument("--algo", default=settings["algo"],
                        help="Algorithmus oder Liste: cart, tao, tmo (z.B. 'cart,tao,tmo' oder 'all')")
    parser.add_argument("--depth", default=str(settings["depth"]),
                        help=f"Maximale Tiefe oder Liste (z.B. '2,3,4'), Bereich {MIN_DEPTH}..{MAX_DEPTH}")
    parser.add_argument("--seeds", default=str(settings["seeds"]), help="Seeds, z.B. '0,1,2,3,4'")
    parser.add_argument("--split", default=str(settings["split"]),
                        help="Anteile Training,Validierung,Test")
    parser.add_argument("--cr", type=float, default=settings["cr"], help="Crossover-Rate CR")
    parser.add_argument("--pop-size", type=int, default=settings["pop_size"], help="Populationsgröße k")
    parser.add_argument("--generations", type=int, default=settings["generations"],
                        help="Anzahl der Generationen")
    parser.add_argument("--time-limit", type=float, default=settings["time_limit"],
                        help="Zeitlimit pro TMO-Lauf in Sekunden")
    parser.add_argument("--tao-passes", type=int, default=settings["tao_passes"],
                        help="Maximale Anzahl der TAO-Durchläufe")
    parser.add_argument("--jobs", type=int, default=settings["jobs"], help="Parallele Seeds")
    parser.add_argument("--format", choices=REPORT_FORMATS, default=settings["format"],
                        help="Ausgabeformat")
    parser.add_argument("--timings", action="store_true", default=settings["timings"],
                        help="Laufzeiten in die maschinenlesbaren Zeilen aufnehmen")
    parser.add_argument("--out", default=settings.get("out"),
                        help="Ausgabedatei (Standard: Standardausgabe)")
    parser.add_argument("--debug", action="store_true", help="Ausführliche Ausgabe mit Tracebacks")
    return parser


def parse_algorithms(text: str) -> List[str]:
    if text.strip() == "all":
        return list(ALGORITHMS)
    algorithms = [part.strip() for part in text.split(",") if part.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if not algorithms or unknown:
        raise ConfigError(f"Ungültige Algorithmen '{text}', erlaubt: {', '.join(ALGORITHMS)} oder all")
    return algorithms


def spec_from_args(args: argparse.Namespace, algorithm: str, depth: int) -> ExperimentSpec:
    try:
        seeds = parse_int_list(args.seeds)
        fractions = tuple(parse_float_list(args.split))
    except ValueError as e:
        raise ConfigError(f"Ungültige Liste: {e}") from e
    return ExperimentSpec(dataset_path=args.dataset, algorithm=algorithm, max_depth=depth, seeds=seeds,
                          split_fractions=fractions, population_size=args.pop_size,
                          cross_rate=args.cr, generations=args.generations,
                          time_limit_seconds=args.time_limit, tao_max_passes=args.tao_passes,
                          n_jobs=args.jobs)


def configure_logging(debug: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if debug else logging.INFO,
                        format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    """Einstiegspunkt; gibt den Exit-Code zurück (0 Erfolg, 1 Fehler)."""
    argv = list(sys.argv[1:] if argv is None else argv)

    # Zuerst nur --config lesen, damit die Datei die Standardwerte der Optionen setzt
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    pre.add_argument("--debug", action="store_true")
    known, _ = pre.parse_known_args(argv)
    configure_logging(known.debug)

    try:
        settings = load_settings(known.config)
        args = build_parser(settings).parse_args(argv)
        algorithms = parse_algorithms(args.algo)
        try:
            depths = parse_int_list(args.depth)
        except ValueError as e:
            raise ConfigError(f"Ungültige Tiefe '{args.depth}'") from e
        if not depths:
            raise ConfigError("Mindestens eine Tiefe erforderlich")

        spec = spec_from_args(args, algorithms[0], depths[0])
        reports = run_comparison(spec, algorithms, depths)
        text = emit_report(reports, args.format, include_timings=args.timings)

        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
            logger.info("Bericht geschrieben: %s", args.out)
            if args.format != "records":
                sys.stdout.write(emit_report(reports, "table", include_timings=args.timings))
        else:
            sys.stdout.write(text)
        return 0
    except TmoError as e:
        logger.error("%s", e)
        if known.debug:
            traceback.print_exc()
        return 1
    except Exception as e:
        logger.error("Unerwarteter Fehler: %s", e)
        if known.debug:
            traceback.print_exc()
        return 1
