import sys
import gc
import tracemalloc
from tmo.experiment.cli import main as cli_main

def main():
    """
    Hauptfunktion zum Starten eines Experiments über die Kommandozeile.
    Mit --debug wird zusätzlich die Speichernutzung ausgegeben.
    """
    DEBUG_MODE = "--debug" in sys.argv[1:]
    if DEBUG_MODE:
        tracemalloc.start()

    code = 1
    try:
        code = cli_main(sys.argv[1:])
    except SystemExit as e:
        # argparse beendet mit 2 (Fehler) oder 0 (--help)
        code = e.code if isinstance(e.code, int) else 1
    finally:
        if DEBUG_MODE:
            current, peak = tracemalloc.get_traced_memory()
            print(f"Aktuelle Speichernutzung: {current / 10**6:.1f} MB", file=sys.stderr)
            print(f"Maximale Speichernutzung: {peak / 10**6:.1f} MB", file=sys.stderr)
            tracemalloc.stop()

        # Populationen und Bäume freigeben
        gc.collect()
        sys.exit(code)

if __name__ == "__main__":
    main()
