"""Command line entry point: ``sinfreq run|plotdata|verify``."""
import argparse
import json
import sys

from .errors import ConfigurationError, FormatError, NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


def _cmd_run(args):
    from .runner import ScenarioConfig, run_to_dir

    cfg = ScenarioConfig.load(args.config)
    result, csv_path = run_to_dir(cfg, args.out)
    print(json.dumps(result.summary.to_dict(), indent=2))
    print(f"wrote {csv_path}", file=sys.stderr)
    return EXIT_OK


def _cmd_plotdata(args):
    from .runner import emit_plot_data

    for path in emit_plot_data(args.csv, args.out):
        print(path)
    return EXIT_OK


def _cmd_verify(args):
    from .verify import run_all

    results = run_all()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def build_parser():
    p = argparse.ArgumentParser(prog="sinfreq", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario and write CSV + summary")
    r.add_argument("--config", required=True, help="JSON scenario file; {} gives the reference scenario")
    r.add_argument("--out", help="output directory (overrides output_path)")
    r.set_defaults(func=_cmd_run)
    pd = sub.add_parser("plotdata", help="extract signal/beta/frequency plot series from a run CSV")
    pd.add_argument("--csv", required=True)
    pd.add_argument("--out", required=True)
    pd.set_defaults(func=_cmd_plotdata)
    v = sub.add_parser("verify", help="run the identity-check suite")
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
