# coding: utf-8

"""
This module provides command-line access to tandemdelay.

Run this script using the -h option for command-line help.

Exit status: 0 on success, 2 for configuration errors, 3 for solver
errors and 4 when a simulation did not converge.

"""

import argparse
import logging
import sys

# We use absolute imports here to allow use of this script from its
# location in source control (e.g. for development purposes).
from tandemdelay.analyzer import Analyzer
from tandemdelay.common import ConfigurationError, SimulationError, SolverError
from tandemdelay.config import load_config
from tandemdelay.experiments import FORMATS, Mode
from tandemdelay.experiments import pmf_series, run, sweep, write_pmf, write_sweep
from tandemdelay.kernel import build_hat, build_tilde, dump_kernel_csv
from tandemdelay.presets import get_preset, preset_names


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_NOT_CONVERGED = 4

DESCRIPTION = """\
Compute the end-to-end delay of tasks offloaded through a transmission
queue and a computation queue, analytically and by simulation."""


def make_parser():
    """
    Return the ArgumentParser for the script.

    """
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument('--config', metavar='PATH', help="a scenario file (JSON or YAML)")
    source.add_argument('--preset', metavar='NAME', help="an embedded scenario: %s" %
                        ', '.join(preset_names()))
    common.add_argument('--method', choices=('mg', 'direct'),
                        help="the stationary solver (default: the scenario's)")
    common.add_argument('--out', metavar='DIR', default='.',
                        help="the output directory (default: %(default)s)")
    common.add_argument('--format', choices=FORMATS, default='both',
                        help="the result file format (default: %(default)s)")
    common.add_argument('--tail-eps', type=float, metavar='X',
                        help="stop the delay recursion when 1 - CPD(n) < X")
    common.add_argument('--n-max', type=int, metavar='N',
                        help="the largest delay bound the recursion evaluates")
    common.add_argument('--workers', type=int, metavar='N',
                        help="the number of worker processes")
    common.add_argument('--bounds', type=int, nargs='+', metavar='N',
                        help="the delay bounds of interest in slots")

    parser = argparse.ArgumentParser(prog='tandemdelay', description=DESCRIPTION)
    parser.add_argument('-v', '--verbose', action='store_true', help="log debug messages")
    parser.add_argument('--list-presets', action='store_true',
                        help="print the embedded preset names and exit")
    commands = parser.add_subparsers(dest='command', metavar='{run,sweep,pmf}')

    run_parser = commands.add_parser('run', parents=[common],
                                     help="analyze and/or simulate one scenario")
    run_parser.add_argument('--mode', choices=Mode.values(), default=Mode.analytic,
                            help="what to compute (default: %(default)s)")
    run_parser.add_argument('--seed', type=int, metavar='N', help="the simulation master seed")
    run_parser.add_argument('--dump-kernel', metavar='DIR',
                            help="also write the kernel blocks as CSV to DIR")

    commands.add_parser('sweep', parents=[common],
                        help="evaluate the scenario over its transmission-rate grid")

    pmf_parser = commands.add_parser('pmf', parents=[common], help="compute delay pmf curves")
    pmf_parser.add_argument('--mu1', type=float, nargs='+', metavar='RATE',
                            help="the transmission rates (default: the scenario's)")
    return parser


def _configure_logging(verbose):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format='%(name)s: %(levelname)s: %(message)s', stream=sys.stderr)


def _load(args):
    if args.config is not None:
        config = load_config(args.config)
    elif args.preset is not None:
        config = get_preset(args.preset)
    else:
        raise ConfigurationError("give --config PATH or --preset NAME")

    config = config.with_solver(args.method, args.tail_eps, args.n_max)
    if args.bounds:
        config = config.with_bounds(args.bounds)
    if getattr(args, 'seed', None) is not None:
        config = config.with_simulation(seed=args.seed)
    return config


def _print_report(report, stream):
    c = report.characteristics
    if c is not None:
        stream.write("%s: d_ave=%.6g slots, d_sd=%.6g, p_off=%.6g, p2_full=%.6g\n" %
                     (report.config.name, c.d_ave, c.d_sd, c.p_off, c.p2_full))
        for n in report.config.bounds:
            stream.write("  W_%d = %.4f\n" % (n, c.violation_at(n)))
    e = report.estimates
    if e is not None:
        stream.write("%s: simulated %d slots in %d segments, converged=%s\n" %
                     (report.config.name, e.slots, e.segments, e.converged))
        for n in e.bounds:
            w = e.violation(n)
            stream.write("  W_%d ~ %.4f [%.4f, %.4f]\n" % (n, w.point, w.low, w.high))
    for path in report.paths:
        stream.write("wrote %s\n" % path)


def _execute(args, stream):
    config = _load(args)

    if args.command == 'run':
        analyzer = Analyzer()
        if args.dump_kernel:
            kernel = analyzer.build_kernel(config)
            for view in (kernel, build_hat(kernel), build_tilde(kernel)):
                dump_kernel_csv(view, args.dump_kernel)
        report = run(config, mode=args.mode, out=args.out, formats=args.format,
                     workers=args.workers, analyzer=analyzer)
        _print_report(report, stream)
        return EXIT_OK if report.converged else EXIT_NOT_CONVERGED

    if args.command == 'sweep':
        rows = sweep(config, workers=args.workers)
        stream.write("wrote %s\n" % write_sweep(rows, args.out, config.name))
        return EXIT_OK

    rows, summaries = pmf_series(config, mu1=args.mu1, workers=args.workers)
    for summary in summaries:
        stream.write("%(variant)s mu1=%(mu1)g: mode=%(mode)d, tail after mode=%(tail_after_mode).4g, "
                     "tail bound=%(tail_bound)s, single peak=%(unimodal)s\n" % summary)
    for path in write_pmf(rows, summaries, args.out, config.name):
        stream.write("wrote %s\n" % path)
    return EXIT_OK


def main(sys_argv=sys.argv, stdout=None, stderr=None):
    """
    Run the command line and return the exit status.

    """
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr

    parser = make_parser()
    args = parser.parse_args(sys_argv[1:])
    _configure_logging(args.verbose)

    if args.list_presets:
        for name in preset_names():
            stdout.write("%s\n" % name)
        return EXIT_OK
    if args.command is None:
        parser.print_usage(stderr)
        return EXIT_CONFIG

    try:
        return _execute(args, stdout)
    except ConfigurationError as err:
        stderr.write("tandemdelay: configuration error: %s\n" % err)
        return EXIT_CONFIG
    except SolverError as err:
        stderr.write("tandemdelay: solver error: %s\n" % err)
        return EXIT_SOLVER
    except SimulationError as err:
        stderr.write("tandemdelay: simulation error: %s\n" % err)
        return EXIT_NOT_CONVERGED


if __name__ == '__main__':
    sys.exit(main())
