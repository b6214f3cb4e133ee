# ---- This is <mw_lab.py> ----

import multiwell_lab.MW_lab_cli as MW_cli
import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import argparse
import sys
from loguru import logger

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def add_common(p):

    p.add_argument(
        '--threads',
        type = int,
        default = None,
        help = f'number of worker threads (default=MW_LAB_THREADS={MW_conf.MW_LAB_THREADS})'
    )
    p.add_argument(
        '--loglevel',
        choices = ["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"],
        default = 'INFO',
        help = 'loglevel setting (default=INFO)',
    )

# -------------------------------------------------------------------------- #

def make_parser():

    p = argparse.ArgumentParser(
        prog = 'mw_lab',
        formatter_class = argparse.RawDescriptionHelpFormatter,
        description = 'Numerical lab for vector multiwell elliptic systems',
    )
    sub = p.add_subparsers(dest='command', required=True)

    solve = sub.add_parser(
        'solve',
        formatter_class = argparse.RawDescriptionHelpFormatter,
        description = MW_cli.cmd_solve.__doc__.split("\n")[0],
    )
    solve.add_argument(
        '--config',
        required = True,
        help = 'path to JSON experiment config'
    )
    solve.add_argument(
        '--out',
        default = None,
        help = 'run directory (default=config `out` or MW_LAB_OUT/<family_id>)'
    )
    solve.add_argument(
        '--overwrite',
        action = 'store_true',
        help = 'overwrite existing files'
    )
    add_common(solve)

    check = sub.add_parser(
        'check',
        formatter_class = argparse.RawDescriptionHelpFormatter,
        description = MW_cli.cmd_check.__doc__.split("\n")[0],
    )
    check.add_argument(
        '--out',
        required = True,
        dest = 'run_dir',
        help = 'run directory written by `solve`'
    )
    check.add_argument(
        '--suite',
        default = 'all',
        help = f'comma-separated suite tags from {MW_cli.SUITES} or all (default=all)'
    )
    check.add_argument(
        '--eta0',
        default = 'scan',
        help = 'scan, manifest or a numeric threshold for the concentration suite (default=scan)'
    )
    add_common(check)

    concentrate = sub.add_parser(
        'concentrate',
        formatter_class = argparse.RawDescriptionHelpFormatter,
        description = MW_cli.cmd_concentrate.__doc__.split("\n")[0],
    )
    concentrate.add_argument(
        '--out',
        required = True,
        dest = 'run_dir',
        help = 'run directory written by `solve`'
    )
    concentrate.add_argument(
        '--eta0',
        default = 'scan',
        help = 'scan, manifest or a numeric threshold (default=scan)'
    )
    concentrate.add_argument(
        '--overwrite',
        action = 'store_true',
        help = 'overwrite existing files'
    )
    add_common(concentrate)

    constants = sub.add_parser(
        'constants',
        formatter_class = argparse.RawDescriptionHelpFormatter,
        description = MW_cli.cmd_constants.__doc__.split("\n")[0],
    )
    constants.add_argument(
        '--out',
        required = True,
        dest = 'run_dir',
        help = 'run directory written by `solve`'
    )
    constants.add_argument(
        '--loglevel',
        choices = ["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"],
        default = 'INFO',
        help = 'loglevel setting (default=INFO)',
    )

    version = sub.add_parser(
        'version',
        description = MW_cli.cmd_version.__doc__.split("\n")[0],
    )
    version.add_argument(
        '--loglevel',
        choices = ["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"],
        default = 'INFO',
        help = 'loglevel setting (default=INFO)',
    )

    return p

# -------------------------------------------------------------------------- #

COMMANDS = {
    'solve': MW_cli.cmd_solve,
    'check': MW_cli.cmd_check,
    'concentrate': MW_cli.cmd_concentrate,
    'constants': MW_cli.cmd_constants,
    'version': MW_cli.cmd_version,
}

# -------------------------------------------------------------------------- #

def main(argv=None):
    """Parse arguments, run one command and return its exit code"""

    p = make_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as E:
        return MW_cli.EXIT_USAGE if E.code else MW_cli.EXIT_OK

    kwargs = vars(args)
    command = kwargs.pop('command')

    try:
        code = COMMANDS[command](**kwargs)
    except (MW_err.ConfigError, MW_err.MissingArtifacts, MW_err.InsufficientFamily) as E:
        logger.error(E)
        return MW_cli.EXIT_USAGE
    except (MW_err.BlowUp, MW_err.StagnationError) as E:
        logger.error(E)
        return MW_cli.EXIT_SOLVER
    except Exception as E:
        logger.critical(E)
        return MW_cli.EXIT_FAILED

    return MW_cli.EXIT_OK if code is None else code

# -------------------------------------------------------------------------- #

if __name__ == '__main__':

    sys.exit(main())

# -------------------------------------------------------------------------- #

# ---- End of <mw_lab.py> ----
