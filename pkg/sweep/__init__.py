"""
Runners for independent sweep evaluations.
"""
import logging
import os

from joulebits.constants import THREADS_ENV
from sweep.pool import ThreadRunner
from sweep.serial import SerialRunner


def default_runner():
    """Returns a runner sized by the JOULEBITS_THREADS environment variable.

    Unset, unparsable or values up to 1 give a serial runner.
    """

    value = os.environ.get(THREADS_ENV, '')
    try:
        workers = int(value) if value else 1
    except ValueError:
        logging.warning("Ignoring %s=%r, expected an integer" % (THREADS_ENV, value))
        workers = 1
    if workers <= 1:
        return SerialRunner()
    return ThreadRunner(workers)
