"""
Thread pool runner for sweeps over numpy-heavy evaluations.
"""
import concurrent.futures
import logging

from sweep.base import SweepRunner


class ThreadRunner(SweepRunner):

    def __init__(self, workers):
        if workers < 1:
            raise ValueError("A thread runner needs at least one worker")
        SweepRunner.__init__(self, workers)
        self._executor = None

    def open(self):
        if self._executor is None:
            logging.info("Starting sweep pool with %d workers" % self._workers)
            self._executor = concurrent.futures.ThreadPoolExecutor(max_workers=self._workers)
        self._opened = True

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None
        self._opened = False

    def _evaluate(self, func, items):
        futures = {self._executor.submit(func, item): index for index, item in enumerate(items)}
        pairs = []
        for future in concurrent.futures.as_completed(futures):
            pairs.append((futures[future], future.result()))
        return pairs
