"""
In-process runner evaluating items one after another.
"""
from sweep.base import SweepRunner


class SerialRunner(SweepRunner):

    def __init__(self, workers=1):
        SweepRunner.__init__(self, 1)
        self.evaluation_count = 0

    def open(self):
        self._opened = True

    def close(self):
        self._opened = False

    def _evaluate(self, func, items):
        pairs = []
        for index, item in enumerate(items):
            pairs.append((index, func(item)))
            self.evaluation_count += 1
        return pairs
