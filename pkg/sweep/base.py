"""
An abstract base class for sweep runners.
"""

from abc import ABC, abstractmethod


class SweepRunner(ABC):
    @abstractmethod
    def __init__(self, workers):
        """Initializes the runner.

        Args:
            workers (int): Largest number of evaluations in flight.
        """
        self._workers = workers
        self._opened = False

    @abstractmethod
    def open(self):
        """Acquires the resources needed for evaluation."""
        pass

    @abstractmethod
    def close(self):
        """Releases the resources acquired by open."""
        pass

    @abstractmethod
    def _evaluate(self, func, items):
        """Evaluates func on every item, returning results in any order as (index, result) pairs."""
        pass

    @property
    def workers(self):
        return self._workers

    def map(self, func, items):
        """Evaluates func on every item.

        Opens the runner for the duration of the call when it is not open yet.

        Args:
            func (callable): A pure function of one argument.
            items (iterable): Arguments.

        Returns:
            list: Results in input order.
        """
        items = list(items)
        owned = not self._opened
        if owned:
            self.open()
        try:
            pairs = self._evaluate(func, items)
        finally:
            if owned:
                self.close()
        results = [None] * len(items)
        for index, result in pairs:
            results[index] = result
        return results

    def __enter__(self):
        self.open()
        return self

    def __exit__(self, *exc):
        self.close()
        return False
