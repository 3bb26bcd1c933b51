"""
Wall-clock timer for pipeline stages
"""
import time


class Timer:
    def __init__(self):
        self.start_time = None
        self.elapsed = 0.0

    def start(self):
        """Start the timer"""
        self.start_time = time.perf_counter()
        return self

    def stop(self):
        """Stop the timer and return elapsed time in seconds"""
        if self.start_time is None:
            raise RuntimeError("Timer was not started")

        self.elapsed = time.perf_counter() - self.start_time
        self.start_time = None
        return self.elapsed

    def __enter__(self):
        return self.start()

    def __exit__(self, exc_type, exc, tb):
        self.stop()
        return False
