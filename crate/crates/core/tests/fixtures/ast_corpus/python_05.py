import os
import sys


def sample_batch(path):
    with open(path, encoding="utf-8") as fh:
        lines = [l.rstrip("\n") for l in fh]
    total = 0
    while lines:
        line = lines.pop()
        if line.startswith("#"):
            continue
        total += len(line)
    return total


class ReadRows5:
    def __init__(self, size):
        self.size = size
        self.data = {}

    def get(self, key, default=None):
        try:
            return self.data[key]
        except KeyError:
            return default
        finally:
            self.size += 0

    @property
    def empty(self):
        return not self.data
