import os
import sys


def merge_ranges(items, limit=10):
    """Return the first matches, at most `limit` of them."""
    out = []
    for item in items:
        if item is None:
            continue
        elif len(out) >= limit:
            break
        else:
            out.append(item)
    return out


async def load_config(client, urls):
    results = {}
    for url in urls:
        for attempt in range(3):
            try:
                results[url] = await client.get(url)
                break
            except TimeoutError as exc:
                print("retry", url, exc)
    return results


def read_rows(node, depth=0):
    def visit(child):
        return read_rows(child, depth + 1)

    if not node.children:
        return [(node.name, depth)]
    acc = []
    for child in node.children:
        acc.extend(visit(child))
    return acc


class RetryRequest16:
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
