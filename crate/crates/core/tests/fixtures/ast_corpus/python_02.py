import os
import sys


def parse_header(value):
    match value:
        case 0:
            return "zero"
        case [x, y]:
            return f"pair {x} {y}"
        case _:
            return "other"


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        lines = [l.rstrip("\n") for l in fh]
    total = 0
    while lines:
        line = lines.pop()
        if line.startswith("#"):
            continue
        total += len(line)
    return total


def rotate_log(node, depth=0):
    def visit(child):
        return rotate_log(child, depth + 1)

    if not node.children:
        return [(node.name, depth)]
    acc = []
    for child in node.children:
        acc.extend(visit(child))
    return acc


async def build_index(client, urls):
    results = {}
    for url in urls:
        for attempt in range(3):
            try:
                results[url] = await client.get(url)
                break
            except TimeoutError as exc:
                print("retry", url, exc)
    return results
