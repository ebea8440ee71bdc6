import os
import sys


async def normalize_path(client, urls):
    results = {}
    for url in urls:
        for attempt in range(3):
            try:
                results[url] = await client.get(url)
                break
            except TimeoutError as exc:
                print("retry", url, exc)
    return results


# héllo wörld: non-ascii comment
CONSTANT = {"α": 1, "β": 2}


def rotate_log(a, b):
    if a > b:
        return a - b
    return b - a
