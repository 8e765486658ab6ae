"""Small enumeration helpers shared by the exhaustive searches."""

from itertools import combinations


def set_partitions(items):
    """Yield every partition of ``items`` as a list of lists (restricted growth order)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        yield [[first]] + smaller
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1 :]


def partitions_into(items, k):
    """Yield partitions of ``items`` into exactly ``k`` nonempty blocks."""
    items = list(items)
    n = len(items)
    if k > n or k < 1:
        return

    def rec(i, blocks):
        remaining = n - i
        if len(blocks) + remaining < k:
            return
        if i == n:
            if len(blocks) == k:
                yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(items[i])
            yield from rec(i + 1, blocks)
            b.pop()
        if len(blocks) < k:
            blocks.append([items[i]])
            yield from rec(i + 1, blocks)
            blocks.pop()

    yield from rec(0, [])


def nonempty_subsets(items, min_size=1):
    items = list(items)
    for r in range(min_size, len(items) + 1):
        yield from combinations(items, r)


def bell_number(n):
    row = [1]
    for _ in range(n):
        new = [row[-1]]
        for x in row:
            new.append(new[-1] + x)
        row = new
    return row[0]
