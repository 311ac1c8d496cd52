"""Independent brute-force oracle used to freeze expected values in the C++ tests.

Enumerates every interval partition of the label set, minimizes each bin's
tilted loss by exhaustive means (closed-form mean for squared/Poisson, scan
over all labels for absolute), and divides by (d - 1 + e^eps).
"""
import itertools
import math


def sq(yh, y):
    return (yh - y) ** 2


def ab(yh, y):
    return abs(yh - y)


def poi(yh, y):
    return yh - y * math.log(yh)


def bin_cost(ys, ps, lo, hi, eps, loss):
    w = [p * (math.exp(eps) if lo <= j <= hi else 1.0) for j, p in enumerate(ps)]
    if loss is ab:
        cands = ys
    else:
        cands = [sum(a * b for a, b in zip(w, ys)) / sum(w)]
    best = min(cands, key=lambda c: sum(wi * loss(c, y) for wi, y in zip(w, ys)))
    return best, sum(wi * loss(best, y) for wi, y in zip(w, ys))


def brute(ys, ps, eps, loss):
    k = len(ys)
    best = None
    for d in range(1, k + 1):
        for cuts in itertools.combinations(range(1, k), d - 1):
            bounds = [0, *cuts, k]
            total, outs = 0.0, []
            for a, b in zip(bounds, bounds[1:]):
                o, v = bin_cost(ys, ps, a, b - 1, eps, loss)
                total += v
                outs.append(o)
            obj = total / (d - 1 + math.exp(eps))
            if best is None or obj < best[0]:
                best = (obj, bounds, outs)
    return best


if __name__ == "__main__":
    ys = [0.0, 1.0, 3.0, 7.0, 8.0]
    ps = [0.1, 0.3, 0.2, 0.25, 0.15]
    for name, loss in (("squared", sq), ("absolute", ab), ("poisson", poi)):
        for eps in (0.5, 1.0, 2.0):
            obj, bounds, outs = brute(ys, ps, eps, loss)
            print(f"{name} eps={eps}: objective={obj!r} bounds={bounds} outputs={outs}")
    print("uniform{0,1} ln7:", brute([0.0, 1.0], [0.5, 0.5], math.log(7), sq))
    print("uniform{0,1} 0:", brute([0.0, 1.0], [0.5, 0.5], 0.0, sq))
    # eps = 0 LP: single row shared by all labels -> best constant on the grid.
    grid = [0.0, 0.9, 2.0]
    pr = [0.2, 0.5, 0.3]
    print("lp eps0:", min(sum(p * sq(o, y) for p, y in zip(pr, [0.0, 1.0, 2.0])) for o in grid))
    print("split:", math.sqrt(401 / 1386176))
    print("poisson(2,2):", 2 - 2 * math.log(2))
    print("dlap pmf0 b=1:", (math.e - 1) / (math.e + 1))
