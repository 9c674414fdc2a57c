"""Independent numpy evaluation of the benchmark objectives and their grid optima.

Values printed here are frozen into tests/test_testbed.cpp.
"""
import itertools
import math

import numpy as np


def branin(x1, x2):
    a = 15 * x1 - 5
    b = 15 * x2
    return -1 / 51.95 * ((b - 5.1 * a**2 / (4 * math.pi**2) + 5 * a / math.pi - 6) ** 2
                         + (10 - 10 / (8 * math.pi)) * np.cos(a) - 44.81)


P_RONK = [np.array([0, 0.1, 0.2, 0.5, 1]), np.array([0, 0.5, 0.8, 0.9, 1]), np.array([0, 0.6, 0.7, 0.9, 1])]


def ronkkonen(x):
    tot = 0.0
    for i, xi in enumerate(x):
        w = sum(math.comb(4, j) * P_RONK[i][j] * (1 - xi) ** (4 - j) * xi**j for j in range(5))
        tot += np.cos(4 * np.pi * w) + 0.8 * np.cos(8 * np.pi * w)
    return -0.25 * tot


ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
A = np.array([[10, 3, 17, 3.5], [0.05, 10, 17, 0.1], [3, 3.5, 1.7, 10], [17, 8, 0.05, 10]])
P = 1e-4 * np.array([[1312, 1696, 5569, 124], [2329, 4135, 8307, 3736],
                     [2348, 1451, 3522, 2883], [4047, 8828, 8732, 5743]])


def hartmann4(x):
    x = np.asarray(x)
    inner = np.exp(-np.sum(A * (x[None, :] - P) ** 2, axis=1))
    return -(1 / 0.839) * (1.1 - np.sum(ALPHA * inner))


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return -10 * len(x) - np.sum((x - 0.5) - 10 * np.cos(2 * np.pi * (x - 0.5)))


def grid(step, d):
    n = int(round(1 / step)) + 1
    g = np.arange(n) * step
    return list(itertools.product(g, repeat=d))


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    print("branin(0.96,0.16) = %.17g" % branin(0.96, 0.16))
    print("branin(0,0) = %.17g" % branin(0.0, 0.0))
    g = grid(0.04, 2)
    vals = np.array([branin(*p) for p in g])
    print("branin grid max %.17g at %s" % (vals.max(), g[int(vals.argmax())]))

    vals = np.array([ronkkonen(p) for p in g])
    m = vals.max()
    arg = [g[i] for i in np.where(np.abs(vals - m) < 1e-12)[0]]
    print("ronk2 grid max %.17g count %d at %s" % (m, len(arg), arg))
    print("ronk2(0,0) = %.17g" % ronkkonen((0.0, 0.0)))
    g3 = grid(0.04, 3)
    vals = np.array([ronkkonen(p) for p in g3])
    m = vals.max()
    arg = [g3[i] for i in np.where(np.abs(vals - m) < 1e-12)[0]]
    print("ronk3 grid max %.17g count %d at %s" % (m, len(arg), arg))

    g4 = grid(0.05, 4)
    vals = np.array([hartmann4(p) for p in g4])
    i = int(vals.argmax())
    print("hart4 grid max %.17g at index %d point %s" % (vals[i], i, g4[i]))
    print("hart4(0.5^4) = %.17g" % hartmann4([0.5] * 4))
    print("rastrigin d=1 x=1: %.17g" % rastrigin([1.0]))
    print("rastrigin d=8 center: %.17g" % rastrigin([0.5] * 8))
    g02 = grid(0.2, 2)
    print("rastrigin 0.2 grid max %.17g" % max(rastrigin(p) for p in g02))
