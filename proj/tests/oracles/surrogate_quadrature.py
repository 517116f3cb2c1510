#!/usr/bin/env python3
"""Brute-force oracle for small surrogate instances.

Outcomes are placed at each particle's predicted value (one quadrature node
per particle, weighted by the particle weight). Prints the IBR table and the
expected post-measurement IBR cost of every candidate.
"""
import math


def g(h, r, o, c1=1.0, c2=1.0, c3=0.5, c4=0.1):
    return (h - c1 * o) ** 2 + c2 * (r - c3) ** 2 + c4 * o


def table(dopants, concs):
    return [[sum(w * g(h, r, o) for (h, r), w in d) for o in concs] for d in dopants]


def value(dopants, concs, tau, i, j):
    total = 0.0
    for (hk, rk), wk in dopants[i]:
        y = g(hk, rk, concs[j])
        logs = [math.log(w) - 0.5 * ((y - g(h, r, concs[j])) / tau) ** 2 for (h, r), w in dopants[i]]
        top = max(logs)
        post = [math.exp(v - top) for v in logs]
        z = sum(post)
        post = [v / z for v in post]
        moved = [list(d) for d in dopants]
        moved[i] = [(p, w) for (p, _), w in zip(dopants[i], post)]
        best = min(min(row) for row in table(moved, concs))
        total += wk * best
    return total


def report(name, dopants, concs, tau):
    print(name)
    t = table(dopants, concs)
    for i, row in enumerate(t):
        print("  cost", i, " ".join(repr(v) for v in row))
    print("  ibr", min(min(row) for row in t))
    for i in range(len(dopants)):
        for j in range(len(concs)):
            print("  value", i, j, repr(value(dopants, concs, tau, i, j)))


report("two_by_one", [[((1.0, 0.5), 0.6), ((2.0, 1.0), 0.4)],
                      [((1.2, 0.0), 0.5), ((0.8, 0.9), 0.5)]], [1.0], 0.01)
report("three_by_two", [[((0.0, 0.0), 0.1), ((1.0, 0.5), 0.2), ((2.0, 1.0), 0.3), ((0.5, 0.2), 0.4)],
                        [((1.5, 0.5), 0.25), ((0.2, 0.8), 0.25), ((1.0, 1.5), 0.25), ((3.0, 0.0), 0.25)],
                        [((0.7, 0.6), 0.4), ((1.1, 0.4), 0.3), ((2.5, 0.5), 0.2), ((0.0, 1.0), 0.1)]],
       [0.5, 1.5], 0.3)
