"""Brute-force path cost used as a reference for the library evaluator.

Written with plain loops over lists and ``math`` only. It deliberately
shares no code with ``tlbo_planner.cost``.
"""

import math


def brute_force_cost(start, waypoints, goal, obstacles, z_min, z_max, beta, violation_cost):
    """Return ``(j1, j2, j3, total, violated)``.

    ``obstacles`` is a list of ``(cx, cy, cz, safe_radius)`` tuples.
    """
    pts = [tuple(start)] + [tuple(w) for w in waypoints] + [tuple(goal)]
    n_seg = len(pts) - 1

    j1 = 0.0
    for l in range(n_seg):
        a, b = pts[l], pts[l + 1]
        j1 += math.sqrt((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2 + (b[2] - a[2]) ** 2)

    centers = []
    for l in range(n_seg):
        a, b = pts[l], pts[l + 1]
        centers.append(((a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2))

    j2 = 0.0
    if obstacles:
        acc = 0.0
        for c in centers:
            for (ox, oy, oz, r) in obstacles:
                d = math.sqrt((c[0] - ox) ** 2 + (c[1] - oy) ** 2 + (c[2] - oz) ** 2)
                acc += max(1 - d / r, 0)
        j2 = acc / (n_seg * len(obstacles))

    j3 = 0.0
    violated = False
    for c in centers:
        h = c[2]
        if h > z_max:
            j3 += h - z_max
        elif h >= z_min:
            pass
        elif h > 0:
            j3 += z_min - h
        else:
            violated = True
            j3 += violation_cost

    total = beta[0] * j1 + beta[1] * j2 + beta[2] * j3
    if violated:
        total += violation_cost
    return j1, j2, j3, total, violated
