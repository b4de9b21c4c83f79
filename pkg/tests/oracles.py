"""Independent reference computations used to check the package.

Nothing here imports the code under test; each oracle takes a different
route to the same quantity (brute force, rasterization, elimination).
"""

from __future__ import annotations

import math

import numpy as np


def raster_union_area(boxes, resolution: int = 2000) -> float:
    """Union area by pixel-center sampling on a resolution x resolution grid."""
    grid = np.zeros((resolution, resolution), dtype=bool)
    for x, y, w, h in boxes:
        # pixel k covers [k/res, (k+1)/res); its center is inside iff lo <= (k+0.5)/res < hi
        c0 = int(math.ceil(x * resolution - 0.5))
        c1 = int(math.ceil((x + w) * resolution - 0.5))
        r0 = int(math.ceil(y * resolution - 0.5))
        r1 = int(math.ceil((y + h) * resolution - 0.5))
        grid[max(r0, 0):max(r1, 0), max(c0, 0):max(c1, 0)] = True
    return grid.sum() / resolution ** 2


def brute_pearson(x, y) -> float:
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def brute_ranks(x) -> list[float]:
    """O(n^2) average ranks: 1 + #smaller + (#equal - 1) / 2, via all pairs."""
    a = np.asarray(x, dtype=float)
    smaller = (a[None, :] < a[:, None]).sum(axis=1)
    equal = (a[None, :] == a[:, None]).sum(axis=1)
    return (1 + smaller + (equal - 1) / 2).tolist()


def brute_spearman(x, y) -> float:
    return brute_pearson(brute_ranks(x), brute_ranks(y))


def brute_rmse(y, y_hat) -> float:
    return math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(y, y_hat)) / len(y))


def normal_equations_fit(y, om, fr) -> tuple[float, float, float]:
    """Solve (X^T X) beta = X^T y by Gaussian elimination with partial pivoting."""
    cols = [[1.0] * len(y), list(om), list(fr)]
    A = [[math.fsum(ci[k] * cj[k] for k in range(len(y))) for cj in cols] for ci in cols]
    b = [math.fsum(ci[k] * y[k] for k in range(len(y))) for ci in cols]
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    n = 3
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        M[col], M[piv] = M[piv], M[col]
        for r in range(col + 1, n):
            f = M[r][col] / M[col][col]
            for c in range(col, n + 1):
                M[r][c] -= f * M[col][c]
    beta = [0.0] * n
    for r in reversed(range(n)):
        beta[r] = (M[r][n] - sum(M[r][c] * beta[c] for c in range(r + 1, n))) / M[r][r]
    return tuple(beta)


def histogram_mode(images, alpha_threshold, bright_white, dark_black):
    """Pixel-by-pixel filter and count; ties to the lowest packed value."""
    counts: dict[int, int] = {}
    for img in images:
        arr = np.asarray(img)
        h, w = arr.shape[:2]
        for i in range(h):
            for j in range(w):
                px = [int(c) for c in arr[i, j]]
                alpha = px[3] if len(px) == 4 else 255
                if alpha / 255 < alpha_threshold:
                    continue
                v = max(px[:3]) / 255
                if v > bright_white or v < dark_black:
                    continue
                key = px[0] * 65536 + px[1] * 256 + px[2]
                counts[key] = counts.get(key, 0) + 1
    if not counts:
        return None
    best = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
    return best // 65536, (best // 256) % 256, best % 256


def hue_degrees(r: int, g: int, b: int) -> float:
    """Textbook RGB -> hue in degrees."""
    mx, mn = max(r, g, b), min(r, g, b)
    d = mx - mn
    if d == 0:
        return 0.0
    if mx == r:
        h = 60 * (((g - b) / d) % 6)
    elif mx == g:
        h = 60 * ((b - r) / d + 2)
    else:
        h = 60 * ((r - g) / d + 4)
    return h % 360


def reference_color_move(h, s, v, sat_target, sat_floor, sat_cap, sat_blend,
                         target_v, v_cap, gamma, fallback_hue_deg, gray_threshold):
    """Color movement rules written out line by line."""
    if s <= gray_threshold:
        h = fallback_hue_deg
        if s < sat_floor:
            s = sat_floor
    if s < sat_target or s < sat_floor:
        s = (1 - sat_blend) * s + sat_blend * sat_target
    if s < sat_floor:
        s = sat_floor
    if s > sat_cap:
        s = sat_cap
    if v > target_v:
        d = v - target_v
        a = 1 - math.exp(-gamma * d)
        v = v - a * d
        if v_cap is not None and v > v_cap:
            v = v_cap
    v_floor = target_v - 0.02
    if v < v_floor:
        v = 0.7 * v + 0.3 * v_floor
    return h, s, v
