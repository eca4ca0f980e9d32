"""Slow, obviously-correct reference computations used only by the tests.

Nothing here imports from ``vadwindow``.
"""

import math


def rms_dbfs_bruteforce(samples):
    acc = 0
    for v in samples:
        acc += int(v) * int(v)
    if acc == 0:
        return -100.0
    return max(-100.0, 20.0 * math.log10(math.sqrt(acc / len(samples)) / 32768.0))


def mcc_direct(tp, fp, tn, fn):
    """MCC via the product-of-rates form sqrt(PPV*TPR*TNR*NPV) - sqrt(FDR*FNR*FPR*FOR)."""
    if min(tp + fp, tp + fn, tn + fp, tn + fn) == 0:
        return 0.0
    ppv = tp / (tp + fp)
    tpr = tp / (tp + fn)
    tnr = tn / (tn + fp)
    npv = tn / (tn + fn)
    fdr = fp / (tp + fp)
    fnr = fn / (tp + fn)
    fpr = fp / (tn + fp)
    for_ = fn / (tn + fn)
    return math.sqrt(ppv * tpr * tnr * npv) - math.sqrt(fdr * fnr * fpr * for_)


def counts_at(scores, labels, t):
    tp = fp = tn = fn = 0
    for s, y in zip(scores, labels):
        pred = s >= t
        if pred and y:
            tp += 1
        elif pred:
            fp += 1
        elif y:
            fn += 1
        else:
            tn += 1
    return tp, fp, tn, fn


def roc_auc_enumerate(scores, labels):
    """Trapezoidal area over the operating points at every distinct score (+inf first)."""
    P = sum(1 for y in labels if y)
    N = len(labels) - P
    pts = [(0.0, 0.0)]
    for t in sorted(set(scores), reverse=True):
        tp, fp, _, _ = counts_at(scores, labels, t)
        pts.append((fp / N, tp / P))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def roc_auc_pairs(scores, labels):
    """Mann-Whitney form: P(score_pos > score_neg) + 0.5 P(tie)."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def ap_enumerate(scores, labels):
    P = sum(1 for y in labels if y)
    prev_r = 0.0
    ap = 0.0
    for t in sorted(set(scores), reverse=True):
        tp, fp, _, _ = counts_at(scores, labels, t)
        r = tp / P
        ap += (r - prev_r) * (tp / (tp + fp))
        prev_r = r
    return ap


def hysteresis_reference(scores, low, high):
    on = False
    out = []
    for s in scores:
        if on and s < low:
            on = False
        elif not on and s >= high:
            on = True
        out.append(on)
    return out


def mcc_textbook(tp, fp, tn, fn):
    """(tp*tn - fp*fn) / sqrt(product of the four marginals), 0 when a marginal is empty."""
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)


def grid_counts_enumerate(clips, step_n):
    """``{(low, high): (tp, fp, tn, fn)}`` for every valid grid pair, gating each clip from OFF."""
    values = [k / step_n for k in range(step_n + 1)]
    out = {}
    for hi in values:
        for lo in values:
            if lo > hi:
                continue
            counts = [0, 0, 0, 0]
            for scores, labels in clips:
                for d, y in zip(hysteresis_reference(scores, lo, hi), labels):
                    counts[(0 if y else 1) if d else (3 if y else 2)] += 1
            out[(lo, hi)] = tuple(counts)
    return out


def grid_search_enumerate(clips, step_n):
    """Exhaustive (low, high) search; clips is a list of (scores, labels).

    Returns ``(best_pair, best_mcc, surface)`` with ties going to the
    smallest (high, low).  Uses the textbook MCC so equal counts give
    bit-equal values and ties are real ties.
    """
    surface = {p: mcc_textbook(*c) for p, c in grid_counts_enumerate(clips, step_n).items()}
    best = min(surface, key=lambda p: (-surface[p], p[1], p[0]))
    return best, surface[best], surface
