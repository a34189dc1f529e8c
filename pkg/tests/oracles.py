"""Direct-from-definition reference implementations used only by the tests.

Everything here is plain Python loops over points or pairs; nothing is shared
with the package code beyond the input format.
"""
import itertools
import math


def dist(a, b, metric="euclidean"):
    if metric == "manhattan":
        return sum(abs(x - y) for x, y in zip(a, b))
    sq = sum((x - y) ** 2 for x, y in zip(a, b))
    return sq if metric == "squared_euclidean" else math.sqrt(sq)


def groups(labels):
    out = {}
    for i, lab in enumerate(labels):
        out.setdefault(lab, []).append(i)
    return out


def silhouette(points, labels, metric="euclidean"):
    g = groups(labels)
    s = []
    for i, lab in enumerate(labels):
        own = [j for j in g[lab] if j != i]
        if not own:
            s.append(0.0)
            continue
        a = sum(dist(points[i], points[j], metric) for j in own) / len(own)
        b = min(
            sum(dist(points[i], points[j], metric) for j in members) / len(members)
            for other, members in g.items()
            if other != lab
        )
        s.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return sum(s) / len(s), s


def mean_vec(points, idx):
    dim = len(points[0])
    return [sum(points[i][c] for i in idx) / len(idx) for c in range(dim)]


def davies_bouldin(points, labels, metric="euclidean", centers=None):
    g = groups(labels)
    keys = sorted(g)
    if centers is None:
        centers = {c: mean_vec(points, g[c]) for c in keys}
    scatter = {c: sum(dist(points[i], centers[c], metric) for i in g[c]) / len(g[c]) for c in keys}
    total = 0.0
    for i in keys:
        total += max(
            (scatter[i] + scatter[j]) / dist(centers[i], centers[j], metric) for j in keys if j != i
        )
    return total / len(keys)


def dunn(points, labels, metric="euclidean"):
    n = len(points)
    min_inter = math.inf
    max_diam = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d = dist(points[i], points[j], metric)
            if labels[i] == labels[j]:
                max_diam = max(max_diam, d)
            else:
                min_inter = min(min_inter, d)
    return min_inter / max_diam


def pair_agreements(a, b):
    together = apart = total = 0
    for i, j in itertools.combinations(range(len(a)), 2):
        sa = a[i] == a[j]
        sb = b[i] == b[j]
        total += 1
        together += sa and sb
        apart += (not sa) and (not sb)
    return together, apart, total


def rand_index(a, b):
    together, apart, total = pair_agreements(a, b)
    return (together + apart) / total


def mirkin_raw(a, b):
    # Ordered pairs (i, j), i != j, on which the labelings disagree.
    n = len(a)
    return sum(
        1 for i in range(n) for j in range(n) if i != j and (a[i] == a[j]) != (b[i] == b[j])
    )


def accuracy(pred, truth, noise=-1):
    clusters = sorted({p for p in pred if p != noise})
    classes = sorted(set(truth))
    best = 0
    if len(clusters) <= len(classes):
        for perm in itertools.permutations(classes, len(clusters)):
            mapping = dict(zip(clusters, perm))
            best = max(best, sum(1 for p, t in zip(pred, truth) if p != noise and mapping[p] == t))
    else:
        for perm in itertools.permutations(clusters, len(classes)):
            mapping = dict(zip(perm, classes))
            best = max(best, sum(1 for p, t in zip(pred, truth) if p in mapping and mapping[p] == t))
    return best / len(truth)


def mst_components(points, k, metric="euclidean"):
    """Prim's MST, drop the k-1 heaviest edges, label the components."""
    n = len(points)
    in_tree = [False] * n
    best = [math.inf] * n
    parent = [-1] * n
    best[0] = 0.0
    edges = []
    for _ in range(n):
        u = min((i for i in range(n) if not in_tree[i]), key=lambda i: best[i])
        in_tree[u] = True
        if parent[u] >= 0:
            edges.append((best[u], parent[u], u))
        for v in range(n):
            if not in_tree[v]:
                d = dist(points[u], points[v], metric)
                if d < best[v]:
                    best[v], parent[v] = d, u
    edges.sort()
    keep = edges[: n - k]
    root = list(range(n))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for _, u, v in keep:
        root[find(u)] = find(v)
    return [find(i) for i in range(n)]


def same_partition(a, b):
    """True when two labelings induce the same grouping (ids may differ)."""
    fwd, back = {}, {}
    for x, y in zip(a, b):
        if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
            return False
    return True


def f_cdf_quadrature(x, d1, d2):
    from scipy.integrate import quad

    log_norm = math.lgamma((d1 + d2) / 2) - math.lgamma(d1 / 2) - math.lgamma(d2 / 2) + (d1 / 2) * math.log(d1 / d2)

    def pdf(t):
        if t <= 0:
            return 0.0
        return math.exp(log_norm + (d1 / 2 - 1) * math.log(t) - ((d1 + d2) / 2) * math.log1p(d1 * t / d2))

    val, _ = quad(pdf, 0, x, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val
