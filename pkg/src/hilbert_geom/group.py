"""Projective automorphisms of domains: certificates, orbits, translation lengths."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .domain import ConvexDomain, Ellipsoid, Polytope, _raw, hilbert_distance
from .errors import BudgetExhausted, NotAnAutomorphism, NotInDomain, UnsupportedDomain
from .flats import Flat, simplex_distance
from .projective import ProjMap, ProjPoint, apply

EXACT = "exact"
SAMPLED = "sampled"


@dataclass(frozen=True)
class GroupElement:
    """A projective map together with evidence that it preserves a domain.

    ``certificate`` is ``"exact"`` (vertex permutation or form identity
    verified) or ``"sampled"`` (``samples`` membership checks with
    ``seed`` and no failures).
    """

    map: ProjMap
    certificate: str
    samples: int = 0
    seed: int | None = None
    failures: int = 0
    permutation: tuple | None = None

    @property
    def matrix(self):
        return self.map.matrix

    def inverse(self) -> "GroupElement":
        perm = None
        if self.permutation is not None:
            perm = [0] * len(self.permutation)
            for i, j in enumerate(self.permutation):
                perm[j] = i
            perm = tuple(perm)
        return GroupElement(self.map.inverse(), self.certificate, self.samples,
                            self.seed, self.failures, perm)


def _as_map(g) -> ProjMap:
    if isinstance(g, GroupElement):
        return g.map
    if isinstance(g, ProjMap):
        return g
    return ProjMap(np.asarray(g))


def _match_vertices(points, targets, exact, tol=1e-9):
    """Permutation sending points to targets up to a common-sign scale, or None."""
    perm = []
    signs = set()
    for p in points:
        found = None
        for j, q in enumerate(targets):
            if exact:
                k = next(i for i in range(len(q)) if q[i] != 0)
                if p[k] == 0:
                    continue
                ratio = p[k] / q[k]
                if all(p[i] == ratio * q[i] for i in range(len(q))):
                    found = (j, ratio > 0)
                    break
            else:
                pn = p / np.linalg.norm(p)
                qn = q / np.linalg.norm(q)
                if np.linalg.norm(pn - qn) <= tol:
                    found = (j, True)
                    break
                if np.linalg.norm(pn + qn) <= tol:
                    found = (j, False)
                    break
        if found is None:
            return None, p
        perm.append(found[0])
        signs.add(found[1])
    if len(signs) > 1 or len(set(perm)) != len(perm):
        return None, None
    return tuple(perm), None


def certify_preserves(domain: ConvexDomain, g, samples: int = 1000, seed: int = 0,
                      tol: float = 1e-9) -> GroupElement:
    """Certify g.Omega = Omega or raise NotAnAutomorphism with a witness."""
    from .rng import make_rng
    from .sampling import interior_points

    m = _as_map(g)
    if isinstance(domain, Polytope):
        verts = domain.vertex_array
        exact = m.exact
        mat = m.matrix if exact else linalg.to_float(m.matrix)
        vv = verts if exact else linalg.to_float(verts)
        images = [mat.dot(v) for v in vv]
        perm, witness = _match_vertices(images, vv, exact, tol)
        if perm is None:
            w = ProjPoint(witness) if witness is not None else None
            raise NotAnAutomorphism("map does not permute the vertices within one cone sheet", witness=w)
        return GroupElement(m, EXACT, permutation=perm)
    if isinstance(domain, Ellipsoid):
        q = domain.form
        gm = m.matrix
        if not (m.exact and domain.exact):
            q, gm = domain._form_float, linalg.to_float(gm)
        image = gm.T.dot(q).dot(gm)
        i, j = np.unravel_index(np.argmax(np.abs(linalg.to_float(q))), q.shape)
        k = image[i, j] / q[i, j]
        if q.dtype == object:
            ok = k > 0 and all(image[a, b] == k * q[a, b] for a in range(q.shape[0]) for b in range(q.shape[1]))
        else:
            ok = k > 0 and np.allclose(image, k * q, atol=tol * abs(k) * np.abs(q).max())
        if ok:
            return GroupElement(m, EXACT)
    rng = make_rng(seed, 7)
    inv = m.inverse()
    for x in interior_points(domain, rng, samples):
        for h in (m, inv):
            y = linalg.to_float(h.matrix).dot(x)
            if not domain.contains(y):
                raise NotAnAutomorphism("an interior point leaves the domain", witness=ProjPoint(x))
    return GroupElement(m, SAMPLED, samples=samples, seed=seed)


def isometry_check(domain: ConvexDomain, g, samples: int = 200, seed: int = 0,
                   tol: float = 1e-9) -> dict:
    """max |d(gx, gy) - d(x, y)| over random pairs.

    Pairs whose image leaves the domain count as violations.
    """
    from .rng import make_rng
    from .sampling import interior_points

    m = linalg.to_float(_as_map(g).matrix)
    rng = make_rng(seed, 8)
    xs = interior_points(domain, rng, samples)
    ys = interior_points(domain, rng, samples)
    worst = 0.0
    violations = 0
    witness = None
    for x, y in zip(xs, ys):
        gx, gy = m.dot(x), m.dot(y)
        try:
            dev = abs(hilbert_distance(domain, gx, gy) - hilbert_distance(domain, x, y))
        except NotInDomain:
            violations += 1
            witness = witness or x.tolist()
            continue
        if dev > worst:
            worst = dev
            if dev > tol:
                witness = x.tolist()
    return {
        "samples": samples,
        "seed": seed,
        "max_deviation": worst,
        "violations": violations,
        "passed": violations == 0 and worst <= tol,
        "witness": witness,
    }


def stabilizes_flat(g, flat: Flat, tol: float = 1e-9) -> bool:
    """True iff g maps the flat's vertex set to itself up to scale."""
    m = _as_map(g)
    exact = m.exact and flat.exact
    verts = [v if exact else v.to_float() for v in flat.vertices]
    images = [apply(m if exact else ProjMap(linalg.to_float(m.matrix)), v) for v in verts]
    hit = set()
    for im in images:
        j = next((j for j, v in enumerate(verts) if im.same_as(v, tol)), None)
        if j is None or j in hit:
            return False
        hit.add(j)
    return True


# ---------------------------------------------------------------------------
# generators and words


class GeneratorSet:
    """Finitely many group elements, closed under inverses.

    Labels are single letters; the inverse of ``a`` is labelled ``A``.
    """

    def __init__(self, elements, labels=None, max_length: int = 3):
        elements = list(elements)
        if labels is None:
            labels = [chr(ord("a") + i) for i in range(len(elements))]
        self.max_length = max_length
        self.elements = []
        self.labels = []
        for g, lab in zip(elements, labels):
            gm = g if isinstance(g, GroupElement) else GroupElement(_as_map(g), "unverified")
            inv = gm.inverse()
            self.elements += [gm, inv]
            self.labels += [lab, lab.swapcase() if lab.swapcase() != lab else lab + "^-1"]

    def __len__(self):
        return len(self.elements)

    def pairs(self):
        return list(zip(self.labels, self.elements))

    def words(self, max_length: int | None = None) -> list:
        """Distinct group elements of word length <= L, breadth-first."""
        L = self.max_length if max_length is None else max_length
        d1 = self.elements[0].map.matrix.shape[0]
        ident = ProjMap.identity(d1 - 1, exact=all(g.map.exact for g in self.elements))
        out = [("", ident)]
        seen = {_map_key(ident)}
        frontier = [("", ident)]
        for _ in range(L):
            nxt = []
            for word, m in frontier:
                for lab, g in self.pairs():
                    h = g.map @ m
                    key = _map_key(h)
                    if key in seen:
                        continue
                    seen.add(key)
                    nxt.append((lab + word, h))
            out += nxt
            frontier = nxt
        return out


def _point_key(v, exact):
    p = ProjPoint(v).normalized()
    if exact:
        return tuple(p.coords)
    return tuple(np.round(linalg.to_float(p.coords), 12))


def _map_key(m: ProjMap):
    return _point_key(m.matrix.ravel(), m.exact)


@dataclass(frozen=True)
class OrbitPoint:
    word: str
    point: ProjPoint


def orbit(generators: GeneratorSet, x, max_length: int | None = None) -> list:
    """Deduplicated orbit points of words up to the length bound.

    Breadth-first over words in the generators and their inverses; points
    are compared after projective normalization, exactly for rational data
    and at 1e-12 otherwise.  Each point keeps the first (shortest) word
    that reached it.
    """
    L = generators.max_length if max_length is None else max_length
    xv = _raw(x)
    exact = xv.dtype == object and all(g.map.exact for g in generators.elements)
    if not exact:
        xv = linalg.to_float(xv)
    start = ProjPoint(xv).normalized()
    seen = {_point_key(start.coords, exact)}
    out = [OrbitPoint("", start)]
    frontier = [("", start.coords)]
    for _ in range(L):
        nxt = []
        for word, v in frontier:
            for lab, g in generators.pairs():
                mat = g.map.matrix if exact else linalg.to_float(g.map.matrix)
                w = ProjPoint(mat.dot(v)).normalized().coords
                key = _point_key(w, exact)
                if key in seen:
                    continue
                seen.add(key)
                out.append(OrbitPoint(lab + word, ProjPoint(w)))
                nxt.append((lab + word, w))
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# translation length


@dataclass(frozen=True)
class TranslationReport:
    value: float
    method: str
    evaluations: int
    exhausted: bool


def _simplex_form(domain, m):
    """Matrix of g in the vertex basis of a simplex domain (float)."""
    if not (isinstance(domain, Polytope) and domain.is_simplex):
        raise UnsupportedDomain("translation length is implemented for simplex domains")
    basis = linalg.to_float(domain.vertex_array).T
    return np.linalg.solve(basis, linalg.to_float(m.matrix).dot(basis)), basis


def _diagonal_exponents(mb, tol=1e-12):
    off = mb - np.diag(np.diag(mb))
    if np.abs(off).max() > tol * np.abs(mb).max():
        return None
    diag = np.diag(mb)
    if not (np.all(diag > 0) or np.all(diag < 0)):
        return None
    return np.log(np.abs(diag))


def translation_report(domain: ConvexDomain, g, budget: int = 10_000, starts: int = 32,
                       seed: int = 0, method: str = "auto") -> TranslationReport:
    """Infimum of d(x, g.x) over a simplex domain.

    ``method="auto"`` uses ½(max a - min a) when g is diagonal in the vertex
    basis with eigenvalues exp(a_i); otherwise (or with
    ``method="numeric"``) multi-start pattern search in log coordinates.
    """
    from .rng import make_rng

    m = _as_map(g)
    mb, _ = _simplex_form(domain, m)
    if method == "auto":
        a = _diagonal_exponents(mb)
        if a is not None:
            return TranslationReport(0.5 * float(a.max() - a.min()), "closed-form", 0, False)
    n = mb.shape[0]
    sign = 1.0 if np.sum(mb) > 0 else -1.0
    mb = sign * mb
    evals = 0

    def f(u):
        nonlocal evals
        evals += 1
        x = np.exp(u - u.max())
        return simplex_distance(x, mb.dot(x))

    rng = make_rng(seed, 11)
    # coordinate axes of the sum-zero plane plus one random direction
    dirs = [np.eye(n)[i] - 1.0 / n for i in range(n)]
    extra = rng.standard_normal(n)
    dirs.append(extra - extra.mean())
    dirs = [v / np.linalg.norm(v) for v in dirs]
    best = math.inf
    exhausted = False
    for s in range(starts):
        u = np.zeros(n) if s == 0 else rng.normal(scale=2.0, size=n)
        u -= u.mean()
        val = f(u)
        step = 1.0
        while step > 1e-7 and not exhausted:
            improved = False
            for v in dirs:
                for sgn in (1.0, -1.0):
                    if evals >= budget:
                        exhausted = True
                        break
                    cand = u + sgn * step * v
                    cv = f(cand)
                    if cv < val:
                        u, val, improved = cand, cv, True
                        break
                if improved or exhausted:
                    break
            if not improved:
                step *= 0.5
        best = min(best, val)
        if exhausted:
            break
    return TranslationReport(best, "numeric", evals, exhausted)


def translation_length(domain: ConvexDomain, g, budget: int = 10_000, starts: int = 32,
                       seed: int = 0, method: str = "auto") -> float:
    """See :func:`translation_report`; warns with BudgetExhausted when cut short."""
    rep = translation_report(domain, g, budget, starts, seed, method)
    if rep.exhausted:
        warnings.warn(BudgetExhausted(f"search stopped after {rep.evaluations} evaluations"),
                      stacklevel=2)
    return rep.value


# ---------------------------------------------------------------------------
# precise invariance


def precise_invariance_check(domain: ConvexDomain, region, generators: GeneratorSet,
                             samples: int = 200, seed: int = 0,
                             max_length: int = 2) -> dict:
    """Sampled test that each word g has g.X = X or g.X ∩ X = ∅.

    ``region`` is a membership predicate.  Points of X are drawn by
    rejection from the domain.  For each word the sample decides whether
    g maps X into X, X into its complement, or straddles (a violation,
    reported with a witness pair).
    """
    from .rng import make_rng
    from .sampling import interior_points

    rng = make_rng(seed, 13)
    pts = []
    tries = 0
    while len(pts) < samples and tries < 200 * samples:
        batch = interior_points(domain, rng, samples, margin=0.0)
        tries += samples
        pts += [x for x in batch if region(x)]
    pts = pts[:samples]
    words = generators.words(max_length)
    results = []
    violations = []
    for word, m in words:
        mat = linalg.to_float(m.matrix)
        inv = np.linalg.inv(mat)
        fwd = [bool(region(mat.dot(x))) for x in pts]
        back = [bool(region(inv.dot(x))) for x in pts]
        if all(fwd) and all(back):
            kind = "preserves"
        elif not any(fwd) and not any(back):
            kind = "disjoint"
        else:
            kind = "violation"
            inside = next((x for x, f in zip(pts, fwd) if f), None)
            outside = next((x for x, f in zip(pts, fwd) if not f), None)
            violations.append({
                "word": word,
                "image_inside": None if inside is None else inside.tolist(),
                "image_outside": None if outside is None else outside.tolist(),
            })
        results.append({"word": word, "kind": kind})
    return {
        "seed": seed,
        "samples": len(pts),
        "words": results,
        "violations": violations,
        "passed": not violations,
    }
