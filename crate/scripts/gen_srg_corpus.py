#!/usr/bin/env python3
"""Generate strongly regular graph families as graph6 files.

The published SRG enumerations are not vendored here. This script rebuilds
each family from classical constructions and closes the set under
Godsil-McKay switching and regular two-graph descendant/switching moves,
both of which preserve the spectrum (and therefore strong regularity with
the same parameters). Isomorphs are removed with nauty certificates.

SR(29,14,6,7) comes from a time-boxed conference-matrix search, so it may
hold fewer than the 41 known graphs. SR(35,18,9,9) is capped (default 40).

Requires: pynauty, networkx (graph6 encoding only), numpy, numba.

Usage: python3 scripts/gen_srg_corpus.py data/srg
"""

import itertools
import sys
import time
from pathlib import Path

import networkx as nx
import numba
import numpy as np
import pynauty


def to_nauty(adj):
    n = len(adj)
    return pynauty.Graph(n, adjacency_dict={v: sorted(adj[v]) for v in range(n)})


def cert(adj):
    return pynauty.certificate(to_nauty(adj))


def canon_adj(adj):
    lab = pynauty.canon_label(to_nauty(adj))
    pos = {v: i for i, v in enumerate(lab)}
    return [set(pos[w] for w in adj[lab[i]]) for i in range(len(adj))]


def srg_params_ok(adj, n, k, lam, mu):
    if len(adj) != n:
        return False
    if any(len(a) != k for a in adj):
        return False
    for u in range(n):
        for v in range(u + 1, n):
            c = len(adj[u] & adj[v])
            if v in adj[u]:
                if c != lam:
                    return False
            elif c != mu:
                return False
    return True


def from_edges(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


# ---------------------------------------------------------------- constructions


def rook_graph(m):
    cells = [(i, j) for i in range(m) for j in range(m)]
    idx = {c: t for t, c in enumerate(cells)}
    edges = [
        (idx[a], idx[b])
        for a, b in itertools.combinations(cells, 2)
        if a[0] == b[0] or a[1] == b[1]
    ]
    return from_edges(m * m, edges)


def cayley_z4z4(gens):
    cells = [(i, j) for i in range(4) for j in range(4)]
    idx = {c: t for t, c in enumerate(cells)}
    edges = []
    for a in cells:
        for g in gens:
            b = ((a[0] + g[0]) % 4, (a[1] + g[1]) % 4)
            edges.append((idx[a], idx[b]))
    return from_edges(16, edges)


def paley_prime(q):
    squares = {(x * x) % q for x in range(1, q)}
    edges = [(u, v) for u in range(q) for v in range(q) if u != v and (u - v) % q in squares]
    return from_edges(q, edges)


def paley_25():
    # GF(25) = GF(5)[s]/(s^2 - 2); element a + b s encoded as 5a + b
    def mul(x, y):
        a, b = divmod(x, 5)
        c, d = divmod(y, 5)
        re = (a * c + 2 * b * d) % 5
        im = (a * d + b * c) % 5
        return 5 * re + im

    def sub(x, y):
        a, b = divmod(x, 5)
        c, d = divmod(y, 5)
        return 5 * ((a - c) % 5) + (b - d) % 5

    squares = {mul(x, x) for x in range(1, 25)}
    edges = [(u, v) for u in range(25) for v in range(25) if u != v and sub(u, v) in squares]
    return from_edges(25, edges)


def latin_square_graph(sq):
    m = len(sq)
    cells = [(r, c) for r in range(m) for c in range(m)]
    edges = []
    for (i, a), (j, b) in itertools.combinations(enumerate(cells), 2):
        if a[0] == b[0] or a[1] == b[1] or sq[a[0]][a[1]] == sq[b[0]][b[1]]:
            edges.append((i, j))
    return from_edges(m * m, edges)


def triangular_graph(m):
    pairs = list(itertools.combinations(range(m), 2))
    edges = [
        (i, j)
        for (i, a), (j, b) in itertools.combinations(enumerate(pairs), 2)
        if set(a) & set(b)
    ]
    return from_edges(len(pairs), edges), pairs


def seidel_switch(adj, subset):
    n = len(adj)
    s = set(subset)
    out = [set(a) for a in adj]
    for u in s:
        for v in range(n):
            if v in s or v == u:
                continue
            if v in out[u]:
                out[u].discard(v)
                out[v].discard(u)
            else:
                out[u].add(v)
                out[v].add(u)
    return out


def chang_graphs():
    t8, pairs = triangular_graph(8)
    idx = {p: i for i, p in enumerate(pairs)}

    def e(a, b):
        return idx[(min(a, b), max(a, b))]

    matching = [e(0, 1), e(2, 3), e(4, 5), e(6, 7)]
    c8 = [e(i, (i + 1) % 8) for i in range(8)]
    c3c5 = [e(0, 1), e(1, 2), e(0, 2)] + [e(3 + i, 3 + (i + 1) % 5) for i in range(5)]
    return [t8] + [seidel_switch(t8, s) for s in (matching, c8, c3c5)]


def pg32_line_graph():
    # points of PG(3,2): nonzero vectors of GF(2)^4; lines: {a, b, a^b}
    pts = list(range(1, 16))
    lines = set()
    for a, b in itertools.combinations(pts, 2):
        lines.add(frozenset((a, b, a ^ b)))
    lines = sorted(lines, key=sorted)
    edges = [
        (i, j)
        for (i, a), (j, b) in itertools.combinations(enumerate(lines), 2)
        if a & b
    ]
    return from_edges(len(lines), edges)


# ---------------------------------------------------------------- switchings


def gm_switchings(adj):
    """All graphs obtained by Godsil-McKay switching on a 4-set D that
    induces a regular graph, where every outside vertex sees 0, 2 or 4 of D."""
    n = len(adj)
    out = []
    for d in itertools.combinations(range(n), 4):
        ds = set(d)
        degs = {len(adj[v] & ds) for v in d}
        if len(degs) != 1:
            continue
        flip = []
        ok = True
        for v in range(n):
            if v in ds:
                continue
            c = len(adj[v] & ds)
            if c == 2:
                flip.append(v)
            elif c not in (0, 4):
                ok = False
                break
        if not ok or not flip:
            continue
        new = [set(a) for a in adj]
        for v in flip:
            for u in d:
                if u in new[v]:
                    new[v].discard(u)
                    new[u].discard(v)
                else:
                    new[v].add(u)
                    new[u].add(v)
        out.append(new)
    return out


def descendants(adj):
    """Descendants of the two-graph of `adj` (n vertices): isolate each vertex
    by switching on its neighbourhood and drop it."""
    n = len(adj)
    res = []
    for v in range(n):
        sw = seidel_switch(adj, adj[v])
        keep = [u for u in range(n) if u != v]
        pos = {u: i for i, u in enumerate(keep)}
        res.append([set(pos[w] for w in sw[u] if w != v) for u in keep])
    return res


def regular_in_switching_class(adj, size, inner, outer):
    """Graph `adj` plus an isolated vertex; find subsets S (|S| = size) of the
    original vertices inducing an `inner`-regular graph such that every other
    original vertex has `outer` neighbours in S. Switching on S gives a regular
    graph on n + 1 vertices."""
    n = len(adj)
    nb = [sum(1 << w for w in adj[v]) for v in range(n)]
    results = []

    def rec(start, chosen, mask):
        if len(chosen) == size:
            for v in range(n):
                c = bin(nb[v] & mask).count("1")
                if (mask >> v) & 1:
                    if c != inner:
                        return
                elif c != outer:
                    return
            results.append(list(chosen))
            return
        if n - start < size - len(chosen):
            return
        for v in range(start, n):
            if n - v < size - len(chosen):
                break
            c = bin(nb[v] & mask).count("1")
            if c > inner:
                continue
            newmask = mask | (1 << v)
            bad = False
            for u in chosen:
                if bin(nb[u] & newmask).count("1") > inner:
                    bad = True
                    break
            if bad:
                continue
            # vertices skipped (< v, not chosen) are decided "outside"
            skipped_ok = True
            for u in range(start, v):
                if bin(nb[u] & mask).count("1") > outer:
                    skipped_ok = False
                    break
            if not skipped_ok:
                break
            chosen.append(v)
            rec(v + 1, chosen, newmask)
            chosen.pop()

    rec(0, [], 0)
    out = []
    for s in results:
        big = [set(a) for a in adj] + [set()]
        sw = seidel_switch(big, s)
        out.append(sw)
    return out


# ---------------------------------------------------------------- conference matrices
# Tabu search for symmetric conference (Seidel) matrices with S^2 = (n-1) I,
# restricted to matrices invariant under a cyclic permutation of the vertices.

@numba.njit(cache=True)
def search(n, seed, iters, tenure, orb_ptr, orb_a, orb_b):
    np.random.seed(seed)
    norb=orb_ptr.shape[0]-1
    S=np.zeros((n,n),np.int64)
    for o in range(norb):
        v=1 if np.random.random()<0.5 else -1
        for t in range(orb_ptr[o],orb_ptr[o+1]):
            S[orb_a[t],orb_b[t]]=v; S[orb_b[t],orb_a[t]]=v
    M=np.zeros((n,n),np.int64)
    for a in range(n):
        for b in range(n):
            s=0
            for k in range(n):
                s+=S[a,k]*S[k,b]
            M[a,b]=s
    c=0
    for a in range(n):
        for b in range(n):
            if a!=b: c+=M[a,b]*M[a,b]
    tabu=np.zeros(norb,np.int64)
    best=c
    mark=np.zeros(n,np.int64)
    rows=np.zeros(n,np.int64)
    for it in range(iters):
        if c==0: return S, it
        bd=1<<60; bo=-1; cnt=0
        for o in range(norb):
            nr=0
            for t in range(orb_ptr[o],orb_ptr[o+1]):
                a=orb_a[t]; b=orb_b[t]
                S[a,b]=-S[a,b]; S[b,a]=-S[b,a]
                if mark[a]==0:
                    mark[a]=1; rows[nr]=a; nr+=1
                if mark[b]==0:
                    mark[b]=1; rows[nr]=b; nr+=1
            d=0
            for ri in range(nr):
                a=rows[ri]
                for b in range(n):
                    if b==a: continue
                    s=0
                    for k in range(n):
                        s+=S[a,k]*S[k,b]
                    old=M[a,b]
                    if mark[b]==1:
                        d+=s*s-old*old
                    else:
                        d+=2*(s*s-old*old)
            for t in range(orb_ptr[o],orb_ptr[o+1]):
                a=orb_a[t]; b=orb_b[t]
                S[a,b]=-S[a,b]; S[b,a]=-S[b,a]
            for ri in range(nr):
                mark[rows[ri]]=0
            if tabu[o]>it and c+d>=best: continue
            if d<bd:
                bd=d; bo=o; cnt=1
            elif d==bd:
                cnt+=1
                if np.random.randint(cnt)==0:
                    bo=o
        if bo<0: continue
        nr=0
        for t in range(orb_ptr[bo],orb_ptr[bo+1]):
            a=orb_a[t]; b=orb_b[t]
            S[a,b]=-S[a,b]; S[b,a]=-S[b,a]
            if mark[a]==0:
                mark[a]=1; rows[nr]=a; nr+=1
            if mark[b]==0:
                mark[b]=1; rows[nr]=b; nr+=1
        for ri in range(nr):
            a=rows[ri]
            for b in range(n):
                s=0
                for k in range(n):
                    s+=S[a,k]*S[k,b]
                M[a,b]=s; M[b,a]=s
        for ri in range(nr):
            mark[rows[ri]]=0
        c+=bd
        if c<best: best=c
        tabu[bo]=it+tenure+np.random.randint(5)
    return S, -best

def pair_orbits(n, perm):
    seen=set(); ptr=[0]; A=[]; B=[]
    for a,b in itertools.combinations(range(n),2):
        if (a,b) in seen: continue
        orb=[]; x,y=a,b
        while (min(x,y),max(x,y)) not in seen:
            p=(min(x,y),max(x,y)); seen.add(p); orb.append(p)
            x,y=perm[x],perm[y]
        for p in orb: A.append(p[0]); B.append(p[1])
        ptr.append(len(A))
    return np.array(ptr),np.array(A),np.array(B)

def cyclic_perm(n, r, fixed):
    perm=list(range(n))
    m=(n-fixed)//r
    for i in range(m):
        for j in range(r):
            perm[fixed+i*r+j]=fixed+i*r+(j+1)%r
    return perm



def seidel_graph(S):
    n = S.shape[0]
    return [set(int(w) for w in np.nonzero(S[v] == -1)[0]) for v in range(n)]


class Family:
    def __init__(self, n, k, lam, mu, cap=None):
        self.params = (n, k, lam, mu)
        self.graphs = {}
        self.cap = cap

    def full(self):
        return self.cap is not None and len(self.graphs) >= self.cap

    def add(self, adj):
        if self.full():
            return False
        if not srg_params_ok(adj, *self.params):
            raise ValueError("parameter check failed for %s" % (self.params,))
        c = cert(adj)
        if c in self.graphs:
            return False
        self.graphs[c] = canon_adj(adj)
        return True


def close_gm(fam, max_rounds=50):
    frontier = list(fam.graphs.values())
    for _ in range(max_rounds):
        nxt = []
        for g in frontier:
            for h in gm_switchings(g):
                if fam.full():
                    return
                if fam.add(h):
                    nxt.append(fam.graphs[cert(h)])
        if not nxt:
            return
        frontier = nxt


def build_16():
    fam = Family(16, 6, 2, 2)
    fam.add(rook_graph(4))
    fam.add(cayley_z4z4([(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)]))
    close_gm(fam)
    return fam


def build_28():
    fam = Family(28, 12, 6, 4)
    for g in chang_graphs():
        fam.add(g)
    close_gm(fam)
    return fam


SYMMETRIES_26 = [(1, 0), (2, 0), (2, 2), (3, 2), (5, 1), (13, 0), (4, 2), (6, 2)]
SYMMETRIES_30 = [(3, 0), (2, 2), (2, 0), (3, 6), (6, 0), (2, 4), (2, 6), (3, 3)]


def conference_matrices(n, symmetries, seeds, iters=20000, tenure=10):
    for r, fixed in symmetries:
        ptr, a, b = pair_orbits(n, cyclic_perm(n, r, fixed))
        for seed in range(seeds):
            s, it = search(n, seed, iters, tenure, ptr, a, b)
            if it >= 0:
                yield seidel_graph(s)


def build_25_26(seeds):
    f25 = Family(25, 12, 5, 6)
    f26 = Family(26, 10, 3, 4)
    for big in conference_matrices(26, SYMMETRIES_26, seeds):
        for d in descendants(big):
            if f25.add(d):
                for h in regular_in_switching_class(d, 10, 3, 6):
                    f26.add(h)
        if len(f25.graphs) == 15 and len(f26.graphs) == 10:
            break
    return f25, f26


def build_29(seeds, budget=2400):
    """Stops at 41 graphs or after `budget` seconds, whichever comes first."""
    fam = Family(29, 14, 6, 7)
    fam.add(paley_prime(29))
    start = time.time()
    for big in conference_matrices(30, SYMMETRIES_30, seeds):
        for d in descendants(big):
            fam.add(d)
        if len(fam.graphs) == 41 or time.time() - start > budget:
            break
    return fam


def build_35(cap):
    fam = Family(35, 18, 9, 9, cap=cap)
    fam.add(pg32_line_graph())
    close_gm(fam)
    return fam


def write_g6(path, fam):
    lines = []
    for c in sorted(fam.graphs):
        adj = fam.graphs[c]
        g = nx.Graph()
        g.add_nodes_from(range(len(adj)))
        for u in range(len(adj)):
            for v in adj[u]:
                if u < v:
                    g.add_edge(u, v)
        lines.append(nx.to_graph6_bytes(g, header=False).decode().strip())
    path.write_text("\n".join(lines) + "\n")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/srg")
    out.mkdir(parents=True, exist_ok=True)
    jobs = [
        ("sr16622.g6", lambda: [build_16()]),
        ("sr281264.g6", lambda: [build_28()]),
    ]
    for name, job in jobs:
        (fam,) = job()
        write_g6(out / name, fam)
        print(name, len(fam.graphs))
    seeds = int(sys.argv[3]) if len(sys.argv) > 3 else 20
    f25, f26 = build_25_26(seeds)
    write_g6(out / "sr251256.g6", f25)
    write_g6(out / "sr261034.g6", f26)
    print("sr251256.g6", len(f25.graphs), "sr261034.g6", len(f26.graphs))
    f29 = build_29(max(seeds, 60))
    write_g6(out / "sr291467.g6", f29)
    print("sr291467.g6", len(f29.graphs))
    cap = int(sys.argv[2]) if len(sys.argv) > 2 else 40
    f35 = build_35(cap)
    write_g6(out / "sr351899.g6", f35)
    print("sr351899.g6", len(f35.graphs))


if __name__ == "__main__":
    main()
