#!/usr/bin/env python3
"""Regenerates the larger grid/chain fixtures. Deterministic output."""
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def dump(name, obj):
    with open(os.path.join(HERE, name), "w") as f:
        json.dump(obj, f, indent=2, sort_keys=False)
        f.write("\n")


def rat(n):
    return f"{n}/1"


def finset_chain_module(sizes):
    """Chain module with objects e0..e{k-1} and collapse-to-last maps."""
    objects = {str(i): [f"e{k}" for k in range(s)] for i, s in enumerate(sizes)}
    maps = {}
    for i in range(len(sizes) - 1):
        a, b = sizes[i], sizes[i + 1]
        maps[f"{i}->{i+1}"] = {f"e{x}": f"e{min(x, b - 1)}" for x in range(a)}
    return {"backend": "finset", "objects": objects, "maps": maps}


def fig_line():
    """Chain of 16 under the round-up-to-multiples-of-3 flow; the middle
    inter-critical run of F splits into three pieces. Ships representative
    maps only; the extend command completes the assignment."""
    n = 16
    f_sizes = [2, 2, 2] + [1] * 13
    g_sizes = [3, 3, 3, 3, 3, 3, 2, 2, 1, 1, 1, 2, 2, 1, 1, 1]

    def t_map(step):
        if step == 0:
            return {str(x): str(x) for x in range(n)}
        return {str(x): str(min(3 * (x // 3) + 3 * step, n - 1)) for x in range(n)}

    breakpoints = [rat(i) for i in range(7)]
    maps = [t_map(i) for i in range(7)]

    def t1(x):
        return min(3 * (x // 3) + 3, n - 1)

    b_f = [0, 2, 3, 4]
    b_g = [0, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14]
    phi = {str(b): {f"e{x}": "e0" for x in range(f_sizes[b])} for b in b_f}
    psi = {str(b): {f"e{x}": "e0" for x in range(g_sizes[b])} for b in b_g}
    dump("fig_line.json", {
        "poset": {"type": "grid", "axes": [n]},
        "flow": {"breakpoints": breakpoints,
                 "translations": {"type": "explicit", "maps": maps}},
        "modules": {"F": finset_chain_module(f_sizes),
                    "G": finset_chain_module(g_sizes)},
        "representative_maps": {"epsilon": "1/1", "phi": phi, "psi": psi},
        "options": {"strategy": "linear"},
    })


def product_sizes(shape, events_per_axis):
    """Object size at each grid point: product over axes of 2 (before the
    event edge) or 1 (after). events_per_axis: axis -> collapse_after or
    None."""
    def size(coords):
        s = 1
        for axis, ca in events_per_axis.items():
            s *= 2 if coords[axis] <= ca else 1
        return s
    return size


def grid_elements(shape):
    coords = [[]]
    for ln in shape:
        coords = [c + [v] for c in coords for v in range(ln)]
    return coords


def label(c):
    return ",".join(str(v) for v in c)


def finset_grid_module(shape, events):
    """Product of two-branch merge trees: along each evented axis the pair
    of branches collapses after the given coordinate."""
    size = product_sizes(shape, events)
    elements = grid_elements(shape)
    objects = {label(c): [f"e{k}" for k in range(size(c))] for c in elements}

    def index_map(cp, cq):
        # branches along each axis collapse independently; canonical map
        # sends branch index b to min(b, branches_at_target - 1) per axis
        axes = sorted(events.keys())
        sp = [2 if cp[a] <= events[a] else 1 for a in axes]
        sq = [2 if cq[a] <= events[a] else 1 for a in axes]
        table = {}
        # enumerate mixed-radix branch tuples of the source
        def tuples(dims):
            out = [[]]
            for d in dims:
                out = [t + [v] for t in out for v in range(d)]
            return out
        for src_idx, t in enumerate(tuples(sp)):
            tq = [min(v, d - 1) for v, d in zip(t, sq)]
            dst_idx = 0
            for v, d in zip(tq, sq):
                dst_idx = dst_idx * d + v
            table[f"e{src_idx}"] = f"e{dst_idx}"
        return table

    maps = {}
    for cp in elements:
        for axis in range(len(shape)):
            cq = list(cp)
            cq[axis] += 1
            if cq[axis] >= shape[axis]:
                continue
            maps[f"{label(cp)}->{label(cq)}"] = index_map(cp, cq)
    return {"backend": "finset", "objects": objects, "maps": maps}


def floor_flow(shape, top):
    return {"breakpoints": [rat(i) for i in range(top + 1)],
            "translations": {"type": "per_axis",
                             "axes": [{"type": "floor_shift"} for _ in shape]}}


def t1_grid(c, shape):
    return [min(v + 1, ln - 1) for v, ln in zip(c, shape)]


def constant_to_first(size):
    return {f"e{k}": "e0" for k in range(size)}


def grid_interleaving_4x4():
    """F = G with a natural flow self-assignment: a true interleaving."""
    shape = [4, 4]
    events = {0: 1}
    module = finset_grid_module(shape, events)
    size = product_sizes(shape, events)
    phi = {}
    for c in grid_elements(shape):
        tgt = t1_grid(c, shape)
        sp, sq = size(c), size(tgt)
        phi[label(c)] = {f"e{x}": f"e{min(x, sq - 1)}" for x in range(sp)}
    dump("grid_4x4_interleaving.json", {
        "poset": {"type": "grid", "axes": shape},
        "flow": floor_flow(shape, 4),
        "modules": {"F": module, "G": module},
        "assignment": {"epsilon": "1/1", "phi": phi, "psi": phi},
        "options": {"strategy": "grid"},
    })


def axis_cell_minima(criticals, ln):
    """Minima of the nonempty cells cut by the criticals of one axis."""
    minima = []
    prev_end = -1
    for c in criticals:
        if c > prev_end + 1:
            minima.append(prev_end + 1)
        minima.append(c)
        prev_end = c
    if prev_end + 1 < ln:
        minima.append(prev_end + 1)
    return minima


def cube_minima(shape, criticals_per_axis):
    axes = [axis_cell_minima(cr, ln) for cr, ln in zip(criticals_per_axis, shape)]
    out = [[]]
    for a in axes:
        out = [c + [v] for c in out for v in a]
    return out


def grid_5x5_finset():
    shape = [5, 5]
    f_events = {0: 1, 1: 2}
    g_events = {0: 0, 1: 1}
    f = finset_grid_module(shape, f_events)
    g = finset_grid_module(shape, g_events)
    f_size = product_sizes(shape, f_events)
    g_size = product_sizes(shape, g_events)
    # both-sides criticals of a collapse after coordinate c are {c, c+1}
    f_crit = [[1, 2], [2, 3]]
    g_crit = [[0, 1], [1, 2]]
    phi = {label(m): constant_to_first(f_size(m)) for m in cube_minima(shape, f_crit)}
    psi = {label(m): constant_to_first(g_size(m)) for m in cube_minima(shape, g_crit)}
    dump("grid_5x5_finset.json", {
        "poset": {"type": "grid", "axes": shape},
        "flow": floor_flow(shape, 5),
        "modules": {"F": f, "G": g},
        "representative_maps": {"epsilon": "1/1", "phi": phi, "psi": psi},
        "options": {"strategy": "grid"},
    })


def vec_grid_module(shape, axis, dims, kill_row):
    """GF(2) module whose dimension depends only on the `axis` coordinate
    through `dims`; shrinking steps use the kill matrix, everything else is
    the identity."""
    elements = grid_elements(shape)
    def dim(c):
        return dims[c[axis]]
    objects = {label(c): dim(c) for c in elements}
    def step(dp, dq):
        if dp == dq:
            return [[1 if i == j else 0 for j in range(dp)] for i in range(dq)]
        if (dp, dq) == (2, 1):
            return [[1, 1]] if kill_row == "sum" else [[1, 0]]
        if dq == 0:
            return []
        raise AssertionError("unsupported step")
    maps = {}
    for cp in elements:
        for a in range(len(shape)):
            cq = list(cp)
            cq[a] += 1
            if cq[a] >= shape[a]:
                continue
            maps[f"{label(cp)}->{label(cq)}"] = step(dim(cp), dim(list(cq)))
    return {"backend": "vec", "objects": objects, "maps": maps}


def grid_6x6_vec():
    shape = [6, 6]
    f_dims = [2, 2, 2, 1, 1, 0]
    g_dims = [2, 2, 1, 1, 1, 0]
    f = vec_grid_module(shape, 0, f_dims, "first")
    g = vec_grid_module(shape, 1, g_dims, "sum")
    f_crit = [[2, 3, 4, 5], []]
    g_crit = [[], [1, 2, 4, 5]]

    def f_dim(c):
        return f_dims[c[0]]

    def g_dim(c):
        return g_dims[c[1]]

    def pick_first(rows, cols):
        return [[1 if (r == 0 and c == 0) else 0 for c in range(cols)]
                for r in range(rows)]

    phi = {}
    for m in cube_minima(shape, f_crit):
        tgt = t1_grid(m, shape)
        phi[label(m)] = pick_first(g_dim(tgt), f_dim(m))
    psi = {}
    for m in cube_minima(shape, g_crit):
        tgt = t1_grid(m, shape)
        psi[label(m)] = pick_first(f_dim(tgt), g_dim(m))
    dump("grid_6x6_vec.json", {
        "poset": {"type": "grid", "axes": shape},
        "flow": floor_flow(shape, 6),
        "field": 2,
        "modules": {"F": f, "G": g},
        "representative_maps": {"epsilon": "1/1", "phi": phi, "psi": psi},
        "options": {"strategy": "grid", "algorithm": "vec"},
    })


def grid_4x4x4():
    shape = [4, 4, 4]
    f_events = {0: 1}
    g_events = {2: 2}
    f = finset_grid_module(shape, f_events)
    g = finset_grid_module(shape, g_events)
    f_size = product_sizes(shape, f_events)
    g_size = product_sizes(shape, g_events)
    f_crit = [[1, 2], [], []]
    g_crit = [[], [], [2, 3]]
    phi = {label(m): constant_to_first(f_size(m)) for m in cube_minima(shape, f_crit)}
    # one anchor picks the other branch of G, so the loss is nonzero
    phi["1,0,0"] = {"e0": "e1", "e1": "e1"}
    psi = {label(m): constant_to_first(g_size(m)) for m in cube_minima(shape, g_crit)}
    dump("grid_4x4x4.json", {
        "poset": {"type": "grid", "axes": shape},
        "flow": floor_flow(shape, 4),
        "modules": {"F": f, "G": g},
        "representative_maps": {"epsilon": "1/1", "phi": phi, "psi": psi},
        "options": {"strategy": "grid"},
    })


if __name__ == "__main__":
    fig_line()
    grid_interleaving_4x4()
    grid_5x5_finset()
    grid_6x6_vec()
    grid_4x4x4()
    print("fixtures regenerated")
