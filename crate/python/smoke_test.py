"""Exercise the Python bindings end to end.

Build and install first, e.g.  maturin develop -m crates/py/Cargo.toml
"""

import os
import tempfile

import pygraphette as pg

NC = [1, 2, 4, 11, 34, 156]
ORBITS = [1, 2, 6, 20, 90, 544]


def check_tables():
    for k in range(1, 7):
        t = pg.GraphetteTable.build(k)
        assert t.canonical_count == NC[k - 1], t
        assert t.total_orbits == ORBITS[k - 1], t
    t3 = pg.GraphetteTable.build(3)
    assert [g.bits for g in t3.canonicals()] == [0, 1, 3, 7]
    assert t3.connected_count() == 2

    q = t3.query_bits(7)
    assert q.connected and len(set(q.orbits)) == 1
    assert t3.query_bits(3).witness == [0, 1, 2]
    try:
        t3.query_bits(8)
    except pg.GraphetteError:
        pass
    else:
        raise AssertionError("out-of-range bits accepted")

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "k4.bin")
        t4 = pg.GraphetteTable.build(4, partitions=4, workers=2)
        t4.save(path)
        back = pg.GraphetteTable.load(path)
        assert back.to_bytes() == t4.to_bytes() == pg.GraphetteTable.build(4).to_bytes()


def check_graphettes():
    path = pg.Graphette.from_edges(3, [(1, 0), (2, 1)])
    assert path.bits == 0b101 and path.is_connected()
    assert path.orbits() == [0, 1, 0]
    assert sorted(path.automorphisms()) == [[0, 1, 2], [2, 1, 0]]
    moved = path.permute([1, 0, 2])
    iso = pg.are_isomorphic(path, moved)
    assert iso is not None and path.permute(iso) == moved
    assert pg.are_isomorphic(path, pg.Graphette(3, 7)) is None
    assert pg.split_cycles([2, 0, 1, 3, 5, 4]) == [[0, 2, 1], [3], [4, 5]]

    petersen = []
    for i in range(5):
        petersen += [(i, (i + 1) % 5), (5 + i, 5 + (i + 2) % 5), (i, 5 + i)]
    assert len(pg.Graphette.from_edges(10, petersen).automorphisms()) == 120


def check_sampling():
    t = pg.GraphetteTable.build(4)
    host = pg.HostGraph.erdos_renyi(30, 0.2, seed=1)
    exact = pg.enumerate(host, t)
    est = pg.sample(host, t, 200_000, strategy="uniform", seed=7)
    assert est.samples == 200_000
    assert est.l1_distance(exact) < 0.02, est.l1_distance(exact)
    again = pg.sample(host, t, 200_000, strategy="uniform", seed=7)
    assert again.graphettes() == est.graphettes()

    column = [0] * t.total_orbits
    for counts in est.odv().values():
        for orbit, c in counts.items():
            column[orbit] += c
    assert column == [o[2] for o in est.orbits()]

    k5 = pg.HostGraph.parse("a b\na c\na d\na e\nb c\nb d\nb e\nc d\nc e\nd e\n")
    r = pg.sample(k5, pg.GraphetteTable.build(3), 100, strategy="local")
    assert r.frequencies() == [0.0, 0.0, 0.0, 1.0]
    assert r.to_tsv(k5).startswith("# k\t3\n")


if __name__ == "__main__":
    check_tables()
    check_graphettes()
    check_sampling()
    print("python smoke test passed")
