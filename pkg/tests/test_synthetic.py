"""The scale workload is frozen: exact census, valid stream, layouts."""
from fdsteer import protocol as P, synthetic, tree as T


def test_census_and_validity():
    val = P.StreamValidator()
    msgs = []

    def sink(m):
        val.feed(m)
        msgs.append(m)

    stats = synthetic.run(sink=sink, snapshot_mode="interval")
    assert stats["call_nodes"] == synthetic.CALL_NODES == 3905
    assert stats["state"] == "AtSuccess"
    costs = [dict(msgs[i + 1].pairs)["C"][0]
             for i, m in enumerate(msgs) if isinstance(m, P.Success)
             and isinstance(msgs[i + 1], P.DomainIntervals)]
    # the constraint interaction's own success frame leads; drop it
    costs = costs[1:]
    assert len(costs) == synthetic.SUCCESSES
    assert all(a > b for a, b in zip(costs, costs[1:]))
    assert costs[-1] == synthetic.BEST_COST


def test_tree_lays_out_in_all_four_algorithms():
    msgs = []
    synthetic.run(sink=msgs.append)
    t = T.SearchTree.from_messages(msgs)
    assert sum(1 for n in t.nodes.values() if n.kind == T.CALL) == 3905
    assert T.layout_fixed_width(t)
    assert T.layout_leaf_spacing(t)
    placed = T.layout_alt3d(t)
    assert len(placed) == len(t)
    rects = T.treemap_project(t)
    assert rects
