"""A small hand-built dynamic network used in docs, demos and tests.

Eleven nodes over three slices. Node ``v1``'s neighborhood runs through
every event kind: at the first interval one of its ego-components is
born, two merge, one expands, one splits and one contracts; at the
second interval a component dies, another is born and a third
contracts.
"""

from .temporal_graph import DynamicNetwork, load_presliced

TOY_PRESLICED = """\
0 v1 v2
0 v2 v3
0 v1 v4
0 v1 v5
0 v5 v6
0 v6 v7
0 v1 v6
0 v1 v7
0 v8 v9
0 v10 v11
1 v1 v2
1 v1 v4
1 v4 v5
1 v1 v5
1 v1 v7
1 v7 v8
1 v1 v8
1 v1 v9
1 v9 v10
1 v1 v10
1 v3 v6
2 v1 v4
2 v4 v5
2 v1 v5
2 v1 v7
2 v1 v9
2 v9 v10
2 v1 v10
2 v1 v11
2 v2 v3
2 v6 v8
"""


def toy_network() -> DynamicNetwork:
    """The 11-node, 3-slice example network (labels v1..v11, ids 0..10)."""
    return load_presliced(TOY_PRESLICED)
