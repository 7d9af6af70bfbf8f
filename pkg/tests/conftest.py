import random

import pytest

from omegacat.cli import random_globset, random_vgraph_json, vgraph_from_json
from omegacat.gcore import GraphObj, SetObj


def mk_graph(objs, homs):
    """Build a small enriched graph over finite sets from literal data."""
    table = {k: SetObj.plain(tuple(v)) for k, v in homs.items()}
    empty = SetObj.plain(())
    return GraphObj(SetObj.plain(tuple(objs)),
                    lambda a, b: table.get((a, b), empty))


@pytest.fixture
def loop_graph():
    return mk_graph(("v",), {("v", "v"): ("e",)})


def seeded_globset(seed, n, max_cells=3):
    return random_globset(random.Random(seed), n, max_cells)


def seeded_vgraph(seed, max_objects=4, max_edges=5):
    return vgraph_from_json(random_vgraph_json(random.Random(seed),
                                               max_objects, max_edges))
