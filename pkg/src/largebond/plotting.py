"""Drawing a bond: side vertices colored, crossing edges bold."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from .graph import Bond, Graph  # noqa: E402

SIDE_COLOR = "#e76f51"
OTHER_COLOR = "#8ab17d"


def plot_bond(g: Graph, bond: Bond | None, path, title: str | None = None, seed: int = 0):
    """Write a figure of ``g`` to ``path``; the layout is seeded so reruns match."""
    simple = g.to_networkx()
    pos = nx.spring_layout(simple, seed=seed)
    side = bond.side if bond else frozenset()
    crossing = set(bond.crossing_edges) if bond else set()

    fig, ax = plt.subplots(figsize=(6, 6))
    colors = [SIDE_COLOR if v in side else OTHER_COLOR for v in simple.nodes]
    nx.draw_networkx_nodes(simple, pos, node_color=colors, node_size=320, ax=ax)
    nx.draw_networkx_labels(simple, pos, font_size=8, ax=ax)
    cut_pairs = {(min(u, v), max(u, v)) for i, (u, v, _) in enumerate(g.edges) if i in crossing}
    plain = [e for e in simple.edges if (min(e), max(e)) not in cut_pairs]
    bold = [e for e in simple.edges if (min(e), max(e)) in cut_pairs]
    nx.draw_networkx_edges(simple, pos, edgelist=plain, width=1.0, edge_color="#666666", ax=ax)
    nx.draw_networkx_edges(simple, pos, edgelist=bold, width=3.0, edge_color="#264653", ax=ax)
    if title is None and bond is not None:
        title = f"bond of size {bond.size}"
    if title:
        ax.set_title(title)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
