"""DOT rendering of tableau graphs and trace graphs, plus the plain-text
model format.  Output is deterministic: nodes in creation order, formulas
in intern order."""

from __future__ import annotations

from .consistency import TraceGraph, build_trace_graph, marked_nodes
from .semantics import ModelGraph
from .syntax import format_formula, format_program, sort_formulas
from .tableau import NodeType, Tableau


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(tab: Tableau) -> str:
    lines = ["digraph tableau {", "  node [fontname=monospace];"]
    for node in tab.live_nodes():
        shape = "doubleoctagon" if node.type is NodeType.STATE else "box"
        rule = node.expanded_by.value if node.expanded_by else "-"
        rows = [f"({node.uid}) {rule}", node.status.value]
        rows.append(", ".join(format_formula(f) for f in sort_formulas(node.label)) or "{}")
        if node.rformulas:
            rows.append("R: " + ", ".join(format_formula(f) for f in sort_formulas(node.rformulas)))
        if node.dformulas:
            rows.append("D: " + ", ".join(format_formula(f) for f in sort_formulas(node.dformulas)))
        if node.formula_sc is not None:
            rows.append("SC: " + format_formula(node.formula_sc))
        label = _escape("\\n".join(rows))
        lines.append(f'  n{node.uid} [shape={shape}, label="{label}"];')
    for node in tab.live_nodes():
        for uid in node.succs:
            succ = tab.nodes.get(uid)
            if succ is None:
                continue
            attr = ""
            if succ.ce_label is not None and node.type is NodeType.STATE:
                attr = f' [label="{_escape(format_formula(succ.ce_label))}"]'
            lines.append(f"  n{node.uid} -> n{uid}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_trace_dot(tab: Tableau, tg: TraceGraph | None = None) -> str:
    if tg is None:
        tg = build_trace_graph(tab, marked_nodes(tab))
    lines = ["digraph traces {", "  node [fontname=monospace];"]
    nodes = sorted(tg.all_nodes(), key=lambda t: (t[0], t[1].uid))
    names = {t: f"t{i}" for i, t in enumerate(nodes)}
    for t in nodes:
        uid, f = t
        shape = "doublecircle" if t in tg.ends else "ellipse"
        label = _escape(f"({uid}, {format_formula(f)})")
        lines.append(f'  {names[t]} [shape={shape}, label="{label}"];')
    for t in nodes:
        for s in tg.edges.get(t, ()):
            lines.append(f"  {names[t]} -> {names[s]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_model_graph(mg: ModelGraph) -> str:
    """``world w0 {p, q}`` and ``edge w0 -s-> w1`` lines, in stable order."""
    lines = []
    for i, content in enumerate(mg.worlds):
        props = sorted(f.args[0] for f in content if f.kind == "prop")
        lines.append(f"world w{i} {{{', '.join(props)}}}")
    for letter in sorted(mg.edges, key=lambda p: p.uid):
        for x, y in sorted(mg.edges[letter]):
            lines.append(f"edge w{x} -{format_program(letter)}-> w{y}")
    return "\n".join(lines) + "\n"
