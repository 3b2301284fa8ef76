"""Export of belief walks and frontiers as SVG figures and CSV tables."""

import csv
import io
import xml.etree.ElementTree as ElementTree
from parley.conversations import history_label
from parley.utils import format_rational

SVG_SIZE = 400
SVG_MARGIN = 50
NODE_RADIUS = 4


def _displayed_nodes(trace):
    """Trace nodes shown in a walk with the parent each is drawn from.

    Moves whose signal was certain leave both beliefs unchanged and are
    folded into their parent.
    """
    shown, anchor = [], {}
    for index, node in enumerate(trace.nodes):
        if node.parent is not None and node.edge_prob == 1:
            anchor[index] = anchor[node.parent]
            continue
        anchor[index] = index
        parent = None if node.parent is None else anchor[node.parent]
        shown.append((index, node, parent))
    return shown


def _check_axes(trace, axes):
    root = trace.nodes[0]
    if len(root.belief_b) != 2 or len(root.belief_a) != 2:
        raise ValueError('Belief walks can only be drawn for binary types.')
    if axes is None:
        return root.belief_b.labels[0], root.belief_a.labels[0]
    label_b, label_a = axes
    if label_b not in root.belief_b.labels:
        raise ValueError(f'Unknown Bob type {label_b!r}.')
    if label_a not in root.belief_a.labels:
        raise ValueError(f'Unknown Alice type {label_a!r}.')
    return label_b, label_a


def _coordinate(value):
    return f'{float(value):.2f}'


def export_belief_walk_svg(trace, axes=None):
    """Draw the belief walk of a conversation.

    Each displayed history is a point at `(q_B(y), q_A(x))` for the axis
    types `(y, x)`, and each move an arrow labelled with the probability of
    the signal sent.

    Args:
        trace (DimartingaleTrace): Belief process of the conversation.
        axes (Tuple[str, str]): Bob type and Alice type whose probabilities
            give the horizontal and vertical coordinates; defaults to the
            first type of each.

    Returns:
        str: SVG document text, identical for identical inputs.

    Raises:
        `ValueError` if either type space is not binary.
    """
    label_b, label_a = _check_axes(trace, axes)
    scale = SVG_SIZE - 2 * SVG_MARGIN

    def position(node):
        return (SVG_MARGIN + node.belief_b[label_b] * scale,
                SVG_SIZE - SVG_MARGIN - node.belief_a[label_a] * scale)

    svg = ElementTree.Element('svg', {
        'xmlns': 'http://www.w3.org/2000/svg',
        'width': str(SVG_SIZE), 'height': str(SVG_SIZE),
        'viewBox': f'0 0 {SVG_SIZE} {SVG_SIZE}'})
    defs = ElementTree.SubElement(svg, 'defs')
    marker = ElementTree.SubElement(defs, 'marker', {
        'id': 'arrow', 'markerWidth': '8', 'markerHeight': '8',
        'refX': '8', 'refY': '4', 'orient': 'auto'})
    ElementTree.SubElement(marker, 'path', {'d': 'M0,0 L8,4 L0,8 z'})
    low, high = SVG_MARGIN, SVG_SIZE - SVG_MARGIN
    ElementTree.SubElement(svg, 'rect', {
        'x': str(low), 'y': str(low), 'width': str(scale),
        'height': str(scale), 'fill': 'none', 'stroke': 'grey'})
    x_label = ElementTree.SubElement(svg, 'text', {
        'x': str(SVG_SIZE // 2), 'y': str(SVG_SIZE - SVG_MARGIN // 3),
        'text-anchor': 'middle'})
    x_label.text = f'q_B({label_b})'
    y_label = ElementTree.SubElement(svg, 'text', {
        'x': str(SVG_MARGIN // 3), 'y': str(SVG_SIZE // 2),
        'text-anchor': 'middle'})
    y_label.text = f'q_A({label_a})'
    for tick, text in ((low, '0'), (high, '1')):
        ElementTree.SubElement(svg, 'text', {
            'x': str(tick), 'y': str(high + 15),
            'text-anchor': 'middle'}).text = text
        ElementTree.SubElement(svg, 'text', {
            'x': str(low - 10), 'y': str(SVG_SIZE - tick),
            'text-anchor': 'end'}).text = text
    shown = _displayed_nodes(trace)
    by_index = {index: node for index, node, _ in shown}
    for index, node, parent in shown:
        if parent is None:
            continue
        x0, y0 = position(by_index[parent])
        x1, y1 = position(node)
        ElementTree.SubElement(svg, 'line', {
            'x1': _coordinate(x0), 'y1': _coordinate(y0),
            'x2': _coordinate(x1), 'y2': _coordinate(y1),
            'stroke': 'black', 'marker-end': 'url(#arrow)'})
        label = ElementTree.SubElement(svg, 'text', {
            'x': _coordinate((x0 + x1) / 2), 'y': _coordinate((y0 + y1) / 2),
            'font-size': '10', 'class': 'edge-prob'})
        label.text = str(node.edge_prob)
    for index, node, _ in shown:
        x, y = position(node)
        circle = ElementTree.SubElement(svg, 'circle', {
            'cx': _coordinate(x), 'cy': _coordinate(y),
            'r': str(NODE_RADIUS), 'class': 'belief-node'})
        title = ElementTree.SubElement(circle, 'title')
        title.text = history_label(node.history) or '<root>'
    return ElementTree.tostring(svg, encoding='unicode') + '\n'


def _belief_text(belief):
    return ' '.join(format_rational(w) for w in belief.weights)


def export_trace_csv(trace):
    """Tabulate the nodes of a belief trace, one row per history."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(
        ['history', 'parent', 'mover', 'prob', 'edge_prob', 'belief_a',
         'belief_b'])
    for node in trace.nodes:
        writer.writerow([
            history_label(node.history),
            '' if node.parent is None else history_label(
                trace.nodes[node.parent].history),
            node.mover or '', format_rational(node.prob),
            format_rational(node.edge_prob), _belief_text(node.belief_a),
            _belief_text(node.belief_b)])
    return buffer.getvalue()


def export_frontier_csv(points):
    """Tabulate Pareto frontier points `(λ, E[u_A], E[u_B])`."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['weight', 'utility_a', 'utility_b'])
    for weight, utility_a, utility_b in points:
        writer.writerow([format_rational(weight), format_rational(utility_a),
                         format_rational(utility_b)])
    return buffer.getvalue()
