import csv
import io
import xml.etree.ElementTree as ElementTree
import pytest
from parley.beliefs import Belief
from parley.conversations import dimartingale_audit, uninformative_conversation
from parley.design import pareto_frontier
from parley.export import (
    export_belief_walk_svg, export_frontier_csv, export_trace_csv)
from parley.fixtures import HL, employer_game, two_way_conversation, \
    uniform_priors

SVG = '{http://www.w3.org/2000/svg}'


def _two_way_trace():
    prior_a, prior_b = uniform_priors()
    return dimartingale_audit(two_way_conversation(), prior_a, prior_b)


def _parse(text):
    return ElementTree.fromstring(text)


class TestBeliefWalkSvg(object):

    def test_nodes_and_edges(self):
        root = _parse(export_belief_walk_svg(_two_way_trace()))
        circles = root.findall(f'{SVG}circle')
        assert len(circles) == 9
        titles = [c.find(f'{SVG}title').text for c in circles]
        assert titles[0] == '<root>'
        assert 'up;right;H' in titles and 'up;right;L' in titles
        assert all(c.get('class') == 'belief-node' for c in circles)
        labels = [t.text for t in root.findall(f'{SVG}text')
                  if t.get('class') == 'edge-prob']
        assert sorted(labels) == sorted(
            ['1/2', '1/2', '1/3', '2/3', '2/3', '1/3', '3/4', '1/4'])
        assert len(root.findall(f'{SVG}line')) == 8

    def test_root_at_prior(self):
        root = _parse(export_belief_walk_svg(_two_way_trace()))
        first = root.findall(f'{SVG}circle')[0]
        assert (first.get('cx'), first.get('cy')) == ('200.00', '200.00')

    def test_axes(self):
        trace = _two_way_trace()
        default = export_belief_walk_svg(trace)
        assert export_belief_walk_svg(trace, ('H', 'H')) == default
        assert export_belief_walk_svg(trace, ('L', 'H')) != default
        with pytest.raises(ValueError):
            export_belief_walk_svg(trace, ('M', 'H'))

    def test_deterministic(self):
        assert export_belief_walk_svg(
            _two_way_trace()) == export_belief_walk_svg(_two_way_trace())

    def test_silent_conversation(self):
        prior_a, prior_b = uniform_priors()
        trace = dimartingale_audit(
            uninformative_conversation(HL, HL), prior_a, prior_b)
        root = _parse(export_belief_walk_svg(trace))
        assert len(root.findall(f'{SVG}circle')) == 1
        assert root.findall(f'{SVG}line') == []

    def test_non_binary_types(self):
        types = ('a', 'b', 'c')
        trace = dimartingale_audit(
            uninformative_conversation(types, HL), Belief.uniform(types),
            Belief.uniform(HL))
        with pytest.raises(ValueError):
            export_belief_walk_svg(trace)


class TestCsv(object):

    def test_trace_table(self):
        trace = _two_way_trace()
        rows = list(csv.reader(io.StringIO(export_trace_csv(trace))))
        assert rows[0] == ['history', 'parent', 'mover', 'prob', 'edge_prob',
                           'belief_a', 'belief_b']
        assert len(rows) == len(trace.nodes) + 1
        assert rows[1] == ['', '', '', '1/1', '1/1', '1/2 1/2', '1/2 1/2']
        up = next(row for row in rows if row[0] == 'up')
        assert up == ['up', '', 'A', '1/2', '1/2', '3/4 1/4', '1/2 1/2']

    def test_frontier_table(self):
        points = pareto_frontier(employer_game(), 'interim', [0, 1])
        assert export_frontier_csv(points) == (
            'weight,utility_a,utility_b\n'
            '0/1,1/1,9/5\n'
            '1/1,16/5,1/1\n')
