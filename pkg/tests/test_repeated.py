from fractions import Fraction
import numpy as np
import pytest
from parley.conversations import uninformative_conversation
from parley.errors import BudgetExceededError
from parley.fixtures import employer_game, employer_one_round_conversation
from parley.games import single_action_game
from parley.repeated import (
    Punishment, RepeatedSpec, audit_repeated_ir, committed_super_value,
    committed_value, delta_threshold, no_comm_value, quit_ceiling)
from generators import generate_conversation, generate_game

SEED = 3014776590
N_GAME = 30


class TestEmployerValues(object):

    def setup_method(self):
        self.game = employer_game()
        self.protocol = employer_one_round_conversation()

    def test_values(self):
        assert committed_value(self.game, self.protocol) == Fraction(7, 5)
        assert quit_ceiling(self.game, self.protocol) == 2
        assert no_comm_value(self.game) == 1

    def test_thresholds(self):
        assert delta_threshold(self.game, self.protocol) == Fraction(3, 10)
        assert delta_threshold(
            self.game, self.protocol, 'nocomm') == Fraction(3, 5)

    def test_silence_needs_no_patience(self):
        protocol = uninformative_conversation(
            self.game.types_a, self.game.types_b)
        assert delta_threshold(self.game, protocol) == 0
        assert delta_threshold(
            self.game, protocol, Punishment.NO_COMM_FUTURE) == 0


class TestRepeatedAudit(object):

    def setup_method(self):
        self.game = employer_game()
        self.protocol = employer_one_round_conversation()

    def _spec(self, delta, **kwargs):
        return RepeatedSpec(self.game, self.protocol, delta, **kwargs)

    def test_threshold_passes_exactly(self):
        report = audit_repeated_ir(self._spec(Fraction(3, 10)))
        assert report.passed
        assert len(report.comparisons) == 22
        tight = [c for c in report.comparisons if c.lhs == c.rhs]
        assert tight and all(c.lhs == 2 for c in tight
                             if c.context.startswith('copy 1 '))

    def test_patient_bob_stays(self):
        report = audit_repeated_ir(self._spec(Fraction(2, 5)))
        assert report.passed
        first = report.comparisons[0]
        assert first.context == 'copy 1 <root>'
        assert first.lhs == Fraction(7, 3)

    def test_impatient_bob_quits(self):
        report = audit_repeated_ir(self._spec(Fraction(1, 5)))
        assert not report.passed
        violations = [(c.context, c.type_label) for c in report.violations]
        assert ('copy 1 Prog', 'Comm') in violations
        violation = next(c for c in report.violations
                         if c.context == 'copy 1 Prog' and
                         c.type_label == 'Comm')
        assert (violation.lhs, violation.rhs) == (Fraction(7, 4), 2)

    def test_later_copies_scaled(self):
        report = audit_repeated_ir(self._spec(Fraction(2, 5)))
        first = {(c.context[len('copy 1 '):], c.type_label): c
                 for c in report.comparisons if c.context.startswith('copy 1 ')}
        for c in report.comparisons:
            if c.context.startswith('copy 2 '):
                match = first[c.context[len('copy 2 '):], c.type_label]
                assert c.lhs == Fraction(2, 5) * match.lhs
                assert c.rhs == Fraction(2, 5) * match.rhs

    def test_nocomm_punishment(self):
        assert not audit_repeated_ir(
            self._spec(Fraction(2, 5), punishment='nocomm')).passed
        assert audit_repeated_ir(
            self._spec(Fraction(3, 5), punishment='nocomm')).passed

    def test_super_value(self):
        assert committed_super_value(self._spec(Fraction(2, 5))) == Fraction(
            7, 3)
        assert committed_super_value(
            self._spec(Fraction(2, 5), horizon=5)) == Fraction(7, 3)

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            audit_repeated_ir(self._spec(Fraction(1, 2)), budget=3)

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            self._spec(1)
        with pytest.raises(ValueError):
            self._spec(Fraction(-1, 2))
        with pytest.raises(ValueError):
            self._spec(Fraction(1, 2), horizon=0)
        with pytest.raises(ValueError):
            self._spec(Fraction(1, 2), punishment='forever')

    def test_threshold_requires_positive_value(self):
        game = single_action_game(
            ('H', 'L'), ('H', 'L'), (Fraction(1, 2), Fraction(1, 2)),
            (Fraction(1, 2), Fraction(1, 2)), lambda x, y: 1,
            lambda y, x: 0)
        with pytest.raises(ValueError):
            delta_threshold(game, uninformative_conversation(
                game.types_a, game.types_b))


class TestRandomThresholds(object):

    def setup_method(self):
        rng = np.random.RandomState(SEED)
        self.pairs = []
        for _ in range(N_GAME):
            game = generate_game(rng)
            protocol = generate_conversation(
                rng, game.types_a, game.types_b, 1)
            self.pairs.append((game, protocol))

    def test_threshold_separates_audit_outcomes(self):
        for game, protocol in self.pairs:
            if committed_value(game, protocol) <= 0:
                continue
            threshold = delta_threshold(game, protocol)
            assert 0 <= threshold < 1
            spec = RepeatedSpec(game, protocol, threshold)
            assert audit_repeated_ir(spec).passed, (
                f'audit fails at threshold {threshold}.')
            if threshold > 0:
                below = RepeatedSpec(game, protocol, threshold / 2)
                assert not audit_repeated_ir(below).passed, (
                    f'audit passes below threshold {threshold}.')
