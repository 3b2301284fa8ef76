# -*- coding: utf-8 -*-
""" Exact analysis of mediated and unmediated Bayesian communication. """

__authors__ = 'Parley developers'
__license__ = 'MIT'

import parley.utils
import parley.solvers
import parley.games
import parley.beliefs
import parley.mediators
import parley.conversations
import parley.feasibility
import parley.rationality
import parley.design
import parley.repeated
import parley.documents
import parley.export
import parley.fixtures
