"""Shared instance builders for the test suite."""

from fractions import Fraction

from prsampling.model import Instance, make_event, uniform_variable, VariableSpec


def clause_instance(clauses, num_vars):
    """Uniform binary instance with one event per clause (DIMACS-style signs)."""
    variables = tuple(uniform_variable(i, 2) for i in range(num_vars))
    events = []
    for eid, clause in enumerate(clauses):
        vbl = [abs(l) - 1 for l in clause]
        tup = [0 if l > 0 else 1 for l in clause]
        events.append(make_event(eid, vbl, [tup]))
    return Instance(variables, tuple(events))


def hardcore_instance(edges, num_vertices, lam=Fraction(1)):
    """One occupied-occupied event per edge; occupation probability lam/(1+lam)."""
    occ = Fraction(lam) / (1 + Fraction(lam))
    variables = tuple(
        VariableSpec(i, 2, (1 - occ, occ)) for i in range(num_vertices)
    )
    events = tuple(
        make_event(eid, (u, v), [(1, 1)]) for eid, (u, v) in enumerate(edges)
    )
    return Instance(variables, events)
