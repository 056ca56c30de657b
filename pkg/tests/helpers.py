"""Brute-force oracles shared across test modules.

Everything here is written as plain loops over the defining sums, kept
deliberately independent of the library's contraction paths.
"""

import itertools

import numpy as np


def tau_bruteforce(cores):
    """Ring contraction as the explicit sum over all bond tuples."""
    d = len(cores)
    dims = tuple(c.shape[1] for c in cores)
    ranks = [c.shape[0] for c in cores]
    out = np.zeros(dims)
    for ks in itertools.product(*[range(r) for r in ranks]):
        term = np.array(1.0)
        for i in range(d):
            term = np.multiply.outer(term, cores[i][ks[i], :, ks[(i + 1) % d]])
        out += term
    return out


def chain_bruteforce(chain):
    """Open-chain unfolding as the explicit sum over internal bonds."""
    m_start = chain[0].shape[0]
    m_end = chain[-1].shape[2]
    dims = tuple(c.shape[1] for c in chain)
    internal = [c.shape[0] for c in chain[1:]]
    rows = int(np.prod(dims))
    out = np.zeros((rows, m_start * m_end))
    for ka in range(m_start):
        for kb in range(m_end):
            acc = np.zeros(dims)
            for ks in itertools.product(*[range(r) for r in internal]):
                bonds = (ka,) + ks + (kb,)
                term = np.array(1.0)
                for t, core in enumerate(chain):
                    term = np.multiply.outer(term, core[bonds[t], :, bonds[t + 1]])
                acc += term
            out[:, ka * m_end + kb] = acc.reshape(-1)
    return out


def partial_chain_sum(cores, row, col):
    """Sum of fiber outer products over the internal bonds of an open chain.

    ``cores`` are the first d-1 cores of a ring, ``row``/``col`` the fixed
    0-based outer bond indices.
    """
    length = len(cores)
    dims = tuple(c.shape[1] for c in cores)
    acc = np.zeros(dims)
    internal = [c.shape[0] for c in cores[1:]]
    for ks in itertools.product(*[range(m) for m in internal]):
        bonds = (row,) + ks + (col,)
        term = np.array(1.0)
        for t in range(length):
            term = np.multiply.outer(term, cores[t][bonds[t], :, bonds[t + 1]])
        acc += term
    return acc


def unit_outer(positions, n):
    """Outer product of unit vectors at the given 1-based positions."""
    term = np.array(1.0)
    for j in positions:
        e = np.zeros(n)
        e[j - 1] = 1.0
        term = np.multiply.outer(term, e)
    return term
