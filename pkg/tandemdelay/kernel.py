# coding: utf-8

"""
Builds the one-step transition kernel of the tandem chain.

The kernel is block-tridiagonal in the queue-1 length i1:

  P = [[M0, M1,   ,   ,    ],
       [M2, M3, M4,   ,    ],
       [  , M5, M3, M4,    ],
       [  ,   , .., .., M4 ],
       [  ,   ,   , M5, M3p]]

Each family (M0, ..., M5, M3p) is an (N2 + 1) x (N2 + 1) grid of sub-blocks
indexed by the queue-2 lengths of the source and the target.  Every
sub-block is a sum of Kronecker products X (x) F where X is one of d0, d1 or
d = d0 + d1 and F is a product of transmission, computation and vacation
factors.  Terms keep X as a tag so that the hat kernel (admissions only) and
the tilde kernel (arrivals censored) come from the same terms:

  tag    P        hat     tilde
  'D0'   d0       0       I
  'D1'   d1       d1      0
  'D'    d0+d1    0       I

"""

import functools
import logging
import os
from collections import namedtuple

import numpy as np

from tandemdelay import defaults
from tandemdelay.common import ConsistencyError, LayoutError
from tandemdelay.layout import IDLE, SERVING, VACATION, PhaseLayout


logger = logging.getLogger(__name__)

FAMILIES = ('M0', 'M1', 'M2', 'M3', 'M3p', 'M4', 'M5')

VIEWS = ('P', 'hat', 'tilde')

D0, D1, D = 'D0', 'D1', 'D'


# A term kron(X, factor) placed at (row, col) inside its sub-block.
Term = namedtuple('Term', ['tag', 'factor', 'row', 'col'])

TaggedKernels = namedtuple('TaggedKernels', ['hat', 'tilde'])


def _kron(*factors):
    return functools.reduce(np.kron, factors, np.ones((1, 1)))


def _row(v):
    return np.asarray(v, dtype=float)[None, :]


def _column(v):
    return np.asarray(v, dtype=float)[:, None]


class _Factors(object):

    """The non-arrival matrices the sub-blocks are made of."""

    def __init__(self, transmission, computation, vacation):
        self.beta1 = _row(transmission.alpha)
        self.s1 = np.asarray(transmission.t)
        self.s10 = _column(transmission.exit_vector)
        self.beta2 = _row(computation.alpha)
        self.s2 = np.asarray(computation.t)
        self.s20 = _column(computation.exit_vector)
        self.v = _row(vacation.alpha)
        self.vt = np.asarray(vacation.t)
        self.v0 = _column(vacation.exit_vector)
        self.one = np.ones((1, 1))

    def queue2(self, i2, c1, c2):
        """
        Return the computation-phase factor of a slot.

        Arguments:

          i2: the queue-2 length at the start of the slot.

          c1: whether a transmission completes (a task joins queue 2).

          c2: whether a computation completes.

        """
        if i2 == 0:
            # A task joining an empty queue 2 starts computing next slot.
            return self.beta2 if c1 else self.one
        if not c2:
            return self.s2
        if i2 - 1 + c1 >= 1:
            return self.s20.dot(self.beta2)
        return self.s20


class _Enumerator(object):

    """
    Enumerates the slot events leaving one sub-block row.

    Within a slot the arrival phase, the server-1 phase (service or
    vacation) and the server-2 phase move independently; the queue lengths
    are then resolved together:

    - a computation completion frees its place in queue 2;
    - a transmission completion moves its task to queue 2;
    - an arrival is admitted iff queue 1, after the transmission
      completion, holds fewer than N1 tasks;
    - a server that finished (or was idle and got work) starts a vacation,
      with phase drawn from v, if queue 2 is full, and otherwise starts a
      service with phase drawn from beta1.

    """

    def __init__(self, layout, factors):
        self.layout = layout
        self.f = factors

    def _server1_next(self, q1, q2, ended):
        """Return (mode, factor) for a server whose period just ended."""
        f = self.f
        if q1 == 0:
            return IDLE, ended
        if q2 == self.layout.N2:
            return VACATION, ended.dot(f.v)
        return SERVING, ended.dot(f.beta1)

    def idle(self, i2):
        """
        Yield (delta_i1, tag, target_i2, target_mode, factor) from (0, i2).

        """
        f = self.f
        for c2 in ([0] if i2 == 0 else [0, 1]):
            q2 = i2 - c2
            q2_factor = f.queue2(i2, 0, c2)
            yield 0, D0, q2, IDLE, q2_factor
            mode, s1_factor = self._server1_next(1, q2, f.one)
            yield 1, D1, q2, mode, _kron(s1_factor, q2_factor)

    def busy(self, i1, i2, mode):
        """
        Yield (delta_i1, tag, target_i2, target_mode, factor) from a source
        at level i1 >= 1 whose server 1 is in the given mode.

        """
        f = self.f
        N1 = self.layout.N1

        if mode == VACATION:
            server1 = [(0, f.vt, False), (0, f.v0, True)]
        else:
            server1 = [(0, f.s1, False), (1, f.s10, True)]
        server2 = [0] if i2 == 0 else [0, 1]

        for c1, s1_factor, ended in server1:
            for c2 in server2:
                q2 = i2 - c2 + c1
                q2_factor = f.queue2(i2, c1, c2)
                admissible = i1 - c1 < N1

                arrivals = [(D0, 0), (D1, 1)] if admissible else [(D, 0)]
                for tag, admitted in arrivals:
                    q1 = i1 - c1 + admitted
                    if ended:
                        target_mode, factor = self._server1_next(q1, q2, s1_factor)
                    else:
                        target_mode, factor = mode, s1_factor
                    yield (q1 - i1, tag, q2, target_mode, _kron(factor, q2_factor))


class LevelKernel(object):

    """
    The block form of a transition kernel of the tandem chain.

    A LevelKernel holds tagged terms and a view, one of 'P', 'hat' and
    'tilde'.  Sub-blocks and the assembled matrix are realized for the
    view on demand and cached.

    """

    def __init__(self, layout, dmap, terms, view='P'):
        if view not in VIEWS:
            raise ValueError("unknown kernel view: %r" % (view, ))
        self.layout = layout
        self.dmap = dmap
        self.terms = terms
        self.view = view
        self._cache = {}

        m = dmap.m
        identity = np.eye(m)
        zero = np.zeros((m, m))
        d = dmap.d0 + dmap.d1
        self._arrival = {
            'P': {D0: dmap.d0, D1: dmap.d1, D: d},
            'hat': {D0: zero, D1: dmap.d1, D: zero},
            'tilde': {D0: identity, D1: zero, D: identity},
        }[view]

    def __repr__(self):
        return "LevelKernel(%r, view=%r)" % (self.layout, self.view)

    def with_view(self, view):
        """Return a kernel sharing these terms, realized for another view."""
        return LevelKernel(self.layout, self.dmap, self.terms, view=view)

    def _levels(self, family):
        """Return a representative (source, target) level pair of a family."""
        return {
            'M0': (0, 0), 'M1': (0, 1), 'M2': (1, 0), 'M3': (1, 1),
            'M3p': (1, 1), 'M4': (1, 1), 'M5': (1, 1),
        }[family]

    def block(self, family, i2, j2):
        """
        Return the realized sub-block of a family from queue-2 length i2 to j2.

        """
        key = ('block', family, i2, j2)
        if key in self._cache:
            return self._cache[key]

        layout = self.layout
        src, dst = self._levels(family)
        block = np.zeros((layout.block_dim(src, i2), layout.block_dim(dst, j2)))
        for term in self.terms[family].get((i2, j2), ()):
            x = self._arrival[term.tag]
            piece = np.kron(x, term.factor)
            block[term.row:term.row + piece.shape[0],
                  term.col:term.col + piece.shape[1]] += piece
        block.setflags(write=False)
        self._cache[key] = block
        return block

    def blocks(self, family):
        """Return the (i2, j2) keys of a family's structurally nonzero sub-blocks."""
        return sorted(self.terms[family])

    def family_matrix(self, family):
        """Return a family assembled as one level-to-level matrix."""
        key = ('family', family)
        if key in self._cache:
            return self._cache[key]

        layout = self.layout
        src, dst = self._levels(family)
        matrix = np.zeros((layout.level_dim(src), layout.level_dim(dst)))
        for i2, j2 in self.blocks(family):
            block = self.block(family, i2, j2)
            row = layout.level_block_offset(src, i2)
            col = layout.level_block_offset(dst, j2)
            matrix[row:row + block.shape[0], col:col + block.shape[1]] = block
        matrix.setflags(write=False)
        self._cache[key] = matrix
        return matrix

    def level_family(self, i1, k1):
        """
        Return the family governing moves from level i1 to level k1, or None.

        """
        N1 = self.layout.N1
        if i1 == 0:
            return {0: 'M0', 1: 'M1'}.get(k1)
        if k1 == i1:
            return 'M3p' if i1 == N1 else 'M3'
        if k1 == i1 + 1 and i1 < N1:
            return 'M4'
        if k1 == i1 - 1:
            return 'M2' if i1 == 1 else 'M5'
        return None

    def assemble(self):
        """Return the kernel as one square matrix over the state space."""
        if 'assembled' in self._cache:
            return self._cache['assembled']

        layout = self.layout
        P = np.zeros((layout.total, layout.total))
        for i1 in range(layout.N1 + 1):
            rows = layout.level_slice(i1)
            for k1 in (i1 - 1, i1, i1 + 1):
                if not 0 <= k1 <= layout.N1:
                    continue
                family = self.level_family(i1, k1)
                if family is not None:
                    P[rows, layout.level_slice(k1)] = self.family_matrix(family)
        P.setflags(write=False)
        self._cache['assembled'] = P
        return P


def _collect(layout, enumerator):
    terms = dict((family, {}) for family in FAMILIES)

    def add(family, i2, source_mode, source_level, delta_target):
        target_delta, tag, j2, target_mode, factor = delta_target
        target_level = 0 if target_mode == IDLE else 1
        term = Term(tag, factor,
                    layout.part_offset(source_level, i2, source_mode),
                    layout.part_offset(target_level, j2, target_mode))
        expected = (_part_dim(layout, source_level, i2, source_mode),
                    _part_dim(layout, target_level, j2, target_mode))
        actual = (factor.shape[0] * layout.m, factor.shape[1] * layout.m)
        if actual != expected:
            raise ConsistencyError("%s[%d, %d] term has shape %s, expected %s" %
                                   (family, i2, j2, actual, expected))
        terms[family].setdefault((i2, j2), []).append(term)

    for i2 in range(layout.N2 + 1):
        for event in enumerator.idle(i2):
            add('M0' if event[0] == 0 else 'M1', i2, IDLE, 0, event)

    def modes(i2):
        return (VACATION, ) if i2 == layout.N2 else (VACATION, SERVING)

    # Level 1 when it lies below N1 gives M3 and M4; its downward moves
    # empty queue 1 and make up M2.  A level above 1 gives M5.
    for i2 in range(layout.N2 + 1):
        for mode in modes(i2):
            for event in enumerator.busy(1, i2, mode):
                if event[0] == -1:
                    add('M2', i2, mode, 1, event)
            if layout.N1 >= 2:
                for event in enumerator.busy(2, i2, mode):
                    if event[0] == -1:
                        add('M5', i2, mode, 1, event)
                for event in enumerator.busy(1, i2, mode):
                    if event[0] == 0:
                        add('M3', i2, mode, 1, event)
                    elif event[0] == 1:
                        add('M4', i2, mode, 1, event)
            for event in enumerator.busy(layout.N1, i2, mode):
                if event[0] == 0:
                    add('M3p', i2, mode, 1, event)

    return dict((family, dict((key, tuple(value)) for key, value in grid.items()))
                for family, grid in terms.items())


def _part_dim(layout, i1, i2, mode):
    if mode == IDLE:
        return layout.block_dim(0, i2)
    if mode == VACATION:
        return layout.vacation_dim(i1, i2)
    return layout.serving_dim(i1, i2)


def check_stochastic(matrix, tol, what, rows=None):
    """
    Raise ConsistencyError unless every (selected) row of matrix sums to 1.

    """
    sums = matrix.sum(axis=1)
    if rows is not None:
        sums = sums[rows]
    deviation = np.abs(sums - 1.0)
    if deviation.size and deviation.max() > tol:
        row = int(np.argmax(deviation))
        raise ConsistencyError("%s is not stochastic: row %d sums to %r" %
                               (what, row, sums[row]),
                               diagnostics={'max_deviation': float(deviation.max())})
    if matrix.size and (matrix.min() < -tol or matrix.max() > 1.0 + tol):
        raise ConsistencyError("%s has entries outside [0, 1]" % what)


def build_blocks(dmap, transmission, computation, vacation, layout):
    """
    Return the LevelKernel of P for validated distributions and a layout.

    Arguments:

      dmap: the DMap of task arrivals.

      transmission, computation, vacation: the DPh of the transmission
        time (beta1, S1), the computation time (beta2, S2) and the vacation
        time (v, V).

      layout: a PhaseLayout whose phase counts match the distributions.

    """
    if not isinstance(layout, PhaseLayout):
        raise TypeError("layout must be a PhaseLayout, got %r" % (layout, ))
    expected = (dmap.m, transmission.k, computation.k, vacation.k)
    actual = (layout.m, layout.n1, layout.n2, layout.l2)
    if expected != actual:
        raise LayoutError("layout phase counts (m, n1, n2, l2) = %s do not match the "
                          "distributions %s" % (actual, expected), path='layout')

    factors = _Factors(transmission, computation, vacation)
    terms = _collect(layout, _Enumerator(layout, factors))
    kernel = LevelKernel(layout, dmap, terms)

    check_stochastic(kernel.assemble(), defaults.KERNEL_TOL, 'P')
    logger.debug("built kernel over %d states (%r)", layout.total, layout)
    return kernel


def assemble(kernel):
    """Return the kernel as one square matrix over the state space."""
    return kernel.assemble()


def build_hat(kernel):
    """
    Return the kernel of the transitions in which a task enters queue 1.

    Only terms carrying d1 alone survive.  On level N1 the terms carrying
    d = d0 + d1 describe rejected or absent arrivals and are dropped.

    """
    return kernel.with_view('hat')


def build_tilde(kernel):
    """
    Return the arrival-censored kernel that follows a tagged task.

    d0 and d become the identity and terms carrying d1 are removed, so
    that later arrivals are not counted and queue 1 never grows.  Level
    (0, 0) is absorbing.

    """
    tilde = kernel.with_view('tilde')
    layout = tilde.layout
    for family in ('M1', 'M4'):
        if tilde.blocks(family) and np.any(tilde.family_matrix(family)):
            raise ConsistencyError("the tilde kernel increases the queue-1 length")
    check_stochastic(tilde.assemble(), defaults.TILDE_TOL, 'tilde kernel')
    absorbing = tilde.block('M0', 0, 0)
    if not np.array_equal(absorbing, np.eye(layout.m)):
        raise ConsistencyError("level (0, 0) of the tilde kernel is not absorbing")
    return tilde


def build_tagged(kernel):
    """Return the TaggedKernels (hat, tilde) of a kernel."""
    return TaggedKernels(build_hat(kernel), build_tilde(kernel))


def dump_kernel_csv(kernel, directory):
    """
    Write the assembled kernel and each nonzero sub-block as CSV files.

    The assembled matrix goes to "<view>.csv" and a sub-block of family M3
    from queue-2 length 4 to 5 to "M3_4_5.csv" (prefixed with the view
    for hat and tilde kernels).  Returns the written paths.

    """
    if not os.path.isdir(directory):
        os.makedirs(directory)

    prefix = '' if kernel.view == 'P' else kernel.view + '_'
    paths = []

    path = os.path.join(directory, '%s.csv' % kernel.view)
    np.savetxt(path, kernel.assemble(), delimiter=',', fmt='%.17g')
    paths.append(path)

    for family in FAMILIES:
        for i2, j2 in kernel.blocks(family):
            block = kernel.block(family, i2, j2)
            if not np.any(block):
                continue
            path = os.path.join(directory, '%s%s_%d_%d.csv' % (prefix, family, i2, j2))
            np.savetxt(path, block, delimiter=',', fmt='%.17g')
            paths.append(path)

    logger.info("wrote %d kernel files to %s", len(paths), directory)
    return paths
