# coding: utf-8

"""
Exposes the PhaseLayout class, which lays out the state space of the
tandem chain and maps states to flat indices and back.

A state is a level (i1, i2), the queue lengths of the transmission and the
computation queue, plus a tuple of phases.  Within a level the states are
grouped by the mode of server 1:

  level (0, 0):          (s,)               server 1 idle, queue 2 empty
  level (0, i2):         (s, j2)            server 1 idle
  level (i1, 0):         (s, j) then (s, j1)        vacation, then serving
  level (i1, i2 < N2):   (s, j, j2) then (s, j1, j2)
  level (i1, N2):        (s, j, j2)         vacation only

Here s is the arrival phase, j the vacation phase, j1 the transmission phase
and j2 the computation phase.  Tuples are ordered lexicographically, i.e.
the arrival phase varies slowest and the computation phase fastest, which
is the factor order of the Kronecker products the kernel is built from.

"""

import bisect
from collections import namedtuple

from tandemdelay.common import LayoutError, StateIndexError


IDLE = 'idle'
VACATION = 'vacation'
SERVING = 'serving'


State = namedtuple('State', ['i1', 'i2', 'mode', 'phases'])


def _check_count(value, name):
    if int(value) != value or value < 1:
        raise LayoutError("%s must be an integer >= 1, got %r" % (name, value), path=name)
    return int(value)


class PhaseLayout(object):

    """
    The dimensions and flat indexing of the state space.

    Instances are immutable after construction.

    """

    def __init__(self, m, n1, n2, l2, N1, N2):
        """
        Arguments:

          m, n1, n2, l2: the numbers of arrival, transmission, computation
            and vacation phases.

          N1, N2: the buffer sizes of queue 1 and queue 2 in tasks.  The
            layout requires N1 < N2.

        """
        self.m = _check_count(m, 'arrival.m')
        self.n1 = _check_count(n1, 'transmission.n1')
        self.n2 = _check_count(n2, 'computation.n2')
        self.l2 = _check_count(l2, 'vacation.l2')
        self.N1 = _check_count(N1, 'buffers.n1')
        self.N2 = _check_count(N2, 'buffers.n2')

        if self.N1 >= self.N2:
            raise LayoutError("buffer sizes must satisfy n1 < n2, got n1=%d, n2=%d" %
                              (self.N1, self.N2), path='buffers')

        m, n1, n2, l2 = self.m, self.n1, self.n2, self.l2
        self.tau1 = m * l2 + m * n1
        self.tau2 = m * l2 * n2
        self.tau3 = m * l2
        self.tau4 = m * n2
        self.tau5 = m * n1 * n2

        # Flattened (i1, i2) block start offsets, in i1-major order.
        offsets = []
        total = 0
        for i1 in range(self.N1 + 1):
            for i2 in range(self.N2 + 1):
                offsets.append(total)
                total += self.block_dim(i1, i2)
        self._offsets = tuple(offsets)
        self.total = total

    def __repr__(self):
        return ("PhaseLayout(m=%d, n1=%d, n2=%d, l2=%d, N1=%d, N2=%d)" %
                (self.m, self.n1, self.n2, self.l2, self.N1, self.N2))

    def __eq__(self, other):
        return isinstance(other, PhaseLayout) and self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (self.m, self.n1, self.n2, self.l2, self.N1, self.N2)

    def _check_level(self, i1, i2):
        if not (0 <= i1 <= self.N1 and 0 <= i2 <= self.N2):
            raise StateIndexError("level (%r, %r) outside 0..%d x 0..%d" %
                                  (i1, i2, self.N1, self.N2))

    def vacation_dim(self, i1, i2):
        """Return the number of vacation states in block (i1, i2)."""
        self._check_level(i1, i2)
        if i1 == 0:
            return 0
        return self.tau3 if i2 == 0 else self.tau2

    def serving_dim(self, i1, i2):
        """Return the number of serving states in block (i1, i2)."""
        self._check_level(i1, i2)
        if i1 == 0 or i2 == self.N2:
            return 0
        return self.m * self.n1 if i2 == 0 else self.tau5

    def block_dim(self, i1, i2):
        """Return the number of states with queue lengths (i1, i2)."""
        self._check_level(i1, i2)
        if i1 == 0:
            return self.m if i2 == 0 else self.tau4
        return self.vacation_dim(i1, i2) + self.serving_dim(i1, i2)

    def part_offset(self, i1, i2, mode):
        """
        Return the offset of a server-1 mode's states within block (i1, i2).

        """
        if mode == SERVING:
            return self.vacation_dim(i1, i2)
        return 0

    def offset(self, i1, i2):
        """Return the flat index of the first state of block (i1, i2)."""
        self._check_level(i1, i2)
        return self._offsets[i1 * (self.N2 + 1) + i2]

    def block_slice(self, i1, i2):
        start = self.offset(i1, i2)
        return slice(start, start + self.block_dim(i1, i2))

    def level_dim(self, i1):
        """Return the number of states with i1 tasks in queue 1."""
        return sum(self.block_dim(i1, i2) for i2 in range(self.N2 + 1))

    def level_slice(self, i1):
        start = self.offset(i1, 0)
        return slice(start, start + self.level_dim(i1))

    def level_block_offset(self, i1, i2):
        """Return the offset of block (i1, i2) within level i1."""
        return self.offset(i1, i2) - self.offset(i1, 0)

    def phase_counts(self, i1, i2, mode):
        """Return the cardinality of each phase in a state's phase tuple."""
        if i1 == 0:
            if mode != IDLE:
                raise StateIndexError("server 1 is idle whenever queue 1 is empty")
            return (self.m, ) if i2 == 0 else (self.m, self.n2)
        if mode == VACATION:
            counts = (self.m, self.l2)
        elif mode == SERVING:
            if i2 == self.N2:
                raise StateIndexError("server 1 cannot serve while queue 2 is full")
            counts = (self.m, self.n1)
        else:
            raise StateIndexError("server 1 cannot be idle with %d tasks in queue 1" % i1)
        if i2 > 0:
            counts += (self.n2, )
        return counts

    def index(self, state):
        """
        Return the flat index of a State.

        Raises StateIndexError if the state lies outside the state space.

        """
        i1, i2, mode, phases = state
        self._check_level(i1, i2)
        counts = self.phase_counts(i1, i2, mode)
        phases = tuple(phases)
        if len(phases) != len(counts):
            raise StateIndexError("expected %d phases for %s at (%d, %d), got %r" %
                                  (len(counts), mode, i1, i2, phases))
        local = 0
        for phase, count in zip(phases, counts):
            if not 0 <= phase < count:
                raise StateIndexError("phase %r out of range in %r" % (phase, state))
            local = local * count + phase
        return self.offset(i1, i2) + self.part_offset(i1, i2, mode) + local

    def state(self, index):
        """Return the State at a flat index, the inverse of index()."""
        if not 0 <= index < self.total:
            raise StateIndexError("index %r outside 0..%d" % (index, self.total - 1))
        block = bisect.bisect_right(self._offsets, index) - 1
        i1, i2 = divmod(block, self.N2 + 1)
        local = index - self._offsets[block]

        if i1 == 0:
            mode = IDLE
        elif local < self.vacation_dim(i1, i2):
            mode = VACATION
        else:
            mode = SERVING
            local -= self.vacation_dim(i1, i2)

        phases = []
        for count in reversed(self.phase_counts(i1, i2, mode)):
            local, phase = divmod(local, count)
            phases.append(phase)
        return State(i1, i2, mode, tuple(reversed(phases)))

    def states(self):
        """Yield every State in flat-index order."""
        for index in range(self.total):
            yield self.state(index)


def build_layout(m, n1, n2, l2, N1, N2):
    """
    Return the PhaseLayout for the given phase counts and buffer sizes.

    >>> build_layout(1, 1, 1, 1, N1=1, N2=2).total
    8

    """
    return PhaseLayout(m, n1, n2, l2, N1, N2)


def flat_index(layout, i1, i2, phases, mode=None):
    """
    Return the flat index of a state given by its parts.

    The mode defaults to idle on level i1 = 0 and is required otherwise.

    """
    if mode is None:
        if i1 != 0:
            raise StateIndexError("the server-1 mode is required when i1 > 0")
        mode = IDLE
    return layout.index(State(i1, i2, mode, tuple(phases)))


def state_at(layout, index):
    """Return the State at a flat index."""
    return layout.state(index)
