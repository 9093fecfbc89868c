# coding: utf-8

"""
Computes the stationary distribution of the tandem chain.

Two methods are offered.  The direct method solves x (P - I) = 0, x e = 1
by dense LU and serves as the reference.  The matrix-geometric method
computes the rate matrix R of the level process by successive
substitution.  Because the level process stops at N1, the levels next to
the top follow their own rates, obtained by recursion down from the top
level until they meet R.  The two boundary levels are then solved by
Jacobi iteration and the remaining levels expanded with the rates.  The
matrix-geometric result records its distance to the direct solution.

"""

import logging
from collections import namedtuple

import numpy as np
from scipy import linalg

from tandemdelay import defaults
from tandemdelay.common import SolverError, SolverMethod


logger = logging.getLogger(__name__)


QueueLengths = namedtuple('QueueLengths', ['q1', 'q2', 'mean_q1', 'mean_q2'])


class RMatrix(object):

    """The rate matrix R with its convergence record."""

    def __init__(self, R, iterations, residual):
        self.R = R
        self.iterations = iterations
        self.residual = residual

    def __repr__(self):
        return "RMatrix(dim=%d, iterations=%d, residual=%.3g)" % (
            self.R.shape[0], self.iterations, self.residual)

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(linalg.eigvals(self.R)))) if self.R.size else 0.0


class StationaryDistribution(object):

    """
    A stationary probability vector over the state space.

    Arguments:

      x: the probability vector, indexed by the layout's flat index.

      layout: the PhaseLayout of the chain.

      method: the method tag, 'direct' or 'mg'.

      residual: the sup norm of x P - x.

      diagnostics: a dict of solver details (iterations, fallbacks, ...).

    """

    def __init__(self, x, layout, method, residual=None, diagnostics=None):
        x = np.array(x, dtype=float)
        x.setflags(write=False)
        self.x = x
        self.layout = layout
        self.method = method
        self.residual = residual
        self.diagnostics = diagnostics if diagnostics is not None else {}

    def __repr__(self):
        return "StationaryDistribution(method=%r, residual=%r)" % (self.method, self.residual)

    def level(self, i1):
        """Return x_{i1}, the components with i1 tasks in queue 1."""
        return self.x[self.layout.level_slice(i1)]

    def block(self, i1, i2):
        """Return x_{i1,i2}."""
        return self.x[self.layout.block_slice(i1, i2)]

    def mass(self, i1, i2):
        """Return x_{i1,i2} e."""
        return float(self.block(i1, i2).sum())


def _clamp(x, what):
    low = x.min()
    if low < -defaults.NEGATIVE_CLAMP:
        raise SolverError("%s has a negative component %r" % (what, low),
                          diagnostics={'min_component': float(low)})
    x = np.clip(x, 0.0, None)
    total = x.sum()
    if not total > 0:
        raise SolverError("%s has no positive mass" % what)
    return x / total


def residual_norm(x, P):
    """Return the sup norm of x P - x."""
    return float(np.max(np.abs(x.dot(P) - x)))


def solve_direct(P, layout=None):
    """
    Solve x (P - I) = 0 with x e = 1 by dense LU.

    The last column of P - I is replaced by ones, which turns the rank
    deficient system into a regular one for an irreducible chain.

    """
    n = P.shape[0]
    A = P - np.eye(n)
    A[:, -1] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0

    lu, piv = linalg.lu_factor(A.T, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.size and pivots.min() <= np.finfo(float).eps * max(pivots.max(), 1.0):
        raise SolverError("x (P - I) = 0 is singular beyond rank one; is the chain "
                          "irreducible?", diagnostics={'min_pivot': float(pivots.min())})
    x = _clamp(linalg.lu_solve((lu, piv), rhs), 'direct solution')
    residual = residual_norm(x, P)
    logger.debug("direct solve over %d states: residual %.3g", n, residual)
    return StationaryDistribution(x, layout, SolverMethod.direct, residual=residual,
                                  diagnostics={'residual': residual})


def compute_R(m3, m4, m5, tol=None, max_iter=None):
    """
    Return the minimal nonnegative solution of R = M4 + R M3 + R^2 M5.

    The iteration starts from R = 0 and stops when the largest entrywise
    change is below tol.

    """
    if tol is None:
        tol = defaults.R_TOL
    if max_iter is None:
        max_iter = defaults.R_MAX_ITER

    R = np.zeros_like(m4)
    change = np.inf
    for iteration in range(1, max_iter + 1):
        R_next = m4 + R.dot(m3) + R.dot(R).dot(m5)
        change = np.max(np.abs(R_next - R)) if R.size else 0.0
        R = R_next
        if change < tol:
            break
    else:
        raise SolverError("R did not converge in %d iterations" % max_iter,
                          diagnostics={'iterations': max_iter, 'last_change': float(change)})

    residual = float(np.max(np.abs(m4 + R.dot(m3) + R.dot(R).dot(m5) - R))) if R.size else 0.0
    logger.debug("R converged after %d iterations, residual %.3g", iteration, residual)
    return RMatrix(R, iteration, residual)


def level_rates(R, m3, m4, m5, m3p, N1, tol=None):
    """
    Return the rate matrices [R_2, ..., R_N1] with x_{i1} = x_{i1 - 1} R_{i1}.

    The top rate is M4 (I - M3p)^-1 and each lower one is
    M4 (I - M3 - R_{i1 + 1} M5)^-1.  Once a rate is within tol of R the
    remaining lower levels use R itself, since R is the fixed point of the
    same recursion.

    """
    if tol is None:
        tol = defaults.LEVEL_RATE_TOL
    R = R.R if isinstance(R, RMatrix) else R
    eye = np.eye(m3.shape[0])

    try:
        rate = linalg.solve((np.eye(m3p.shape[0]) - m3p).T, m4.T).T
        rates = [rate]
        for _ in range(N1 - 1, 1, -1):
            if np.max(np.abs(rate - R)) < tol:
                rate = R
            else:
                rate = linalg.solve((eye - m3 - rate.dot(m5)).T, m4.T).T
            rates.append(rate)
    except linalg.LinAlgError as err:
        raise SolverError("a level rate is singular: %s" % err)
    rates.reverse()
    return rates


def solve_boundary_jacobi(m0, m1, m2, m3, m5, R, tol=None, max_iter=None, window=None):
    """
    Solve (x0, x1) B = (x0, x1) for B = [[M0, M1], [M2, M3 + R M5]].

    R is the rate into level 2.  With R_2 of level_rates, B is the chain
    watched only on levels 0 and 1, hence stochastic.  Each sweep sets
    component j to the mass flowing into it from the other components
    divided by 1 - B_jj and renormalizes.  Returns (x0, x1, info) with x0,
    x1 scaled so that their total is 1.

    """
    if tol is None:
        tol = defaults.JACOBI_TOL
    if max_iter is None:
        max_iter = defaults.JACOBI_MAX_ITER
    if window is None:
        window = defaults.JACOBI_DIVERGENCE_WINDOW

    R = R.R if isinstance(R, RMatrix) else R
    B = np.block([[m0, m1], [m2, m3 + R.dot(m5)]])
    n0 = m0.shape[0]
    diagonal = np.diag(B).copy()
    keep = 1.0 - diagonal
    if (keep <= 0).any():
        raise SolverError("the boundary system has an absorbing state; use the direct method")
    off = B - np.diag(diagonal)

    x = np.full(B.shape[0], 1.0 / B.shape[0])
    residual = np.inf
    growing = 0
    for iteration in range(1, max_iter + 1):
        x_next = x.dot(off) / keep
        x_next /= x_next.sum()
        last, residual = residual, float(np.max(np.abs(x_next.dot(B) - x_next)))
        x = x_next
        if residual < tol:
            break
        growing = growing + 1 if residual > last else 0
        if growing >= window:
            raise SolverError("Jacobi iteration diverges; use the direct method",
                              diagnostics={'iterations': iteration, 'residual': residual})
    else:
        raise SolverError("Jacobi iteration did not converge in %d iterations" % max_iter,
                          diagnostics={'iterations': max_iter, 'residual': residual})

    logger.debug("boundary Jacobi converged after %d iterations", iteration)
    return x[:n0], x[n0:], {'iterations': iteration, 'residual': residual}


def expand_levels(x0, x1, R, m4, m3p, layout, rates=None):
    """
    Return the StationaryDistribution built from the boundary levels.

    Arguments:

      rates: the list [R_2, ..., R_N1] of level_rates.  Without it the
        levels 2 .. N1 - 1 follow x_{i1} = x_{i1 - 1} R and the top level
        x_{N1} = x_{N1 - 1} M4 (I - M3p)^-1.

    The result is normalized.

    """
    R = R.R if isinstance(R, RMatrix) else R
    if rates is None:
        try:
            top = linalg.solve((np.eye(m3p.shape[0]) - m3p).T, m4.T).T
        except linalg.LinAlgError as err:
            raise SolverError("I - M3p is singular: %s" % err)
        rates = [R] * (layout.N1 - 2) + [top]

    levels = [np.asarray(x0), np.asarray(x1)]
    for rate in rates:
        levels.append(levels[-1].dot(rate))

    x = _clamp(np.concatenate(levels), 'matrix-geometric solution')
    return StationaryDistribution(x, layout, SolverMethod.matrix_geometric)


def solve_matrix_geometric(kernel):
    """Return the matrix-geometric StationaryDistribution of a LevelKernel."""
    layout = kernel.layout
    f = kernel.family_matrix
    r = compute_R(f('M3'), f('M4'), f('M5'))
    rates = level_rates(r, f('M3'), f('M4'), f('M5'), f('M3p'), layout.N1)
    x0, x1, info = solve_boundary_jacobi(f('M0'), f('M1'), f('M2'), f('M3'), f('M5'), rates[0])
    result = expand_levels(x0, x1, r, f('M4'), f('M3p'), layout, rates=rates)
    result.diagnostics.update({
        'r_iterations': r.iterations,
        'r_residual': r.residual,
        'r_spectral_radius': r.spectral_radius,
        'corrected_levels': sum(1 for rate in rates if rate is not r.R),
        'rate_correction': float(np.max(np.abs(rates[0] - r.R))),
        'jacobi_iterations': info['iterations'],
        'jacobi_residual': info['residual'],
    })
    return result


def stationary(kernel, method=None):
    """
    Return the StationaryDistribution of a LevelKernel.

    Arguments:

      kernel: the LevelKernel of P.

      method: 'direct' or 'mg'.  Defaults to the package default.  The
        matrix-geometric method needs at least three levels (N1 >= 3) and
        falls back to the direct method otherwise or on failure; the
        fallback is logged and recorded in the diagnostics.

    """
    if method is None:
        method = defaults.METHOD
    if method not in SolverMethod.values():
        raise ValueError("unknown solver method: %r" % (method, ))

    P = kernel.assemble()
    layout = kernel.layout
    direct = solve_direct(P, layout)
    if method == SolverMethod.direct:
        return direct

    if layout.N1 < 3:
        logger.info("matrix-geometric method needs N1 >= 3 (N1=%d); using direct", layout.N1)
        direct.diagnostics['fallback'] = 'N1 < 3'
        return direct

    try:
        result = solve_matrix_geometric(kernel)
    except SolverError as err:
        logger.warning("matrix-geometric method failed (%s); using direct", err)
        direct.diagnostics['fallback'] = str(err)
        return direct

    result.residual = residual_norm(result.x, P)
    difference = float(np.max(np.abs(result.x - direct.x)))
    result.diagnostics.update({'residual': result.residual, 'max_abs_difference': difference})
    logger.info("matrix-geometric solution: residual %.3g, max difference to direct %.3g",
                result.residual, difference)
    return result


def queue_length_marginals(x, layout=None):
    """
    Return the stationary QueueLengths of queue 1 and queue 2.

    Arguments:

      x: a StationaryDistribution, or a probability vector with a layout.

    """
    if isinstance(x, StationaryDistribution):
        layout = x.layout
        x = x.x
    q1 = np.zeros(layout.N1 + 1)
    q2 = np.zeros(layout.N2 + 1)
    for i1 in range(layout.N1 + 1):
        for i2 in range(layout.N2 + 1):
            mass = x[layout.block_slice(i1, i2)].sum()
            q1[i1] += mass
            q2[i2] += mass
    mean_q1 = float(np.arange(layout.N1 + 1).dot(q1))
    mean_q2 = float(np.arange(layout.N2 + 1).dot(q2))
    return QueueLengths(q1, q2, mean_q1, mean_q2)


def mean_in_system(x, layout=None):
    """Return the mean number of tasks in both queues, sum (i1 + i2) x_{i1,i2} e."""
    lengths = queue_length_marginals(x, layout)
    return lengths.mean_q1 + lengths.mean_q2
