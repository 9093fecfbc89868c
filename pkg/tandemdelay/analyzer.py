# coding: utf-8

"""
This module provides the Analyzer class, which runs the analytic pipeline
for a scenario: kernel, stationary distribution, tagged-task distribution
and delay characteristics.

"""

import logging

from tandemdelay.delay import DelayCharacteristics
from tandemdelay.delay import average_delay, delay_cpd, delay_pmf_violation, delay_std
from tandemdelay.delay import initial_tagged_distribution, prob_q2_full, tail_bounds
from tandemdelay.kernel import build_blocks, build_hat, build_tilde
from tandemdelay.stationary import queue_length_marginals, stationary


logger = logging.getLogger(__name__)


class Analyzer(object):

    """
    Computes the delay characteristics of scenarios.

    Settings passed to the constructor override the scenario's own solver
    settings.  For example--

    >>> from tandemdelay.presets import get_preset
    >>> analyzer = Analyzer(method='direct')
    >>> result = analyzer.analyze(get_preset('case1'))  # doctest: +SKIP
    >>> round(result.violation_at(30), 4)  # doctest: +SKIP
    0.5072

    """

    def __init__(self, method=None, tail_eps=None, n_max=None, check_consistency=True):
        """
        Arguments:

          method: the stationary-solver method, 'direct' or 'mg'.  Defaults
            to the scenario's setting.

          tail_eps: stop the delay recursion once the CPD is within tail_eps
            of 1.  Defaults to the scenario's setting.

          n_max: the largest delay bound the recursion evaluates.  Defaults
            to the scenario's setting.

          check_consistency: whether to raise ConsistencyError when the two
            average-delay computations disagree.

        """
        self.method = method
        self.tail_eps = tail_eps
        self.n_max = n_max
        self.check_consistency = check_consistency

    def _settings(self, config):
        solver = config.solver
        return (solver.method if self.method is None else self.method,
                solver.tail_eps if self.tail_eps is None else self.tail_eps,
                solver.n_max if self.n_max is None else self.n_max)

    def build_kernel(self, config):
        """Return the LevelKernel of a scenario."""
        return build_blocks(config.arrival, config.transmission, config.computation,
                            config.vacation, config.layout())

    def solve(self, config):
        """Return (kernel, StationaryDistribution) for a scenario."""
        method, _, _ = self._settings(config)
        kernel = self.build_kernel(config)
        return kernel, stationary(kernel, method)

    def analyze(self, config):
        """
        Return the DelayCharacteristics of a scenario.

        """
        method, tail_eps, n_max = self._settings(config)
        kernel = self.build_kernel(config)
        x = stationary(kernel, method)
        arrival_rate = config.arrival_rate

        tagged = initial_tagged_distribution(x, build_hat(kernel), arrival_rate)
        cpd = delay_cpd(tagged.z, build_tilde(kernel), tail_eps, n_max)
        pmf, violation = delay_pmf_violation(cpd)
        record = tail_bounds(violation, cpd.tail)

        check = self.check_consistency and record['trusted'] and not cpd.truncated
        d_ave, d_littles = average_delay(pmf, x, arrival_rate, tagged.p_off, check=check)
        if not record['trusted']:
            logger.warning("%s: delay tail %.3g too heavy to trust the moments", config.name,
                           cpd.tail)

        lengths = queue_length_marginals(x)
        diagnostics = {
            'method': x.method,
            'states': kernel.layout.total,
            'stationary': dict(x.diagnostics, residual=x.residual),
            'arrival_rate': arrival_rate,
            'admitted_rate': tagged.admitted,
            'mean_q1': lengths.mean_q1,
            'mean_q2': lengths.mean_q2,
            'tilde_mass_error': cpd.mass_error,
            'average_delay_relative_difference': abs(d_ave - d_littles) / d_littles,
            'truncation': record,
        }
        result = DelayCharacteristics(cpd.cpd, pmf, violation, d_ave, d_littles,
                                      delay_std(pmf, d_ave), tagged.p_off, prob_q2_full(x),
                                      tail=cpd.tail, truncated=cpd.truncated,
                                      slot_ms=config.slot_ms, diagnostics=diagnostics)
        logger.info("%s: %r", config.name, result)
        return result
