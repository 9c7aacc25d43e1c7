# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************


class ElastoslabError(Exception):
    """
    Base class of every error raised by elastoslab.
    """


class SingularMap(ElastoslabError):
    pass


class KernelUnresolved(ElastoslabError, ValueError):
    pass


class NotSPD(ElastoslabError):
    pass


class NoConvergence(ElastoslabError):
    def __init__(self, message, residual_norm=None, iterations=None):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations


class InvalidRecipe(ElastoslabError, ValueError):
    pass


class StabilityViolation(ElastoslabError):
    """
    An initial datum fails the stability condition assigned to a face.
    """

    def __init__(self, face, rt_margin, nc_margin, regime=None):
        super().__init__(
            "stability violated on %s face (%s): rt_margin=%.6g, nc_margin=%.6g"
            % (face, regime, rt_margin, nc_margin)
        )
        self.face = face
        self.regime = regime
        self.rt_margin = rt_margin
        self.nc_margin = nc_margin


class AprioriViolation(ElastoslabError):
    def __init__(self, status):
        super().__init__("a priori regime left: %r" % (status,))
        self.status = status


class StepRejected(ElastoslabError):
    def __init__(self, violation):
        super().__init__("step rejected: %s" % (violation,))
        self.violation = violation


class DegenerateMinor(ElastoslabError):
    pass


class ParseError(ElastoslabError, ValueError):
    def __init__(self, message, lineno):
        super().__init__("line %s: %s" % (lineno, message))
        self.lineno = lineno


class ValidationError(ElastoslabError, ValueError):
    def __init__(self, message, field):
        super().__init__("%s: %s" % (field, message))
        self.field = field


class MissingRun(ElastoslabError):
    pass
