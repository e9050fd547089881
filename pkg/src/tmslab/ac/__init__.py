"""Oscillations, disjoint families and absolute-continuity verdicts."""
from .functions import (BUILTINS, Builtin, Composite, FunctionSpec, GridDensityIntegral,
                        LinearOnSpace, builtin, dual_norm, function_from_dict, natural_domain)
from .oscillation import OscBracket, interval_oscillations, oscillation
from .families import DisjointFamily, random_family
from .verdicts import Certified, Falsified, Inconclusive, Pass, Witness
from .certify import (LipschitzEstimate, ac_algebra_check, certify_ac_integral,
                      certify_ac_lipschitz, estimate_local_lipschitz, glue_verdicts,
                      restriction_check, spot_check, uniform_continuity_check)
from .falsify import (StandardACReport, constancy_falsifier, falsify_ac, standard_ac_check,
                      validate_witness)
from .pipeline import analyze, is_ac
