"""Deformations of complex structure induced by holomorphic Poisson
structures, computed exactly on a polynomial local model."""

from .algebra import GaussianRational, Poly, TSeries, format_poly, parse_poly
from .forms import MixedForm, TangentForm, delbar, del_, dolbeault_homotopy, tv_bracket
from .poisson import PoissonStructure, bracket, hamiltonian, jacobiator
from .recursion import DeformationInput, DeformationResult, run_recursion
from .report import Report, run
from .scenario import Scenario, ScenarioError, load_fixture, parse_scenario, print_scenario

__all__ = [
    "GaussianRational", "Poly", "TSeries", "format_poly", "parse_poly",
    "MixedForm", "TangentForm", "delbar", "del_", "dolbeault_homotopy", "tv_bracket",
    "PoissonStructure", "bracket", "hamiltonian", "jacobiator",
    "DeformationInput", "DeformationResult", "run_recursion",
    "Report", "run", "Scenario", "ScenarioError", "load_fixture", "parse_scenario",
    "print_scenario",
]
