"""Proofs from uniform evidence: turn BHK realizers for minimal first-order
formulas into checkable sequent proofs."""

from .context import EvidenceContext, EvidenceStructure, check_wellformed
from .derive import NoRuleMatches, RuleId, StuckEvidence, prf_driver
from .eval import DEFAULT_FUEL, FuelExhaustedError, compute_to_head, normalize, step
from .formula import a_translate, is_minimal
from .friedman import false_instantiation_equivalence, il_proof_from_translation, prove_intuitionistic
from .proof import ProofCheckError, ProofTree, check_proof, compose_cut, extract
from .semantics import build_context_model, check_membership, check_uniform_validity_sample, eval_formula, m_triv
from .syntax import format_formula, format_proof, format_term, parse_formula, parse_proof, parse_term

__version__ = "0.1.0"
