"""Relation algebra over orbit sets."""

from .implications import (
    Arrow,
    CompositionError,
    ImplicationDesc,
    circ,
    circ_power,
    circ_template,
    classify_implication,
    describe,
    first_pair,
    flip_to_fwd_bwd,
    is_implication,
    reinterpret_bwd_fwd,
    second_pair,
)
from .ppjoin import (
    BUILTIN,
    PpTemplate,
    bowtie,
    bowtie3,
    exist_join,
    get_template,
    pp_apply,
    register_template,
)
from .relation import (
    Relation,
    combine,
    complement,
    efficiently_entails,
    entails_implication,
    entails_no_equalities,
    from_formula,
    inverse_binary,
    nonempty_proper_subsets,
    permute,
    project,
)

__all__ = [
    "Arrow", "BUILTIN", "CompositionError", "ImplicationDesc", "PpTemplate", "Relation",
    "bowtie", "bowtie3", "circ", "circ_power", "circ_template", "classify_implication",
    "combine", "complement", "describe", "efficiently_entails", "entails_implication",
    "entails_no_equalities", "exist_join", "first_pair", "flip_to_fwd_bwd", "from_formula",
    "get_template", "inverse_binary", "is_implication", "nonempty_proper_subsets", "permute",
    "pp_apply", "project", "register_template", "reinterpret_bwd_fwd", "second_pair",
]
