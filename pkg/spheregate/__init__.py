# spheregate Package
# Obstruction pipeline for finite groups acting on homology 3- and 4-spheres

from .gf import ff_make, ff_elem, ff_add, ff_sub, ff_mul, ff_inv, ff_pow, ff_order, ff_primitive
from .permgroup import (
    GroupHandle,
    SubgroupHandle,
    closure,
    subgroup,
    conj_classes,
    centralizer,
    normalizer,
    center,
    derived_subgroup,
    normal_closure,
    core,
    sylow,
    is_simple,
    is_solvable,
    normal_subgroups,
    index_two_subgroups,
    quotient,
    subgroup_conjugacy_partition
)
from .constructors import parse_groupspec, build, orthogonal_model
from .subgroups import (
    max_ea_rank,
    maximal_ea_subgroups,
    find_metacyclic,
    multiplier_admissible,
    psl2_borel_multipliers,
    sectional_2_rank
)
from .fixdim import (
    lattice_abstract,
    lattice_from_group,
    enumerate_dimfns,
    enumerate_dimfns_bruteforce,
    check_dimfn,
    involution_profile,
    uniform_borel_check,
    descent_free_rank_scan,
    orthogonal_dimfn
)
from .structure import analyze_structure, is_quasisimple, classify_structure
from .rules import (
    check_sphere4,
    check_sphere3,
    survey,
    cyclic_normal_kernels,
    acts_on_two_sphere,
    load_axiom_table,
    load_manifest
)

__all__ = [
    # Finite fields
    'ff_make',          # GF(p^n) with its Conway or first irreducible modulus
    'ff_elem',
    'ff_add',
    'ff_sub',
    'ff_mul',
    'ff_inv',
    'ff_pow',
    'ff_order',
    'ff_primitive',

    # Permutation groups
    'GroupHandle',
    'SubgroupHandle',
    'closure',          # Dimino closure of generators
    'subgroup',
    'conj_classes',
    'centralizer',
    'normalizer',
    'center',
    'derived_subgroup',
    'normal_closure',
    'core',
    'sylow',
    'is_simple',
    'is_solvable',
    'normal_subgroups',
    'index_two_subgroups',
    'quotient',         # G/N on the cosets of a core-free overgroup
    'subgroup_conjugacy_partition',

    # Group constructors
    'parse_groupspec',  # Text -> GroupSpec
    'build',            # GroupSpec -> GroupHandle
    'orthogonal_model',

    # Subgroup searches
    'max_ea_rank',
    'maximal_ea_subgroups',
    'find_metacyclic',
    'multiplier_admissible',
    'psl2_borel_multipliers',
    'sectional_2_rank',

    # Fixed-point dimension functions
    'lattice_abstract',
    'lattice_from_group',
    'enumerate_dimfns',
    'enumerate_dimfns_bruteforce',  # Oracle
    'check_dimfn',
    'involution_profile',
    'uniform_borel_check',
    'descent_free_rank_scan',
    'orthogonal_dimfn',

    # Structure
    'analyze_structure',
    'is_quasisimple',
    'classify_structure',

    # Obstruction rules
    'check_sphere4',    # Verdict for homology 4-spheres
    'check_sphere3',    # Verdict for homology 3-spheres
    'survey',           # Verdict table over a manifest
    'cyclic_normal_kernels',
    'acts_on_two_sphere',
    'load_axiom_table',
    'load_manifest',
]
