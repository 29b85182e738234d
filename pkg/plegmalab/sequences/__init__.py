from plegmalab.sequences.kseq import (
    SUPPORTED_GENERATORS,
    KSeqGen,
    basis_seq,
    c0_truncation_2seq,
    compose_seq,
    composition_tolerance,
    constant_seq,
    first_row_seq,
    is_plegma_block,
    is_plegma_disjointly_supported,
    l1_renorm,
    lift_seq,
    make_generator,
    pair_blocks,
    shifted_seq,
    summing_2seq,
    xk_basis,
)
from plegmalab.sequences.tree import (
    CanonicalTreeDecomposition,
    CTDExtraction,
    CTDVerification,
    TreeMap,
    canonical_tree_extract,
    interval_restriction_identity,
    random_tree_map,
    tree_differences,
    verify_ctd,
)
