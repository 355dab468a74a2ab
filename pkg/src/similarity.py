"""
similarity.py

This module computes normalized overlaps between
sampled states.
"""

import numpy as np
from sklearn.metrics.pairwise import cosine_similarity

from src.errors import GridMismatchError


def compute_overlap(state, reference, region=None):
    """
    Normalized overlap |<state, reference>| / (||state|| ||reference||).

    On a uniform grid the sample dot product is the quadrature of the
    integral up to a common factor, so the cosine of the raw samples is
    the normalized overlap of the functions.

    Parameters:
        state (GridFunction): Mapped or trial state
        reference (GridFunction): Eigenstate it should align with
        region (slice | None): Restrict to a contiguous block of samples

    Returns:
        float: Overlap between 0 and 1
    """

    if state.grid != reference.grid:
        raise GridMismatchError(f"grid mismatch: {state.grid} vs {reference.grid}")

    region = region or slice(None)

    # Ensure correct shape
    state_vector = np.asarray(state.values[region], dtype=float).reshape(1, -1)
    reference_vector = np.asarray(reference.values[region], dtype=float).reshape(1, -1)

    if not np.any(state_vector) or not np.any(reference_vector):
        return 0.0

    return float(abs(cosine_similarity(state_vector, reference_vector)[0][0]))


def overlap_matrix(states, references, region=None):
    """
    Pairwise overlaps between two families of states.

    Returns:
        np.ndarray: |cos| matrix of shape (len(states), len(references))
    """

    region = region or slice(None)
    left = np.vstack([np.asarray(s.values[region], dtype=float) for s in states])
    right = np.vstack([np.asarray(r.values[region], dtype=float) for r in references])
    return np.abs(cosine_similarity(left, right))
