"""Approximation of mixed Hölder functions on the unit cube from random samples.

Points are embedded sparsely into the span of tensor Haar functions on dyadic
boxes of measure at least ``2**-m``; randomized Kaczmarz then fits the
weights one sample at a time.
"""

from .dyadic import (DyadicBox, GeneralBox, box_count, cell_centers, estimate_mixed_holder_constant,
                     locate_box, mixed_difference, shape_count)
from .embedding import (SparseEmbedding, Triple, TripleIndex, embed, embed_batch, embed_dot,
                        embedding_dim, embedding_nnz, embedding_norm_sq, enumerate_triples,
                        gram_matrix)
from .exceptions import GuardError, InsufficientSamplesError, LedgerViolation
from .experiment import ExperimentConfig, ExperimentRecord, emit_table, read_table, run_experiment
from .kaczmarz import (Approximant, FitConfig, SpinConfig, draw_samples, evaluate, fit, fit_arrays,
                       integrate, kaczmarz_step, load_model, noise_ledger, required_samples,
                       save_model, spin_cycle)
from .smolyak import (CenterSamplePlan, best_linear_weights, binomial_identity, phi_prime,
                      smolyak_evaluate)
from .testfn import (FbmPath, PiecewiseLinear, ProductFunction, exact_integral, fbm_generate,
                     fbm_product, product_eval)

__version__ = "0.1.0"
