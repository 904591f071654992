"""Shuffled-DP kernel density estimation, classification and decoding.

The library simulates the full pipeline: locality-sensitive quantization
families (``lsq``), shuffled-DP bitsum protocols (``bitsum``), the
trusted shuffler and communication metering (``shuffler``), the KDE
protocol with its error bound (``protocol``), privacy composition
accounting (``privacy``), and the highest-density-class classifier with
private class decoding (``classify``). ``shufkde.cli`` provides the
command-line frontend.
"""

from . import bitsum, classify, datafiles, errors, lsq, privacy, protocol, shuffler, synth
from .bitsum import (VARIANT_3NB, VARIANT_CENTRAL_GAUSSIAN, VARIANT_EXACT,
                     VARIANT_RR, VARIANTS, BitsumConfig)
from .classify import ClassifierModel, classify_batch, decode_class, evaluate, train
from .datafiles import (LabeledDataset, Vocabulary, load_model, read_dataset,
                        read_vocab, save_model, write_dataset, write_vocab)
from .errors import ShufkdeError
from .lsq import (KERNEL_GAUSSIAN, KERNEL_IP_IDENTITY, KERNEL_IP_SIGNED,
                  KERNELS, LsqSpec, PairSet, kde_exact, kernel_exact)
from .privacy import (MODE_ADVANCED, MODE_PURE, BudgetSpec, PerInstanceBudget,
                      compose, label_keep_probability, solve_per_instance,
                      total_budget_report)
from .protocol import (ProtocolInit, ReleasedModel, bound_suprmse,
                       empirical_suprmse, init_protocol, query, query_batch,
                       run_protocol)
from .synth import gen_synthetic

__version__ = "0.1.0"
