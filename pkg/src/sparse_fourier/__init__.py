"""Sublinear-time sparse Fourier approximation with instance-optimal error bounds."""
from .crt import band_limits, centered, crt_reconstruct, mod_inverse, residues_of, ResidueVector
from .measurement import MeasurementPlan, deterministic_plan, subsample_moduli, tensor_moduli
from .multidim import (
    FrequencyMap,
    LatticeSpectrum,
    flatten_oracle,
    g_inverse,
    g_map,
    multidim_approximate,
    select_dimension_moduli,
)
from .oracle import ErrorReport, dense_dft, optimal_terms, verify_bound
from .primes import (
    InfeasibleError,
    ModulusRangeWarning,
    ParameterError,
    SModuli,
    TModuli,
    first_primes,
    predicted_row_bound,
    prime_counting_bounds,
    select_s_moduli,
    select_t_moduli,
)
from .recovery import (
    Params,
    SparseSpectrum,
    fourier_approximate_1,
    fourier_approximate_2,
    full_band_plan,
    identify_frequencies,
    median_estimate,
    tensor_plan,
)
from .sampling import AliasedSpectra, FunctionOracle, SignalOracle, TrigPolynomial, dft_any_length, fast_multiply

__version__ = "0.1.0"

__all__ = [
    "AliasedSpectra",
    "band_limits",
    "centered",
    "crt_reconstruct",
    "dense_dft",
    "deterministic_plan",
    "dft_any_length",
    "ErrorReport",
    "fast_multiply",
    "first_primes",
    "flatten_oracle",
    "fourier_approximate_1",
    "fourier_approximate_2",
    "FrequencyMap",
    "full_band_plan",
    "FunctionOracle",
    "g_inverse",
    "g_map",
    "identify_frequencies",
    "InfeasibleError",
    "LatticeSpectrum",
    "MeasurementPlan",
    "median_estimate",
    "mod_inverse",
    "ModulusRangeWarning",
    "multidim_approximate",
    "optimal_terms",
    "ParameterError",
    "Params",
    "predicted_row_bound",
    "prime_counting_bounds",
    "residues_of",
    "ResidueVector",
    "select_dimension_moduli",
    "select_s_moduli",
    "select_t_moduli",
    "SignalOracle",
    "SModuli",
    "SparseSpectrum",
    "subsample_moduli",
    "tensor_moduli",
    "tensor_plan",
    "TModuli",
    "TrigPolynomial",
    "verify_bound",
]
