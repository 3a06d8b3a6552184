"""Multipartite Weyl channels: Weyl operators, Choi spectra, subgroup machinery and erasing channels."""
from .channels import (
    ChannelError,
    ChoiSpectrum,
    ValidationReport,
    WeylChannel,
    apply,
    choi_matrix,
    choi_matrix_from_action,
    compose,
    depolarizing_channel,
    extreme_channel,
    identity_channel,
    is_cp,
    is_extreme,
    iterate,
    lambda_to_tau,
    tau_to_lambda,
    transform_matrix,
    unimodular_support,
    validate,
)
from .erasing import (
    ErasingChannel,
    annihilator,
    build_erasing,
    closure,
    closure_check,
    enumerate_erasing,
    erasing_spectrum,
    generating_channels,
    generator_subgroups,
    kraus_operators,
)
from .groups import CapExceeded, GroupElement, GroupSpec, PrimaryComponent, conjugate_partition, decompose
from .subgroups import (
    Automorphism,
    Homomorphism,
    Subgroup,
    SubgroupBasis,
    combine_across_primes,
    count_automorphisms,
    count_subgroups_of_type,
    enumerate_automorphisms,
    enumerate_homomorphisms,
    enumerate_subgroups,
    representative_bases,
    representative_subgroups,
)
from .weyl import PhaseExponent, WeylIndex, mu_phase, weyl_matrix, weyl_product, weyl_spectrum

__version__ = "0.1.0"
