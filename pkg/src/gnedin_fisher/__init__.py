"""Gnedin-Fisher species sampling model in its (gamma, zeta) and (gamma, psi) forms."""
from .allocation import (GrowthState, MultistepConfig, XiSampler, configuration_multiplicity,
                         grow_one, multistep_mixed_prob, multistep_new_prob, multistep_old_prob,
                         multistep_prob, sample_sequential, sample_two_stage, sequential_paths,
                         verify_multistep_paths, verify_multistep_total)
from .combinatorics import (DomainError, LogScalar, SeriesConvergenceError, SetPartition,
                            enumerate_compositions, enumerate_set_partitions,
                            falling_factorial_step, gauss_2f1_series, lah_number, noncentral_lah,
                            rising_factorial, rising_factorial_real_exponent)
from .laws import (GeneralizedWaring, MomentNonexistent, blocks_pmf_two_param,
                   new_blocks_posterior, verify_bayes_identity, verify_mixture, waring_moment,
                   waring_pmf, waring_sampler, xi_posterior_pmf, xi_prior_pmf,
                   xi_prior_tail_constant)
from .models import (FisherExtreme, GnedinFisherOne, GnedinFisherPsi, GnedinFisherZeta,
                     InvalidParameterError, NotRepresentable, one_step_rules, psi_to_zeta,
                     validate_zeta, weight_fisher, weight_psi, weight_zeta, zeta_to_psi)
from .partition import (OccupancyCounts, VerificationReport, blocks_pmf, eppf,
                        eppf_of_set_partition, verify_addition_rule, verify_normalization)
from .structural import (structural_atom, structural_density, structural_mixture_pdf_check,
                         structural_sampler)

__version__ = "0.1.0"
