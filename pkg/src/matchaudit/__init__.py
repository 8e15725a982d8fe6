"""Exact audits of random two-sided matching mechanisms for coalitional
stability before, during and after preference uncertainty resolves."""

from .lp import LinearProgram, LpOutcome, solve_max
from .market import (SELF, Agent, Market, Matching, PreferenceProfile, ResourceLimitError,
                     enumerate_matchings, is_stable_matching, man, ranking_from_list, woman)
from .mechanisms import (Mechanism, RandomMatching, RankDistribution, UtilityFunction,
                         da_mechanism, deferred_acceptance, example2_deviation,
                         expected_utility, random_stable_mechanism, rank_distribution,
                         stable_lottery_mechanism, stable_set, table_mechanism,
                         uniform_random_full, uniform_random_mechanism)
from .priors import (AgentTypeDistribution, Event, Prior, condition, iid_uniform_prior,
                     marginal_types, point_mass, product_prior)
from .stability import (BlockWitness, InterimWitness, StabilityReport, ex_ante_block,
                        ex_ante_pairwise_stable, ex_ante_stable_at, ex_post_block,
                        ex_post_stable_at, fosd_compare, interim_block,
                        interim_instability_witness, interim_pairwise_stable,
                        interim_stable_at, mutual_first_violation)
from .verify import WitnessError, check_block_witness, check_interim_witness

__version__ = "0.1.0"
