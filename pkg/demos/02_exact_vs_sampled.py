"""
Exact edge probabilities against the sampler
=============================================

On a small diamond the inverse Kasteleyn matrix gives every edge
probability exactly.  Here we draw 20000 tilings of order 4 and
check that the sampled frequencies scatter around those values
as binomial noise should.
"""
import numpy as np

from aztec_dimers.kasteleyn import edge_probabilities, inverse_kasteleyn, kasteleyn_matrix, partition_function
from aztec_dimers.lattice import AztecGraph, WeightScheme
from aztec_dimers.shuffling import ShuffleSampler, precompute_weight_tables, sample_stream

graph = AztecGraph(1, WeightScheme.two_periodic(0.7))
K = kasteleyn_matrix(graph)
p = edge_probabilities(graph, K, inverse_kasteleyn(K))

# two independent routes to the partition function
print("det K        ", partition_function(K))
print("urban renewal", np.exp(precompute_weight_tables(graph).log_partition_function()))

sampler = ShuffleSampler(graph)
count = 20_000
freq = np.mean([sampler.occupancy(sample_stream(0, i)).transpose(2, 1, 0).ravel()
                for i in range(count)], axis=0)
z = (freq - p) / np.sqrt(p * (1 - p) / count)
print("largest |z| over", graph.num_edges, "edges:", np.abs(z).max().round(2))
