"""
Storyteller shares and the propagation table
============================================

Across many triads we ask two things. What share of the pre-awakening
citations came from Storytellers? And after the awakening, do papers that
cite the Storytellers go on to cite the Sleeping Beauty and the Prince?
"""

import numpy as np

from dormancy import extract_triads, gaussian_kde, propagation_table, select_sleeping_beauties, storyteller_ratios
from dormancy.synth import SynthConfig, TriadSpec, generate_ca_corpus, plant_triad

corpus = generate_ca_corpus(SynthConfig(n_papers=20_000, refs_per_paper=6, seed=5))
for n_st in (3, 5, 8, 4, 6):
    plant_triad(corpus, TriadSpec(n_st=n_st, n_sb_only=6, n_pr_only=8))
index = corpus.to_index()
triads = extract_triads(index, select_sleeping_beauties(index))

ratios = storyteller_ratios(triads)
shares = [r.st_over_csb for r in ratios if r.st_over_csb is not None]
print(f"{len(ratios)} triads pass the window filter; mean ST share {np.mean(shares):.3f}")

# smoothed distribution of the shares on [0, 1], folded at the edges
kde = gaussian_kde(shares)
grid, dens = kde.grid_export(11)
for x, d in zip(grid, dens):
    print(f"{x:4.1f} {d:6.2f}")

print(propagation_table(index, triads).format())
